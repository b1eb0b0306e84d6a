"""
설계 재현 스크립트
Usage: python scripts/reproduce.py [--quick] [--jobs N]

configs/ 의 설정으로 다음을 순서대로 생성
- 트랩 특성 + z / y 퍼텐셜 단면 (fig2)
- 노출 예산 + 플립칩 칩 폭 표 (fig6)
- 평면 (a, b) 스윕 (fig3)
- 플립칩 d 스윕 (fig6)
- 합성 S11 트레이스와 피팅 (fit)

--quick 은 스윕을 건너뛴다.
"""
import argparse
import os
import sys

# 프로젝트 루트를 path에 추가
ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
sys.path.insert(0, ROOT)

from src.cli import main as cli


def _config(name: str) -> str:
    return os.path.join(ROOT, "configs", name)


def run(label: str, argv: list[str]) -> int:
    print(f"{label}...")
    code = cli(argv)
    status = "done" if code == 0 else f"exit {code}"
    print(f"  {label}: {status}")
    return code


def main():
    parser = argparse.ArgumentParser(description="Regenerate all design tables and fits")
    parser.add_argument("--quick", action="store_true", help="skip the field-solver sweeps")
    parser.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args()

    codes = [
        run("Trap characteristics", ["--config", _config("fig2.toml"), "trap"]),
        run("Exposure budget and chip-width table", ["--config", _config("fig6.toml"), "exposure"]),
    ]
    if not args.quick:
        codes.append(run("Planar sweep", ["--config", _config("fig3.toml"), "--jobs", str(args.jobs), "sweep", "--planar"]))
        codes.append(run("Flip-chip sweep", ["--config", _config("fig6.toml"), "--jobs", str(args.jobs), "sweep", "--flipchip"]))
    codes.append(run("Synthetic trace", ["--config", _config("fit.toml"), "--seed", "7", "synth"]))
    codes.append(run("Trace fit", ["--config", _config("fit.toml"), "fit", os.path.join("out", "fit", "synth_trace.csv")]))

    print("=" * 50)
    failed = [code for code in codes if code != 0]
    print("All outputs regenerated." if not failed else f"{len(failed)} step(s) failed.")
    print("=" * 50)
    sys.exit(max(codes))


if __name__ == "__main__":
    main()
