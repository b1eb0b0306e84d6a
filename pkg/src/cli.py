"""Command-line front end

    python -m src.cli [--config PATH] [--json] [--out DIR] [--jobs N] [--seed S] [--verbose] <command>

종료 코드: 0 성공, 1 사용법 / 설정 오류, 2 수치 실패, 3 부분 스윕.
"""
#외부 모듈
import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel
from scipy.constants import Boltzmann

#내부 모듈
from src.config import settings, setup_logging
from src.engine.beam_trap import potential_profile
from src.engine.fieldio import save_fieldmap_npz, write_fieldmap_csv
from src.engine.optimize import sweep_flipchip, sweep_planar, write_sweep_csv
from src.engine.resfit import fit, format_report, read_trace_csv, write_trace_csv
from src.errors import PartialSweepError, ToolkitError
from src.schema.config import ProjectConfig, design_constants, fit_options, load_config
from src.schema.design import FieldReport, SweepReport
from src.schema.exposure import ExposureReport
from src.schema.fit import FitReport, synth_from_section
from src.schema.trap import TrapReport

logger = logging.getLogger(__name__)

PROFILE_POINTS = 201
# 프로파일 범위 (빔 웨이스트 / Rayleigh 길이 배수)
PROFILE_SPAN = 3.0


class _Parser(argparse.ArgumentParser):
    """사용법 오류도 exit 1"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


# ==================== 출력 ====================

def _out_dir(args, config: ProjectConfig) -> Path:
    path = Path(args.out or config.output.dir or settings.OUTPUT_DIR)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _emit(args, title: str, report: BaseModel) -> None:
    """--json 이면 JSON, 아니면 같은 값을 key : value 로"""
    if args.json:
        print(report.model_dump_json(indent=2))
        return
    print(title)
    for key, value in report.model_dump(mode="json").items():
        if isinstance(value, list) and value and isinstance(value[0], dict):
            print(f"  {key}:")
            for row in value:
                print("    " + ", ".join(f"{k}={v!r}" for k, v in row.items()))
        else:
            print(f"  {key:<34} {value!r}")


def _write_csv(path: Path, columns: Sequence[str], data) -> Path:
    table = np.asarray(data, dtype=float).reshape(-1, len(columns))
    np.savetxt(path, table, delimiter=",", header=",".join(columns), comments="", fmt="%.10e")
    return path


# ==================== 명령 ====================

def cmd_trap(args, config: ProjectConfig) -> int:
    beam = config.beam.to_model()
    species = config.species.to_model()
    report = TrapReport.build(beam, species, config.cloud.temperature_k, config.cloud.atom_count)
    out = _out_dir(args, config)
    for axis, span in (("z", PROFILE_SPAN * beam.waist), ("y", PROFILE_SPAN * beam.rayleigh_length)):
        offsets, potential = potential_profile(beam, species, axis, span, PROFILE_POINTS)
        path = _write_csv(
            out / f"trap_profile_{axis}.csv",
            ("offset_m", "potential_J", "potential_K"),
            np.column_stack([offsets, potential, potential / Boltzmann]),
        )
        logger.info("wrote %s", path)
    _emit(args, "Trap", report)
    return 0


def cmd_exposure(args, config: ProjectConfig) -> int:
    section = config.exposure
    report = ExposureReport.build(
        config.beam.to_model(),
        config.species.to_model(),
        section.chip_width_m,
        atom_count=config.cloud.atom_count,
        p_limit=section.p_limit_w,
        d_values=section.d_values_m,
        ratio_digits=section.ratio_digits,
    )
    if report.table:
        rows = [
            (r.d_m, r.a_m, r.l_m, r.l_ch_m, np.inf if r.l_ch_crit_m is None else r.l_ch_crit_m, r.p_dir_w)
            for r in report.table
        ]
        path = _write_csv(
            _out_dir(args, config) / "flipchip_table.csv",
            ("d_m", "a_m", "l_m", "l_ch_m", "l_ch_crit_m", "p_dir_W"),
            rows,
        )
        logger.info("wrote %s", path)
    _emit(args, "Exposure", report)
    return 0


def cmd_field(args, config: ProjectConfig) -> int:
    constants = design_constants(config, with_cloud=True)
    if config.chip.kind == "flipchip":
        report, field_map = FieldReport.flipchip(config.chip.d_m, constants)
    else:
        report, field_map = FieldReport.planar(config.chip.a_m, config.chip.b_m, constants)
    if report.under_resolved:
        logger.warning("energy and charge capacitance differ by %.2f%%; refine the grid", 100 * report.capacitance_mismatch)
    out = _out_dir(args, config)
    write_fieldmap_csv(field_map, out / f"field_{report.kind}.csv")
    save_fieldmap_npz(field_map, out / f"field_{report.kind}.npz")
    _emit(args, "Field", report)
    return 0


def cmd_sweep(args, config: ProjectConfig) -> int:
    kind = "flipchip" if args.flipchip else "planar" if args.planar else config.sweep.kind
    constants = design_constants(config)
    jobs = args.jobs or settings.JOBS
    if kind == "flipchip":
        table = sweep_flipchip(config.sweep.d_values_m, constants, jobs=jobs)
    else:
        table = sweep_planar(config.sweep.a_values_m, config.sweep.b_values_m, constants, jobs=jobs)
    path = write_sweep_csv(table, _out_dir(args, config) / f"sweep_{kind}.csv")
    report = SweepReport.build(table, quality_factor=config.circuit.quality_factor, csv=str(path))
    _emit(args, "Sweep", report)
    if not args.json:
        print(report.optimum_line())
    if not table.complete:
        for failure in table.failures:
            print(f"failed {failure.key}: {failure.code} {failure.message}", file=sys.stderr)
        raise PartialSweepError(
            f"{len(table.failures)} of {len(table.failures) + len(table)} sweep points failed",
            details={"failures": [list(f.key) for f in table.failures]}
        )
    return 0


def cmd_fit(args, config: ProjectConfig) -> int:
    result = fit(read_trace_csv(args.trace), fit_options(config))
    report = FitReport.build(result)
    if args.out or config.output.dir:
        path = _out_dir(args, config) / f"{Path(args.trace).stem}_fit.json"
        path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
        logger.info("wrote %s", path)
    if args.json:
        _emit(args, "Fit", report)
    else:
        print(format_report(result))
    return 0


def cmd_synth(args, config: ProjectConfig) -> int:
    trace = synth_from_section(config.synth, args.seed)
    path = write_trace_csv(trace, Path(args.output) if args.output else _out_dir(args, config) / "synth_trace.csv")
    print(path)
    return 0


def cmd_serve(args, config: Optional[ProjectConfig]) -> int:
    from src.main import run

    run(host=args.host, port=args.port or settings.PORT_NUM)
    return 0


# ==================== 파서 ====================

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="cavity", description="Rydberg-atom / superconducting resonator design toolkit")
    parser.add_argument("--config", default=None, help="TOML config (기본: DEFAULT_CONFIG)")
    parser.add_argument("--json", action="store_true", help="machine-readable output")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--jobs", type=int, default=None, help="worker processes for sweeps")
    parser.add_argument("--seed", type=int, default=0, help="random seed for synthetic traces")
    parser.add_argument("--verbose", "-v", action="store_true", help="debug logging")
    commands = parser.add_subparsers(dest="command", required=True)

    commands.add_parser("trap", help="trap depth, frequencies, cloud size, potential profiles").set_defaults(handler=cmd_trap)
    commands.add_parser("exposure", help="direct / scattered laser power and the flip-chip width table").set_defaults(handler=cmd_exposure)
    commands.add_parser("field", help="solve the configured cross-section and export the grid").set_defaults(handler=cmd_field)

    sweep = commands.add_parser("sweep", help="planar (a, b) or flip-chip d sweep")
    group = sweep.add_mutually_exclusive_group()
    group.add_argument("--planar", action="store_true")
    group.add_argument("--flipchip", action="store_true")
    sweep.set_defaults(handler=cmd_sweep)

    fit_parser = commands.add_parser("fit", help="fit an S11 trace CSV (freq_Hz,re_S11,im_S11)")
    fit_parser.add_argument("trace")
    fit_parser.set_defaults(handler=cmd_fit)

    synth = commands.add_parser("synth", help="write a synthetic S11 trace from [synth]")
    synth.add_argument("--output", "-o", default=None, help="trace CSV path")
    synth.set_defaults(handler=cmd_synth)

    serve = commands.add_parser("serve", help="run the HTTP API")
    serve.add_argument("--host", default="0.0.0.0")
    serve.add_argument("--port", type=int, default=None)
    serve.set_defaults(handler=cmd_serve)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging("DEBUG" if args.verbose else None)
    try:
        config = None if args.command == "serve" else load_config(args.config or settings.DEFAULT_CONFIG)
        return args.handler(args, config)
    except ToolkitError as exc:
        print(f"error [{exc.code}]: {exc.message}", file=sys.stderr)
        if exc.details and args.verbose:
            print(f"details: {exc.details}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
