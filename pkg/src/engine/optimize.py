"""Planar and flip-chip parameter sweeps"""
#외부 모듈
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy.constants import epsilon_0
from scipy.interpolate import RegularGridInterpolator

#내부 모듈
from src.engine.circuit import coupling, solve_resonator, solve_wire_length
from src.engine.exposure import DEFAULT_P_LIMIT, critical_chip_width
from src.engine.fieldsolve import (
    CAPACITANCE_AGREEMENT,
    DEFAULT_TOL,
    capacitance_mismatch,
    capacitance_per_length,
    field_ratio,
    homogeneity_eta,
    solve_cached,
)
from src.engine.geometry import (
    SAPPHIRE_EPS_R,
    SUBSTRATE_THICKNESS,
    flipchip_cross_section,
    flipchip_dimensions,
    planar_cross_section,
)
from src.errors import InvalidInputError, NoSafeWidthError, NumericalError, ToolkitError
from src.models.beam import GaussianBeam
from src.models.chip import GridSpec
from src.models.cloud import AtomCloud
from src.models.fieldmap import FieldMap
from src.models.resonator import (
    DEFAULT_C_PRIME,
    DEFAULT_DIPOLE,
    DEFAULT_L0,
    DEFAULT_PHASE_VELOCITY,
    DEFAULT_Q,
    DEFAULT_TARGET_OMEGA,
    ResonatorModel,
)
from src.models.sweep import SweepFailure, SweepPoint, SweepTable

logger = logging.getLogger(__name__)

PLANAR_CSV_COLUMNS = ("a_m", "b_m", "s_m", "C_F", "L_H", "g_rad_per_s", "eta")
FLIPCHIP_CSV_COLUMNS = ("d_m", "a_m", "l_m", "l_ch_m", "l_ch_crit_m", "s_m", "C_F", "L_H", "g_rad_per_s", "eta")
# 행 공진 잔차 허용치
RESONANCE_TOLERANCE = 1e-6
FLIPCHIP_D_MIN = 100e-6


@dataclass(frozen=True)
class DesignConstants:
    """스윕 전체에 고정되는 값"""
    target_omega: float = DEFAULT_TARGET_OMEGA
    plate_length: float = 1e-3
    q: float = DEFAULT_Q
    cloud_height: float = 80e-6
    dipole: float = DEFAULT_DIPOLE
    c_prime: float = DEFAULT_C_PRIME
    phase_velocity: float = DEFAULT_PHASE_VELOCITY
    l0: float = DEFAULT_L0
    substrate_thickness: Optional[float] = SUBSTRATE_THICKNESS
    eps_r: float = SAPPHIRE_EPS_R
    back_gap: Optional[float] = None
    grid: GridSpec = field(default_factory=GridSpec)
    tol: float = DEFAULT_TOL
    method: str = "direct"
    cloud: Optional[AtomCloud] = None
    longitudinal: bool = True
    beam: GaussianBeam = field(default_factory=GaussianBeam)
    p_limit: float = DEFAULT_P_LIMIT
    ratio_digits: Optional[int] = 1
    d_min: float = FLIPCHIP_D_MIN

    def fixed(self) -> dict[str, float]:
        return {
            "target_omega": self.target_omega,
            "plate_length": self.plate_length,
            "q": self.q,
            "cloud_height": self.cloud_height,
            "dipole": self.dipole,
        }


# ==================== 단일 지점 ====================

def evaluate_point(
    c0: float,
    ratio: float,
    constants: DesignConstants,
    a: float,
    b: Optional[float] = None,
    d: Optional[float] = None,
    eta: Optional[float] = None,
    meta: Optional[dict] = None,
) -> SweepPoint:
    """C₀ 와 |E|/V 로부터 회로 파이프라인 (선 길이 → C, L → g)"""
    model = ResonatorModel(
        c0=c0,
        c_prime=constants.c_prime,
        phase_velocity=constants.phase_velocity,
        l0=constants.l0,
        q=constants.q,
    )
    s = solve_wire_length(model, constants.target_omega)
    solution = solve_resonator(model.with_wire_length(s))
    mismatch = abs(solution.omega0 - constants.target_omega) / constants.target_omega
    if mismatch > RESONANCE_TOLERANCE:
        raise NumericalError(
            "wire length does not reproduce the target frequency",
            details={"mismatch": mismatch, "s": s}
        )
    result = coupling(solution.omega0, solution.capacitance, ratio, constants.dipole)
    return SweepPoint(
        a=a,
        b=b,
        s=s,
        capacitance=solution.capacitance,
        inductance=solution.inductance,
        g=result.g,
        eta=eta,
        d=d,
        c_dc=c0 + constants.c_prime * (s - constants.q),
        field_ratio=ratio,
        omega0=solution.omega0,
        meta={"resonance_mismatch": mismatch, **(meta or {})},
    )


def _plate_capacitance(field_map: FieldMap) -> tuple[float, float]:
    """(C′, 에너지/전하 불일치); 허용치를 넘으면 경고만 남기고 지점은 유지"""
    c_per_length = capacitance_per_length(field_map, "plate", check=False)
    mismatch = capacitance_mismatch(field_map, "plate")
    if mismatch > CAPACITANCE_AGREEMENT:
        logger.warning(
            "capacitance mismatch %.2f%% on %s grid; under-resolved",
            100 * mismatch, field_map.geometry_hash[:12]
        )
    return c_per_length, mismatch


def planar_point(a: float, b: float, constants: DesignConstants) -> SweepPoint:
    geometry = planar_cross_section(
        a, b,
        substrate_thickness=constants.substrate_thickness,
        eps_r=constants.eps_r,
        back_gap=constants.back_gap,
        focus_height=constants.cloud_height,
    )
    field_map = solve_cached(geometry, constants.grid, constants.tol, constants.method)
    c_per_length, mismatch = _plate_capacitance(field_map)
    c0 = c_per_length * constants.plate_length
    ratio = field_ratio(field_map, 0.0, constants.cloud_height)
    eta = None
    if constants.cloud is not None:
        eta = homogeneity_eta(field_map, constants.cloud, (0.0, constants.cloud_height))
    return evaluate_point(
        c0, ratio, constants, a=a, b=b, eta=eta,
        meta={
            "residual": field_map.residual,
            "geometry_hash": field_map.geometry_hash,
            "capacitance_mismatch": mismatch,
        }
    )


def flipchip_capacitance(d: float, a: float, l: float, constants: DesignConstants):
    """C₃D 와 두 단면 맵 (길이 방향 맵은 선택)"""
    transverse = solve_cached(
        flipchip_cross_section(d, a, constants.substrate_thickness, constants.eps_r),
        constants.grid, constants.tol, constants.method
    )
    c_x, _ = _plate_capacitance(transverse)
    if not constants.longitudinal:
        return c_x * l, transverse, None
    longitudinal = solve_cached(
        flipchip_cross_section(d, l, constants.substrate_thickness, constants.eps_r),
        constants.grid, constants.tol, constants.method
    )
    c_y, _ = _plate_capacitance(longitudinal)
    # 판 면적 항은 두 단면 모두에 들어 있으므로 한 번 뺀다
    return c_x * l + c_y * a - epsilon_0 * a * l / d, transverse, longitudinal


def flipchip_point(d: float, constants: DesignConstants) -> SweepPoint:
    if d < constants.d_min:
        raise InvalidInputError(
            "plate distance below the practical floor",
            details={"d": d, "d_min": constants.d_min}
        )
    a, l, l_ch = flipchip_dimensions(d)
    c3d, transverse, longitudinal = flipchip_capacitance(d, a, l, constants)
    ratio = field_ratio(transverse, 0.0, 0.0)
    eta = None
    if constants.cloud is not None:
        eta = homogeneity_eta(transverse, constants.cloud, (0.0, 0.0), longitudinal=longitudinal)
    try:
        l_ch_crit = critical_chip_width(constants.beam, d / 2, constants.p_limit, ratio_digits=constants.ratio_digits)
    except NoSafeWidthError:
        l_ch_crit = 0.0
    return evaluate_point(
        c3d, ratio, constants, a=a, d=d, eta=eta,
        meta={"l": l, "l_ch": l_ch, "l_ch_crit": l_ch_crit, "residual": transverse.residual}
    )


# ==================== 스윕 ====================

def _run_task(task: tuple) -> tuple:
    """프로세스 풀 워커 (모듈 수준 함수)"""
    kind, key, constants = task
    try:
        if kind == "planar":
            return ("ok", planar_point(key[0], key[1], constants))
        return ("ok", flipchip_point(key[0], constants))
    except ToolkitError as exc:
        return ("error", SweepFailure(key=key, code=exc.code, message=exc.message))
    except (np.linalg.LinAlgError, ArithmeticError, ValueError, RuntimeError) as exc:
        # 특이 행렬이나 NaN 전파도 지점 실패로 기록하고 스윕은 계속
        logger.debug("sweep point %s raised %s", key, type(exc).__name__, exc_info=True)
        return ("error", SweepFailure(key=key, code=NumericalError.code, message=f"{type(exc).__name__}: {exc}"))


def _execute(tasks: list[tuple], jobs: int) -> list[tuple]:
    if jobs <= 1 or len(tasks) <= 1:
        results = []
        for i, task in enumerate(tasks, start=1):
            results.append(_run_task(task))
            logger.info("sweep point %d/%d done", i, len(tasks))
        return results
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_task, tasks))


def _assemble(kind: str, results: list[tuple], constants: DesignConstants) -> SweepTable:
    points = sorted((r[1] for r in results if r[0] == "ok"), key=lambda p: p.key)
    failures = sorted((r[1] for r in results if r[0] == "error"), key=lambda f: f.key)
    for failure in failures:
        logger.warning("sweep point %s failed: %s (%s)", failure.key, failure.message, failure.code)
    return SweepTable(kind=kind, points=tuple(points), fixed=constants.fixed(), failures=tuple(failures))


def sweep_planar(
    a_values: Iterable[float],
    b_values: Iterable[float],
    constants: Optional[DesignConstants] = None,
    jobs: int = 1
) -> SweepTable:
    """(a, b) 격자 스윕, 실패 지점은 기록하고 계속"""
    constants = constants or DesignConstants()
    keys = sorted({(float(a), float(b)) for a in a_values for b in b_values})
    tasks = [("planar", key, constants) for key in keys]
    return _assemble("planar", _execute(tasks, jobs), constants)


def sweep_flipchip(
    d_values: Iterable[float],
    constants: Optional[DesignConstants] = None,
    jobs: int = 1
) -> SweepTable:
    constants = constants or DesignConstants()
    keys = sorted({(float(d), 0.0) for d in d_values})
    tasks = [("flipchip", key, constants) for key in keys]
    return _assemble("flipchip", _execute(tasks, jobs), constants)


# ==================== 분석 ====================

def interpolate_s(table: SweepTable, a: float, b: float) -> float:
    """(a, b) → s 쌍선형 보간, 외삽 거부"""
    a_axis = np.unique([p.a for p in table.points])
    b_axis = np.unique([p.b for p in table.points if p.b is not None])
    if a_axis.size < 2 or b_axis.size < 2:
        raise InvalidInputError("interpolation needs at least a 2x2 table")
    lookup = {(p.a, p.b): p.s for p in table.points}
    values = np.full((a_axis.size, b_axis.size), np.nan)
    for i, av in enumerate(a_axis):
        for j, bv in enumerate(b_axis):
            values[i, j] = lookup.get((float(av), float(bv)), np.nan)
    if np.isnan(values).any():
        raise InvalidInputError("sweep table has holes; interpolation needs a complete grid")
    if not (a_axis[0] <= a <= a_axis[-1] and b_axis[0] <= b <= b_axis[-1]):
        raise InvalidInputError(
            "query lies outside the sweep table; extrapolation is not supported",
            details={"a": a, "b": b, "a_range": [a_axis[0], a_axis[-1]], "b_range": [b_axis[0], b_axis[-1]]}
        )
    interpolator = RegularGridInterpolator((a_axis, b_axis), values, method="linear")
    return float(interpolator([[a, b]])[0])


def find_optimum(table: SweepTable) -> SweepPoint:
    """g 최대 지점; 동률은 작은 a, 작은 b 우선"""
    if not table.points:
        raise InvalidInputError("sweep table is empty")
    return min(table.points, key=lambda p: (-p.g, p.a, p.b if p.b is not None else 0.0))


def strong_coupling_threshold(table: SweepTable, q_factor: float, omega0: Optional[float] = None) -> Optional[float]:
    """2g > ω₀/Q 를 만족하는 가장 큰 d (없으면 None)"""
    omega0 = omega0 or table.fixed["target_omega"]
    kappa = omega0 / q_factor
    strong = [p.key[0] for p in table.points if 2 * p.g > kappa]
    return max(strong) if strong else None


def g_ratio(table: SweepTable, a: float, b: float) -> float:
    """g(a, b) / g_max"""
    best = find_optimum(table)
    for p in table.points:
        if math.isclose(p.a, a, rel_tol=1e-9) and p.b is not None and math.isclose(p.b, b, rel_tol=1e-9):
            return p.g / best.g
    raise InvalidInputError("point not in sweep table", details={"a": a, "b": b})


def write_sweep_csv(table: SweepTable, path) -> Path:
    """스윕 표 CSV (η 가 없으면 nan)"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows: list[Sequence[float]] = []
    for p in table.points:
        eta = p.eta if p.eta is not None else math.nan
        if table.kind == "flipchip":
            rows.append((p.d, p.a, p.meta.get("l", math.nan), p.meta.get("l_ch", math.nan),
                         p.meta.get("l_ch_crit", math.nan), p.s, p.capacitance, p.inductance, p.g, eta))
        else:
            rows.append((p.a, p.b, p.s, p.capacitance, p.inductance, p.g, eta))
    columns = FLIPCHIP_CSV_COLUMNS if table.kind == "flipchip" else PLANAR_CSV_COLUMNS
    data = np.asarray(rows, dtype=float).reshape(-1, len(columns))
    np.savetxt(path, data, delimiter=",", header=",".join(columns), comments="", fmt="%.10e")
    return path
