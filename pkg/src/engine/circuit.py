"""Transmission-line resonator model, zero-point field and coupling rate"""
#외부 모듈
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.constants import hbar
from scipy.optimize import brentq

#내부 모듈
from src.engine.fieldsolve import field_at
from src.errors import InvalidInputError, NoRootError
from src.models.fieldmap import FieldMap
from src.models.resonator import DEFAULT_DIPOLE, CouplingResult, ResonatorModel, ResonatorSolution

logger = logging.getLogger(__name__)

# tan 극점 근처 거부 폭 (파장 비율)
POLE_GUARD = 1e-3
# 근 탐색 상한 = 0.999 × 극점
BRACKET_FRACTION = 0.999


# ==================== CPW ====================

def wavelength(omega: float, phase_velocity: float) -> float:
    """λ = 2π v_φ / ω"""
    return 2 * math.pi * phase_velocity / omega


def _check_pole(s_cpw: float, lam: float) -> None:
    if s_cpw < 0:
        raise InvalidInputError("CPW length s - q must be non-negative", details={"s_cpw": s_cpw})
    # 가장 가까운 λ/4 + nλ/2 극점까지 거리
    offset = (s_cpw - lam / 4) % (lam / 2)
    if min(offset, lam / 2 - offset) < POLE_GUARD * lam:
        raise InvalidInputError(
            "CPW length is at a quarter-wave pole",
            details={"s_cpw": s_cpw, "wavelength": lam}
        )


def cpw_input_impedance(z1: float, s_cpw: float, lam: float) -> float:
    """단락 CPW 의 입력 리액턴스 Z₁ tan(2π s̃/λ) [Ω]"""
    _check_pole(s_cpw, lam)
    return z1 * math.tan(2 * math.pi * s_cpw / lam)


def cpw_capacitance_correction(s_cpw: float, omega0: float, c0: float, z1: float, c_prime: float) -> float:
    """정상파 전압에 의한 CPW 유효 용량 C_CPW [F], 0 ≤ s̃ < λ/4 (기본 모드) 에서만"""
    lam = wavelength(omega0, 1.0 / (z1 * c_prime))
    if not 0 <= s_cpw < lam / 4:
        raise InvalidInputError(
            "CPW length must lie in [0, λ/4) for the fundamental mode",
            details={"s_cpw": s_cpw, "quarter_wave": lam / 4}
        )
    _check_pole(s_cpw, lam)
    if s_cpw == 0:
        return 0.0
    phase = 2 * math.pi * s_cpw / lam
    standing = s_cpw - lam / (4 * math.pi) * math.sin(2 * phase)
    return (omega0 * c0 * z1) ** 2 * c_prime * standing / (2 * math.cos(phase) ** 2)


def effective_capacitance(c_dc: float, c_prime: float, s_cpw: float, c_cpw: float) -> float:
    """C = C_dc - C′s̃ + C_CPW"""
    c0 = c_dc - c_prime * s_cpw
    if c0 <= 0:
        raise InvalidInputError(
            "dc capacitance is smaller than the straight-wire contribution",
            details={"c_dc": c_dc, "wire": c_prime * s_cpw}
        )
    return c0 + c_cpw


def total_capacitance(capacitance: float, c_s: float) -> float:
    """C_tot⁻¹ = C⁻¹ + C_s⁻¹"""
    return 1.0 / (1.0 / capacitance + 1.0 / c_s)


# ==================== 공진 조건 ====================

def resonance_residual(model: ResonatorModel, omega: float) -> float:
    """Z₁ tan(ω s̃/v) - 1/(ω C₀) + ω L₀"""
    s_cpw = model.s_cpw
    return (
        model.z1 * math.tan(omega * s_cpw / model.phase_velocity)
        - 1.0 / (omega * model.c0)
        + omega * model.l0
    )


def resonance_frequency(model: ResonatorModel) -> float:
    """공진 조건의 최저 근 ω₀ [rad/s]"""
    s_cpw = model.s_cpw
    if s_cpw == 0:
        if model.l0 <= 0:
            raise NoRootError("no resonance without CPW length or lumped inductance", details={"l0": model.l0})
        return 1.0 / math.sqrt(model.l0 * model.c0)
    pole = math.pi * model.phase_velocity / (2 * s_cpw)
    hi = BRACKET_FRACTION * pole
    lo = 1e-9 * pole
    f_lo = resonance_residual(model, lo)
    f_hi = resonance_residual(model, hi)
    if not (f_lo < 0 < f_hi):
        raise NoRootError(
            "resonance condition has no bracketed root below the quarter-wave pole",
            details={"bracket": [lo, hi], "residual": [f_lo, f_hi]}
        )
    omega0 = brentq(lambda w: resonance_residual(model, w), lo, hi, xtol=1e-6, rtol=4 * np.finfo(float).eps, maxiter=500)
    # 미분이 양수인 구간이므로 Newton 한 번으로 마무리
    step = 1e-7 * omega0
    slope = (resonance_residual(model, omega0 + step) - resonance_residual(model, omega0 - step)) / (2 * step)
    polished = omega0 - resonance_residual(model, omega0) / slope
    if lo < polished < hi and abs(resonance_residual(model, polished)) <= abs(resonance_residual(model, omega0)):
        omega0 = polished
    logger.debug("resonance at %.6g GHz for s=%.4g m", omega0 / (2 * math.pi * 1e9), model.s)
    return float(omega0)


def solve_resonator(model: ResonatorModel) -> ResonatorSolution:
    """ω₀, C_CPW, 유효 C 를 한 번에"""
    omega0 = resonance_frequency(model)
    s_cpw = model.s_cpw
    c_cpw = cpw_capacitance_correction(s_cpw, omega0, model.c0, model.z1, model.c_prime)
    c_dc = model.c0 + model.c_prime * s_cpw
    capacitance = effective_capacitance(c_dc, model.c_prime, s_cpw, c_cpw)
    return ResonatorSolution(model=model, omega0=omega0, c_cpw=c_cpw, capacitance=capacitance)


def solve_wire_length(model: ResonatorModel, target_omega: float) -> float:
    """공진 주파수가 target 이 되는 전체 선 길이 s [m]"""
    if target_omega <= 0:
        raise InvalidInputError("target frequency must be positive", details={"target_omega": target_omega})
    reactance = 1.0 / (target_omega * model.c0) - target_omega * model.l0
    if reactance < 0:
        max_omega = 1.0 / math.sqrt(model.l0 * model.c0) if model.l0 > 0 else math.inf
        raise NoRootError(
            "target frequency is above the lumped limit; no wire length reaches it",
            details={"target_omega": target_omega, "achievable_omega": [0.0, max_omega]}
        )
    # arctan < π/2 이므로 s̃ < λ₀/4
    s_cpw = model.phase_velocity / target_omega * math.atan(reactance / model.z1)
    return model.q + s_cpw


# ==================== 영점 요동 / 결합 ====================

def zero_point_voltage(omega0: float, capacitance: float) -> float:
    """V_zpf = √(ħω₀/2C)"""
    if omega0 <= 0 or capacitance <= 0:
        raise InvalidInputError("frequency and capacitance must be positive")
    return math.sqrt(hbar * omega0 / (2 * capacitance))


def zero_point_field(
    omega0: float,
    capacitance: float,
    field_map: FieldMap,
    point: tuple[float, float],
    conductor: str = "plate"
) -> tuple[float, float]:
    """(V_zpf, E_zpf) at point, 맵은 live 도체 전위로 정규화"""
    v_zpf = zero_point_voltage(omega0, capacitance)
    magnitude, _, _ = field_at(field_map, point[0], point[1])
    return v_zpf, v_zpf * magnitude / abs(field_map.potential_of(conductor))


def coupling_rate(e_zpf: float, dipole: float = DEFAULT_DIPOLE) -> float:
    """g = E_zpf d₀/ħ [rad/s]"""
    if dipole <= 0:
        raise InvalidInputError("transition dipole moment must be positive", details={"dipole": dipole})
    return e_zpf * dipole / hbar


def coupling(omega0: float, capacitance: float, field_ratio: float, dipole: float = DEFAULT_DIPOLE) -> CouplingResult:
    """|E|/V 로부터 CouplingResult"""
    v_zpf = zero_point_voltage(omega0, capacitance)
    e_zpf = v_zpf * field_ratio
    return CouplingResult(v_zpf=v_zpf, e_zpf=e_zpf, g=coupling_rate(e_zpf, dipole), dipole=dipole)


def collective_rabi(omega_single: float, rydberg_count: float) -> float:
    """Ω_N = √N Ω₀"""
    if rydberg_count < 0:
        raise InvalidInputError("atom number must be non-negative", details={"rydberg_count": rydberg_count})
    return math.sqrt(rydberg_count) * omega_single


def strong_coupling(g: float, kappa: float, gamma_rydberg: float = 0.0) -> bool:
    """2g > κ 그리고 2g > γ_Ry"""
    return 2 * g > kappa and 2 * g > gamma_rydberg


# ==================== 품질 인자 ====================

@dataclass(frozen=True)
class QualityFactors:
    q_ext: float
    q_int: float
    kappa_int: float
    kappa_ext: float


def quality_factors(omega0: float, capacitance: float, c_s: float, z0: float, resistance: float) -> QualityFactors:
    """Q_ext = ω₀Z₀C_s(C+C_s)/C, κ_int = ω₀²RC_tot, κ_ext = C_tot/(Z₀C_s²)"""
    if min(omega0, capacitance, c_s, z0) <= 0 or resistance < 0:
        raise InvalidInputError("quality factors need positive ω₀, C, C_s, Z₀ and R >= 0")
    c_tot = total_capacitance(capacitance, c_s)
    kappa_int = omega0 ** 2 * resistance * c_tot
    kappa_ext = c_tot / (z0 * c_s ** 2)
    return QualityFactors(
        q_ext=omega0 * z0 * c_s * (capacitance + c_s) / capacitance,
        q_int=omega0 / kappa_int if kappa_int > 0 else math.inf,
        kappa_int=kappa_int,
        kappa_ext=kappa_ext,
    )


def shunt_capacitance_for_q_ext(omega0: float, capacitance: float, z0: float, q_ext: float) -> float:
    """설계식 Q_ext 의 역: ω₀Z₀C_s² + ω₀Z₀C C_s - Q_ext C = 0 의 양의 근"""
    if min(omega0, capacitance, z0, q_ext) <= 0:
        raise InvalidInputError("inverse design needs positive inputs")
    a = omega0 * z0
    b = omega0 * z0 * capacitance
    c = -q_ext * capacitance
    return (-b + math.sqrt(b * b - 4 * a * c)) / (2 * a)


# ==================== 인덕턴스 ====================

def lumped_inductance(model: ResonatorModel) -> float:
    """L₀ + L′s̃, L′ = Z₁/v_φ"""
    return model.l0 + model.z1 / model.phase_velocity * model.s_cpw


def extrapolate_l0(s_values: Sequence[float], l_values: Sequence[float], q: float) -> float:
    """L(s) 선형 피팅을 s = q 로 외삽"""
    s = np.asarray(s_values, dtype=float)
    inductance = np.asarray(l_values, dtype=float)
    if s.size < 2 or s.shape != inductance.shape:
        raise InvalidInputError("extrapolation needs at least two (s, L) pairs of equal length")
    slope, intercept = np.polyfit(s, inductance, 1)
    return float(slope * q + intercept)
