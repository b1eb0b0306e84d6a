"""Laser exposure budget: direct tail power, scattering, critical chip width"""
#외부 모듈
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Optional

from scipy.constants import c as SPEED_OF_LIGHT, hbar
from scipy.integrate import quad
from scipy.optimize import brentq
from scipy.special import erfc

#내부 모듈
from src.engine.beam_trap import _detuning_terms, beam_radius, laser_frequency, peak_intensity
from src.engine.geometry import flipchip_dimensions
from src.errors import InvalidInputError, NoRootError, NoSafeWidthError
from src.models.beam import AtomicSpecies, GaussianBeam
from src.models.exposure import ExposureBudget

logger = logging.getLogger(__name__)

DEFAULT_P_LIMIT = 0.1e-9
RATIO_BRACKET = (0.5, 10.0)


# ==================== 직접 입사 파워 ====================

def edge_beam_radius(beam: GaussianBeam, l_ch: float) -> float:
    """칩 끝 (y = l_ch/2) 에서의 빔 반경 w_e"""
    if l_ch < 0:
        raise InvalidInputError("chip width must be non-negative", details={"l_ch": l_ch})
    return float(beam_radius(beam, l_ch / 2))


def direct_power(beam: GaussianBeam, z0: float, l_ch: float) -> float:
    """칩 표면에 닿는 가우시안 꼬리 파워 P_dir [W]"""
    if z0 < 0:
        raise InvalidInputError("beam height above the chip must be non-negative", details={"z0": z0})
    w_e = edge_beam_radius(beam, l_ch)
    return float(beam.power / 2 * erfc(math.sqrt(2) * z0 / w_e))


# ==================== 산란 ====================

def scattering_rate(beam: GaussianBeam, species: AtomicSpecies, r: float = 0.0, y: float = 0.0) -> float:
    """원자 하나의 비공명 산란율 Γ_sc [1/s], 기본값은 트랩 중심"""
    d1, d2, omega = _detuning_terms(beam, species)
    c2 = SPEED_OF_LIGHT ** 2
    term1 = math.pi * c2 / (2 * hbar * species.omega_d1 ** 3) * (omega / species.omega_d1) ** 3 * d1 ** 2
    term2 = math.pi * c2 / (hbar * species.omega_d2 ** 3) * (omega / species.omega_d2) ** 3 * d2 ** 2
    w = float(beam_radius(beam, y))
    local = peak_intensity(beam) * (beam.waist / w) ** 2 * math.exp(-2 * r ** 2 / w ** 2)
    return (term1 + term2) * local


def scattered_power(beam: GaussianBeam, species: AtomicSpecies, atom_count: float) -> float:
    """P_sc = ħ ω_dp Γ_sc N_at"""
    if atom_count < 0:
        raise InvalidInputError("atom count must be non-negative", details={"atom_count": atom_count})
    return hbar * laser_frequency(beam) * scattering_rate(beam, species) * atom_count


# ==================== 역문제 ====================

def beam_ratio(beam: GaussianBeam, p_limit: float = DEFAULT_P_LIMIT) -> float:
    """P_dir(z0 = r_e w_dp, l_ch = 0) = P_limit 를 만족하는 r_e"""
    if p_limit <= 0:
        raise InvalidInputError("power limit must be positive", details={"p_limit": p_limit})
    if p_limit >= beam.power / 2:
        return 0.0
    target = math.log(2 * p_limit / beam.power)

    def excess(ratio: float) -> float:
        return math.log(erfc(math.sqrt(2) * ratio)) - target

    lo, hi = RATIO_BRACKET
    if excess(lo) < 0:
        lo, hi = 0.0, lo
    if excess(hi) > 0:
        raise NoRootError(
            "power limit is below the resolvable Gaussian tail",
            details={"p_limit": p_limit, "max_ratio": RATIO_BRACKET[1]}
        )
    return float(brentq(excess, lo, hi, rtol=1e-12, xtol=1e-14))


def min_plate_distance(beam: GaussianBeam, p_limit: float = DEFAULT_P_LIMIT) -> float:
    """zero chip width 에서의 최소 판 간격 d = 2 r_e w_dp"""
    return 2 * beam_ratio(beam, p_limit) * beam.waist


def design_ratio(beam: GaussianBeam, p_limit: float = DEFAULT_P_LIMIT, ratio_digits: Optional[int] = 1) -> float:
    """설계용 r_e: ratio_digits 자릿수로 올림 (더 좁은 칩 폭 쪽), None 이면 정확한 값"""
    ratio = beam_ratio(beam, p_limit)
    if ratio_digits is None:
        return ratio
    scale = 10 ** ratio_digits
    return math.ceil(ratio * scale - 1e-9) / scale


def critical_chip_width(
    beam: GaussianBeam,
    z0: float,
    p_limit: float = DEFAULT_P_LIMIT,
    ratio: Optional[float] = None,
    ratio_digits: Optional[int] = 1
) -> float:
    """P_dir <= P_limit 를 만족하는 최대 칩 폭 l_ch^crit

    기본은 올림한 r_e (design_ratio) 를 쓰므로 P_dir(l_ch^crit) <= P_limit.
    ratio 를 주면 그 값을 그대로 사용한다.
    """
    r_e = design_ratio(beam, p_limit, ratio_digits) if ratio is None else ratio
    if r_e <= 0:
        return math.inf
    scaled = z0 / (r_e * beam.waist)
    if scaled <= 1:
        raise NoSafeWidthError(
            "no chip width keeps the direct power below the limit",
            details={"z0": z0, "ratio": r_e, "min_z0": r_e * beam.waist}
        )
    # w(l_ch/2) = z0 / r_e
    return 2 * beam.rayleigh_length * math.sqrt(scaled ** 2 - 1)


# ==================== 예산 / 표 ====================

def exposure_budget(
    beam: GaussianBeam,
    species: AtomicSpecies,
    z0: float,
    l_ch: float,
    atom_count: float = 1e6,
    p_limit: float = DEFAULT_P_LIMIT
) -> ExposureBudget:
    budget = ExposureBudget(
        p_dir=direct_power(beam, z0, l_ch),
        gamma_sc=scattering_rate(beam, species),
        p_sc=scattered_power(beam, species, atom_count),
        p_limit=p_limit,
    )
    if not budget.acceptable:
        logger.warning("direct power %.3g W exceeds the limit %.3g W", budget.p_dir, p_limit)
    return budget


@dataclass(frozen=True)
class FlipChipRow:
    d: float
    a: float
    l: float
    l_ch: float
    l_ch_crit: float
    p_dir: float


def flipchip_table(
    beam: GaussianBeam,
    d_values: Iterable[float],
    p_limit: float = DEFAULT_P_LIMIT,
    ratio_digits: Optional[int] = 1
) -> list[FlipChipRow]:
    """플립칩 설계 표 (d, a, l, l_ch, l_ch^crit)

    l_ch^crit 는 design_ratio(ratio_digits) 로 계산한다.
    """
    ratio = design_ratio(beam, p_limit, ratio_digits)
    rows = []
    for d in d_values:
        a, l, l_ch = flipchip_dimensions(d)
        z0 = d / 2
        try:
            crit = critical_chip_width(beam, z0, p_limit, ratio=ratio)
        except NoSafeWidthError:
            crit = 0.0
        rows.append(FlipChipRow(d=d, a=a, l=l, l_ch=l_ch, l_ch_crit=crit, p_dir=direct_power(beam, z0, l_ch)))
    return rows


def tail_power_quadrature(beam: GaussianBeam, z0: float, l_ch: float) -> float:
    """P_dir 를 가우시안 꼬리 1D 적분으로 계산 (erfc 공식 검증용)"""
    w_e = edge_beam_radius(beam, l_ch)

    def marginal(u: float) -> float:
        return math.sqrt(2 / math.pi) / w_e * math.exp(-2 * u ** 2 / w_e ** 2)

    value, _ = quad(marginal, z0, z0 + 20 * w_e, epsabs=0, epsrel=1e-13, limit=200)
    return beam.power * value
