"""Optical dipole trap: potential, depth, harmonic frequencies, cloud profile"""
#외부 모듈
import logging
import math

import numpy as np
from scipy.constants import Boltzmann, c as SPEED_OF_LIGHT

#내부 모듈
from src.errors import InvalidInputError
from src.models.beam import AtomicSpecies, GaussianBeam
from src.models.cloud import AtomCloud

logger = logging.getLogger(__name__)

# 조화 근사 경고 기준: k_B T > depth / 10
HARMONIC_WARN_FRACTION = 0.1
# 공명 판정 (상대 이조)
RESONANCE_TOLERANCE = 1e-9


# ==================== 빔 기하 ====================

def laser_frequency(beam: GaussianBeam) -> float:
    """ω_dp = 2πc/λ"""
    return 2 * math.pi * SPEED_OF_LIGHT / beam.wavelength


def rayleigh_length(beam: GaussianBeam) -> float:
    return beam.rayleigh_length


def beam_radius(beam: GaussianBeam, y):
    """y 위치에서의 1/e² 반경 w(y)"""
    y = np.asarray(y, dtype=float)
    return beam.waist * np.sqrt(1.0 + (y / beam.rayleigh_length) ** 2)


def intensity(beam: GaussianBeam, r, y):
    """가우시안 빔 세기 I(r, y) [W/m²]"""
    w = beam_radius(beam, y)
    r = np.asarray(r, dtype=float)
    return 2 * beam.power / (math.pi * w ** 2) * np.exp(-2 * r ** 2 / w ** 2)


def peak_intensity(beam: GaussianBeam) -> float:
    return 2 * beam.power / (math.pi * beam.waist ** 2)


# ==================== 쌍극자 퍼텐셜 ====================

def _detuning_terms(beam: GaussianBeam, species: AtomicSpecies) -> tuple[float, float, float]:
    """D1/D2 항 Γᵢ(1/(ωᵢ-ω) + 1/(ωᵢ+ω)) 와 레이저 주파수"""
    omega = laser_frequency(beam)
    for label, omega_i in (("D1", species.omega_d1), ("D2", species.omega_d2)):
        if abs(omega_i - omega) <= RESONANCE_TOLERANCE * omega_i:
            raise InvalidInputError(
                f"trap laser is resonant with the {label} line",
                details={"wavelength": beam.wavelength, "line": label}
            )
    d1 = species.gamma_d1 * (1 / (species.omega_d1 - omega) + 1 / (species.omega_d1 + omega))
    d2 = species.gamma_d2 * (1 / (species.omega_d2 - omega) + 1 / (species.omega_d2 + omega))
    return d1, d2, omega


def potential_coefficient(beam: GaussianBeam, species: AtomicSpecies) -> float:
    """U = -K·I 의 K [J/(W/m²)], 적색 이조에서 양수"""
    d1, d2, _ = _detuning_terms(beam, species)
    c2 = SPEED_OF_LIGHT ** 2
    return math.pi * c2 / (2 * species.omega_d1 ** 3) * d1 + math.pi * c2 / species.omega_d2 ** 3 * d2


def trap_potential(beam: GaussianBeam, species: AtomicSpecies, x, y, z):
    """칩 좌표 (x, y, z) 에서의 U_dp [J]; 빔 축은 z = focus_height"""
    coefficient = potential_coefficient(beam, species)
    z_rel = np.asarray(z, dtype=float) - beam.focus_height
    r = np.hypot(np.asarray(x, dtype=float), z_rel)
    return -coefficient * intensity(beam, r, y)


def center_potential(beam: GaussianBeam, species: AtomicSpecies) -> float:
    return float(-potential_coefficient(beam, species) * peak_intensity(beam))


def trap_depth(beam: GaussianBeam, species: AtomicSpecies) -> float:
    """|U₀| [J]"""
    return abs(center_potential(beam, species))


def trap_temperature(beam: GaussianBeam, species: AtomicSpecies) -> float:
    """T_dp = |U₀|/k_B [K]"""
    return trap_depth(beam, species) / Boltzmann


def oscillation_frequencies(beam: GaussianBeam, species: AtomicSpecies) -> tuple[float, float]:
    """조화 근사 각진동수 (ω_r, ω_y)"""
    u0 = center_potential(beam, species)
    if u0 >= 0:
        raise InvalidInputError(
            "beam does not form a trap (blue detuned or zero depth)",
            details={"center_potential": u0}
        )
    depth = -u0
    omega_r = math.sqrt(4 * depth / (species.mass * beam.waist ** 2))
    omega_y = math.sqrt(2 * depth / (species.mass * beam.rayleigh_length ** 2))
    return omega_r, omega_y


def cloud_profile(
    beam: GaussianBeam,
    species: AtomicSpecies,
    temperature: float,
    atom_count: float = 1e6
) -> AtomCloud:
    """열평형 원자 구름 σ_q² = k_B T / (m ω_q²)"""
    if temperature <= 0:
        raise InvalidInputError("cloud temperature must be positive", details={"temperature": temperature})
    if atom_count < 0:
        raise InvalidInputError("atom count must be non-negative", details={"atom_count": atom_count})
    depth = trap_depth(beam, species)
    thermal = Boltzmann * temperature
    if thermal > depth:
        raise InvalidInputError(
            "cloud temperature exceeds the trap depth; harmonic approximation invalid",
            details={"temperature": temperature, "trap_temperature": depth / Boltzmann}
        )
    if thermal > HARMONIC_WARN_FRACTION * depth:
        logger.warning(
            "cloud temperature %.3g K is above a tenth of the trap depth (%.3g K); "
            "anharmonic corrections are not negligible",
            temperature, depth / Boltzmann
        )
    omega_r, omega_y = oscillation_frequencies(beam, species)
    sigma_r = math.sqrt(thermal / (species.mass * omega_r ** 2))
    sigma_y = math.sqrt(thermal / (species.mass * omega_y ** 2))
    return AtomCloud(sigma_r=sigma_r, sigma_y=sigma_y, temperature=temperature, atom_count=atom_count)


def potential_profile(
    beam: GaussianBeam,
    species: AtomicSpecies,
    axis: str,
    span: float,
    n: int = 201
) -> tuple[np.ndarray, np.ndarray]:
    """트랩 중심을 지나는 1D 단면 (중심 기준 오프셋, U [J])"""
    if axis not in ("x", "y", "z"):
        raise InvalidInputError("profile axis must be x, y or z", details={"axis": axis})
    if span <= 0 or n < 2:
        raise InvalidInputError("profile needs span > 0 and n >= 2", details={"span": span, "n": n})
    offsets = np.linspace(-span, span, n)
    zeros = np.zeros_like(offsets)
    x = offsets if axis == "x" else zeros
    y = offsets if axis == "y" else zeros
    z = beam.focus_height + (offsets if axis == "z" else zeros)
    return offsets, trap_potential(beam, species, x, y, z)
