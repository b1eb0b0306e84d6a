"""Resonator circuit model"""
import math
from dataclasses import dataclass, replace
from typing import Optional

from scipy.constants import e as ELEMENTARY_CHARGE, physical_constants

from src.errors import InvalidInputError

BOHR_RADIUS = physical_constants["Bohr radius"][0]

# 전이 쌍극자 모멘트 d₀ = 1898 e a₀
DEFAULT_DIPOLE = 1898 * ELEMENTARY_CHARGE * BOHR_RADIUS
DEFAULT_C_PRIME = 56e-12
DEFAULT_PHASE_VELOCITY = 1.28e8
DEFAULT_L0 = 0.7e-9
DEFAULT_Q = 400e-6
DEFAULT_Z0 = 50.0
DEFAULT_TARGET_OMEGA = 2 * math.pi * 11e9


@dataclass(frozen=True)
class ResonatorModel:
    """집중 소자 + CPW 공진기

    Z₁ 은 저장하지 않고 1/(v_φ C′) 로 유도한다. s 가 None 이면 길이 미정 모델.
    """
    c0: float
    c_prime: float = DEFAULT_C_PRIME
    phase_velocity: float = DEFAULT_PHASE_VELOCITY
    l0: float = DEFAULT_L0
    s: Optional[float] = None
    q: float = DEFAULT_Q
    c_s: Optional[float] = None
    z0: float = DEFAULT_Z0

    def __post_init__(self):
        for name in ("c0", "c_prime", "phase_velocity", "z0"):
            if not getattr(self, name) > 0:
                raise InvalidInputError(f"resonator {name} must be positive", details={name: getattr(self, name)})
        if self.l0 < 0 or self.q < 0:
            raise InvalidInputError("resonator l0 and q must be non-negative", details={"l0": self.l0, "q": self.q})
        if self.c_s is not None and self.c_s <= 0:
            raise InvalidInputError("shunt capacitance must be positive", details={"c_s": self.c_s})
        if self.s is not None and self.s < self.q:
            raise InvalidInputError(
                "wire length s must not be shorter than the non-CPW part q",
                details={"s": self.s, "q": self.q}
            )

    @property
    def z1(self) -> float:
        return 1.0 / (self.phase_velocity * self.c_prime)

    @property
    def s_cpw(self) -> float:
        """s̃ = s - q"""
        if self.s is None:
            raise InvalidInputError("wire length s is not set")
        return self.s - self.q

    def with_wire_length(self, s: float) -> "ResonatorModel":
        return replace(self, s=s)


@dataclass(frozen=True)
class ResonatorSolution:
    """공진 해: ω₀, 유효 C, L = 1/(ω₀² C)"""
    model: ResonatorModel
    omega0: float
    c_cpw: float
    capacitance: float

    @property
    def inductance(self) -> float:
        return 1.0 / (self.omega0 ** 2 * self.capacitance)

    @property
    def wavelength(self) -> float:
        return 2 * math.pi * self.model.phase_velocity / self.omega0


@dataclass(frozen=True)
class CouplingResult:
    v_zpf: float
    e_zpf: float
    g: float
    dipole: float = DEFAULT_DIPOLE

    @property
    def vacuum_rabi(self) -> float:
        return 2 * self.g
