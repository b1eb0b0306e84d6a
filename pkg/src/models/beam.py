"""Trap-laser and atom models"""
import math
from dataclasses import dataclass

from scipy.constants import physical_constants

from src.errors import InvalidInputError

DALTON = physical_constants["atomic mass constant"][0]


@dataclass(frozen=True)
class GaussianBeam:
    """집속 가우시안 트랩 빔 (SI 단위)"""
    wavelength: float = 800e-9
    waist: float = 15e-6
    power: float = 50e-3
    focus_height: float = 80e-6

    def __post_init__(self):
        for name in ("wavelength", "waist", "power", "focus_height"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise InvalidInputError(
                    f"beam {name} must be positive",
                    details={name: value}
                )

    @property
    def rayleigh_length(self) -> float:
        # never cached: recomputed from waist and wavelength
        return math.pi * self.waist ** 2 / self.wavelength


@dataclass(frozen=True)
class AtomicSpecies:
    """D1/D2 전이 주파수, 선폭, 질량"""
    name: str
    mass: float
    omega_d1: float
    omega_d2: float
    gamma_d1: float
    gamma_d2: float

    def __post_init__(self):
        if not (self.omega_d2 > self.omega_d1 > 0):
            raise InvalidInputError(
                "species requires omega_d2 > omega_d1 > 0",
                details={"omega_d1": self.omega_d1, "omega_d2": self.omega_d2}
            )
        if self.gamma_d1 <= 0 or self.gamma_d2 <= 0 or self.mass <= 0:
            raise InvalidInputError(
                "species linewidths and mass must be positive",
                details={"gamma_d1": self.gamma_d1, "gamma_d2": self.gamma_d2, "mass": self.mass}
            )


TWO_PI = 2 * math.pi

# ⁸⁷Rb, rounded values used throughout the design study
RB87 = AtomicSpecies(
    name="Rb87",
    mass=86.9 * DALTON,
    omega_d1=TWO_PI * 377e12,
    omega_d2=TWO_PI * 384e12,
    gamma_d1=TWO_PI * 5.75e6,
    gamma_d2=TWO_PI * 6.07e6,
)

SPECIES = {"Rb87": RB87}
