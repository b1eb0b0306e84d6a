"""S11 traces and fit results"""
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from src.errors import InvalidInputError

MIN_SAMPLES = 32

# 피팅 파라미터 순서 (보고서 / CSV 공통)
PARAM_NAMES = ("omega0", "kappa_int", "kappa_ext", "theta", "a0", "a1", "a2", "phi0", "phi1")


@dataclass(frozen=True, eq=False)
class S11Trace:
    """복소 반사 계수 vs 각주파수"""
    omega: np.ndarray
    s11: np.ndarray
    noise_sigma: Optional[float] = None

    def __post_init__(self):
        omega = np.asarray(self.omega, dtype=float)
        s11 = np.asarray(self.s11, dtype=complex)
        if omega.ndim != 1 or omega.shape != s11.shape:
            raise InvalidInputError("trace frequency and response must be 1D arrays of equal length")
        if omega.size < MIN_SAMPLES:
            raise InvalidInputError(
                f"trace needs at least {MIN_SAMPLES} samples",
                details={"samples": int(omega.size)}
            )
        if not (np.all(np.isfinite(omega)) and np.all(np.isfinite(s11))):
            raise InvalidInputError("trace contains non-finite values")
        if np.any(np.diff(omega) <= 0):
            raise InvalidInputError("trace frequency axis must be strictly increasing")
        omega.setflags(write=False)
        s11.setflags(write=False)
        object.__setattr__(self, "omega", omega)
        object.__setattr__(self, "s11", s11)

    def __len__(self) -> int:
        return self.omega.size

    @property
    def span(self) -> tuple[float, float]:
        return float(self.omega[0]), float(self.omega[-1])


@dataclass(frozen=True)
class FitResult:
    """S11 피팅 결과

    배경 다항식과 위상 기울기는 (ω - omega_ref) 기준.
    """
    omega0: float
    kappa_int: float
    kappa_ext: float
    theta: float
    a0: float
    a1: float
    a2: float
    phi0: float
    phi1: float
    omega_ref: float
    stderr: dict[str, float]
    residual_norm: float
    stages: dict[str, Any] = field(default_factory=dict)

    @property
    def kappa(self) -> float:
        return self.kappa_int + self.kappa_ext

    def params(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in PARAM_NAMES}

    def to_dict(self) -> dict[str, Any]:
        return {
            **self.params(),
            "omega_ref": self.omega_ref,
            "stderr": dict(self.stderr),
            "residual_norm": self.residual_norm,
            "stages": dict(self.stages),
        }
