"""Thermal atom cloud"""
import math
from dataclasses import dataclass

import numpy as np

from src.errors import InvalidInputError

# 분포 크기 = 표준편차의 6배
CLOUD_SIGMAS = 6.0


@dataclass(frozen=True)
class AtomCloud:
    sigma_r: float
    sigma_y: float
    temperature: float
    atom_count: float = 1e6

    def __post_init__(self):
        if self.sigma_r <= 0 or self.sigma_y <= 0:
            raise InvalidInputError(
                "cloud widths must be positive",
                details={"sigma_r": self.sigma_r, "sigma_y": self.sigma_y}
            )

    @property
    def d_rb(self) -> float:
        return CLOUD_SIGMAS * self.sigma_r

    @property
    def l_rb(self) -> float:
        return CLOUD_SIGMAS * self.sigma_y

    def density(self, x, y, z):
        """단일 입자 밀도 ρ_sp, 좌표는 트랩 중심 기준"""
        x, y, z = np.asarray(x, float), np.asarray(y, float), np.asarray(z, float)
        norm = 1.0 / (math.sqrt(2 * math.pi) ** 3 * self.sigma_r ** 2 * self.sigma_y)
        r2 = x ** 2 + z ** 2
        return norm * np.exp(-r2 / (2 * self.sigma_r ** 2) - y ** 2 / (2 * self.sigma_y ** 2))
