"""Laser exposure budget"""
from dataclasses import dataclass


@dataclass(frozen=True)
class ExposureBudget:
    p_dir: float
    gamma_sc: float
    p_sc: float
    p_limit: float

    @property
    def acceptable(self) -> bool:
        return self.p_dir <= self.p_limit
