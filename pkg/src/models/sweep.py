"""Sweep rows and tables"""
from dataclasses import dataclass, field
from typing import Any, Optional

from src.errors import InvalidInputError


@dataclass(frozen=True)
class SweepPoint:
    """스윕 한 지점 (평면: a, b / 플립칩: d, a=d, b 없음)"""
    a: float
    b: Optional[float]
    s: float
    capacitance: float
    inductance: float
    g: float
    eta: Optional[float] = None
    d: Optional[float] = None
    c_dc: Optional[float] = None
    field_ratio: Optional[float] = None
    omega0: Optional[float] = None
    meta: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def key(self) -> tuple[float, float]:
        return (self.d if self.d is not None else self.a, self.b if self.b is not None else 0.0)


@dataclass(frozen=True)
class SweepFailure:
    key: tuple[float, float]
    code: str
    message: str


@dataclass(frozen=True)
class SweepTable:
    kind: str
    points: tuple[SweepPoint, ...]
    fixed: dict[str, float]
    failures: tuple[SweepFailure, ...] = ()

    def __post_init__(self):
        keys = [p.key for p in self.points]
        if len(set(keys)) != len(keys):
            raise InvalidInputError("sweep table keys must be unique")

    def __len__(self) -> int:
        return len(self.points)

    @property
    def complete(self) -> bool:
        return not self.failures
