"""Solved per-volt field map"""
from dataclasses import dataclass
from typing import Optional

import numpy as np


def _freeze(array) -> np.ndarray:
    array = np.asarray(array, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class FieldMap:
    """격자 위 전위/전기장 해

    phi, ex, ez 의 shape 는 (len(x), len(z)).
    face_x[i, j] 는 노드 (i, j)-(i+1, j) 사이 면 계수, face_z[i, j] 는 (i, j)-(i, j+1).
    면 계수는 ε_r 가 곱해진 무차원 값 (ε₀ 미포함).
    eps 는 셀 중심 ε_r, shape (len(x)-1, len(z)-1). CSV 에서 읽은 맵에는 없다.
    """
    x: np.ndarray
    z: np.ndarray
    phi: np.ndarray
    ex: np.ndarray
    ez: np.ndarray
    face_x: np.ndarray
    face_z: np.ndarray
    conductor_index: np.ndarray
    conductor_names: tuple[str, ...]
    potentials: tuple[float, ...]
    residual: float
    residual_history: tuple[float, ...]
    geometry_hash: str
    method: str = "direct"
    eps: Optional[np.ndarray] = None

    def __post_init__(self):
        for name in ("x", "z", "phi", "ex", "ez", "face_x", "face_z"):
            object.__setattr__(self, name, _freeze(getattr(self, name)))
        index = np.asarray(self.conductor_index, dtype=np.int64)
        index.setflags(write=False)
        object.__setattr__(self, "conductor_index", index)
        if self.eps is not None:
            object.__setattr__(self, "eps", _freeze(self.eps))

    @property
    def shape(self) -> tuple[int, int]:
        return self.phi.shape

    @property
    def min_spacing(self) -> float:
        return float(min(np.diff(self.x).min(), np.diff(self.z).min()))

    @property
    def max_spacing(self) -> float:
        return float(max(np.diff(self.x).max(), np.diff(self.z).max()))

    def potential_of(self, name: str) -> float:
        return self.potentials[self.conductor_names.index(name)]

    def extent(self) -> tuple[float, float, float, float]:
        return float(self.x[0]), float(self.x[-1]), float(self.z[0]), float(self.z[-1])
