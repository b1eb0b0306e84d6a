"""Chip cross-section geometry"""
import math
from dataclasses import dataclass, replace
from typing import Optional

from src.errors import GeometryError

# 도메인 박스 최소 반폭 (10 mm 박스)
MIN_BOX_HALF_WIDTH = 5e-3
# 박스와 유한 도체 사이 최소 여유 (가장 큰 유한 도체 크기의 배수)
BOX_MARGIN_FACTOR = 5.0


@dataclass(frozen=True)
class Conductor:
    """두께 0 인 수평 도체 띠 (z 평면 위 x0..x1)"""
    name: str
    x0: float
    x1: float
    z: float
    potential: float = 0.0

    @property
    def width(self) -> float:
        return self.x1 - self.x0


@dataclass(frozen=True)
class DielectricRegion:
    x0: float
    x1: float
    z0: float
    z1: float
    eps_r: float

    def contains(self, x, z):
        return (x >= self.x0) & (x <= self.x1) & (z >= self.z0) & (z <= self.z1)


@dataclass(frozen=True)
class ChipCrossSection:
    """도체/유전체 2D 단면 + 도메인 박스

    박스는 원점 중심 [-half_width, half_width] x [-half_height, half_height].
    박스 경계까지 닿는 도체는 반무한 접지면으로 취급한다.
    """
    conductors: tuple[Conductor, ...]
    dielectrics: tuple[DielectricRegion, ...] = ()
    half_width: float = MIN_BOX_HALF_WIDTH
    half_height: float = MIN_BOX_HALF_WIDTH
    params: tuple[tuple[str, float], ...] = ()
    # 격자를 세밀하게 만들 평가 지점 (x, z)
    focus_points: tuple[tuple[float, float], ...] = ()
    kind: str = "custom"

    def __post_init__(self):
        if not self.conductors:
            raise GeometryError("cross-section needs at least one conductor")
        names = [c.name for c in self.conductors]
        if len(set(names)) != len(names):
            raise GeometryError("conductor names must be unique", details={"names": names})
        for c in self.conductors:
            if not c.x1 > c.x0:
                raise GeometryError("conductor has zero or negative width", details={"conductor": c.name})
            if c.x0 < -self.half_width or c.x1 > self.half_width or abs(c.z) >= self.half_height:
                raise GeometryError("conductor leaves the domain box", details={"conductor": c.name})
        for d in self.dielectrics:
            if d.eps_r < 1:
                raise GeometryError("relative permittivity below 1", details={"eps_r": d.eps_r})
            if not (d.x1 > d.x0 and d.z1 > d.z0):
                raise GeometryError("dielectric region is empty", details={"region": [d.x0, d.x1, d.z0, d.z1]})
        self._check_overlaps()
        self._check_margin()

    def _check_overlaps(self):
        ordered = sorted(self.conductors, key=lambda c: (c.z, c.x0))
        for left, right in zip(ordered, ordered[1:]):
            if left.z != right.z:
                continue
            # 같은 평면에서 닿거나 겹치면 간격 0
            if right.x0 <= left.x1:
                raise GeometryError(
                    "conductors overlap or touch (zero gap)",
                    details={"conductors": [left.name, right.name], "z": left.z}
                )

    def _check_margin(self):
        finite = [c for c in self.conductors if self.is_finite(c)]
        if not finite:
            return
        largest = max(c.width for c in finite)
        extent_x = max(max(abs(c.x0), abs(c.x1)) for c in finite)
        extent_z = max(abs(c.z) for c in self.conductors)
        margin = BOX_MARGIN_FACTOR * largest
        if self.half_width - extent_x < margin or self.half_height - extent_z < margin:
            raise GeometryError(
                "domain box too small for the conductor layout",
                details={
                    "half_width": self.half_width,
                    "half_height": self.half_height,
                    "required_margin": margin,
                }
            )

    def is_finite(self, conductor: Conductor) -> bool:
        return conductor.x0 > -self.half_width and conductor.x1 < self.half_width

    def conductor(self, name: str) -> Conductor:
        for c in self.conductors:
            if c.name == name:
                return c
        raise GeometryError(f"unknown conductor '{name}'", details={"known": [c.name for c in self.conductors]})

    def param(self, name: str, default: Optional[float] = None) -> Optional[float]:
        return dict(self.params).get(name, default)

    def with_potentials(self, potentials: dict[str, float]) -> "ChipCrossSection":
        """도체 전위만 바꾼 사본"""
        conductors = tuple(
            replace(c, potential=potentials.get(c.name, c.potential)) for c in self.conductors
        )
        return replace(self, conductors=conductors)

    def scaled(self, factor: float) -> "ChipCrossSection":
        """모든 길이를 factor 배 한 사본 (2D 정전 스케일 불변성 확인용)"""
        conductors = tuple(
            replace(c, x0=c.x0 * factor, x1=c.x1 * factor, z=c.z * factor) for c in self.conductors
        )
        dielectrics = tuple(
            replace(d, x0=d.x0 * factor, x1=d.x1 * factor, z0=d.z0 * factor, z1=d.z1 * factor)
            for d in self.dielectrics
        )
        return replace(
            self,
            conductors=conductors,
            dielectrics=dielectrics,
            half_width=self.half_width * factor,
            half_height=self.half_height * factor,
            params=tuple((k, v * factor) for k, v in self.params),
            focus_points=tuple((x * factor, z * factor) for x, z in self.focus_points),
        )


@dataclass(frozen=True)
class GridSpec:
    """등급 격자 해상도 설정

    h_fine 은 도체 모서리와 평가 지점에서의 간격, 거리 d 에서 간격은
    min(h_max, h_fine + (growth - 1) * d).
    도체 모서리 반경 grading_radius (기본 4 h_fine) 안에서는 간격을
    h_fine (d / radius)^(1 - 1/edge_grading) 로 더 줄인다 (1 이면 등급 없음).
    """
    h_fine: float = 1e-6
    h_max: float = 100e-6
    growth: float = 1.15
    refinement: int = 0
    edge_grading: float = 3.0
    grading_radius: Optional[float] = None

    def __post_init__(self):
        if not (self.h_fine > 0 and self.h_max >= self.h_fine):
            raise GeometryError("grid needs 0 < h_fine <= h_max", details={"h_fine": self.h_fine, "h_max": self.h_max})
        if not (self.growth > 1 and math.isfinite(self.growth)):
            raise GeometryError("grid growth factor must exceed 1", details={"growth": self.growth})
        if self.refinement < 0:
            raise GeometryError("refinement level must be non-negative", details={"refinement": self.refinement})
        if not (self.edge_grading >= 1 and math.isfinite(self.edge_grading)):
            raise GeometryError("edge grading exponent must be at least 1", details={"edge_grading": self.edge_grading})
        if self.grading_radius is not None and not self.grading_radius > 0:
            raise GeometryError("grading radius must be positive", details={"grading_radius": self.grading_radius})

    @property
    def edge_radius(self) -> float:
        return self.grading_radius if self.grading_radius is not None else 4 * self.h_fine

    def refined(self, levels: int = 1) -> "GridSpec":
        return replace(self, refinement=self.refinement + levels)
