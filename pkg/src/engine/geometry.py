"""Cross-section builders for the planar and flip-chip capacitor layouts"""
#외부 모듈
import math
from typing import Optional

#내부 모듈
from src.errors import GeometryError
from src.models.chip import (
    BOX_MARGIN_FACTOR,
    MIN_BOX_HALF_WIDTH,
    ChipCrossSection,
    Conductor,
    DielectricRegion,
)

SAPPHIRE_EPS_R = 10.0
SUBSTRATE_THICKNESS = 330e-6
# 플립칩 판 길이 하한
FLIPCHIP_L_MIN = 250e-6
# 45° 테이퍼 칩 + 100 µm 여백
FLIPCHIP_CHIP_PADDING = 250e-6
# 박스 여유 판정용 여분
_BOX_SLACK = 1.01


def _box_half_width(extent: float, largest: float, minimum: float) -> float:
    return max(minimum, (extent + BOX_MARGIN_FACTOR * largest) * _BOX_SLACK)


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not value > 0:
            raise GeometryError(f"geometry parameter {name} must be positive", details={name: value})


def flipchip_dimensions(d: float) -> tuple[float, float, float]:
    """판 간격 d 에 대한 (a, l, l_ch): a = d, l = max(2d, 250 µm), l_ch = l + a + 250 µm"""
    _require_positive(d=d)
    a = d
    l = max(2 * d, FLIPCHIP_L_MIN)
    return a, l, l + a + FLIPCHIP_CHIP_PADDING


# ==================== 평면 (2D) 설계 ====================

def planar_cross_section(
    a: float,
    b: float,
    substrate_thickness: Optional[float] = SUBSTRATE_THICKNESS,
    eps_r: float = SAPPHIRE_EPS_R,
    back_gap: Optional[float] = None,
    focus_height: float = 80e-6,
    min_box: float = MIN_BOX_HALF_WIDTH,
) -> ChipCrossSection:
    """접지면 (x < -b/2) 과 폭 a 인 커패시터 판 (b/2 .. b/2 + a)

    substrate_thickness 가 None 이면 기판을 반무한으로 둔다.
    back_gap 을 주면 판 뒤쪽에도 간격 back_gap 으로 접지면을 둔다.
    """
    _require_positive(a=a, b=b, focus_height=focus_height)
    plate_end = b / 2 + a
    half = _box_half_width(max(plate_end, focus_height), a, min_box)
    if substrate_thickness is not None:
        _require_positive(substrate_thickness=substrate_thickness)
        if substrate_thickness >= half:
            half = _box_half_width(substrate_thickness, a, half)
    conductors = [
        Conductor("ground", -half, -b / 2, 0.0, 0.0),
        Conductor("plate", b / 2, plate_end, 0.0, 1.0),
    ]
    if back_gap is not None:
        _require_positive(back_gap=back_gap)
        conductors.append(Conductor("ground_back", plate_end + back_gap, half, 0.0, 0.0))
    bottom = -half if substrate_thickness is None else -substrate_thickness
    dielectrics = (DielectricRegion(-half, half, bottom, 0.0, eps_r),) if eps_r != 1 else ()
    return ChipCrossSection(
        conductors=tuple(conductors),
        dielectrics=dielectrics,
        half_width=half,
        half_height=half,
        params=(("a", a), ("b", b), ("substrate_thickness", substrate_thickness or math.inf)),
        focus_points=((0.0, focus_height),),
        kind="planar",
    )


# ==================== 플립칩 (3D) 설계 ====================

def flipchip_cross_section(
    d: float,
    a: float,
    substrate_thickness: Optional[float] = SUBSTRATE_THICKNESS,
    eps_r: float = SAPPHIRE_EPS_R,
    min_box: float = MIN_BOX_HALF_WIDTH,
) -> ChipCrossSection:
    """간격 d 로 마주 보는 폭 a 인 두 판, 판 바깥쪽에 기판

    아래 판 (z = -d/2) 이 1 V, 위 판 (z = +d/2) 이 접지. 판 길이 방향 단면도
    같은 함수로 만든다 (a 자리에 l).
    """
    _require_positive(d=d, a=a)
    thickness = substrate_thickness or 0.0
    half = _box_half_width(max(a / 2, d / 2 + thickness), a, min_box)
    conductors = (
        Conductor("plate", -a / 2, a / 2, -d / 2, 1.0),
        Conductor("counter", -a / 2, a / 2, d / 2, 0.0),
    )
    dielectrics = ()
    if eps_r != 1:
        if substrate_thickness is None:
            dielectrics = (
                DielectricRegion(-half, half, -half, -d / 2, eps_r),
                DielectricRegion(-half, half, d / 2, half, eps_r),
            )
        else:
            _require_positive(substrate_thickness=substrate_thickness)
            dielectrics = (
                DielectricRegion(-half, half, -d / 2 - thickness, -d / 2, eps_r),
                DielectricRegion(-half, half, d / 2, d / 2 + thickness, eps_r),
            )
    return ChipCrossSection(
        conductors=conductors,
        dielectrics=dielectrics,
        half_width=half,
        half_height=half,
        params=(("a", a), ("d", d), ("substrate_thickness", substrate_thickness or math.inf)),
        focus_points=((0.0, 0.0),),
        kind="flipchip",
    )


# ==================== 검증용 형상 ====================

def coplanar_cross_section(
    w: float,
    g: float,
    eps_r: float = SAPPHIRE_EPS_R,
    min_box: float = MIN_BOX_HALF_WIDTH,
) -> ChipCrossSection:
    """반무한 기판 위 폭 w 중심 도체 + 간격 g 의 양쪽 접지 (CPW)"""
    _require_positive(w=w, g=g)
    half = _box_half_width(w / 2, w, min_box)
    conductors = (
        Conductor("ground_left", -half, -w / 2 - g, 0.0, 0.0),
        Conductor("strip", -w / 2, w / 2, 0.0, 1.0),
        Conductor("ground_right", w / 2 + g, half, 0.0, 0.0),
    )
    dielectrics = (DielectricRegion(-half, half, -half, 0.0, eps_r),) if eps_r != 1 else ()
    return ChipCrossSection(
        conductors=conductors,
        dielectrics=dielectrics,
        half_width=half,
        half_height=half,
        params=(("w", w), ("g", g)),
        kind="coplanar",
    )


def parallel_plate_cross_section(w: float, d: float, min_box: float = MIN_BOX_HALF_WIDTH) -> ChipCrossSection:
    """진공 평행판 (위 1 V, 아래 접지)"""
    _require_positive(w=w, d=d)
    half = _box_half_width(max(w / 2, d / 2), w, min_box)
    conductors = (
        Conductor("bottom", -w / 2, w / 2, -d / 2, 0.0),
        Conductor("top", -w / 2, w / 2, d / 2, 1.0),
    )
    return ChipCrossSection(
        conductors=conductors,
        half_width=half,
        half_height=half,
        params=(("w", w), ("d", d)),
        focus_points=((0.0, 0.0),),
        kind="parallel_plate",
    )
