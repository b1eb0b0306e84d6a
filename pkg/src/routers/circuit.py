#외부 모듈
from fastapi import APIRouter

#내부 모듈
from src.schema.circuit import ResonanceReport, ResonanceRequest, WireLengthReport, WireLengthRequest
from src.schema.common import APIResponse, ErrorResponse


router = APIRouter(prefix="/api/circuit", tags=["Circuit"])

# ==================== 공진 ====================

@router.post(
    "/resonance",
    summary="공진 주파수와 유효 C, L",
    response_model=APIResponse[ResonanceReport],
    responses={
        400: {"model": ErrorResponse, "description": "λ/4 극점 위의 도선 길이 등"},
        422: {"model": ErrorResponse, "description": "공진 근 없음 / 입력값 검증 실패"},
    }
)
def compute_resonance(request: ResonanceRequest):
    """
    Z₁ tan(ω s̃/v_φ) = 1/(ωC₀) - ωL₀ 의 최저 근과 유효 회로 값을 계산합니다.
    - field_ratio_per_m 이 있으면 E_zpf 와 g
    - c_s_f 가 있으면 Q_ext, Q_int
    """
    report = ResonanceReport.build(request, request.s_m)
    return APIResponse(is_success=True, message="공진 계산 완료", payload=report)


@router.post(
    "/wire-length",
    summary="목표 주파수를 주는 도선 길이",
    response_model=APIResponse[WireLengthReport],
    responses={
        422: {"model": ErrorResponse, "description": "도달 불가능한 목표 주파수"},
    }
)
def compute_wire_length(request: WireLengthRequest):
    """
    목표 공진 주파수에 맞는 전체 도선 길이 s 를 계산합니다.
    """
    report = WireLengthReport.build(request)
    return APIResponse(is_success=True, message="도선 길이 계산 완료", payload=report)
