#외부 모듈
from fastapi import APIRouter

#내부 모듈
from src.schema.common import APIResponse, ErrorResponse
from src.schema.trap import TrapReport, TrapRequest


router = APIRouter(prefix="/api/trap", tags=["Trap"])

# ==================== 광 쌍극자 트랩 ====================

@router.post(
    "",
    summary="트랩 깊이 / 진동수 / 원자 구름 크기",
    response_model=APIResponse[TrapReport],
    responses={
        400: {"model": ErrorResponse, "description": "물리적으로 유효하지 않은 입력 (공명 빔, 트랩보다 뜨거운 구름)"},
        422: {"model": ErrorResponse, "description": "입력값 검증 실패"},
    }
)
def compute_trap(request: TrapRequest):
    """
    빔과 원자 종으로부터 트랩 특성을 계산합니다.
    - 조화 근사 진동수 ω_r, ω_y
    - 열평형 구름 크기 d_Rb, l_Rb (6σ)
    """
    report = TrapReport.build(request.beam.to_model(), request.species_model, request.temperature_k, request.atom_count)
    return APIResponse(is_success=True, message="트랩 계산 완료", payload=report)
