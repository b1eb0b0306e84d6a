#외부 모듈
from fastapi import APIRouter

#내부 모듈
from src.schema.common import APIResponse, ErrorResponse
from src.schema.exposure import ExposureReport, ExposureRequest


router = APIRouter(prefix="/api/exposure", tags=["Exposure"])

# ==================== 레이저 노출 ====================

@router.post(
    "",
    summary="칩에 닿는 레이저 파워와 산란",
    response_model=APIResponse[ExposureReport],
    responses={
        400: {"model": ErrorResponse, "description": "잘못된 입력"},
        422: {"model": ErrorResponse, "description": "입력값 검증 실패 / 허용 폭 없음"},
    }
)
def compute_exposure(request: ExposureRequest):
    """
    직접 입사 파워 P_dir, 산란율 Γ_sc, 산란 파워 P_sc 와 임계 칩 폭을 계산합니다.
    - d_values_m 을 주면 플립칩 설계 표를 함께 반환
    """
    report = ExposureReport.build(
        request.beam.to_model(),
        request.species_model,
        request.chip_width_m,
        z0=request.z0_m,
        atom_count=request.atom_count,
        p_limit=request.p_limit_w,
        d_values=request.d_values_m,
        ratio_digits=request.ratio_digits,
    )
    message = "허용 범위 이내" if report.acceptable else "직접 입사 파워가 허용치를 넘습니다"
    return APIResponse(is_success=True, message=message, payload=report)
