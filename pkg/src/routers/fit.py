#외부 모듈
from fastapi import APIRouter

#내부 모듈
from src.engine.resfit import fit
from src.schema.common import APIResponse, ErrorResponse
from src.schema.fit import FitReport, FitRequest, SynthRequest, TraceSamples, synth_from_section


router = APIRouter(prefix="/api", tags=["Fit"])

# ==================== S11 피팅 ====================

@router.post(
    "/fit",
    summary="S11 트레이스 피팅",
    response_model=APIResponse[FitReport],
    responses={
        400: {"model": ErrorResponse, "description": "잘못된 트레이스 (비단조 주파수, 샘플 부족)"},
        422: {"model": ErrorResponse, "description": "피팅 실패 (단계별 진단 포함)"},
    }
)
def fit_trace(request: FitRequest):
    """
    배경 제거 → 공진 피팅 → 전체 재피팅 3 단계로 κ_int, κ_ext, θ 를 추정합니다.
    """
    result = fit(request.to_trace(), request.to_options())
    return APIResponse(is_success=True, message="피팅 완료", payload=FitReport.build(result))


@router.post(
    "/synth",
    summary="합성 S11 트레이스",
    response_model=APIResponse[TraceSamples],
    responses={
        400: {"model": ErrorResponse, "description": "잘못된 파라미터"},
    }
)
def synth(request: SynthRequest):
    """
    모델 응답에 복소 가우시안 잡음을 더한 트레이스를 만듭니다.
    - 같은 seed 는 같은 트레이스
    """
    trace = synth_from_section(request, request.seed)
    return APIResponse(is_success=True, message="합성 완료", payload=TraceSamples.from_trace(trace))
