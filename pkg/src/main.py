#환경 변수
from src.config import settings, setup_logging

#FastAPI
from datetime import datetime
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from src.routers import health, trap, exposure, circuit, fit
from src.errors import ToolkitError
from src.schema.common import ErrorResponse

#CORS
from fastapi.middleware.cors import CORSMiddleware

import uvicorn


PORT_NUM = settings.PORT_NUM

#API 문서 메타데이터
tags_metadata = [
    {"name": "Trap", "description": "광 쌍극자 트랩 / 원자 구름 계산"},
    {"name": "Exposure", "description": "레이저 노출 예산, 플립칩 칩 폭 표"},
    {"name": "Circuit", "description": "공진 조건, 도선 길이, 결합 세기, Q"},
    {"name": "Fit", "description": "S11 트레이스 피팅 / 합성"},
    {"name": "Health", "description": "서버 상태 확인"},
]

app = FastAPI(
    title="Cavity Design Toolkit",
    description="리드베리 원자 - 초전도 공진기 설계 계산 (읽기 전용)",
    openapi_tags=tags_metadata,
)

#계산 전용 API: 쿠키 없음, 조회 출처 제한 없음
app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=False,
    allow_methods=["GET", "POST"],
    allow_headers=["*"],
)

for module in (trap, exposure, circuit, fit, health):
    app.include_router(module.router)


def _error_response(request: Request, status: int, code: str, message: str, details=None) -> JSONResponse:
    body = ErrorResponse(
        timestamp=datetime.now(),
        path=str(request.url.path),
        status=status,
        code=code,
        message=message,
        details=details,
    )
    return JSONResponse(status_code=status, content=body.model_dump(mode="json"))


#전역 에러 처리
@app.exception_handler(ToolkitError)
async def toolkit_exception_handler(request: Request, exc: ToolkitError):
    """ToolkitError → ErrorResponse (입력 400, 수치 실패 422, 부분 스윕 207)"""
    return _error_response(request, exc.status_code, exc.code, exc.message, exc.details)


@app.exception_handler(RequestValidationError)
async def validation_exception_handler(request: Request, exc: RequestValidationError):
    """요청 본문 검증 실패도 같은 형식으로"""
    errors = [
        {"loc": [str(part) for part in err["loc"]], "msg": err["msg"], "type": err["type"]}
        for err in exc.errors()
    ]
    return _error_response(request, 422, "VALIDATION_ERROR", "request validation failed", {"errors": errors})


@app.get("/")
async def root():
    return {"message": "Cavity Design Toolkit is running", "docs": "/docs"}


def run(host: str = "0.0.0.0", port: int = PORT_NUM, reload: bool = False) -> None:
    setup_logging()
    uvicorn.run("src.main:app", host=host, port=port, reload=reload)


if __name__ == "__main__":
    run(reload=True)
