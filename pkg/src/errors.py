"""Toolkit exceptions"""
from typing import Any, Optional


class ToolkitError(Exception):
    """툴킷 예외 - ErrorResponse 형식 / CLI 종료 코드와 1:1 대응"""
    status_code: int = 400
    exit_code: int = 1
    code: str = "TOOLKIT_ERROR"

    def __init__(
        self,
        message: str,
        details: Optional[dict[str, Any]] = None,
        code: Optional[str] = None
    ):
        self.message = message
        self.details = details or {}
        if code is not None:
            self.code = code
        super().__init__(message)


# ==================== 입력 / 설정 오류 (exit 1) ====================

class ConfigError(ToolkitError):
    """설정 파일 오류 (키 경로 또는 줄 번호 포함)"""
    code = "CONFIG_ERROR"


class InvalidInputError(ToolkitError):
    """물리적으로 유효하지 않은 입력"""
    code = "INVALID_INPUT"


class GeometryError(InvalidInputError):
    """단면 형상 오류 (겹치는 도체, 0 간격 등)"""
    code = "INVALID_GEOMETRY"


# ==================== 수치 오류 (exit 2) ====================

class NumericalError(ToolkitError):
    """수치 계산 실패"""
    status_code = 422
    exit_code = 2
    code = "NUMERICAL_FAILURE"


class SolverConvergenceError(NumericalError):
    """Laplace 솔버 미수렴 - residual history 포함"""
    code = "SOLVER_NOT_CONVERGED"

    def __init__(self, message: str, residual_history: list[float], details: Optional[dict[str, Any]] = None):
        self.residual_history = list(residual_history)
        merged = {"residual_history": self.residual_history[-20:]}
        merged.update(details or {})
        super().__init__(message, merged)


class NoRootError(NumericalError):
    """공진 조건 / 역문제 해 없음 - 도달 가능한 범위 포함"""
    code = "NO_ROOT"


class NoSafeWidthError(NumericalError):
    """어떤 칩 폭도 P_limit 를 만족하지 못함"""
    code = "NO_SAFE_WIDTH"


class FitError(NumericalError):
    """S11 피팅 실패 - 단계별 진단 포함"""
    code = "FIT_FAILED"


# ==================== 부분 성공 (exit 3) ====================

class PartialSweepError(ToolkitError):
    """스윕 일부 지점 실패"""
    status_code = 207
    exit_code = 3
    code = "PARTIAL_SWEEP"
