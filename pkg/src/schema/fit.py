"""Fit Schemas"""
import math
from typing import Any, Optional
from pydantic import BaseModel, ConfigDict, Field, model_validator

from src.engine.resfit import FitOptions, quality_factors_from_fit, synth_trace
from src.models.trace import PARAM_NAMES, FitResult, S11Trace
from src.schema.common import finite_or_none
from src.schema.config import SynthSection, synth_parameters


# ==================== Request Schemas ====================

class TraceSamples(BaseModel):
    """주파수 [Hz] 와 S11 실수부 / 허수부"""
    model_config = ConfigDict(extra="forbid")

    freq_hz: list[float] = Field(..., min_length=32, json_schema_extra={"description": "측정 주파수 (증가 순)"})
    re_s11: list[float] = Field(..., min_length=32)
    im_s11: list[float] = Field(..., min_length=32)

    @model_validator(mode="after")
    def _same_length(self):
        if not len(self.freq_hz) == len(self.re_s11) == len(self.im_s11):
            raise ValueError("freq_hz, re_s11 and im_s11 must have equal length")
        return self

    def to_trace(self) -> S11Trace:
        omega = [2 * math.pi * f for f in self.freq_hz]
        s11 = [complex(re, im) for re, im in zip(self.re_s11, self.im_s11)]
        return S11Trace(omega=omega, s11=s11)

    @classmethod
    def from_trace(cls, trace: S11Trace) -> "TraceSamples":
        return cls(
            freq_hz=(trace.omega / (2 * math.pi)).tolist(),
            re_s11=trace.s11.real.tolist(),
            im_s11=trace.s11.imag.tolist(),
        )


class FitRequest(TraceSamples):
    """S11 피팅 요청"""
    window_linewidths: Optional[float] = Field(10.0, gt=0, json_schema_extra={"description": "선폭 단위 피팅 창 (null: 전체)"})
    mask_factor: float = Field(3.0, gt=0, json_schema_extra={"description": "배경 피팅 시 가리는 폭 (선폭 단위)"})

    def to_options(self) -> FitOptions:
        return FitOptions(window=self.window_linewidths, mask_factor=self.mask_factor)


class SynthRequest(SynthSection):
    """합성 트레이스 요청 (seed 고정 시 재현 가능)"""
    seed: Optional[int] = Field(None, json_schema_extra={"example": 7, "description": "잡음 난수 시드"})


# ==================== Response Schemas ====================

class FitReport(BaseModel):
    """피팅 파라미터, 표준오차, 품질 인자"""
    f0_hz: float
    omega0_rad_per_s: float
    kappa_int_rad_per_s: float
    kappa_ext_rad_per_s: float
    theta_rad: float
    omega_ref_rad_per_s: float
    background: dict[str, float]
    stderr: dict[str, Optional[float]]
    q_int: Optional[float]
    q_ext: Optional[float]
    q_tot: Optional[float]
    q_stderr: dict[str, Optional[float]]
    residual_norm: float
    stages: dict[str, Any] = {}

    @classmethod
    def build(cls, result: FitResult) -> "FitReport":
        q = quality_factors_from_fit(result)
        return cls(
            f0_hz=result.omega0 / (2 * math.pi),
            omega0_rad_per_s=result.omega0,
            kappa_int_rad_per_s=result.kappa_int,
            kappa_ext_rad_per_s=result.kappa_ext,
            theta_rad=result.theta,
            omega_ref_rad_per_s=result.omega_ref,
            background={name: getattr(result, name) for name in ("a0", "a1", "a2", "phi0", "phi1")},
            stderr={name: finite_or_none(result.stderr.get(name)) for name in PARAM_NAMES},
            q_int=finite_or_none(q["q_int"]),
            q_ext=finite_or_none(q["q_ext"]),
            q_tot=finite_or_none(q["q_tot"]),
            q_stderr={label: finite_or_none(q[f"{label}_stderr"]) for label in ("q_int", "q_ext", "q_tot")},
            residual_norm=result.residual_norm,
            stages={key: value for key, value in result.stages.items() if key != "preliminary"},
        )


def synth_from_section(section: SynthSection, seed: Optional[int] = None) -> S11Trace:
    """공진 중심 ± span/2 (선폭 단위) 합성 트레이스"""
    params = synth_parameters(section)
    kappa = params["kappa_int"] + params["kappa_ext"]
    half = section.span_linewidths * kappa / 2
    return synth_trace(
        params,
        params["omega0"] - half,
        params["omega0"] + half,
        n=section.n_points,
        sigma=section.sigma,
        seed=seed,
    )
