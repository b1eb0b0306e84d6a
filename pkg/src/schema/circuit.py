"""Circuit Schemas"""
import math
from typing import Optional
from pydantic import BaseModel, ConfigDict, Field

from src.engine.circuit import coupling, lumped_inductance, quality_factors, solve_resonator, solve_wire_length
from src.models.resonator import (
    DEFAULT_C_PRIME,
    DEFAULT_DIPOLE,
    DEFAULT_L0,
    DEFAULT_PHASE_VELOCITY,
    DEFAULT_Q,
    DEFAULT_Z0,
    ResonatorModel,
)
from src.schema.common import finite_or_none


# ==================== Request Schemas ====================

class ResonatorParams(BaseModel):
    """공진기 회로 상수 (Z₁ 은 1/(v_φ C′) 로 유도)"""
    model_config = ConfigDict(extra="forbid")

    c0_f: float = Field(
        ...,
        gt=0,
        json_schema_extra={"example": 140e-15, "description": "판 + 직선 도선 용량 C₀"}
    )
    c_prime_f_per_m: float = Field(DEFAULT_C_PRIME, gt=0, json_schema_extra={"description": "CPW 단위 길이 용량 C′"})
    phase_velocity_m_per_s: float = Field(DEFAULT_PHASE_VELOCITY, gt=0, json_schema_extra={"description": "CPW 위상 속도 v_φ"})
    l0_h: float = Field(DEFAULT_L0, ge=0, json_schema_extra={"description": "집중 인덕턴스 L₀"})
    q_m: float = Field(DEFAULT_Q, ge=0, json_schema_extra={"description": "CPW 가 아닌 도선 길이 q"})
    z0_ohm: float = Field(DEFAULT_Z0, gt=0, json_schema_extra={"description": "급전선 임피던스 Z₀"})
    c_s_f: Optional[float] = Field(
        None,
        gt=0,
        json_schema_extra={"example": 20e-15, "description": "shunt 커패시터 (있으면 Q 계산)"}
    )
    resistance_ohm: float = Field(0.0, ge=0, json_schema_extra={"description": "직렬 손실 저항 R"})
    field_ratio_per_m: Optional[float] = Field(
        None,
        gt=0,
        json_schema_extra={"example": 3700.0, "description": "원자 위치 |E|/V (있으면 g 계산)"}
    )
    dipole_c_m: float = Field(DEFAULT_DIPOLE, gt=0, json_schema_extra={"description": "전이 쌍극자 d₀"})

    def to_model(self, s: Optional[float] = None) -> ResonatorModel:
        return ResonatorModel(
            c0=self.c0_f,
            c_prime=self.c_prime_f_per_m,
            phase_velocity=self.phase_velocity_m_per_s,
            l0=self.l0_h,
            s=s,
            q=self.q_m,
            c_s=self.c_s_f,
            z0=self.z0_ohm,
        )


class ResonanceRequest(ResonatorParams):
    """공진 주파수 요청"""
    s_m: float = Field(
        ...,
        ge=0,
        json_schema_extra={"example": 1.1e-3, "description": "전체 도선 길이 s (>= q)"}
    )


class WireLengthRequest(ResonatorParams):
    """목표 주파수 → 도선 길이"""
    target_freq_hz: float = Field(
        11e9,
        gt=0,
        json_schema_extra={"example": 11e9, "description": "목표 공진 주파수"}
    )


# ==================== Response Schemas ====================

class ResonanceReport(BaseModel):
    """공진 해 + (선택) 결합 / 품질 인자"""
    s_m: float
    omega0_rad_per_s: float
    f0_hz: float
    z1_ohm: float
    wavelength_m: float
    capacitance_f: float
    c_cpw_f: float
    inductance_h: float
    lumped_inductance_h: float
    v_zpf_v: float
    e_zpf_v_per_m: Optional[float] = None
    g_rad_per_s: Optional[float] = None
    q_ext: Optional[float] = None
    q_int: Optional[float] = None
    kappa_ext_rad_per_s: Optional[float] = None
    kappa_int_rad_per_s: Optional[float] = None

    @classmethod
    def build(cls, params: ResonatorParams, s: float) -> "ResonanceReport":
        model = params.to_model(s)
        solution = solve_resonator(model)
        field_ratio = params.field_ratio_per_m or 1.0
        result = coupling(solution.omega0, solution.capacitance, field_ratio, params.dipole_c_m)
        report = {
            "s_m": s,
            "omega0_rad_per_s": solution.omega0,
            "f0_hz": solution.omega0 / (2 * math.pi),
            "z1_ohm": model.z1,
            "wavelength_m": solution.wavelength,
            "capacitance_f": solution.capacitance,
            "c_cpw_f": solution.c_cpw,
            "inductance_h": solution.inductance,
            "lumped_inductance_h": lumped_inductance(model),
            "v_zpf_v": result.v_zpf,
        }
        if params.field_ratio_per_m is not None:
            report.update(e_zpf_v_per_m=result.e_zpf, g_rad_per_s=result.g)
        if params.c_s_f is not None:
            factors = quality_factors(solution.omega0, solution.capacitance, params.c_s_f, params.z0_ohm, params.resistance_ohm)
            report.update(
                q_ext=finite_or_none(factors.q_ext),
                q_int=finite_or_none(factors.q_int),
                kappa_ext_rad_per_s=factors.kappa_ext,
                kappa_int_rad_per_s=factors.kappa_int,
            )
        return cls(**report)


class WireLengthReport(BaseModel):
    target_freq_hz: float
    s_m: float
    s_cpw_m: float
    resonance: ResonanceReport

    @classmethod
    def build(cls, params: WireLengthRequest) -> "WireLengthReport":
        model = params.to_model()
        s = solve_wire_length(model, 2 * math.pi * params.target_freq_hz)
        return cls(
            target_freq_hz=params.target_freq_hz,
            s_m=s,
            s_cpw_m=s - params.q_m,
            resonance=ResonanceReport.build(params, s),
        )
