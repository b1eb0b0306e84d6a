"""Trap Schemas"""
from typing import Literal
from pydantic import BaseModel, ConfigDict, Field

from src.engine.beam_trap import (
    center_potential,
    cloud_profile,
    oscillation_frequencies,
    trap_depth,
    trap_temperature,
)
from src.models.beam import SPECIES, AtomicSpecies, GaussianBeam


# ==================== Request Schemas ====================

class BeamParams(BaseModel):
    """트랩 빔 (기본값: 800 nm, 15 µm, 50 mW, 칩 위 80 µm)"""
    model_config = ConfigDict(extra="forbid")

    wavelength_m: float = Field(
        800e-9,
        gt=0,
        json_schema_extra={"example": 800e-9, "description": "레이저 파장 λ_dp"}
    )
    waist_m: float = Field(
        15e-6,
        gt=0,
        json_schema_extra={"example": 15e-6, "description": "빔 웨이스트 w_dp"}
    )
    power_w: float = Field(
        50e-3,
        gt=0,
        json_schema_extra={"example": 50e-3, "description": "레이저 파워 P_dp"}
    )
    focus_height_m: float = Field(
        80e-6,
        gt=0,
        json_schema_extra={"example": 80e-6, "description": "칩 표면 위 빔 축 높이 z0"}
    )

    def to_model(self) -> GaussianBeam:
        return GaussianBeam(
            wavelength=self.wavelength_m,
            waist=self.waist_m,
            power=self.power_w,
            focus_height=self.focus_height_m,
        )


class TrapRequest(BaseModel):
    """트랩 계산 요청"""
    model_config = ConfigDict(extra="forbid")

    beam: BeamParams = Field(default_factory=BeamParams)
    species: Literal["Rb87"] = "Rb87"
    temperature_k: float = Field(
        1e-6,
        gt=0,
        json_schema_extra={"example": 1e-6, "description": "원자 구름 온도"}
    )
    atom_count: float = Field(
        1e6,
        ge=0,
        json_schema_extra={"example": 1e6, "description": "원자 수"}
    )

    @property
    def species_model(self) -> AtomicSpecies:
        return SPECIES[self.species]


# ==================== Response Schemas ====================

class TrapReport(BaseModel):
    """트랩 특성 (SI 단위, 각진동수는 rad/s)"""
    wavelength_m: float
    rayleigh_length_m: float
    center_potential_j: float
    depth_j: float
    trap_temperature_k: float
    omega_r_rad_per_s: float
    omega_y_rad_per_s: float
    temperature_k: float
    atom_count: float
    sigma_r_m: float
    sigma_y_m: float
    d_rb_m: float
    l_rb_m: float

    @classmethod
    def build(cls, beam: GaussianBeam, species: AtomicSpecies, temperature: float, atom_count: float) -> "TrapReport":
        omega_r, omega_y = oscillation_frequencies(beam, species)
        cloud = cloud_profile(beam, species, temperature, atom_count)
        return cls(
            wavelength_m=beam.wavelength,
            rayleigh_length_m=beam.rayleigh_length,
            center_potential_j=center_potential(beam, species),
            depth_j=trap_depth(beam, species),
            trap_temperature_k=trap_temperature(beam, species),
            omega_r_rad_per_s=omega_r,
            omega_y_rad_per_s=omega_y,
            temperature_k=temperature,
            atom_count=atom_count,
            sigma_r_m=cloud.sigma_r,
            sigma_y_m=cloud.sigma_y,
            d_rb_m=cloud.d_rb,
            l_rb_m=cloud.l_rb,
        )
