"""Exposure Schemas"""
from typing import Literal, Optional
from pydantic import BaseModel, ConfigDict, Field

from src.engine.exposure import (
    DEFAULT_P_LIMIT,
    beam_ratio,
    critical_chip_width,
    edge_beam_radius,
    exposure_budget,
    flipchip_table,
    min_plate_distance,
)
from src.errors import NoSafeWidthError
from src.models.beam import SPECIES, AtomicSpecies, GaussianBeam
from src.schema.common import finite_or_none
from src.schema.trap import BeamParams


# ==================== Request Schemas ====================

class ExposureRequest(BaseModel):
    """노출 예산 요청 - z0 가 없으면 빔 초점 높이 사용"""
    model_config = ConfigDict(extra="forbid")

    beam: BeamParams = Field(default_factory=BeamParams)
    species: Literal["Rb87"] = "Rb87"
    chip_width_m: float = Field(
        1.6e-3,
        ge=0,
        json_schema_extra={"example": 1.6e-3, "description": "빔이 지나는 칩 폭 l_ch"}
    )
    z0_m: Optional[float] = Field(
        None,
        ge=0,
        json_schema_extra={"example": 80e-6, "description": "칩 표면에서 빔 축까지 거리"}
    )
    atom_count: float = Field(1e6, ge=0, json_schema_extra={"example": 1e6, "description": "원자 수"})
    p_limit_w: float = Field(DEFAULT_P_LIMIT, gt=0, json_schema_extra={"example": 1e-10, "description": "허용 직접 입사 파워"})
    d_values_m: list[float] = Field(
        default_factory=list,
        json_schema_extra={"example": [100e-6, 200e-6], "description": "플립칩 표 판 간격 (비우면 표 생략)"}
    )
    ratio_digits: Optional[int] = Field(1, ge=0, json_schema_extra={"description": "표의 r_e 올림 자릿수"})

    @property
    def species_model(self) -> AtomicSpecies:
        return SPECIES[self.species]


# ==================== Response Schemas ====================

class FlipChipRowOut(BaseModel):
    d_m: float
    a_m: float
    l_m: float
    l_ch_m: float
    l_ch_crit_m: Optional[float]
    p_dir_w: float


class ExposureReport(BaseModel):
    """P_dir, Γ_sc, P_sc 와 폭 한계 (무한대는 null)"""
    z0_m: float
    chip_width_m: float
    edge_radius_m: float
    p_dir_w: float
    gamma_sc_per_s: float
    p_sc_w: float
    p_limit_w: float
    acceptable: bool
    beam_ratio: float
    min_plate_distance_m: float
    l_ch_crit_m: Optional[float]
    table: list[FlipChipRowOut] = []

    @classmethod
    def build(
        cls,
        beam: GaussianBeam,
        species: AtomicSpecies,
        chip_width: float,
        z0: Optional[float] = None,
        atom_count: float = 1e6,
        p_limit: float = DEFAULT_P_LIMIT,
        d_values: Optional[list[float]] = None,
        ratio_digits: Optional[int] = 1
    ) -> "ExposureReport":
        z0 = beam.focus_height if z0 is None else z0
        budget = exposure_budget(beam, species, z0, chip_width, atom_count, p_limit)
        try:
            crit = critical_chip_width(beam, z0, p_limit, ratio_digits=ratio_digits)
        except NoSafeWidthError:
            crit = 0.0
        rows = flipchip_table(beam, d_values, p_limit, ratio_digits) if d_values else []
        return cls(
            z0_m=z0,
            chip_width_m=chip_width,
            edge_radius_m=edge_beam_radius(beam, chip_width),
            p_dir_w=budget.p_dir,
            gamma_sc_per_s=budget.gamma_sc,
            p_sc_w=budget.p_sc,
            p_limit_w=p_limit,
            acceptable=budget.acceptable,
            beam_ratio=beam_ratio(beam, p_limit),
            min_plate_distance_m=min_plate_distance(beam, p_limit),
            l_ch_crit_m=finite_or_none(crit),
            table=[
                FlipChipRowOut(
                    d_m=row.d,
                    a_m=row.a,
                    l_m=row.l,
                    l_ch_m=row.l_ch,
                    l_ch_crit_m=finite_or_none(row.l_ch_crit),
                    p_dir_w=row.p_dir,
                )
                for row in rows
            ],
        )
