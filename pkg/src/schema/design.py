"""Field / Sweep report schemas (CLI --json)"""
import math
from typing import Optional
from pydantic import BaseModel

from src.engine.fieldsolve import (
    CAPACITANCE_AGREEMENT,
    capacitance_per_length,
    charge_capacitance_per_length,
    field_ratio,
    homogeneity_eta,
    solve_cached,
)
from src.engine.geometry import flipchip_dimensions, planar_cross_section
from src.engine.optimize import DesignConstants, find_optimum, flipchip_capacitance, strong_coupling_threshold
from src.models.fieldmap import FieldMap
from src.models.sweep import SweepPoint, SweepTable
from src.schema.common import finite_or_none


# ==================== 단면 해 ====================

class FieldReport(BaseModel):
    """단면 해 요약: 구름 중심 |E|/V, 단위 길이 용량, η"""
    kind: str
    geometry_hash: str
    nx: int
    nz: int
    method: str
    residual: float
    capacitance_per_length_f_per_m: float
    charge_capacitance_per_length_f_per_m: float
    capacitance_mismatch: float
    under_resolved: bool
    capacitance_f: float
    field_ratio_per_m: float
    eta: Optional[float] = None

    @classmethod
    def planar(cls, a: float, b: float, constants: DesignConstants) -> tuple["FieldReport", FieldMap]:
        geometry = planar_cross_section(
            a, b,
            substrate_thickness=constants.substrate_thickness,
            eps_r=constants.eps_r,
            back_gap=constants.back_gap,
            focus_height=constants.cloud_height,
        )
        field_map = solve_cached(geometry, constants.grid, constants.tol, constants.method)
        c_per_length = capacitance_per_length(field_map, "plate", check=False)
        eta = None
        if constants.cloud is not None:
            eta = homogeneity_eta(field_map, constants.cloud, (0.0, constants.cloud_height))
        report = cls._summary("planar", field_map, c_per_length, c_per_length * constants.plate_length, (0.0, constants.cloud_height), eta)
        return report, field_map

    @classmethod
    def flipchip(cls, d: float, constants: DesignConstants) -> tuple["FieldReport", FieldMap]:
        a, l, _ = flipchip_dimensions(d)
        c3d, transverse, longitudinal = flipchip_capacitance(d, a, l, constants)
        eta = None
        if constants.cloud is not None:
            eta = homogeneity_eta(transverse, constants.cloud, (0.0, 0.0), longitudinal=longitudinal)
        c_per_length = capacitance_per_length(transverse, "plate", check=False)
        return cls._summary("flipchip", transverse, c_per_length, c3d, (0.0, 0.0), eta), transverse

    @classmethod
    def _summary(cls, kind: str, field_map: FieldMap, c_per_length: float, capacitance: float, center, eta) -> "FieldReport":
        nx, nz = field_map.shape
        charge = charge_capacitance_per_length(field_map, "plate")
        mismatch = abs(c_per_length - charge) / c_per_length
        return cls(
            kind=kind,
            geometry_hash=field_map.geometry_hash,
            nx=nx,
            nz=nz,
            method=field_map.method,
            residual=field_map.residual,
            capacitance_per_length_f_per_m=c_per_length,
            charge_capacitance_per_length_f_per_m=charge,
            capacitance_mismatch=mismatch,
            under_resolved=mismatch > CAPACITANCE_AGREEMENT,
            capacitance_f=capacitance,
            field_ratio_per_m=field_ratio(field_map, center[0], center[1]),
            eta=eta,
        )


# ==================== 스윕 ====================

class SweepRow(BaseModel):
    a_m: float
    b_m: Optional[float]
    d_m: Optional[float]
    s_m: float
    capacitance_f: float
    inductance_h: float
    g_rad_per_s: float
    eta: Optional[float]

    @classmethod
    def of(cls, point: SweepPoint) -> "SweepRow":
        return cls(
            a_m=point.a,
            b_m=point.b,
            d_m=point.d,
            s_m=point.s,
            capacitance_f=point.capacitance,
            inductance_h=point.inductance,
            g_rad_per_s=point.g,
            eta=finite_or_none(point.eta),
        )


class SweepFailureOut(BaseModel):
    key: list[float]
    code: str
    message: str


class SweepReport(BaseModel):
    """최적 행, 실패 목록, (플립칩) 강결합 경계"""
    kind: str
    points: int
    optimum: Optional[SweepRow]
    failures: list[SweepFailureOut]
    strong_coupling_d_max_m: Optional[float] = None
    quality_factor: Optional[float] = None
    csv: Optional[str] = None

    @classmethod
    def build(cls, table: SweepTable, quality_factor: Optional[float] = None, csv: Optional[str] = None) -> "SweepReport":
        threshold = None
        if table.kind == "flipchip" and quality_factor is not None and table.points:
            threshold = strong_coupling_threshold(table, quality_factor)
        return cls(
            kind=table.kind,
            points=len(table),
            optimum=SweepRow.of(find_optimum(table)) if table.points else None,
            failures=[SweepFailureOut(key=list(f.key), code=f.code, message=f.message) for f in table.failures],
            strong_coupling_d_max_m=threshold,
            quality_factor=quality_factor if table.kind == "flipchip" else None,
            csv=csv,
        )

    def optimum_line(self) -> str:
        if self.optimum is None:
            return "no successful sweep points"
        row = self.optimum
        g_khz = row.g_rad_per_s / (2 * math.pi) / 1e3
        if self.kind == "flipchip":
            return f"optimum d = {row.d_m * 1e6:.1f} um, s = {row.s_m * 1e3:.4f} mm, g = 2pi x {g_khz:.1f} kHz"
        return (
            f"optimum a = {row.a_m * 1e6:.1f} um, b = {row.b_m * 1e6:.1f} um, "
            f"s = {row.s_m * 1e3:.4f} mm, g = 2pi x {g_khz:.1f} kHz"
        )
