"""Project config schema (TOML)"""
#외부 모듈
import math
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from pathlib import Path
from typing import Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

#내부 모듈
from src.engine.beam_trap import cloud_profile
from src.engine.optimize import DesignConstants
from src.engine.resfit import FitOptions
from src.errors import ConfigError
from src.models.beam import SPECIES, AtomicSpecies, GaussianBeam
from src.models.chip import GridSpec
from src.models.resonator import DEFAULT_DIPOLE


class _Section(BaseModel):
    """알 수 없는 키는 거부"""
    model_config = ConfigDict(extra="forbid", frozen=True)


# ==================== 빔 / 원자 ====================

class BeamSection(_Section):
    wavelength_m: float = Field(..., gt=0, json_schema_extra={"example": 800e-9, "description": "트랩 레이저 파장"})
    waist_m: float = Field(..., gt=0, json_schema_extra={"example": 15e-6, "description": "초점 1/e² 반경 w_dp"})
    power_w: float = Field(..., gt=0, json_schema_extra={"example": 50e-3, "description": "레이저 파워 P_dp"})
    focus_height_m: float = Field(..., gt=0, json_schema_extra={"example": 80e-6, "description": "칩 표면 위 빔 축 높이 z0"})

    def to_model(self) -> GaussianBeam:
        return GaussianBeam(
            wavelength=self.wavelength_m,
            waist=self.waist_m,
            power=self.power_w,
            focus_height=self.focus_height_m,
        )


class SpeciesSection(_Section):
    name: Literal["Rb87"] = Field("Rb87", json_schema_extra={"description": "내장 원자 종"})

    def to_model(self) -> AtomicSpecies:
        return SPECIES[self.name]


class CloudSection(_Section):
    temperature_k: float = Field(1e-6, gt=0, json_schema_extra={"example": 1e-6, "description": "원자 구름 온도 T_Rb"})
    atom_count: float = Field(1e6, ge=0, json_schema_extra={"example": 1e6, "description": "원자 수 N_at"})


class ExposureSection(_Section):
    p_limit_w: float = Field(0.1e-9, gt=0, json_schema_extra={"description": "직접 입사 파워 허용치"})
    chip_width_m: float = Field(1.6e-3, ge=0, json_schema_extra={"description": "레이저가 지나는 칩 폭 l_ch"})
    d_values_m: list[float] = Field(
        default_factory=lambda: [d * 1e-6 for d in range(100, 601, 50)],
        json_schema_extra={"description": "플립칩 표의 판 간격"}
    )
    ratio_digits: Optional[int] = Field(1, ge=0, json_schema_extra={"description": "표 계산 시 r_e 올림 자릿수"})


# ==================== 칩 / 회로 / 솔버 ====================

class ChipSection(_Section):
    kind: Literal["planar", "flipchip"] = "planar"
    a_m: float = Field(120e-6, gt=0, json_schema_extra={"description": "판 폭 a"})
    b_m: float = Field(40e-6, gt=0, json_schema_extra={"description": "접지까지 간격 b"})
    d_m: float = Field(200e-6, gt=0, json_schema_extra={"description": "플립칩 판 간격 d"})
    substrate_thickness_m: Optional[float] = Field(330e-6, gt=0, json_schema_extra={"description": "기판 두께 (없으면 반무한)"})
    half_space: bool = False
    eps_r: float = Field(10.0, ge=1, json_schema_extra={"description": "기판 상대 유전율 (사파이어)"})
    back_gap_m: Optional[float] = Field(None, gt=0, json_schema_extra={"description": "판 뒤쪽 접지까지 간격 (없으면 접지 없음)"})

    @property
    def substrate(self) -> Optional[float]:
        return None if self.half_space else self.substrate_thickness_m


class CircuitSection(_Section):
    c_prime_f_per_m: float = Field(56e-12, gt=0)
    phase_velocity_m_per_s: float = Field(1.28e8, gt=0)
    l0_h: float = Field(0.7e-9, ge=0)
    q_m: float = Field(400e-6, ge=0)
    c_s_f: Optional[float] = Field(None, gt=0, json_schema_extra={"description": "shunt 커패시터 (기본값 없음)"})
    z0_ohm: float = Field(50.0, gt=0)
    resistance_ohm: float = Field(0.0, ge=0)
    dipole_c_m: float = Field(DEFAULT_DIPOLE, gt=0, json_schema_extra={"description": "전이 쌍극자 d₀ (1898 e a₀)"})
    target_freq_hz: float = Field(11e9, gt=0)
    plate_length_m: float = Field(1e-3, gt=0, json_schema_extra={"description": "평면 판 길이 l"})
    quality_factor: float = Field(1e4, gt=0, json_schema_extra={"description": "강결합 판정용 Q"})

    @property
    def target_omega(self) -> float:
        return 2 * math.pi * self.target_freq_hz


class SolverSection(_Section):
    h_fine_m: float = Field(1e-6, gt=0)
    h_max_m: float = Field(100e-6, gt=0)
    growth: float = Field(1.15, gt=1)
    refinement: int = Field(0, ge=0)
    edge_grading: float = Field(3.0, ge=1, json_schema_extra={"description": "도체 모서리 등급 지수 (1 이면 등급 없음)"})
    tol: float = Field(1e-9, gt=0)
    method: Literal["direct", "sor"] = "direct"

    def to_grid(self) -> GridSpec:
        return GridSpec(
            h_fine=self.h_fine_m,
            h_max=self.h_max_m,
            growth=self.growth,
            refinement=self.refinement,
            edge_grading=self.edge_grading,
        )


class SweepSection(_Section):
    kind: Literal["planar", "flipchip"] = "planar"
    a_values_m: list[float] = Field(default_factory=lambda: [a * 1e-6 for a in range(40, 141, 20)])
    b_values_m: list[float] = Field(default_factory=lambda: [b * 1e-6 for b in range(20, 101, 10)])
    d_values_m: list[float] = Field(default_factory=lambda: [d * 1e-6 for d in range(100, 601, 50)])
    eta: bool = False
    longitudinal: bool = True

    @model_validator(mode="after")
    def _positive(self):
        for name in ("a_values_m", "b_values_m", "d_values_m"):
            values = getattr(self, name)
            if not values or any(v <= 0 for v in values):
                raise ValueError(f"{name} must be a non-empty list of positive lengths")
        return self


# ==================== 피팅 ====================

class FitSection(_Section):
    window_linewidths: Optional[float] = Field(10.0, gt=0)
    mask_factor: float = Field(3.0, gt=0)


class SynthSection(_Section):
    f0_hz: float = Field(11.708e9, gt=0)
    q_int: float = Field(5.2e3, gt=0)
    q_ext: float = Field(18.3e3, gt=0)
    theta_rad: float = 0.1
    a0: float = 0.8
    a1_per_linewidth: float = Field(0.01, json_schema_extra={"description": "선폭당 배경 진폭 기울기"})
    a2_per_linewidth2: float = -0.0012
    phi0_rad: float = 0.3
    phi1_per_linewidth: float = 0.08
    span_linewidths: float = Field(10.0, gt=0)
    n_points: int = Field(1601, ge=32)
    sigma: float = Field(0.01, ge=0)


class OutputSection(_Section):
    dir: Optional[str] = None


# ==================== 전체 ====================

class ProjectConfig(_Section):
    """[beam] 은 필수, 나머지 섹션은 기본값"""
    beam: BeamSection
    species: SpeciesSection = Field(default_factory=SpeciesSection)
    cloud: CloudSection = Field(default_factory=CloudSection)
    exposure: ExposureSection = Field(default_factory=ExposureSection)
    chip: ChipSection = Field(default_factory=ChipSection)
    circuit: CircuitSection = Field(default_factory=CircuitSection)
    solver: SolverSection = Field(default_factory=SolverSection)
    sweep: SweepSection = Field(default_factory=SweepSection)
    fit: FitSection = Field(default_factory=FitSection)
    synth: SynthSection = Field(default_factory=SynthSection)
    output: OutputSection = Field(default_factory=OutputSection)


def _key_path(location: tuple) -> str:
    return ".".join(str(part) for part in location)


def parse_config(data: dict, source: str = "<config>") -> ProjectConfig:
    try:
        return ProjectConfig.model_validate(data)
    except ValidationError as exc:
        errors = [
            {"key": _key_path(error["loc"]), "message": error["msg"]}
            for error in exc.errors()
        ]
        first = errors[0]
        raise ConfigError(
            f"{source}: invalid key '{first['key']}': {first['message']}",
            details={"errors": errors, "source": source}
        ) from exc


def load_config(path) -> ProjectConfig:
    """TOML 파일 → ProjectConfig (문법 오류는 줄 번호 포함)"""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}", details={"path": str(path)})
    try:
        with path.open("rb") as handle:
            data = tomllib.load(handle)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: TOML syntax error: {exc}", details={"path": str(path)}) from exc
    return parse_config(data, str(path))


# ==================== 엔진 객체 변환 ====================

def design_constants(config: ProjectConfig, with_cloud: Optional[bool] = None) -> DesignConstants:
    """스윕용 DesignConstants (η 요청 시 원자 구름 포함)"""
    beam = config.beam.to_model()
    cloud = None
    if config.sweep.eta if with_cloud is None else with_cloud:
        cloud = cloud_profile(beam, config.species.to_model(), config.cloud.temperature_k, config.cloud.atom_count)
    return DesignConstants(
        target_omega=config.circuit.target_omega,
        plate_length=config.circuit.plate_length_m,
        q=config.circuit.q_m,
        cloud_height=config.beam.focus_height_m,
        dipole=config.circuit.dipole_c_m,
        c_prime=config.circuit.c_prime_f_per_m,
        phase_velocity=config.circuit.phase_velocity_m_per_s,
        l0=config.circuit.l0_h,
        substrate_thickness=config.chip.substrate,
        eps_r=config.chip.eps_r,
        back_gap=config.chip.back_gap_m,
        grid=config.solver.to_grid(),
        tol=config.solver.tol,
        method=config.solver.method,
        cloud=cloud,
        longitudinal=config.sweep.longitudinal,
        beam=beam,
        p_limit=config.exposure.p_limit_w,
        ratio_digits=config.exposure.ratio_digits,
    )


def fit_options(config: ProjectConfig) -> FitOptions:
    return FitOptions(window=config.fit.window_linewidths, mask_factor=config.fit.mask_factor)


def synth_parameters(section: SynthSection) -> dict[str, float]:
    """선폭 단위 배경 계수를 물리 단위로 (기준 주파수 = 공진)"""
    omega0 = 2 * math.pi * section.f0_hz
    kappa_int = omega0 / section.q_int
    kappa_ext = omega0 / section.q_ext
    kappa = kappa_int + kappa_ext
    return {
        "omega0": omega0,
        "kappa_int": kappa_int,
        "kappa_ext": kappa_ext,
        "theta": section.theta_rad,
        "a0": section.a0,
        "a1": section.a1_per_linewidth / kappa,
        "a2": section.a2_per_linewidth2 / kappa ** 2,
        "phi0": section.phi0_rad,
        "phi1": section.phi1_per_linewidth / kappa,
        "omega_ref": omega0,
    }
