"""S11 reflection model and three-stage background-corrected fit

피팅은 내부적으로 x = (ω - ω_ref)/Δ 좌표에서 수행한다 (ω_ref: 창 중심,
Δ: 창 반폭). 결과의 배경 계수는 (ω - ω_ref) 기준으로 되돌려 저장한다.
"""
#외부 모듈
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Union

import lmfit
import numpy as np
from scipy.signal import savgol_filter

#내부 모듈
from src.errors import FitError, InvalidInputError, ToolkitError
from src.models.trace import PARAM_NAMES, FitResult, S11Trace

logger = logging.getLogger(__name__)

TRACE_CSV_COLUMNS = ("freq_Hz", "re_S11", "im_S11")
# 배경 진폭 피팅의 시그마 클리핑 반복 수
_CLIP_ROUNDS = 6


@dataclass(frozen=True)
class FitOptions:
    """window: 선폭 단위 전체 피팅 창 (None 이면 전체 트레이스)"""
    window: Optional[float] = 10.0
    mask_factor: float = 3.0
    min_span_linewidths: float = 3.0
    xtol: float = 1e-12
    ftol: float = 1e-12
    max_nfev: int = 20000


# ==================== 모델 ====================

def ideal_response(omega0: float, kappa_int: float, kappa_ext: float, omega):
    """S11 = -1 + 2κ_ext/(κ + 2i(ω - ω₀))"""
    omega = np.asarray(omega, dtype=float)
    kappa = kappa_int + kappa_ext
    return -1 + 2 * kappa_ext / (kappa + 2j * (omega - omega0))


def _params_of(params: Union[FitResult, Mapping[str, float]]) -> dict[str, float]:
    if isinstance(params, FitResult):
        return {**params.params(), "omega_ref": params.omega_ref}
    missing = [name for name in PARAM_NAMES if name not in params]
    if missing:
        raise InvalidInputError("model parameters incomplete", details={"missing": missing})
    return {**{name: float(params[name]) for name in PARAM_NAMES}, "omega_ref": float(params.get("omega_ref", 0.0))}


def background(params: Union[FitResult, Mapping[str, float]], omega):
    """S11^bg = (a₀ + a₁δ + a₂δ²) e^{i(φ₀ + φ₁δ)}, δ = ω - ω_ref"""
    p = _params_of(params)
    delta = np.asarray(omega, dtype=float) - p["omega_ref"]
    amplitude = p["a0"] + p["a1"] * delta + p["a2"] * delta ** 2
    return amplitude * np.exp(1j * (p["phi0"] + p["phi1"] * delta))


def model_response(params: Union[FitResult, Mapping[str, float]], omega):
    """S11^real = S11^bg · (1 - 2κ_ext e^{iθ}/(κ + 2i(ω - ω₀)))"""
    p = _params_of(params)
    omega = np.asarray(omega, dtype=float)
    kappa = p["kappa_int"] + p["kappa_ext"]
    resonant = 1 - 2 * p["kappa_ext"] * np.exp(1j * p["theta"]) / (kappa + 2j * (omega - p["omega0"]))
    return background(p, omega) * resonant


def _scaled_background(v: Mapping[str, float], x: np.ndarray) -> np.ndarray:
    return (v["a0"] + v["a1"] * x + v["a2"] * x ** 2) * np.exp(1j * (v["phi0"] + v["phi1"] * x))


def _scaled_resonance(v: Mapping[str, float], x: np.ndarray) -> np.ndarray:
    kappa = v["kappa_int"] + v["kappa_ext"]
    return 1 - 2 * v["kappa_ext"] * np.exp(1j * v["theta"]) / (kappa + 2j * (x - v["omega0"]))


def _stack(residual: np.ndarray) -> np.ndarray:
    return np.concatenate([residual.real, residual.imag])


# ==================== 1 단계: 예비 추정 ====================

def _smoothed_magnitude(trace: S11Trace) -> np.ndarray:
    # 2차 Savitzky-Golay: 곡선 배경은 끝점까지 그대로 보존
    window = max(5, (len(trace) // 100) | 1)
    return savgol_filter(np.abs(trace.s11), window, 2, mode="interp")


def _baseline(x: np.ndarray, magnitude: np.ndarray) -> tuple[np.ndarray, np.ndarray, float]:
    """시그마 클리핑 2차 배경 (dip 아래쪽 점 제외), (fit, keep mask, noise)"""
    keep = np.ones_like(magnitude, dtype=bool)
    fit = np.full_like(magnitude, magnitude.mean())
    noise = 0.0
    for _ in range(_CLIP_ROUNDS):
        coefficients = np.polyfit(x[keep], magnitude[keep], 2)
        fit = np.polyval(coefficients, x)
        residual = magnitude - fit
        noise = float(np.std(residual[keep]))
        updated = residual > -3 * max(noise, 1e-12)
        if np.array_equal(updated, keep) or updated.sum() < 8:
            break
        keep = updated
    return fit, keep, noise


def _preliminary(trace: S11Trace) -> dict[str, float]:
    omega = trace.omega
    center = 0.5 * (omega[0] + omega[-1])
    half = 0.5 * (omega[-1] - omega[0])
    x = (omega - center) / half
    raw = np.abs(trace.s11)
    smooth = _smoothed_magnitude(trace)
    fit, _, noise = _baseline(x, raw)
    normalized = smooth / fit
    noise_floor = max(noise / float(np.mean(np.abs(fit))), 1e-6)
    i_min = int(np.argmin(normalized))
    depth = 1.0 - float(normalized[i_min])
    if depth < 3 * noise_floor:
        raise FitError(
            "no discernible resonance dip in the trace",
            details={"stage": 1, "depth": depth, "noise_floor": noise_floor}
        )
    level = 1.0 - depth / 2
    left = i_min
    while left > 0 and normalized[left - 1] < level:
        left -= 1
    right = i_min
    while right < len(omega) - 1 and normalized[right + 1] < level:
        right += 1
    spacing = float(np.median(np.diff(omega)))
    kappa = max(float(omega[right] - omega[left]), 2 * spacing)
    return {"omega0": float(omega[i_min]), "kappa": kappa, "min_normalized": float(normalized[i_min]), "depth": depth}


def _window(trace: S11Trace, omega0: float, kappa: float, options: FitOptions) -> S11Trace:
    if options.window is None:
        return trace
    half = options.window * kappa / 2
    inside = np.abs(trace.omega - omega0) <= half
    if inside.sum() < 32 or inside.all():
        return trace
    return S11Trace(omega=trace.omega[inside], s11=trace.s11[inside], noise_sigma=trace.noise_sigma)


def _minimize(residual, params: lmfit.Parameters, options: FitOptions, stage: int) -> lmfit.minimizer.MinimizerResult:
    result = lmfit.minimize(
        residual, params, method="leastsq",
        xtol=options.xtol, ftol=options.ftol, max_nfev=options.max_nfev
    )
    if not result.success:
        raise FitError(
            f"least-squares stage {stage} did not converge",
            details={"stage": stage, "message": str(result.message), "nfev": int(result.nfev)}
        )
    return result


# ==================== 피팅 ====================

def fit(trace: S11Trace, options: Optional[FitOptions] = None) -> FitResult:
    """배경 제거 → S11^θ 피팅 → 원 데이터 전체 재피팅"""
    options = options or FitOptions()
    prelim = _preliminary(trace)
    logger.debug("preliminary omega0=%.9g kappa=%.4g depth=%.3g", prelim["omega0"], prelim["kappa"], prelim["depth"])
    span = trace.span[1] - trace.span[0]
    if span < options.min_span_linewidths * prelim["kappa"]:
        raise FitError(
            "trace is too narrow around the dip",
            details={"stage": 1, "span": span, "kappa_preliminary": prelim["kappa"]}
        )

    data = _window(trace, prelim["omega0"], prelim["kappa"], options)
    omega = data.omega
    omega_ref = 0.5 * (omega[0] + omega[-1])
    scale = 0.5 * (omega[-1] - omega[0])
    x = (omega - omega_ref) / scale
    s11 = data.s11
    x_pre = (prelim["omega0"] - omega_ref) / scale
    k_pre = prelim["kappa"] / scale

    # 1 단계: 공진 영역을 가린 나머지로 배경 피팅
    outside = np.abs(x - x_pre) > options.mask_factor * k_pre
    if outside.sum() < 8:
        raise FitError(
            "too few samples outside the masked resonance for a background fit",
            details={"stage": 1, "outside": int(outside.sum())}
        )
    amp = np.polyfit(x[outside], np.abs(s11[outside]), 2)
    phase = np.polyfit(x[outside], np.unwrap(np.angle(s11))[outside], 1)
    bg_params = lmfit.Parameters()
    bg_params.add("a0", value=amp[2])
    bg_params.add("a1", value=amp[1])
    bg_params.add("a2", value=amp[0])
    bg_params.add("phi0", value=phase[1])
    bg_params.add("phi1", value=phase[0])
    x_out, s_out = x[outside], s11[outside]
    stage1 = _minimize(
        lambda p: _stack(_scaled_background(p.valuesdict(), x_out) - s_out), bg_params, options, 1
    )
    bg_values = stage1.params.valuesdict()

    # 2 단계: 배경으로 나눈 데이터에 S11^θ
    corrected = s11 / _scaled_background(bg_values, x)
    stage2 = None
    dip = max(prelim["min_normalized"], 0.0)
    for ratio in ((1 - dip) / 2, (1 + dip) / 2):
        seed = lmfit.Parameters()
        seed.add("omega0", value=x_pre, min=-1.0, max=1.0)
        seed.add("kappa_int", value=k_pre * (1 - ratio), min=0.0)
        seed.add("kappa_ext", value=k_pre * ratio, min=0.0)
        seed.add("theta", value=0.0, min=-math.pi, max=math.pi)
        try:
            candidate = _minimize(
                lambda p: _stack(_scaled_resonance(p.valuesdict(), x) - corrected), seed, options, 2
            )
        except FitError:
            continue
        if stage2 is None or candidate.chisqr < stage2.chisqr:
            stage2 = candidate
    if stage2 is None:
        raise FitError("resonance fit of the background-corrected trace failed", details={"stage": 2})

    # 3 단계: 원 데이터 전체 재피팅
    joint = lmfit.Parameters()
    for name, value in stage2.params.valuesdict().items():
        bound = stage2.params[name]
        joint.add(name, value=value, min=bound.min, max=bound.max)
    for name, value in bg_values.items():
        joint.add(name, value=value)
    stage3 = _minimize(
        lambda p: _stack(_scaled_background(p.valuesdict(), x) * _scaled_resonance(p.valuesdict(), x) - s11),
        joint, options, 3
    )
    return _to_result(stage3, omega_ref, scale, {
        "preliminary": prelim,
        "stage1_chisqr": float(stage1.chisqr),
        "stage2_chisqr": float(stage2.chisqr),
        "stage3_chisqr": float(stage3.chisqr),
        "nfev": int(stage3.nfev),
        "samples": int(len(data)),
    }, trace)


# 내부 (스케일) 파라미터 → 물리 단위 변환 계수: value_phys = value * scale**power
_SCALE_POWER = {
    "omega0": 1, "kappa_int": 1, "kappa_ext": 1, "theta": 0,
    "a0": 0, "a1": -1, "a2": -2, "phi0": 0, "phi1": -1,
}


def _to_result(result, omega_ref: float, scale: float, stages: dict[str, Any], trace: S11Trace) -> FitResult:
    values, errors = {}, {}
    for name in PARAM_NAMES:
        param = result.params[name]
        factor = scale ** _SCALE_POWER[name]
        values[name] = float(param.value) * factor
        errors[name] = float(param.stderr) * abs(factor) if param.stderr is not None else math.nan
    values["omega0"] += omega_ref
    values["theta"] = math.atan2(math.sin(values["theta"]), math.cos(values["theta"]))
    stages["covariance"] = result.covar is not None
    low, high = trace.span
    if not low <= values["omega0"] <= high:
        raise FitError(
            "fitted resonance lies outside the trace",
            details={"stage": 3, "omega0": values["omega0"], "span": [low, high]}
        )
    return FitResult(
        **values,
        omega_ref=omega_ref,
        stderr=errors,
        residual_norm=float(math.sqrt(result.chisqr)),
        stages=stages,
    )


def background_correct(trace: S11Trace, result: FitResult) -> S11Trace:
    """배경으로 나누고 공진 항의 θ 회전을 제거 (이상 응답의 부호 반전 형태)"""
    corrected = trace.s11 / background(result, trace.omega)
    rotated = 1 - (1 - corrected) * np.exp(-1j * result.theta)
    return S11Trace(omega=trace.omega, s11=rotated, noise_sigma=trace.noise_sigma)


def quality_factors_from_fit(result: FitResult) -> dict[str, float]:
    """Q_int, Q_ext, Q_tot 와 (공분산 무시) 전파 오차"""
    out = {}
    for label, kappa, kappa_err in (
        ("q_int", result.kappa_int, result.stderr.get("kappa_int", math.nan)),
        ("q_ext", result.kappa_ext, result.stderr.get("kappa_ext", math.nan)),
        ("q_tot", result.kappa, math.hypot(result.stderr.get("kappa_int", math.nan), result.stderr.get("kappa_ext", math.nan))),
    ):
        q = result.omega0 / kappa if kappa > 0 else math.inf
        relative = math.hypot(result.stderr.get("omega0", math.nan) / result.omega0, kappa_err / kappa) if kappa > 0 else math.nan
        out[label] = q
        out[f"{label}_stderr"] = abs(q) * relative if math.isfinite(q) else math.nan
    return out


# ==================== 합성 트레이스 ====================

def measured_parameters(curved: bool = True) -> dict[str, float]:
    """측정 공진 (11.708 GHz, Q_int 5.2e3, Q_ext 18.3e3) 기반 합성 파라미터"""
    omega0 = 2 * math.pi * 11.708e9
    kappa_int = omega0 / 5.2e3
    kappa_ext = omega0 / 18.3e3
    width = 5 * (kappa_int + kappa_ext)
    return {
        "omega0": omega0,
        "kappa_int": kappa_int,
        "kappa_ext": kappa_ext,
        "theta": 0.1,
        "a0": 0.8,
        "a1": 0.05 / width if curved else 0.0,
        "a2": -0.03 / width ** 2 if curved else 0.0,
        "phi0": 0.3 if curved else 0.0,
        "phi1": 0.4 / width if curved else 0.0,
        "omega_ref": omega0,
    }


def synth_trace(
    params: Union[FitResult, Mapping[str, float]],
    omega_start: float,
    omega_stop: float,
    n: int = 1601,
    sigma: float = 0.0,
    seed: Optional[int] = None
) -> S11Trace:
    """모델 응답 + 복소 가우시안 잡음 (실수부/허수부 각각 표준편차 sigma)"""
    if n < 32:
        raise InvalidInputError("synthetic trace needs at least 32 points", details={"n": n})
    if not omega_stop > omega_start:
        raise InvalidInputError("frequency span must be increasing", details={"start": omega_start, "stop": omega_stop})
    if sigma < 0:
        raise InvalidInputError("noise sigma must be non-negative", details={"sigma": sigma})
    omega = np.linspace(omega_start, omega_stop, n)
    response = model_response(params, omega)
    if sigma > 0:
        rng = np.random.default_rng(seed)
        response = response + sigma * (rng.standard_normal(n) + 1j * rng.standard_normal(n))
    return S11Trace(omega=omega, s11=response, noise_sigma=sigma or None)


# ==================== 일괄 피팅 ====================

@dataclass(frozen=True)
class FitFailure:
    index: int
    code: str
    message: str


def _fit_task(task: tuple) -> Union[FitResult, FitFailure]:
    index, trace, options = task
    try:
        return fit(trace, options)
    except ToolkitError as exc:
        return FitFailure(index=index, code=exc.code, message=exc.message)


def fit_many(
    traces: Sequence[S11Trace],
    options: Optional[FitOptions] = None,
    jobs: int = 1
) -> list[Union[FitResult, FitFailure]]:
    """트레이스별 FitResult (실패는 FitFailure 로 기록)"""
    tasks = [(i, trace, options or FitOptions()) for i, trace in enumerate(traces)]
    if jobs <= 1 or len(tasks) <= 1:
        return [_fit_task(task) for task in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_fit_task, tasks))


# ==================== 입출력 ====================

def read_trace_csv(path) -> S11Trace:
    path = Path(path)
    with path.open(encoding="utf-8") as handle:
        header = handle.readline().strip()
    columns = tuple(column.strip() for column in header.split(","))
    if columns != TRACE_CSV_COLUMNS:
        raise InvalidInputError(
            "trace CSV header must be freq_Hz,re_S11,im_S11",
            details={"header": header, "path": str(path)}
        )
    table = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return S11Trace(omega=2 * math.pi * table[:, 0], s11=table[:, 1] + 1j * table[:, 2])


def write_trace_csv(trace: S11Trace, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    table = np.column_stack([trace.omega / (2 * math.pi), trace.s11.real, trace.s11.imag])
    np.savetxt(path, table, delimiter=",", header=",".join(TRACE_CSV_COLUMNS), comments="", fmt="%.12e")
    return path


def format_report(result: FitResult) -> str:
    """사람이 읽는 피팅 보고서"""
    q = quality_factors_from_fit(result)
    two_pi = 2 * math.pi
    lines = [
        "S11 fit",
        f"  f0        = {result.omega0 / two_pi / 1e9:.9f} GHz  ± {result.stderr['omega0'] / two_pi / 1e3:.3g} kHz",
        f"  kappa_int = 2pi x {result.kappa_int / two_pi / 1e6:.6g} MHz  ± {result.stderr['kappa_int'] / two_pi / 1e3:.3g} kHz",
        f"  kappa_ext = 2pi x {result.kappa_ext / two_pi / 1e6:.6g} MHz  ± {result.stderr['kappa_ext'] / two_pi / 1e3:.3g} kHz",
        f"  theta     = {result.theta:.6g} rad  ± {result.stderr['theta']:.3g}",
        f"  Q_int     = {q['q_int']:.6g}  ± {q['q_int_stderr']:.3g}",
        f"  Q_ext     = {q['q_ext']:.6g}  ± {q['q_ext_stderr']:.3g}",
        f"  Q_tot     = {q['q_tot']:.6g}  ± {q['q_tot_stderr']:.3g}",
        f"  residual  = {result.residual_norm:.6g}",
    ]
    return "\n".join(lines)
