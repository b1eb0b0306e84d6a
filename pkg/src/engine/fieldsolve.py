"""2D electrostatic solver for chip cross-sections

노드 중심 유한체적 이산화. 유전율은 셀마다 상수, 유전체 경계와 도체는
격자선 위에 놓인다. 면 계수는 면에 인접한 두 셀의 ε·(면 길이/2) 합을
노드 간격으로 나눈 값이다 (직각삼각형 P1 요소와 동일한 강성).
"""
#외부 모듈
import hashlib
import json
import logging
import math
from dataclasses import asdict
from typing import Optional

import numpy as np
from scipy import sparse
from scipy.constants import epsilon_0
from scipy.integrate import cumulative_trapezoid
from scipy.interpolate import RegularGridInterpolator
from scipy.sparse.linalg import spsolve
from scipy.special import ellipk
from scipy.stats import norm

#내부 모듈
from src.cache import field_cache
from src.errors import GeometryError, InvalidInputError, NumericalError, SolverConvergenceError
from src.models.chip import ChipCrossSection, GridSpec
from src.models.cloud import AtomCloud
from src.models.fieldmap import FieldMap

logger = logging.getLogger(__name__)

METHODS = ("direct", "sor")
DEFAULT_TOL = 1e-9
# 에너지법 / 전하법 허용 불일치
CAPACITANCE_AGREEMENT = 0.02
# 축 구성 시 구간당 표본 수 상한
_MAX_SAMPLES = 200_000
# 구간 양 끝 표본 밀집 지수
_CLUSTER_POWER = 6


# ==================== 격자 ====================

def geometry_hash(geometry: ChipCrossSection) -> str:
    """단면 형상의 sha256 (정렬된 JSON)"""
    payload = json.dumps(asdict(geometry), sort_keys=True, default=repr)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()


def grid_key(grid: GridSpec) -> str:
    return json.dumps(asdict(grid), sort_keys=True)


def _dedupe(points: np.ndarray, tol: float) -> np.ndarray:
    keep = [points[0]]
    for p in points[1:]:
        if p - keep[-1] > tol:
            keep.append(p)
    return np.asarray(keep)


def _cluster(p: float, q: float, samples: int) -> np.ndarray:
    """양 끝으로 모이는 표본 (모서리 근처 적분용)"""
    u = np.linspace(0.0, 1.0, samples)
    weight = u ** _CLUSTER_POWER / (u ** _CLUSTER_POWER + (1 - u) ** _CLUSTER_POWER)
    return p + (q - p) * weight


def build_axis(
    lo: float,
    hi: float,
    refine: list[float],
    snap: list[float],
    grid: GridSpec,
    edges: Optional[list[float]] = None,
) -> np.ndarray:
    """등급 1D 축

    refine 좌표에서 간격 h_fine, 거리 d 에서 min(h_max, h_fine + (growth-1) d).
    edges 좌표 (도체 모서리) 에서는 edge_radius 안쪽 간격이
    h_fine (d/radius)^(1-1/edge_grading) 로 줄어든다.
    노드는 사상 좌표 t(s) = ∫ ds/h 에서 등간격이고, refinement 단계마다 t 간격을
    절반으로 나누므로 단계 사이 격자는 중첩된다.
    refine, snap, edges 좌표는 모두 정확히 노드가 된다.
    """
    edges = list(edges or [])
    inside = [p for p in list(refine) + list(snap) + edges if lo < p < hi]
    knots = np.unique(np.asarray([lo, hi] + inside, dtype=float))
    knots = _dedupe(knots, 1e-9 * grid.h_fine)
    knots[-1] = hi
    centers = np.asarray(sorted(set(refine) | set(edges)), dtype=float)
    corners = np.asarray(sorted(set(edges)), dtype=float)
    exponent = 1.0 - 1.0 / grid.edge_grading

    def spacing(s: np.ndarray) -> np.ndarray:
        h = np.full_like(s, grid.h_max)
        if centers.size:
            distance = np.min(np.abs(s[:, None] - centers[None, :]), axis=1)
            h = np.minimum(h, grid.h_fine + (grid.growth - 1) * distance)
        if corners.size and exponent > 0:
            distance = np.min(np.abs(s[:, None] - corners[None, :]), axis=1)
            graded = grid.h_fine * (distance / grid.edge_radius) ** exponent
            h = np.where(distance < grid.edge_radius, np.minimum(h, graded), h)
        return h

    pieces = [np.asarray([lo])]
    for p, q in zip(knots[:-1], knots[1:]):
        samples = int(min(_MAX_SAMPLES, max(256, math.ceil(8 * (q - p) / grid.h_fine))))
        s = _cluster(p, q, samples)
        # 중점 규칙: 모서리에서 h → 0 이어도 적분 가능
        cells = np.concatenate([[0.0], np.cumsum(np.diff(s) / spacing(0.5 * (s[:-1] + s[1:])))])
        n = max(1, math.ceil(cells[-1] - 1e-9)) * 2 ** grid.refinement
        nodes = np.interp(np.linspace(0.0, cells[-1], n + 1), cells, s)
        nodes[-1] = q
        pieces.append(nodes[1:])
    return np.concatenate(pieces)


def build_grid(geometry: ChipCrossSection, grid: GridSpec) -> tuple[np.ndarray, np.ndarray]:
    refine_x, refine_z, snap_x, snap_z, edges_x, edges_z = [], [], [], [], [], []
    for c in geometry.conductors:
        ends = [p for p in (c.x0, c.x1) if abs(p) < geometry.half_width]
        edges_x.extend(ends)
        # 박스 전체를 덮는 도체 평면에는 모서리가 없다
        if ends:
            edges_z.append(c.z)
        else:
            refine_z.append(c.z)
    for x, z in geometry.focus_points:
        refine_x.append(x)
        refine_z.append(z)
    for d in geometry.dielectrics:
        snap_x.extend((d.x0, d.x1))
        snap_z.extend((d.z0, d.z1))
    x = build_axis(-geometry.half_width, geometry.half_width, refine_x, snap_x, grid, edges_x)
    z = build_axis(-geometry.half_height, geometry.half_height, refine_z, snap_z, grid, edges_z)
    return x, z


def cell_permittivity(geometry: ChipCrossSection, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """셀 중심 기준 ε_r, shape (nx-1, nz-1); 뒤에 오는 영역이 우선"""
    xc = 0.5 * (x[:-1] + x[1:])
    zc = 0.5 * (z[:-1] + z[1:])
    eps = np.ones((xc.size, zc.size))
    for region in geometry.dielectrics:
        eps[region.contains(xc[:, None], zc[None, :])] = region.eps_r
    return eps


def conductor_nodes(geometry: ChipCrossSection, x: np.ndarray, z: np.ndarray) -> np.ndarray:
    """도체 노드 인덱스 (자유 노드는 -1)"""
    index = np.full((x.size, z.size), -1, dtype=np.int64)
    tol = 1e-9 * float(np.min(np.diff(x)))
    for k, c in enumerate(geometry.conductors):
        j = int(np.argmin(np.abs(z - c.z)))
        if abs(z[j] - c.z) > 1e-9 * float(np.min(np.diff(z))):
            raise GeometryError("conductor plane is not on a grid line", details={"conductor": c.name})
        columns = (x >= c.x0 - tol) & (x <= c.x1 + tol)
        if np.any(index[columns, j] >= 0):
            raise GeometryError("conductors share grid nodes", details={"conductor": c.name})
        index[columns, j] = k
    return index


def face_coefficients(eps: np.ndarray, x: np.ndarray, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """x 방향 면 (nx-1, nz) 과 z 방향 면 (nx, nz-1) 계수"""
    hx = np.diff(x)
    hz = np.diff(z)
    nx, nz = x.size, z.size

    along_z = eps * hz[None, :] / 2
    face_x = np.zeros((nx - 1, nz))
    face_x[:, :-1] += along_z
    face_x[:, 1:] += along_z
    face_x /= hx[:, None]

    along_x = eps * hx[:, None] / 2
    face_z = np.zeros((nx, nz - 1))
    face_z[:-1, :] += along_x
    face_z[1:, :] += along_x
    face_z /= hz[None, :]
    return face_x, face_z


def _laplacian(face_x: np.ndarray, face_z: np.ndarray) -> sparse.csr_matrix:
    nx, nz = face_z.shape[0], face_x.shape[1]
    n = nx * nz
    flat = np.arange(n).reshape(nx, nz)
    first = np.concatenate([flat[:-1, :].ravel(), flat[:, :-1].ravel()])
    second = np.concatenate([flat[1:, :].ravel(), flat[:, 1:].ravel()])
    weight = np.concatenate([face_x.ravel(), face_z.ravel()])
    rows = np.concatenate([first, second, first, second])
    cols = np.concatenate([first, second, second, first])
    data = np.concatenate([weight, weight, -weight, -weight])
    return sparse.coo_matrix((data, (rows, cols)), shape=(n, n)).tocsr()


def _apply(face_x: np.ndarray, face_z: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """노드별 유출 플럭스 Σ g (φ_n - φ_nb)"""
    out = np.zeros_like(phi)
    flux_x = face_x * (phi[:-1, :] - phi[1:, :])
    flux_z = face_z * (phi[:, :-1] - phi[:, 1:])
    out[:-1, :] += flux_x
    out[1:, :] -= flux_x
    out[:, :-1] += flux_z
    out[:, 1:] -= flux_z
    return out


def _relative_residual(face_x, face_z, phi, free, diag, scale) -> float:
    flux = _apply(face_x, face_z, phi)
    return float(np.max(np.abs(flux[free])) / (np.max(diag[free]) * scale)) if np.any(free) else 0.0


# ==================== 풀이 ====================

def _solve_direct(face_x, face_z, fixed, values):
    laplacian = _laplacian(face_x, face_z)
    free = ~fixed.ravel()
    a = laplacian[free][:, free].tocsc()
    b = -laplacian[free][:, ~free] @ values.ravel()[~free]
    phi = values.ravel().copy()
    phi[free] = spsolve(a, b)
    return phi.reshape(fixed.shape), []


def _solve_sor(face_x, face_z, fixed, values, diag, scale, tol, max_iter, check_every=10):
    nx, nz = fixed.shape
    phi = values.copy()
    free = ~fixed
    east = np.zeros((nx, nz)); east[:-1, :] = face_x
    west = np.zeros((nx, nz)); west[1:, :] = face_x
    north = np.zeros((nx, nz)); north[:, :-1] = face_z
    south = np.zeros((nx, nz)); south[:, 1:] = face_z
    parity = np.add.outer(np.arange(nx), np.arange(nz)) % 2
    colors = [free & (parity == 0), free & (parity == 1)]
    omega = 2.0 / (1.0 + math.sin(math.pi / max(nx, nz)))
    history = []
    for sweep in range(1, max_iter + 1):
        for mask in colors:
            neighbours = np.zeros_like(phi)
            neighbours[:-1, :] += east[:-1, :] * phi[1:, :]
            neighbours[1:, :] += west[1:, :] * phi[:-1, :]
            neighbours[:, :-1] += north[:, :-1] * phi[:, 1:]
            neighbours[:, 1:] += south[:, 1:] * phi[:, :-1]
            phi[mask] += omega * (neighbours[mask] / diag[mask] - phi[mask])
        if sweep % check_every == 0:
            residual = _relative_residual(face_x, face_z, phi, free, diag, scale)
            history.append(residual)
            logger.debug("sor sweep %d residual %.3e", sweep, residual)
            if residual < tol:
                return phi, history
    raise SolverConvergenceError(
        "red-black SOR did not reach the residual tolerance",
        history,
        details={"max_iter": max_iter, "tol": tol}
    )


def solve(
    geometry: ChipCrossSection,
    grid: Optional[GridSpec] = None,
    tol: float = DEFAULT_TOL,
    method: str = "direct",
    max_iter: int = 50_000
) -> FieldMap:
    """∇·(ε∇φ) = 0, 도체는 Dirichlet, 바깥 박스는 Neumann"""
    grid = grid or GridSpec()
    if tol <= 0:
        raise InvalidInputError("solver tolerance must be positive", details={"tol": tol})
    if method not in METHODS:
        raise InvalidInputError(f"unknown solver method '{method}'", details={"methods": list(METHODS)})

    x, z = build_grid(geometry, grid)
    eps = cell_permittivity(geometry, x, z)
    index = conductor_nodes(geometry, x, z)
    potentials = np.asarray([c.potential for c in geometry.conductors], dtype=float)
    fixed = index >= 0
    values = np.where(fixed, potentials[np.clip(index, 0, None)], 0.0)
    face_x, face_z = face_coefficients(eps, x, z)
    diag = np.zeros_like(values)
    diag[:-1, :] += face_x
    diag[1:, :] += face_x
    diag[:, :-1] += face_z
    diag[:, 1:] += face_z
    scale = max(float(np.max(np.abs(potentials))), 1.0)
    logger.info("solving %s cross-section on %dx%d grid (%s)", geometry.kind, x.size, z.size, method)

    if method == "direct":
        phi, history = _solve_direct(face_x, face_z, fixed, values)
    else:
        phi, history = _solve_sor(face_x, face_z, fixed, values, diag, scale, tol, max_iter)

    residual = _relative_residual(face_x, face_z, phi, ~fixed, diag, scale)
    if method == "direct":
        history = [residual]
    if not math.isfinite(residual) or residual > tol:
        raise SolverConvergenceError(
            "solution residual above tolerance",
            history,
            details={"residual": residual, "tol": tol}
        )
    grad_x, grad_z = np.gradient(phi, x, z)
    return FieldMap(
        x=x,
        z=z,
        phi=phi,
        ex=-grad_x,
        ez=-grad_z,
        face_x=face_x,
        face_z=face_z,
        conductor_index=index,
        conductor_names=tuple(c.name for c in geometry.conductors),
        potentials=tuple(float(v) for v in potentials),
        residual=residual,
        residual_history=tuple(history),
        geometry_hash=geometry_hash(geometry),
        method=method,
        eps=eps,
    )


def solve_cached(
    geometry: ChipCrossSection,
    grid: Optional[GridSpec] = None,
    tol: float = DEFAULT_TOL,
    method: str = "direct",
    cache=None
) -> FieldMap:
    """형상 해시 기준 캐시를 거치는 solve"""
    store = cache if cache is not None else field_cache
    grid = grid or GridSpec()
    key = f"{geometry_hash(geometry)}:{grid_key(grid)}:{method}"
    cached = store.get(key)
    if cached is not None and cached.residual <= tol:
        logger.debug("field map cache hit %s", key[:12])
        return cached
    field_map = solve(geometry, grid, tol, method)
    store.set(key, field_map)
    return field_map


# ==================== 후처리 ====================

def field_at(field_map: FieldMap, x, z):
    """쌍선형 보간 (|E|, Ex, Ez); 도메인 밖은 거부"""
    x_arr = np.asarray(x, dtype=float)
    z_arr = np.asarray(z, dtype=float)
    x0, x1, z0, z1 = field_map.extent()
    if np.any((x_arr < x0) | (x_arr > x1) | (z_arr < z0) | (z_arr > z1)):
        raise InvalidInputError(
            "evaluation point outside the field map",
            details={"extent": [x0, x1, z0, z1]}
        )
    x_arr, z_arr = np.broadcast_arrays(x_arr, z_arr)
    points = np.stack([x_arr.ravel(), z_arr.ravel()], axis=-1)
    axes = (field_map.x, field_map.z)
    ex = RegularGridInterpolator(axes, field_map.ex, method="linear")(points).reshape(x_arr.shape)
    ez = RegularGridInterpolator(axes, field_map.ez, method="linear")(points).reshape(x_arr.shape)
    magnitude = np.hypot(ex, ez)
    if magnitude.ndim == 0:
        return float(magnitude), float(ex), float(ez)
    return magnitude, ex, ez


def field_ratio(field_map: FieldMap, x: float, z: float, conductor: str = "plate") -> float:
    """|E|/V [1/m] (live 도체 전위로 정규화)"""
    magnitude, _, _ = field_at(field_map, x, z)
    return magnitude / abs(field_map.potential_of(conductor))


def field_energy_per_length(field_map: FieldMap) -> float:
    """W′ = ½ ε₀ Σ g (Δφ)² [J/m]"""
    dx = np.diff(field_map.phi, axis=0)
    dz = np.diff(field_map.phi, axis=1)
    return 0.5 * epsilon_0 * float(np.sum(field_map.face_x * dx ** 2) + np.sum(field_map.face_z * dz ** 2))


def _live_potential(field_map: FieldMap, conductor: str) -> float:
    if conductor not in field_map.conductor_names:
        raise InvalidInputError(f"unknown conductor '{conductor}'", details={"known": list(field_map.conductor_names)})
    live = field_map.potential_of(conductor)
    others = [v for name, v in zip(field_map.conductor_names, field_map.potentials) if name != conductor]
    if live == 0 or any(v != 0 for v in others):
        raise InvalidInputError(
            "capacitance needs the live conductor at nonzero potential and all others grounded",
            details={"potentials": dict(zip(field_map.conductor_names, field_map.potentials))}
        )
    return live


def _contour_bounds(field_map: FieldMap, k: int) -> tuple[float, float, float, float]:
    """live 도체를 감싸는 사각 경로 (다른 도체 / 박스까지 거리의 절반)

    변은 셀 중심에 놓여 유전체 경계 (격자선) 와 겹치지 않는다.
    """
    x, z = field_map.x, field_map.z
    rows, cols = np.nonzero(field_map.conductor_index == k)
    x0, x1, zc = float(x[rows].min()), float(x[rows].max()), float(z[cols[0]])
    gaps = [x0 - x[0], x[-1] - x1, zc - z[0], z[-1] - zc]
    other_rows, other_cols = np.nonzero((field_map.conductor_index >= 0) & (field_map.conductor_index != k))
    if other_rows.size:
        xo, zo = x[other_rows], z[other_cols]
        dx = np.maximum(0.0, np.maximum(x0 - xo, xo - x1))
        gaps.append(float(np.min(np.hypot(dx, zo - zc))))
    delta = 0.5 * min(gaps)
    if not delta > 0:
        raise InvalidInputError("no room for a Gauss contour around the conductor")

    def center(axis: np.ndarray, value: float) -> float:
        i = int(np.clip(np.searchsorted(axis, value, side="right") - 1, 0, axis.size - 2))
        return 0.5 * (axis[i] + axis[i + 1])

    return center(x, x0 - delta), center(x, x1 + delta), center(z, zc - delta), center(z, zc + delta)


def _side_flux(field_map: FieldMap, fixed: float, lo: float, hi: float, vertical: bool) -> float:
    """한 변을 따라 ∫ ε_r E_n dl (E_n 은 +x 또는 +z 성분)

    보간 E 는 변 위에서 구간별 선형이므로 격자선마다 끊은 사다리꼴이 정확하다.
    """
    axis, across = (field_map.z, field_map.x) if vertical else (field_map.x, field_map.z)
    points = np.concatenate([[lo], axis[(axis > lo) & (axis < hi)], [hi]])
    if vertical:
        _, component, _ = field_at(field_map, np.full(points.size, fixed), points)
    else:
        _, _, component = field_at(field_map, points, np.full(points.size, fixed))
    i = int(np.clip(np.searchsorted(across, fixed, side="right") - 1, 0, across.size - 2))
    mids = 0.5 * (points[:-1] + points[1:])
    j = np.clip(np.searchsorted(axis, mids, side="right") - 1, 0, axis.size - 2)
    eps = field_map.eps[i, j] if vertical else field_map.eps[j, i]
    return float(np.sum(eps * 0.5 * (component[:-1] + component[1:]) * np.diff(points)))


def charge_capacitance_per_length(field_map: FieldMap, conductor: str = "plate") -> float:
    """Gauss 법칙: 도체를 감싸는 사각 경로에서 보간 전기장의 ∮ ε E·n dl / V

    에너지법의 이산 플럭스와 독립인 노드 기울기 (중심 차분) 를 쓰므로
    격자가 거칠면 두 값이 벌어진다.
    """
    live = _live_potential(field_map, conductor)
    if field_map.eps is None:
        raise InvalidInputError("field map carries no permittivity; load it from npz")
    k = field_map.conductor_names.index(conductor)
    left, right, bottom, top = _contour_bounds(field_map, k)
    flux = (
        _side_flux(field_map, right, bottom, top, vertical=True)
        - _side_flux(field_map, left, bottom, top, vertical=True)
        + _side_flux(field_map, top, left, right, vertical=False)
        - _side_flux(field_map, bottom, left, right, vertical=False)
    )
    return epsilon_0 * flux / live


def capacitance_mismatch(field_map: FieldMap, conductor: str = "plate") -> float:
    """|C′_energy - C′_charge| / C′_energy"""
    live = _live_potential(field_map, conductor)
    energy = 2 * field_energy_per_length(field_map) / live ** 2
    return abs(energy - charge_capacitance_per_length(field_map, conductor)) / energy


def capacitance_per_length(field_map: FieldMap, conductor: str = "plate", check: bool = True) -> float:
    """C′ = 2W′/V² [F/m]

    check 이면 Gauss 경로 용량과 2% 이상 어긋날 때 UNDER_RESOLVED.
    """
    live = _live_potential(field_map, conductor)
    energy = 2 * field_energy_per_length(field_map) / live ** 2
    if check:
        charge = charge_capacitance_per_length(field_map, conductor)
        mismatch = abs(energy - charge) / energy
        if mismatch > CAPACITANCE_AGREEMENT:
            raise NumericalError(
                "energy and charge capacitance disagree; grid is under-resolved",
                details={"energy": energy, "charge": charge, "mismatch": mismatch},
                code="UNDER_RESOLVED"
            )
    return energy


def coplanar_capacitance(w: float, g: float, eps_r: float) -> float:
    """반무한 기판 CPW 의 등각사상 해 C′ = 2ε₀(ε_r+1) K(k)/K(k′), k = w/(w+2g)"""
    if w <= 0 or g <= 0:
        raise InvalidInputError("strip width and gap must be positive", details={"w": w, "g": g})
    k = w / (w + 2 * g)
    return 2 * epsilon_0 * (eps_r + 1) * ellipk(k ** 2) / ellipk(1 - k ** 2)


def richardson_order(coarse: float, medium: float, fine: float, ratio: float = 2.0) -> float:
    """세 단계 중첩 격자 값으로부터 관측 수렴 차수"""
    lower = medium - fine
    if lower == 0 or (coarse - medium) / lower <= 0:
        raise NumericalError(
            "refinement sequence is not monotone",
            details={"values": [coarse, medium, fine]}
        )
    return math.log((coarse - medium) / lower) / math.log(ratio)


# ==================== 균일도 η ====================

def homogeneity_eta(
    transverse: FieldMap,
    cloud: AtomCloud,
    center: tuple[float, float],
    longitudinal: Optional[FieldMap] = None,
    longitudinal_center: Optional[tuple[float, float]] = None,
    order: int = 16,
) -> float:
    """η = √(∫ρ (E/E₀ - 1)²), ±3σ 영역 Gauss-Legendre 적분

    transverse 는 x-z 단면, longitudinal 은 y-z 단면 (없으면 y 방향 E 일정).
    """
    nodes, weights = np.polynomial.legendre.leggauss(order)
    u = 3.0 * nodes
    # 표준정규 밀도 × (dx/du)
    w = 3.0 * weights * norm.pdf(u)
    cx, cz = center

    xs = cx + cloud.sigma_r * u
    zs = cz + cloud.sigma_r * u
    e_center, _, _ = field_at(transverse, cx, cz)
    if e_center == 0:
        raise InvalidInputError("field vanishes at the cloud center", details={"center": list(center)})
    e_t, _, _ = field_at(transverse, xs[:, None], zs[None, :])
    ratio_t = e_t / e_center

    if longitudinal is None:
        weights_xz = w[:, None] * w[None, :]
        return float(math.sqrt(np.sum(weights_xz * (ratio_t - 1) ** 2) * np.sum(w)))

    ly, lz = longitudinal_center or (0.0, cz)
    ys = ly + cloud.sigma_y * u
    zl = lz + cloud.sigma_r * u
    e_l_center, _, _ = field_at(longitudinal, ly, lz)
    if e_l_center == 0:
        raise InvalidInputError("field vanishes at the longitudinal cloud center")
    e_l, _, _ = field_at(longitudinal, ys[:, None], zl[None, :])
    ratio_l = e_l / e_l_center

    # (x, y, z) 축 순서
    combined = ratio_t[:, None, :] * ratio_l[None, :, :]
    weights_xyz = w[:, None, None] * w[None, :, None] * w[None, None, :]
    return float(math.sqrt(np.sum(weights_xyz * (combined - 1) ** 2)))
