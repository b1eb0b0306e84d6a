"""FieldMap export / import (CSV grid and compressed npz)"""
#외부 모듈
import json
from pathlib import Path

import numpy as np

#내부 모듈
from src.errors import InvalidInputError
from src.models.fieldmap import FieldMap

CSV_COLUMNS = ("x_m", "z_m", "phi_V", "Ex_V_per_m", "Ez_V_per_m")
_ARRAYS = ("x", "z", "phi", "ex", "ez", "face_x", "face_z", "conductor_index")


# ==================== CSV ====================

def write_fieldmap_csv(field_map: FieldMap, path) -> Path:
    """헤더 주석 (해시, 축 크기, 단위) + x 우선 순서의 행"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    xx, zz = np.meshgrid(field_map.x, field_map.z, indexing="ij")
    table = np.column_stack([
        xx.ravel(), zz.ravel(), field_map.phi.ravel(), field_map.ex.ravel(), field_map.ez.ravel()
    ])
    header = "\n".join([
        f"geometry_hash: {field_map.geometry_hash}",
        f"nx: {field_map.x.size}",
        f"nz: {field_map.z.size}",
        "units: x_m=m z_m=m phi_V=V Ex_V_per_m=V/m Ez_V_per_m=V/m",
        f"potentials: {json.dumps(dict(zip(field_map.conductor_names, field_map.potentials)))}",
        ",".join(CSV_COLUMNS),
    ])
    np.savetxt(path, table, delimiter=",", header=header, comments="# ", fmt="%.12e")
    return path


def _header_value(lines: list[str], key: str) -> str:
    for line in lines:
        if line.startswith(f"# {key}:"):
            return line.split(":", 1)[1].strip()
    raise InvalidInputError(f"field map CSV header lacks '{key}'")


def read_fieldmap_csv(path) -> FieldMap:
    """CSV 격자 읽기

    CSV 에는 유전율이 없으므로 면 계수는 0, eps 는 None 이다. 보간과 η 에는
    쓸 수 있지만 용량 계산에는 npz 를 사용한다.
    """
    path = Path(path)
    with path.open(encoding="utf-8") as handle:
        header = [line.rstrip("\n") for line in handle if line.startswith("#")]
    nx = int(_header_value(header, "nx"))
    nz = int(_header_value(header, "nz"))
    table = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    if table.shape != (nx * nz, len(CSV_COLUMNS)):
        raise InvalidInputError(
            "field map CSV does not match its header",
            details={"rows": table.shape[0], "expected": nx * nz}
        )
    potentials = json.loads(_header_value(header, "potentials"))
    grid = table.reshape(nx, nz, len(CSV_COLUMNS))
    return FieldMap(
        x=grid[:, 0, 0],
        z=grid[0, :, 1],
        phi=grid[:, :, 2],
        ex=grid[:, :, 3],
        ez=grid[:, :, 4],
        face_x=np.zeros((nx - 1, nz)),
        face_z=np.zeros((nx, nz - 1)),
        conductor_index=np.full((nx, nz), -1),
        conductor_names=tuple(potentials),
        potentials=tuple(float(v) for v in potentials.values()),
        residual=float("nan"),
        residual_history=(),
        geometry_hash=_header_value(header, "geometry_hash"),
    )


# ==================== npz ====================

def save_fieldmap_npz(field_map: FieldMap, path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    meta = {
        "conductor_names": list(field_map.conductor_names),
        "potentials": list(field_map.potentials),
        "residual": field_map.residual,
        "residual_history": list(field_map.residual_history),
        "geometry_hash": field_map.geometry_hash,
        "method": field_map.method,
    }
    arrays = {name: getattr(field_map, name) for name in _ARRAYS}
    if field_map.eps is not None:
        arrays["eps"] = field_map.eps
    with path.open("wb") as handle:
        np.savez_compressed(handle, meta=np.asarray(json.dumps(meta)), **arrays)
    return path


def load_fieldmap_npz(path) -> FieldMap:
    with np.load(Path(path), allow_pickle=False) as data:
        meta = json.loads(str(data["meta"]))
        arrays = {name: data[name] for name in _ARRAYS}
        eps = data["eps"] if "eps" in data.files else None
    return FieldMap(
        **arrays,
        conductor_names=tuple(meta["conductor_names"]),
        potentials=tuple(meta["potentials"]),
        residual=meta["residual"],
        residual_history=tuple(meta["residual_history"]),
        geometry_hash=meta["geometry_hash"],
        method=meta["method"],
        eps=eps,
    )
