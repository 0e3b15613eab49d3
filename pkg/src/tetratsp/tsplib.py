"""TSPLIB EUC_2D export/import and the rounded distance used by exact solvers."""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .instances import DEFAULT_SCALE, Family, Instance, Kind, VertexLabel

INT_COORD_LIMIT = 2**31 - 1


class TsplibError(ValueError):
    pass


class Metric(str, Enum):
    EXACT = "exact"
    EUC2D = "euc2d"


def nint(v):
    """Round half away from zero (floor(|v| + 0.5) with the sign restored)."""
    a = np.floor(np.abs(v) + 0.5)
    return np.copysign(a, v) + 0.0  # +0.0 turns -0.0 into 0.0


@dataclass(frozen=True)
class TsplibFile:
    name: str
    dimension: int
    coords: tuple[tuple[int, float, float], ...]
    edge_weight_type: str = "EUC_2D"

    def __post_init__(self) -> None:
        if self.dimension != len(self.coords):
            raise TsplibError(f"DIMENSION {self.dimension} but {len(self.coords)} coordinate rows")
        for k, row in enumerate(self.coords, start=1):
            if row[0] != k:
                raise TsplibError(f"node ids must be 1..{self.dimension} in order; row {k} has id {row[0]}")

    def render(self) -> str:
        lines = [
            f"NAME: {self.name}",
            "TYPE: TSP",
            f"DIMENSION: {self.dimension}",
            f"EDGE_WEIGHT_TYPE: {self.edge_weight_type}",
            "NODE_COORD_SECTION",
        ]
        lines += [f"{i} {_fmt(x)} {_fmt(y)}" for i, x, y in self.coords]
        lines.append("EOF")
        return "\n".join(lines) + "\n"

    def write(self, path: str | Path) -> Path:
        path = Path(path)
        path.write_text(self.render(), encoding="ascii")
        return path

    @property
    def xy(self) -> np.ndarray:
        return np.array([(x, y) for _, x, y in self.coords], dtype=float).reshape(-1, 2)

    def distance_matrix(self) -> np.ndarray:
        return euc2d_matrix(self.xy)


def _fmt(v: float) -> str:
    if float(v).is_integer():
        return str(int(v))
    return repr(float(v))


def scaled_coords(inst: Instance, scale: int | None = None) -> np.ndarray:
    """Instance coordinates times ``scale``, rounded to integers (as floats)."""
    scale = inst.tsplib_scale if scale is None else scale
    if scale < 1 or int(scale) != scale:
        raise ValueError(f"scale must be a positive integer, got {scale}")
    out = nint(inst.coords * scale)
    if np.any(np.abs(out) > INT_COORD_LIMIT):
        raise OverflowError(f"scaled coordinates exceed the integer range (|v| > {INT_COORD_LIMIT})")
    return out


def export_instance(inst: Instance, scale: int | None = None) -> TsplibFile:
    """TSPLIB view of ``inst`` with coordinates scaled and rounded to integers.

    ``scale`` defaults to the instance's own scale (10000 for generated
    families).
    """
    xy = scaled_coords(inst, scale)
    coords = tuple((k + 1, x, y) for k, (x, y) in enumerate(xy.astype(np.int64).tolist()))
    return TsplibFile(name=inst.name or "instance", dimension=len(coords), coords=coords)


def euc2d_distance(p, q) -> int:
    """TSPLIB EUC_2D weight: nearest integer to the Euclidean distance."""
    dx = p[0] - q[0]
    dy = p[1] - q[1]
    return int(math.floor(math.sqrt(dx * dx + dy * dy) + 0.5))


def euc2d_matrix(xy: np.ndarray) -> np.ndarray:
    xy = np.asarray(xy, dtype=float)
    d = np.subtract.outer(xy[:, 0], xy[:, 0])
    d *= d
    dy = np.subtract.outer(xy[:, 1], xy[:, 1])
    dy *= dy
    d += dy
    np.sqrt(d, out=d)
    d += 0.5
    return np.floor(d, out=d)


def distance_matrix(inst: Instance, metric: Metric | str = Metric.EXACT) -> np.ndarray:
    """Distances under ``metric``; EUC2D values are in scaled integer units."""
    metric = Metric(metric)
    if metric is Metric.EXACT:
        return inst.distance_matrix
    return euc2d_matrix(scaled_coords(inst))


_HEADER_KEYS = {"NAME", "TYPE", "COMMENT", "DIMENSION", "EDGE_WEIGHT_TYPE", "CAPACITY",
                "DISPLAY_DATA_TYPE", "NODE_COORD_TYPE"}


def parse_tsplib_file(text: str) -> TsplibFile:
    header: dict[str, str] = {}
    rows: list[tuple[int, float, float]] = []
    in_coords = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line == "EOF":
            break
        if in_coords:
            parts = line.split()
            if len(parts) == 3 and _is_number(parts[0]):
                try:
                    rows.append((int(parts[0]), float(parts[1]), float(parts[2])))
                except ValueError as exc:
                    raise TsplibError(f"line {lineno}: malformed coordinate row {line!r}") from exc
                continue
            if parts[0].rstrip(":").upper() in _HEADER_KEYS or parts[0].upper().endswith("_SECTION"):
                raise TsplibError(f"line {lineno}: unsupported section after NODE_COORD_SECTION: {line!r}")
            raise TsplibError(f"line {lineno}: malformed coordinate row {line!r}")
        if line.upper().startswith("NODE_COORD_SECTION"):
            in_coords = True
            continue
        if line.upper().endswith("_SECTION"):
            raise TsplibError(f"line {lineno}: unsupported section {line!r}")
        if ":" not in line:
            raise TsplibError(f"line {lineno}: expected 'KEY: VALUE', got {line!r}")
        key, value = line.split(":", 1)
        header[key.strip().upper()] = value.strip()

    ewt = header.get("EDGE_WEIGHT_TYPE", "")
    if ewt != "EUC_2D":
        raise TsplibError(f"unsupported EDGE_WEIGHT_TYPE {ewt!r} (only EUC_2D)")
    if not in_coords:
        raise TsplibError("missing NODE_COORD_SECTION")
    if "DIMENSION" not in header:
        raise TsplibError("missing DIMENSION")
    try:
        dim = int(header["DIMENSION"])
    except ValueError as exc:
        raise TsplibError(f"malformed DIMENSION {header['DIMENSION']!r}") from exc
    return TsplibFile(name=header.get("NAME", "instance"), dimension=dim, coords=tuple(rows))


def _is_number(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def parse_tsplib(text: str, scale: int = DEFAULT_SCALE) -> Instance:
    """Read EUC_2D TSPLIB text into an imported instance.

    File coordinates are divided by ``scale`` so that exact distances are in
    base-edge units again; exporting with the same scale reproduces the
    integer coordinates.
    """
    tf = parse_tsplib_file(text)
    labels = tuple(VertexLabel(Kind.LINE, k) for k in range(tf.dimension))
    return Instance(
        family=Family.IMPORTED,
        params=(),
        labels=labels,
        coords=tf.xy / scale,
        name=tf.name,
        tsplib_scale=scale,
    )


def read_tsplib(path: str | Path, scale: int = DEFAULT_SCALE) -> Instance:
    return parse_tsplib(Path(path).read_text(encoding="ascii"), scale=scale)
