"""Instance families: tetrahedron T(n,m), modified tetrahedron T'(n,m) and
three parallel lines P(n,d).

Geometry is exact double precision in units of the base-edge length; rounding
to integer coordinates happens only in :mod:`tetratsp.tsplib`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Mapping

import numpy as np

from .errors import PreconditionError

SQRT3 = math.sqrt(3.0)
GEOM_TOL = 1e-9
DEFAULT_SCALE = 10000

# T'(n,m) needs n >= 40 and m >= 22 so that at least e_{m-1}, f_{m-1},
# g_{m-1} and M survive the removal step.
MIN_N_MODIFIED = 40
MIN_M_MODIFIED = 22


class Kind(str, Enum):
    BASE_A = "a"
    BASE_B = "b"
    BASE_C = "c"
    INTERNAL_E = "e"
    INTERNAL_F = "f"
    INTERNAL_G = "g"
    LINE = "p"


BASE_KINDS = (Kind.BASE_C, Kind.BASE_A, Kind.BASE_B)  # counterclockwise from A
INTERNAL_KINDS = (Kind.INTERNAL_E, Kind.INTERNAL_F, Kind.INTERNAL_G)


@dataclass(frozen=True, order=True)
class VertexLabel:
    kind: Kind
    index: int

    @property
    def is_base(self) -> bool:
        return self.kind in BASE_KINDS

    @property
    def is_internal(self) -> bool:
        return self.kind in INTERNAL_KINDS

    def __str__(self) -> str:
        return f"{self.kind.value}{self.index}"


def label(text: str) -> VertexLabel:
    """Parse a short label such as ``"c3"`` or ``"g24"``."""
    return VertexLabel(Kind(text[0]), int(text[1:]))


class Family(str, Enum):
    TETRA = "tetra"
    TETRA_MODIFIED = "tetra-mod"
    THREE_LINES = "lines"
    IMPORTED = "imported"


@dataclass(frozen=True, eq=False)
class Instance:
    """A labelled planar point set.

    ``labels[i]`` names vertex ``i`` and ``coords[i]`` is its position.
    Corner and centre aliases (``b_n == c_0`` and so on) resolve through
    ``aliases`` to the single stored label.
    """

    family: Family
    params: tuple
    labels: tuple[VertexLabel, ...]
    coords: np.ndarray
    gamma: float | None = None
    i0: int | None = None
    aliases: Mapping[VertexLabel, VertexLabel] = field(default_factory=dict)
    name: str = ""
    tsplib_scale: int = DEFAULT_SCALE
    forced: bool = False

    def __post_init__(self) -> None:
        coords = np.array(self.coords, dtype=float).reshape(-1, 2)
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        if len(self.labels) != len(coords):
            raise ValueError("labels and coords differ in length")
        if not np.all(np.isfinite(coords)):
            raise ValueError("coordinates must be finite")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    @property
    def is_tetra(self) -> bool:
        return self.family in (Family.TETRA, Family.TETRA_MODIFIED)

    @property
    def n(self) -> int:
        return int(self.params[0])

    @property
    def m(self) -> int:
        if not self.is_tetra:
            raise AttributeError("m is defined for tetrahedron families only")
        return int(self.params[1])

    @cached_property
    def _positions(self) -> dict[VertexLabel, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def index(self, lab: VertexLabel | str) -> int:
        if isinstance(lab, str):
            lab = label(lab)
        lab = self.aliases.get(lab, lab)
        return self._positions[lab]

    def __contains__(self, lab: VertexLabel | str) -> bool:
        try:
            self.index(lab)
        except KeyError:
            return False
        return True

    def point(self, lab: VertexLabel | str) -> np.ndarray:
        return self.coords[self.index(lab)]

    def dist(self, u: VertexLabel | str, v: VertexLabel | str) -> float:
        p, q = self.point(u), self.point(v)
        return math.hypot(p[0] - q[0], p[1] - q[1])

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        """Exact Euclidean distances, shape (N, N)."""
        diff = self.coords[:, None, :] - self.coords[None, :, :]
        d = np.hypot(diff[..., 0], diff[..., 1])
        d.setflags(write=False)
        return d

    @cached_property
    def base_indices(self) -> np.ndarray:
        """Indices of base vertices in counterclockwise order from A."""
        return np.array([i for i, lab in enumerate(self.labels) if lab.is_base], dtype=np.intp)

    @cached_property
    def internal_mask(self) -> np.ndarray:
        return np.array([lab.is_internal for lab in self.labels], dtype=bool)


def gamma(n: float, m: float) -> float:
    """Spacing of consecutive internal vertices, n / (sqrt(3) m)."""
    if m < 1:
        raise PreconditionError(f"m must be >= 1, got {m}")
    return n / (SQRT3 * m)


def removal_threshold(gam: float) -> float:
    """Internal vertices closer than this to a corner are dropped in T'."""
    if gam <= 0:
        raise PreconditionError("gamma must be positive")
    return max(10.0, 4.0 + 4.0 * gam)


def i0_index(n: int, m: int) -> int:
    """Smallest j with dist(A, e_j) = j*gamma >= threshold.

    Vertices exactly at the threshold are kept. Returns ``m + 1`` when no
    internal vertex survives (only possible for sub-threshold instances).
    """
    _check_tetra_params(n, m)
    gam = gamma(n, m)
    thr = removal_threshold(gam)
    j = max(1, math.ceil(thr / gam - 1e-9))
    while j > 1 and (j - 1) * gam >= thr - GEOM_TOL:
        j -= 1
    while j <= m and j * gam < thr - GEOM_TOL:
        j += 1
    return j


def _check_tetra_params(n: int, m: int) -> None:
    if int(n) != n or int(m) != m:
        raise PreconditionError("n and m must be integers")
    if n < 2:
        raise PreconditionError(f"n must be >= 2 (degenerate geometry), got {n}")
    if m < 1:
        raise PreconditionError(f"m must be >= 1 (degenerate geometry), got {m}")


def tetra_point(kind: Kind, i: int, n: int, m: int) -> tuple[float, float]:
    if kind is Kind.BASE_A:
        return (n - i / 2, i * SQRT3 / 2)
    if kind is Kind.BASE_B:
        return (n / 2 - i / 2, (n - i) * SQRT3 / 2)
    if kind is Kind.BASE_C:
        return (float(i), 0.0)
    if kind is Kind.INTERNAL_E:
        return (i * n / (2 * m), i * n / (2 * SQRT3 * m))
    if kind is Kind.INTERNAL_F:
        return (n - i * n / (2 * m), i * n / (2 * SQRT3 * m))
    if kind is Kind.INTERNAL_G:
        return (n / 2, n * SQRT3 / 2 - i * n / (SQRT3 * m))
    raise ValueError(f"not a tetrahedron label kind: {kind}")


def _tetra_aliases(n: int, m: int, with_center: bool) -> dict[VertexLabel, VertexLabel]:
    A = VertexLabel(Kind.BASE_C, 0)
    B = VertexLabel(Kind.BASE_A, 0)
    C = VertexLabel(Kind.BASE_B, 0)
    aliases = {
        VertexLabel(Kind.BASE_B, n): A,
        VertexLabel(Kind.INTERNAL_E, 0): A,
        VertexLabel(Kind.BASE_C, n): B,
        VertexLabel(Kind.INTERNAL_F, 0): B,
        VertexLabel(Kind.BASE_A, n): C,
        VertexLabel(Kind.INTERNAL_G, 0): C,
    }
    if with_center:
        M = VertexLabel(Kind.INTERNAL_G, m)
        aliases[VertexLabel(Kind.INTERNAL_E, m)] = M
        aliases[VertexLabel(Kind.INTERNAL_F, m)] = M
    return aliases


def _tetra_coords(kind: Kind, idx: np.ndarray, n: int, m: int) -> np.ndarray:
    # same operation order as tetra_point, so results are bit-identical
    i = idx.astype(float)
    if kind is Kind.BASE_A:
        x, y = n - i / 2, i * SQRT3 / 2
    elif kind is Kind.BASE_B:
        x, y = n / 2 - i / 2, (n - i) * SQRT3 / 2
    elif kind is Kind.BASE_C:
        x, y = i, np.zeros_like(i)
    elif kind is Kind.INTERNAL_E:
        x, y = i * n / (2 * m), i * n / (2 * SQRT3 * m)
    elif kind is Kind.INTERNAL_F:
        x, y = n - i * n / (2 * m), i * n / (2 * SQRT3 * m)
    else:
        x, y = np.full_like(i, n / 2), n * SQRT3 / 2 - i * n / (SQRT3 * m)
    return np.column_stack([x, y])


def _tetra_instance(n: int, m: int, first_internal: int, family: Family, forced: bool) -> Instance:
    labels: list[VertexLabel] = []
    blocks: list[np.ndarray] = []
    for kind in BASE_KINDS:
        labels.extend(VertexLabel(kind, i) for i in range(n))
        blocks.append(_tetra_coords(kind, np.arange(n), n, m))
    for kind in INTERNAL_KINDS:
        top = m if kind is Kind.INTERNAL_G else m - 1
        idx = np.arange(first_internal, top + 1)
        labels.extend(VertexLabel(kind, int(j)) for j in idx)
        blocks.append(_tetra_coords(kind, idx, n, m))
    points = np.concatenate(blocks)
    with_center = first_internal <= m
    name = f"{family.value}_{n}_{m}"
    return Instance(
        family=family,
        params=(n, m),
        labels=tuple(labels),
        coords=points,
        gamma=gamma(n, m),
        i0=first_internal if family is Family.TETRA_MODIFIED else None,
        aliases=_tetra_aliases(n, m, with_center),
        name=name,
        forced=forced,
    )


def build_tetrahedron(n: int, m: int) -> Instance:
    """The tetrahedron instance T(n,m) with 3(n+m) - 2 vertices."""
    _check_tetra_params(n, m)
    return _tetra_instance(int(n), int(m), 1, Family.TETRA, forced=False)


def satisfies_size_assumption(n: int, m: int) -> bool:
    return n >= MIN_N_MODIFIED and m >= MIN_M_MODIFIED


def build_modified(n: int, m: int, *, force: bool = False, i0: int | None = None) -> Instance:
    """The modified instance T'(n,m): T(n,m) without internal vertices closer
    than ``removal_threshold(gamma)`` to a corner.

    Requires n >= 40 and m >= 22. ``force=True`` lifts that requirement for
    drawing small examples; such instances carry ``forced=True`` and the
    optimality results do not apply to them. With ``force`` an explicit
    ``i0`` may also override the first retained internal index.
    """
    _check_tetra_params(n, m)
    if not force and not satisfies_size_assumption(n, m):
        raise PreconditionError(
            f"T'({n},{m}) requires n >= {MIN_N_MODIFIED} and m >= {MIN_M_MODIFIED} "
            "(size assumption for the modified instances); use force=True for drawing only"
        )
    if i0 is not None and not force:
        raise PreconditionError("an explicit i0 is only accepted together with force=True")
    if i0 is None:
        first = _first_retained(int(n), int(m))
    else:
        if not 1 <= i0 <= m + 1:
            raise PreconditionError(f"i0 must lie in [1, m+1], got {i0}")
        first = int(i0)
    return _tetra_instance(int(n), int(m), first, Family.TETRA_MODIFIED, forced=bool(force))


def _first_retained(n: int, m: int) -> int:
    # Applies the removal rule literally: distance to the nearest corner.
    thr = removal_threshold(gamma(n, m))
    corners = [tetra_point(Kind.BASE_C, 0, n, m), tetra_point(Kind.BASE_A, 0, n, m),
               tetra_point(Kind.BASE_B, 0, n, m)]
    for j in range(1, m + 1):
        x, y = tetra_point(Kind.INTERNAL_E, j, n, m)
        nearest = min(math.hypot(x - cx, y - cy) for cx, cy in corners)
        if nearest >= thr - GEOM_TOL:
            return j
    return m + 1


def build_three_lines(n: int, d: float) -> Instance:
    """P(n,d): n unit-spaced points on each of three parallel lines at spacing d.

    All three rows start at x = 0.
    """
    if int(n) != n or n < 1:
        raise PreconditionError(f"n must be a positive integer, got {n}")
    if not d > 0 or not math.isfinite(d):
        raise PreconditionError(f"line distance d must be positive, got {d}")
    n = int(n)
    labels = tuple(VertexLabel(Kind.LINE, k) for k in range(3 * n))
    xs = np.tile(np.arange(n, dtype=float), 3)
    ys = np.repeat(np.array([0.0, d, 2 * d]), n)
    name = f"{Family.THREE_LINES.value}_{n}_{format(float(d), 'g').replace('.', 'p')}"
    return Instance(
        family=Family.THREE_LINES,
        params=(n, float(d)),
        labels=labels,
        coords=np.column_stack([xs, ys]),
        name=name,
    )


def select_nm(N: int) -> tuple[int, int]:
    """The (n, m) split of N vertices that makes T(n,m) hardest for exact solvers."""
    if int(N) != N or N % 3 != 1 or N < 50:
        raise PreconditionError(f"N must satisfy N = 1 (mod 3) and N >= 50, got {N}")
    N = int(N)
    n = (3 * N - 40) // 10
    m = (N + 2) // 3 - n
    return n, m


def from_points(points, name: str = "points", scale: int = DEFAULT_SCALE) -> Instance:
    """Wrap an arbitrary point array as an imported instance."""
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    labels = tuple(VertexLabel(Kind.LINE, k) for k in range(len(pts)))
    return Instance(Family.IMPORTED, (), labels, pts, name=name, tsplib_scale=scale)
