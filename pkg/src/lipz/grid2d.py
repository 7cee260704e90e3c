"""Bijections of Z^2: shears, unimodular maps, translations, and compositions.

Z^2 carries the L1 (grid graph) metric. A linear map ``[a, b, c, d]`` sends
``(x, y)`` to ``(a*x + b*y, c*x + d*y)``. Compositions apply right to left.

Window scans are vectorized with numpy over int64 coordinates; counts and
maxima are integers, so results stay exact.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

import numpy as np

from .zline import _frac_str


@dataclass(frozen=True)
class IntFunction:
    """g(x) = slope*x + offset + table[x], table finitely supported."""

    slope: int = 0
    offset: int = 0
    table: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        clean = tuple(sorted((x, d) for x, d in dict(self.table).items() if d != 0))
        object.__setattr__(self, "table", clean)

    def __call__(self, x):
        out = self.slope * x + self.offset
        for x0, d in self.table:
            out = out + d * (x == x0)
        return out

    def __add__(self, other: "IntFunction") -> "IntFunction":
        merged = dict(self.table)
        for x, d in other.table:
            merged[x] = merged.get(x, 0) + d
        return IntFunction(self.slope + other.slope, self.offset + other.offset, tuple(merged.items()))

    def __neg__(self) -> "IntFunction":
        return IntFunction(-self.slope, -self.offset, tuple((x, -d) for x, d in self.table))

    def to_json(self) -> dict:
        return {"slope": self.slope, "offset": self.offset, "table": [[x, d] for x, d in self.table]}


@dataclass(frozen=True)
class Shear:
    """(x, y) -> (x, y + g(x))."""

    g: IntFunction

    def apply(self, x, y):
        return x, y + self.g(x)

    def inverse(self) -> "Shear":
        return Shear(-self.g)


@dataclass(frozen=True)
class Linear:
    m: tuple[int, int, int, int]

    def __post_init__(self):
        object.__setattr__(self, "m", tuple(self.m))
        a, b, c, d = self.m
        if a * d - b * c not in (1, -1):
            raise ValueError(f"m: determinant must be +-1, got {a * d - b * c}")

    def apply(self, x, y):
        a, b, c, d = self.m
        return a * x + b * y, c * x + d * y

    def inverse(self) -> "Linear":
        a, b, c, d = self.m
        det = a * d - b * c
        return Linear((det * d, -det * b, -det * c, det * a))


@dataclass(frozen=True)
class Translation:
    t: tuple[int, int]

    def __post_init__(self):
        object.__setattr__(self, "t", tuple(self.t))

    def apply(self, x, y):
        return x + self.t[0], y + self.t[1]

    def inverse(self) -> "Translation":
        return Translation((-self.t[0], -self.t[1]))


@dataclass(frozen=True)
class Composition:
    maps: tuple["GridMap", ...]

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))

    def apply(self, x, y):
        for f in reversed(self.maps):
            x, y = f.apply(x, y)
        return x, y

    def inverse(self) -> "Composition":
        return Composition(tuple(f.inverse() for f in reversed(self.maps)))


GridMap = Union[Shear, Linear, Translation, Composition]


def grid_identity() -> Linear:
    return Linear((1, 0, 0, 1))


def apply(F: GridMap, p: tuple[int, int]) -> tuple[int, int]:
    x, y = F.apply(int(p[0]), int(p[1]))
    return int(x), int(y)


def inverse(F: GridMap) -> GridMap:
    return F.inverse()


def _ints(obj, name: str, length: int | None = None) -> list[int]:
    if not isinstance(obj, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in obj):
        raise ValueError(f"{name}: must be a list of integers")
    if length is not None and len(obj) != length:
        raise ValueError(f"{name}: expected {length} integers, got {len(obj)}")
    return obj


def grid_from_json(obj, path: str = "map") -> GridMap:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError(f"{path}.kind: missing field")
    kind = obj["kind"]
    if kind == "shear":
        g = obj.get("g")
        if not isinstance(g, dict):
            raise ValueError(f"{path}.g: must be an object")
        for key in ("slope", "offset"):
            if not isinstance(g.get(key, 0), int):
                raise ValueError(f"{path}.g.{key}: must be an integer")
        table = g.get("table", [])
        if not isinstance(table, list):
            raise ValueError(f"{path}.g.table: must be a list of [x, dy] pairs")
        for i, row in enumerate(table):
            _ints(row, f"{path}.g.table[{i}]", 2)
        if len({row[0] for row in table}) != len(table):
            raise ValueError(f"{path}.g.table: duplicate x")
        return Shear(IntFunction(g.get("slope", 0), g.get("offset", 0), tuple(map(tuple, table))))
    if kind == "linear":
        m = _ints(obj.get("m"), f"{path}.m", 4)
        try:
            return Linear(tuple(m))
        except ValueError as e:
            raise ValueError(f"{path}.{e}") from None
    if kind == "translation":
        return Translation(tuple(_ints(obj.get("t"), f"{path}.t", 2)))
    if kind == "composition":
        maps = obj.get("maps")
        if not isinstance(maps, list):
            raise ValueError(f"{path}.maps: must be a list")
        return Composition(tuple(grid_from_json(m, f"{path}.maps[{i}]") for i, m in enumerate(maps)))
    raise ValueError(f"{path}.kind: unknown kind {kind!r}")


def grid_to_json(F: GridMap) -> dict:
    if isinstance(F, Shear):
        return {"kind": "shear", "g": F.g.to_json()}
    if isinstance(F, Linear):
        return {"kind": "linear", "m": list(F.m)}
    if isinstance(F, Translation):
        return {"kind": "translation", "t": list(F.t)}
    return {"kind": "composition", "maps": [grid_to_json(f) for f in F.maps]}


@dataclass(frozen=True)
class GridWindowReport:
    n: int
    value: Fraction
    metric: str = "L1"
    inverse_value: Fraction | None = None

    def to_json(self) -> dict:
        out = {"n": self.n, "metric": self.metric, "value": _frac_str(self.value)}
        if self.inverse_value is not None:
            out["inverse_value"] = _frac_str(self.inverse_value)
        return out

    def csv_row(self) -> list[int]:
        return [self.n, self.value.numerator, self.value.denominator]


GRID_CSV_HEADER = ["n", "value_num", "value_den"]


def _box(n: int) -> tuple[np.ndarray, np.ndarray]:
    r = np.arange(-n, n + 1, dtype=np.int64)
    return np.meshgrid(r, r, indexing="ij")


def _max_adjacent_l1(F: GridMap, n: int) -> int:
    X, Y = _box(n)
    U, V = F.apply(X, Y)
    U, V = np.broadcast_to(U, X.shape), np.broadcast_to(V, X.shape)
    dx = np.abs(np.diff(U, axis=0)) + np.abs(np.diff(V, axis=0))
    dy = np.abs(np.diff(U, axis=1)) + np.abs(np.diff(V, axis=1))
    return int(max(dx.max(initial=0), dy.max(initial=0)))


def grid_lipschitz_window(F: GridMap, n: int) -> GridWindowReport:
    """Largest L1 image distance of an L1-adjacent pair in ``[-n, n]^2``, for F
    (``value``) and its inverse (``inverse_value``)."""
    return GridWindowReport(n, Fraction(_max_adjacent_l1(F, n)),
                            inverse_value=Fraction(_max_adjacent_l1(F.inverse(), n)))


def point_group() -> list[tuple[int, int, int, int]]:
    """The 8 signed permutation matrices, i.e. the linear isometries of (Z^2, L1)."""
    out = []
    for sx, sy in itertools.product((1, -1), repeat=2):
        out.append((sx, 0, 0, sy))
        out.append((0, sx, sy, 0))
    return out


def _minimax_translation(du: np.ndarray, dv: np.ndarray) -> tuple[int, int, int]:
    """Exact min over t of max_p |D(p) - t|_1, in rotated coordinates.

    With u = x + y, v = x - y the L1 norm is max(|u|, |v|), and t is a
    lattice point iff its u and v have equal parity.
    """
    umin, umax = int(du.min()), int(du.max())
    vmin, vmax = int(dv.min()), int(dv.max())
    best = None
    for u in range((umin + umax) // 2 - 1, (umin + umax) // 2 + 3):
        for v in range((vmin + vmax) // 2 - 1, (vmin + vmax) // 2 + 3):
            if (u - v) % 2:
                continue
            cost = max(umax - u, u - umin, vmax - v, v - vmin)
            if best is None or cost < best[0]:
                best = (cost, (u + v) // 2, (u - v) // 2)
    return best


def isometry_gap(F: GridMap, n: int) -> GridWindowReport:
    """L-infinity-over-window distance from F to the nearest isometry of Z^2.

    Minimizes, over the 8 point-group elements P and translations with
    ``|t|_inf <= 4n``, the quantity ``max_{p in [-n,n]^2} |F(p) - P p - t|_1``.
    """
    X, Y = _box(n)
    U, V = F.apply(X, Y)
    U, V = np.broadcast_to(U, X.shape).ravel(), np.broadcast_to(V, X.shape).ravel()
    X, Y = X.ravel(), Y.ravel()
    bound = 4 * n
    best = None
    for a, b, c, d in point_group():
        DX = U - (a * X + b * Y)
        DY = V - (c * X + d * Y)
        cost, tx, ty = _minimax_translation(DX + DY, DX - DY)
        if max(abs(tx), abs(ty)) > bound:
            cost = _boxed_gap(DX, DY, bound)
        if best is None or cost < best:
            best = cost
    return GridWindowReport(n, Fraction(best))


def _boxed_gap(DX: np.ndarray, DY: np.ndarray, bound: int) -> int:
    # fallback when the unconstrained optimum leaves the translation box
    best = None
    for tx in range(-bound, bound + 1):
        ax = np.abs(DX - tx)
        for ty in range(-bound, bound + 1):
            cost = int((ax + np.abs(DY - ty)).max())
            if best is None or cost < best:
                best = cost
    return best


def grid_folner_ratio(F: GridMap, n: int) -> GridWindowReport:
    """Exact ``|F(A_n) ∩ A_n| / |A_n|`` for the box ``A_n = [-n, n]^2``."""
    X, Y = _box(n)
    U, V = F.apply(X, Y)
    U, V = np.broadcast_to(U, X.shape), np.broadcast_to(V, X.shape)
    hits = int(np.count_nonzero((np.abs(U) <= n) & (np.abs(V) <= n)))
    return GridWindowReport(n, Fraction(hits, (2 * n + 1) ** 2))


def shear_linear(slope: int, offset: int = 0) -> Shear:
    return Shear(IntFunction(slope, offset))


def compose_grid(*maps: GridMap) -> Composition:
    return Composition(tuple(maps))


def shear_sum(s1: Shear, s2: Shear) -> Shear:
    return Shear(s1.g + s2.g)


def window_points(n: int) -> Sequence[tuple[int, int]]:
    return list(itertools.product(range(-n, n + 1), repeat=2))
