"""Rigidity analyzers for bijections of Z.

decompose() writes a map as ``sigma*x + const + r(x)`` with the smallest
possible sup|r| and compares it against ``C = ||f||_Lip * ||f^-1||_Lip``.
ray_profile() describes the image of a left ray ``(-inf, x]``, and
folner_ratio() measures how much of ``[-n, n]`` is mapped back into itself.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .zline import (
    DegenerateWindow,
    EventuallyAffineMap,
    LipschitzProfile,
    WindowSample,
    _frac_str,
    invert,
    lipschitz_profile,
    parse_rational,
    window_lipschitz,
)


class HypothesisNotMet(ValueError):
    pass


def midrange_const(lo: int, hi: int) -> int:
    """(lo + hi) / 2, exact halves rounded toward zero."""
    return int(Fraction(lo + hi, 2))


@dataclass(frozen=True)
class RigidityDecomposition:
    sigma: int
    const: int
    residual_sup: Fraction
    C: Fraction
    empirical: bool = False

    @property
    def conforms(self) -> bool:
        return self.residual_sup <= self.C

    def to_json(self) -> dict:
        out = {
            "sigma": self.sigma,
            "const": self.const,
            "residual_sup": _frac_str(self.residual_sup),
            "C": _frac_str(self.C),
            "conforms": self.conforms,
        }
        if self.empirical:
            out["empirical"] = True
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "RigidityDecomposition":
        dec = cls(int(obj["sigma"]), int(obj["const"]), parse_rational(obj["residual_sup"]),
                  parse_rational(obj["C"]), bool(obj.get("empirical", False)))
        if "conforms" in obj and obj["conforms"] != dec.conforms:
            raise ValueError("conforms: inconsistent with residual_sup and C")
        return dec


def _decompose_offsets(sigma: int, displacements: Iterable[int], C: Fraction, empirical: bool):
    ds = list(displacements)
    lo, hi = min(ds), max(ds)
    const = midrange_const(lo, hi)
    sup = Fraction(max(hi - const, const - lo))
    return RigidityDecomposition(sigma, const, sup, C, empirical)


def decompose(f: EventuallyAffineMap, profile: LipschitzProfile | None = None) -> RigidityDecomposition:
    if profile is None:
        profile = lipschitz_profile(f)
    # off the support f(x) - sigma*x is exactly the offset
    ds = [f.offset] + [f.offset + r for _, r in f.residual]
    return _decompose_offsets(f.orientation, ds, profile.C, empirical=False)


def decompose_window(w: WindowSample) -> RigidityDecomposition:
    v = w.values
    if len(v) < 2:
        raise DegenerateWindow(f"window of length {len(v)}; need at least 2 points")
    sigma = 1 if v[-1] > v[0] else -1
    ds = (y - sigma * (w.start + i) for i, y in enumerate(v))
    return _decompose_offsets(sigma, ds, window_lipschitz(w).C, empirical=True)


class RayCase(enum.Enum):
    BELOW = "below"  # image contains a ray to -infinity
    ABOVE = "above"


@dataclass(frozen=True)
class RayProfile:
    """Shape of ``f((-inf, x])``.

    For BELOW the indicator is 1 left of ``region_lo`` and 0 right of
    ``region_hi``; for ABOVE the other way round. An empty region is encoded
    as ``region_lo == region_hi + 1``.
    """

    x: int
    case: RayCase
    region_lo: int
    region_hi: int
    image_of_x: int
    C: Fraction

    @property
    def width(self) -> int:
        return max(0, self.region_hi - self.region_lo + 1)

    @property
    def centered(self) -> bool:
        if self.width == 0:
            return True
        half = self.C / 2
        return self.image_of_x - half <= self.region_lo and self.region_hi <= self.image_of_x + half

    @property
    def ray_bounds_hold(self) -> bool:
        """The two-sided ray inclusions with the exact floors/ceilings."""
        half = self.C / 2
        fx = self.image_of_x
        if self.case is RayCase.BELOW:
            # (-inf, floor(fx - C/2)] inside image inside (-inf, floor(fx + C/2)]
            return self.region_lo > math.floor(fx - half) and self.region_hi <= math.floor(fx + half)
        # [ceil(fx + C/2), inf) inside image inside [ceil(fx - C/2), inf)
        return self.region_hi < math.ceil(fx + half) and self.region_lo >= math.ceil(fx - half)

    @property
    def width_within_half_C(self) -> bool:
        return self.width <= math.ceil(self.C / 2)

    def to_json(self) -> dict:
        return {
            "x": self.x,
            "case": self.case.value,
            "region_lo": self.region_lo,
            "region_hi": self.region_hi,
            "width": self.width,
            "f_x": self.image_of_x,
            "C": _frac_str(self.C),
            "centered": self.centered,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RayProfile":
        prof = cls(int(obj["x"]), RayCase(obj["case"]), int(obj["region_lo"]), int(obj["region_hi"]),
                   int(obj["f_x"]), parse_rational(obj["C"]))
        if obj.get("width", prof.width) != prof.width:
            raise ValueError("width: inconsistent with region bounds")
        return prof


def ray_profile(f: EventuallyAffineMap, x: int, profile: LipschitzProfile | None = None) -> RayProfile:
    if profile is None:
        profile = lipschitz_profile(f)
    g = invert(f)
    # y lies in f((-inf, x]) iff g(y) <= x; off g's support g is affine, so
    # only the window around the support and the tail crossing point matters
    cross = f.orientation * x + f.offset
    pts = list(g.support) + [cross]
    lo, hi = min(pts) - 1, max(pts) + 1
    inside = [g(y) <= x for y in range(lo, hi + 1)]
    if f.orientation == 1:
        case = RayCase.BELOW
        first_out = next(i for i, b in enumerate(inside) if not b)
        last_in = max(i for i, b in enumerate(inside) if b)
        region = (lo + first_out, lo + last_in)
    else:
        case = RayCase.ABOVE
        first_in = next(i for i, b in enumerate(inside) if b)
        last_out = max(i for i, b in enumerate(inside) if not b)
        region = (lo + first_in, lo + last_out)
    return RayProfile(x, case, region[0], region[1], f(x), profile.C)


def ray_dichotomy_consistency(f: EventuallyAffineMap, xs: Sequence[int]) -> bool:
    profile = lipschitz_profile(f)
    cases = {ray_profile(f, x, profile).case for x in xs}
    expected = RayCase.BELOW if f.orientation == 1 else RayCase.ABOVE
    return cases <= {expected}


def displacement_check(f: EventuallyAffineMap, x1: int, x2: int, profile: LipschitzProfile | None = None) -> bool:
    """Check ``|sigma*(f(x2) - f(x1)) - (x2 - x1)| <= C`` for ``x2 - x1 > C``."""
    if profile is None:
        profile = lipschitz_profile(f)
    C = profile.C
    if x2 - x1 <= C:
        raise HypothesisNotMet(f"x2 - x1 = {x2 - x1} must exceed C = {C}")
    return abs(f.orientation * (f(x2) - f(x1)) - (x2 - x1)) <= C


@dataclass(frozen=True)
class FolnerReport:
    n: int
    intersection: int
    lower_bound: Fraction | None = None

    @property
    def window_size(self) -> int:
        return 2 * self.n + 1

    @property
    def ratio(self) -> Fraction:
        return Fraction(self.intersection, self.window_size)

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "window_size": self.window_size,
            "intersection": self.intersection,
            "ratio": _frac_str(self.ratio),
        }
        if self.lower_bound is not None:
            out["lower_bound"] = _frac_str(self.lower_bound)
        return out

    @classmethod
    def from_json(cls, obj: dict) -> "FolnerReport":
        lb = obj.get("lower_bound")
        rep = cls(int(obj["n"]), int(obj["intersection"]), None if lb is None else parse_rational(lb))
        if "ratio" in obj and parse_rational(obj["ratio"]) != rep.ratio:
            raise ValueError("ratio: inconsistent with intersection")
        return rep

    def csv_row(self) -> list[int]:
        return [self.n, self.intersection, self.ratio.numerator, self.ratio.denominator]


FOLNER_CSV_HEADER = ["n", "intersection", "ratio_num", "ratio_den"]


def folner_ratio(f: EventuallyAffineMap, n: int) -> FolnerReport:
    if n < 1:
        raise ValueError(f"n: must be positive, got {n}")
    return FolnerReport(n, sum(1 for x in range(-n, n + 1) if -n <= f(x) <= n))


def displacement_bound(f: EventuallyAffineMap) -> int:
    """Max |f(x) - sigma*x| over Z, i.e. distance to the isometry x -> sigma*x."""
    dec = decompose(f)
    return int(dec.residual_sup) + abs(dec.const)


def folner_curve(f: EventuallyAffineMap, ns: Sequence[int]) -> list[FolnerReport]:
    """Følner ratios for each n together with the bound ``1 - 2D/(2n+1)``.

    At most D points at each end of ``[-n, n]`` can leave the window when
    ``|f(x) - sigma*x| <= D``.
    """
    d = displacement_bound(f)
    out = []
    for n in ns:
        rep = folner_ratio(f, n)
        out.append(FolnerReport(n, rep.intersection, 1 - Fraction(2 * d, 2 * n + 1)))
    return out
