"""Bijections of the integer line: representation, group operations, Lipschitz constants.

A map is stored as ``x -> orientation * x + offset + r(x)`` where the residual
``r`` has finite support. Everything is exact; no floats are involved.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence


class InvalidMap(ValueError):
    """Base class for rejected map candidates."""


class Collision(InvalidMap):
    def __init__(self, x1: int, x2: int, image: int):
        self.x1, self.x2, self.image = x1, x2, image
        super().__init__(f"residual: points {x1} and {x2} both map to {image}")


class Gap(InvalidMap):
    def __init__(self, y: int):
        self.y = y
        super().__init__(f"residual: integer {y} has no preimage")


class DegenerateWindow(ValueError):
    pass


def _frac_str(q: Fraction) -> str:
    return f"{q.numerator}/{q.denominator}"


def parse_rational(text: str) -> Fraction:
    """Parse ``"p/q"`` or an integer string into a Fraction."""
    text = text.strip()
    if "/" in text:
        num, den = text.split("/", 1)
        return Fraction(int(num), int(den))
    return Fraction(int(text))


@dataclass(frozen=True)
class EventuallyAffineMap:
    orientation: int
    offset: int
    residual: tuple[tuple[int, int], ...] = ()
    _table: dict = field(default_factory=dict, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        self._table.update(self.residual)

    def __call__(self, x: int) -> int:
        return self.orientation * x + self.offset + self._table.get(x, 0)

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(x for x, _ in self.residual)

    def scan_interval(self) -> tuple[int, int]:
        """Closed interval outside which the map agrees with its affine tail
        and cannot collide with the perturbed region."""
        if not self.residual:
            return (0, 0)
        m = max(abs(r) for _, r in self.residual)
        return (self.residual[0][0] - m - 1, self.residual[-1][0] + m + 1)

    def to_json(self) -> dict:
        return {
            "orientation": self.orientation,
            "offset": self.offset,
            "residual": [[x, r] for x, r in self.residual],
        }

    @classmethod
    def from_json(cls, obj) -> "EventuallyAffineMap":
        if not isinstance(obj, dict):
            raise ValueError("map: expected a JSON object")
        for key in ("orientation", "offset", "residual"):
            if key not in obj:
                raise ValueError(f"{key}: missing field")
        orientation = obj["orientation"]
        if orientation not in (1, -1) or isinstance(orientation, bool):
            raise ValueError(f"orientation: must be 1 or -1, got {orientation!r}")
        offset = obj["offset"]
        if not isinstance(offset, int) or isinstance(offset, bool):
            raise ValueError(f"offset: must be an integer, got {offset!r}")
        table = obj["residual"]
        if not isinstance(table, list):
            raise ValueError("residual: must be a list of [x, r] pairs")
        pairs = []
        for i, entry in enumerate(table):
            if (not isinstance(entry, list) or len(entry) != 2
                    or not all(isinstance(v, int) and not isinstance(v, bool) for v in entry)):
                raise ValueError(f"residual[{i}]: must be a pair of integers, got {entry!r}")
            pairs.append((entry[0], entry[1]))
        xs = [x for x, _ in pairs]
        if xs != sorted(set(xs)):
            raise ValueError("residual: keys must be strictly increasing")
        if any(r == 0 for _, r in pairs):
            raise ValueError("residual: zero entries are not allowed")
        return validate_bijection(orientation, offset, pairs)


def _canonical(orientation: int, offset: int, table: Iterable[tuple[int, int]]) -> EventuallyAffineMap:
    # trusted path: caller guarantees bijectivity
    residual = tuple(sorted((x, r) for x, r in table if r != 0))
    return EventuallyAffineMap(orientation, offset, residual)


def validate_bijection(orientation: int, offset: int, residual) -> EventuallyAffineMap:
    """Build a canonical map, raising Collision or Gap if it is not a bijection of Z.

    ``residual`` may be a mapping or an iterable of ``(x, r)`` pairs; zero
    entries are dropped.
    """
    if orientation not in (1, -1):
        raise ValueError(f"orientation: must be 1 or -1, got {orientation!r}")
    items = list(residual.items()) if isinstance(residual, dict) else list(residual)
    keys = [x for x, _ in items]
    if len(set(keys)) != len(keys):
        raise ValueError("residual: duplicate keys")
    f = _canonical(orientation, offset, items)
    if not f.residual:
        return f
    lo, hi = f.scan_interval()
    seen: dict[int, int] = {}
    for x in range(lo, hi + 1):
        y = f(x)
        if y in seen:
            raise Collision(seen[y], x, y)
        seen[y] = x
    # the affine tail covers everything outside orientation*[lo, hi] + offset
    a, b = sorted((orientation * lo + offset, orientation * hi + offset))
    for y in range(a, b + 1):
        if y not in seen:
            raise Gap(y)
    return f


def identity() -> EventuallyAffineMap:
    return EventuallyAffineMap(1, 0)


def shift(c: int) -> EventuallyAffineMap:
    return EventuallyAffineMap(1, c)


def reflection(c: int = 0) -> EventuallyAffineMap:
    return EventuallyAffineMap(-1, c)


def transposition(a: int, b: int) -> EventuallyAffineMap:
    return validate_bijection(1, 0, {a: b - a, b: a - b})


def from_permutation(start: int, images: Sequence[int], orientation: int = 1, offset: int = 0) -> EventuallyAffineMap:
    """Map acting as the permutation ``start + i -> images[i]`` on a window,
    followed by ``y -> orientation * y + offset``."""
    if sorted(images) != list(range(start, start + len(images))):
        raise ValueError("images: not a permutation of the window")
    table = {start + i: orientation * (y - (start + i)) for i, y in enumerate(images)}
    return _canonical(orientation, offset, table.items())


def evaluate(f: EventuallyAffineMap, x: int) -> int:
    return f(x)


def invert(f: EventuallyAffineMap) -> EventuallyAffineMap:
    s, c = f.orientation, f.offset
    if not f.residual:
        return EventuallyAffineMap(s, -s * c)
    lo, hi = f.scan_interval()
    # tail of the inverse: y -> s*y - s*c
    table = ((f(x), x - (s * f(x) - s * c)) for x in range(lo, hi + 1))
    return _canonical(s, -s * c, table)


def compose(f: EventuallyAffineMap, g: EventuallyAffineMap) -> EventuallyAffineMap:
    """Return ``x -> f(g(x))``."""
    s = f.orientation * g.orientation
    c = f.orientation * g.offset + f.offset
    xs = set(g.support)
    if f.residual:
        g_inv = invert(g)
        xs.update(g_inv(y) for y in f.support)
    return _canonical(s, c, ((x, f(g(x)) - s * x - c) for x in xs))


@dataclass(frozen=True)
class LipschitzProfile:
    forward: Fraction
    backward: Fraction
    empirical: bool = False

    @property
    def C(self) -> Fraction:
        return self.forward * self.backward

    def to_json(self) -> dict:
        return {
            "forward": _frac_str(self.forward),
            "backward": _frac_str(self.backward),
            "C": _frac_str(self.C),
            "empirical": self.empirical,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LipschitzProfile":
        prof = cls(parse_rational(obj["forward"]), parse_rational(obj["backward"]), bool(obj.get("empirical", False)))
        if "C" in obj and parse_rational(obj["C"]) != prof.C:
            raise ValueError("C: does not equal forward * backward")
        return prof


def _max_adjacent_gap(f: EventuallyAffineMap) -> int:
    if not f.residual:
        return 1
    lo, hi = f.residual[0][0] - 1, f.residual[-1][0]
    return max(1, max(abs(f(x + 1) - f(x)) for x in range(lo, hi + 1)))


def lipschitz_profile(f: EventuallyAffineMap) -> LipschitzProfile:
    """Exact Lipschitz constants of ``f`` and its inverse.

    On Z the supremum over all pairs is attained on adjacent pairs, and the
    adjacent gap is 1 away from the residual support.
    """
    return LipschitzProfile(Fraction(_max_adjacent_gap(f)), Fraction(_max_adjacent_gap(invert(f))))


@dataclass(frozen=True)
class WindowSample:
    start: int
    values: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))
        if len(set(self.values)) != len(self.values):
            raise ValueError("values: entries must be pairwise distinct")

    @classmethod
    def of(cls, f: EventuallyAffineMap, a: int, b: int) -> "WindowSample":
        return cls(a, tuple(f(x) for x in range(a, b + 1)))

    def to_json(self) -> dict:
        return {"start": self.start, "values": list(self.values)}

    @classmethod
    def from_json(cls, obj) -> "WindowSample":
        if not isinstance(obj, dict):
            raise ValueError("window: expected a JSON object")
        start = obj.get("start")
        if not isinstance(start, int) or isinstance(start, bool):
            raise ValueError(f"start: must be an integer, got {start!r}")
        values = obj.get("values")
        if not isinstance(values, list) or not all(isinstance(v, int) and not isinstance(v, bool) for v in values):
            raise ValueError("values: must be a list of integers")
        return cls(start, tuple(values))


def window_lipschitz(w: WindowSample) -> LipschitzProfile:
    """Lipschitz constants observed on a window; lower bounds for any extension."""
    v = w.values
    if len(v) < 2:
        raise DegenerateWindow(f"window of length {len(v)}; need at least 2 points")
    forward = max(abs(b - a) for a, b in zip(v, v[1:]))
    order = sorted(range(len(v)), key=v.__getitem__)
    backward = max(Fraction(abs(j - i), v[j] - v[i]) for i, j in zip(order, order[1:]))
    return LipschitzProfile(Fraction(forward), backward, empirical=True)
