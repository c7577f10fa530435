"""North/east lattice paths from the origin to (n, r).

Steps are numbered from 1 (``N(sigma)`` is a set of step positions) while
columns are numbered from 0, so that column ``i`` carries the exponent of
``x_i`` in the path monomial.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

from .monomial import Monomial

__all__ = [
    "LatticePath",
    "BoundingPair",
    "PathParseError",
    "parse_path",
    "path_from_heights",
    "path_from_columns",
    "path_from_north_set",
    "parse_north_set",
    "format_north_set",
    "north_set",
    "path_monomial",
    "lies_above",
    "plus_shift",
    "is_coloop_free",
    "embed_squarefree",
    "enumerate_paths",
    "free_pair",
    "all_paths",
]


class PathParseError(ValueError):
    def __init__(self, message: str, position: int | None = None):
        super().__init__(message)
        self.position = position


@dataclass(frozen=True)
class LatticePath:
    steps: str

    def __post_init__(self):
        if not self.steps or set(self.steps) - {"N", "E"}:
            raise PathParseError(f"not a step word: {self.steps!r}")

    @cached_property
    def n(self) -> int:
        return self.steps.count("E")

    @cached_property
    def r(self) -> int:
        return self.steps.count("N")

    @cached_property
    def east_heights(self) -> tuple[int, ...]:
        """y-coordinate of the k-th east step, k = 1..n (stored 0-based)."""
        heights = []
        y = 0
        for s in self.steps:
            if s == "N":
                y += 1
            else:
                heights.append(y)
        return tuple(heights)

    @cached_property
    def north_positions(self) -> tuple[int, ...]:
        return tuple(k for k, s in enumerate(self.steps, start=1) if s == "N")

    @cached_property
    def columns(self) -> tuple[int, ...]:
        """North-step counts per column x = 0..n."""
        cols = [0] * (self.n + 1)
        x = 0
        for s in self.steps:
            if s == "E":
                x += 1
            else:
                cols[x] += 1
        return tuple(cols)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n, self.r)

    def __str__(self) -> str:
        return self.steps


@dataclass(frozen=True)
class BoundingPair:
    alpha: LatticePath
    omega: LatticePath

    def __post_init__(self):
        if self.alpha.shape != self.omega.shape:
            raise ValueError(
                f"alpha ends at {self.alpha.shape}, omega at {self.omega.shape}"
            )
        if not lies_above(self.alpha, self.omega):
            raise ValueError(f"{self.alpha} does not lie above {self.omega}")

    @classmethod
    def parse(cls, alpha: str, omega: str) -> "BoundingPair":
        return cls(parse_path(alpha), parse_path(omega))

    @property
    def n(self) -> int:
        return self.alpha.n

    @property
    def r(self) -> int:
        return self.alpha.r

    def __str__(self) -> str:
        return f"({self.alpha}, {self.omega})"


def parse_path(text: str) -> LatticePath:
    if not text:
        raise PathParseError("empty path", position=0)
    for pos, ch in enumerate(text, start=1):
        if ch not in "NE":
            raise PathParseError(
                f"unexpected character {ch!r} at position {pos} in {text!r}", position=pos
            )
    return LatticePath(text)


def path_from_heights(heights, r: int) -> LatticePath:
    """Build the path whose k-th east step sits at ``heights[k-1]``."""
    steps = []
    y = 0
    for h in heights:
        if h < y or h > r:
            raise ValueError(f"heights {tuple(heights)} are not a path to height {r}")
        steps.append("N" * (h - y) + "E")
        y = h
    steps.append("N" * (r - y))
    return LatticePath("".join(steps))


def path_from_columns(columns) -> LatticePath:
    """Inverse of ``LatticePath.columns``."""
    return LatticePath("E".join("N" * c for c in columns))


def path_from_north_set(north, n: int, r: int) -> LatticePath:
    north = set(north)
    if len(north) != r or any(k < 1 or k > n + r for k in north):
        raise ValueError(f"{sorted(north)} is not a north set for a path to ({n}, {r})")
    return LatticePath("".join("N" if k in north else "E" for k in range(1, n + r + 1)))


def parse_north_set(text: str) -> tuple[int, ...]:
    s = text.strip()
    if not re.fullmatch(r"\{\s*(\d+\s*(,\s*\d+\s*)*)?\}", s):
        raise ValueError(f"bad N-set: {text!r}")
    body = s[1:-1].strip()
    return tuple(sorted(int(tok) for tok in body.split(","))) if body else ()


def format_north_set(north) -> str:
    return "{" + ",".join(str(k) for k in sorted(north)) + "}"


def north_set(p: LatticePath) -> tuple[int, ...]:
    return p.north_positions


def path_monomial(p: LatticePath) -> Monomial:
    """m(p): the exponent of x_i counts the north steps on the line x = i."""
    return Monomial(p.columns)


def lies_above(a: LatticePath, b: LatticePath) -> bool:
    if a.shape != b.shape:
        raise ValueError(f"paths end at different points: {a.shape} vs {b.shape}")
    return all(x >= y for x, y in zip(a.east_heights, b.east_heights))


def plus_shift(p: LatticePath) -> LatticePath:
    """Drop the last east step and prepend one."""
    if p.steps[-1] != "E":
        raise ValueError(f"{p} ends with a north step")
    k = p.steps.rindex("E")
    return LatticePath("E" + p.steps[:k] + p.steps[k + 1 :])


def is_coloop_free(bp: BoundingPair) -> bool:
    return not set(bp.alpha.north_positions) & set(bp.omega.north_positions)


def embed_squarefree(p: LatticePath) -> LatticePath:
    """The path to (n + r, r) with north set {a_1 + 1, ..., a_r + r}."""
    shifted = [a + k for k, a in enumerate(p.north_positions, start=1)]
    return path_from_north_set(shifted, p.n + p.r, p.r)


def enumerate_paths(bp: BoundingPair) -> list[LatticePath]:
    """All paths between the bounds, ordered lexicographically by east heights."""
    lo = bp.omega.east_heights
    hi = bp.alpha.east_heights
    n, r = bp.n, bp.r
    out: list[LatticePath] = []
    heights: list[int] = []

    def extend(k: int, floor: int) -> None:
        if k == n:
            out.append(path_from_heights(heights, r))
            return
        for h in range(max(floor, lo[k]), hi[k] + 1):
            heights.append(h)
            extend(k + 1, h)
            heights.pop()

    extend(0, 0)
    return out


def free_pair(n: int, r: int) -> BoundingPair:
    """Bounds N^r E^n over E^n N^r: every path to (n, r) lies between them."""
    return BoundingPair(LatticePath("N" * r + "E" * n), LatticePath("E" * n + "N" * r))


def all_paths(n: int, r: int) -> list[LatticePath]:
    return enumerate_paths(free_pair(n, r))
