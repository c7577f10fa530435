"""The l-vector order on base ring monomials.

``l_vector(p)`` is the n*r-tuple flagging, for each column x = i < n, the row
of the topmost north step; coordinates run column by column with rows in
descending order inside a column.  Base ring monomials are compared by
degree, then by the summed l-vector, then by a factor-wise tie-break.

Which direction "lexicographically precedes" means is left open as a
:class:`Convention`:

* ``HI`` -- the vector with the larger entry at the first difference precedes;
* ``LO`` -- the vector with the smaller entry at the first difference precedes.

Under either convention, ``M > M'`` when ``l(M)`` precedes ``l(M')``.  On an
l-sum tie the factor lists are sorted so that earlier factors precede later
ones, and at the first position where they differ the monomial whose factor
is preceded by the other's factor is the greater one.
"""

from __future__ import annotations

import enum
from typing import Sequence

from .lattice import LatticePath, embed_squarefree

__all__ = [
    "Convention",
    "LESS",
    "EQUAL",
    "GREATER",
    "l_vector",
    "l_sum",
    "format_l_vector",
    "path_from_l_vector",
    "compare_l",
    "compare_L_matroid",
    "precedes",
]

LESS, EQUAL, GREATER = -1, 0, 1


class Convention(str, enum.Enum):
    HI = "HI"
    LO = "LO"

    def __str__(self) -> str:
        return self.value


def l_vector(p: LatticePath) -> tuple[int, ...]:
    n, r = p.n, p.r
    vec = [0] * (n * r)
    y = 0
    for i, d in enumerate(p.columns[:n]):
        y += d
        if d:
            # top step ends at row y; rows descend inside a column block
            vec[i * r + (r - y)] = 1
    return tuple(vec)


def path_from_l_vector(vec: Sequence[int], n: int, r: int) -> LatticePath:
    """Recover a single path from its l-vector; column n absorbs the rest."""
    if len(vec) != n * r:
        raise ValueError(f"expected {n * r} entries, got {len(vec)}")
    steps = []
    y = 0
    for i in range(n):
        block = vec[i * r : (i + 1) * r]
        ones = [k for k, v in enumerate(block) if v]
        if len(ones) > 1 or any(v not in (0, 1) for v in block):
            raise ValueError(f"column {i} of {tuple(vec)} is not a single-path block")
        if ones:
            top = r - ones[0]
            if top <= y:
                raise ValueError(f"column {i} top {top} is not above height {y}")
            steps.append("N" * (top - y))
            y = top
        steps.append("E")
    steps.append("N" * (r - y))
    return LatticePath("".join(steps))


def l_sum(factors: Sequence[LatticePath], n: int | None = None, r: int | None = None):
    """Componentwise sum of the factors' l-vectors.

    The empty product needs ``n`` and ``r`` to know its length.
    """
    if not factors:
        if n is None or r is None:
            raise ValueError("empty product needs explicit (n, r)")
        return (0,) * (n * r)
    shape = factors[0].shape
    for f in factors:
        if f.shape != shape:
            raise ValueError(f"mixed dimensions: {shape} vs {f.shape}")
    if (n is not None and n != shape[0]) or (r is not None and r != shape[1]):
        raise ValueError(f"factors end at {shape}, expected {(n, r)}")
    total = [0] * (shape[0] * shape[1])
    for f in factors:
        for k, v in enumerate(l_vector(f)):
            total[k] += v
    return tuple(total)


def format_l_vector(vec: Sequence[int]) -> str:
    return "(" + ",".join(str(v) for v in vec) + ")"


def _lex(a: Sequence[int], b: Sequence[int]) -> int:
    for x, y in zip(a, b):
        if x != y:
            return GREATER if x > y else LESS
    return EQUAL


def precedes(a: Sequence[int], b: Sequence[int], convention: Convention = Convention.HI) -> bool:
    """Strict "lexicographically precedes" under ``convention``."""
    c = _lex(a, b)
    return c == GREATER if convention is Convention.HI else c == LESS


def _sorted_factors(factors: Sequence[LatticePath], convention: Convention):
    # Earlier factors precede later ones; the step word settles equal l-vectors.
    sign = -1 if convention is Convention.HI else 1
    return sorted(factors, key=lambda p: (tuple(sign * v for v in l_vector(p)), p.steps))


def compare_l(
    M: Sequence[LatticePath],
    M2: Sequence[LatticePath],
    convention: Convention = Convention.HI,
) -> int:
    """Compare two base ring monomials given as factor-path lists.

    Returns ``GREATER`` (1), ``EQUAL`` (0) or ``LESS`` (-1).
    """
    convention = Convention(convention)
    shapes = {p.shape for p in list(M) + list(M2)}
    if len(shapes) > 1:
        raise ValueError(f"mixed dimensions: {sorted(shapes)}")
    if len(M) != len(M2):
        return GREATER if len(M) > len(M2) else LESS
    if not M:
        return EQUAL
    n, r = shapes.pop()
    s1, s2 = l_sum(M, n, r), l_sum(M2, n, r)
    if s1 != s2:
        return GREATER if precedes(s1, s2, convention) else LESS
    a, b = _sorted_factors(M, convention), _sorted_factors(M2, convention)
    for sigma, tau in zip(a, b):
        if sigma != tau:
            la, lb = l_vector(sigma), l_vector(tau)
            if la == lb:
                # distinct paths with equal l-vectors cannot share (n, r)
                return GREATER if tau.steps < sigma.steps else LESS
            return GREATER if precedes(lb, la, convention) else LESS
    return EQUAL


def compare_L_matroid(
    M: Sequence[LatticePath],
    M2: Sequence[LatticePath],
    convention: Convention = Convention.HI,
) -> int:
    """Matroid base ring order: compare after embedding every basis path."""
    return compare_l(
        [embed_squarefree(p) for p in M], [embed_squarefree(p) for p in M2], convention
    )
