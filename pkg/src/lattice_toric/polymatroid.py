"""Lattice path polymatroids and matroids as explicit basis sets.

Bases are materialized eagerly.  Inside an instance every basis has an
integer index; indices follow the canonical factor order of the ``HI``
convention (l-vector descending), so a base ring monomial is simply a sorted
tuple of indices.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from math import comb

from .lattice import (
    BoundingPair,
    LatticePath,
    embed_squarefree,
    enumerate_paths,
    path_monomial,
)
from .monomial import Monomial
from .order import l_vector

__all__ = [
    "PolymatroidInstance",
    "InvariantViolation",
    "AxiomReport",
    "bases",
    "contains",
    "divisor_closure",
    "check_polymatroid_axioms",
    "symmetric_exchange_witness",
    "all_symmetric_exchanges",
    "degree_sequence",
    "matroid_h_vector",
    "independence_f_vector",
    "borel_closure",
]


class InvariantViolation(RuntimeError):
    """A property guaranteed by the theory failed; carries a dump payload."""

    def __init__(self, message: str, dump: dict | None = None):
        super().__init__(message)
        self.dump = dump or {}


class PolymatroidInstance:
    """Gamma(alpha, omega), or the lattice path matroid M(alpha, omega).

    For a matroid the instance is built over the squarefree embedding: its
    bases are the squarefree bases of Gamma(bar alpha, bar omega), which are
    exactly the monomials prod_{i in B} x_i of the matroid bases B.
    """

    def __init__(self, bounds: BoundingPair, *, squarefree: bool = False, source=None, label=None):
        self.bounds = bounds
        self.squarefree = squarefree
        self.source = source
        self.n = bounds.n
        self.rank = bounds.r
        self.width = bounds.n + 1
        paths = enumerate_paths(bounds)
        if squarefree:
            paths = [p for p in paths if max(p.columns) <= 1]
        ells = {p: l_vector(p) for p in paths}
        paths.sort(key=lambda p: (tuple(-v for v in ells[p]), p.steps))
        self.paths: tuple[LatticePath, ...] = tuple(paths)
        self.ell: tuple[tuple[int, ...], ...] = tuple(ells[p] for p in paths)
        self.bases: tuple[Monomial, ...] = tuple(path_monomial(p) for p in paths)
        self.heights: tuple[tuple[int, ...], ...] = tuple(p.east_heights for p in paths)
        self.index: dict[Monomial, int] = {m: k for k, m in enumerate(self.bases)}
        if len(self.index) != len(self.bases):
            raise InvariantViolation(f"two bounded paths share a monomial in {bounds}")
        self.label = label or self._default_label()
        self._exchange_cache: dict[tuple[int, int], tuple] = {}
        self._swap_cache: dict[tuple[int, int], tuple] = {}

    @classmethod
    def polymatroid(cls, alpha: str | LatticePath, omega: str | LatticePath) -> "PolymatroidInstance":
        return cls(_pair(alpha, omega))

    @classmethod
    def matroid(cls, alpha: str | LatticePath, omega: str | LatticePath) -> "PolymatroidInstance":
        bp = _pair(alpha, omega)
        embedded = BoundingPair(embed_squarefree(bp.alpha), embed_squarefree(bp.omega))
        return cls(embedded, squarefree=True, source=bp)

    def _default_label(self) -> str:
        if self.source is not None:
            return f"M({self.source.alpha},{self.source.omega})"
        return f"Gamma({self.bounds.alpha},{self.bounds.omega})"

    def __repr__(self) -> str:
        return f"<PolymatroidInstance {self.label}: {len(self.bases)} bases>"

    def __len__(self) -> int:
        return len(self.bases)

    def describe(self) -> dict:
        out = {
            "label": self.label,
            "alpha": self.bounds.alpha.steps,
            "omega": self.bounds.omega.steps,
            "kind": "matroid" if self.squarefree else "polymatroid",
            "bases": len(self.bases),
        }
        if self.source is not None:
            out["source_alpha"] = self.source.alpha.steps
            out["source_omega"] = self.source.omega.steps
        return out

    def __getstate__(self):
        return {"bounds": self.bounds, "squarefree": self.squarefree,
                "source": self.source, "label": self.label}

    def __setstate__(self, state):
        self.__init__(state["bounds"], squarefree=state["squarefree"],
                      source=state["source"], label=state["label"])

    def monomial(self, m) -> Monomial:
        """Coerce text or a vector to this instance's variable range."""
        from .monomial import parse_monomial

        if isinstance(m, str):
            return parse_monomial(m, self.width)
        return Monomial(m).padded(self.width)

    def basis_index(self, m) -> int:
        m = self.monomial(m)
        try:
            return self.index[m]
        except KeyError:
            raise ValueError(f"{m} is not a basis of {self.label}") from None

    def is_basis(self, m: Monomial) -> bool:
        return m in self.index

    @cached_property
    def divisor_closure(self) -> frozenset[Monomial]:
        return divisor_closure(self.bases)

    def exchanges(self, a: int, b: int) -> tuple:
        """Valid exchanges between bases ``a`` and ``b``.

        Entries are ``(i, j, a2, b2)``: ``x_j/x_i * m_a`` is basis ``a2`` and
        ``x_i/x_j * m_b`` is basis ``b2``; only ``d_i(m_a) > d_i(m_b)`` is
        enumerated, the mirrored exchanges give the same pairs.
        """
        key = (a, b)
        hit = self._exchange_cache.get(key)
        if hit is None:
            ma, mb = self.bases[a], self.bases[b]
            out = []
            down = [i for i in range(self.width) if ma[i] > mb[i]]
            up = [j for j in range(self.width) if ma[j] < mb[j]]
            for i in down:
                for j in up:
                    a2 = self.index.get(ma.shift(i, j))
                    if a2 is None:
                        continue
                    b2 = self.index.get(mb.shift(j, i))
                    if b2 is None:
                        continue
                    out.append((i, j, a2, b2))
            hit = self._exchange_cache[key] = tuple(out)
        return hit

    def swaps(self, a: int, b: int) -> tuple:
        """Unit swaps joining bases ``a``, ``b`` to a pair one exchange away.

        Same entry format as :meth:`exchanges`, but also includes swaps whose
        *reverse* is a symmetric exchange, since the exchange graph is
        undirected.  Every (i, j) is tried, so one orientation of the pair
        suffices.
        """
        key = (a, b)
        hit = self._swap_cache.get(key)
        if hit is None:
            ma, mb = self.bases[a], self.bases[b]
            out = []
            for i in range(self.width):
                if not ma[i]:
                    continue
                for j in range(self.width):
                    if j == i or not mb[j]:
                        continue
                    a2 = self.index.get(ma.shift(i, j))
                    if a2 is None:
                        continue
                    b2 = self.index.get(mb.shift(j, i))
                    if b2 is None:
                        continue
                    na, nb = self.bases[a2], self.bases[b2]
                    forward = ma[i] > mb[i] and ma[j] < mb[j]
                    backward = na[j] > nb[j] and na[i] < nb[i]
                    if forward or backward:
                        out.append((i, j, a2, b2))
            hit = self._swap_cache[key] = tuple(out)
        return hit


def _pair(alpha, omega) -> BoundingPair:
    if isinstance(alpha, str):
        return BoundingPair.parse(alpha, omega)
    return BoundingPair(alpha, omega)


def bases(bp: BoundingPair) -> set[Monomial]:
    monos = [path_monomial(p) for p in enumerate_paths(bp)]
    out = set(monos)
    assert len(out) == len(monos), "distinct bounded paths gave equal monomials"
    return out


def contains(inst: PolymatroidInstance, m) -> bool:
    """Membership in Gamma: ``m`` divides some basis."""
    m = inst.monomial(m)
    return any(all(a <= b for a, b in zip(m, basis)) for basis in inst.bases)


def divisor_closure(monomials) -> frozenset[Monomial]:
    seen: set[Monomial] = set()
    stack = list(monomials)
    while stack:
        m = stack.pop()
        if m in seen:
            continue
        seen.add(m)
        for i, e in enumerate(m):
            if e:
                stack.append(Monomial(m[:i] + (e - 1,) + m[i + 1 :]))
    return frozenset(seen)


@dataclass
class AxiomReport:
    ok: bool
    violation: dict | None = None


def check_polymatroid_axioms(S) -> AxiomReport:
    """Check divisor-closure and augmentation on a finite monomial set."""
    S = set(S)
    for m in sorted(S):
        for i, e in enumerate(m):
            if e and Monomial(m[:i] + (e - 1,) + m[i + 1 :]) not in S:
                missing = Monomial(m[:i] + (e - 1,) + m[i + 1 :])
                return AxiomReport(False, {"property": 1, "m": m, "missing": missing})
    by_degree: dict[int, list[Monomial]] = {}
    for m in S:
        by_degree.setdefault(m.degree, []).append(m)
    for deg in by_degree:
        by_degree[deg].sort()
    degrees = sorted(by_degree)
    for lo_pos, lo in enumerate(degrees):
        for hi in degrees[lo_pos + 1 :]:
            for m2 in by_degree[lo]:
                for m in by_degree[hi]:
                    if not any(
                        a > b and Monomial(m2[:i] + (b + 1,) + m2[i + 1 :]) in S
                        for i, (a, b) in enumerate(zip(m, m2))
                    ):
                        return AxiomReport(False, {"property": 2, "m": m, "m_prime": m2})
    return AxiomReport(True)


def all_symmetric_exchanges(inst: PolymatroidInstance, m, m2) -> list[tuple[int, int]]:
    """All (i, j) for which (x_j/x_i) m and (x_i/x_j) m2 are both bases."""
    m, m2 = inst.monomial(m), inst.monomial(m2)
    out = []
    for i in range(inst.width):
        if m[i] <= m2[i]:
            continue
        for j in range(inst.width):
            if m[j] < m2[j] and inst.is_basis(m.shift(i, j)) and inst.is_basis(m2.shift(j, i)):
                out.append((i, j))
    return out


def symmetric_exchange_witness(inst: PolymatroidInstance, m, m2, i: int):
    """Smallest j completing an exchange at i; returns ``(j, new_m, new_m2)``."""
    m, m2 = inst.monomial(m), inst.monomial(m2)
    if not (inst.is_basis(m) and inst.is_basis(m2)):
        raise ValueError(f"{m} and {m2} must both be bases of {inst.label}")
    if not m[i] > m2[i]:
        raise ValueError(f"need d_{i}(m) > d_{i}(m'), got {m[i]} <= {m2[i]}")
    for j in range(inst.width):
        if m[j] < m2[j]:
            a, b = m.shift(i, j), m2.shift(j, i)
            if inst.is_basis(a) and inst.is_basis(b):
                return j, a, b
    raise InvariantViolation(
        f"no exchange partner for i={i} between {m} and {m2} in {inst.label}",
        {"instance": inst.describe(), "m": str(m), "m_prime": str(m2), "i": i},
    )


def degree_sequence(inst: PolymatroidInstance) -> tuple[int, ...]:
    counts = [0] * (inst.rank + 1)
    for m in inst.divisor_closure:
        counts[m.degree] += 1
    return tuple(counts)


def independence_f_vector(bp: BoundingPair) -> tuple[int, ...]:
    """f_{k-1} = number of k-element independent sets of M(alpha, omega), k = 0..r."""
    indep: set[frozenset[int]] = set()
    for p in enumerate_paths(bp):
        north = p.north_positions
        for k in range(len(north) + 1):
            indep.update(frozenset(c) for c in combinations(north, k))
    counts = [0] * (bp.r + 1)
    for s in indep:
        counts[len(s)] += 1
    return tuple(counts)


def matroid_h_vector(bp: BoundingPair) -> tuple[int, ...]:
    """h-vector of the independence complex of M(alpha, omega).

    Expands sum_i f_{i-1} (x - 1)^(d - i) and reads off coefficients of
    x^(d - k); integer arithmetic throughout.
    """
    f = independence_f_vector(bp)
    d = bp.r
    h = []
    for k in range(d + 1):
        # coefficient of x^(d-k) in f_{i-1} (x-1)^(d-i) is f_{i-1} C(d-i, k-i) (-1)^(k-i)
        h.append(sum(f[i] * comb(d - i, k - i) * (-1) ** (k - i) for i in range(k + 1)))
    return tuple(h)


def borel_closure(m: Monomial) -> frozenset[Monomial]:
    """Close ``m`` under x_j -> x_i for i < j."""
    seen = {m}
    stack = [m]
    while stack:
        cur = stack.pop()
        for j, e in enumerate(cur):
            if not e:
                continue
            for i in range(j):
                nxt = cur.shift(j, i)
                if nxt not in seen:
                    seen.add(nxt)
                    stack.append(nxt)
    return frozenset(seen)
