"""Toric map, symmetric exchange binomials and the Groebner audit.

Base ring monomials are sorted tuples of basis indices (see
:mod:`lattice_toric.exchange`); every binomial has coefficients +1 and -1, so
polynomials are handled as ``collections.Counter`` objects with integer
coefficients.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import NamedTuple, Sequence

from .exchange import (
    ExchangeGraph,
    _graph_from_vertices,
    all_fibers,
    connect_path,
    descent_move,
    greedy_thin_vertex,
    sort_key,
    vertex_product,
    vertex_text,
)
from .monomial import Monomial, format_monomial
from .order import Convention
from .polymatroid import InvariantViolation, PolymatroidInstance

__all__ = [
    "ExchangeBinomial",
    "Certificate",
    "ReductionResult",
    "NormalFormCache",
    "toric_image",
    "exchange_binomials",
    "binomial_text",
    "term_text",
    "decompose_kernel_binomial",
    "s_pair",
    "reduce_binomial",
    "buchberger_check",
    "audit_fiber",
    "verify_white_up_to",
]


def toric_image(inst: PolymatroidInstance, M: Sequence[int]) -> Monomial:
    return vertex_product(inst, M)


def term_text(inst: PolymatroidInstance, M: Sequence[int]) -> str:
    if not M:
        return "1"
    return "*".join("Y{" + format_monomial(inst.bases[k]) + "}" for k in M)


class ExchangeBinomial(NamedTuple):
    positive: tuple
    negative: tuple
    move: tuple  # (i, j) applied to the positive pair in index order

    def lead(self, inst: PolymatroidInstance, convention=Convention.HI) -> tuple[tuple, tuple]:
        """(leading term, trailing term) under the l-order."""
        if sort_key(inst, self.positive, convention) > sort_key(inst, self.negative, convention):
            return self.positive, self.negative
        return self.negative, self.positive


def binomial_text(inst: PolymatroidInstance, P: Sequence[int], Q: Sequence[int]) -> str:
    return f"{term_text(inst, P)} - {term_text(inst, Q)}"


def exchange_binomials(inst: PolymatroidInstance) -> list[ExchangeBinomial]:
    """One binomial per unordered basis pair and non-degenerate exchange."""
    seen = set()
    out = []
    for a in range(len(inst.bases)):
        for b in range(a + 1, len(inst.bases)):
            for i, j, a2, b2 in inst.exchanges(a, b):
                new = (a2, b2) if a2 <= b2 else (b2, a2)
                if new == (a, b):
                    continue
                key = ((a, b), new) if (a, b) < new else (new, (a, b))
                if key in seen:
                    continue
                seen.add(key)
                out.append(ExchangeBinomial((a, b), new, (i, j)))
    return out


def _binomial_table(binomials) -> dict:
    table = {}
    for k, f in enumerate(binomials):
        table.setdefault(frozenset((f.positive, f.negative)), k)
    return table


def _expand(terms) -> Counter:
    total: Counter = Counter()
    for cof, f, sign in terms:
        total[tuple(sorted(cof + f.positive))] += sign
        total[tuple(sorted(cof + f.negative))] -= sign
    return Counter({k: v for k, v in total.items() if v})


@dataclass
class Certificate:
    V: tuple
    W: tuple
    terms: list = field(default_factory=list)  # (cofactor, ExchangeBinomial, sign)

    def expand(self) -> Counter:
        return _expand(self.terms)

    def target(self) -> Counter:
        if self.V == self.W:
            return Counter()
        return Counter({self.V: 1, self.W: -1})

    def verify(self) -> bool:
        return self.expand() == self.target()

    def to_dict(self, inst: PolymatroidInstance) -> dict:
        return {
            "V": vertex_text(inst, self.V),
            "W": vertex_text(inst, self.W),
            "terms": [
                {
                    "sign": sign,
                    "cofactor": term_text(inst, cof),
                    "binomial": binomial_text(inst, f.positive, f.negative),
                }
                for cof, f, sign in self.terms
            ],
        }


def _certificate_from_steps(inst, V, W, steps, table, binomials) -> Certificate:
    cert = Certificate(tuple(V), tuple(W))
    for src, dst, (pa, pb, _, _) in steps:
        pair = (src[pa], src[pb])
        cof = tuple(k for pos, k in enumerate(src) if pos not in (pa, pb))
        rest = list(dst)
        for k in cof:
            rest.remove(k)
        other = tuple(sorted(rest))
        k = table.get(frozenset((pair, other)))
        if k is None:
            raise InvariantViolation(
                f"step {vertex_text(inst, src)} -> {vertex_text(inst, dst)} is not an exchange binomial"
            )
        f = binomials[k]
        cert.terms.append((cof, f, 1 if f.positive == pair else -1))
    return cert


def decompose_kernel_binomial(
    inst: PolymatroidInstance,
    V,
    W,
    convention=Convention.HI,
    *,
    binomials=None,
    graph: ExchangeGraph | None = None,
    table: dict | None = None,
) -> Certificate:
    """Write M_V - M_W as a telescoping sum of multiples of exchange binomials.

    ``table`` is the lookup built from ``binomials``; pass it when issuing
    many certificates against the same generator list.
    """
    V, W = tuple(V), tuple(W)
    if binomials is None:
        binomials = exchange_binomials(inst)
    if table is None:
        table = _binomial_table(binomials)
    if graph is not None:
        steps = graph.steps(graph.walk(graph.index[V], graph.index[W], convention))
    else:
        steps = connect_path(inst, V, W, convention)
    cert = _certificate_from_steps(inst, V, W, steps, table, binomials)
    if not cert.verify():
        raise InvariantViolation(
            f"certificate for {vertex_text(inst, V)} - {vertex_text(inst, W)} does not expand back",
            {"instance": inst.describe(), "certificate": cert.to_dict(inst)},
        )
    return cert


# -- S-pairs and reduction ---------------------------------------------------


def _lcm(a: Sequence[int], b: Sequence[int]) -> tuple:
    ca, cb = Counter(a), Counter(b)
    return tuple(sorted((ca | cb).elements()))


def _quotient(L: Sequence[int], a: Sequence[int]) -> tuple:
    c = Counter(L)
    c.subtract(a)
    if any(v < 0 for v in c.values()):
        raise ValueError(f"{a} does not divide {L}")
    return tuple(sorted(c.elements()))


def s_pair(f: tuple, g: tuple):
    """S-polynomial of binomials given as (leading, trailing) term pairs.

    With f = a - b and g = c - d and L = lcm(a, c), returns
    (L/c * d, L/a * b) as the binomial ``L/c*d - L/a*b``, or None when the
    two terms cancel.
    """
    (a, b), (c, d) = f, g
    L = _lcm(a, c)
    P = tuple(sorted(_quotient(L, c) + tuple(d)))
    Q = tuple(sorted(_quotient(L, a) + tuple(b)))
    if P == Q:
        return None
    return P, Q


class _Reducer:
    """Lead-term lookup: the first generator whose lead divides a term."""

    def __init__(self, inst, generators, convention):
        self.inst = inst
        self.convention = Convention(convention)
        self.oriented = [f.lead(inst, convention) for f in generators]
        self.by_lead: dict[tuple, int] = {}
        for k, (lead, _) in enumerate(self.oriented):
            self.by_lead.setdefault(lead, k)

    def find(self, T: tuple):
        for pa in range(len(T)):
            for pb in range(pa + 1, len(T)):
                k = self.by_lead.get((T[pa], T[pb]))
                if k is not None:
                    return k, pa, pb
        return None

    def rewrite(self, T: tuple, hit) -> tuple[tuple, tuple]:
        k, pa, pb = hit
        cof = T[:pa] + T[pa + 1 : pb] + T[pb + 1 :]
        return cof, tuple(sorted(cof + self.oriented[k][1]))


@dataclass
class ReductionResult:
    normal_form: tuple | None  # (P, Q) or None for zero
    steps: list = field(default_factory=list)  # (side, cofactor, generator index)
    diagnostic: str | None = None

    @property
    def is_zero(self) -> bool:
        return self.normal_form is None and self.diagnostic is None


def reduce_binomial(
    inst: PolymatroidInstance,
    f: tuple,
    generators: Sequence[ExchangeBinomial],
    convention=Convention.HI,
    *,
    max_steps: int | None = None,
) -> ReductionResult:
    """Reduce ``P - Q`` by the generators' leading terms.

    The larger reducible term is rewritten first.  A term that revisits an
    earlier value means the rewriting is not descending; the reduction stops
    with a ``cycle`` diagnostic.  ``max_steps`` defaults to twice the fiber
    size.
    """
    P, Q = (tuple(sorted(x)) for x in f)
    if P == Q:
        return ReductionResult(None)
    red = _Reducer(inst, generators, convention)
    if max_steps is None:
        max_steps = 2 * len(_fiber_of(inst, P)) + 2
    terms = [P, Q]
    seen = [{P}, {Q}]
    steps = []
    while True:
        if terms[0] == terms[1]:
            return ReductionResult(None, steps)
        hits = [red.find(T) for T in terms]
        live = [s for s in (0, 1) if hits[s] is not None]
        if not live:
            return ReductionResult((terms[0], terms[1]), steps)
        side = max(live, key=lambda s: sort_key(inst, terms[s], convention))
        cof, new = red.rewrite(terms[side], hits[side])
        steps.append((side, cof, hits[side][0]))
        if new in seen[side]:
            return ReductionResult((terms[0], terms[1]), steps, "cycle")
        if len(steps) > max_steps:
            return ReductionResult((terms[0], terms[1]), steps, "step cap exceeded")
        seen[side].add(new)
        terms[side] = new


def _fiber_of(inst, T):
    from .exchange import fiber_vertices

    return fiber_vertices(inst, vertex_product(inst, T))


def replay_reduction(inst, f, generators, result: ReductionResult, convention=Convention.HI) -> Counter:
    """(P - Q) - sum of the recorded rewrites; equals the normal form."""
    red = _Reducer(inst, generators, convention)
    P, Q = (tuple(sorted(x)) for x in f)
    total = Counter({P: 1})
    total[Q] -= 1
    for side, cof, k in result.steps:
        lead, trail = red.oriented[k]
        sign = 1 if side == 0 else -1
        total[tuple(sorted(cof + lead))] -= sign
        total[tuple(sorted(cof + trail))] += sign
    return Counter({k: v for k, v in total.items() if v})


class NormalFormCache:
    """Memoized per-term normal forms under a fixed reducer choice.

    Because the reducer picked for a term depends only on the term, reducing
    both sides to their normal forms gives zero exactly when
    :func:`reduce_binomial` does.
    """

    def __init__(self, inst, generators, convention=Convention.HI):
        self.red = _Reducer(inst, generators, convention)
        self.nf: dict[tuple, tuple] = {}
        self.cyclic: set[tuple] = set()

    def __call__(self, T: tuple) -> tuple:
        hit_nf = self.nf.get(T)
        if hit_nf is not None:
            return hit_nf
        chain = []
        on_chain = set()
        cur = T
        while True:
            if cur in self.nf:
                result, looped = self.nf[cur], cur in self.cyclic
                break
            if cur in on_chain:
                # rewriting loops; every term on the chain is non-terminating
                result, looped = cur, True
                break
            chain.append(cur)
            on_chain.add(cur)
            hit = self.red.find(cur)
            if hit is None:
                result, looped = cur, False
                break
            cur = self.red.rewrite(cur, hit)[1]
        for x in chain:
            self.nf[x] = result
        if looped:
            self.cyclic.update(chain)
        return result


def buchberger_check(
    inst: PolymatroidInstance,
    convention=Convention.HI,
    *,
    binomials=None,
    max_examples: int = 1,
) -> dict:
    """Reduce every S-pair of the exchange binomials and tally the outcomes.

    Pairs with coprime leading terms are reduced like any other.  The
    reduction runs on the array kernel; ``reduce_binomial`` is the scalar
    reference it is tested against.  Failures are grouped by the fiber of
    the S-pair; each group lists its count, the distinct normal forms met
    and ``max_examples`` fully spelled-out pairs (generator indices refer
    to ``exchange_binomials(inst)``).
    """
    import numpy as np

    from ._fastgb import audit_spairs, decode_row, products

    convention = Convention(convention)
    if binomials is None:
        binomials = exchange_binomials(inst)
    oriented = [f.lead(inst, convention) for f in binomials]
    cache = NormalFormCache(inst, binomials, convention)
    base = max(len(inst.bases), 1)
    pairs, zeros, coprime, bad = audit_spairs(
        len(inst.bases), [o[0] for o in oriented], [o[1] for o in oriented], cache
    )
    basis_rows = np.asarray(inst.bases, dtype=np.int64).reshape(len(inst.bases), inst.width)
    groups = []
    failures = nonterminating = 0
    for deg in sorted(bad):
        U, V, P, Q, nP, nQ, loop = bad[deg]
        failures += int((~loop).sum())
        nonterminating += int(loop.sum())
        mus = products(P, deg, base, basis_rows)
        # one integer per product so grouping is a flat sort
        radix = deg * max(inst.rank, 1) + 1
        if radix ** mus.shape[1] < 2**62:
            flat = np.zeros(len(mus), dtype=np.int64)
            for c in range(mus.shape[1]):
                flat = flat * radix + mus[:, c]
            _, first, inv = np.unique(flat, return_index=True, return_inverse=True)
            uniq = mus[first]
        else:
            uniq, inv = np.unique(mus, axis=0, return_inverse=True)
        inv = inv.reshape(-1)
        by_group = np.argsort(inv, kind="stable")
        bounds = np.searchsorted(inv[by_group], np.arange(len(uniq) + 1))
        for g in range(len(uniq)):
            members = by_group[bounds[g] : bounds[g + 1]]
            forms = sorted({int(x) for x in np.concatenate([nP[members], nQ[members]])})
            examples = []
            for k in members[:max_examples]:
                u, v = int(U[k]), int(V[k])
                examples.append({
                    "pair": [u, v],
                    "f": binomial_text(inst, *oriented[u]),
                    "g": binomial_text(inst, *oriented[v]),
                    "s_pair": binomial_text(inst, decode_row(P[k], deg, base), decode_row(Q[k], deg, base)),
                    "normal_form": binomial_text(inst, decode_row(nP[k], deg, base), decode_row(nQ[k], deg, base)),
                    "nonterminating": bool(loop[k]),
                })
            groups.append({
                "mu": format_monomial(uniq[g]),
                "t": deg,
                "count": int(members.size),
                "normal_forms": [term_text(inst, decode_row(x, deg, base)) for x in forms],
                "examples": examples,
            })
    groups.sort(key=lambda x: (x["t"], x["mu"]))
    return {
        "generators": len(binomials),
        "pairs": pairs,
        "coprime_pairs": coprime,
        "zeros": zeros,
        "failures": failures,
        "nonterminating": nonterminating,
        "failing_fibers": groups,
    }


# -- fiber audit ---------------------------------------------------------------


def audit_fiber(
    g: ExchangeGraph,
    t: int,
    conventions=(Convention.HI,),
    *,
    binomials=None,
    certificates: bool = False,
    table: dict | None = None,
) -> dict:
    """Audit one fiber under each convention.

    Returns ``{convention: record}``; each record has the report fields plus
    ``hard`` (failed hard assertions) and ``soft`` (recorded anomalies).
    """
    inst = g.inst
    if certificates:
        if binomials is None:
            binomials = exchange_binomials(inst)
        if table is None:
            table = _binomial_table(binomials)
    comps = g.components()
    thin = g.thin()
    greedy = greedy_thin_vertex(inst, g.mu, t)
    brute = g.vertices[thin[0]] if len(thin) == 1 else None
    greedy_ok = greedy == brute and greedy is not None
    hard_common = []
    if len(comps) > 1:
        hard_common.append("disconnected")
    if len(thin) != 1:
        hard_common.append(f"{len(thin)} thin vertices")
    if not greedy_ok:
        hard_common.append("greedy thin vertex disagrees with brute force")
    descents = {}
    for u, V in enumerate(g.vertices):
        if u in thin:
            continue
        try:
            descents[u] = descent_move(inst, V, Convention.HI)
        except InvariantViolation as exc:
            descents[u] = exc
    out = {}
    for conv in conventions:
        conv = Convention(conv)
        hard = list(hard_common)
        soft = []
        sinks = g.sinks(conv)
        keys = g.keys(conv)
        non_descending = 0
        invalid = 0
        for u, res in descents.items():
            if isinstance(res, InvariantViolation):
                invalid += 1
                continue
            W = g.index[res.vertex]
            if not keys[u] > keys[W]:
                non_descending += 1
        if len(sinks) != 1:
            soft.append("non-unique sink")
        sink_is_thin = len(sinks) == 1 and sinks == thin
        if len(sinks) == 1 and not sink_is_thin:
            soft.append("unique sink is not thin")
        if non_descending:
            soft.append("descent move does not descend")
        if invalid:
            soft.append("descent move leaves the basis set")
        record = {
            "mu": format_monomial(g.mu),
            "t": t,
            "vertices": len(g.vertices),
            "edges": len(g.edges),
            "connected": len(comps) <= 1,
            "components": len(comps),
            "thin": [vertex_text(inst, g.vertices[u]) for u in thin],
            "greedy": vertex_text(inst, greedy) if greedy is not None else None,
            "greedy_matches": greedy_ok,
            "sinks": [vertex_text(inst, g.vertices[u]) for u in sinks],
            "unique_sink": len(sinks) == 1,
            "sink_is_thin": sink_is_thin,
            "non_thin_sinks": sum(1 for u in sinks if u not in thin),
            "descent_not_decreasing": non_descending,
            "descent_invalid": invalid,
        }
        if certificates and len(g.vertices) > 1 and len(comps) == 1:
            checked = 0
            for u in range(len(g.vertices)):
                for w in range(u + 1, len(g.vertices)):
                    try:
                        decompose_kernel_binomial(
                            inst, g.vertices[u], g.vertices[w], conv,
                            binomials=binomials, graph=g, table=table,
                        )
                        checked += 1
                    except InvariantViolation as exc:
                        hard.append(f"certificate failed: {exc}")
            record["certificates"] = checked
        record["hard"] = hard
        record["soft"] = soft
        out[conv] = record
    return out


def _audit_chunk(inst, items, conventions, binomials, certificate_t):
    table = _binomial_table(binomials)
    out = []
    for mu, vertices in items:
        t = len(vertices[0])
        g = _graph_from_vertices(inst, mu, vertices)
        recs = audit_fiber(
            g, t, conventions, binomials=binomials,
            certificates=(t in certificate_t), table=table,
        )
        dumps = {}
        for conv, rec in recs.items():
            if rec["hard"] or rec["soft"]:
                dumps[conv] = g.dump(conv)
        out.append((recs, dumps))
    return out


def verify_white_up_to(
    inst: PolymatroidInstance,
    t_max: int,
    conventions=(Convention.HI,),
    *,
    jobs: int = 1,
    certificate_t=(2,),
) -> dict:
    """Audit every nonempty fiber with 1 <= t <= t_max.

    Returns ``{convention: {"fibers": [...], "anomalies": [...], "hard": [...],
    "summary": {...}}}``; anomalous fibers carry a full replayable dump.
    """
    if t_max < 1:
        raise ValueError("t_max must be at least 1")
    conventions = [Convention(c) for c in conventions]
    binomials = exchange_binomials(inst)
    items = []
    for t in range(1, t_max + 1):
        items.extend(all_fibers(inst, t).items())
    if jobs > 1 and len(items) > 64:
        from concurrent.futures import ProcessPoolExecutor

        # strided chunks balance the large high-t fibers across workers
        chunks = [items[k::jobs * 4] for k in range(jobs * 4)]
        with ProcessPoolExecutor(jobs) as pool:
            parts = list(pool.map(
                _audit_chunk,
                *zip(*[(inst, c, conventions, binomials, certificate_t) for c in chunks]),
            ))
        order = {id(x): k for k, x in enumerate(items)}
        merged = [None] * len(items)
        for c, part in zip(chunks, parts):
            for item, res in zip(c, part):
                merged[order[id(item)]] = res
        results = merged
    else:
        results = _audit_chunk(inst, items, conventions, binomials, certificate_t)
    out = {}
    for conv in conventions:
        fibers, anomalies, hard = [], [], []
        summary = Counter()
        for recs, dumps in results:
            rec = dict(recs[conv])
            fibers.append(rec)
            summary["fibers"] += 1
            summary["vertices"] += rec["vertices"]
            summary["connected"] += rec["connected"]
            summary["single_thin"] += len(rec["thin"]) == 1
            summary["greedy_matches"] += rec["greedy_matches"]
            summary["unique_sink"] += rec["unique_sink"]
            summary["sink_is_thin"] += rec["sink_is_thin"]
            summary["non_unique_sink"] += not rec["unique_sink"]
            summary["unique_sink_not_thin"] += rec["unique_sink"] and not rec["sink_is_thin"]
            summary["descent_not_decreasing"] += rec["descent_not_decreasing"]
            summary["descent_invalid"] += rec["descent_invalid"]
            summary["certificates"] += rec.get("certificates", 0)
            if conv in dumps:
                entry = {"mu": rec["mu"], "t": rec["t"], "hard": rec["hard"],
                         "soft": rec["soft"], "dump": dumps[conv]}
                anomalies.append(entry)
                if rec["hard"]:
                    hard.append(entry)
        out[conv] = {
            "fibers": fibers,
            "anomalies": anomalies,
            "hard": hard,
            "summary": dict(sorted(summary.items())),
        }
    return out


def degree_two_spanning(inst: PolymatroidInstance, convention=Convention.HI) -> int:
    """Certificates for every vertex pair of every degree-2r fiber."""
    binomials = exchange_binomials(inst)
    table = _binomial_table(binomials)
    count = 0
    for mu, vertices in all_fibers(inst, 2).items():
        g = _graph_from_vertices(inst, mu, vertices)
        for u, w in combinations(range(len(vertices)), 2):
            decompose_kernel_binomial(inst, vertices[u], vertices[w], convention,
                                      binomials=binomials, graph=g, table=table)
            count += 1
    return count
