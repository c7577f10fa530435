"""Array kernel for the S-pair audit.

Terms of degree d are rows of sorted basis indices.  One reduction step
rewrites the first factor pair (in (0,1), (0,2), ..., (d-2,d-1) order) that is
a generator lead, using the first generator with that lead; this is the same
choice :class:`lattice_toric.toric._Reducer` makes, so normal forms agree
with the scalar route.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

# rows still changing after this many vectorized passes go to the scalar
# cache, which detects loops exactly
_VECTOR_PASSES = 256


def _encode(rows: np.ndarray, base: int) -> np.ndarray:
    code = np.zeros(rows.shape[0], dtype=np.int64)
    for c in range(rows.shape[1]):
        code = code * base + rows[:, c]
    return code


def _decode(codes: np.ndarray, d: int, base: int) -> np.ndarray:
    rows = np.empty((codes.shape[0], d), dtype=np.int64)
    rest = codes.copy()
    for c in range(d - 1, -1, -1):
        rows[:, c] = rest % base
        rest //= base
    return rows


class FastReducer:
    def __init__(self, n_bases: int, leads, trails, scalar_cache):
        self.base = n_bases
        self.lead_to_gen = np.full(n_bases * n_bases, -1, dtype=np.int64)
        for k in range(len(leads) - 1, -1, -1):
            a, b = leads[k]
            self.lead_to_gen[a * n_bases + b] = k
        self.trails = np.asarray(trails, dtype=np.int64).reshape(-1, 2)
        self.scalar = scalar_cache

    def step(self, rows: np.ndarray):
        """One rewrite on every row; returns (new rows, changed mask)."""
        n, d = rows.shape
        gen = np.full(n, -1, dtype=np.int64)
        which = np.full(n, -1, dtype=np.int64)
        pairs = list(combinations(range(d), 2))
        for k, (p, q) in enumerate(pairs):
            open_ = gen < 0
            if not open_.any():
                break
            g = self.lead_to_gen[rows[:, p] * self.base + rows[:, q]]
            hit = open_ & (g >= 0)
            gen[hit] = g[hit]
            which[hit] = k
        changed = gen >= 0
        if not changed.any():
            return rows, changed
        sub = rows[changed]
        w = which[changed]
        keep_cols = [[c for c in range(d) if c not in pr] for pr in pairs]
        keep = np.asarray(keep_cols, dtype=np.int64)[w] if d > 2 else np.zeros((len(w), 0), np.int64)
        kept = np.take_along_axis(sub, keep, axis=1)
        new = np.concatenate([kept, self.trails[gen[changed]]], axis=1)
        new.sort(axis=1)
        out = rows.copy()
        out[changed] = new
        return out, changed

    def normal_forms(self, codes: np.ndarray, d: int):
        """Normal-form codes for unique ``codes`` of degree d, plus a loop mask."""
        rows = _decode(codes, d, self.base)
        active = np.ones(len(codes), dtype=bool)
        for _ in range(_VECTOR_PASSES):
            idx = np.flatnonzero(active)
            if idx.size == 0:
                break
            new, changed = self.step(rows[idx])
            rows[idx] = new
            active[idx[~changed]] = False
        looped = np.zeros(len(codes), dtype=bool)
        for k in np.flatnonzero(active):
            term = tuple(int(x) for x in rows[k])
            nf = self.scalar(term)
            rows[k] = nf
            looped[k] = term in self.scalar.cyclic
        return _encode(rows, self.base), looped


# pairs handled per vectorized block in the S-pair generation
_BLOCK_PAIRS = 1 << 20


_NETWORKS = {
    2: ((0, 1),),
    3: ((0, 1), (1, 2), (0, 1)),
    4: ((0, 1), (2, 3), (0, 2), (1, 3), (1, 2)),
}


def _sorted_code(cols, base: int) -> np.ndarray:
    """Encode the rows formed by ``cols`` after sorting each row."""
    cols = list(cols)
    for i, j in _NETWORKS[len(cols)]:
        cols[i], cols[j] = np.minimum(cols[i], cols[j]), np.maximum(cols[i], cols[j])
    code = cols[0].copy()
    for c in cols[1:]:
        code *= base
        code += c
    return code


def spair_codes(leads: np.ndarray, trails: np.ndarray, U: np.ndarray, V: np.ndarray, base: int):
    """S-pair terms of generator pairs (U[k], V[k]), grouped by degree.

    Returns ``{degree: (mask, P codes, Q codes)}`` and the coprime count.
    """
    a1, a2 = leads[U, 0], leads[U, 1]
    b1, b2 = trails[U, 0], trails[U, 1]
    c1, c2 = leads[V, 0], leads[V, 1]
    d1, d2 = trails[V, 0], trails[V, 1]
    e11, e12, e21, e22 = a1 == c1, a1 == c2, a2 == c1, a2 == c2
    both = e11 & e22
    one_11 = e11 & ~both
    one_12 = e12 & ~both & ~one_11
    one_21 = e21 & ~both & ~one_11 & ~one_12
    one_22 = e22 & ~both & ~one_11 & ~one_12 & ~one_21
    one = one_11 | one_12 | one_21 | one_22
    none = ~(both | one)
    out = {}
    if both.any():
        # S = d - b
        m = both
        out[2] = (m, _sorted_code((d1[m], d2[m]), base), _sorted_code((b1[m], b2[m]), base))
    if one.any():
        # L/c = rem_a, L/a = rem_c; S = rem_a * d - rem_c * b
        m = one
        rem_a = np.where(one_11 | one_12, a2, a1)[m]
        rem_c = np.where(one_11 | one_21, c2, c1)[m]
        out[3] = (m, _sorted_code((rem_a, d1[m], d2[m]), base),
                  _sorted_code((rem_c, b1[m], b2[m]), base))
    if none.any():
        m = none
        out[4] = (m, _sorted_code((a1[m], a2[m], d1[m], d2[m]), base),
                  _sorted_code((c1[m], c2[m], b1[m], b2[m]), base))
    return out, int(none.sum())


def _pair_blocks(G: int):
    """(U, V) index arrays covering all u < v, about _BLOCK_PAIRS at a time."""
    u0 = 0
    while u0 < G - 1:
        u1, total = u0, 0
        while u1 < G - 1 and (total == 0 or total + G - 1 - u1 <= _BLOCK_PAIRS):
            total += G - 1 - u1
            u1 += 1
        us = np.arange(u0, u1, dtype=np.int64)
        counts = G - 1 - us
        U = np.repeat(us, counts)
        starts = np.repeat(np.cumsum(counts) - counts, counts)
        V = U + 1 + (np.arange(total, dtype=np.int64) - starts)
        yield U, V
        u0 = u1


def audit_spairs(n_bases: int, leads, trails, scalar_cache):
    """Reduce every S-pair of the generators.

    Returns ``(pairs, zeros, coprime, bad)`` where ``bad`` maps a degree to
    arrays ``(U, V, P, Q, nfP, nfQ, looped)`` describing the S-pairs whose
    sides have different normal forms (or whose rewriting loops).
    """
    leads = np.asarray(leads, dtype=np.int64).reshape(-1, 2)
    trails = np.asarray(trails, dtype=np.int64).reshape(-1, 2)
    base = max(n_bases, 1)
    G = leads.shape[0]
    collected: dict[int, list] = {2: [], 3: [], 4: []}
    coprime = 0
    for U, V in _pair_blocks(G):
        groups, cp = spair_codes(leads, trails, U, V, base)
        coprime += cp
        for deg, (mask, P, Q) in groups.items():
            collected[deg].append((U[mask], V[mask], P, Q))
    reducer = FastReducer(n_bases, [tuple(x) for x in leads.tolist()],
                          trails.tolist(), scalar_cache)
    pairs = G * (G - 1) // 2
    zeros = 0
    bad = {}
    for deg, parts in collected.items():
        if not parts:
            continue
        U = np.concatenate([p[0] for p in parts])
        V = np.concatenate([p[1] for p in parts])
        P = np.concatenate([p[2] for p in parts])
        Q = np.concatenate([p[3] for p in parts])
        same = P == Q
        zeros += int(same.sum())
        U, V, P, Q = U[~same], V[~same], P[~same], Q[~same]
        uniq, inv = np.unique(np.concatenate([P, Q]), return_inverse=True)
        nf, looped = reducer.normal_forms(uniq, deg)
        m = len(P)
        nfP, nfQ = nf[inv[:m]], nf[inv[m:]]
        loop = looped[inv[:m]] | looped[inv[m:]]
        ok = (nfP == nfQ) & ~loop
        zeros += int(ok.sum())
        sel = ~ok
        if sel.any():
            order = np.lexsort((V[sel], U[sel]))
            bad[deg] = tuple(x[sel][order] for x in (U, V, P, Q, nfP, nfQ, loop))
    return pairs, zeros, coprime, bad


def decode_row(code: int, d: int, base: int) -> tuple:
    return tuple(int(x) for x in _decode(np.asarray([code], dtype=np.int64), d, base)[0])


def products(codes: np.ndarray, d: int, base: int, bases: np.ndarray) -> np.ndarray:
    """Toric images (exponent rows) of encoded terms."""
    rows = _decode(codes, d, base)
    return bases[rows].sum(axis=1)
