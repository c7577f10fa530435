"""Report assembly for the audits: order sanity, fiber sweeps, S-pair checks.

Reports are plain dicts serialized with sorted keys, so two runs over the
same input give byte-identical JSON.  Anomalies carry dumps that
:func:`replay_fiber_dump` and :func:`replay_spair_example` can re-check
from scratch.
"""

from __future__ import annotations

import json
import os
import random
import re
import tempfile
from typing import Iterable, Sequence

from .exchange import (
    _graph_from_vertices,
    fiber_vertices,
    is_thin,
    parse_vertex,
    vertex_text,
)
from .lattice import BoundingPair
from .order import EQUAL, GREATER, LESS, Convention, compare_l
from .polymatroid import PolymatroidInstance
from .toric import (
    binomial_text,
    buchberger_check,
    exchange_binomials,
    reduce_binomial,
    term_text,
    verify_white_up_to,
)

__all__ = [
    "conventions_from",
    "instance_from_description",
    "order_audit",
    "sweep_report",
    "groebner_report",
    "replay_fiber_dump",
    "replay_spair_example",
    "parse_term",
    "dumps_json",
    "write_atomic",
]


def conventions_from(text) -> list[Convention]:
    """``"HI"``, ``"LO"``, ``"both"`` or an iterable of those."""
    if isinstance(text, str):
        if text.lower() == "both":
            return [Convention.HI, Convention.LO]
        return [Convention(text.upper())]
    return [Convention(c) for c in text]


def instance_from_description(desc: dict) -> PolymatroidInstance:
    """Rebuild the instance recorded by :meth:`PolymatroidInstance.describe`."""
    if desc.get("kind") == "matroid":
        inst = PolymatroidInstance.matroid(desc["source_alpha"], desc["source_omega"])
    else:
        inst = PolymatroidInstance(BoundingPair.parse(desc["alpha"], desc["omega"]))
    if desc.get("label"):
        inst.label = desc["label"]
    return inst


# -- JSON ------------------------------------------------------------------------


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1, ensure_ascii=False) + "\n"


def write_atomic(path: str, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# -- order audit -------------------------------------------------------------------


def _random_term(rng: random.Random, n_bases: int, max_degree: int) -> tuple:
    t = rng.randint(0, max_degree)
    return tuple(sorted(rng.randrange(n_bases) for _ in range(t)))


def order_audit(
    inst: PolymatroidInstance,
    conventions=(Convention.HI, Convention.LO),
    *,
    triples: int = 10_000,
    seed: int = 0,
    max_degree: int = 3,
    max_examples: int = 20,
) -> dict:
    """Sanity checks of the l-order on random base ring monomials.

    Every sample ``k`` draws (M, M', M'', Q) from ``random.Random(seed + k)``
    so each violation is reproducible from its recorded seed.  Checked:
    antisymmetry and totality (EQUAL only for equal terms), transitivity of
    every chain, that the unit is below every nonunit, and multiplicativity
    ``cmp(M, M') == cmp(M*Q, M'*Q)``.
    """
    paths = inst.paths
    n, r = inst.bounds.n, inst.bounds.r

    def cmp(a, b, conv):
        return compare_l([paths[k] for k in a], [paths[k] for k in b], conv)

    out = {}
    for conv in conventions_from(conventions):
        counts = {"antisymmetry": 0, "totality": 0, "transitivity": 0,
                  "unit_minimal": 0, "multiplicativity": 0}
        examples = {k: [] for k in counts}

        def note(kind, sample_seed, **terms):
            counts[kind] += 1
            if len(examples[kind]) < max_examples:
                examples[kind].append({
                    "seed": sample_seed,
                    **{k: term_text(inst, v) for k, v in terms.items()},
                })

        for k in range(triples):
            s = seed + k
            rng = random.Random(s)
            a, b, c, q = (_random_term(rng, len(inst.bases), max_degree) for _ in range(4))
            ab, ba = cmp(a, b, conv), cmp(b, a, conv)
            if ab != -ba:
                note("antisymmetry", s, M=a, M2=b)
            if (ab == EQUAL) != (a == b):
                note("totality", s, M=a, M2=b)
            bc, ac = cmp(b, c, conv), cmp(a, c, conv)
            if (ab == bc == GREATER and ac != GREATER) or (ab == bc == LESS and ac != LESS):
                note("transitivity", s, M=a, M2=b, M3=c)
            if a and cmp(a, (), conv) != GREATER:
                note("unit_minimal", s, M=a)
            aq = tuple(sorted(a + q))
            bq = tuple(sorted(b + q))
            if cmp(aq, bq, conv) != ab:
                note("multiplicativity", s, M=a, M2=b, Q=q)
        if cmp((), (), conv) != EQUAL:
            counts["unit_minimal"] += 1
        out[str(conv)] = {
            "convention": str(conv),
            "instance": inst.describe(),
            "dimensions": [n, r],
            "samples": triples,
            "seed": seed,
            "max_degree": max_degree,
            "violations": counts,
            "examples": examples,
        }
    return out


# -- sweeps ------------------------------------------------------------------------


def sweep_report(
    inst: PolymatroidInstance,
    t_max: int,
    conventions=(Convention.HI,),
    *,
    jobs: int = 1,
    certificate_t: Iterable[int] = (2,),
) -> dict:
    """Fiber sweep over 1 <= t <= t_max, one sub-report per convention."""
    convs = conventions_from(conventions)
    raw = verify_white_up_to(inst, t_max, convs, jobs=jobs, certificate_t=tuple(certificate_t))
    reports = {}
    for conv in convs:
        rep = raw[conv]
        reports[str(conv)] = {
            "convention": str(conv),
            "summary": rep["summary"],
            "fibers": rep["fibers"],
            "anomalies": rep["anomalies"],
            "hard_failures": len(rep["hard"]),
        }
    return {
        "instance": inst.describe(),
        "t_max": t_max,
        "reports": reports,
        "hard_failures": sum(r["hard_failures"] for r in reports.values()),
    }


def hard_failures(report: dict) -> list[dict]:
    """The anomalies of a sweep report that failed a hard assertion."""
    out = []
    for rep in report["reports"].values():
        out.extend(a for a in rep["anomalies"] if a["hard"])
    return out


def groebner_report(inst: PolymatroidInstance, conventions=(Convention.HI,), *, max_examples: int = 1) -> dict:
    convs = conventions_from(conventions)
    binomials = exchange_binomials(inst)
    reports = {}
    for conv in convs:
        res = buchberger_check(inst, conv, binomials=binomials, max_examples=max_examples)
        reports[str(conv)] = {"convention": str(conv), "buchberger": res}
    return {
        "instance": inst.describe(),
        "generators": [binomial_text(inst, f.positive, f.negative) for f in binomials],
        "reports": reports,
    }


# -- replay -----------------------------------------------------------------------


def replay_fiber_dump(dump: dict) -> list[str]:
    """Recompute a fiber dump from its instance and product.

    Returns the list of mismatches (empty when the dump replays exactly).
    """
    inst = instance_from_description(dump["instance"])
    vertices = [parse_vertex(inst, v) for v in dump["vertices"]]
    problems = []
    fresh = fiber_vertices(inst, dump["mu"])
    if sorted(fresh) != sorted(vertices):
        problems.append("vertex set differs")
        return problems
    g = _graph_from_vertices(inst, inst.monomial(dump["mu"]), vertices)
    conv = dump.get("convention")
    if conv is None:
        if sorted(map(tuple, dump["edges"])) != sorted((u, v) for u, v, _ in g.edges):
            problems.append("edges differ")
        return problems
    if sorted(map(tuple, dump["edges"])) != sorted(g.oriented_edges(conv)):
        problems.append("oriented edges differ")
    if dump["sinks"] != g.sinks(conv):
        problems.append("sinks differ")
    thin = [u for u, V in enumerate(vertices) if is_thin(inst, V)]
    if dump["thin"] != thin:
        problems.append("thin vertices differ")
    return problems


_TERM_RE = re.compile(r"Y\{([^}]*)\}")
_TERM_FULL = re.compile(r"Y\{[^}]*\}(\*Y\{[^}]*\})*")


def parse_term(inst: PolymatroidInstance, text: str) -> tuple:
    """Inverse of :func:`lattice_toric.toric.term_text`."""
    text = text.strip()
    if text == "1":
        return ()
    if not _TERM_FULL.fullmatch(text):
        raise ValueError(f"bad base ring monomial: {text!r}")
    return tuple(sorted(inst.basis_index(m) for m in _TERM_RE.findall(text)))


def _parse_binomial(inst, text: str) -> tuple[tuple, tuple]:
    left, sep, right = text.partition(" - ")
    if not sep:
        raise ValueError(f"bad binomial: {text!r}")
    return parse_term(inst, left), parse_term(inst, right)


def replay_spair_example(inst: PolymatroidInstance, example: dict, convention) -> list[str]:
    """Re-reduce a recorded S-pair with the scalar reducer."""
    binomials = exchange_binomials(inst)
    P, Q = _parse_binomial(inst, example["s_pair"])
    res = reduce_binomial(inst, (P, Q), binomials, convention)
    problems = []
    if example["nonterminating"]:
        if res.diagnostic is None:
            problems.append("recorded loop but reduction terminated")
        return problems
    if res.normal_form is None:
        problems.append("recorded failure but S-pair reduces to zero")
        return problems
    nf = _parse_binomial(inst, example["normal_form"])
    if set(nf) != set(res.normal_form):
        problems.append(
            f"normal form {binomial_text(inst, *res.normal_form)} != recorded {example['normal_form']}"
        )
    return problems


def fiber_text(inst: PolymatroidInstance, vertices: Sequence) -> list[str]:
    return [vertex_text(inst, V) for V in vertices]
