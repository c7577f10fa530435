"""Acceptance criteria 1 to 9, one test each.

Every test prints a ``criterion N: PASS|FAIL`` line with its wall time and
fails if it takes 60 s or more.  Reference values come from ``oracles``.
"""

import contextlib
import json
import time

from lattice_toric import cli
from lattice_toric.audit import (
    dumps_json,
    groebner_report,
    order_audit,
    replay_fiber_dump,
    replay_spair_example,
    sweep_report,
    write_atomic,
)
from lattice_toric.exchange import all_fibers, greedy_thin_vertex, vertex_text
from lattice_toric.lattice import (
    BoundingPair,
    all_paths,
    embed_squarefree,
    enumerate_paths,
    free_pair,
    is_coloop_free,
    north_set,
    parse_path,
    path_monomial,
    plus_shift,
)
from lattice_toric.monomial import Monomial, format_monomial, parse_monomial
from lattice_toric.polymatroid import (
    PolymatroidInstance,
    bases,
    borel_closure,
    check_polymatroid_axioms,
    degree_sequence,
    matroid_h_vector,
)
from lattice_toric.toric import verify_white_up_to

from oracles import (
    bases_ref,
    borel_ref,
    bounded_words,
    bounding_pairs,
    column_counts,
    connected_ref,
    degree_sequence_ref,
    dp_count,
    fibers_ref,
    h_vector_ref,
    heights_of,
    thin_brute,
)

LIMIT = 60.0
F1_ALPHA, F1_OMEGA = "NNENENEE", "EENENENN"
SIZES = [(n, r) for n in range(1, 5) for r in range(1, 5)]


@contextlib.contextmanager
def criterion(capsys, number, title):
    start = time.perf_counter()
    status, note = "FAIL", ""
    info = {}
    try:
        yield info
        elapsed = time.perf_counter() - start
        assert elapsed < LIMIT, f"took {elapsed:.1f} s"
        status = "PASS"
    finally:
        elapsed = time.perf_counter() - start
        if info.get("note"):
            note = f" [{info['note']}]"
        with capsys.disabled():
            print(f"\ncriterion {number}: {status} ({elapsed:.1f} s) {title}{note}")


def sweep_instances():
    out = [(f"FREE({n},{r})", PolymatroidInstance(free_pair(n, r))) for n, r in SIZES]
    out.append(("F1", PolymatroidInstance(BoundingPair.parse(F1_ALPHA, F1_OMEGA))))
    return out


def matroid_instances():
    out = []
    for n, r in SIZES:
        bp = free_pair(n, r)
        out.append((f"MAT({n},{r})", PolymatroidInstance.matroid(bp.alpha, bp.omega)))
    out.append(("MAT(F1)", PolymatroidInstance.matroid(F1_ALPHA, F1_OMEGA)))
    return out


def test_criterion_1_reference_instance(capsys):
    with criterion(capsys, 1, "reference instance paths, bases and squarefree embedding"):
        bp = BoundingPair.parse(F1_ALPHA, F1_OMEGA)
        paths = enumerate_paths(bp)
        assert len(paths) == 54 == dp_count(F1_ALPHA, F1_OMEGA)
        assert {p.steps for p in paths} == set(bounded_words(F1_ALPHA, F1_OMEGA))
        code, out, err = _cli("paths", "--alpha", F1_ALPHA, "--omega", F1_OMEGA)
        assert (code, out) == (0, "54\n")
        assert parse_monomial("x1^3*x3", 5) in bases(bp)
        sigma = parse_path("ENNNEENE")
        assert path_monomial(sigma) == parse_monomial("x1^3*x3", 5)
        assert north_set(sigma) == (2, 3, 4, 7)
        bar = embed_squarefree(sigma)
        assert format_monomial(path_monomial(bar)) == "x2*x3*x4*x7"


def test_criterion_2_axioms_and_exchange(capsys):
    with criterion(capsys, 2, "polymatroid axioms and symmetric exchange") as info:
        pairs = [(a, b) for n in range(1, 4) for r in range(1, 4) for a, b in bounding_pairs(n, r)]
        pairs.append((F1_ALPHA, F1_OMEGA))
        violations = 0
        for a, b in pairs:
            inst = PolymatroidInstance(BoundingPair.parse(a, b))
            ref = bases_ref(a, b)
            assert sorted(tuple(m) for m in inst.bases) == ref
            if not check_polymatroid_axioms(inst.divisor_closure).ok:
                violations += 1
            base_set = set(ref)
            for m in ref:
                for m2 in ref:
                    for i in range(len(m)):
                        if m[i] <= m2[i]:
                            continue
                        ok = False
                        for j in range(len(m)):
                            if m[j] >= m2[j]:
                                continue
                            x = list(m)
                            y = list(m2)
                            x[i] -= 1
                            x[j] += 1
                            y[j] -= 1
                            y[i] += 1
                            if tuple(x) in base_set and tuple(y) in base_set:
                                ok = True
                                break
                        violations += not ok
        info["note"] = f"{len(pairs)} bounding pairs, {violations} violations"
        assert violations == 0


def _oracle_fiber_check(label, inst, alpha, omega, t_max):
    """One thin vertex per fiber, found by greedy; fibers match brute force."""
    words = bounded_words(alpha, omega)
    ref_bases = [column_counts(w) for w in words]
    heights = [heights_of(w) for w in words]
    to_lib = [inst.basis_index(Monomial(b)) for b in ref_bases]
    checked = 0
    for t in range(1, t_max + 1):
        lib = all_fibers(inst, t)
        ref = fibers_ref(ref_bases, t)
        assert len(lib) == len(ref), (label, t)
        for mu, combos in ref.items():
            mu = inst.monomial(mu)
            want = sorted(tuple(sorted(to_lib[k] for k in c)) for c in combos)
            assert sorted(lib[mu]) == want, (label, mu)
            thin = [c for c in combos if thin_brute([heights[k] for k in c])]
            assert len(thin) == 1, (label, format_monomial(mu), len(thin))
            expected = tuple(sorted(to_lib[k] for k in thin[0]))
            assert greedy_thin_vertex(inst, mu, t) == expected, (label, format_monomial(mu))
            checked += 1
    return checked


def test_criterion_3_thin_vertices(capsys):
    with criterion(capsys, 3, "thin vertex uniqueness and greedy construction") as info:
        fibers = 0
        for n, r in SIZES:
            bp = free_pair(n, r)
            fibers += _oracle_fiber_check(
                f"FREE({n},{r})", PolymatroidInstance(bp), bp.alpha.steps, bp.omega.steps, 3
            )
        fibers += _oracle_fiber_check(
            "F1", PolymatroidInstance(BoundingPair.parse(F1_ALPHA, F1_OMEGA)), F1_ALPHA, F1_OMEGA, 3
        )
        inst = PolymatroidInstance(free_pair(4, 4))
        V = greedy_thin_vertex(inst, "x0*x1^3*x2*x3*x4^2", 2)
        assert vertex_text(inst, V) == "{x0*x1*x2*x4, x1^2*x3*x4}"
        info["note"] = f"{fibers} fibers"


def test_criterion_4_connectivity_and_certificates(capsys):
    with criterion(capsys, 4, "fiber connectivity and degree-2 certificates") as info:
        fibers = certs = oracle_checked = 0
        for label, inst in sweep_instances():
            rep = verify_white_up_to(inst, 3, ["HI"], certificate_t=(2,))["HI"]
            assert rep["hard"] == [], (label, rep["hard"][:1])
            expected = 0
            for rec in rep["fibers"]:
                assert rec["connected"] and rec["components"] == 1, (label, rec["mu"])
                if rec["t"] == 2:
                    expected += rec["vertices"] * (rec["vertices"] - 1) // 2
            assert rep["summary"]["certificates"] == expected, label
            fibers += len(rep["fibers"])
            certs += expected
            if len(inst.bases) <= 20:
                ref_bases = [tuple(b) for b in inst.bases]
                for t in range(1, 4):
                    for mu, verts in all_fibers(inst, t).items():
                        assert connected_ref(ref_bases, verts), (label, format_monomial(mu))
                        oracle_checked += 1
        info["note"] = f"{fibers} fibers connected, {certs} certificates, {oracle_checked} re-checked by oracle"


def test_criterion_5_h_vector(capsys):
    with criterion(capsys, 5, "h-vector identity on coloop-free pairs") as info:
        assert matroid_h_vector(BoundingPair.parse("NE", "EN")) == (1, 1)
        assert matroid_h_vector(BoundingPair.parse("NEE", "EEN")) == (1, 2)
        checked = 0
        for n, r in SIZES:
            for a, b in bounding_pairs(n, r):
                bp = BoundingPair.parse(a, b)
                if not is_coloop_free(bp):
                    continue
                plus = BoundingPair(plus_shift(bp.alpha), bp.omega)
                h = matroid_h_vector(bp)
                assert h == degree_sequence(PolymatroidInstance(plus)), (a, b)
                assert h == h_vector_ref(a, b), (a, b)
                assert h == degree_sequence_ref(bases_ref(plus.alpha.steps, b)), (a, b)
                checked += 1
        info["note"] = f"{checked} pairs"


def test_criterion_6_borel(capsys):
    with criterion(capsys, 6, "Borel closure identity") as info:
        checked = 0
        for n, r in SIZES:
            top = "N" * r + "E" * n
            for w in all_paths(n, r):
                m = path_monomial(w)
                closure = borel_closure(m)
                assert {tuple(x) for x in closure} == borel_ref(tuple(m))
                assert bases(BoundingPair.parse(top, w.steps)) == closure
                checked += 1
        info["note"] = f"{checked} lower paths"


def test_criterion_7_order_sanity(capsys, tmp_path):
    with criterion(capsys, 7, "order sanity on FREE(2,2) and FREE(1,2)") as info:
        notes = []
        for n, r in ((2, 2), (1, 2)):
            inst = PolymatroidInstance(free_pair(n, r))
            rep = order_audit(inst, "both", triples=10_000, seed=0)
            path = tmp_path / f"order-FREE{n}{r}.json"
            write_atomic(str(path), dumps_json(rep))
            saved = json.loads(path.read_text())
            for conv in ("HI", "LO"):
                v = saved[conv]["violations"]
                assert saved[conv]["samples"] >= 10_000
                for kind in ("antisymmetry", "totality", "transitivity", "unit_minimal"):
                    assert v[kind] == 0, (n, r, conv, kind, saved[conv]["examples"][kind][:1])
                mult = v["multiplicativity"]
                examples = saved[conv]["examples"]["multiplicativity"]
                assert len(examples) == min(mult, 20)
                assert all(isinstance(e["seed"], int) for e in examples)
                notes.append(f"FREE({n},{r}) {conv} multiplicativity {mult}")
        info["note"] = "; ".join(notes)


def test_criterion_8_sink_and_groebner_audit(capsys):
    with criterion(capsys, 8, "sink and S-pair audit") as info:
        rows = []
        probe = None
        for label, inst in sweep_instances() + matroid_instances():
            sweep = sweep_report(inst, 3, "both", certificate_t=())
            gb = groebner_report(inst, "both", max_examples=1)
            for conv in ("HI", "LO"):
                rep = sweep["reports"][conv]
                summary = rep["summary"]
                anomalies = rep["anomalies"]
                flagged = [f for f in rep["fibers"]
                           if not f["unique_sink"] or not f["sink_is_thin"]
                           or f["descent_not_decreasing"] or f["descent_invalid"]]
                assert len(anomalies) == len(flagged), (label, conv)
                for a in anomalies:
                    d = a["dump"]
                    assert d["convention"] == conv
                    assert {"instance", "mu", "t", "vertices", "edges", "sinks", "thin"} <= set(d)
                if anomalies:
                    assert replay_fiber_dump(anomalies[0]["dump"]) == [], (label, conv)
                    assert replay_fiber_dump(anomalies[-1]["dump"]) == [], (label, conv)
                bb = gb["reports"][conv]["buchberger"]
                assert bb["zeros"] + bb["failures"] + bb["nonterminating"] == bb["pairs"]
                assert sum(g["count"] for g in bb["failing_fibers"]) == bb["failures"] + bb["nonterminating"]
                assert all(g["examples"] for g in bb["failing_fibers"])
                if bb["failing_fibers"] and len(inst.bases) <= 20:
                    ex = bb["failing_fibers"][0]["examples"][0]
                    assert replay_spair_example(inst, ex, conv) == [], (label, conv)
                rows.append((label, conv, summary["non_unique_sink"],
                             summary["unique_sink_not_thin"], bb["failures"] + bb["nonterminating"]))
                if label == "FREE(1,2)":
                    assert bb["generators"] == 1 and bb["zeros"] == bb["pairs"]
                    if conv == "HI":
                        assert anomalies == []
                if label == "FREE(2,2)":
                    hit = [f for f in rep["fibers"] if f["mu"] == "x0*x1^2*x2" and f["t"] == 2]
                    assert len(hit) == 1
                    probe = probe or {}
                    probe[conv] = hit[0]["sinks"]
            assert sweep["hard_failures"] == 0, label
        assert probe is not None and set(probe) == {"HI", "LO"}
        with capsys.disabled():
            print("\n  instance   conv  non-unique-sink  sink-not-thin  S-pairs-not-zero")
            for row in rows:
                print("  {:<10} {:<5} {:>15}  {:>13}  {:>16}".format(*row))
            print(f"  FREE(2,2) x0*x1^2*x2 sinks: HI {probe['HI']}, LO {probe['LO']}")
        dirty = sum(1 for row in rows if any(row[2:]))
        info["note"] = f"{len(rows)} instance-conventions audited, {dirty} with anomalies, all dumped"


def _cli(*argv):
    import io

    out, err = io.StringIO(), io.StringIO()
    code = cli.run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def test_criterion_9_determinism(capsys, tmp_path):
    with criterion(capsys, 9, "byte-identical sweep output"):
        for inst in (PolymatroidInstance(free_pair(3, 3)),
                     PolymatroidInstance(BoundingPair.parse(F1_ALPHA, F1_OMEGA)),
                     PolymatroidInstance.matroid(F1_ALPHA, F1_OMEGA)):
            first = dumps_json(sweep_report(inst, 3, "both"))
            second = dumps_json(sweep_report(inst, 3, "both"))
            assert first == second, inst.label
        inst = PolymatroidInstance(free_pair(2, 3))
        assert dumps_json(groebner_report(inst, "both")) == dumps_json(groebner_report(inst, "both"))
        outputs = []
        for k in range(2):
            target = tmp_path / f"run{k}.json"
            code, _, _ = _cli("sweep", "--alpha", F1_ALPHA, "--omega", F1_OMEGA, "--t-max", "2",
                              "--convention", "both", "--format", "json", "--output", str(target))
            assert code == 0
            outputs.append(target.read_bytes())
        assert outputs[0] == outputs[1]
