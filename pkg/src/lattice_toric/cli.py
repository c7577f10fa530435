"""Command-line front end (``lattice-toric``).

Exit status: 0 on success, 1 when a hard assertion fails (a dump file is
written and its path printed), 2 on input errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

from . import audit
from .exchange import (
    build_graph,
    greedy_thin_vertex,
    is_connected,
    is_thin,
    parse_vertex,
    vertex_text,
)
from .lattice import (
    BoundingPair,
    LatticePath,
    embed_squarefree,
    enumerate_paths,
    format_north_set,
    free_pair,
    is_coloop_free,
    north_set,
    parse_path,
    path_monomial,
    plus_shift,
)
from .monomial import format_monomial
from .order import Convention, compare_l, format_l_vector, l_vector
from .polymatroid import (
    InvariantViolation,
    PolymatroidInstance,
    bases,
    borel_closure,
    degree_sequence,
    matroid_h_vector,
)
from .render import emit_dot, render_paths_svg

COMMANDS = (
    "paths", "bases", "monomial", "embed", "lvector", "compare", "thin", "fiber",
    "sweep", "groebner", "hvector", "borel-check", "render", "order-audit",
)
DEFAULT_DUMP = "lattice-toric-dump.json"


class InputError(Exception):
    pass


class HardFailure(Exception):
    def __init__(self, message: str, dump: dict, rendered: str | None = None):
        super().__init__(message)
        self.dump = dump
        self.rendered = rendered


# -- argument handling ---------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lattice-toric",
        description="Lattice path polymatroids, exchange graphs and toric ideal audits.",
    )
    p.add_argument("command", help="one of: " + ", ".join(COMMANDS))
    p.add_argument("--alpha", help="upper bounding path, e.g. NNENENEE")
    p.add_argument("--omega", help="lower bounding path, e.g. EENENENN")
    p.add_argument("--free", nargs=2, type=int, metavar=("N", "R"),
                   help="use the free pair N^r E^n / E^n N^r instead of --alpha/--omega")
    p.add_argument("--matroid", action="store_true",
                   help="work with the lattice path matroid (squarefree embedding)")
    p.add_argument("--path", action="append", default=[],
                   help="a lattice path (repeatable where several are accepted)")
    p.add_argument("--mu", help='fiber product, e.g. "x0*x1^3*x2"')
    p.add_argument("--left", help='base ring monomial, e.g. "{x0*x1, x1*x2}"')
    p.add_argument("--right", help="second base ring monomial for compare")
    p.add_argument("--t", type=int, help="number of factors")
    p.add_argument("--t-max", type=int, default=2, help="sweep bound on t (default 2)")
    p.add_argument("--convention", default="HI", choices=["HI", "LO", "both"],
                   help="direction of 'precedes' (default HI)")
    p.add_argument("--format", default="text", choices=["text", "json", "dot", "svg"])
    p.add_argument("--jobs", type=int, default=1, help="worker processes for sweeps")
    p.add_argument("--output", help="write the primary output here instead of stdout")
    p.add_argument("--dump", default=DEFAULT_DUMP,
                   help=f"where hard-failure dumps go (default {DEFAULT_DUMP})")
    p.add_argument("--no-certificates", action="store_true",
                   help="sweep: skip the degree-2 certificate check")
    p.add_argument("--list", action="store_true", help="paths: list the paths too")
    p.add_argument("--samples", type=int, default=10_000, help="order-audit sample count")
    p.add_argument("--seed", type=int, default=0, help="order-audit base seed")
    return p


def _bounds(args) -> BoundingPair:
    if args.free:
        n, r = args.free
        if n < 0 or r < 0:
            raise InputError("--free needs non-negative N and R")
        return free_pair(n, r)
    if not args.alpha or not args.omega:
        raise InputError(f"{args.command} needs --alpha and --omega (or --free N R)")
    return BoundingPair.parse(args.alpha, args.omega)


def _instance(args) -> PolymatroidInstance:
    bp = _bounds(args)
    if args.matroid:
        return PolymatroidInstance.matroid(bp.alpha, bp.omega)
    return PolymatroidInstance(bp)


def _conventions(args) -> list[Convention]:
    return audit.conventions_from(args.convention)


def _one_path(args) -> LatticePath:
    if len(args.path) != 1:
        raise InputError(f"{args.command} needs exactly one --path")
    return parse_path(args.path[0])


def _fiber_t(inst: PolymatroidInstance, mu) -> int:
    deg = mu.degree
    if inst.rank == 0 or deg % inst.rank:
        raise InputError(f"degree {deg} of mu is not a multiple of the rank {inst.rank}")
    return deg // inst.rank


def _text_or_json(args, text: str, data) -> str:
    if args.format == "json":
        return audit.dumps_json(data)
    if args.format in ("dot", "svg"):
        raise InputError(f"{args.command} has no {args.format} output")
    return text if text.endswith("\n") else text + "\n"


# -- commands --------------------------------------------------------------------


def cmd_paths(args) -> str:
    paths = enumerate_paths(_bounds(args))
    lines = [str(len(paths))]
    if args.list:
        lines += [p.steps for p in paths]
    return _text_or_json(args, "\n".join(lines), {"count": len(paths), "paths": [p.steps for p in paths]})


def cmd_bases(args) -> str:
    inst = _instance(args)
    mons = [format_monomial(m) for m in inst.bases]
    data = {"instance": inst.describe(), "rank": inst.rank, "bases": mons}
    return _text_or_json(args, "\n".join(mons), data)


def cmd_monomial(args) -> str:
    p = _one_path(args)
    m = format_monomial(path_monomial(p))
    return _text_or_json(args, m, {"path": p.steps, "monomial": m})


def cmd_embed(args) -> str:
    p = _one_path(args)
    q = embed_squarefree(p)
    data = {
        "path": p.steps,
        "north_set": list(north_set(p)),
        "embedded": q.steps,
        "embedded_north_set": list(north_set(q)),
        "embedded_monomial": format_monomial(path_monomial(q)),
    }
    text = "\n".join([
        f"N = {format_north_set(north_set(p))}",
        f"embedded path = {q.steps}",
        f"embedded monomial = {data['embedded_monomial']}",
    ])
    return _text_or_json(args, text, data)


def cmd_lvector(args) -> str:
    p = _one_path(args)
    vec = l_vector(p)
    return _text_or_json(args, format_l_vector(vec), {"path": p.steps, "l_vector": list(vec)})


def cmd_compare(args) -> str:
    if args.left is None or args.right is None:
        raise InputError("compare needs --left and --right")
    inst = _instance(args)
    V, W = parse_vertex(inst, args.left), parse_vertex(inst, args.right)
    names = {1: "greater", 0: "equal", -1: "less"}
    results = {}
    for conv in _conventions(args):
        c = compare_l([inst.paths[k] for k in V], [inst.paths[k] for k in W], conv)
        results[str(conv)] = names[c]
    text = "\n".join(f"{c}: {v}" for c, v in results.items()) if len(results) > 1 else next(iter(results.values()))
    data = {"left": vertex_text(inst, V), "right": vertex_text(inst, W), "result": results}
    return _text_or_json(args, text, data)


def cmd_thin(args) -> str:
    if args.mu is None:
        raise InputError("thin needs --mu")
    inst = _instance(args)
    mu = inst.monomial(args.mu)
    t = args.t if args.t is not None else _fiber_t(inst, mu)
    V = greedy_thin_vertex(inst, mu, t)
    if V is None:
        data = {"mu": format_monomial(mu), "t": t, "thin": None}
        return _text_or_json(args, "no thin vertex", data)
    factors = [{"monomial": format_monomial(inst.bases[k]), "path": inst.paths[k].steps} for k in V]
    text = "\n".join(f"{f['monomial']}\t{f['path']}" for f in factors)
    data = {"mu": format_monomial(mu), "t": t, "thin": factors}
    return _text_or_json(args, text, data)


def cmd_fiber(args) -> str:
    if args.mu is None:
        raise InputError("fiber needs --mu")
    inst = _instance(args)
    mu = inst.monomial(args.mu)
    t = _fiber_t(inst, mu)
    if args.t is not None and args.t != t:
        raise InputError(f"mu has degree {mu.degree}, which means t = {t}, not {args.t}")
    g = build_graph(inst, mu)
    convs = _conventions(args)
    if args.format == "dot":
        if len(convs) != 1:
            raise InputError("dot output needs a single convention")
        return emit_dot(g, convs[0])
    data = {
        "mu": format_monomial(mu),
        "t": t,
        "vertices": [vertex_text(inst, V) for V in g.vertices],
        "edges": [[u, v] for u, v, _ in g.edges],
        "connected": is_connected(g).connected,
        "thin": [vertex_text(inst, V) for V in g.vertices if is_thin(inst, V)],
        "sinks": {str(c): [vertex_text(inst, g.vertices[u]) for u in g.sinks(c)] for c in convs},
    }
    lines = [f"mu = {data['mu']}, t = {t}: {len(g.vertices)} vertices, {len(g.edges)} edges"]
    lines += [f"  {v}" for v in data["vertices"]]
    lines.append(f"connected: {data['connected']}")
    lines.append("thin: " + ", ".join(data["thin"]))
    for c, s in data["sinks"].items():
        lines.append(f"sinks ({c}): " + ", ".join(s))
    return _text_or_json(args, "\n".join(lines), data)


def cmd_sweep(args) -> str:
    inst = _instance(args)
    if args.t_max < 1:
        raise InputError("--t-max must be at least 1")
    rep = audit.sweep_report(
        inst, args.t_max, _conventions(args), jobs=max(args.jobs, 1),
        certificate_t=() if args.no_certificates else (2,),
    )
    lines = [f"sweep {inst.label}, t <= {args.t_max}"]
    for conv, sub in rep["reports"].items():
        s = sub["summary"]
        lines.append(
            f"{conv}: {s.get('fibers', 0)} fibers, {s.get('connected', 0)} connected, "
            f"{s.get('single_thin', 0)} with one thin vertex, {s.get('greedy_matches', 0)} greedy matches, "
            f"{s.get('non_unique_sink', 0)} non-unique sinks, "
            f"{s.get('unique_sink_not_thin', 0)} unique non-thin sinks, "
            f"{s.get('certificates', 0)} certificates, {len(sub['anomalies'])} anomalies"
        )
    rendered = _text_or_json(args, "\n".join(lines), rep)
    if rep["hard_failures"]:
        failures = audit.hard_failures(rep)
        raise HardFailure(
            f"{len(failures)} fibers failed hard assertions",
            {"instance": inst.describe(), "hard_failures": failures},
            rendered,
        )
    return rendered


def cmd_groebner(args) -> str:
    inst = _instance(args)
    rep = audit.groebner_report(inst, _conventions(args))
    lines = [f"groebner {inst.label}: {len(rep['generators'])} exchange binomials"]
    for conv, sub in rep["reports"].items():
        b = sub["buchberger"]
        lines.append(
            f"{conv}: {b['pairs']} S-pairs, {b['zeros']} reduce to 0, {b['failures']} do not, "
            f"{b['nonterminating']} loop; {len(b['failing_fibers'])} failing fibers"
        )
    return _text_or_json(args, "\n".join(lines), rep)


def cmd_hvector(args) -> str:
    bp = _bounds(args)
    h = matroid_h_vector(bp)
    data = {"h_vector": list(h), "coloop_free": is_coloop_free(bp)}
    lines = ["h = (" + ",".join(map(str, h)) + ")"]
    if data["coloop_free"]:
        plus = BoundingPair(plus_shift(bp.alpha), bp.omega)
        ds = degree_sequence(PolymatroidInstance(plus))
        data["degree_sequence_plus"] = list(ds)
        data["identity_holds"] = tuple(ds) == tuple(h)
        lines.append("degree sequence of Gamma(alpha+, omega) = (" + ",".join(map(str, ds)) + ")")
        lines.append(f"identity holds: {data['identity_holds']}")
    return _text_or_json(args, "\n".join(lines), data)


def cmd_borel_check(args) -> str:
    if args.free:
        bp = _bounds(args)
    else:
        if not args.omega:
            raise InputError("borel-check needs --omega")
        omega = parse_path(args.omega)
        alpha = args.alpha or "N" * omega.r + "E" * omega.n
        bp = BoundingPair.parse(alpha, omega.steps)
    top = "N" * bp.r + "E" * bp.n
    if bp.alpha.steps != top:
        raise InputError(f"borel-check needs alpha = {top}")
    got = set(bases(bp))
    want = set(borel_closure(path_monomial(bp.omega)))
    data = {
        "omega": bp.omega.steps,
        "bases": len(got),
        "closure": len(want),
        "equal": got == want,
        "only_in_bases": sorted(format_monomial(m) for m in got - want),
        "only_in_closure": sorted(format_monomial(m) for m in want - got),
    }
    text = f"{len(got)} bases, {len(want)} in the Borel closure: " + ("equal" if data["equal"] else "DIFFERENT")
    return _text_or_json(args, text, data)


def cmd_render(args) -> str:
    if args.format == "dot" or (args.mu is not None and args.format != "svg"):
        if args.mu is None:
            raise InputError("render --format dot needs --mu")
        args.format = "dot"
        return cmd_fiber(args)
    if args.format not in ("svg", "text"):
        raise InputError("render emits svg or dot")
    bp = _bounds(args) if (args.alpha or args.free) else None
    paths = [parse_path(s) for s in args.path]
    if not paths and bp is None:
        raise InputError("render needs --path and/or --alpha/--omega")
    return render_paths_svg(paths, bp)


def cmd_order_audit(args) -> str:
    inst = _instance(args)
    rep = audit.order_audit(inst, _conventions(args), triples=args.samples, seed=args.seed)
    lines = []
    for conv, sub in rep.items():
        v = sub["violations"]
        lines.append(f"{conv}: {sub['samples']} samples; " + ", ".join(f"{k} {v[k]}" for k in sorted(v)))
    return _text_or_json(args, "\n".join(lines), rep)


HANDLERS = {
    "paths": cmd_paths,
    "bases": cmd_bases,
    "monomial": cmd_monomial,
    "embed": cmd_embed,
    "lvector": cmd_lvector,
    "compare": cmd_compare,
    "thin": cmd_thin,
    "fiber": cmd_fiber,
    "sweep": cmd_sweep,
    "groebner": cmd_groebner,
    "hvector": cmd_hvector,
    "borel-check": cmd_borel_check,
    "render": cmd_render,
    "order-audit": cmd_order_audit,
}


def _emit(args, text: str, stdout) -> None:
    if args.output:
        audit.write_atomic(args.output, text)
    else:
        stdout.write(text)


def run(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = sys.stdout if stdout is None else stdout
    stderr = sys.stderr if stderr is None else stderr
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = HANDLERS.get(args.command)
    if handler is None:
        stderr.write(f"unknown command {args.command!r}\n")
        stderr.write(parser.format_usage())
        return 2
    try:
        text = handler(args)
    except HardFailure as exc:
        if exc.rendered is not None:
            _emit(args, exc.rendered, stdout)
        audit.write_atomic(args.dump, audit.dumps_json(exc.dump))
        stderr.write(f"hard assertion failed: {exc}\ndump written to {args.dump}\n")
        return 1
    except InvariantViolation as exc:
        audit.write_atomic(args.dump, audit.dumps_json({"error": str(exc), "dump": exc.dump}))
        stderr.write(f"hard assertion failed: {exc}\ndump written to {args.dump}\n")
        return 1
    except (InputError, ValueError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        stderr.write(f"error: {msg}\n")
        return 2
    _emit(args, text, stdout)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
