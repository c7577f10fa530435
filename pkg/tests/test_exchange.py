import pytest

from lattice_toric.exchange import (
    _apply,
    DisconnectedFiber,
    ExchangeGraph,
    all_fibers,
    build_graph,
    connect_path,
    descent_move,
    fiber_vertices,
    greedy_thin_vertex,
    is_connected,
    is_thin,
    make_vertex,
    move_between,
    move_text,
    neighbors,
    parse_vertex,
    reduce_to_sink,
    sort_key,
    vertex_product,
    vertex_text,
)
from lattice_toric.lattice import BoundingPair, free_pair
from lattice_toric.monomial import Monomial
from lattice_toric.order import Convention
from lattice_toric.polymatroid import PolymatroidInstance

from oracles import bounding_pairs, brute_fiber, thin_brute

HI, LO = Convention.HI, Convention.LO
F1 = BoundingPair.parse("NNENENEE", "EENENENN")


@pytest.fixture(scope="module")
def free12():
    return PolymatroidInstance(free_pair(1, 2))


@pytest.fixture(scope="module")
def free54():
    return PolymatroidInstance(free_pair(5, 4))


@pytest.fixture(scope="module")
def free22():
    return PolymatroidInstance(free_pair(2, 2))


def V(inst, *texts):
    return make_vertex(inst, texts)


def test_fiber_examples(free12):
    got = fiber_vertices(free12, "x0^2*x1^2")
    assert sorted(got) == sorted([V(free12, "x0^2", "x1^2"), V(free12, "x0*x1", "x0*x1")])
    assert fiber_vertices(free12, "x0^2*x1^2") == got
    assert fiber_vertices(free12, "x0^4") == [V(free12, "x0^2", "x0^2")]
    with pytest.raises(ValueError):
        fiber_vertices(PolymatroidInstance(F1), "x0^2*x1^3*x2^4")


@pytest.mark.parametrize("n, r", [(1, 2), (2, 2), (3, 2), (2, 3)])
@pytest.mark.parametrize("t", [1, 2, 3])
def test_fibers_match_brute_force(n, r, t):
    inst = PolymatroidInstance(free_pair(n, r))
    fibers = all_fibers(inst, t)
    total = 0
    for mu, verts in fibers.items():
        assert sorted(verts) == brute_fiber(inst.bases, tuple(mu), t)
        assert fiber_vertices(inst, mu) == verts
        for W in verts:
            assert vertex_product(inst, W) == mu
        total += len(verts)
    # every multiset lands in exactly one fiber
    from math import comb
    assert total == comb(len(inst.bases) + t - 1, t)


def test_neighbors_examples(free12):
    out = neighbors(free12, V(free12, "x0^2", "x1^2"))
    assert [W for W, _ in out] == [V(free12, "x0*x1", "x0*x1")]
    assert out[0][1][:2] == (0, 1)
    assert neighbors(free12, V(free12, "x0*x1")) == []
    back = neighbors(free12, V(free12, "x0*x1", "x0*x1"))
    assert [W for W, _ in back] == [V(free12, "x0^2", "x1^2")]


def test_neighbors_equal_factors_reach_their_exchange_partners():
    inst = PolymatroidInstance(free_pair(2, 3))
    g = build_graph(inst, "x0^2*x1^2*x2^2")
    assert is_connected(g).connected
    u = g.index[V(inst, "x0*x1*x2", "x0*x1*x2")]
    assert g.adjacency[u]


@pytest.mark.parametrize("n, r", [(2, 2), (2, 3), (3, 2)])
def test_edge_soundness(n, r):
    inst = PolymatroidInstance(free_pair(n, r))
    for t in (2, 3):
        for mu, verts in all_fibers(inst, t).items():
            g = build_graph(inst, mu)
            for u, w, move in g.edges:
                A, B = g.vertices[u], g.vertices[w]
                # the recorded move is one unit swap between two factors of A
                assert A != B
                assert _apply(inst, A, move) == B
                assert vertex_product(inst, A) == vertex_product(inst, B) == mu
                assert u in g.adjacency[w] and w in g.adjacency[u]


def test_is_thin_examples(free54):
    assert is_thin(free54, V(free54, "x0*x1*x2*x4", "x1^2*x3*x4"))
    rep = is_thin(free54, V(free54, "x0^4", "x4^4"))
    assert not rep and rep.witness == {"condition": 2, "east_step": 1}
    assert is_thin(free54, V(free54, "x0^4"))


@pytest.mark.parametrize("n, r", [(2, 2), (3, 2), (2, 3), (3, 3)])
def test_thin_matches_brute_force(n, r):
    inst = PolymatroidInstance(free_pair(n, r))
    for t in (1, 2, 3):
        for mu, verts in all_fibers(inst, t).items():
            thin = [W for W in verts if thin_brute([inst.heights[k] for k in W])]
            assert [W for W in verts if is_thin(inst, W)] == thin
            assert len(thin) == 1
            assert greedy_thin_vertex(inst, mu, t) == thin[0]


def test_thin_on_bounded_pairs():
    for a, b in bounding_pairs(3, 3)[::7]:
        inst = PolymatroidInstance(BoundingPair.parse(a, b))
        for mu, verts in all_fibers(inst, 2).items():
            thin = [W for W in verts if thin_brute([inst.heights[k] for k in W])]
            assert len(thin) == 1
            assert greedy_thin_vertex(inst, mu, 2) == thin[0]


def test_greedy_examples(free54):
    got = greedy_thin_vertex(free54, "x0*x1^3*x2*x3*x4^2", 2)
    assert got == V(free54, "x0*x1*x2*x4", "x1^2*x3*x4")
    assert greedy_thin_vertex(free54, "x0^4*x4^4", 2) == V(free54, "x0^2*x4^2", "x0^2*x4^2")
    f1 = PolymatroidInstance(F1)
    assert greedy_thin_vertex(f1, "x0^8", 2) is None
    with pytest.raises(ValueError):
        greedy_thin_vertex(f1, "x0^3", 2)


def test_descent_examples(free54, free22):
    res = descent_move(free54, V(free54, "x0^4", "x4^4"), HI)
    assert res.case == 1 and res.vertex == V(free54, "x0^3*x4", "x0*x4^3")
    assert {res.move[2], res.move[3]} == {0, 4}
    assert res.descends
    res = descent_move(free22, V(free22, "x0*x2", "x1^2"), HI)
    assert res.case == 2 and res.vertex == V(free22, "x0*x1", "x1*x2")
    assert {res.move[2], res.move[3]} == {1, 2}
    assert descent_move(free54, V(free54, "x0^2*x4^2", "x0^2*x4^2")).thin


def test_descent_case_two_is_not_a_descent_under_hi(free22):
    # the probe fiber: HI ranks the thin vertex above the non-thin one
    res = descent_move(free22, V(free22, "x0*x2", "x1^2"), HI)
    assert not res.descends
    res = descent_move(free22, V(free22, "x0*x2", "x1^2"), LO)
    assert res.descends


def test_build_graph_examples(free12, free54):
    g = build_graph(free12, "x0^2*x1^2")
    assert (len(g.vertices), len(g.edges)) == (2, 1)
    assert is_connected(g).connected
    g = build_graph(free54, "x0^4*x4^4")
    a = g.index[V(free54, "x0^4", "x4^4")]
    b = g.index[V(free54, "x0^3*x4", "x0*x4^3")]
    c = g.index[V(free54, "x0^2*x4^2", "x0^2*x4^2")]
    assert sorted(tuple(sorted(e[:2])) for e in g.edges) == sorted([tuple(sorted((a, b))), tuple(sorted((b, c)))])


def test_connectivity_trivial_cases(free12):
    g = build_graph(free12, "x0^4")
    rep = is_connected(g)
    assert rep.connected and rep.components == 1
    empty = ExchangeGraph(free12, Monomial((0, 0)), [], [], {}, [])
    rep = is_connected(empty)
    assert rep.connected and rep.components == 0


def test_reduce_to_sink_examples(free54, free12):
    sink, steps = reduce_to_sink(free54, V(free54, "x0^4", "x4^4"), HI)
    assert steps
    assert all(sort_key(free54, W, HI) > sort_key(free54, sink, HI) for W, _ in neighbors(free54, sink))
    thin = V(free54, "x0^2*x4^2", "x0^2*x4^2")
    s2, st2 = reduce_to_sink(free54, thin, HI)
    if s2 == thin:
        assert st2 == []
    sink, steps = reduce_to_sink(free12, V(free12, "x0^2", "x1^2"), HI)
    assert len(steps) <= 1


def test_connect_path_examples(free12, free54):
    A = V(free12, "x0^2", "x1^2")
    assert connect_path(free12, A, A) == []
    assert len(connect_path(free12, A, V(free12, "x0*x1", "x0*x1"))) == 1
    steps = connect_path(free54, V(free54, "x0^4", "x4^4"), V(free54, "x0^2*x4^2", "x0^2*x4^2"))
    assert len(steps) == 2
    assert steps[0].dst == V(free54, "x0^3*x4", "x0*x4^3")
    with pytest.raises(ValueError):
        connect_path(free12, A, V(free12, "x0^2", "x0^2"))


def test_walks_are_valid_in_every_small_fiber():
    inst = PolymatroidInstance(free_pair(2, 3))
    for conv in (HI, LO):
        for mu, verts in all_fibers(inst, 3).items():
            if len(verts) < 2:
                continue
            steps = connect_path(inst, verts[0], verts[-1], conv)
            cur = verts[0]
            for s in steps:
                assert s.src == cur
                assert move_between(inst, s.src, s.dst)
                cur = s.dst
            assert cur == verts[-1]


def test_disconnected_fiber_is_reported(free12, monkeypatch):
    import lattice_toric.exchange as ex

    monkeypatch.setattr(ex, "neighbors", lambda inst, W: [])
    monkeypatch.setattr(ex, "reduce_to_sink", lambda inst, W, c=HI: (W, []))
    with pytest.raises(DisconnectedFiber) as info:
        ex.connect_path(free12, V(free12, "x0^2", "x1^2"), V(free12, "x0*x1", "x0*x1"))
    assert info.value.dump["vertices"]


def test_vertex_text_round_trip(free54):
    W = V(free54, "x0*x1*x2*x4", "x1^2*x3*x4")
    assert parse_vertex(free54, vertex_text(free54, W)) == W
    assert move_text((0, 1, 0, 4)) == "swap(i=0, j=4) on factors (1,2)"
    with pytest.raises(ValueError):
        parse_vertex(free54, "x0^4")


def test_multiset_vertices_allow_repeats(free54):
    W = V(free54, "x0^2*x4^2", "x0^2*x4^2")
    assert len(W) == 2 and W[0] == W[1]
