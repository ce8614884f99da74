import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from topodec.codes import CODE_KINDS, CodeLattice, build_color_code, build_lattice, build_twisted_toric_code
from topodec.exgraph import (
    batch_removal, build_graph, dump_graph, excitations_from_syndrome, removal_operator,
    shortest_paths_to_boundary, syndrome_from_excitations,
)
from topodec.pauli import PauliOperator, StabilizerGroup, batch_syndrome, multiply, syndrome


@pytest.fixture(scope="module", params=[(k, d) for k in CODE_KINDS for d in (3, 5, 7)])
def graph(request):
    return build_graph(build_lattice(*request.param))


def test_edge_operators_light_their_endpoints(graph):
    lat = graph.lattice
    for e in graph.edges:
        lit = set(np.nonzero(syndrome(e.op, lat.stabilizers))[0].tolist())
        expected = {e.u} if e.v == graph.boundary else {e.u, e.v}
        assert lit == expected
        assert e.op.weight <= (2 if lat.code_kind == "color" else 1)


def test_graph_connected_and_bounded(graph):
    dist, pred = shortest_paths_to_boundary(graph)
    assert (dist[:-1] >= 1).all()
    assert dist.max() <= graph.lattice.distance
    for u in range(graph.num_excitation_vertices):
        path = graph.path_to_boundary(u)
        assert len(path) == dist[u] + 1


def test_color_edges_join_same_species_same_colour():
    lat = build_color_code(5)
    g = build_graph(lat)
    nf = len(lat.faces)
    for e in g.edges:
        if e.v == g.boundary or e.op.weight != 2:
            continue
        assert (e.u < nf) == (e.v < nf)
        assert lat.faces[e.u % nf].color == lat.faces[e.v % nf].color


def test_toric_edges_cross_the_defect():
    lat = build_twisted_toric_code(7)
    g = build_graph(lat)
    colours = {i: f.color for i, f in enumerate(lat.faces)}
    assert any(e.v != g.boundary and {colours[e.u], colours[e.v]} == {"dark", "white"} for e in g.edges) or \
        any(e.v != g.boundary and "mixed" in (colours[e.u], colours[e.v]) for e in g.edges)


def test_bulk_single_qubit_colour_errors_light_three_faces():
    lat = build_color_code(7)
    for q in range(lat.n):
        faces = [f for f in lat.faces if q in f.qubits]
        if len(faces) == 3:
            for s in "XZ":
                assert syndrome(PauliOperator.single(lat.n, q, s), lat.stabilizers).sum() == 3


def test_faces_next_to_their_own_boundary_reach_w():
    lat = build_color_code(7)
    g = build_graph(lat)
    nf = len(lat.faces)
    nbrs = {q: set() for q in range(lat.n)}
    for a, b in lat.edges:
        nbrs[a].add(b)
        nbrs[b].add(a)
    checked = 0
    for b in lat.boundaries:
        side = set(b.qubits)
        near = set().union(*(nbrs[q] for q in side))
        for f in lat.faces:
            if f.color == b.label and set(f.qubits) & near:
                assert g.distance[f.id] == 1 and g.distance[f.id + nf] == 1
                checked += 1
    assert checked >= 3


def test_color_distances_rotation_symmetric():
    # the patch is invariant under the 120 degree rotation (i, j) -> (j, L - i - j)
    lat = build_color_code(5)
    g = build_graph(lat)
    nf = len(lat.faces)
    L = 3 * (lat.distance - 1) // 2
    index = {c: q for q, c in enumerate(lat.coords)}
    by_support = {frozenset(f.qubits): f.id for f in lat.faces}
    for f in lat.faces:
        image = frozenset(index[(lat.coords[q][1], L - lat.coords[q][0] - lat.coords[q][1])] for q in f.qubits)
        other = by_support[image]
        assert g.distance[f.id] == g.distance[other]
        assert g.distance[f.id + nf] == g.distance[other + nf]


def test_syndrome_mapping_roundtrip(graph):
    m = graph.num_excitation_vertices
    assert excitations_from_syndrome(np.zeros(m, dtype=np.uint8), graph) == frozenset()
    one = np.zeros(m, dtype=np.uint8)
    one[m // 2] = 1
    assert excitations_from_syndrome(one, graph) == {m // 2}
    with pytest.raises(ValueError):
        excitations_from_syndrome(np.zeros(m + 1), graph)
    s = (np.arange(m) % 3 == 0).astype(np.uint8)
    assert syndrome_from_excitations(excitations_from_syndrome(s, graph), graph).tolist() == s.tolist()


def test_removal_of_empty_and_single_boundary_excitation(graph):
    assert removal_operator(frozenset(), graph).is_identity()
    for e in graph.edges:
        if e.v == graph.boundary and graph.predecessor[e.u] == graph.boundary:
            if graph.edge_operator(e.u, graph.boundary) == e.op:
                assert removal_operator({e.u}, graph) == e.op
                break


@given(st.data())
@settings(max_examples=40, deadline=None)
def test_removal_clears_syndrome_and_is_linear(data):
    kind = data.draw(st.sampled_from(CODE_KINDS))
    d = data.draw(st.sampled_from([3, 5, 7]))
    g = build_graph(build_lattice(kind, d))
    lat = g.lattice
    err = PauliOperator.from_string(data.draw(st.text("IXYZ", min_size=lat.n, max_size=lat.n)))
    s = syndrome(err, lat.stabilizers)
    U = excitations_from_syndrome(s, g)
    assert len(U) == int(s.sum())
    R = removal_operator(U, g)
    assert not syndrome(multiply(R, err), lat.stabilizers).any()
    assert removal_operator(U, g) == R
    split = data.draw(st.sets(st.sampled_from(sorted(U)))) if U else set()
    assert removal_operator(U, g) == removal_operator(split, g) * removal_operator(U - split, g)


def test_batch_removal_matches_single(graph):
    lat = graph.lattice
    rng = np.random.default_rng(3)
    errs = rng.integers(0, 2, (50, 2 * lat.n)).astype(np.uint8)
    syn = batch_syndrome(errs, lat.stabilizers)
    rec = batch_removal(syn, graph)
    for s, r in zip(syn, rec):
        assert PauliOperator.from_vector(r) == removal_operator(excitations_from_syndrome(s, graph), graph)
    assert not batch_syndrome(rec ^ errs, lat.stabilizers).any()


def test_pair_operators_move_excitations():
    g = build_graph(build_twisted_toric_code(5))
    lat = g.lattice
    m = g.num_excitation_vertices
    for a in range(0, m, 3):
        for b in range(a + 1, m, 4):
            op = PauliOperator.from_vector(g.pair_operator(a, b))
            assert set(np.nonzero(syndrome(op, lat.stabilizers))[0]) == {a, b}
            assert op.weight <= g.all_pairs[0][a, b]


def test_invalid_lattice_rejected():
    lat = build_color_code(3)
    gens = list(lat.stabilizers)
    gens[0] = gens[0] * PauliOperator.single(lat.n, 2, "Z")
    bad = CodeLattice(lat.code_kind, 3, lat.coords, lat.faces, StabilizerGroup(gens), lat.logical_x,
                      lat.logical_z, lat.boundaries, lat.edges)
    with pytest.raises(ValueError):
        build_graph(bad)


def test_dump_is_stable():
    g = build_graph(build_color_code(3))
    text = dump_graph(g)
    assert text.startswith("# topodec excitation graph v1")
    assert text == dump_graph(build_graph(build_color_code(3)))
    assert f"edges {len(g.edges)}" in text
