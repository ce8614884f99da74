import itertools

import numpy as np
import pytest

from topodec import gf2
from topodec.codes import (
    CODE_KINDS, CheckResult, CodeLattice, Face, build_color_code, build_lattice, build_twisted_toric_code,
    export_lattice, import_lattice, load_lattice, milp_distance, qubit_count, save_lattice, validate,
)
from topodec.pauli import PauliOperator, StabilizerGroup, batch_logical_class, batch_syndrome

DISTANCES = [3, 5, 7, 9]


@pytest.mark.parametrize("kind", CODE_KINDS)
@pytest.mark.parametrize("d", DISTANCES)
def test_lattice_validates(kind, d):
    lat = build_lattice(kind, d)
    rep = validate(lat, check_distance=d <= 5)
    assert rep.ok, str(rep)
    assert lat.n == qubit_count(d) == (3 * d * d + 1) // 4
    assert lat.num_generators == lat.n - 1
    assert lat.logical_x.weight == d and lat.logical_z.weight == d


def test_color_counts():
    for d, faces in [(3, 3), (5, 9)]:
        lat = build_color_code(d)
        assert len(lat.faces) == faces
        assert lat.num_generators == 2 * faces
        assert all(len(f.stabilizers) == 2 for f in lat.faces)
    sizes = sorted(len(f.qubits) for f in build_color_code(5).faces)
    assert sizes == [4] * 6 + [6] * 3


@pytest.mark.parametrize("d", DISTANCES)
def test_same_qubit_arrangement(d):
    assert build_color_code(d).coords == build_twisted_toric_code(d).coords


@pytest.mark.parametrize("d", DISTANCES)
def test_css_structure(d):
    color = build_color_code(d)
    assert all(g.x == 0 or g.z == 0 for g in color.stabilizers)
    toric = build_twisted_toric_code(d)
    assert any(g.x and g.z for g in toric.stabilizers)


def test_color_boundaries_carry_all_three_labels():
    lat = build_color_code(7)
    assert sorted(b.label for b in lat.boundaries) == ["blue", "green", "red"]
    for b in lat.boundaries:
        assert not any(f.color == b.label and set(f.qubits) & set(b.qubits) for f in lat.faces)


@pytest.mark.parametrize("d", [5, 7, 9])
def test_twist_and_defect_line(d):
    lat = build_twisted_toric_code(d)
    deg = lat.neighbor_counts()
    assert deg[lat.twist] == 3
    assert lat.defect_line[0] == lat.twist
    assert lat.coords[lat.defect_line[-1]][1] == 0  # ends on the bottom side
    # bulk vertices have four neighbours; the three corners two
    assert sorted(deg.tolist()).count(2) == 3
    assert deg.max() == 4
    mixed = [f for f in lat.faces if f.color == "mixed" and len(f.qubits) == 4]
    assert mixed and all(set(f.qubits) & set(lat.defect_line) for f in mixed)


@pytest.mark.parametrize("d", [5, 7])
def test_toric_logical_changes_species(d):
    lat = build_twisted_toric_code(d)
    s = str(lat.logical_x).replace("I", "")
    assert set(s) == {"X", "Z"}


def exhaustive_min_logical_weight(lat):
    """Minimum weight over all 4^n Paulis with trivial syndrome and nontrivial class."""
    n = lat.n
    ids = np.arange(4 ** n, dtype=np.int64)
    vecs = ((ids[:, None] >> np.arange(2 * n)) & 1).astype(np.uint8)
    ok = ~batch_syndrome(vecs, lat.stabilizers).any(axis=1)
    cls = batch_logical_class(vecs[ok], lat.logical_x, lat.logical_z)
    weights = (vecs[ok, :n] | vecs[ok, n:]).sum(axis=1)
    # the number of zero-syndrome operators is |S| * 4 = 2^(n-1) * 4
    assert ok.sum() == 2 ** (n + 1)
    assert np.bincount(cls, minlength=4).tolist() == [2 ** (n - 1)] * 4
    return int(weights[cls != 0].min())


@pytest.mark.parametrize("kind", CODE_KINDS)
def test_distance_three_by_exhaustive_enumeration(kind):
    lat = build_lattice(kind, 3)
    assert exhaustive_min_logical_weight(lat) == 3
    rep = validate(lat)
    assert rep.checks["distance"].passed and "3" in rep.checks["distance"].detail


@pytest.mark.parametrize("kind", CODE_KINDS)
@pytest.mark.parametrize("d", [5, 7])
def test_distance_by_integer_program(kind, d):
    assert milp_distance(build_lattice(kind, d)) == d


def test_injected_fault_is_reported():
    lat = build_color_code(5)
    gens = list(lat.stabilizers)
    g = gens[0]
    q = max(g.support, key=lambda i: sum(i in f.qubits for f in lat.faces))
    gens[0] = g * PauliOperator.single(lat.n, q, "Z")
    broken = CodeLattice(lat.code_kind, lat.distance, lat.coords, lat.faces, StabilizerGroup(gens),
                         lat.logical_x, lat.logical_z, lat.boundaries, lat.edges)
    rep = validate(broken, check_distance=False)
    assert not rep.checks["commutation"].passed
    assert not rep.ok


def test_colour_clash_is_reported():
    lat = build_color_code(5)
    faces = list(lat.faces)
    other = next(f for f in faces[1:] if set(f.qubits) & set(faces[0].qubits))
    faces[0] = Face(faces[0].id, faces[0].qubits, other.color, faces[0].stabilizers)
    broken = CodeLattice(lat.code_kind, lat.distance, lat.coords, tuple(faces), lat.stabilizers,
                         lat.logical_x, lat.logical_z, lat.boundaries, lat.edges)
    assert not validate(broken, check_distance=False).checks["colorability"].passed


@pytest.mark.parametrize("bad", [1, 2, 4, 0, -3])
def test_bad_distance(bad):
    for kind in CODE_KINDS:
        with pytest.raises(ValueError):
            build_lattice(kind, bad)
    with pytest.raises(TypeError):
        build_color_code(5.0)


@pytest.mark.parametrize("kind", CODE_KINDS)
@pytest.mark.parametrize("d", [3, 5, 7])
def test_export_roundtrip(kind, d, tmp_path):
    lat = build_lattice(kind, d)
    text = export_lattice(lat)
    again = import_lattice(text)
    assert again == lat
    assert again.fingerprint == lat.fingerprint
    assert export_lattice(again) == text
    path = tmp_path / "lat.txt"
    save_lattice(lat, path)
    assert load_lattice(path) == lat


def test_import_rejects_garbage():
    with pytest.raises(ValueError):
        import_lattice("hello\n")


def test_deterministic_rebuild():
    a = build_twisted_toric_code.__wrapped__(7)
    b = build_twisted_toric_code.__wrapped__(7)
    assert export_lattice(a) == export_lattice(b)
    assert build_color_code(5).fingerprint != build_twisted_toric_code(5).fingerprint


def test_generators_independent_by_rank():
    for kind in CODE_KINDS:
        lat = build_lattice(kind, 7)
        assert gf2.rank(lat.stabilizers.matrix) == lat.n - 1


def test_check_result_report_text():
    rep = validate(build_color_code(3))
    assert "PASS commutation" in str(rep)
    assert isinstance(rep.checks["logicals"], CheckResult)
