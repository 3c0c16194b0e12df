import itertools
from decimal import Decimal

import pytest

from fractopo.diagonal import (
    DiagonalOpen,
    IndexedFamily,
    ObjectSelection,
    check_diagonal_axioms,
    diagonal_intersect,
    diagonal_union,
    format_family,
    is_diagonal_neighborhood,
    is_internal_structure,
    is_object,
    parse_family,
    parse_label,
    same_internal_structure,
    single_label_agrees,
)
from fractopo.errors import CapacityError, InputError
from fractopo.finite_topology import FiniteTopology, all_topologies

SIER = FiniteTopology.sierpinski()


@pytest.fixture
def fam():
    return IndexedFamily(("0.1", "0.2"), (SIER, SIER))


def test_labels_are_exact_decimals(fam):
    assert fam.labels == (Decimal("0.1"), Decimal("0.2"))
    assert fam.position("0.10") == 0
    with pytest.raises(InputError):
        parse_label(0.1)
    with pytest.raises(InputError):
        fam.position("0.3")


def test_zero_label_is_distinct():
    f = IndexedFamily(("0", "0.01"), (SIER, FiniteTopology.discrete(1)))
    assert f.space("0") == SIER
    assert f.space("0.00") == SIER


def test_duplicate_labels_rejected():
    with pytest.raises(InputError):
        IndexedFamily(("0.1", "0.10"), (SIER, SIER))


def test_full_and_empty_absorb(fam):
    full, empty = fam.full(), fam.empty()
    for b in fam.opens():
        assert diagonal_union(full, b) == full
        assert diagonal_intersect(full, b) == b
        assert diagonal_union(empty, b) == b
        assert diagonal_intersect(empty, b) == empty


def test_componentwise_intersection(fam):
    a = DiagonalOpen.from_mapping(fam, {"0.1": {0}, "0.2": {0, 1}})
    b = DiagonalOpen.from_mapping(fam, {"0.1": {0, 1}, "0.2": set()})
    c = diagonal_intersect(a, b)
    assert c["0.1"] == {0} and c["0.2"] == frozenset()
    assert diagonal_union(a, b).components == (frozenset({0, 1}), frozenset({0, 1}))


def test_from_indices(fam):
    o = DiagonalOpen.from_indices(fam, {"0.1": 1, "0.2": 2})
    assert o.components == (frozenset({0}), frozenset({0, 1}))
    assert o.indices() == (1, 2)
    with pytest.raises(InputError):
        DiagonalOpen.from_indices(fam, {"0.1": 5, "0.2": 0})


def test_single_label_families():
    for t in all_topologies(2):
        r = check_diagonal_axioms(IndexedFamily(("0",), (t,)))
        assert r.valid


def test_single_label_agrees_on_all_set_systems_of_two_points():
    subsets = [frozenset(s) for s in ([], [0], [1], [0, 1])]
    for r in range(1, 5):
        for combo in itertools.combinations(subsets, r):
            assert single_label_agrees(FiniteTopology(2, combo))


def test_two_sierpinski_components(fam):
    r = check_diagonal_axioms(fam)
    assert r.valid and r.mode == "exhaustive"
    assert r.open_count == 9 == len(list(fam.opens()))
    assert r.pairs_checked == 36


def test_invalid_component_is_inherited():
    bad = FiniteTopology(3, [[], [0], [1], [0, 1, 2]])
    r = check_diagonal_axioms(IndexedFamily(("0", "1"), (SIER, bad)))
    assert not r.valid
    assert r.axiom == "iii"
    assert len(r.witness) == 2


def test_product_cardinality():
    spaces = (SIER, FiniteTopology.discrete(2), FiniteTopology.indiscrete(3))
    f = IndexedFamily(("0", "0.5", "1"), spaces)
    assert f.open_count() == 3 * 4 * 2
    assert len(f.as_topology().opens) == 24
    assert f.as_topology().is_valid()


def test_sampled_mode_is_reproducible(monkeypatch):
    spaces = tuple(FiniteTopology.discrete(3) for _ in range(4))  # 8**4 opens
    f = IndexedFamily(("0", "1", "2", "3"), spaces)
    a = check_diagonal_axioms(f, cap=100, samples=200, seed=7)
    b = check_diagonal_axioms(f, cap=100, samples=200, seed=7)
    assert a == b and a.mode == "sampled" and a.seed == 7 and a.pairs_checked == 200
    monkeypatch.setenv("FRACTOPO_SEED", "11")
    assert check_diagonal_axioms(f, cap=100, samples=10).seed == 11
    monkeypatch.setenv("FRACTOPO_SEED", "eleven")
    with pytest.raises(InputError):
        check_diagonal_axioms(f, cap=100, samples=10)


def test_union_capacity():
    f = IndexedFamily(tuple(str(i) for i in range(5)), tuple(FiniteTopology.discrete(5) for _ in range(5)))
    with pytest.raises(CapacityError):
        f.as_topology()


def test_objects(fam):
    assert is_object(fam, ObjectSelection({"0.1": 0, "0.2": 1}))
    assert not is_object(fam, ObjectSelection({"0.1": 0}))
    assert not is_object(fam, ObjectSelection({"0.1": 0, "0.2": 2}))
    assert is_internal_structure(fam, ObjectSelection({"0.1": 1, "0.2": 1}))


def test_neighbourhoods(fam):
    x = ObjectSelection({"0.1": 0, "0.2": 1})
    assert is_diagonal_neighborhood(fam, fam.full(), x)
    assert not is_diagonal_neighborhood(fam, {"0.1": set(), "0.2": {0, 1}}, x)
    # point 1 only lies in the open {0,1}, which is not inside {1}
    assert not is_diagonal_neighborhood(fam, {"0.1": {0, 1}, "0.2": {1}}, x)
    y = ObjectSelection({"0.1": 0, "0.2": 0})
    assert is_diagonal_neighborhood(fam, {"0.1": {0}, "0.2": {0}}, y)
    with pytest.raises(InputError):
        is_diagonal_neighborhood(fam, fam.full(), ObjectSelection({"0.1": 0}))


def test_same_internal_structure():
    a = ObjectSelection({"0.1": 0, "0.2": 1})
    assert same_internal_structure(a, ObjectSelection({"0.10": 0, "0.20": 1}))
    assert not same_internal_structure(a, ObjectSelection({"0.1": 1, "0.2": 1}))


def test_family_file_round_trip(fam):
    text = format_family(fam)
    assert text.splitlines()[0] == "labels=0.1,0.2"
    assert parse_family(text) == fam
    same = IndexedFamily(("0", "1"), (SIER, SIER), carriers="same")
    assert parse_family(format_family(same)) == same


def test_family_file_errors():
    with pytest.raises(InputError):
        parse_family("n=2; opens={},{0,1}")
    with pytest.raises(InputError):
        parse_family("labels=0,1\nn=2; opens={},{0,1}")
    with pytest.raises(InputError):
        IndexedFamily(("0", "1"), (SIER, FiniteTopology.discrete(3)), carriers="same")
