import itertools

import pytest

from fractopo import signs as sg
from fractopo.errors import CapacityError, DomainError, InputError, PreconditionError
from fractopo.family import (
    PROPERTIES,
    FractalFamilySpec,
    ParentLink,
    Space,
    chain_sets,
    chain_topologies,
    check_fractal_family,
    format_family_spec,
    induced_formula_check,
    mutate,
    parse_family_spec,
    sierpinski_doubling,
    weakest_topology,
)
from fractopo.finite_topology import FiniteTopology

import oracles


# -- sign strings ----------------------------------------------------------


def test_lambda_listing():
    assert sg.lambda_set(0) == ["+", "-"]
    assert sg.lambda_set(1) == ["++", "+-", "-+", "--"]
    assert len(sg.lambda_set(2)) == 8


def test_lambda_cap_and_input():
    with pytest.raises(CapacityError):
        sg.lambda_set(21)
    with pytest.raises(InputError):
        sg.lambda_set(-1)


def test_parent_and_children():
    assert sg.parent("+-+") == "+-"
    assert sg.children("+") == ("++", "+-")
    with pytest.raises(DomainError):
        sg.parent("-")


def test_aliases():
    assert sg.normalize("p−m") == "+--"
    with pytest.raises(InputError):
        sg.normalize("+x")
    with pytest.raises(InputError):
        sg.normalize("")


def test_parent_unique_in_previous_level():
    prev = sg.lambda_set(4)
    for j in sg.lambda_set(5):
        assert sum(1 for k in prev if j.startswith(k)) == 1
        assert prev.count(sg.parent(j)) == 1


# -- the reference fixture -------------------------------------------------


@pytest.fixture(scope="module")
def fixture3():
    return sierpinski_doubling(3)


def test_two_level_fixture_passes():
    r = check_fractal_family(sierpinski_doubling(2))
    assert r.ok and r.failed() == []


def test_three_level_fixture_passes(fixture3):
    assert check_fractal_family(fixture3).ok


def test_fixture_children_extend_parent(fixture3):
    # child = parent carrier plus one fresh point; parent opens survive and gain the new point
    for k in fixture3.keys(1) + fixture3.keys(2):
        child, par = fixture3.space(k), fixture3.space(sg.parent(k))
        new = set(child.carrier) - set(par.carrier)
        assert len(new) == 1 and set(par.carrier) < set(child.carrier)
        assert oracles.trace(child.label_opens(), par.carrier) == set(par.label_opens())
        assert frozenset(new) in set(child.label_opens())


@pytest.mark.parametrize("prop", PROPERTIES)
def test_each_mutation_fails_only_its_property(fixture3, prop):
    r = check_fractal_family(mutate(fixture3, prop))
    assert r.failed() == [prop]


def test_discrete_replacement_breaks_iii(fixture3):
    levels = [dict(lvl) for lvl in fixture3.levels]
    k = "+-"
    carrier = levels[1][k].carrier
    levels[1][k] = Space(carrier, FiniteTopology.discrete(len(carrier)))
    r = check_fractal_family(FractalFamilySpec(levels, dict(fixture3.links)))
    assert "iii" in r.failed()
    assert any("++" in w and "+-" in w for w in r.properties["iii"].witnesses)


def test_deleted_link_names_orphan(fixture3):
    links = dict(fixture3.links)
    del links["-+"]
    r = check_fractal_family(FractalFamilySpec(fixture3.levels, links))
    assert r.failed() == ["iv"]
    assert "-+" in r.properties["iv"].witnesses[0]


def test_report_lines(fixture3):
    lines = check_fractal_family(mutate(fixture3, "iii")).lines()
    assert "property iii: FAIL" in lines
    assert "property i: pass" in lines


# -- chains ----------------------------------------------------------------


def test_chain_topologies(fixture3):
    chain = chain_topologies(fixture3, "+")
    assert chain == ["+", "++", "+++"]
    for low, high in zip(chain, chain[1:]):
        lo, hi = fixture3.space(low), fixture3.space(high)
        assert set(lo.carrier) <= set(hi.carrier)
        assert oracles.trace(hi.label_opens(), lo.carrier) == set(lo.label_opens())


def test_chain_on_single_level():
    spec = sierpinski_doubling(1)
    assert chain_topologies(spec, "-") == ["-"]


def test_chain_refused_when_v_fails(fixture3):
    with pytest.raises(PreconditionError):
        chain_topologies(mutate(fixture3, "v"), "+")


def test_chain_sets(fixture3):
    c = chain_sets(fixture3, "+-+")
    assert c.keys == ("+-", "+")
    assert chain_sets(fixture3, "-").keys == ()
    for k in fixture3.keys(2):
        emb = chain_sets(fixture3, k).embedding
        assert len(set(emb.values())) == len(emb)


def test_chain_sets_missing_link(fixture3):
    with pytest.raises(PreconditionError, match="level 2"):
        chain_sets(mutate(fixture3, "iv"), "+++")


def _parent_candidates(spec, key):
    """Every level-(n-1) key whose carrier sits inside ``key`` with the subspace topology."""
    sp = spec.space(key)
    out = []
    for p in spec.keys(len(key) - 2):
        ps = spec.space(p)
        if set(ps.carrier) <= set(sp.carrier) and oracles.trace(sp.label_opens(), ps.carrier) == set(ps.label_opens()):
            out.append(p)
    return out


def test_chain_sets_unique_by_exhaustive_search(fixture3):
    top = fixture3.max_level
    for key in fixture3.keys(top):
        chains = []
        for cand in itertools.product(*(fixture3.keys(n) for n in reversed(range(top)))):
            path = (key,) + cand
            if all(b in _parent_candidates(fixture3, a) for a, b in zip(path, path[1:])):
                chains.append(cand)
        assert chains == [chain_sets(fixture3, key).keys]


# -- induced formulas and weakest topology --------------------------------


def test_formula_diagonal_is_trivial(fixture3):
    for n in range(3):
        assert induced_formula_check(fixture3, n, n).holds


def test_formula_two_steps(fixture3):
    r = induced_formula_check(fixture3, 0, 2)
    assert r.holds
    assert ("+", "++", "+++") in r.checked


def test_formula_breaks_with_extra_open(fixture3):
    levels = [dict(lvl) for lvl in fixture3.levels]
    sp = levels[2]["+++"]
    pos1 = sp.position(1)
    levels[2]["+++"] = Space(sp.carrier, _with_open(sp.topology, pos1))
    spec = FractalFamilySpec(levels, dict(fixture3.links))
    r = induced_formula_check(spec, 2, 0)
    assert not r.holds
    assert "+++" in r.witness
    # upward, a different witness chain still exists
    up = induced_formula_check(spec, 0, 2)
    assert up.holds and ("+", "++", "++-") in up.checked


def _with_open(t, p):
    # add {p} and close under unions and intersections
    opens = set(t.opens) | {frozenset({p})}
    changed = True
    while changed:
        changed = False
        for a, b in itertools.product(list(opens), repeat=2):
            for c in (a | b, a & b):
                if c not in opens:
                    opens.add(c)
                    changed = True
    out = FiniteTopology(t.universe_size, opens)
    assert out.is_valid()
    return out


def test_formula_level_range(fixture3):
    with pytest.raises(InputError):
        induced_formula_check(fixture3, 0, 3)


@pytest.mark.parametrize("prop", [None, "iii", "iv", "v"])
def test_adjacent_formula_matches_iv_and_v(fixture3, prop):
    spec = fixture3 if prop is None else mutate(fixture3, prop)
    report = check_fractal_family(spec)
    for n in range(2):
        try:
            down = induced_formula_check(spec, n + 1, n).holds
        except PreconditionError:
            down = False
        if report.properties["iv"].ok:
            assert down
        up = induced_formula_check(spec, n, n + 1).holds
        if report.properties["v"].ok:
            assert up


def test_weakest_topology(fixture3):
    key, topo = weakest_topology(fixture3)
    assert key == "+" and topo == fixture3.space("+").topology
    low = fixture3.space(key)
    for high in chain_topologies(fixture3, key)[1:]:
        hs = fixture3.space(high)
        assert set(low.label_opens()) <= oracles.trace(hs.label_opens(), low.carrier)


def test_weakest_single_level():
    spec = sierpinski_doubling(1)
    assert weakest_topology(spec) == ("+", FiniteTopology.sierpinski())


def test_weakest_requires_family(fixture3):
    with pytest.raises(PreconditionError):
        weakest_topology(mutate(fixture3, "ii"))


# -- structure and text format ----------------------------------------------


def test_round_trip(fixture3):
    text = format_family_spec(fixture3)
    again = parse_family_spec(text)
    assert format_family_spec(again) == text
    assert check_fractal_family(again).ok


def test_text_format_sample():
    text = """
    level 0: key=+; carrier=0,1; topology={},{0},{0,1}
    level 0: key=-; carrier=2,3; topology={},{2},{2,3}
    level 1: key=+-; carrier=0,1,4; topology={},{0},{4},{0,1},{0,4},{0,1,4}
    level 1: key=-+; carrier=2,3,5; topology={},{2},{5},{2,3},{2,5},{2,3,5}
    level 1: key=++; carrier=0,1,6; topology={},{0},{6},{0,1},{0,6},{0,1,6}
    parent +- -> +: embed 0->0,1->1
    parent -+ -> -: embed 2->2,3->3
    parent ++ -> +: embed 0->0,1->1
    """
    spec = parse_family_spec(text)
    assert spec.keys(1) == ["++", "+-", "-+"]
    assert check_fractal_family(spec).ok


@pytest.mark.parametrize(
    "text",
    [
        "",
        "level 0: key=++; carrier=0,1; topology={},{0,1}",
        "level 0: key=+; carrier=0,1; topology={},{2}",
        "level 0: key=+; carrier=0,0; topology={},{0}",
        "level 0: key=+; carrier=0,1; topology={},{0,1}\nparent ++ -> +: embed 0->0,1->1",
        "level 0: key=+; carrier=0,1; topology={},{0,1}\nlevel 1: key=++; carrier=0,5; topology={},{0,5}\n"
        "parent ++ -> +: embed 0->0,1->1",
    ],
)
def test_structural_errors(text):
    with pytest.raises(InputError):
        parse_family_spec(text)


def test_level_cap():
    with pytest.raises(InputError):
        sierpinski_doubling(8)


def test_non_injective_embedding():
    s = FiniteTopology.sierpinski()
    with pytest.raises(InputError):
        FractalFamilySpec(
            [{"+": Space((0, 1), s)}, {"++": Space((0, 1), s)}],
            {"++": ParentLink("+", {0: 0, 1: 0})},
        )
