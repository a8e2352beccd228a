from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfforge.coproduct import MAPS, grouplike
from hopfforge.evidence import InconsistencyError
from hopfforge.exact_linalg import SparseMat, flip, rank
from hopfforge.integrals import Functional
from hopfforge.ls_engine import (
    FAIL_VERDICT, HOPF, HOPF_INVERTIBLE_S, LEFT_MHA, MULTIPLIER_HOPF, REGULAR_MULTIPLIER_HOPF, RIGHT_MHA, LSEngine,
    build_lift, check_antipode_axioms, check_bijectivity, check_injectivity, check_lifts, classify, construct_antipode,
    construct_counit_left, construct_counit_right, coopposite, decide_verdict, opposite,
)
from oracles import all_groups, group_oracle
from test_algebra import group_algebra
from test_coproduct import function_algebra

ONE = Fraction(1)
GROUPS = list(all_groups())


def hopf_pair(kind, name):
    """(coproduct, phi, psi) for Q[G] with delta_e or F(G) with the Haar sum."""
    if kind == "group":
        cop = grouplike(group_algebra(name))
        f = Functional({0: 1}, "delta_e")
    else:
        cop = function_algebra(name)
        f = Functional({k: 1 for k in range(cop.A.dim)}, "haar")
    return cop, f, f


def expected_counit(kind, name):
    labels = all_groups()[name]
    if kind == "group":
        return {k: ONE for k in range(len(labels))}
    return {0: ONE}


def expected_antipode(kind, name):
    labels = all_groups()[name]
    _, inv, _ = group_oracle(name, labels)
    idx = {lab: i for i, lab in enumerate(labels)}
    return {i: {idx[inv(lab)]: ONE} for i, lab in enumerate(labels)}


@pytest.mark.parametrize("kind", ["group", "function"])
@pytest.mark.parametrize("name", GROUPS)
def test_counit_and_antipode_match_oracles(kind, name):
    cop, phi, psi = hopf_pair(kind, name)
    engine = LSEngine(cop)
    c = classify(cop, phi, psi, engine=engine)
    assert c.verdict == HOPF_INVERTIBLE_S
    eps = engine.constructed["counit"]
    want = expected_counit(kind, name)
    assert all(eps.value(k) == want.get(k, 0) for k in range(cop.A.dim))
    S = engine.constructed["antipode"]
    assert S.element_form == expected_antipode(kind, name)


@pytest.mark.parametrize("name", GROUPS)
def test_injectivity_and_bijectivity(name):
    cop, phi, psi = hopf_pair("function", name)
    engine = LSEngine(cop)
    n = cop.A.dim
    for m in MAPS:
        inj = check_injectivity(engine, m, phi)
        assert inj.injective and inj.hypothesis_met
        bij = check_bijectivity(engine, m, phi, psi)
        assert bij.bijective and bij.rank == n * n


def test_injectivity_inconsistency_is_raised():
    # a faithful integral with a non-injective T1 would contradict the theorem;
    # the engine must refuse to report that silently
    cop, phi, _ = hopf_pair("group", "z2")
    engine = LSEngine(cop)
    engine.cop._matrices["T1"] = SparseMat(4, 4, {(0, 0): 1})
    with pytest.raises(InconsistencyError):
        check_injectivity(engine, "T1", phi)


@pytest.mark.parametrize("which", MAPS)
def test_lifts_hit_their_targets(which):
    cop, phi, psi = hopf_pair("function", "s3")
    engine = LSEngine(cop)
    f = phi if which in ("T1", "T3") else psi
    assert check_lifts(engine, which, f)
    lift = build_lift(engine, which, {1: ONE}, {2: ONE}, {3: ONE}, f)
    assert lift.verified


def test_counit_constructions_agree():
    cop, phi, psi = hopf_pair("function", "z4")
    engine = LSEngine(cop)
    left = construct_counit_left(engine, phi, psi)
    right = construct_counit_right(engine, psi, phi, left.functional)
    assert left.consistent and right.consistent
    assert left.functional == right.functional


@given(st.integers(0, 5), st.integers(0, 5), st.fractions(-3, 3, max_denominator=2).filter(bool))
@settings(max_examples=30, deadline=None)
def test_antipode_corruption_is_detected(key, target, delta):
    cop, phi, psi = hopf_pair("function", "s3")
    engine = LSEngine(cop)
    eps = construct_counit_left(engine, phi, psi).functional
    S = construct_antipode(engine, phi, psi)
    law, inv = check_antipode_axioms(engine, S, eps)
    assert law.status == "pass" and inv.status == "pass"
    bad_law, bad_inv = check_antipode_axioms(engine, S.corrupted(key, target, delta), eps)
    assert bad_law.failed and bad_law.witness is not None
    assert bad_inv.failed


def test_antipode_is_an_involution_on_groups():
    cop, phi, psi = hopf_pair("group", "s3")
    S = construct_antipode(LSEngine(cop), phi, psi)
    M = S.matrix(6)
    assert M @ M == SparseMat.identity(6)
    assert rank(M) == 6


@pytest.mark.parametrize("transform", [opposite, coopposite])
def test_symmetries_preserve_the_verdict(transform):
    cop, phi, psi = hopf_pair("function", "s3")
    other = transform(cop)
    assert classify(other, phi, psi).verdict == HOPF_INVERTIBLE_S


def test_opposite_swaps_canonical_maps():
    cop, _, _ = hopf_pair("function", "s3")
    op = opposite(cop)
    co = coopposite(cop)
    for m, m_op in (("T1", "T3"), ("T2", "T4")):
        assert op.t_matrix(m) == cop.t_matrix(m_op)
    # the flip conjugates T1 into T4
    F = flip(6)
    assert co.t_matrix("T4") == F @ cop.t_matrix("T1") @ F


def test_non_integral_functional_fails():
    cop = grouplike(group_algebra("z2"))
    bad = Functional({1: 1}, "delta_g")
    c = classify(cop, bad, bad)
    assert c.verdict == FAIL_VERDICT
    assert c.get("integral.left").failed
    assert any("integral" in u for u in c.unmet)


BASE = {"base": True, "phi_left": True, "phi_right": True, "psi_left": True, "psi_right": True,
        "unital_elements": True, "window": False}


@pytest.mark.parametrize("flags,expected", [
    ({**BASE, "regular": set(MAPS)}, HOPF_INVERTIBLE_S),
    ({**BASE, "regular": set(MAPS), "phi_right": False}, HOPF),
    ({**BASE, "regular": set(MAPS), "unital_elements": False}, REGULAR_MULTIPLIER_HOPF),
    ({**BASE, "regular": set(MAPS), "unital_elements": False, "psi_left": False}, MULTIPLIER_HOPF),
    ({**BASE, "regular": {"T1", "T4"}}, LEFT_MHA),
    ({**BASE, "regular": {"T2", "T3"}}, RIGHT_MHA),
    ({**BASE, "regular": {"T1", "T2"}}, FAIL_VERDICT),
    ({**BASE, "regular": set(MAPS), "base": False}, FAIL_VERDICT),
    ({**BASE, "regular": set(MAPS), "phi_left": False}, FAIL_VERDICT),
])
def test_verdict_table(flags, expected):
    verdict, _, _, _ = decide_verdict(flags)
    assert verdict == expected


def test_window_verdict_is_capped():
    verdict, q, _, _ = decide_verdict({**BASE, "regular": set(MAPS), "unital_elements": False, "window": True})
    assert verdict == MULTIPLIER_HOPF
    assert q == {"windowVerified": True, "regularS": True}


def test_one_sided_verdict_carries_upgrade_note():
    verdict, q, notes, _ = decide_verdict({**BASE, "regular": {"T1", "T4"}})
    assert verdict == LEFT_MHA and q["upgrade"] == REGULAR_MULTIPLIER_HOPF and notes
