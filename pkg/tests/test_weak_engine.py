from fractions import Fraction

import pytest

from hopfforge.algebra import DenseAlgebra, tensor_elements
from hopfforge.coproduct import MAPS, PreconditionError, dual_function, grouplike
from hopfforge.exact_linalg import kernel_basis, rank
from hopfforge.integrals import Functional
from hopfforge.ls_engine import classify
from hopfforge.weak_engine import (
    DEGENERATE_VERDICT, REGULAR_WEAK_MHA, WeakContext, check_kernel_formula, check_range_formula, check_weak_integral,
    classify_weak, classify_weak_with_unit, compute_F, derive_E, verify_E,
)
from conftest import instance
from oracles import all_groups, pair_groupoid_T1_rank, pair_groupoid_arrows, pair_groupoid_composable
from test_ls_engine import hopf_pair

ONE = Fraction(1)


def pair_groupoid_algebra_oracle(points=2):
    """Q[G] for the pair groupoid rebuilt from arrow pairs; D(g) = g (x) g."""
    arrows = pair_groupoid_arrows(points)
    idx = {a: i for i, a in enumerate(arrows)}
    table = {(idx[g], idx[h]): {idx[(g[0], h[1])]: 1} for g, h in pair_groupoid_composable(points)}
    unit = {idx[(x, x)]: 1 for x in range(points)}
    return grouplike(DenseAlgebra([f"{x}{y}" for x, y in arrows], table, unit=unit)), idx


def pair_groupoid_function_oracle(points=2):
    arrows = pair_groupoid_arrows(points)
    idx = {a: i for i, a in enumerate(arrows)}
    n = len(arrows)
    A = DenseAlgebra([f"{x}{y}" for x, y in arrows], {(i, i): {i: 1} for i in range(n)}, unit={i: 1 for i in range(n)})

    def compose(s, t):
        g, h = arrows[s], arrows[t]
        return idx[(g[0], h[1])] if g[1] == h[0] else None
    return dual_function(A, compose), idx


def expected_E_algebra(points=2):
    _, idx = pair_groupoid_algebra_oracle(points)
    return {(idx[(x, x)], idx[(x, x)]): ONE for x in range(points)}


def expected_E_function(points=2):
    _, idx = pair_groupoid_function_oracle(points)
    return {(idx[g], idx[h]): ONE for g, h in pair_groupoid_composable(points)}


@pytest.mark.parametrize("build,expected", [
    (pair_groupoid_algebra_oracle, expected_E_algebra),
    (pair_groupoid_function_oracle, expected_E_function),
])
def test_derive_E_matches_groupoid_oracle(build, expected):
    cop, _ = build()
    E, info = derive_E(cop)
    assert E == expected()


@pytest.mark.parametrize("name", ["pair-groupoid-2", "fun-pair-groupoid-2"])
def test_derive_E_reproduces_supplied_E(name):
    inst = instance(name)
    E, _ = derive_E(inst.coproduct)
    assert E == inst.E


@pytest.mark.parametrize("build", [pair_groupoid_algebra_oracle, pair_groupoid_function_oracle])
def test_separability_conditions_and_F_identities(build):
    cop, _ = build()
    ctx = WeakContext(cop)
    E, _ = derive_E(cop, ctx)
    sep = verify_E(cop, E, ctx)
    assert sep.ok, [e.check_id for e in sep.evidence if e.failed]
    ids = {e.check_id for e in sep.evidence}
    assert {"weak.SB.antimultiplicative", "weak.E.idempotent", "weak.legs.commute"} <= ids
    F = compute_F(ctx, sep)
    assert [e.check_id for e in F.evidence if e.failed] == []
    assert {e.check_id for e in F.evidence} >= {"weak.F.F1", "weak.F.F2", "weak.F.F3", "weak.F.F4"}


@pytest.mark.parametrize("build", [pair_groupoid_algebra_oracle, pair_groupoid_function_oracle])
def test_kernel_and_range_formulas_on_pair_groupoid(build):
    cop, _ = build()
    ctx = WeakContext(cop)
    E, _ = derive_E(cop, ctx)
    sep = verify_E(cop, E, ctx)
    F = compute_F(ctx, sep)
    want_rank = pair_groupoid_T1_rank(2)
    for m in MAPS:
        assert rank(cop.t_matrix(m)) == want_rank
        k = check_kernel_formula(ctx, m, F, hypothesis_met=True)
        assert k.equal and k.projection
        assert k.kernel_dim == 16 - want_rank == len(kernel_basis(cop.t_matrix(m)))
        r = check_range_formula(ctx, m, sep.E, hypothesis_met=True)
        assert r.equal and r.t_rank == r.e_rank == want_rank
        assert all(r.inclusions.values())


def test_wrong_F_breaks_the_kernel_formula():
    cop, _ = pair_groupoid_algebra_oracle()
    ctx = WeakContext(cop)
    E, _ = derive_E(cop, ctx)
    F = compute_F(ctx, verify_E(cop, E, ctx))
    rep = check_kernel_formula(ctx, "T1", F, hypothesis_met=False, Fi=ctx.one_one())
    assert not rep.equal


def test_weak_integral_levels():
    cop, idx = pair_groupoid_algebra_oracle()
    ctx = WeakContext(cop)
    E, _ = derive_E(cop, ctx)
    sep = verify_E(cop, E, ctx)
    F = compute_F(ctx, sep)
    units = Functional({idx[(0, 0)]: 1, idx[(1, 1)]: 1}, "units")
    assert check_weak_integral(ctx, sep, F, units, "left").strengthened
    off = Functional({idx[(0, 1)]: 1}, "off")
    assert not check_weak_integral(ctx, sep, F, off, "left").strengthened


@pytest.mark.parametrize("name", ["pair-groupoid-2", "fun-pair-groupoid-2", "bundle-z2-pt", "fun-bundle-z2-pt"])
def test_groupoid_instances_are_regular_weak(name):
    inst = instance(name)
    res = classify_weak(inst.coproduct, [inst.functionals[n] for n in inst.left],
                        [inst.functionals[n] for n in inst.right], E=inst.E)
    c = res.classification
    assert c.verdict == REGULAR_WEAK_MHA
    assert [e.check_id for e in c.evidence if e.failed] == []
    for m in MAPS:
        assert c.get(f"weak.lift.{m}").status == "pass"


def test_missing_E_is_reported():
    inst = instance("neg-no-E")
    E, info = derive_E(inst.coproduct)
    assert E is None and info.get("reason")


def test_non_unital_algebras_are_out_of_scope():
    A = DenseAlgebra(["x"], {(0, 0): {0: 1}})
    with pytest.raises(PreconditionError):
        WeakContext(grouplike(A))


@pytest.mark.parametrize("kind", ["group", "function"])
@pytest.mark.parametrize("name", list(all_groups()))
def test_degeneration_to_the_hopf_case(kind, name):
    cop, phi, psi = hopf_pair(kind, name)
    ls = classify(cop, phi, psi, construct=False)
    res = classify_weak_with_unit(cop, [phi], [psi])
    c = res.classification
    assert c.verdict == ls.verdict
    assert c.get("weak.degenerate").status == "pass"
    one = tensor_elements([cop.A.unit, cop.A.unit])
    assert all(res.F.get(m) == one for m in MAPS)
    for m in MAPS:
        assert c.get(f"weak.kernel.{m}").detail["kernelDim"] == 0


def test_degenerate_verdict_table_is_total():
    from hopfforge.weak_engine import LEFT_WEAK_MHA, RIGHT_WEAK_MHA, WEAK_MHA
    from hopfforge.ls_engine import FAIL_VERDICT
    assert set(DEGENERATE_VERDICT) >= {REGULAR_WEAK_MHA, WEAK_MHA, LEFT_WEAK_MHA, RIGHT_WEAK_MHA, FAIL_VERDICT}


@pytest.mark.parametrize("name", ["zint-window-2", "zint-window-4"])
def test_degeneration_on_a_window_without_unit(name):
    inst = instance(name)
    phi, psi = inst.phi(), inst.psi()
    res = classify_weak_with_unit(inst.coproduct, [phi], [psi], inst.window)
    c = res.classification
    assert c.label == "MultiplierHopf(window-verified)"
    assert c.get("weak.degenerate").status == "window-pass"
    for m in MAPS:
        assert c.get(f"weak.kernel.{m}").detail["kernelDim"] == 0
        assert c.get(f"weak.F.{m.replace('T', 'F')}").detail["F"] == "1 (x) 1"
