from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st

from hopfforge.algebra import DenseAlgebra, PointwiseIntegers, SupportedAlgebra
from hopfforge.coproduct import dual_function, grouplike
from hopfforge.integrals import (
    HYPOTHESIS_FAILED, LAMBDA_EQUALS_PHI, NOT_SCALAR_INVARIANT, Functional, check_faithful, check_faithful_set,
    check_left_integral, check_right_integral, scalar_invariance_to_integral,
)
from test_algebra import group_algebra
from test_coproduct import function_algebra

coeff = st.fractions(-4, 4, max_denominator=3)


def test_functional_defaults_and_scaling():
    f = Functional({0: "1/2"}, "f", default="1/3")
    assert f.value(0) == Fraction(1, 2)
    assert f.value(7) == Fraction(1, 3)
    assert f({0: Fraction(2), 5: Fraction(3)}) == 2
    assert f.scaled(2).value(0) == 1
    assert Functional({}, "z").is_zero()


def test_delta_e_is_a_two_sided_integral_on_group_algebras():
    for name in ("z2", "z3", "s3"):
        cop = grouplike(group_algebra(name))
        phi = Functional({0: 1}, "delta_e")
        assert check_left_integral(cop, phi)
        assert check_right_integral(cop, phi)


def test_delta_g_is_rejected_with_a_witness():
    cop = grouplike(group_algebra("z2"))
    out = check_left_integral(cop, Functional({1: 1}, "delta_g"))
    assert not out and out.witness is not None


def test_haar_sum_on_function_algebras():
    for name in ("z4", "s3"):
        cop = function_algebra(name)
        n = cop.A.dim
        haar = Functional({k: 1 for k in range(n)}, "haar")
        assert check_left_integral(cop, haar) and check_right_integral(cop, haar)
        assert not check_left_integral(cop, Functional({0: 1}, "eval"))


@given(st.lists(coeff, min_size=3, max_size=3))
@settings(max_examples=60, deadline=None)
def test_left_integrals_of_group_algebra_are_multiples_of_delta_e(values):
    # oracle: on Q[G] the invariance (id (x) f)D(a) = f(a)1 forces f(g) = 0 for g != e
    cop = grouplike(group_algebra("z3"))
    f = Functional(dict(enumerate(values)), "f")
    expected = values[1] == 0 and values[2] == 0 and values[0] != 0
    assert bool(check_left_integral(cop, f)) == expected


def test_haar_sum_on_integers_is_window_verified():
    A = SupportedAlgebra(PointwiseIntegers(), default_window=3)
    cop = dual_function(A, lambda s, t: s + t)
    haar = Functional({}, "haar", default=1)
    out = check_left_integral(cop, haar, window=3)
    assert out.status == "window-pass"
    assert check_right_integral(cop, haar, window=3).status == "window-pass"
    assert not check_left_integral(cop, Functional({0: 1}, "delta0"), window=3)


def test_faithfulness():
    A = group_algebra("s3")
    assert check_faithful(A, Functional({0: 1}, "delta_e")).faithful
    rep = check_faithful(A, Functional({}, "zero"))
    assert not rep.left_faithful and rep.left_witness
    # on F(Z2) evaluation at one point kills the other indicator
    B = function_algebra("z2").A
    rep = check_faithful(B, Functional({0: 1}, "eval_e"))
    assert not rep.faithful and rep.left_witness == {1: 1}


def test_faithful_sets():
    B = function_algebra("z2").A
    evals = [Functional({0: 1}, "e0"), Functional({1: 1}, "e1")]
    assert check_faithful_set(B, evals, "left")
    assert not check_faithful_set(B, evals[:1], "right")
    assert not check_faithful_set(B, [], "left")


def test_scalar_invariance_on_z3_recovers_phi():
    cop = grouplike(group_algebra("z3"))
    res = scalar_invariance_to_integral(cop, Functional({0: 1}, "delta_e"))
    assert res.verdict == LAMBDA_EQUALS_PHI
    assert res.lam == {0: 1}
    assert res.agrees_everywhere and res.right_leg_full


def test_scalar_invariance_rejects_delta_g_on_z2():
    cop = grouplike(group_algebra("z2"))
    res = scalar_invariance_to_integral(cop, Functional({1: 1}, "delta_g"))
    assert res.verdict == NOT_SCALAR_INVARIANT
    assert res.witness == "g1"


def test_scalar_invariance_needs_full_range():
    # the zero coproduct on a unital algebra has no range at all
    A = DenseAlgebra(["u"], {(0, 0): {0: 1}}, unit={0: 1})
    cop = dual_function(A, lambda s, t: None)
    res = scalar_invariance_to_integral(cop, Functional({0: 1}, "phi"))
    assert res.verdict == HYPOTHESIS_FAILED
