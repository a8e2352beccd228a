from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopfforge.algebra import (
    AlgebraError, DenseAlgebra, Multiplier, PointwiseIntegers, SupportedAlgebra, TensorAlgebra, check_associative,
    check_idempotent_algebra, check_nondegenerate, identity_multiplier, leg_multiplier, multiplier_as_element,
    multiplier_check, multiplier_from_element, tensor_elements,
)
from oracles import all_groups, group_oracle

ONE = Fraction(1)


def group_algebra(name):
    labels = all_groups()[name]
    prod, _, e = group_oracle(name, labels)
    idx = {lab: i for i, lab in enumerate(labels)}
    table = {(i, j): {idx[prod(a, b)]: 1} for i, a in enumerate(labels) for j, b in enumerate(labels)}
    return DenseAlgebra(labels, table, unit={idx[e]: 1})


def zero_product(n=2):
    return DenseAlgebra([f"x{i}" for i in range(n)], {})


elements = st.dictionaries(st.integers(0, 5), st.fractions(-3, 3, max_denominator=3), max_size=4)


def test_group_algebras_are_associative_and_unital():
    for name in all_groups():
        A = group_algebra(name)
        assert check_associative(A) is None
        assert check_nondegenerate(A)
        assert check_idempotent_algebra(A)


def test_zero_product_algebra_is_degenerate_with_witness():
    out = check_nondegenerate(zero_product())
    assert not out
    assert out.witness


def test_non_associative_table_is_caught():
    # subtraction mod 3 on delta basis viewed as a product of group elements
    labels = ["a0", "a1", "a2"]
    A = DenseAlgebra(labels, {(i, j): {(i - j) % 3: 1} for i in range(3) for j in range(3)})
    assert check_associative(A) is not None


def test_bad_tables_are_rejected():
    with pytest.raises(AlgebraError):
        DenseAlgebra(["a", "a"], {})
    with pytest.raises(AlgebraError):
        DenseAlgebra(["a"], {(0, 0): {1: 1}})


@given(elements, elements, elements)
@settings(max_examples=50, deadline=None)
def test_s3_multiplication_is_associative_on_elements(x, y, z):
    A = group_algebra("s3")
    assert A.multiply(A.multiply(x, y), z) == A.multiply(x, A.multiply(y, z))


@given(elements, elements, st.fractions(-3, 3, max_denominator=3))
@settings(max_examples=50, deadline=None)
def test_multiplication_is_bilinear(x, y, c):
    A = group_algebra("s3")
    scaled = {k: c * v for k, v in x.items()}
    lhs = A.multiply(scaled, y)
    rhs = {k: c * v for k, v in A.multiply(x, y).items() if c * v}
    assert lhs == rhs


def test_tensor_product_is_componentwise():
    A = group_algebra("z3")
    AA = TensorAlgebra(A, 2)
    assert AA.dim == 9
    assert AA.mul_basis((1, 2), (2, 2)) == {(0, 1): ONE}
    assert AA.unit == {(0, 0): ONE}


def test_opposite_algebra_reverses_products():
    A = group_algebra("s3")
    op = A.opposite()
    for i in range(6):
        for j in range(6):
            assert op.mul_basis(i, j) == A.mul_basis(j, i)


def test_supported_window_and_local_units():
    A = SupportedAlgebra(PointwiseIntegers(), default_window=2)
    assert A.window() == [-2, -1, 0, 1, 2]
    assert not A.is_dense
    assert check_nondegenerate(A).status == "window-pass"
    u = A.local_units([3])[0]
    assert A.multiply(u, {3: ONE}) == {3: ONE}


def test_multipliers_of_a_unital_algebra_are_elements():
    A = group_algebra("z4")
    m = multiplier_from_element(A, {1: ONE, 2: Fraction(1, 2)})
    assert multiplier_check(m, A.window())
    stripped = Multiplier(A, m.left, m.right)
    assert multiplier_as_element(stripped, verify=True) == {1: ONE, 2: Fraction(1, 2)}


def test_identity_multiplier_on_integers_is_not_an_element():
    A = SupportedAlgebra(PointwiseIntegers(), default_window=3)
    assert multiplier_as_element(identity_multiplier(A), hint=[0]) is None


def test_incompatible_pair_is_not_a_multiplier():
    A = group_algebra("z3")
    left = multiplier_from_element(A, {1: ONE}).left
    right = multiplier_from_element(A, {2: ONE}).right
    assert not multiplier_check(Multiplier(A, left, right), A.window())


def test_leg_multiplier_acts_on_one_factor():
    A = group_algebra("z2")
    AA = TensorAlgebra(A, 2)
    m = leg_multiplier(AA, 1, {1: ONE})
    assert m.left({(0, 0): ONE}) == {(0, 1): ONE}
    assert m.element == tensor_elements([{0: ONE}, {1: ONE}])
