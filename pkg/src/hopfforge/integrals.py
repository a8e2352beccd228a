"""Linear functionals, faithfulness, and integral checks.

A left integral phi satisfies (id (x) phi)((c (x) 1)D(a)(c' (x) 1)) = phi(a) c c'.
A right integral psi satisfies (psi (x) id)((1 (x) b')D(a)(1 (x) b)) = psi(a) b' b.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from .algebra import Algebra, CheckOutcome, Key, Vec, leg_multiplier, vscale
from .coproduct import Coproduct, PreconditionError
from .exact_linalg import ONE, ZERO, Indexer, SparseMat, Subspace, kernel_basis, scalar


class Functional:
    """Linear functional given by its values on basis keys."""

    def __init__(self, values: Mapping[Key, object], name: str = "omega", default=0):
        # ``default`` is the value on every key not listed; a nonzero default
        # describes functionals like the sum of all coefficients on an
        # infinite basis.
        self.default = scalar(default)
        self.values: dict[Key, Fraction] = {}
        for k, v in values.items():
            v = scalar(v)
            if v != self.default:
                self.values[k] = v
        self.name = name

    def value(self, key: Key) -> Fraction:
        return self.values.get(key, self.default)

    def __call__(self, x: Mapping[Key, Fraction]) -> Fraction:
        return sum((c * self.value(k) for k, c in x.items()), ZERO)

    def scaled(self, c, name: str | None = None) -> "Functional":
        c = scalar(c)
        return Functional(vscale(c, self.values), name or self.name, default=c * self.default)

    def is_zero(self) -> bool:
        return not self.default and not any(self.values.values())

    def __eq__(self, other) -> bool:
        if not isinstance(other, Functional):
            return NotImplemented
        return self.values == other.values and self.default == other.default

    def __repr__(self) -> str:
        extra = f", default={self.default}" if self.default else ""
        return f"Functional({self.name}, {self.values}{extra})"


@dataclass
class FaithfulnessReport:
    left_faithful: bool
    right_faithful: bool
    left_witness: Vec | None = None
    right_witness: Vec | None = None
    window: bool = False

    @property
    def faithful(self) -> bool:
        return self.left_faithful and self.right_faithful


def _pairing_kernel(alg: Algebra, functionals: list[Functional], side: str, window: int | None) -> Vec | None:
    """A nonzero a with w(a x) = 0 (left) or w(x a) = 0 (right) for all x, w."""
    keys = alg.window(window)
    idx = Indexer(keys)
    n = len(keys)
    entries: dict[tuple[int, int], Fraction] = {}
    row = 0
    for w in functionals:
        for x in keys:
            for ai, a in enumerate(keys):
                prod = alg.mul_basis(a, x) if side == "left" else alg.mul_basis(x, a)
                v = w(prod)
                if v:
                    entries[(row, ai)] = v
            row += 1
    ker = kernel_basis(SparseMat(row, n, entries))
    if not ker:
        return None
    return {idx.key(i): v for i, v in ker[0].entries.items()}


def check_faithful(alg: Algebra, omega: Functional, window: int | None = None) -> FaithfulnessReport:
    lw = _pairing_kernel(alg, [omega], "left", window)
    rw = _pairing_kernel(alg, [omega], "right", window)
    return FaithfulnessReport(lw is None, rw is None, lw, rw, window=not alg.is_dense)


def check_faithful_set(alg: Algebra, functionals: Iterable[Functional], side: str,
                       window: int | None = None) -> CheckOutcome:
    functionals = list(functionals)
    if not functionals:
        return CheckOutcome(False, witness="empty set of functionals is never faithful", window=not alg.is_dense)
    w = _pairing_kernel(alg, functionals, side, window)
    return CheckOutcome(w is None, witness=w, window=not alg.is_dense)


def _first_regular(cop: Coproduct, options: tuple[str, str], window: int | None) -> str:
    for o in options:
        if cop.check_regular(o, window):
            return o
    raise PreconditionError(f"neither {options[0]} nor {options[1]} is regular")


def _slice(img: Mapping[tuple, Fraction], functional: Functional, keep: int) -> Vec:
    """Apply the functional to one leg of a two-leg tensor, keep the other."""
    out: Vec = {}
    for key, c in img.items():
        w = functional.value(key[1 - keep])
        if w:
            k = key[keep]
            s = out.get(k, ZERO) + c * w
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


def check_left_integral(cop: Coproduct, phi: Functional, window: int | None = None) -> CheckOutcome:
    """(id (x) phi)((c (x) 1)D(a)(c' (x) 1)) = phi(a) c c' on window triples."""
    via = _first_regular(cop, ("T2", "T4"), window)
    A = cop.A
    if phi.is_zero():
        return CheckOutcome(False, witness="zero functional", window=not A.is_dense, detail={"via": via})
    keys = A.window(window)
    for a in keys:
        pa = phi({a: ONE})
        for c in keys:
            if via == "T2":
                y = _slice(cop.canonical("T2", c, a), phi, 0)
            for c2 in keys:
                if via == "T2":
                    lhs = A.multiply(y, {c2: ONE})
                else:
                    lhs = A.multiply({c: ONE}, _slice(cop.canonical("T4", c2, a), phi, 0))
                rhs = vscale(pa, A.mul_basis(c, c2))
                if lhs != rhs:
                    lab = A.label
                    return CheckOutcome(False, witness={"a": lab(a), "c": lab(c), "c'": lab(c2)},
                                        window=not A.is_dense, detail={"via": via})
    return CheckOutcome(True, window=not A.is_dense, detail={"via": via})


def check_right_integral(cop: Coproduct, psi: Functional, window: int | None = None) -> CheckOutcome:
    """(psi (x) id)((1 (x) b')D(a)(1 (x) b)) = psi(a) b' b on window triples."""
    via = _first_regular(cop, ("T1", "T3"), window)
    A = cop.A
    if psi.is_zero():
        return CheckOutcome(False, witness="zero functional", window=not A.is_dense, detail={"via": via})
    keys = A.window(window)
    for a in keys:
        pa = psi({a: ONE})
        for b in keys:
            if via == "T1":
                y = _slice(cop.canonical("T1", a, b), psi, 1)
            for b2 in keys:
                if via == "T1":
                    lhs = A.multiply({b2: ONE}, y)
                else:
                    lhs = A.multiply(_slice(cop.canonical("T3", a, b2), psi, 1), {b: ONE})
                rhs = vscale(pa, A.mul_basis(b2, b))
                if lhs != rhs:
                    lab = A.label
                    return CheckOutcome(False, witness={"a": lab(a), "b": lab(b), "b'": lab(b2)},
                                        window=not A.is_dense, detail={"via": via})
    return CheckOutcome(True, window=not A.is_dense, detail={"via": via})


@dataclass
class ScalarInvariance:
    verdict: str
    hypothesis: CheckOutcome
    witness: object = None
    lam: Vec | None = None
    agrees_everywhere: bool = False
    right_leg_full: bool = False
    detail: dict = field(default_factory=dict)


NOT_SCALAR_INVARIANT = "not-scalar-invariant"
LAMBDA_EQUALS_PHI = "scalar-invariant-lambda-equals-phi-on-W"
LAMBDA_DIFFERS = "scalar-invariant-lambda-differs-outside-W"
HYPOTHESIS_FAILED = "hypothesis-failed"


def scalar_invariance_to_integral(cop: Coproduct, phi: Functional) -> ScalarInvariance:
    """Test whether (id (x) phi)D(a) = lambda(a) 1 and compare lambda with phi.

    Requires T1 and T4 regular and D(A)(A (x) A) = A (x) A. Whenever the
    invariance holds, lambda must agree with phi on the right leg W.
    """
    A = cop.A
    if not A.is_dense:
        raise PreconditionError("scalar invariance is decided on dense algebras only")
    cop.require_regular("T1", "T4")
    n = A.dim
    AA = cop.AA
    span = Subspace(n * n)
    for a in range(n):
        for b in range(n):
            t4 = cop.canonical("T4", b, a)
            for c in range(n):
                prod = leg_multiplier(AA, 1, {c: ONE}).right(t4)
                span.add(AA.to_sparse(prod))
        if span.rank == n * n:
            break
    hyp = CheckOutcome(span.rank == n * n, detail={"rank": span.rank, "target": n * n})
    if not hyp:
        return ScalarInvariance(HYPOTHESIS_FAILED, hyp, witness="D(A)(A(x)A) is a proper subspace")
    lam: Vec = {}
    for a in range(n):
        value = None
        for c in range(n):
            y = _slice(cop.canonical("T4", c, a), phi, 0)
            # y must equal value * e_c
            if any(k != c for k in y):
                return ScalarInvariance(NOT_SCALAR_INVARIANT, hyp, witness=A.label(a))
            v = y.get(c, ZERO)
            if value is None:
                value = v
            elif v != value:
                return ScalarInvariance(NOT_SCALAR_INVARIANT, hyp, witness=A.label(a))
        if value:
            lam[a] = value
    W = cop.compute_leg("right", via="T4")
    on_w = all(sum((c * lam.get(k, ZERO) for k, c in w.items()), ZERO) == phi(w) for w in W.basis)
    everywhere = all(lam.get(k, ZERO) == phi.value(k) for k in range(n))
    if not on_w:
        # never expected: the statement guarantees agreement on the right leg
        raise AssertionError("lambda differs from phi on the right leg")
    if everywhere:
        verdict = LAMBDA_EQUALS_PHI
    else:
        if W.full:
            raise AssertionError("lambda differs from phi although the right leg is everything")
        verdict = LAMBDA_DIFFERS
    return ScalarInvariance(verdict, hyp, lam=lam, agrees_everywhere=everywhere, right_leg_full=W.full)
