"""Algebras given by a basis and a product rule, their tensor powers and
multipliers.

Elements are plain dicts from basis keys to nonzero Fractions. Dense
algebras use integer keys ``0..n-1``; tensor powers use tuples of keys.
Supported algebras have an infinite basis and expose finite windows plus
local units so that multiplier identities can be checked window by window.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Mapping, Sequence

from .exact_linalg import ONE, ZERO, Indexer, SparseMat, SparseVec, Subspace, kernel_basis, scalar, solve

Key = Hashable
Vec = dict


class AlgebraError(ValueError):
    """Malformed algebra data or mismatched operands."""


# ---------------------------------------------------------------- vectors

def clean(v: Mapping[Key, object]) -> Vec:
    return {k: scalar(c) for k, c in v.items() if scalar(c)}


def vadd(*vs: Mapping[Key, Fraction]) -> Vec:
    out: Vec = {}
    for v in vs:
        for k, c in v.items():
            s = out.get(k, ZERO) + c
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


def vscale(c, v: Mapping[Key, Fraction]) -> Vec:
    c = scalar(c)
    if not c:
        return {}
    return {k: c * x for k, x in v.items()}


def vsub(a: Mapping[Key, Fraction], b: Mapping[Key, Fraction]) -> Vec:
    return vadd(a, vscale(-1, b))


def accumulate(out: Vec, v: Mapping[Key, Fraction], c: Fraction = ONE) -> None:
    """In-place ``out += c * v``."""
    if not c:
        return
    for k, x in v.items():
        s = out.get(k, ZERO) + c * x
        if s:
            out[k] = s
        else:
            out.pop(k, None)


def basis_vec(key: Key) -> Vec:
    return {key: ONE}


# --------------------------------------------------------------- algebras

class Algebra:
    """Common interface. Subclasses implement ``mul_basis``."""

    kind = "abstract"
    unit: Vec | None = None

    def mul_basis(self, i: Key, j: Key) -> Vec:  # pragma: no cover - abstract
        raise NotImplementedError

    def multiply(self, x: Mapping[Key, Fraction], y: Mapping[Key, Fraction]) -> Vec:
        out: Vec = {}
        for i, a in x.items():
            for j, b in y.items():
                prod = self.mul_basis(i, j)
                if prod:
                    accumulate(out, prod, a * b)
        return out

    def window(self, k: int | None = None) -> list[Key]:  # pragma: no cover - abstract
        raise NotImplementedError

    @property
    def is_dense(self) -> bool:
        return self.kind == "dense"

    @property
    def is_unital(self) -> bool:
        return self.unit is not None

    def local_units(self, keys: Iterable[Key]) -> list[Vec]:
        """Increasing local units acting as identity on the given keys.

        Unital algebras return just the unit. Used to turn multipliers that
        happen to lie in the algebra into honest elements.
        """
        if self.unit is not None:
            return [self.unit]
        raise AlgebraError("no local units available")

    def label(self, key: Key) -> str:
        return str(key)


class DenseAlgebra(Algebra):
    kind = "dense"

    def __init__(self, labels: Sequence[str], table: Mapping[tuple[int, int], Mapping[int, object]],
                 unit: Mapping[int, object] | None = None):
        self.labels = [str(x) for x in labels]
        if len(set(self.labels)) != len(self.labels):
            raise AlgebraError("duplicate basis labels")
        self.n = len(self.labels)
        self._table: dict[tuple[int, int], Vec] = {}
        for (i, j), prod in table.items():
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise AlgebraError(f"product index ({i}, {j}) out of range")
            v = clean(prod)
            if any(not (0 <= k < self.n) for k in v):
                raise AlgebraError(f"product e{i}*e{j} leaves the basis")
            if v:
                self._table[(i, j)] = v
        self.unit = clean(unit) if unit is not None else None
        self._index = {lab: i for i, lab in enumerate(self.labels)}

    @property
    def dim(self) -> int:
        return self.n

    def mul_basis(self, i: int, j: int) -> Vec:
        return self._table.get((i, j), {})

    def window(self, k: int | None = None) -> list[int]:
        return list(range(self.n))

    def label(self, key: int) -> str:
        return self.labels[key]

    def key_of(self, label: str) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise AlgebraError(f"unknown basis label {label!r}") from None

    def table(self) -> dict[tuple[int, int], Vec]:
        return dict(self._table)

    def opposite(self) -> "DenseAlgebra":
        return DenseAlgebra(self.labels, {(j, i): v for (i, j), v in self._table.items()}, self.unit)

    def to_sparse(self, x: Mapping[int, Fraction]) -> SparseVec:
        return SparseVec(dict(x), self.n)

    def from_sparse(self, v: SparseVec) -> Vec:
        return dict(v.entries)

    def left_mult_matrix(self, a: Mapping[int, Fraction]) -> SparseMat:
        cols = [self.to_sparse(self.multiply(a, {j: ONE})) for j in range(self.n)]
        return SparseMat.from_columns(cols, self.n)

    def right_mult_matrix(self, a: Mapping[int, Fraction]) -> SparseMat:
        cols = [self.to_sparse(self.multiply({j: ONE}, a)) for j in range(self.n)]
        return SparseMat.from_columns(cols, self.n)


class SupportedRule:
    """Product rule on an infinite, enumerable basis."""

    name = "abstract"

    def mul(self, i: Key, j: Key) -> Vec:  # pragma: no cover - abstract
        raise NotImplementedError

    def window(self, k: int) -> list[Key]:  # pragma: no cover - abstract
        raise NotImplementedError

    def local_unit(self, radius: int) -> Vec:  # pragma: no cover - abstract
        raise NotImplementedError

    def radius(self, key: Key) -> int:  # pragma: no cover - abstract
        raise NotImplementedError

    def parse_label(self, label: str) -> Key:
        return label

    def params(self) -> dict:
        return {}


class PointwiseIntegers(SupportedRule):
    """Finitely supported functions on the integers, pointwise product.

    Basis: indicator functions delta_n, labelled by the integer n.
    """

    name = "pointwise-integers"

    def mul(self, i: int, j: int) -> Vec:
        return {i: ONE} if i == j else {}

    def window(self, k: int) -> list[int]:
        return list(range(-k, k + 1))

    def local_unit(self, radius: int) -> Vec:
        return {n: ONE for n in range(-radius, radius + 1)}

    def radius(self, key: int) -> int:
        return abs(key)

    def parse_label(self, label) -> int:
        return int(label)


SUPPORTED_RULES: dict[str, Callable[..., SupportedRule]] = {
    PointwiseIntegers.name: PointwiseIntegers,
}


class SupportedAlgebra(Algebra):
    kind = "supported"

    def __init__(self, rule: SupportedRule, default_window: int = 4):
        self.rule = rule
        self.default_window = default_window
        self.unit = None

    def mul_basis(self, i: Key, j: Key) -> Vec:
        return self.rule.mul(i, j)

    def window(self, k: int | None = None) -> list[Key]:
        return self.rule.window(self.default_window if k is None else k)

    def local_units(self, keys: Iterable[Key]) -> list[Vec]:
        r = max((self.rule.radius(k) for k in keys), default=0)
        r = 2 * max(r, 1)
        return [self.rule.local_unit(r), self.rule.local_unit(2 * r)]

    def key_of(self, label) -> Key:
        return self.rule.parse_label(label)


class TensorAlgebra(Algebra):
    """Tensor power of an algebra with the componentwise product."""

    def __init__(self, base: Algebra, power: int = 2):
        if power < 1:
            raise AlgebraError("tensor power must be positive")
        self.base = base
        self.power = power
        self.kind = base.kind
        if base.unit is not None:
            self.unit = tensor_elements([base.unit] * power)
        else:
            self.unit = None
        self._cache: dict[tuple, Vec] = {}

    def mul_basis(self, i: tuple, j: tuple) -> Vec:
        hit = self._cache.get((i, j))
        if hit is not None:
            return hit
        parts = []
        for a, b in zip(i, j):
            p = self.base.mul_basis(a, b)
            if not p:
                self._cache[(i, j)] = {}
                return {}
            parts.append(p)
        out = tensor_elements(parts)
        self._cache[(i, j)] = out
        return out

    def window(self, k: int | None = None) -> list[tuple]:
        return list(itertools.product(self.base.window(k), repeat=self.power))

    @property
    def dim(self) -> int:
        return self.base.dim ** self.power

    def index(self, key: tuple) -> int:
        n = self.base.dim
        out = 0
        for k in key:
            out = out * n + k
        return out

    def key_at(self, idx: int) -> tuple:
        n = self.base.dim
        parts = []
        for _ in range(self.power):
            idx, r = divmod(idx, n)
            parts.append(r)
        return tuple(reversed(parts))

    def to_sparse(self, x: Mapping[tuple, Fraction]) -> SparseVec:
        return SparseVec({self.index(k): v for k, v in x.items()}, self.dim)

    def from_sparse(self, v: SparseVec) -> Vec:
        return {self.key_at(i): c for i, c in v.entries.items()}

    def local_units(self, keys: Iterable[tuple]) -> list[Vec]:
        if self.unit is not None:
            return [self.unit]
        flat = [k for key in keys for k in key]
        return [tensor_elements([u] * self.power) for u in self.base.local_units(flat)]

    def label(self, key: tuple) -> str:
        return "(x)".join(self.base.label(k) for k in key)


def tensor_elements(parts: Sequence[Mapping[Key, Fraction]]) -> Vec:
    out: Vec = {(): ONE}
    for p in parts:
        nxt: Vec = {}
        for k, a in out.items():
            for j, b in p.items():
                nxt[k + (j,)] = a * b
        out = nxt
    return {k: v for k, v in out.items() if v}


def leg(x: Mapping[tuple, Fraction], positions: Sequence[int], power: int, fill: Mapping[int, Key]) -> Vec:
    """Place a tensor ``x`` into the given legs of a higher tensor power.

    ``fill`` gives fixed basis keys for the remaining legs (used when the
    remaining legs carry a basis element rather than a unit).
    """
    out: Vec = {}
    for key, c in x.items():
        slots: list = [None] * power
        for pos, k in zip(positions, key):
            slots[pos] = k
        for pos, k in fill.items():
            slots[pos] = k
        out[tuple(slots)] = out.get(tuple(slots), ZERO) + c
    return {k: v for k, v in out.items() if v}


def check_associative(alg: Algebra, window: int | None = None) -> tuple | None:
    """First basis triple violating associativity, or None."""
    keys = alg.window(window)
    for i in keys:
        for j in keys:
            ij = alg.mul_basis(i, j)
            for k in keys:
                lhs = alg.multiply(ij, {k: ONE})
                rhs = alg.multiply({i: ONE}, alg.mul_basis(j, k))
                if lhs != rhs:
                    return (i, j, k)
    return None


@dataclass
class CheckOutcome:
    """Pass/fail with an optional witness; ``window`` marks window-only checks."""

    ok: bool
    witness: object = None
    window: bool = False
    detail: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.ok

    @property
    def status(self) -> str:
        if not self.ok:
            return "fail"
        return "window-pass" if self.window else "pass"


def check_nondegenerate(alg: Algebra, window: int | None = None) -> CheckOutcome:
    """Fails iff some nonzero a has aA = 0 or Aa = 0."""
    if isinstance(alg, (DenseAlgebra, TensorAlgebra)) and alg.is_dense:
        n = alg.dim
        keys = alg.window()
        if alg.unit is not None:
            return CheckOutcome(True, detail={"reason": "unital"})
        idx = Indexer(keys)
        for side in ("left", "right"):
            rows: dict[tuple[int, int], Fraction] = {}
            for bi, b in enumerate(keys):
                for ai, a in enumerate(keys):
                    prod = alg.mul_basis(a, b) if side == "left" else alg.mul_basis(b, a)
                    for k, v in prod.items():
                        rows[(bi * n + idx.index(k), ai)] = v
            m = SparseMat(n * n, n, rows)
            ker = kernel_basis(m)
            if ker:
                witness = {idx.key(i): v for i, v in ker[0].entries.items()}
                return CheckOutcome(False, witness=witness, detail={"side": side})
        return CheckOutcome(True)
    keys = alg.window(window)
    for a in keys:
        if not any(alg.mul_basis(a, b) for b in keys) or not any(alg.mul_basis(b, a) for b in keys):
            return CheckOutcome(False, witness={a: ONE}, window=True)
    return CheckOutcome(True, window=True)


def check_idempotent_algebra(alg: DenseAlgebra) -> bool:
    """True iff the products e_i e_j span the algebra."""
    if alg.unit is not None:
        return True
    span = Subspace(alg.dim)
    for i in range(alg.dim):
        for j in range(alg.dim):
            span.add(alg.to_sparse(alg.mul_basis(i, j)))
            if span.rank == alg.dim:
                return True
    return span.rank == alg.dim


# -------------------------------------------------------------- multipliers

class Multiplier:
    """A compatible pair of left and right actions on an algebra."""

    __slots__ = ("ambient", "left", "right", "element")

    def __init__(self, ambient: Algebra, left: Callable[[Vec], Vec], right: Callable[[Vec], Vec],
                 element: Vec | None = None):
        self.ambient = ambient
        self.left = left
        self.right = right
        self.element = element

    def __mul__(self, other: "Multiplier") -> "Multiplier":
        if other.ambient is not self.ambient:
            raise AlgebraError("multipliers over different algebras")
        f, g = self, other
        elem = None
        if f.element is not None and g.element is not None:
            elem = f.ambient.multiply(f.element, g.element)
        return Multiplier(f.ambient, lambda x: f.left(g.left(x)), lambda x: g.right(f.right(x)), elem)

    def __add__(self, other: "Multiplier") -> "Multiplier":
        f, g = self, other
        elem = vadd(f.element, g.element) if f.element is not None and g.element is not None else None
        return Multiplier(f.ambient, lambda x: vadd(f.left(x), g.left(x)), lambda x: vadd(f.right(x), g.right(x)), elem)

    def scaled(self, c) -> "Multiplier":
        c = scalar(c)
        f = self
        elem = vscale(c, f.element) if f.element is not None else None
        return Multiplier(f.ambient, lambda x: vscale(c, f.left(x)), lambda x: vscale(c, f.right(x)), elem)


def multiplier_from_element(alg: Algebra, a: Mapping[Key, Fraction]) -> Multiplier:
    a = clean(a)
    return Multiplier(alg, lambda x: alg.multiply(a, x), lambda x: alg.multiply(x, a), a)


def identity_multiplier(alg: Algebra) -> Multiplier:
    return Multiplier(alg, lambda x: dict(x), lambda x: dict(x), dict(alg.unit) if alg.unit else None)


def zero_multiplier(alg: Algebra) -> Multiplier:
    return Multiplier(alg, lambda x: {}, lambda x: {}, {})


def multiplier_check(m: Multiplier, keys: Iterable[Key]) -> CheckOutcome:
    """Verify a(m b) = (a m) b on all pairs of the given basis keys."""
    alg = m.ambient
    keys = list(keys)
    lefts = [m.left({b: ONE}) for b in keys]
    for a in keys:
        am = m.right({a: ONE})
        for b, mb in zip(keys, lefts):
            if alg.multiply({a: ONE}, mb) != alg.multiply(am, {b: ONE}):
                return CheckOutcome(False, witness=(a, b), window=not alg.is_dense)
    return CheckOutcome(True, window=not alg.is_dense)


def multiplier_as_element(m: Multiplier, side: str = "left", hint: Iterable[Key] = (),
                          verify: bool = False) -> Vec | None:
    """Return e in the algebra with e acting like m, or None.

    Dense unital: m applied to the unit, then verified. Dense non-unital:
    solve e*y = m.left(y) for all basis y. Supported: apply m to growing
    local units and accept only a stable result.
    """
    alg = m.ambient
    if m.element is not None:
        return dict(m.element)
    act = m.left if side == "left" else m.right
    if alg.is_dense:
        if alg.unit is not None:
            # on a unital algebra every multiplier is m(1); verification is
            # only needed when the action pair itself is suspect
            cand = act(alg.unit)
            if verify and not _agrees(m, cand, alg.window()):
                return None
            return cand
        return _solve_dense_element(m)
    hint = list(hint)
    units = alg.local_units(hint)
    results = [act(u) for u in units]
    if any(r != results[0] for r in results[1:]):
        return None
    probe = list(hint) + [k for k in results[0]]
    if not _agrees(m, results[0], probe):
        return None
    return results[0]


def _agrees(m: Multiplier, e: Vec, keys: Iterable[Key]) -> bool:
    alg = m.ambient
    for k in keys:
        y = {k: ONE}
        if alg.multiply(e, y) != m.left(y) or alg.multiply(y, e) != m.right(y):
            return False
    return True


def _solve_dense_element(m: Multiplier) -> Vec | None:
    alg = m.ambient
    keys = alg.window()
    n = len(keys)
    idx = Indexer(keys)
    entries: dict[tuple[int, int], Fraction] = {}
    rhs: dict[int, Fraction] = {}
    row_base = 0
    for y in keys:
        for side in ("left", "right"):
            target = m.left({y: ONE}) if side == "left" else m.right({y: ONE})
            for ei, e in enumerate(keys):
                prod = alg.mul_basis(e, y) if side == "left" else alg.mul_basis(y, e)
                for k, v in prod.items():
                    entries[(row_base + idx.index(k), ei)] = v
            for k, v in target.items():
                rhs[row_base + idx.index(k)] = v
            row_base += n
    sol = solve(SparseMat(row_base, n, entries), SparseVec(rhs, row_base))
    if sol is None:
        return None
    return {idx.key(i): v for i, v in sol.entries.items()}


def leg_multiplier(tensor_alg: TensorAlgebra, position: int, b: Mapping[Key, Fraction]) -> Multiplier:
    """The multiplier 1 (x) .. b .. (x) 1 with ``b`` in the given leg."""
    base = tensor_alg.base
    b = clean(b)

    def act(x: Vec, from_left: bool) -> Vec:
        out: Vec = {}
        for key, c in x.items():
            k = key[position]
            prod = base.multiply(b, {k: ONE}) if from_left else base.multiply({k: ONE}, b)
            for kk, v in prod.items():
                nk = key[:position] + (kk,) + key[position + 1:]
                s = out.get(nk, ZERO) + c * v
                if s:
                    out[nk] = s
                else:
                    out.pop(nk, None)
        return out

    elem = None
    if base.unit is not None:
        parts = [base.unit] * tensor_alg.power
        parts[position] = b
        elem = tensor_elements(parts)
    return Multiplier(tensor_alg, lambda x: act(x, True), lambda x: act(x, False), elem)


def element_label(alg: Algebra, x: Mapping[Key, Fraction]) -> list:
    """Witness form: sorted [label, "p/q"] pairs."""
    from .exact_linalg import format_scalar
    return [[alg.label(k), format_scalar(v)] for k, v in sorted(x.items(), key=lambda kv: _sort_key(kv[0]))]


def _sort_key(k):
    return k if isinstance(k, tuple) else (k,)
