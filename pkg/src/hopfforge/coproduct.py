"""Coproducts into the multiplier algebra of A (x) A and the four canonical
maps built from them.

Canonical maps, with inputs written as basis pairs:

    T1(a (x) b) = D(a)(1 (x) b)      T2(c (x) a) = (c (x) 1)D(a)
    T3(a (x) b) = (1 (x) b)D(a)      T4(c (x) a) = D(a)(c (x) 1)

A map is regular when every image lies in A (x) A itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .algebra import (Algebra, AlgebraError, CheckOutcome, DenseAlgebra, Key, Multiplier, TensorAlgebra, Vec,
                      accumulate, leg_multiplier, multiplier_as_element, multiplier_check, vadd)
from .exact_linalg import ONE, ZERO, Indexer, SparseMat, Subspace

MAPS = ("T1", "T2", "T3", "T4")

# which input slot carries the coproduct argument
_DELTA_SLOT = {"T1": 0, "T2": 1, "T3": 0, "T4": 1}

# (map acting on a (x) b, map acting on c (x) a) for each coassociativity form
COASSOC_VARIANTS = {
    "T1T2": ("T1", "T2"),
    "T3T4": ("T3", "T4"),
    "T1T4": ("T1", "T4"),
    "T2T3": ("T3", "T2"),
}


class PreconditionError(RuntimeError):
    """A required canonical map is not regular (or another input is missing)."""


@dataclass
class Regularity:
    which: str
    state: str  # "yes" | "no" | "window-yes"
    witness: object = None

    def __bool__(self) -> bool:
        return self.state != "no"

    @property
    def status(self) -> str:
        return {"yes": "pass", "window-yes": "window-pass", "no": "fail"}[self.state]


@dataclass
class LegSubspace:
    side: str
    via: str
    basis: list[Vec]
    full: bool
    window: bool = False
    omega: str | None = None

    @property
    def rank(self) -> int:
        return len(self.basis)


class Coproduct:
    """A map from basis keys to multipliers of A (x) A, extended linearly."""

    def __init__(self, algebra: Algebra, image: Callable[[Key], Multiplier], kind: str = "explicit",
                 params: dict | None = None):
        self.A = algebra
        self.AA = TensorAlgebra(algebra, 2)
        self.AAA = TensorAlgebra(algebra, 3)
        self._image_fn = image
        self.kind = kind
        self.params = params or {}
        self._images: dict[Key, Multiplier] = {}
        self._canon: dict[tuple, Vec | None] = {}
        self._matrices: dict[str, SparseMat] = {}
        self._regular: dict[tuple, Regularity] = {}

    # -- images -------------------------------------------------------------

    def image(self, key: Key) -> Multiplier:
        m = self._images.get(key)
        if m is None:
            m = self._image_fn(key)
            if m.ambient is not self.AA:
                m = Multiplier(self.AA, m.left, m.right, m.element)
            self._images[key] = m
        return m

    def delta(self, a: Mapping[Key, Fraction]) -> Multiplier:
        parts = [self.image(k).scaled(c) for k, c in a.items()]
        if not parts:
            return Multiplier(self.AA, lambda x: {}, lambda x: {}, {})
        out = parts[0]
        for p in parts[1:]:
            out = out + p
        return out

    def delta_element(self, a: Mapping[Key, Fraction]) -> Vec | None:
        """D(a) as an element of A (x) A when it is one."""
        out: Vec = {}
        for k, c in a.items():
            m = self.image(k)
            e = m.element if m.element is not None else multiplier_as_element(m, hint=[(k, k)])
            if e is None:
                return None
            accumulate(out, e, c)
        return out

    # -- canonical maps -------------------------------------------------------

    def canonical(self, which: str, x: Key, y: Key) -> Vec | None:
        """Image of the basis tensor x (x) y, or None when it leaves A (x) A."""
        key = (which, x, y)
        if key in self._canon:
            return self._canon[key]
        out = self._compute_canonical(which, x, y)
        self._canon[key] = out
        return out

    def _compute_canonical(self, which: str, x: Key, y: Key) -> Vec | None:
        if which not in MAPS:
            raise ValueError(f"unknown canonical map {which!r}")
        a = x if _DELTA_SLOT[which] == 0 else y
        other = y if _DELTA_SLOT[which] == 0 else x
        d = self.image(a)
        AA = self.AA
        unital = self.A.unit is not None
        if unital and d.element is not None:
            u = self.A.unit
            if which == "T1":
                return AA.multiply(d.element, _simple(u, {other: ONE}))
            if which == "T2":
                return AA.multiply(_simple({other: ONE}, u), d.element)
            if which == "T3":
                return AA.multiply(_simple(u, {other: ONE}), d.element)
            return AA.multiply(d.element, _simple({other: ONE}, u))
        if not self.A.is_dense:
            return self._canonical_by_local_units(which, d, x, y, other)
        if which == "T1":
            m, side = d * leg_multiplier(AA, 1, {other: ONE}), "left"
        elif which == "T2":
            m, side = leg_multiplier(AA, 0, {other: ONE}) * d, "right"
        elif which == "T3":
            m, side = leg_multiplier(AA, 1, {other: ONE}) * d, "right"
        else:
            m, side = d * leg_multiplier(AA, 0, {other: ONE}), "left"
        m.element = None
        return multiplier_as_element(m, side=side, hint=[(x, y)])

    def _canonical_by_local_units(self, which: str, d: Multiplier, x: Key, y: Key, other: Key) -> Vec | None:
        # Multiply the one-sided factor into a local unit of A (x) A first, so
        # only a thin slice of the unit is ever materialized. A result that
        # changes when the local unit grows is not an element of A (x) A.
        A = self.A
        results = []
        for u in A.local_units([x, y]):
            o = {other: ONE}
            if which == "T1":
                r = d.left(_simple(u, A.multiply(o, u)))
            elif which == "T2":
                r = d.right(_simple(A.multiply(u, o), u))
            elif which == "T3":
                r = d.right(_simple(u, A.multiply(u, o)))
            else:
                r = d.left(_simple(A.multiply(o, u), u))
            results.append(r)
        if any(r != results[0] for r in results[1:]):
            return None
        return results[0]

    def canonical_apply(self, which: str, x: Mapping[tuple, Fraction]) -> Vec | Multiplier:
        """Apply a canonical map to an element of A (x) A.

        Returns an element when every needed basis image is regular and the
        composite multiplier otherwise.
        """
        out: Vec = {}
        for (i, j), c in x.items():
            img = self.canonical(which, i, j)
            if img is None:
                return self._canonical_multiplier(which, x)
            accumulate(out, img, c)
        return out

    def _canonical_multiplier(self, which: str, x: Mapping[tuple, Fraction]) -> Multiplier:
        total = None
        for (i, j), c in x.items():
            a, other = (i, j) if _DELTA_SLOT[which] == 0 else (j, i)
            d = self.image(a)
            if which == "T1":
                m = d * leg_multiplier(self.AA, 1, {other: ONE})
            elif which == "T2":
                m = leg_multiplier(self.AA, 0, {other: ONE}) * d
            elif which == "T3":
                m = leg_multiplier(self.AA, 1, {other: ONE}) * d
            else:
                m = d * leg_multiplier(self.AA, 0, {other: ONE})
            m = m.scaled(c)
            total = m if total is None else total + m
        return total

    def check_regular(self, which: str, window: int | None = None) -> Regularity:
        ck = (which, window)
        if ck in self._regular:
            return self._regular[ck]
        keys = self.A.window(window)
        result = None
        if self.A.is_dense and self.A.unit is not None:
            result = Regularity(which, "yes")
        else:
            for x in keys:
                for y in keys:
                    if self.canonical(which, x, y) is None:
                        a = x if _DELTA_SLOT[which] == 0 else y
                        result = Regularity(which, "no", witness={"label": self.A.label(a),
                                                                  "pair": [self.A.label(x), self.A.label(y)]})
                        break
                if result:
                    break
            if result is None:
                result = Regularity(which, "yes" if self.A.is_dense else "window-yes")
        self._regular[ck] = result
        return result

    def require_regular(self, *which: str, window: int | None = None) -> None:
        for w in which:
            if not self.check_regular(w, window):
                raise PreconditionError(f"{w} is not regular")

    def t_matrix(self, which: str) -> SparseMat:
        """Matrix of a regular canonical map; column/row (i, j) -> i*n + j."""
        if which in self._matrices:
            return self._matrices[which]
        if not self.A.is_dense:
            raise PreconditionError("canonical map matrices exist only for dense algebras")
        self.require_regular(which)
        n = self.A.dim
        AA = self.AA
        entries: dict[tuple[int, int], Fraction] = {}
        for i in range(n):
            for j in range(n):
                col = i * n + j
                for k, v in self.canonical(which, i, j).items():
                    entries[(AA.index(k), col)] = v
        m = SparseMat(n * n, n * n, entries)
        self._matrices[which] = m
        return m

    # -- structural checks -----------------------------------------------------

    def check_homomorphism(self, window: int | None = None) -> CheckOutcome:
        A, AA = self.A, self.AA
        keys = A.window(window)
        probes = AA.window(window) if A.is_dense else [(s, t) for s in keys for t in keys]
        for i in keys:
            for j in keys:
                prod = A.mul_basis(i, j)
                lhs = self.delta(prod)
                rhs = self.image(i) * self.image(j)
                if lhs.element is not None and rhs.element is not None:
                    if lhs.element != rhs.element:
                        return CheckOutcome(False, witness=[A.label(i), A.label(j)], window=not A.is_dense)
                    continue
                for y in probes:
                    yv = {y: ONE}
                    if lhs.left(yv) != rhs.left(yv) or lhs.right(yv) != rhs.right(yv):
                        return CheckOutcome(False, witness=[A.label(i), A.label(j)], window=not A.is_dense)
        return CheckOutcome(True, window=not A.is_dense)

    def check_images_are_multipliers(self, window: int | None = None) -> CheckOutcome:
        keys = self.A.window(window)
        probes = self.AA.window(window) if self.A.is_dense else [(s, t) for s in keys for t in keys]
        for k in keys:
            m = self.image(k)
            if m.element is not None:
                continue
            res = multiplier_check(m, probes)
            if not res:
                return CheckOutcome(False, witness=self.A.label(k), window=res.window)
        return CheckOutcome(True, window=not self.A.is_dense)

    def check_coassoc(self, variant: str, window: int | None = None) -> CheckOutcome:
        """Check one three-legged form of coassociativity on window triples.

        With X acting on a (x) b and Y on c (x) a the identity reads
            sum X(a(x)b)_ij  Y(c (x) e_i) (x) e_j  =  sum Y(c(x)a)_ij  e_i (x) X(e_j (x) b).
        """
        if variant not in COASSOC_VARIANTS:
            raise ValueError(f"unknown coassociativity variant {variant!r}")
        X, Y = COASSOC_VARIANTS[variant]
        self.require_regular(X, Y, window=window)
        keys = self.A.window(window)
        for a in keys:
            for b in keys:
                xab = self.canonical(X, a, b)
                for c in keys:
                    lhs: Vec = {}
                    for (i, j), v in xab.items():
                        yc = self.canonical(Y, c, i)
                        if yc is None:
                            raise PreconditionError(f"{Y} is not regular")
                        for (k, l), w in yc.items():
                            _acc(lhs, (k, l, j), v * w)
                    rhs: Vec = {}
                    for (i, j), v in self.canonical(Y, c, a).items():
                        xj = self.canonical(X, j, b)
                        if xj is None:
                            raise PreconditionError(f"{X} is not regular")
                        for (k, l), w in xj.items():
                            _acc(rhs, (i, k, l), v * w)
                    if lhs != rhs:
                        lab = self.A.label
                        return CheckOutcome(False, witness={"a": lab(a), "b": lab(b), "c": lab(c)},
                                            window=not self.A.is_dense)
        return CheckOutcome(True, window=not self.A.is_dense)

    # -- legs ----------------------------------------------------------------

    def _leg_vectors(self, side: str, via: str, window: int | None, omega=None) -> Iterable[Vec]:
        keys = self.A.window(window)
        for x in keys:
            for y in keys:
                img = self.canonical(via, x, y)
                if img is None:
                    raise PreconditionError(f"{via} is not regular")
                if omega is None:
                    groups: dict[Key, Vec] = {}
                    for (i, j), v in img.items():
                        if side == "left":
                            groups.setdefault(j, {})[i] = v
                        else:
                            groups.setdefault(i, {})[j] = v
                    yield from groups.values()
                else:
                    out: Vec = {}
                    for (i, j), v in img.items():
                        w = omega.value(j if side == "left" else i)
                        if w:
                            _acc(out, i if side == "left" else j, v * w)
                    if out:
                        yield out

    def _pick_via(self, side: str, via: str | None, window: int | None) -> str:
        options = ("T1", "T3") if side == "left" else ("T2", "T4")
        if via is not None:
            if via not in options:
                raise ValueError(f"{via} cannot produce the {side} leg")
            self.require_regular(via, window=window)
            return via
        for o in options:
            if self.check_regular(o, window):
                return o
        raise PreconditionError(f"no regular canonical map available for the {side} leg")

    def _span(self, vectors: Iterable[Vec], window: int | None) -> tuple[list[Vec], bool]:
        idx = Indexer(self.A.window(window))
        sub = Subspace(None)
        for v in vectors:
            sub.add(idx.vec(v))
        basis = [idx.unvec(b) for b in sub.basis()]
        if self.A.is_dense:
            full = sub.rank == self.A.dim
        else:
            full = all(sub.contains(idx.vec({k: ONE})) for k in self.A.window(window))
        return basis, full

    def compute_leg(self, side: str, via: str | None = None, window: int | None = None) -> LegSubspace:
        via = self._pick_via(side, via, window)
        basis, full = self._span(self._leg_vectors(side, via, window), window)
        return LegSubspace(side, via, basis, full, window=not self.A.is_dense)

    def leg_via_functional(self, side: str, omega, via: str | None = None,
                           window: int | None = None) -> LegSubspace:
        via = self._pick_via(side, via, window)
        basis, full = self._span(self._leg_vectors(side, via, window, omega), window)
        return LegSubspace(side, via, basis, full, window=not self.A.is_dense, omega=getattr(omega, "name", None))

    def check_full(self, window: int | None = None) -> CheckOutcome:
        left = self.compute_leg("left", window=window)
        right = self.compute_leg("right", window=window)
        ok = left.full and right.full
        detail = {"leftRank": left.rank, "rightRank": right.rank}
        witness = None if ok else ("left leg" if not left.full else "right leg")
        return CheckOutcome(ok, witness=witness, window=not self.A.is_dense, detail=detail)

    # -- counit -------------------------------------------------------------

    def check_counit(self, eps, window: int | None = None) -> CheckOutcome:
        """(eps (x) id)(D(a)(1 (x) b)) = ab and (id (x) eps)((c (x) 1)D(a)) = ca."""
        self.require_regular("T1", "T2", window=window)
        A = self.A
        keys = A.window(window)
        for a in keys:
            for b in keys:
                lhs: Vec = {}
                for (i, j), v in self.canonical("T1", a, b).items():
                    w = eps.value(i)
                    if w:
                        _acc(lhs, j, v * w)
                if lhs != A.mul_basis(a, b):
                    return CheckOutcome(False, witness={"identity": "left", "a": A.label(a), "b": A.label(b)},
                                        window=not A.is_dense)
                # second identity with c = a, a = b
                rhs: Vec = {}
                for (i, j), v in self.canonical("T2", a, b).items():
                    w = eps.value(j)
                    if w:
                        _acc(rhs, i, v * w)
                if rhs != A.mul_basis(a, b):
                    return CheckOutcome(False, witness={"identity": "right", "c": A.label(a), "a": A.label(b)},
                                        window=not A.is_dense)
        return CheckOutcome(True, window=not A.is_dense)

    # -- derived coproducts ------------------------------------------------------

    def flipped(self) -> "Coproduct":
        """The opposite coproduct: D conjugated by the flip."""
        def image(k):
            m = self.image(k)
            elem = _swap(m.element) if m.element is not None else None
            return Multiplier(self.AA, lambda x: _swap(m.left(_swap(x))), lambda x: _swap(m.right(_swap(x))), elem)
        return Coproduct(self.A, image, kind="flipped", params={"of": self.kind})

    def on_opposite(self, opposite_algebra: Algebra) -> "Coproduct":
        """The same D viewed on the algebra with reversed product."""
        holder: dict = {}

        def image(k):
            m = self.image(k)
            return Multiplier(holder["cop"].AA, m.right, m.left, m.element)
        cop = Coproduct(opposite_algebra, image, kind="opposite", params={"of": self.kind})
        holder["cop"] = cop
        return cop


def _acc(out: dict, key, val: Fraction) -> None:
    s = out.get(key, ZERO) + val
    if s:
        out[key] = s
    else:
        out.pop(key, None)


def _simple(x: Mapping[Key, Fraction], y: Mapping[Key, Fraction]) -> Vec:
    out: Vec = {}
    for i, a in x.items():
        if not a:
            continue
        for j, b in y.items():
            if b:
                # skip Fraction arithmetic for the common unit coefficients
                out[(i, j)] = a if b == 1 else (b if a == 1 else a * b)
    return out


def _swap(x: Mapping[tuple, Fraction]) -> Vec:
    return {(j, i): v for (i, j), v in x.items()}


# -- constructors -----------------------------------------------------------

def grouplike(algebra: Algebra) -> Coproduct:
    """D(e_i) = e_i (x) e_i."""
    def image(k):
        e = {(k, k): ONE}
        return _element_multiplier(cop.AA, e)
    cop = Coproduct(algebra, image, kind="grouplike")
    return cop


def dual_function(algebra: Algebra, compose: Callable[[Key, Key], Key | None],
                  preimages: Callable[[Key], Iterable[tuple]] | None = None, params: dict | None = None) -> Coproduct:
    """D(delta_x) = sum over composable (s, t) with s t = x of delta_s (x) delta_t.

    For dense algebras the image is an element (``preimages`` enumerates the
    pairs). On supported algebras it is the multiplier that keeps exactly the
    basis tensors whose composite is x.
    """
    def image(k):
        if algebra.is_dense:
            pairs = preimages(k) if preimages else [(s, t) for s in algebra.window() for t in algebra.window()
                                                     if compose(s, t) == k]
            return _element_multiplier(cop.AA, {p: ONE for p in pairs})

        def keep(x):
            return {st: v for st, v in x.items() if compose(st[0], st[1]) == k}
        return Multiplier(cop.AA, keep, keep)
    cop = Coproduct(algebra, image, kind="dualfunction", params=params)
    return cop


def explicit(algebra: Algebra, left: Mapping[Key, Mapping[tuple, Vec]], right: Mapping[Key, Mapping[tuple, Vec]],
             elements: Mapping[Key, Vec] | None = None) -> Coproduct:
    """Coproduct given by per-basis action tables on basis tensors."""
    def image(k):
        ltab = left.get(k, {})
        rtab = right.get(k, {})

        def act(tab):
            def f(x):
                out: Vec = {}
                for key, c in x.items():
                    img = tab.get(key)
                    if img:
                        accumulate(out, img, c)
                return out
            return f
        elem = elements.get(k) if elements else None
        return Multiplier(cop.AA, act(ltab), act(rtab), elem)
    cop = Coproduct(algebra, image, kind="explicit")
    return cop


def explicit_from_elements(algebra: DenseAlgebra, images: Mapping[Key, Vec]) -> Coproduct:
    """Dense coproduct given by element images D(e_i) in A (x) A."""
    def image(k):
        return _element_multiplier(cop.AA, images.get(k, {}))
    cop = Coproduct(algebra, image, kind="explicit")
    return cop


def _element_multiplier(AA: TensorAlgebra, e: Vec) -> Multiplier:
    return Multiplier(AA, lambda x: AA.multiply(e, x), lambda x: AA.multiply(x, e), dict(e))


def action_tables(cop: Coproduct) -> tuple[dict, dict]:
    """Left/right action tables of a dense coproduct on basis tensors."""
    left, right = {}, {}
    for k in cop.A.window():
        m = cop.image(k)
        left[k] = {}
        right[k] = {}
        for y in cop.AA.window():
            lv = m.left({y: ONE})
            rv = m.right({y: ONE})
            if lv:
                left[k][y] = lv
            if rv:
                right[k][y] = rv
    return left, right


def opposite_algebra(alg: DenseAlgebra) -> DenseAlgebra:
    return alg.opposite()


__all__ = [
    "COASSOC_VARIANTS", "Coproduct", "LegSubspace", "MAPS", "PreconditionError", "Regularity", "action_tables",
    "dual_function", "explicit", "explicit_from_elements", "grouplike", "opposite_algebra", "vadd", "AlgebraError",
]
