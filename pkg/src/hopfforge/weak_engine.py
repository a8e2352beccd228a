"""Weak multiplier Hopf structure driven by a separability idempotent E.

Everything here works on unital dense algebras, where E, the legs B and C,
and the twisted copies F1..F4 are honest elements. The one exception is the
degenerate case E = 1 (x) 1, which also runs on a window of an algebra
without unit. The engine verifies the
conditions on E, derives E from the coproduct, checks weak integrals, and
compares kernels and ranges of the canonical maps with the E-based
formulas.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .algebra import (CheckOutcome, DenseAlgebra, Key, TensorAlgebra, Vec, accumulate, element_label,
                      tensor_elements, vscale, vsub)
from .coproduct import MAPS, Coproduct, PreconditionError
from .evidence import (FAIL, PASS, SKIPPED, Classification, Evidence, InconsistencyError, Timer, from_outcome,
                       skipped, status_of)
from .exact_linalg import ONE, ZERO, Indexer, SparseMat, SparseVec, Subspace, kernel_basis, rank, solve
from .integrals import Functional, check_faithful_set
from .ls_engine import (FAIL_VERDICT, HOPF, HOPF_INVERTIBLE_S, LEFT_MHA, LIFT_INTEGRAL, LIFT_REGULAR_PAIR,
                        MULTIPLIER_HOPF, REGULAR_MULTIPLIER_HOPF, RIGHT_MHA, LSEngine, base_ok, basic_evidence,
                        check_lifts, idempotent_algebra, slice_leg)
from .ls_engine import classify as classify_ls

REGULAR_WEAK_MHA = "RegularWeakMHA"
WEAK_MHA = "WeakMHA"
LEFT_WEAK_MHA = "LeftWeakMHA"
RIGHT_WEAK_MHA = "RightWeakMHA"

ONE_SIDED_CAVEAT = ("one-sided weak multiplier Hopf algebras have no developed general theory; "
                    "the verdict records only the proved bijectivity-with-E statements")

# weak verdict -> multiplier Hopf verdict once E = 1 (x) 1
DEGENERATE_VERDICT = {
    REGULAR_WEAK_MHA: HOPF_INVERTIBLE_S,
    WEAK_MHA: HOPF,
    LEFT_WEAK_MHA: LEFT_MHA,
    RIGHT_WEAK_MHA: RIGHT_MHA,
    FAIL_VERDICT: FAIL_VERDICT,
}

# the same reading without a unit in A: multipliers, not elements
DEGENERATE_VERDICT_NONUNITAL = {
    REGULAR_WEAK_MHA: REGULAR_MULTIPLIER_HOPF,
    WEAK_MHA: MULTIPLIER_HOPF,
    LEFT_WEAK_MHA: LEFT_MHA,
    RIGHT_WEAK_MHA: RIGHT_MHA,
    FAIL_VERDICT: FAIL_VERDICT,
}

# faithful-set hypotheses for the kernel formulas: (integral kind, faithful side)
KERNEL_HYPOTHESES = {
    "T1": ("right", "right"),
    "T2": ("left", "left"),
    "T3": ("right", "left"),
    "T4": ("left", "right"),
}


def _require_unital_dense(A) -> DenseAlgebra:
    if not (A.is_dense and A.unit is not None):
        raise PreconditionError("the weak engine needs a unital dense algebra (E must be an element)")
    return A


# -------------------------------------------------------------- tensor helpers

def embed(x: Mapping[tuple, Fraction], positions: Sequence[int], power: int, unit: Mapping[Key, Fraction]) -> Vec:
    """Place x in the given legs of a tensor power and the unit in the others."""
    out: Vec = {}
    free = [p for p in range(power) if p not in positions]
    for key, c in x.items():
        for ukey, uc in tensor_elements([unit] * len(free)).items():
            slots = [None] * power
            for p, k in zip(positions, key):
                slots[p] = k
            for p, k in zip(free, ukey):
                slots[p] = k
            t = tuple(slots)
            s = out.get(t, ZERO) + c * uc
            if s:
                out[t] = s
            else:
                out.pop(t, None)
    return out


def _subspace(vectors, idx: Indexer) -> Subspace:
    sub = Subspace(len(idx))
    for v in vectors:
        sub.add(idx.vec(v, grow=False))
    return sub


def _coords(basis: list[Vec], v: Vec, keys: list[Key]) -> list[Fraction] | None:
    """Coordinates of v in a list of independent vectors, or None."""
    idx = Indexer(keys)
    cols = [idx.vec(b, grow=False) for b in basis]
    m = SparseMat.from_columns(cols, len(idx))
    sol = solve(m, idx.vec(v, grow=False))
    if sol is None:
        return None
    return [sol[i] for i in range(len(basis))]


# ------------------------------------------------------- separability idempotent

@dataclass
class LinearMap:
    """Linear map given on a basis of its domain."""

    domain: list[Vec]
    images: list[Vec]
    keys: list[Key]

    def __call__(self, v: Vec) -> Vec:
        c = _coords(self.domain, v, self.keys)
        if c is None:
            raise PreconditionError("vector outside the domain of the map")
        out: Vec = {}
        for ci, img in zip(c, self.images):
            if ci:
                accumulate(out, img, ci)
        return out

    def inverse(self) -> "LinearMap":
        return LinearMap(self.images, self.domain, self.keys)


@dataclass
class SeparabilityIdempotent:
    E: Vec
    B: list[Vec] = field(default_factory=list)
    C: list[Vec] = field(default_factory=list)
    SB: LinearMap | None = None
    SC: LinearMap | None = None
    evidence: list[Evidence] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(not e.failed for e in self.evidence)


@dataclass
class FElements:
    F1: Vec
    F2: Vec
    F3: Vec
    F4: Vec
    evidence: list[Evidence] = field(default_factory=list)

    def get(self, which: str) -> Vec:
        return {"T1": self.F1, "T2": self.F2, "T3": self.F3, "T4": self.F4}[which]


class WeakContext:
    """Shared tensor algebras and cached spans for one coproduct."""

    def __init__(self, cop: Coproduct):
        self.cop = cop
        self.A = _require_unital_dense(cop.A)
        self.AA = cop.AA
        self.AAA = TensorAlgebra(self.A, 3)
        self.keys = self.A.window()
        self.pairs = self.AA.window()
        self.idx2 = Indexer(self.pairs)
        self.unit = self.A.unit
        self._deltas = {a: cop.delta_element({a: ONE}) for a in self.keys}

    def delta(self, a: Key) -> Vec:
        return self._deltas[a]

    def delta_of(self, x: Mapping[Key, Fraction]) -> Vec:
        out: Vec = {}
        for k, c in x.items():
            accumulate(out, self._deltas[k], c)
        return out

    def left_range(self) -> Subspace:
        """span D(a)(b (x) c)."""
        return _subspace((self.AA.multiply(self.delta(a), {y: ONE}) for a in self.keys for y in self.pairs), self.idx2)

    def right_range(self) -> Subspace:
        """span (b (x) c)D(a)."""
        return _subspace((self.AA.multiply({y: ONE}, self.delta(a)) for a in self.keys for y in self.pairs), self.idx2)

    def mul2(self, x: Vec, y: Vec) -> Vec:
        return self.AA.multiply(x, y)

    def mul3(self, x: Vec, y: Vec) -> Vec:
        return self.AAA.multiply(x, y)

    def one_tensor(self, a: Mapping[Key, Fraction], position: int) -> Vec:
        """1 (x) a (position 1) or a (x) 1 (position 0)."""
        return embed({(k,): c for k, c in a.items()}, [position], 2, self.unit)

    def one_one(self) -> Vec:
        return tensor_elements([self.unit, self.unit])

    def label(self, x: Vec):
        return element_label(self.AA, x)


def verify_E(cop: Coproduct, E: Vec, ctx: WeakContext | None = None) -> SeparabilityIdempotent:
    """Check every property of a separability idempotent and compute its legs."""
    ctx = ctx or WeakContext(cop)
    A, AA = ctx.A, ctx.AA
    ev: list[Evidence] = []
    out = SeparabilityIdempotent(dict(E), evidence=ev)

    ok = ctx.mul2(E, E) == E
    ev.append(Evidence("weak.E.idempotent", status_of(ok, False), None if ok else "E*E != E"))

    bad = None
    for a in ctx.keys:
        d = ctx.delta(a)
        if ctx.mul2(E, d) != d or ctx.mul2(d, E) != d:
            bad = A.label(a)
            break
    ev.append(Evidence("weak.E.absorbs", status_of(bad is None, False), bad))

    e_left = _subspace((ctx.mul2(E, {y: ONE}) for y in ctx.pairs), ctx.idx2)
    e_right = _subspace((ctx.mul2({y: ONE}, E) for y in ctx.pairs), ctx.idx2)
    d_left, d_right = ctx.left_range(), ctx.right_range()
    ok_l = e_left == d_left
    ok_r = e_right == d_right
    ev.append(Evidence("weak.E.range", status_of(ok_l and ok_r, False),
                       None if ok_l and ok_r else ("left" if not ok_l else "right"),
                       {"rankDeltaLeft": d_left.rank, "rankELeft": e_left.rank,
                        "rankDeltaRight": d_right.rank, "rankERight": e_right.rank}))

    ok = _extension_identity(ctx, E)
    ev.append(Evidence("weak.E.coassoc", status_of(ok, False), None if ok else "(D (x) id)E"))

    # legs B and C
    B = _leg_span(ctx, E, "B")
    C = _leg_span(ctx, E, "C")
    out.B, out.C = B, C
    ev.append(Evidence("weak.legs", PASS, None, {"dimB": len(B), "dimC": len(C)}))

    sb = _solve_anti(ctx, E, B, C, "SB")
    sc = _solve_anti(ctx, E, C, B, "SC")
    out.SB, out.SC = sb, sc
    ok = sb is not None and sc is not None
    ev.append(Evidence("weak.SB.exists", status_of(ok, False), None if ok else ("SB" if sb is None else "SC")))
    if ok:
        ok_b = _anti_multiplicative(ctx, sb)
        ok_c = _anti_multiplicative(ctx, sc)
        ev.append(Evidence("weak.SB.antimultiplicative", status_of(ok_b and ok_c, False),
                           None if ok_b and ok_c else ("SB" if not ok_b else "SC")))
    else:
        ev.append(skipped("weak.SB.antimultiplicative", "SB or SC does not exist"))

    commute = all(A.multiply(b, c) == A.multiply(c, b) for b in B for c in C)
    ev.append(Evidence("weak.legs.commute", status_of(commute, False), None if commute else "B, C"))
    nondeg = all(_span_rank(ctx, [A.multiply(x, {a: ONE}) for x in L for a in ctx.keys]) == A.dim and
                 _span_rank(ctx, [A.multiply({a: ONE}, x) for x in L for a in ctx.keys]) == A.dim
                 for L in (B, C))
    ev.append(Evidence("weak.legs.nondegenerate", status_of(nondeg, False), None if nondeg else "BA or CA"))
    return out


def _span_rank(ctx: WeakContext, vectors) -> int:
    return _subspace(vectors, Indexer(ctx.keys)).rank


def _extension_identity(ctx: WeakContext, E: Vec) -> bool:
    lhs: Vec = {}
    for (i, j), c in E.items():
        accumulate(lhs, embed({(k, l, j): v for (k, l), v in ctx.delta(i).items()}, [0, 1, 2], 3, ctx.unit), c)
    e12 = embed(E, [0, 1], 3, ctx.unit)
    e23 = embed(E, [1, 2], 3, ctx.unit)
    return lhs == ctx.mul3(e12, e23) == ctx.mul3(e23, e12)


def _leg_span(ctx: WeakContext, E: Vec, which: str) -> list[Vec]:
    """B: first legs of E(1 (x) a); C: second legs of (a (x) 1)E."""
    idx = Indexer(ctx.keys)
    sub = Subspace(len(idx))
    for a in ctx.keys:
        if which == "B":
            t = ctx.mul2(E, ctx.one_tensor({a: ONE}, 1))
        else:
            t = ctx.mul2(ctx.one_tensor({a: ONE}, 0), E)
        groups: dict[Key, Vec] = {}
        for (i, j), v in t.items():
            if which == "B":
                groups.setdefault(j, {})[i] = v
            else:
                groups.setdefault(i, {})[j] = v
        for g in groups.values():
            sub.add(idx.vec(g, grow=False))
    return [idx.unvec(b) for b in sub.basis()]


def _solve_anti(ctx: WeakContext, E: Vec, dom: list[Vec], cod: list[Vec], name: str) -> LinearMap | None:
    """SB: E(b (x) 1) = E(1 (x) SB(b)); SC: (1 (x) c)E = (SC(c) (x) 1)E."""
    if len(dom) != len(cod):
        return None
    images = []
    for b in dom:
        if name == "SB":
            target = ctx.mul2(E, ctx.one_tensor(b, 0))
            cols = [ctx.mul2(E, ctx.one_tensor(c, 1)) for c in cod]
        else:
            target = ctx.mul2(ctx.one_tensor(b, 1), E)
            cols = [ctx.mul2(ctx.one_tensor(c, 0), E) for c in cod]
        m = SparseMat.from_columns([ctx.idx2.vec(c, grow=False) for c in cols], len(ctx.idx2))
        sol = solve(m, ctx.idx2.vec(target, grow=False))
        if sol is None:
            return None
        img: Vec = {}
        for i, c in sol.entries.items():
            accumulate(img, cod[i], c)
        images.append(img)
    idx = Indexer(ctx.keys)
    if Subspace(len(idx), [idx.vec(v, grow=False) for v in images]).rank != len(dom):
        return None
    return LinearMap(dom, images, ctx.keys)


def _anti_multiplicative(ctx: WeakContext, S: LinearMap) -> bool:
    A = ctx.A
    for x in S.domain:
        for y in S.domain:
            xy = A.multiply(x, y)
            try:
                lhs = S(xy)
            except PreconditionError:
                return False
            if lhs != A.multiply(S(y), S(x)):
                return False
    return True


def derive_E(cop: Coproduct, ctx: WeakContext | None = None) -> tuple[Vec | None, dict]:
    """The unique E in A (x) A acting as identity on D(A)(A (x) A) and (A (x) A)D(A)
    and projecting onto them; None when no such E exists or it fails the
    extension identity for (D (x) id)E.
    """
    ctx = ctx or WeakContext(cop)
    pairs, idx2 = ctx.pairs, ctx.idx2
    n2 = len(pairs)
    R1, R2 = ctx.left_range(), ctx.right_range()
    ann1 = _annihilator(R1, n2)
    ann2 = _annihilator(R2, n2)
    rows: list[dict[int, Fraction]] = []
    rhs: list[Fraction] = []

    def add_equations(products: dict[int, Vec], target: Vec | None, annihilators=None):
        # products[u] = e_u * r (or r * e_u) for unknown coefficient u
        if annihilators is None:
            coords = {}
            for u, p in products.items():
                for k, v in p.items():
                    coords.setdefault(k, {})[u] = v
            for k in set(coords) | set(target):
                rows.append(coords.get(k, {}))
                rhs.append(target.get(k, ZERO))
        else:
            for f in annihilators:
                row = {}
                for u, p in products.items():
                    s = sum((v * f.get(idx2.index(k), ZERO) for k, v in p.items()), ZERO)
                    if s:
                        row[u] = s
                rows.append(row)
                rhs.append(ZERO)

    for b in R1.basis():
        r = idx2.unvec(b)
        add_equations({u: ctx.mul2({pairs[u]: ONE}, r) for u in range(n2)}, r)
    for b in R2.basis():
        r = idx2.unvec(b)
        add_equations({u: ctx.mul2(r, {pairs[u]: ONE}) for u in range(n2)}, r)
    for y in pairs:
        add_equations({u: ctx.mul2({pairs[u]: ONE}, {y: ONE}) for u in range(n2)}, None, ann1)
        add_equations({u: ctx.mul2({y: ONE}, {pairs[u]: ONE}) for u in range(n2)}, None, ann2)
    m = SparseMat(len(rows), n2, {(r, c): v for r, row in enumerate(rows) for c, v in row.items()})
    sol = solve(m, SparseVec({i: v for i, v in enumerate(rhs) if v}, len(rows)))
    info = {"rankLeft": R1.rank, "rankRight": R2.rank}
    if sol is None:
        info["reason"] = "range conditions have no solution"
        return None, info
    nullity = len(kernel_basis(m))
    if nullity:
        raise InconsistencyError(f"the idempotent is not unique ({nullity}-dimensional family)")
    E = {pairs[i]: v for i, v in sol.entries.items()}
    if ctx.mul2(E, E) != E:
        info["reason"] = "solution is not idempotent"
        return None, info
    if not _extension_identity(ctx, E):
        info["reason"] = "(D (x) id)E differs from (E (x) 1)(1 (x) E)"
        return None, info
    return E, info


def _annihilator(sub: Subspace, n: int) -> list[dict[int, Fraction]]:
    basis = sub.basis()
    if not basis:
        return [{i: ONE} for i in range(n)]
    m = SparseMat.from_rows([SparseVec(b.entries, n) for b in basis], n)
    return [dict(k.entries) for k in kernel_basis(m)]


# ------------------------------------------------------------------ F elements

def _apply_on_leg(ctx: WeakContext, E: Vec, S: LinearMap, position: int) -> Vec:
    """(id (x) S)E for position 1, (S (x) id)E for position 0."""
    groups: dict[Key, Vec] = {}
    for (i, j), v in E.items():
        fixed, moving = (i, j) if position == 1 else (j, i)
        groups.setdefault(fixed, {})[moving] = v
    out: Vec = {}
    for fixed, vec in groups.items():
        img = S(vec)
        for k, c in img.items():
            key = (fixed, k) if position == 1 else (k, fixed)
            out[key] = out.get(key, ZERO) + c
    return {k: v for k, v in out.items() if v}


def compute_F(ctx: WeakContext, sep: SeparabilityIdempotent) -> FElements:
    if sep.SB is None or sep.SC is None:
        raise PreconditionError("SB and SC are needed for the F elements")
    E = sep.E
    F1 = _apply_on_leg(ctx, E, sep.SC, 1)
    F3 = _apply_on_leg(ctx, E, sep.SB.inverse(), 1)
    F2 = _apply_on_leg(ctx, E, sep.SB, 0)
    F4 = _apply_on_leg(ctx, E, sep.SC.inverse(), 0)
    F = FElements(F1, F2, F3, F4)
    u = ctx.unit
    E13 = embed(E, [0, 2], 3, u)
    E1x = embed(E, [0, 1], 3, u)
    xE1 = embed(E, [1, 2], 3, u)
    checks = {
        "weak.F.F1": (ctx.mul3(E13, embed(F1, [0, 1], 3, u)), ctx.mul3(E13, xE1)),
        "weak.F.F3": (ctx.mul3(embed(F3, [0, 1], 3, u), E13), ctx.mul3(xE1, E13)),
        "weak.F.F2": (ctx.mul3(embed(F2, [1, 2], 3, u), E13), ctx.mul3(E1x, E13)),
        "weak.F.F4": (ctx.mul3(E13, embed(F4, [1, 2], 3, u)), ctx.mul3(E13, E1x)),
    }
    for cid, (lhs, rhs) in checks.items():
        ok = lhs == rhs
        F.evidence.append(Evidence(cid, status_of(ok, False), None if ok else cid[-2:]))
        if not ok:
            raise InconsistencyError(f"F identity {cid[-2:]} fails although E passed its checks")
    return F


# --------------------------------------------------------------- weak integrals

@dataclass
class WeakIntegral:
    level: str  # "strengthened", "basic" or "fail"
    witness: object = None
    detail: dict = field(default_factory=dict)

    @property
    def strengthened(self) -> bool:
        return self.level == "strengthened"


def check_weak_integral(ctx: WeakContext, sep: SeparabilityIdempotent, F: FElements, f: Functional,
                        side: str) -> WeakIntegral:
    """Left: (id (x) f)D(a) in C and equal to (id (x) f)((1 (x) a)F4) and (id (x) f)(F2(1 (x) a)).
    Right: (f (x) id)D(a) in B and equal to (f (x) id)((a (x) 1)F1) and (f (x) id)(F3(a (x) 1)).
    """
    A = ctx.A
    if f.is_zero():
        return WeakIntegral("fail", "zero functional")
    leg = sep.C if side == "left" else sep.B
    keep = 0 if side == "left" else 1
    leg_sub = _subspace(leg, Indexer(ctx.keys))
    basic_ok = True
    strong_ok = True
    witness = None
    for a in ctx.keys:
        val = slice_leg(ctx.delta(a), f, keep)
        if not leg_sub.contains(Indexer(ctx.keys).vec(val, grow=False)):
            basic_ok = strong_ok = False
            witness = A.label(a)
            break
        if side == "left":
            one_a = ctx.one_tensor({a: ONE}, 1)
            forms = (ctx.mul2(one_a, F.F4), ctx.mul2(F.F2, one_a))
        else:
            a_one = ctx.one_tensor({a: ONE}, 0)
            forms = (ctx.mul2(a_one, F.F1), ctx.mul2(F.F3, a_one))
        if strong_ok and any(slice_leg(t, f, keep) != val for t in forms):
            strong_ok = False
            witness = witness or A.label(a)
    if strong_ok:
        return WeakIntegral("strengthened")
    return WeakIntegral("basic" if basic_ok else "fail", witness)


# -------------------------------------------------------------- kernel formulas

def kernel_generators(ctx: WeakContext, which: str, Fi: Vec) -> list[Vec]:
    """(a (x) 1)(1 - Fi)(1 (x) b) for T1, T2; (1 (x) b)(1 - Fi)(a (x) 1) for T3, T4."""
    one_minus = vsub(ctx.one_one(), Fi)
    gens = []
    for a in ctx.keys:
        a1 = ctx.one_tensor({a: ONE}, 0)
        for b in ctx.keys:
            b1 = ctx.one_tensor({b: ONE}, 1)
            if which in ("T1", "T2"):
                gens.append(ctx.mul2(ctx.mul2(a1, one_minus), b1))
            else:
                gens.append(ctx.mul2(ctx.mul2(b1, one_minus), a1))
    return gens


def projection_matrix(ctx: WeakContext, which: str, Fi: Vec) -> SparseMat:
    """x (x) y -> kernel generator for (x, y), as a matrix on A (x) A."""
    gens = kernel_generators(ctx, which, Fi)
    n2 = len(ctx.pairs)
    cols = []
    for (a, b), g in zip([(a, b) for a in ctx.keys for b in ctx.keys], gens):
        cols.append((ctx.idx2.index((a, b)), ctx.idx2.vec(g, grow=False)))
    entries = {}
    for c, v in cols:
        for r, x in v.entries.items():
            entries[(r, c)] = x
    return SparseMat(n2, n2, entries)


@dataclass
class KernelReport:
    which: str
    equal: bool
    kernel_dim: int
    formula_dim: int
    projection: bool
    hypothesis_met: bool


def check_kernel_formula(ctx: WeakContext, which: str, F: FElements, hypothesis_met: bool,
                         Fi: Vec | None = None) -> KernelReport:
    Fi = F.get(which) if Fi is None else Fi
    n2 = len(ctx.pairs)
    ker = Subspace(n2, kernel_basis(ctx.cop.t_matrix(which)))
    gens = _subspace(kernel_generators(ctx, which, Fi), ctx.idx2)
    equal = ker == gens
    P = projection_matrix(ctx, which, Fi)
    col_span = Subspace(n2, [P.column(c) for c in range(n2)])
    projection = (P @ P) == P and col_span == ker
    if hypothesis_met and not (equal and projection):
        raise InconsistencyError(f"kernel of {which} differs from its E-formula although the hypotheses hold")
    return KernelReport(which, equal, ker.rank, gens.rank, projection, hypothesis_met)


# --------------------------------------------------------------- range formulas

@dataclass
class RangeReport:
    which: str
    equal: bool
    t_rank: int
    e_rank: int
    inclusions: dict
    hypothesis_met: bool


def check_range_formula(ctx: WeakContext, which: str, E: Vec, hypothesis_met: bool) -> RangeReport:
    """T1, T4 ranges equal E(A (x) A); T2, T3 ranges equal (A (x) A)E."""
    cop = ctx.cop
    n2 = len(ctx.pairs)
    t = cop.t_matrix(which)
    t_span = Subspace(n2, [t.column(c) for c in range(n2)])
    if which in ("T1", "T4"):
        e_span = _subspace((ctx.mul2(E, {y: ONE}) for y in ctx.pairs), ctx.idx2)
    else:
        e_span = _subspace((ctx.mul2({y: ONE}, E) for y in ctx.pairs), ctx.idx2)
    equal = t_span == e_span
    inclusions = _range_inclusions(ctx, which, E, t_span)
    if hypothesis_met and not equal:
        raise InconsistencyError(f"range of {which} differs from its E-formula although the hypotheses hold")
    return RangeReport(which, equal, t_span.rank, e_span.rank, inclusions, hypothesis_met)


def _range_inclusions(ctx: WeakContext, which: str, E: Vec, t_span: Subspace) -> dict:
    """T(A (x) A) in middle in T(restricted), with V or W restricting one factor."""
    cop = ctx.cop
    V = cop.compute_leg("left").basis
    W = cop.compute_leg("right").basis
    allb = [{k: ONE} for k in ctx.keys]
    if which == "T1":
        pairs = [(v, a) for v in V for a in allb]
        middle = [ctx.mul2(E, tensor_elements([v, a])) for v, a in pairs]
    elif which == "T2":
        pairs = [(a, w) for a in allb for w in W]
        middle = [ctx.mul2(tensor_elements([a, w]), E) for a, w in pairs]
    elif which == "T3":
        pairs = [(v, a) for v in V for a in allb]
        middle = [ctx.mul2(tensor_elements([v, a]), E) for v, a in pairs]
    else:
        pairs = [(a, w) for a in allb for w in W]
        middle = [ctx.mul2(E, tensor_elements([a, w])) for a, w in pairs]
    outer = []
    for x, y in pairs:
        img: Vec = {}
        for i, ci in x.items():
            for j, cj in y.items():
                accumulate(img, cop.canonical(which, i, j), ci * cj)
        outer.append(img)
    mid = _subspace(middle, ctx.idx2)
    out = _subspace(outer, ctx.idx2)
    return {"rangeInMiddle": t_span.is_subspace_of(mid), "middleInRestricted": mid.is_subspace_of(out)}


# ------------------------------------------------------------------ weak lifts

def twist_by(ctx: WeakContext, E: Vec):
    def twist(which: str, target: Vec) -> Vec:
        if which in ("T1", "T4"):
            return ctx.mul2(E, target)
        return ctx.mul2(target, E)
    return twist


def build_weak_lift(ctx: WeakContext, which: str, p, q, x, integral: Functional, E: Vec):
    """Lift element with the E-twisted target; returns (lift, twisted target)."""
    from .ls_engine import build_lift
    lift = build_lift(LSEngine(ctx.cop), which, p, q, x, integral)
    return lift, twist_by(ctx, E)(which, lift.target)


# --------------------------------------------------------------- classification

@dataclass
class WeakResult:
    classification: Classification
    sep: SeparabilityIdempotent | None = None
    F: FElements | None = None
    derived_E: Vec | None = None


def classify_weak(cop: Coproduct, left_set: Sequence[Functional], right_set: Sequence[Functional],
                  E: Vec | None = None, compare_ls: bool = True) -> WeakResult:
    A = cop.A
    try:
        ctx = WeakContext(cop)
    except PreconditionError as err:
        ev = [skipped("weak.E", str(err))]
        return WeakResult(Classification(FAIL_VERDICT, ev, unmet=[str(err)]))
    engine = LSEngine(cop)
    ev = basic_evidence(engine, None, None)
    ev = [e for e in ev if not e.check_id.startswith("integral.")]
    base = base_ok(ev)
    unmet: list[str] = []
    notes: list[str] = []
    qualifiers: dict = {}
    if not base:
        unmet.append("algebra/coproduct axioms")

    with Timer() as t:
        derived, info = derive_E(cop, ctx)
    ev.append(Evidence("weak.E.derive", status_of(derived is not None, False),
                       None if derived is not None else info.get("reason"), dict(info), seconds=t.seconds))
    if E is not None and derived is not None and E != derived:
        raise InconsistencyError("supplied E differs from the unique derived idempotent")
    chosen = E if E is not None else derived
    result = WeakResult(None, derived_E=derived)
    if chosen is None:
        unmet.append("separability idempotent E")
        result.classification = Classification(FAIL_VERDICT, ev, qualifiers, notes, unmet)
        return result

    sep = verify_E(cop, chosen, ctx)
    ev.extend(sep.evidence)
    result.sep = sep
    if not sep.ok:
        unmet.append("separability idempotent conditions")
        result.classification = Classification(FAIL_VERDICT, ev, qualifiers, notes, unmet)
        return result
    F = compute_F(ctx, sep)
    ev.extend(F.evidence)
    result.F = F

    # integral sets
    sets = {"left": [], "right": []}
    for side, fs in (("left", left_set), ("right", right_set)):
        for f in fs:
            wi = check_weak_integral(ctx, sep, F, f, side)
            ev.append(Evidence(f"weak.integral.{side}.{f.name}", status_of(wi.strengthened, False), wi.witness,
                               {"level": wi.level, "functional": f.name}))
            if wi.strengthened:
                sets[side].append(f)
    faithful = {}
    for side in ("left", "right"):
        for fside in ("left", "right"):
            out = check_faithful_set(A, sets[side], fside)
            faithful[(side, fside)] = bool(out)
            ev.append(Evidence(f"weak.faithful-set.{side}.{fside}", status_of(bool(out), False),
                               _lab(A, out.witness), {"size": len(sets[side])}))

    for m in MAPS:
        kind, fside = KERNEL_HYPOTHESES[m]
        rep = check_kernel_formula(ctx, m, F, faithful[(kind, fside)])
        ev.append(Evidence(f"weak.kernel.{m}", status_of(rep.equal, False), None,
                           {"kernelDim": rep.kernel_dim, "formulaDim": rep.formula_dim,
                            "hypothesisMet": rep.hypothesis_met}))
        ev.append(Evidence(f"weak.kernel.projection.{m}", status_of(rep.projection, False), None))

    range_hyp = faithful[("left", "left")] and faithful[("right", "right")]
    for m in MAPS:
        rep = check_range_formula(ctx, m, sep.E, range_hyp)
        ev.append(Evidence(f"weak.range.{m}", status_of(rep.equal, False), None,
                           {"rank": rep.t_rank, "eRank": rep.e_rank, "hypothesisMet": rep.hypothesis_met}))
        inc = all(rep.inclusions.values())
        ev.append(Evidence(f"weak.range.inclusions.{m}", status_of(inc, False), None, dict(rep.inclusions)))

    twist = twist_by(ctx, sep.E)
    for m in MAPS:
        pool = sets[LIFT_INTEGRAL[m]]
        if not pool:
            ev.append(skipped(f"weak.lift.{m}", f"no {LIFT_INTEGRAL[m]} integral"))
            continue
        with Timer() as t:
            out = check_lifts(engine, m, pool[0], twist)
        e = from_outcome(f"weak.lift.{m}", out, functional=pool[0].name)
        e.seconds = t.seconds
        ev.append(e)

    lf_l, lf_r = faithful[("left", "left")], faithful[("left", "right")]
    rf_l, rf_r = faithful[("right", "left")], faithful[("right", "right")]
    regular = {m for m in MAPS if cop.check_regular(m)}
    verdict = FAIL_VERDICT
    if base and regular >= set(MAPS) and lf_l and rf_r:
        verdict = REGULAR_WEAK_MHA if (lf_r and rf_l) else WEAK_MHA
    elif base and regular >= {"T1", "T4"} and lf_r and rf_l:
        verdict = LEFT_WEAK_MHA
        notes.append(ONE_SIDED_CAVEAT)
    elif base and regular >= {"T2", "T3"} and lf_l and rf_r:
        verdict = RIGHT_WEAK_MHA
        notes.append(ONE_SIDED_CAVEAT)
    if verdict == FAIL_VERDICT:
        if not sets["left"]:
            unmet.append("left integral (strengthened form)")
        if not sets["right"]:
            unmet.append("right integral (strengthened form)")
        if sets["left"] and not lf_l:
            unmet.append("left faithful set of left integrals")
        if sets["right"] and not rf_r:
            unmet.append("right faithful set of right integrals")

    full = cop.check_full()
    ev.append(from_outcome("weak.fullness", full))
    idem = idempotent_algebra(engine)
    ev.append(from_outcome("algebra.idempotent", idem))
    if verdict != FAIL_VERDICT:
        if not full or not idem:
            raise InconsistencyError(f"fullness or A = A^2 fails although the verdict is {verdict}")
        for e in ev:
            if e.check_id.startswith(("weak.kernel", "weak.range")) and e.failed:
                raise InconsistencyError(f"{e.check_id} failed although the verdict is {verdict}")

    if chosen == ctx.one_one():
        qualifiers["degenerate"] = True
        mapped = DEGENERATE_VERDICT[verdict]
        if compare_ls:
            phi = sets["left"][0] if sets["left"] else (left_set[0] if left_set else None)
            psi = sets["right"][0] if sets["right"] else (right_set[0] if right_set else None)
            ls = classify_ls(cop, phi, psi, construct=False)
            ok = ls.verdict == mapped
            ev.append(Evidence("weak.degenerate", status_of(ok, False), None if ok else ls.verdict,
                               {"lsVerdict": ls.verdict, "weakVerdict": verdict}))
        notes.append(f"E = 1 (x) 1: the weak verdict {verdict} reads as {mapped}")
        verdict = mapped
    result.classification = Classification(verdict, ev, qualifiers, notes, unmet)
    return result


def _lab(A, w):
    if w is None or isinstance(w, str):
        return w
    return element_label(A, w)


def classify_weak_with_unit(cop: Coproduct, left_set, right_set, window: int | None = None) -> WeakResult:
    """Run the weak pipeline with E = 1 (x) 1 forced.

    Without a unit, 1 (x) 1 is the identity multiplier; the pipeline then
    runs on a window (see ``_degenerate_on_window``).
    """
    A = cop.A
    if not (A.is_dense and A.unit is not None):
        return _degenerate_on_window(cop, list(left_set), list(right_set), window)
    E = tensor_elements([A.unit, A.unit])
    return classify_weak(cop, left_set, right_set, E=E)


def _window_injective(engine: LSEngine, which: str) -> CheckOutcome:
    """Images of the window basis tensors are linearly independent."""
    idx = Indexer()
    keys = engine.keys()
    vectors = []
    for x in keys:
        for y in keys:
            img = engine.cop.canonical(which, x, y)
            if img is None:
                return CheckOutcome(False, witness=[engine.A.label(x), engine.A.label(y)], window=True)
            vectors.append(idx.vec(img))
    span = Subspace(len(idx), [SparseVec(v.entries, len(idx)) for v in vectors])
    return CheckOutcome(span.rank == len(vectors), window=True,
                        detail={"rank": span.rank, "pairs": len(vectors)})


def _degenerate_on_window(cop: Coproduct, left_set: list, right_set: list, window: int | None) -> WeakResult:
    """E = 1 (x) 1 on an algebra without unit.

    Every condition on E holds trivially, F1..F4 are the identity multiplier,
    and the strengthened integral conditions reduce to the ordinary ones, so
    the checks become window checks of the canonical maps themselves.
    """
    A = cop.A
    engine = LSEngine(cop, window)
    ev = [e for e in basic_evidence(engine, None, None) if not e.check_id.startswith("integral.")]
    base = base_ok(ev)
    ev.append(Evidence("weak.E.identity", status_of(True, True), None,
                       {"reason": "E = 1 (x) 1 is the identity multiplier of A (x) A"}))
    for m in MAPS:
        ev.append(Evidence(f"weak.F.{m.replace('T', 'F')}", status_of(True, True), None, {"F": "1 (x) 1"}))
    sets = {"left": [], "right": []}
    for side, fs in (("left", left_set), ("right", right_set)):
        for f in fs:
            out = engine.integral(f, side)
            ev.append(Evidence(f"weak.integral.{side}.{f.name}", out.status, out.witness,
                               {"level": "strengthened" if out else "fail", "functional": f.name}))
            if out:
                sets[side].append(f)
    faithful = {}
    for side in ("left", "right"):
        for fside in ("left", "right"):
            out = check_faithful_set(A, sets[side], fside, engine.window)
            faithful[(side, fside)] = bool(out)
            ev.append(Evidence(f"weak.faithful-set.{side}.{fside}", out.status, _lab(A, out.witness),
                               {"size": len(sets[side])}))
    regular = {m for m in MAPS if engine.regular(m)}
    for m in MAPS:
        if m not in regular:
            ev.append(skipped(f"weak.kernel.{m}", f"{m} is not regular"))
            continue
        out = _window_injective(engine, m)
        ev.append(Evidence(f"weak.kernel.{m}", out.status, out.witness,
                           {"kernelDim": 0 if out else None, "formulaDim": 0, **out.detail}))
    for m in MAPS:
        pool = sets[LIFT_INTEGRAL[m]]
        if not pool or not engine.regular(*LIFT_REGULAR_PAIR[m]):
            ev.append(skipped(f"weak.lift.{m}", f"needs {' and '.join(LIFT_REGULAR_PAIR[m])} regular and a "
                                                f"{LIFT_INTEGRAL[m]} integral"))
            continue
        with Timer() as t:
            out = check_lifts(engine, m, pool[0])
        e = from_outcome(f"weak.lift.{m}", out, functional=pool[0].name)
        e.seconds = t.seconds
        ev.append(e)

    lf_l, lf_r = faithful[("left", "left")], faithful[("left", "right")]
    rf_l, rf_r = faithful[("right", "left")], faithful[("right", "right")]
    verdict = FAIL_VERDICT
    if base and regular >= set(MAPS) and lf_l and rf_r:
        verdict = REGULAR_WEAK_MHA if (lf_r and rf_l) else WEAK_MHA
    elif base and regular >= {"T1", "T4"} and lf_r and rf_l:
        verdict = LEFT_WEAK_MHA
    elif base and regular >= {"T2", "T3"} and lf_l and rf_r:
        verdict = RIGHT_WEAK_MHA
    mapped = DEGENERATE_VERDICT_NONUNITAL[verdict]
    qualifiers: dict = {"degenerate": True}
    if mapped != FAIL_VERDICT:
        qualifiers["windowVerified"] = True
    if mapped == REGULAR_MULTIPLIER_HOPF:
        mapped = MULTIPLIER_HOPF
        qualifiers["regularS"] = True
    phi = sets["left"][0] if sets["left"] else (left_set[0] if left_set else None)
    psi = sets["right"][0] if sets["right"] else (right_set[0] if right_set else None)
    ls = classify_ls(cop, phi, psi, engine.window, construct=False)
    ok = ls.verdict == mapped
    ev.append(Evidence("weak.degenerate", status_of(ok, True), None if ok else ls.verdict,
                       {"lsVerdict": ls.verdict, "weakVerdict": verdict}))
    notes = [f"E = 1 (x) 1: the weak verdict {verdict} reads as {mapped}"]
    unmet = [] if mapped != FAIL_VERDICT else ["weak hypotheses with E = 1 (x) 1"]
    return WeakResult(Classification(mapped, ev, qualifiers, notes, unmet))
