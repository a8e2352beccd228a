"""From integrals to a multiplier Hopf structure.

Injectivity and bijectivity of the canonical maps, the lift elements that
prove surjectivity, classification, and the explicit counit and antipode
built from a left integral. Every theorem instance is checked both ways: if
its hypotheses verify, its conclusion must verify too, otherwise an
``InconsistencyError`` is raised.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .algebra import (CheckOutcome, Key, Vec, accumulate, check_associative, check_idempotent_algebra,
                      check_nondegenerate, leg_multiplier, vscale)
from .coproduct import COASSOC_VARIANTS, MAPS, Coproduct, PreconditionError
from .evidence import (FAIL, PASS, SKIPPED, WINDOW_PASS, Classification, Evidence, InconsistencyError, Timer,
                       from_outcome, skipped, status_of)
from .exact_linalg import ONE, ZERO, Indexer, SparseMat, SparseVec, Subspace, kernel_basis, rank, solve, solve_many
from .integrals import (FaithfulnessReport, Functional, check_faithful, check_left_integral, check_right_integral)

# integral kind and faithfulness side that make each canonical map injective
INJECTIVITY_HYPOTHESES = {
    "T1": ("right", "right"),
    "T2": ("left", "left"),
    "T3": ("right", "left"),
    "T4": ("left", "right"),
}

# regular pair, faithful side of the left integral, faithful side of the right integral
BIJECTIVITY_HYPOTHESES = {
    "T1": (("T1", "T4"), "left", "right"),
    "T2": (("T2", "T3"), "left", "right"),
    "T3": (("T2", "T3"), "right", "left"),
    "T4": (("T1", "T4"), "right", "left"),
}

LIFT_REGULAR_PAIR = {"T1": ("T1", "T4"), "T2": ("T2", "T3"), "T3": ("T2", "T3"), "T4": ("T1", "T4")}
# which integral a lift uses
LIFT_INTEGRAL = {"T1": "left", "T2": "right", "T3": "left", "T4": "right"}

HOPF = "Hopf"
HOPF_INVERTIBLE_S = "HopfInvertibleS"
MULTIPLIER_HOPF = "MultiplierHopf"
REGULAR_MULTIPLIER_HOPF = "RegularMultiplierHopf"
LEFT_MHA = "LeftMHA"
RIGHT_MHA = "RightMHA"
FAIL_VERDICT = "Fail"


class LSEngine:
    """Holds a coproduct plus memoised integral and faithfulness checks."""

    def __init__(self, cop: Coproduct, window: int | None = None):
        self.cop = cop
        self.A = cop.A
        self.window = window
        self._integral: dict[tuple[str, str], CheckOutcome] = {}
        self._faith: dict[str, FaithfulnessReport] = {}
        self._coassoc: bool | None = None

    @property
    def dense(self) -> bool:
        return self.A.is_dense

    def keys(self) -> list[Key]:
        return self.A.window(self.window)

    def regular(self, *which: str) -> bool:
        return all(self.cop.check_regular(w, self.window) for w in which)

    def integral(self, f: Functional, kind: str) -> CheckOutcome:
        key = (f.name, kind)
        if key not in self._integral:
            try:
                if kind == "left":
                    out = check_left_integral(self.cop, f, self.window)
                else:
                    out = check_right_integral(self.cop, f, self.window)
            except PreconditionError as err:
                out = CheckOutcome(False, witness=str(err), window=not self.dense, detail={"precondition": True})
            self._integral[key] = out
        return self._integral[key]

    def faithful(self, f: Functional) -> FaithfulnessReport:
        if f.name not in self._faith:
            self._faith[f.name] = check_faithful(self.A, f, self.window)
        return self._faith[f.name]

    def coassociative(self) -> bool:
        """Every coassociativity form whose maps are regular holds (needed by all theorems)."""
        if self._coassoc is None:
            ran = []
            for variant, (x, y) in COASSOC_VARIANTS.items():
                if self.regular(x, y):
                    ran.append(bool(self.cop.check_coassoc(variant, self.window)))
            self._coassoc = bool(ran) and all(ran)
        return self._coassoc

    def hypothesis(self, f: Functional | None, kind: str, side: str | None, coassoc: bool = True) -> bool:
        """f is an integral of the given kind, faithful on the given side, for a coassociative coproduct."""
        if f is None or f.is_zero() or (coassoc and not self.coassociative()) or not self.integral(f, kind):
            return False
        if side is None:
            return True
        rep = self.faithful(f)
        if side == "both":
            return rep.faithful
        return rep.left_faithful if side == "left" else rep.right_faithful

    # canonical maps on arbitrary simple tensors
    def can(self, which: str, x: Mapping[Key, Fraction], y: Mapping[Key, Fraction]) -> Vec:
        out: Vec = {}
        for i, a in x.items():
            for j, b in y.items():
                img = self.cop.canonical(which, i, j)
                if img is None:
                    raise PreconditionError(f"{which} is not regular at ({self.A.label(i)}, {self.A.label(j)})")
                accumulate(out, img, a * b)
        return out


def simple(x: Mapping[Key, Fraction], y: Mapping[Key, Fraction]) -> Vec:
    return {(i, j): a * b for i, a in x.items() for j, b in y.items() if a * b}


def slice_leg(t: Mapping[tuple, Fraction], f: Functional, keep: int) -> Vec:
    """Apply f to one leg of a two-leg tensor and keep the other."""
    out: Vec = {}
    for key, c in t.items():
        w = f.value(key[1 - keep])
        if w:
            k = key[keep]
            s = out.get(k, ZERO) + c * w
            if s:
                out[k] = s
            else:
                out.pop(k, None)
    return out


# ------------------------------------------------------------- injectivity

@dataclass
class InjectivityResult:
    which: str
    injective: bool | None
    kernel: list[Vec]
    hypothesis_met: bool
    reason: str = ""


def check_injectivity(engine: LSEngine, which: str, integral: Functional | None) -> InjectivityResult:
    kind, side = INJECTIVITY_HYPOTHESES[which]
    met = engine.hypothesis(integral, kind, side)
    if not engine.dense:
        return InjectivityResult(which, None, [], met, reason="kernel undefined on an infinite basis")
    if not engine.regular(which):
        return InjectivityResult(which, None, [], met, reason=f"{which} is not regular")
    AA = engine.cop.AA
    ker = [AA.from_sparse(v) for v in kernel_basis(engine.cop.t_matrix(which))]
    if met and ker:
        raise InconsistencyError(f"{which} has a kernel although a {side}-faithful {kind} integral exists")
    return InjectivityResult(which, not ker, ker, met)


# ------------------------------------------------------------------- lifts

@dataclass
class LiftElement:
    which: str
    inputs: dict
    y: Vec
    image: Vec
    target: Vec

    @property
    def verified(self) -> bool:
        return self.image == self.target


def build_lift(engine: LSEngine, which: str, p: Mapping, q: Mapping, x: Mapping, integral: Functional) -> LiftElement:
    """Lift element for one canonical map, computed without Sweedler sums.

    ``x`` is the element b (for T1, T3) or c (for T2, T4). The returned
    ``target`` is the simple tensor the lift must be mapped onto.
    """
    pair = LIFT_REGULAR_PAIR[which]
    if not engine.regular(*pair):
        raise PreconditionError(f"lift for {which} needs {pair[0]} and {pair[1]} regular")
    f = integral
    can = engine.can
    A = engine.A
    y: Vec = {}
    if which == "T1":
        # D(q)(b (x) 1) = sum r (x) s, then D(p)(1 (x) s) placed in legs 1, 3
        for (k, l), c in can("T4", x, q).items():
            for m, v in slice_leg(can("T1", p, {l: ONE}), f, 0).items():
                _add(y, (m, k), c * v)
        a = slice_leg(can("T1", p, q), f, 0)
        target = simple(a, x)
    elif which == "T2":
        for (k, l), c in can("T3", p, x).items():
            for n, v in slice_leg(can("T2", {k: ONE}, q), f, 1).items():
                _add(y, (l, n), c * v)
        a = slice_leg(can("T2", p, q), f, 1)
        target = simple(x, a)
    elif which == "T3":
        # the T1 lift read in the opposite algebra
        for (k, l), c in can("T2", x, q).items():
            for m, v in slice_leg(can("T3", p, {l: ONE}), f, 0).items():
                _add(y, (m, k), c * v)
        a = slice_leg(can("T3", p, q), f, 0)
        target = simple(a, x)
    elif which == "T4":
        for (k, l), c in can("T1", q, x).items():
            for n, v in slice_leg(can("T4", {k: ONE}, p), f, 1).items():
                _add(y, (l, n), c * v)
        a = slice_leg(can("T4", q, p), f, 1)
        target = simple(x, a)
    else:
        raise ValueError(which)
    image = engine.cop.canonical_apply(which, y)
    if not isinstance(image, dict):
        raise PreconditionError(f"{which} image of the lift is not in A (x) A")
    lab = A.label
    inputs = {"p": {lab(k): str(v) for k, v in p.items()}, "q": {lab(k): str(v) for k, v in q.items()},
              ("b" if which in ("T1", "T3") else "c"): {lab(k): str(v) for k, v in x.items()}}
    return LiftElement(which, inputs, y, image, target)


def _add(out: dict, key, val: Fraction) -> None:
    s = out.get(key, ZERO) + val
    if s:
        out[key] = s
    else:
        out.pop(key, None)


def check_lifts(engine: LSEngine, which: str, integral: Functional, twist=None) -> CheckOutcome:
    """Verify the lift identity on all window triples of basis elements.

    ``twist`` post-processes the simple target (the weak case multiplies it
    by the separability idempotent).
    """
    keys = engine.keys()
    for p in keys:
        for q in keys:
            for x in keys:
                lift = build_lift(engine, which, {p: ONE}, {q: ONE}, {x: ONE}, integral)
                target = twist(which, lift.target) if twist else lift.target
                if lift.image != target:
                    lab = engine.A.label
                    return CheckOutcome(False, witness={"p": lab(p), "q": lab(q), "x": lab(x)}, window=not engine.dense)
    return CheckOutcome(True, window=not engine.dense)


# ------------------------------------------------------------ bijectivity

@dataclass
class BijectivityResult:
    which: str
    bijective: bool | None
    rank: int | None
    hypothesis_met: bool
    reason: str = ""


def check_bijectivity(engine: LSEngine, which: str, phi: Functional | None, psi: Functional | None) -> BijectivityResult:
    pair, phi_side, psi_side = BIJECTIVITY_HYPOTHESES[which]
    met = engine.regular(*pair) and engine.hypothesis(phi, "left", phi_side) and \
        engine.hypothesis(psi, "right", psi_side)
    if not engine.dense:
        return BijectivityResult(which, None, None, met, reason="rank undefined on an infinite basis")
    if not engine.regular(which):
        return BijectivityResult(which, None, None, met, reason=f"{which} is not regular")
    n2 = engine.A.dim ** 2
    r = rank(engine.cop.t_matrix(which))
    bij = r == n2
    if met and not bij:
        raise InconsistencyError(f"{which} has rank {r} < {n2} although its hypotheses hold")
    return BijectivityResult(which, bij, r, met)


# ------------------------------------------------------------------ counit

@dataclass
class CounitResult:
    side: str
    functional: Functional | None
    consistent: bool
    hypotheses_met: bool
    leg_rank: int
    equations: int
    verification: CheckOutcome | None = None


def _solve_functional(rows: list[tuple[Vec, Fraction]], name: str) -> tuple[Functional | None, int]:
    idx = Indexer()
    vecs = [(idx.vec(v), rhs) for v, rhs in rows]
    n = len(idx)
    m = SparseMat.from_rows([SparseVec(v.entries, n) for v, _ in vecs], n)
    b = SparseVec({i: rhs for i, (_, rhs) in enumerate(vecs)}, len(vecs))
    sol = solve(m, b)
    lrank = Subspace(n, [SparseVec(v.entries, n) for v, _ in vecs]).rank
    if sol is None:
        return None, lrank
    return Functional({idx.key(i): c for i, c in sol.entries.items()}, name), lrank


def construct_counit_left(engine: LSEngine, phi: Functional, psi: Functional | None = None) -> CounitResult:
    """Solve eps((id (x) phi)(D(p)(1 (x) q))) = phi(pq) over spanning pairs."""
    engine.cop.require_regular("T1", "T4", window=engine.window)
    met = engine.hypothesis(phi, "left", "left") and engine.hypothesis(psi, "right", "right")
    A = engine.A
    rows = []
    for p in engine.keys():
        for q in engine.keys():
            v = slice_leg(engine.can("T1", {p: ONE}, {q: ONE}), phi, 0)
            rows.append((v, phi(A.mul_basis(p, q))))
    eps, lrank = _solve_functional(rows, "epsilon")
    if eps is None and met:
        raise InconsistencyError("counit system inconsistent although its hypotheses hold")
    result = CounitResult("left", eps, eps is not None, met, lrank, len(rows))
    if eps is not None:
        result.verification = _verify_counit_left(engine, eps)
    return result


def _verify_counit_left(engine: LSEngine, eps: Functional) -> CheckOutcome:
    A = engine.A
    for a in engine.keys():
        for b in engine.keys():
            lhs = slice_leg(engine.can("T1", {a: ONE}, {b: ONE}), eps, 1)
            if lhs != A.mul_basis(a, b):
                return CheckOutcome(False, witness={"a": A.label(a), "b": A.label(b)}, window=not engine.dense)
    return CheckOutcome(True, window=not engine.dense)


def construct_counit_right(engine: LSEngine, psi: Functional, phi: Functional | None = None,
                           eps: Functional | None = None) -> CounitResult:
    """Solve eps'((psi (x) id)(D(p)(q (x) 1))) = psi(pq) over spanning pairs."""
    engine.cop.require_regular("T1", "T4", window=engine.window)
    met = engine.hypothesis(phi, "left", "right") and engine.hypothesis(psi, "right", "left")
    A = engine.A
    rows = []
    for p in engine.keys():
        for q in engine.keys():
            v = slice_leg(engine.can("T4", {q: ONE}, {p: ONE}), psi, 1)
            rows.append((v, psi(A.mul_basis(p, q))))
    epsr, lrank = _solve_functional(rows, "epsilon_right")
    if epsr is None and met:
        raise InconsistencyError("right counit system inconsistent although its hypotheses hold")
    result = CounitResult("right", epsr, epsr is not None, met, lrank, len(rows))
    if epsr is not None:
        result.verification = _verify_counit_right(engine, epsr, eps)
    return result


def _verify_counit_right(engine: LSEngine, epsr: Functional, eps: Functional | None) -> CheckOutcome:
    # (id (x) eps')(D(a)(c (x) 1)) = ac, the same through T2 when it is regular, and eps' = eps
    A = engine.A
    use_t2 = engine.regular("T2")
    for a in engine.keys():
        if eps is not None and eps.value(a) != epsr.value(a):
            return CheckOutcome(False, witness={"a": A.label(a), "reason": "differs from left counit"},
                                window=not engine.dense)
        for c in engine.keys():
            lhs = slice_leg(engine.can("T4", {c: ONE}, {a: ONE}), epsr, 0)
            if lhs != A.mul_basis(a, c):
                return CheckOutcome(False, witness={"a": A.label(a), "c": A.label(c)}, window=not engine.dense)
            if use_t2:
                lhs = slice_leg(engine.can("T2", {c: ONE}, {a: ONE}), epsr, 0)
                if lhs != A.mul_basis(c, a):
                    return CheckOutcome(False, witness={"c": A.label(c), "a": A.label(a)}, window=not engine.dense)
    return CheckOutcome(True, window=not engine.dense)


# ---------------------------------------------------------------- antipode

@dataclass
class AntipodeMap:
    """The antipode on the left leg.

    ``element_form[k]`` is S(e_k) as an element (present when T3 is regular);
    ``left_action[k][b]`` is S(e_k) b (dense algebras only).
    """

    element_form: dict[Key, Vec] | None
    left_action: dict[Key, dict[Key, Vec]] | None
    consistent: bool
    hypotheses_met: bool
    leg_basis: list[Vec]
    known_keys: list[Key]
    window: bool = False

    def apply(self, x: Mapping[Key, Fraction]) -> Vec | None:
        if self.element_form is None:
            return None
        out: Vec = {}
        for k, c in x.items():
            img = self.element_form.get(k)
            if img is None:
                return None
            accumulate(out, img, c)
        return out

    def matrix(self, n: int) -> SparseMat:
        entries = {}
        for k, img in (self.element_form or {}).items():
            for o, v in img.items():
                entries[(o, k)] = v
        return SparseMat(n, n, entries)

    def corrupted(self, key: Key, target: Key, delta: Fraction = ONE) -> "AntipodeMap":
        """Copy with one matrix entry changed (negative control)."""
        ef = {k: dict(v) for k, v in (self.element_form or {}).items()}
        img = ef.setdefault(key, {})
        s = img.get(target, ZERO) + delta
        if s:
            img[target] = s
        else:
            img.pop(target, None)
        return AntipodeMap(ef, None, self.consistent, self.hypotheses_met, self.leg_basis, self.known_keys,
                           self.window)


def construct_antipode(engine: LSEngine, phi: Functional, psi: Functional | None = None,
                       window: int | None = None) -> AntipodeMap:
    """Solve S((id (x) phi)(D(p)(1 (x) q))) = (id (x) phi)((1 (x) p)D(q)) over spanning pairs."""
    cop = engine.cop
    win = engine.window if window is None else window
    cop.require_regular("T1", "T4", window=engine.window)
    met = engine.hypothesis(phi, "left", "left") and engine.hypothesis(psi, "right", "right")
    A = engine.A
    keys = A.window(win)
    with_element = bool(cop.check_regular("T3", engine.window))
    col_idx = Indexer()
    rows, elem_rhs, act_rhs = [], [], []
    for p in keys:
        for q in keys:
            v = slice_leg(engine.can("T1", {p: ONE}, {q: ONE}), phi, 0)
            rows.append(col_idx.vec(v))
            if with_element:
                elem_rhs.append(slice_leg(engine.can("T3", {q: ONE}, {p: ONE}), phi, 0))
            if engine.dense:
                acts = {}
                for b in keys:
                    t4 = engine.can("T4", {b: ONE}, {q: ONE})
                    acts[b] = slice_leg(leg_multiplier(cop.AA, 1, {p: ONE}).left(t4), phi, 0)
                act_rhs.append(acts)
    ncol = len(col_idx)
    m = SparseMat.from_rows([SparseVec(r.entries, ncol) for r in rows], ncol)
    leg = Subspace(ncol, [SparseVec(r.entries, ncol) for r in rows])
    leg_basis = [col_idx.unvec(v) for v in leg.basis()]
    consistent = True
    element_form = None
    if with_element:
        element_form, ok = _solve_map(m, elem_rhs, col_idx)
        consistent &= ok
    left_action = None
    if engine.dense:
        flat = [{(b, o): c for b, img in acts.items() for o, c in img.items()} for acts in act_rhs]
        sol, ok = _solve_map(m, flat, col_idx)
        consistent &= ok
        if ok:
            left_action = {k: {} for k in col_idx.keys()}
            for k, img in sol.items():
                for (b, o), c in img.items():
                    left_action[k].setdefault(b, {})[o] = c
    if not consistent and met:
        raise InconsistencyError("antipode system inconsistent although its hypotheses hold")
    return AntipodeMap(element_form if consistent else None, left_action, consistent, met, leg_basis,
                       col_idx.keys(), window=not engine.dense)


def _solve_map(m: SparseMat, rhs_rows: list[Vec], col_idx: Indexer) -> tuple[dict[Key, Vec], bool]:
    """Find a linear map M with M(v_r) = rhs_r, as images of the column keys."""
    out_idx = Indexer()
    for r in rhs_rows:
        for o in r:
            out_idx.index(o)
    rhs = []
    for o in out_idx.keys():
        rhs.append(SparseVec({i: r[o] for i, r in enumerate(rhs_rows) if o in r}, m.rows))
    sols = solve_many(m, rhs)
    if any(s is None for s in sols):
        return {}, False
    images: dict[Key, Vec] = {k: {} for k in col_idx.keys()}
    for o, s in zip(out_idx.keys(), sols):
        for i, c in s.entries.items():
            images[col_idx.key(i)][o] = c
    return images, True


def _antipode_pairing(engine: LSEngine, S: AntipodeMap, a: Key, b: Key) -> Vec | None:
    """sum a_(1) (x) S(a_(2)) b, or None when S is unknown where needed."""
    cop = engine.cop
    A = engine.A
    if A.is_dense and A.unit is not None:
        d = cop.delta_element({a: ONE})
        out: Vec = {}
        for (k, l), c in d.items():
            s = S.element_form.get(l) if S.element_form is not None else None
            if s is None:
                return None
            for o, v in A.multiply(s, {b: ONE}).items():
                _add(out, (k, o), c * v)
        return out
    if A.is_dense:
        return None
    results = []
    for u in A.local_units([a, b]):
        out = {}
        for ck, cu in u.items():
            img = cop.canonical("T4", ck, a)
            if img is None:
                return None
            for (k, l), c in img.items():
                s = S.element_form.get(l) if S.element_form is not None else None
                if s is None:
                    return None
                for o, v in A.multiply(s, {b: ONE}).items():
                    _add(out, (k, o), cu * c * v)
        results.append(out)
    if any(r != results[0] for r in results[1:]):
        return None
    return results[0]


def check_antipode_axioms(engine: LSEngine, S: AntipodeMap, eps: Functional) -> tuple[Evidence, Evidence]:
    """Antipode law and the T1-inverse identity on window pairs."""
    A = engine.A
    if S.element_form is None:
        reason = "antipode has no element form (T3 not regular or system inconsistent)"
        return skipped("ls.antipode.law", reason), skipped("ls.antipode.inverse", reason)
    if A.is_dense and A.unit is None:
        reason = "law check needs a unital dense algebra or a supported algebra with local units"
        return skipped("ls.antipode.law", reason), skipped("ls.antipode.inverse", reason)
    law_bad = inv_bad = None
    for a in engine.keys():
        ea = eps({a: ONE})
        for b in engine.keys():
            r = _antipode_pairing(engine, S, a, b)
            if r is None:
                reason = f"antipode unknown on part of the coproduct of {A.label(a)}"
                return skipped("ls.antipode.law", reason), skipped("ls.antipode.inverse", reason)
            prod: Vec = {}
            for (k, o), c in r.items():
                accumulate(prod, A.mul_basis(k, o), c)
            if law_bad is None and prod != vscale(ea, {b: ONE}):
                law_bad = {"a": A.label(a), "b": A.label(b)}
            if inv_bad is None:
                back = engine.cop.canonical_apply("T1", r)
                if back != {(a, b): ONE}:
                    inv_bad = {"a": A.label(a), "b": A.label(b)}
    window = not engine.dense
    law = Evidence("ls.antipode.law", status_of(law_bad is None, window), law_bad)
    inv = Evidence("ls.antipode.inverse", status_of(inv_bad is None, window), inv_bad)
    return law, inv


def check_antipode_formula(engine: LSEngine, S: AntipodeMap, phi: Functional) -> CheckOutcome:
    """S((id (x) phi)(D(a)(1 (x) b))) = (id (x) phi)((1 (x) a)D(b)) for all window pairs."""
    A = engine.A
    if S.element_form is None:
        return CheckOutcome(False, witness="no element form")
    for a in engine.keys():
        for b in engine.keys():
            v = slice_leg(engine.can("T1", {a: ONE}, {b: ONE}), phi, 0)
            lhs = S.apply(v)
            rhs = slice_leg(engine.can("T3", {b: ONE}, {a: ONE}), phi, 0)
            if lhs != rhs:
                return CheckOutcome(False, witness={"a": A.label(a), "b": A.label(b)}, window=not engine.dense)
    return CheckOutcome(True, window=not engine.dense)


# ----------------------------------------------------------- classification

def decide_verdict(flags: dict) -> tuple[str, dict, list[str], list[str]]:
    """Map verified hypotheses to the strongest verdict.

    ``flags`` keys: base, regular (set of map names), phi_left, phi_right,
    psi_left, psi_right (faithful integral on that side), unital_elements,
    window. Returns (verdict, qualifiers, notes, unmet).
    """
    reg = flags["regular"]
    unmet = []
    if not flags["base"]:
        unmet.append("algebra/coproduct axioms")
    phi_lf, phi_rf = flags["phi_left"], flags["phi_right"]
    psi_lf, psi_rf = flags["psi_left"], flags["psi_right"]
    both = phi_lf and phi_rf and psi_lf and psi_rf
    qualifiers: dict = {}
    notes: list[str] = []
    verdict = FAIL_VERDICT
    if flags["base"] and reg >= set(MAPS) and phi_lf and psi_rf:
        if flags.get("unital_elements"):
            verdict = HOPF_INVERTIBLE_S if both else HOPF
        else:
            verdict = REGULAR_MULTIPLIER_HOPF if both else MULTIPLIER_HOPF
    elif flags["base"] and reg >= {"T1", "T4"} and both:
        verdict = LEFT_MHA
        notes.append("upgrade: with T1, T4 regular and faithful integrals the pair is a regular multiplier Hopf algebra")
        qualifiers["upgrade"] = REGULAR_MULTIPLIER_HOPF
    elif flags["base"] and reg >= {"T2", "T3"} and both:
        verdict = RIGHT_MHA
        notes.append("upgrade: with T2, T3 regular and faithful integrals the pair is a regular multiplier Hopf algebra")
        qualifiers["upgrade"] = REGULAR_MULTIPLIER_HOPF
    if verdict == FAIL_VERDICT:
        if not reg >= {"T1", "T4"} and not reg >= {"T2", "T3"}:
            unmet.append("regularity of a pair of canonical maps")
        if not phi_lf:
            unmet.append("left faithful left integral")
        if not psi_rf:
            unmet.append("right faithful right integral")
        if reg < set(MAPS) and phi_lf and psi_rf and not both:
            unmet.append("faithful integrals on both sides")
    if flags.get("window") and verdict != FAIL_VERDICT:
        qualifiers["windowVerified"] = True
    if qualifiers.get("windowVerified") and verdict == REGULAR_MULTIPLIER_HOPF:
        # window evidence is capped at the plain verdict; regularity is a qualifier
        verdict = MULTIPLIER_HOPF
        qualifiers["regularS"] = True
    return verdict, qualifiers, notes, unmet


def _timed(evidence: list[Evidence], check_id: str, fn, **detail):
    with Timer() as t:
        try:
            out = fn()
        except PreconditionError as err:
            ev = skipped(check_id, str(err))
            ev.seconds = 0.0
            evidence.append(ev)
            return None
    if isinstance(out, Evidence):
        ev = out
    else:
        ev = from_outcome(check_id, out, **detail)
    ev.seconds = t.seconds
    evidence.append(ev)
    return out


def basic_evidence(engine: LSEngine, phi: Functional | None, psi: Functional | None) -> list[Evidence]:
    """Algebra, coproduct, integral and faithfulness checks shared by both engines."""
    A, cop, w = engine.A, engine.cop, engine.window
    ev: list[Evidence] = []
    _timed(ev, "algebra.nondegenerate", lambda: check_nondegenerate(A, w))
    _timed(ev, "algebra.associative",
           lambda: (lambda t: CheckOutcome(t is None, witness=t and [A.label(k) for k in t], window=not A.is_dense))(
               check_associative(A, w)))
    _timed(ev, "coproduct.multiplier", lambda: cop.check_images_are_multipliers(w))
    _timed(ev, "coproduct.homomorphism", lambda: cop.check_homomorphism(w))
    for m in MAPS:
        with Timer() as t:
            r = cop.check_regular(m, w)
        ev.append(Evidence(f"coproduct.regular.{m}", r.status, r.witness, seconds=t.seconds))
    for variant, (x, y) in COASSOC_VARIANTS.items():
        if cop.check_regular(x, w) and cop.check_regular(y, w):
            _timed(ev, f"coproduct.coassoc.{variant}", lambda v=variant: cop.check_coassoc(v, w))
        else:
            ev.append(skipped(f"coproduct.coassoc.{variant}", f"needs {x} and {y} regular"))
    for f, kind in ((phi, "left"), (psi, "right")):
        cid = f"integral.{kind}"
        if f is None:
            ev.append(skipped(cid, f"no {kind} integral supplied"))
            continue
        with Timer() as t:
            out = engine.integral(f, kind)
        e = from_outcome(cid, out, functional=f.name)
        if out.detail.get("precondition"):
            e.status = SKIPPED
            e.detail["reason"] = out.witness
            e.witness = None
        e.seconds = t.seconds
        ev.append(e)
    seen = set()
    for f, kind in ((phi, "left"), (psi, "right")):
        if f is None or f.name in seen:
            continue
        seen.add(f.name)
        with Timer() as t:
            rep = engine.faithful(f)
        window = rep.window
        ev.append(Evidence(f"faithful.{f.name}.left", status_of(rep.left_faithful, window),
                           _lab(A, rep.left_witness), {"functional": f.name}, seconds=t.seconds))
        ev.append(Evidence(f"faithful.{f.name}.right", status_of(rep.right_faithful, window),
                           _lab(A, rep.right_witness), {"functional": f.name}))
        if A.is_dense and rep.left_faithful != rep.right_faithful:
            raise InconsistencyError("one-sided faithfulness on a finite-dimensional algebra")
    return ev


def _lab(A, v):
    if v is None:
        return None
    from .algebra import element_label
    return element_label(A, v)


def base_ok(ev: list[Evidence]) -> bool:
    need = ("algebra.nondegenerate", "algebra.associative", "coproduct.multiplier", "coproduct.homomorphism")
    by = {e.check_id: e for e in ev}
    if not all(by[k].ok for k in need if k in by):
        return False
    coassoc = [e for e in ev if e.check_id.startswith("coproduct.coassoc.")]
    ran = [e for e in coassoc if e.status != SKIPPED]
    return bool(ran) and all(e.ok for e in ran)


def nondegenerate_coproduct(engine: LSEngine) -> CheckOutcome:
    """span D(a)(b (x) c) = A (x) A (window membership for supported algebras)."""
    cop, A = engine.cop, engine.A
    keys = engine.keys()
    if not engine.regular("T4"):
        raise PreconditionError("needs T4 regular")
    idx = Indexer(cop.AA.window(engine.window)) if A.is_dense else Indexer()
    span = Subspace(len(idx) if A.is_dense else None)
    target = len(keys) ** 2
    # on a window, a product b (x) c can need a coproduct argument outside it
    outer = keys if A.is_dense else A.window(2 * (engine.window or A.default_window))
    for a in outer:
        for b in keys:
            t4 = cop.canonical("T4", b, a)
            for c in keys:
                span.add(idx.vec(leg_multiplier(cop.AA, 1, {c: ONE}).right(t4)))
            if A.is_dense and span.rank == target:
                return CheckOutcome(True)
    if A.is_dense:
        return CheckOutcome(span.rank == target, detail={"rank": span.rank})
    ok = all(span.contains(idx.vec({(s, t): ONE})) for s in keys for t in keys)
    return CheckOutcome(ok, window=True)


def idempotent_algebra(engine: LSEngine) -> CheckOutcome:
    A = engine.A
    if A.is_dense:
        return CheckOutcome(check_idempotent_algebra(A))
    keys = engine.keys()
    idx = Indexer()
    span = Subspace(None)
    for i in keys:
        for j in keys:
            span.add(idx.vec(A.mul_basis(i, j)))
    ok = all(span.contains(idx.vec({k: ONE})) for k in keys)
    return CheckOutcome(ok, window=True)


def classify(cop: Coproduct, phi: Functional | None, psi: Functional | None, window: int | None = None,
             engine: LSEngine | None = None, construct: bool = True) -> Classification:
    engine = engine or LSEngine(cop, window)
    A = engine.A
    ev = basic_evidence(engine, phi, psi)
    reg = {m for m in MAPS if engine.regular(m)}
    base = base_ok(ev)

    for m in MAPS:
        kind, _ = INJECTIVITY_HYPOTHESES[m]
        f = phi if kind == "left" else psi
        res = _safe(lambda m=m, f=f: check_injectivity(engine, m, f))
        if res is None or res.injective is None:
            ev.append(skipped(f"ls.injective.{m}", res.reason if res else "not applicable"))
        else:
            ev.append(Evidence(f"ls.injective.{m}", status_of(res.injective, False),
                               [_lab(cop.AA, v) for v in res.kernel[:1]] or None,
                               {"kernelDim": len(res.kernel), "hypothesisMet": res.hypothesis_met}))
    for m in MAPS:
        f = phi if LIFT_INTEGRAL[m] == "left" else psi
        kind = LIFT_INTEGRAL[m]
        if f is None or not engine.regular(*LIFT_REGULAR_PAIR[m]) or not engine.integral(f, kind):
            ev.append(skipped(f"ls.lift.{m}", f"needs {' and '.join(LIFT_REGULAR_PAIR[m])} regular and a {kind} integral"))
            continue
        _timed(ev, f"ls.lift.{m}", lambda m=m, f=f: check_lifts(engine, m, f))
    for m in MAPS:
        res = _safe(lambda m=m: check_bijectivity(engine, m, phi, psi))
        if res is None or res.bijective is None:
            ev.append(skipped(f"ls.bijective.{m}", res.reason if res else "not applicable"))
        else:
            ev.append(Evidence(f"ls.bijective.{m}", status_of(res.bijective, False), None,
                               {"rank": res.rank, "hypothesisMet": res.hypothesis_met}))

    flags = {
        "base": base,
        "regular": reg,
        "phi_left": engine.hypothesis(phi, "left", "left", coassoc=False),
        "phi_right": engine.hypothesis(phi, "left", "right", coassoc=False),
        "psi_left": engine.hypothesis(psi, "right", "left", coassoc=False),
        "psi_right": engine.hypothesis(psi, "right", "right", coassoc=False),
        "unital_elements": A.is_dense and A.unit is not None,
        "window": not A.is_dense,
    }
    verdict, qualifiers, notes, unmet = decide_verdict(flags)

    # automatic consequences: full legs, A = A^2, non-degenerate coproduct
    full = _timed(ev, "coproduct.full", lambda: cop.check_full(engine.window))
    idem = _timed(ev, "algebra.idempotent", lambda: idempotent_algebra(engine))
    nd = _timed(ev, "coproduct.nondegenerate", lambda: nondegenerate_coproduct(engine))
    if verdict != FAIL_VERDICT:
        for name, out in (("fullness", full), ("idempotency", idem), ("non-degeneracy", nd)):
            if out is not None and not out:
                raise InconsistencyError(f"{name} fails although the verdict is {verdict}")

    if construct:
        _constructions(engine, ev, phi, psi, flags)
    if verdict != FAIL_VERDICT:
        for e in ev:
            if e.check_id.startswith(("ls.counit", "ls.antipode")) and e.failed:
                raise InconsistencyError(f"{e.check_id} failed although the verdict is {verdict}")
    return Classification(verdict, ev, qualifiers, notes, unmet)


def _safe(fn):
    try:
        return fn()
    except PreconditionError:
        return None


def _constructions(engine: LSEngine, ev: list[Evidence], phi, psi, flags) -> None:
    A = engine.A
    if phi is None or not engine.regular("T1", "T4") or not engine.integral(phi, "left"):
        for cid in ("ls.counit.left", "ls.counit.right", "coproduct.counit", "ls.antipode", "ls.antipode.formula",
                    "ls.antipode.law", "ls.antipode.inverse", "ls.antipode.invertible"):
            ev.append(skipped(cid, "needs T1, T4 regular and a left integral"))
        return
    with Timer() as t:
        left = construct_counit_left(engine, phi, psi)
    ev.append(Evidence("ls.counit.left",
                       status_of(left.consistent and bool(left.verification), not engine.dense),
                       None if left.consistent else "inconsistent system",
                       {"legRank": left.leg_rank, "equations": left.equations, "hypothesesMet": left.hypotheses_met,
                        "values": _functional_labels(A, left.functional, engine)},
                       seconds=t.seconds))
    eps = left.functional
    if psi is not None and engine.integral(psi, "right"):
        with Timer() as t:
            right = construct_counit_right(engine, psi, phi, eps)
        ev.append(Evidence("ls.counit.right",
                           status_of(right.consistent and bool(right.verification), not engine.dense),
                           None if right.consistent else "inconsistent system",
                           {"legRank": right.leg_rank, "hypothesesMet": right.hypotheses_met,
                            "values": _functional_labels(A, right.functional, engine)}, seconds=t.seconds))
    else:
        ev.append(skipped("ls.counit.right", "needs a right integral"))
    if eps is not None and engine.regular("T1", "T2"):
        _timed(ev, "coproduct.counit", lambda: engine.cop.check_counit(eps, engine.window))
    else:
        ev.append(skipped("coproduct.counit", "no counit constructed"))
    swin = None if engine.dense else 3 * (engine.window or A.default_window)
    with Timer() as t:
        S = construct_antipode(engine, phi, psi, window=swin)
    ev.append(Evidence("ls.antipode", status_of(S.consistent, not engine.dense),
                       None if S.consistent else "inconsistent system",
                       {"legRank": len(S.leg_basis), "hypothesesMet": S.hypotheses_met,
                        "elementForm": S.element_form is not None}, seconds=t.seconds))
    if S.element_form is not None:
        _timed(ev, "ls.antipode.formula", lambda: check_antipode_formula(engine, S, phi))
    else:
        ev.append(skipped("ls.antipode.formula", "no element form"))
    if eps is not None:
        with Timer() as t:
            law, inv = check_antipode_axioms(engine, S, eps)
        law.seconds = t.seconds
        ev.extend([law, inv])
    else:
        ev.extend([skipped("ls.antipode.law", "no counit"), skipped("ls.antipode.inverse", "no counit")])
    if engine.dense and S.element_form is not None and len(S.leg_basis) == A.dim:
        r = rank(S.matrix(A.dim))
        ev.append(Evidence("ls.antipode.invertible", status_of(r == A.dim, False), None, {"rank": r}))
    else:
        ev.append(skipped("ls.antipode.invertible", "needs a dense algebra with full left leg"))
    engine.constructed = {"counit": eps, "antipode": S}


def _functional_labels(A, f: Functional | None, engine: LSEngine) -> list | None:
    if f is None:
        return None
    from .exact_linalg import format_scalar
    return [[A.label(k), format_scalar(f.value(k))] for k in engine.keys() if f.value(k)]


# -------------------------------------------------------------- symmetries

def opposite(cop: Coproduct) -> Coproduct:
    """(A^op, D): swaps T1 with T3 and T2 with T4."""
    return cop.on_opposite(cop.A.opposite())


def coopposite(cop: Coproduct) -> Coproduct:
    """(A, D^cop): swaps T1 with T4 and T2 with T3."""
    return cop.flipped()
