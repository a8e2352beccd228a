"""Run the engines on a loaded instance and build stable reports."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import multiplier_as_element
from .coproduct import PreconditionError
from .evidence import FAIL, PASS, SKIPPED, WINDOW_PASS, Classification, Evidence, InconsistencyError, status_of
from .exact_linalg import ONE, format_scalar
from .instance import Instance, functional_spec, pair_entries
from .integrals import Functional
from .ls_engine import LSEngine, classify, construct_antipode, construct_counit_left
from .weak_engine import WeakContext, classify_weak, compute_F, derive_E, verify_E

EMITTABLE = ("counit", "antipode", "E", "F")


def jsonable(x):
    """Witnesses and details as plain JSON values with exact scalars."""
    if isinstance(x, Fraction):
        return format_scalar(x)
    if isinstance(x, bool) or x is None or isinstance(x, (int, str)):
        return x
    if isinstance(x, float):
        return x
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set, frozenset)):
        items = [jsonable(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    return str(x)


@dataclass
class RunResult:
    instance: str
    command: str
    evidence: list[Evidence]
    classification: Classification | None = None
    artifacts: dict = field(default_factory=dict)
    error: str | None = None
    exit_code: int = 0
    seconds: float = 0.0


def _classify(inst: Instance) -> tuple[Classification, dict]:
    """Classification plus constructed objects for oracle comparison."""
    cop = inst.coproduct
    built: dict = {}
    if inst.weak:
        lefts = [inst.functionals[n] for n in inst.left]
        rights = [inst.functionals[n] for n in inst.right]
        E = None if isinstance(inst.E, str) else inst.E
        res = classify_weak(cop, lefts, rights, E=E)
        built.update(E=res.sep.E if res.sep else None, derived_E=res.derived_E, F=res.F)
        return res.classification, built
    engine = LSEngine(cop, inst.window)
    c = classify(cop, inst.phi(), inst.psi(), inst.window, engine=engine)
    built.update(getattr(engine, "constructed", {}))
    return c, built


def _oracle_evidence(inst: Instance, c: Classification, built: dict) -> list[Evidence]:
    A = inst.algebra
    ev: list[Evidence] = []
    oracle = inst.oracle
    if "counit" in oracle:
        eps = built.get("counit")
        want = {A.key_of(lab): Fraction(v) for lab, v in oracle["counit"]}
        if eps is None:
            ev.append(Evidence("oracle.counit", FAIL, "no counit constructed"))
        else:
            bad = [A.label(k) for k in A.window() if eps.value(k) != want.get(k, Fraction(0))]
            ev.append(Evidence("oracle.counit", status_of(not bad, False), bad[:1] or None))
    if "antipode" in oracle:
        S = built.get("antipode")
        if S is None or S.element_form is None:
            ev.append(Evidence("oracle.antipode", FAIL, "no antipode constructed"))
        else:
            bad = None
            for lab, img in oracle["antipode"]:
                k = A.key_of(lab)
                want = {A.key_of(lab2): Fraction(v) for lab2, v in img}
                if S.element_form.get(k) != want:
                    bad = lab
                    break
            ev.append(Evidence("oracle.antipode", status_of(bad is None, False), bad))
    if "E" in oracle:
        if "derived_E" not in built:
            built["derived_E"], _ = derive_E(inst.coproduct)
        E = built.get("derived_E")
        want = {(i, j): Fraction(v) for (i, j), v in oracle["E"]}
        ev.append(Evidence("oracle.E", status_of(E == want, False), None if E == want else "derived E differs"))
    if "kernelDim" in oracle and c.get("weak.kernel.T1") is not None:
        got = c.get("weak.kernel.T1").detail.get("kernelDim")
        ok = got == oracle["kernelDim"]
        ev.append(Evidence("oracle.kernelDim", status_of(ok, False), None if ok else got))
    if "deltaOfZeroIsElement" in oracle:
        m = inst.coproduct.image(A.key_of("0"))
        is_elem = multiplier_as_element(m, hint=[(0, 0)]) is not None
        ok = is_elem == oracle["deltaOfZeroIsElement"]
        ev.append(Evidence("oracle.delta-in-multipliers", status_of(ok, False), None if ok else "element found"))
    if inst.expect is not None:
        ok = c.label == inst.expect
        ev.append(Evidence("expect.verdict", status_of(ok, False), None if ok else c.label,
                           {"expected": inst.expect}))
    return ev


def run_verify(inst: Instance, command: str = "verify") -> RunResult:
    start = time.perf_counter()
    try:
        c, built = _classify(inst)
    except InconsistencyError as err:
        ev = [Evidence("internal.consistency", FAIL, str(err))]
        return RunResult(inst.name, command, ev, Classification("Fail", ev), exit_code=1,
                         seconds=time.perf_counter() - start)
    evidence = list(c.evidence) + _oracle_evidence(inst, c, built)
    res = RunResult(inst.name, command, evidence, c, seconds=time.perf_counter() - start)
    if command == "verify":
        res.exit_code = 1 if any(e.failed for e in evidence) else 0
    else:
        matches = inst.expect is None or c.label == inst.expect
        res.exit_code = 0 if c.verdict != "Fail" and matches else 1
    return res


def run_construct(inst: Instance, emit: list[str]) -> RunResult:
    start = time.perf_counter()
    A = inst.algebra
    ev: list[Evidence] = []
    artifacts: dict = {}
    for what in emit:
        try:
            if what in ("counit", "antipode"):
                if inst.weak:
                    raise PreconditionError("counit and antipode are built for multiplier Hopf instances only")
                engine = LSEngine(inst.coproduct, inst.window)
                phi = inst.phi()
                if phi is None or not engine.integral(phi, "left"):
                    raise PreconditionError("no left integral verifies")
                if what == "counit":
                    r = construct_counit_left(engine, phi, inst.psi())
                    ok = r.consistent and bool(r.verification)
                    ev.append(Evidence("ls.counit.left", status_of(ok, not A.is_dense), None,
                                       {"hypothesesMet": r.hypotheses_met}))
                    if r.functional is not None:
                        artifacts["counit"] = functional_spec(A, Functional(
                            {k: r.functional.value(k) for k in A.window(inst.window)}, "counit"))
                else:
                    win = None if A.is_dense else 3 * (inst.window or A.default_window)
                    S = construct_antipode(engine, phi, inst.psi(), window=win)
                    ev.append(Evidence("ls.antipode", status_of(S.consistent and S.element_form is not None,
                                                                not A.is_dense), None,
                                       {"hypothesesMet": S.hypotheses_met}))
                    if S.element_form is not None:
                        keys = A.window(inst.window)
                        artifacts["antipode"] = [[A.label(k), [[A.label(o), format_scalar(v)]
                                                               for o, v in sorted(S.element_form.get(k, {}).items())]]
                                                 for k in keys]
            elif what in ("E", "F"):
                ctx = WeakContext(inst.coproduct)
                E = inst.E if isinstance(inst.E, dict) else None
                derived, info = derive_E(inst.coproduct, ctx)
                ev.append(Evidence("weak.E.derive", status_of(derived is not None, False),
                                   None if derived is not None else info.get("reason"), info))
                E = E if E is not None else derived
                if E is None:
                    raise PreconditionError("no separability idempotent")
                sep = verify_E(inst.coproduct, E, ctx)
                ev.extend(sep.evidence)
                if what == "E":
                    artifacts["E"] = {"element": pair_entries(E)}
                else:
                    if not sep.ok:
                        raise PreconditionError("E fails its conditions")
                    F = compute_F(ctx, sep)
                    ev.extend(F.evidence)
                    artifacts["F"] = {name: pair_entries(getattr(F, name)) for name in ("F1", "F2", "F3", "F4")}
            else:
                raise ValueError(f"cannot emit {what!r}")
        except (PreconditionError, InconsistencyError) as err:
            ev.append(Evidence(f"construct.{what}", FAIL, str(err)))
    code = 1 if any(e.failed for e in ev) or len(artifacts) < len(emit) else 0
    return RunResult(inst.name, "construct", ev, None, artifacts, exit_code=code,
                     seconds=time.perf_counter() - start)


# -------------------------------------------------------------------- reports

def report_dict(res: RunResult, timing: bool = False) -> dict:
    checks = []
    for e in res.evidence:
        rec = {"checkId": e.check_id, "paperRef": e.paper_ref, "status": e.status}
        if e.witness is not None:
            rec["witness"] = jsonable(e.witness)
        if e.detail:
            rec["detail"] = jsonable(e.detail)
        if timing:
            rec["timing"] = round(e.seconds, 6)
        checks.append(rec)
    counts = {s: 0 for s in (PASS, WINDOW_PASS, FAIL, SKIPPED)}
    for e in res.evidence:
        counts[e.status] = counts.get(e.status, 0) + 1
    out = {"instance": res.instance, "command": res.command, "checks": checks, "summary": counts,
           "exitCode": res.exit_code}
    if res.classification is not None:
        c = res.classification
        out["classification"] = {"verdict": c.verdict, "label": c.label, "qualifiers": jsonable(c.qualifiers),
                                 "notes": list(c.notes), "unmet": list(c.unmet)}
    if res.artifacts:
        out["artifacts"] = res.artifacts
    if res.error:
        out["error"] = res.error
    if timing:
        out["timing"] = round(res.seconds, 6)
    return out


def report_text(res: RunResult, timing: bool = False) -> str:
    lines = [f"== {res.instance} ({res.command})"]
    if res.error:
        lines.append(f"error: {res.error}")
    for e in res.evidence:
        line = f"{e.status:<12} {e.check_id}  [{e.paper_ref}]"
        if e.witness is not None:
            line += f"  witness={jsonable(e.witness)}"
        if timing:
            line += f"  {e.seconds:.3f}s"
        lines.append(line)
    if res.classification is not None:
        c = res.classification
        lines.append(f"verdict: {c.label}")
        for n in c.notes:
            lines.append(f"note: {n}")
        if c.unmet:
            lines.append("unmet: " + "; ".join(c.unmet))
    for name, art in res.artifacts.items():
        lines.append(f"{name}: {jsonable(art)}")
    lines.append(f"exit: {res.exit_code}")
    return "\n".join(lines) + "\n"
