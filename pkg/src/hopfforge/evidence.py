"""Check records shared by the engines and the report writer."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .algebra import CheckOutcome

PASS = "pass"
FAIL = "fail"
SKIPPED = "skipped"
WINDOW_PASS = "window-pass"

# Stable citation tags for every check family. They name the result being
# instantiated; the README lists what each tag means.
REFS = {
    "algebra.nondegenerate": "notation:non-degenerate-product",
    "algebra.associative": "notation:algebra",
    "algebra.idempotent": "remark:automatic-consequences/idempotent",
    "coproduct.multiplier": "notation:multiplier-algebra",
    "coproduct.homomorphism": "def:coproduct",
    "coproduct.regular": "def:regular-canonical-map",
    "coproduct.coassoc": "def:coassociativity",
    "coproduct.full": "def:legs-and-fullness",
    "coproduct.nondegenerate": "remark:automatic-consequences/non-degenerate",
    "coproduct.counit": "def:counit",
    "integral.left": "def:integrals/left",
    "integral.right": "def:integrals/right",
    "faithful": "def:faithful-functional",
    "ls.injective": "prop:injectivity-from-integrals",
    "ls.lift": "prop:lift-elements",
    "ls.bijective": "prop:bijectivity-from-integrals",
    "ls.counit.left": "prop:counit-on-left-leg",
    "ls.counit.right": "prop:counit-on-right-leg",
    "ls.antipode": "prop:antipode-from-left-integral",
    "ls.antipode.formula": "prop:antipode-integral-formula",
    "ls.antipode.law": "prop:antipode-law",
    "ls.antipode.inverse": "remark:antipode-inverts-T1",
    "ls.antipode.invertible": "cor:invertible-antipode",
    "ls.verdict": "thm:mha-from-integrals",
    "weak.E": "cond:idempotent-E",
    "weak.E.coassoc": "cond:idempotent-E/extension",
    "weak.legs": "prop:legs-of-E",
    "weak.SB": "prop:antiisomorphisms",
    "weak.F": "prop:F-identities",
    "weak.integral.left": "prop:weak-integral-forms/left",
    "weak.integral.right": "prop:weak-integral-forms/right",
    "weak.faithful-set": "def:faithful-set",
    "weak.kernel": "prop:kernel-and-range",
    "weak.kernel.projection": "prop:kernel-and-range/projection",
    "weak.lift": "prop:weak-lift-elements",
    "weak.range": "prop:kernel-and-range",
    "weak.range.inclusions": "prop:range-inclusions",
    "weak.fullness": "prop:weak-left-leg-full",
    "weak.verdict": "thm:weak-mha-from-integrals",
    "appendix.scalar-invariance": "appendix:scalar-invariance",
}


def ref_for(check_id: str) -> str:
    parts = check_id.split(".")
    while parts:
        key = ".".join(parts)
        if key in REFS:
            return REFS[key]
        parts.pop()
    return "invented"


@dataclass
class Evidence:
    check_id: str
    status: str
    witness: object = None
    detail: dict = field(default_factory=dict)
    paper_ref: str = ""
    seconds: float = 0.0

    def __post_init__(self):
        if not self.paper_ref:
            self.paper_ref = ref_for(self.check_id)

    @property
    def ok(self) -> bool:
        return self.status in (PASS, WINDOW_PASS)

    @property
    def failed(self) -> bool:
        return self.status == FAIL


def from_outcome(check_id: str, outcome: CheckOutcome, **detail) -> Evidence:
    d = dict(outcome.detail)
    d.update(detail)
    return Evidence(check_id, outcome.status, outcome.witness, d)


def skipped(check_id: str, reason: str) -> Evidence:
    return Evidence(check_id, SKIPPED, None, {"reason": reason})


def status_of(ok: bool, window: bool) -> str:
    if not ok:
        return FAIL
    return WINDOW_PASS if window else PASS


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.seconds = time.perf_counter() - self.start
        return False


class InconsistencyError(AssertionError):
    """A theorem instance failed: hypotheses verified but the conclusion did not."""


@dataclass
class Classification:
    verdict: str
    evidence: list[Evidence]
    qualifiers: dict = field(default_factory=dict)
    notes: list[str] = field(default_factory=list)
    unmet: list[str] = field(default_factory=list)

    def get(self, check_id: str) -> Evidence | None:
        for e in self.evidence:
            if e.check_id == check_id:
                return e
        return None

    @property
    def label(self) -> str:
        if self.qualifiers.get("windowVerified"):
            return f"{self.verdict}(window-verified)"
        return self.verdict
