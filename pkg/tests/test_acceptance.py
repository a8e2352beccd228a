"""Acceptance criteria 1-10, one test each.

Each criterion records a one-line PASS/FAIL verdict; the lines are printed
in the pytest terminal summary and when this file is run as a script:

    python3 tests/test_acceptance.py
"""

from __future__ import annotations

import io
import os
import sys
import tempfile
import time
from contextlib import redirect_stderr, redirect_stdout
from fractions import Fraction

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from hopfforge import corpus  # noqa: E402
from hopfforge.algebra import multiplier_as_element, tensor_elements  # noqa: E402
from hopfforge.cli import main as cli_main  # noqa: E402
from hopfforge.coproduct import MAPS  # noqa: E402
from hopfforge.exact_linalg import kernel_basis, rank  # noqa: E402
from hopfforge.instance import parse_instance  # noqa: E402
from hopfforge.integrals import LAMBDA_EQUALS_PHI, NOT_SCALAR_INVARIANT, scalar_invariance_to_integral  # noqa: E402
from hopfforge.ls_engine import HOPF_INVERTIBLE_S, LSEngine, check_antipode_axioms, classify  # noqa: E402
from hopfforge.runner import run_verify  # noqa: E402
from hopfforge.weak_engine import (  # noqa: E402
    WeakContext, check_kernel_formula, check_range_formula, classify_weak_with_unit, compute_F, derive_E, verify_E,
)
from oracles import group_oracle  # noqa: E402

ONE = Fraction(1)
HOPF_GROUPS = ("z2", "z3", "z4", "s3")
GROUPOIDS = ("pair-groupoid-2", "fun-pair-groupoid-2")
LS_INSTANCES = ("z1", "z2", "z3", "z4", "s3", "fun-z1", "fun-z2", "fun-z3", "fun-z4", "fun-s3", "one-object-z3",
                "zint-window-2", "zint-window-4", "zint-window-8")

RESULTS: dict[int, tuple[bool, str, str]] = {}
TITLES = {
    1: "Hopf reconstruction on Q[G] and F(G)",
    2: "antipode law and corruption detection",
    3: "automatic fullness and idempotency",
    4: "weak kernel formula on the pair groupoid",
    5: "weak range formula on the pair groupoid",
    6: "separability structure",
    7: "degeneration to E = 1 (x) 1",
    8: "scalar invariance to integral",
    9: "non-unital multiplier honesty on F_fin(Z)",
    10: "deterministic corpus and reports",
}


class CriterionFailure(AssertionError):
    pass


def need(cond: bool, msg: str) -> None:
    if not cond:
        raise CriterionFailure(msg)


def load(name: str):
    return parse_instance(corpus.generate(name), name)


def functionals(inst):
    return [inst.functionals[n] for n in inst.left], [inst.functionals[n] for n in inst.right]


# ------------------------------------------------------------------ criteria

def _oracle_maps(inst, group: str, kind: str):
    """Expected counit and antipode on basis labels, from the group law alone."""
    labels = inst.algebra.labels
    _, inv, e = group_oracle(group, labels)
    if kind == "group":
        counit = {lab: ONE for lab in labels}
    else:
        counit = {lab: (ONE if lab == e else 0) for lab in labels}
    antipode = {lab: {inv(lab): ONE} for lab in labels}
    return counit, antipode


def criterion_1() -> str:
    worst = 0.0
    for group in HOPF_GROUPS:
        for kind, name in (("group", group), ("function", f"fun-{group}")):
            inst = load(name)
            A = inst.algebra
            start = time.perf_counter()
            engine = LSEngine(inst.coproduct)
            c = classify(inst.coproduct, inst.phi(), inst.psi(), engine=engine)
            ranks = [rank(inst.coproduct.t_matrix(m)) for m in MAPS]
            elapsed = time.perf_counter() - start
            worst = max(worst, elapsed)
            need(ranks == [A.dim ** 2] * 4, f"{name}: T ranks {ranks}")
            need(c.verdict == HOPF_INVERTIBLE_S, f"{name}: verdict {c.verdict}")
            counit, antipode = _oracle_maps(inst, group, kind)
            eps = engine.constructed["counit"]
            got_eps = {A.label(k): eps.value(k) for k in range(A.dim)}
            need(got_eps == counit, f"{name}: counit {got_eps}")
            S = engine.constructed["antipode"]
            got_S = {A.label(k): {A.label(o): v for o, v in img.items()} for k, img in S.element_form.items()}
            need(got_S == antipode, f"{name}: antipode {got_S}")
            need(elapsed < 5.0, f"{name}: {elapsed:.2f}s")
    return f"8 instances, slowest {worst:.2f}s"


def criterion_2() -> str:
    for group in HOPF_GROUPS:
        for name in (group, f"fun-{group}"):
            inst = load(name)
            engine = LSEngine(inst.coproduct)
            c = classify(inst.coproduct, inst.phi(), inst.psi(), engine=engine)
            need(c.get("ls.antipode.law").status == "pass", f"{name}: antipode law")
            need(c.get("ls.antipode.inverse").status == "pass", f"{name}: T1 inverse identity")
            S, eps = engine.constructed["antipode"], engine.constructed["counit"]
            n = inst.algebra.dim
            bad = S.corrupted(n - 1, 0)
            law, inv = check_antipode_axioms(engine, bad, eps)
            need(law.failed and law.witness is not None, f"{name}: corruption not detected")
            need(inv.failed, f"{name}: corruption kept the T1 inverse")
    return "law and inverse exact on 8 instances; corruption caught with witness on each"


def criterion_3() -> str:
    inst = load("neg-non-full-coproduct")
    need(not inst.coproduct.check_full(), "non-full instance reports full legs")
    res = run_verify(inst, "classify")
    c = res.classification
    need(c.verdict == "Fail", f"verdict {c.verdict}")
    need(any("integral" in u for u in c.unmet), f"unmet {c.unmet}")
    positives = [n for n in corpus.names() if not n.startswith("neg-")]
    for name in positives:
        res = run_verify(load(name), "verify")
        ids = {e.check_id: e for e in res.evidence}
        full = ids.get("coproduct.full") or ids.get("weak.fullness")
        need(full is not None and full.ok, f"{name}: fullness")
        need(ids["algebra.idempotent"].ok, f"{name}: A = A^2")
    return f"negative fails on unmet integral hypothesis; fullness and A = A^2 hold on {len(positives)} positives"


def _weak_pieces(name):
    inst = load(name)
    ctx = WeakContext(inst.coproduct)
    sep = verify_E(inst.coproduct, inst.E, ctx)
    return inst, ctx, sep, compute_F(ctx, sep)


def criterion_4() -> str:
    inst, ctx, sep, F = _weak_pieces("pair-groupoid-2")
    dims = []
    for m in MAPS:
        ker_dim = len(kernel_basis(inst.coproduct.t_matrix(m)))
        rep = check_kernel_formula(ctx, m, F, hypothesis_met=True)
        need(rep.equal and rep.projection, f"{m}: kernel differs from its formula")
        need(ker_dim == rep.kernel_dim == rep.formula_dim, f"{m}: dims {ker_dim}/{rep.formula_dim}")
        dims.append(ker_dim)
    need(dims[0] == 8, f"dim Ker T1 = {dims[0]}")
    return f"kernel dims {dims}, each equal to its F-span"


def criterion_5() -> str:
    inst, ctx, sep, F = _weak_pieces("pair-groupoid-2")
    ranks = []
    for m in MAPS:
        rep = check_range_formula(ctx, m, sep.E, hypothesis_met=True)
        need(rep.equal, f"{m}: range differs from E-span")
        need(all(rep.inclusions.values()), f"{m}: inclusions {rep.inclusions}")
        ranks.append(rep.t_rank)
    need(ranks[0] == 8, f"rank T1 = {ranks[0]}")
    return f"ranks {ranks}, ranges equal E-spans, inclusions hold"


def criterion_6() -> str:
    for name in GROUPOIDS:
        inst, ctx, sep, F = _weak_pieces(name)
        derived, _ = derive_E(inst.coproduct, ctx)
        need(derived == inst.E, f"{name}: derived E differs from the supplied one")
        ids = {e.check_id: e for e in sep.evidence + F.evidence}
        for cid in ("weak.F.F1", "weak.F.F2", "weak.F.F3", "weak.F.F4", "weak.SB.antimultiplicative"):
            need(cid in ids and ids[cid].status == "pass", f"{name}: {cid}")
        need(sep.ok, f"{name}: separability conditions")
    return "E derived exactly on both groupoids; F1-F4 identities and S_B/S_C anti-multiplicativity hold"


def criterion_7() -> str:
    for name in LS_INSTANCES:
        inst = load(name)
        left, right = functionals(inst)
        ls = classify(inst.coproduct, inst.phi(), inst.psi(), inst.window, construct=False)
        res = classify_weak_with_unit(inst.coproduct, left, right, inst.window)
        c = res.classification
        need(c.label == ls.label, f"{name}: weak {c.label} vs {ls.label}")
        need(c.get("weak.degenerate").ok, f"{name}: degenerate cross-check")
        for m in MAPS:
            need(c.get(f"weak.kernel.{m}").detail.get("kernelDim") == 0, f"{name}: Ker {m} not trivial")
        if res.F is not None:
            one = tensor_elements([inst.algebra.unit, inst.algebra.unit])
            need(all(res.F.get(m) == one for m in MAPS), f"{name}: F differs from 1 (x) 1")
    return f"{len(LS_INSTANCES)} instances: same verdict, trivial kernels, F_i = 1 (x) 1"


def criterion_8() -> str:
    z3 = load("z3")
    res = scalar_invariance_to_integral(z3.coproduct, z3.phi())
    need(res.verdict == LAMBDA_EQUALS_PHI and res.agrees_everywhere, f"Z3: {res.verdict}")
    z2 = load("neg-non-integral-functional")
    res = scalar_invariance_to_integral(z2.coproduct, z2.phi())
    need(res.verdict == NOT_SCALAR_INVARIANT, f"Z2 delta_g: {res.verdict}")
    need(res.witness == "g1", f"witness {res.witness}")
    return "Z3: lambda = phi on all of A; Z2: delta_g rejected with witness g1"


def criterion_9() -> str:
    inst = load("zint-window-8")
    A = inst.algebra
    need(multiplier_as_element(inst.coproduct.image(A.key_of("0")), hint=[(0, 0)]) is None,
         "D(delta_0) was found to be an element")
    start = time.perf_counter()
    res = run_verify(inst, "classify")
    elapsed = time.perf_counter() - start
    ids = {e.check_id: e for e in res.evidence}
    for cid in [f"coproduct.regular.{m}" for m in MAPS] + ["integral.left", "integral.right"]:
        need(ids[cid].status == "window-pass", f"{cid}: {ids[cid].status}")
    need(res.classification.label == "MultiplierHopf(window-verified)", res.classification.label)
    need(elapsed < 10.0, f"{elapsed:.2f}s")
    return f"D(delta_0) not an element; window-pass; verdict window-verified in {elapsed:.2f}s"


def _round_trip() -> bytes:
    with tempfile.TemporaryDirectory() as tmp:
        sink = io.StringIO()
        with redirect_stdout(sink):
            need(cli_main(["corpus", "all", "--out", tmp]) == 0, "corpus generation failed")
        files = sorted(os.path.join(tmp, f) for f in os.listdir(tmp))
        out = io.StringIO()
        with redirect_stdout(out), redirect_stderr(io.StringIO()):
            cli_main(["verify", *files])
        corpus_bytes = b"".join(open(f, "rb").read() for f in files)
        return corpus_bytes + out.getvalue().encode("utf-8")


def criterion_10() -> str:
    first, second = _round_trip(), _round_trip()
    need(first == second, "reports differ between runs")
    return f"{len(first)} bytes identical across two runs"


CRITERIA = {n: globals()[f"criterion_{n}"] for n in TITLES}


def evaluate(n: int) -> tuple[bool, str]:
    try:
        detail = CRITERIA[n]()
        ok = True
    except CriterionFailure as err:
        ok, detail = False, str(err)
    RESULTS[n] = (ok, TITLES[n], detail)
    return ok, detail


def summary_lines() -> list[str]:
    return [f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}  ({detail})"
            for n, (ok, title, detail) in sorted(RESULTS.items())]


@pytest.mark.parametrize("n", sorted(TITLES))
def test_criterion(n):
    ok, detail = evaluate(n)
    print(f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {TITLES[n]}  ({detail})")
    assert ok, detail


if __name__ == "__main__":
    for n in sorted(TITLES):
        evaluate(n)
    print("\n".join(summary_lines()))
    sys.exit(0 if all(ok for ok, _, _ in RESULTS.values()) else 1)
