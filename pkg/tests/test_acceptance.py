"""Acceptance criteria 1 to 10, one test each.

Each test records a PASS/FAIL line through the ``criterion`` fixture before
asserting, so the summary at the end of the run lists every verdict.
Wall-clock budgets are part of the criteria and count toward the verdict.
"""

import time

import numpy as np
import pytest

from loosemat import classify as C
from loosemat import verify as V
from loosemat.families import FamilyTag, ag32, build_figure, build_structural, golay12
from loosemat.matroid import (
    LinearMatroid,
    circuits,
    dual,
    element_status,
    girth_through,
    is_paving,
    iso_check,
    linear_matroid,
    sparse_paving_by_dual,
    sparse_paving_by_hyperplanes,
)

pytestmark = pytest.mark.slow

SIZES = {"Lr": lambda r: r + 4, "Jr": lambda r: r + 4, "Mr": lambda r: 2 * r, "Nr": lambda r: 2 * r - 1}


class Clock:
    def __init__(self):
        self.t0 = time.perf_counter()

    def within(self, budget: float) -> tuple[bool, str]:
        dt = time.perf_counter() - self.t0
        return dt < budget, f"{dt:.1f}s of {budget:.0f}s"


def _suite(cfg):
    return V.run_suite(cfg, workers=V.worker_count())


def test_criterion_1_family_catalog(criterion):
    clock = Clock()
    bad = []
    for r in range(4, 11):
        for name, size in SIZES.items():
            M = build_figure(FamilyTag(name, r=r))
            st = element_status(M, "e")
            if M.rank != r or M.n != size(r) or not st.is_loose:
                bad.append(f"{name}{r}")
            if name != "Mr" and st.is_free:
                bad.append(f"{name}{r} free")
    fast, t = clock.within(10)
    ok = criterion(1, not bad and fast, f"28 figures, bad={bad}, {t}")
    assert ok


def test_criterion_2_self_duality(criterion):
    clock = Clock()
    found = [iso_check(M, dual(M)) is not None for M in (build_figure(FamilyTag("Mr", r=r)) for r in range(3, 7))]
    fast, t = clock.within(60)
    ok = criterion(2, all(found) and fast, f"M_r = dual for r=3..6: {found}, {t}")
    assert ok


def test_criterion_3_structural_matches_figure(criterion):
    clock = Clock()
    bad = []
    for name in SIZES:
        for r in range(4, 9):
            tag = FamilyTag(name, r=r)
            S, F = build_structural(tag), build_figure(tag)
            if iso_check(S, F, anchor=(S.designated["e"], "e")) is None:
                bad.append(f"{name}{r}")
    fast, t = clock.within(120)
    ok = criterion(3, not bad and fast, f"20 anchored isomorphisms, bad={bad}, {t}")
    assert ok


def test_criterion_4_binary_exhaustive(criterion):
    clock = Clock()
    out3 = _suite(V.default_config("thm-binary", ranks=(3,)))
    out4 = _suite(V.default_config("thm-binary", ranks=(4,)))
    c = out4.counts
    realized = all(c.get(f"family_{f}", 0) > 0 for f in ("Lr", "Jr", "Mr_restriction", "Nr_restriction"))
    cases = c.get(f"case_{C.SPANNING_CASE}", 0) > 0 and c.get(f"case_{C.NONSPANNING_CASE}", 0) > 0
    neg = _suite(V.default_config("thm-binary", ranks=(5,), mode="sampled", samples=20, chunk_size=20, fault="loose_threshold"))
    fast, t = clock.within(30 * 60)
    ok = out3.passed and out4.passed and realized and cases and not neg.passed and fast
    criterion(
        4,
        ok,
        f"r=3: {out3.counts['instances']} matroids, r=4: {c['instances']} matroids / {c['elements']} elements, "
        f"violations {len(out3.violations) + len(out4.violations)}, families realized={realized}, "
        f"negative control violations {len(neg.violations)}, {t}",
    )
    assert ok


def test_criterion_5_ternary_bound(criterion):
    clock = Clock()
    cfg = V.default_config("thm-ternary-bound", ranks=(5, 6, 7, 8), samples=10_000, chunk_size=500, seed=2024)
    out = _suite(cfg)
    neg = _suite(V.default_config("thm-ternary-bound", samples=20, fault="census_inject"))
    fast, t = clock.within(20 * 60)
    ok = out.passed and out.counts["samples"] == 40_000 and not neg.passed and fast
    maxima = {r: out.counts.get(f"max_size_r{r}") for r in range(5, 9)}
    criterion(
        5,
        ok,
        f"{out.counts['instances']} instances, largest sizes {maxima}, violations {len(out.violations)}, "
        f"negative control violations {len(neg.violations)}, {t}",
    )
    assert ok


def test_criterion_6_two_loose(criterion):
    clock = Clock()
    parts, details = [], []
    for q in (2, 3):
        # 3334 per rank over three ranks gives at least 10^4 samples per field
        cfg = V.default_config("thm-two-loose", q=q, samples=3334, chunk_size=250, controls=40, seed=2024)
        out = _suite(cfg)
        c = out.counts
        sample_total = sum(v for k, v in c.items() if k == "sample_samples")
        controls_ok = c.get(f"control_{C.COCIRCUIT_PAIR}", 0) == cfg.controls
        parts.append(out.passed and sample_total >= 10_000 and controls_ok and c.get("boundary_spanning_checks", 0) > 0)
        details.append(
            f"q={q}: {sample_total} samples, {c.get('sample_pairs', 0)} pairs, "
            f"{c.get('boundary_spanning_checks', 0)} rank-2q spanning checks, controls {c.get(f'control_{C.COCIRCUIT_PAIR}', 0)}/{cfg.controls}, "
            f"violations {len(out.violations)}"
        )
    neg = _suite(V.default_config("thm-two-loose", q=2, ranks=(5,), samples=10, chunk_size=10, controls=3, fault="drop_cocircuit"))
    fast, t = clock.within(20 * 60)
    ok = all(parts) and not neg.passed and fast
    criterion(6, ok, "; ".join(details) + f"; negative control violations {len(neg.violations)}, {t}")
    assert ok


def test_criterion_7_paving_extremal(criterion):
    clock = Clock()
    a = C.paving_audit(ag32())
    ag_ok = (a.r, a.n, a.q, a.sparse_paving, a.spanning_circuit) == (4, 8, 2, True, False)
    G = golay12()
    g = C.paving_audit(G)
    golay_ok = (g.r, g.n, g.girth, g.spanning_circuit) == (6, 12, 6, False) and is_paving(G)
    sweep = _suite(V.default_config("thm-paving", q=2, ranks=(2, 3, 4)))
    n8 = sweep.counts.get("rank4_size8", 0)
    catalog = _suite(V.default_config("thm-paving", q=3))
    neg = _suite(V.default_config("thm-paving", q=2, ranks=(3,), fault="wrong_q"))
    fast, t = clock.within(10 * 60)
    ok = ag_ok and golay_ok and sweep.passed and n8 > 0 and catalog.passed and not neg.passed and fast
    criterion(
        7,
        ok,
        f"AG(3,2) ok={ag_ok}, Golay12 ok={golay_ok}, {n8} rank-4 8-point paving sets of PG(3,2), all AG(3,2), "
        f"golay catalog passed={catalog.passed}, negative control violations {len(neg.violations)}, {t}",
    )
    assert ok


def test_criterion_8_free_elements(criterion):
    clock = Clock()
    binary = _suite(V.default_config("prop-free", q=2, ranks=(2, 3, 4)))
    ternary = _suite(V.default_config("prop-free", q=3, ranks=(2, 3, 4, 5)))
    negs = [_suite(V.default_config("prop-free", q=q, ranks=(2, 3), fault="extra_element")) for q in (2, 3)]
    fast, t = clock.within(10 * 60)
    shapes = binary.counts.get(f"shape_{C.BINARY_CIRCUIT}", 0)
    ok = binary.passed and ternary.passed and shapes == binary.counts.get("free_elements") and all(not n.passed for n in negs) and fast
    criterion(
        8,
        ok,
        f"q=2: {binary.counts.get('free_elements')} free elements, all in circuits; "
        f"q=3: {ternary.counts.get('constructions')} constructions round-tripped; "
        f"negative controls {[len(n.violations) for n in negs]}, {t}",
    )
    assert ok


def _random_matroid(rng, q):
    r = int(rng.integers(1, 7))
    n = int(rng.integers(r, 13))
    return linear_matroid(q, rng.integers(0, q, size=(r, n)))


def test_criterion_9_oracle_equivalence(criterion):
    clock = Clock()
    rng = np.random.default_rng(9)
    girth_bad = sparse_bad = sub_bad = 0
    mats = [_random_matroid(rng, q) for q in (2, 3) for _ in range(500)]
    for M in mats:
        cs = circuits(M, M.n)
        fresh = LinearMatroid(M.rep)
        for x in M.labels:
            sizes = [len(Cc) for Cc in cs if x in Cc]
            want = min(sizes) if sizes else None
            if girth_through(fresh, x) != want or M.girths[x] != want:
                girth_bad += 1
        if sparse_paving_by_dual(M) != sparse_paving_by_hyperplanes(M):
            sparse_bad += 1
    for _ in range(10_000):
        M = mats[int(rng.integers(len(mats)))]
        X = [x for x in M.labels if rng.random() < 0.5]
        Y = [x for x in M.labels if rng.random() < 0.5]
        union = sorted(set(X) | set(Y), key=M.labels.index)
        inter = sorted(set(X) & set(Y), key=M.labels.index)
        if M.rank_of(X) + M.rank_of(Y) < M.rank_of(union) + M.rank_of(inter):
            sub_bad += 1
    fast, t = clock.within(10 * 60)
    ok = not (girth_bad or sparse_bad or sub_bad) and fast
    criterion(
        9,
        ok,
        f"1000 matroids: girth mismatches {girth_bad}, sparse-paving mismatches {sparse_bad}, "
        f"submodularity failures {sub_bad}/10000, {t}",
    )
    assert ok


DETERMINISM = [
    V.default_config("thm-binary", ranks=(3,)),
    V.default_config("thm-binary", ranks=(5,), mode="sampled", samples=12, chunk_size=4),
    V.default_config("thm-ternary-bound", ranks=(5, 6), samples=40, chunk_size=10),
    V.default_config("thm-two-loose", q=2, samples=12, chunk_size=4, controls=4),
    V.default_config("thm-two-loose", q=3, ranks=(7,), samples=6, chunk_size=2, controls=2),
    V.default_config("thm-paving", q=2, ranks=(3,)),
    V.default_config("prop-free", q=3, ranks=(2, 3, 4)),
    V.default_config("prop-free", q=2, ranks=(2, 3)),
]


def test_criterion_10_determinism(criterion):
    clock = Clock()
    same = []
    for cfg in DETERMINISM:
        a = V.run_suite(cfg, workers=1).to_json()
        b = V.run_suite(cfg, workers=3).to_json()
        same.append(a == b)
    ok = all(same)
    dt = time.perf_counter() - clock.t0
    criterion(10, ok, f"{sum(same)}/{len(same)} suite configs byte-identical across 1 and 3 workers, {dt:.1f}s")
    assert ok
