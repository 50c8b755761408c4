"""Verification suites: exhaustive sweeps at small rank, seeded sampling above.

Every suite splits its work into chunks.  A chunk is a small tuple of plain
values; its random generator is seeded from the suite seed and the chunk
itself, so results never depend on which worker ran it or in what order.
Outcomes are merged in chunk order.
"""

from __future__ import annotations

import json
import os
import time
import zlib
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from functools import lru_cache
from itertools import combinations, islice

import numpy as np

from . import classify as C
from .families import (
    FamilyTag,
    ag32,
    build_figure,
    golay12,
    series_pair_extension,
    ternary_free_build,
    uniform,
)
from .gfq import make_field
from .matroid import (
    _INF,
    LinearMatroid,
    _dp_add,
    _space,
    contract,
    delete,
    dual,
    element_status,
    embeds_containing,
    embeds_into,
    girth_through,
    iso_check,
    linear_matroid,
)
from .matvec import FqMatrix, gf2_rank_packed, invert, matmul, pack_gf2_columns

WORKERS_ENV = "LOOSEMAT_WORKERS"
SUITE_NAMES = ("thm-binary", "thm-ternary-bound", "thm-two-loose", "thm-paving", "prop-free")
EXHAUSTIVE_CHUNK = 1 << 12


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class SuiteConfig:
    suite: str
    q: int = 2
    ranks: tuple[int, ...] = ()
    mode: str = "sampled"
    samples: int = 1000
    seed: int = 0
    chunk_size: int = 250
    fault: str | None = None
    max_elements: int | None = None
    controls: int = 20

    def to_dict(self) -> dict:
        d = asdict(self)
        d["ranks"] = list(self.ranks)
        return d


@dataclass
class SuiteOutcome:
    config: dict
    counts: dict
    violations: list
    elapsed: float = 0.0

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self, include_elapsed: bool = True) -> dict:
        out = {
            "config": self.config,
            "counts": dict(sorted(self.counts.items())),
            "violations": self.violations,
            "passed": self.passed,
        }
        if include_elapsed:
            out["elapsed"] = round(self.elapsed, 3)
        return out

    def to_json(self, include_elapsed: bool = False) -> str:
        return json.dumps(self.to_dict(include_elapsed), sort_keys=True, indent=2)


_FAULTS = {
    "thm-binary": ("loose_threshold",),
    "thm-ternary-bound": ("census_inject",),
    "thm-two-loose": ("drop_cocircuit",),
    "thm-paving": ("wrong_q",),
    "prop-free": ("extra_element",),
}


def default_config(suite: str, q: int | None = None, ranks=None, **kw) -> SuiteConfig:
    """Fill in the usual field size, ranks and mode for a suite."""
    if suite not in SUITE_NAMES:
        raise ConfigError(f"unknown suite {suite!r}; choose from {', '.join(SUITE_NAMES)}")
    q = q if q is not None else {"thm-ternary-bound": 3}.get(suite, 2)
    if ranks is None:
        ranks = {
            "thm-binary": (3, 4),
            "thm-ternary-bound": (5,),
            "thm-two-loose": (2 * q + 1, 2 * q + 2, 2 * q + 3),
            "thm-paving": (3, 4) if q == 2 else (6,),
            "prop-free": (2, 3, 4) if q == 2 else (2, 3, 4, 5),
        }[suite]
    elif isinstance(ranks, int):
        ranks = (ranks,)
    if "mode" not in kw:
        if suite in ("thm-paving", "prop-free") or (suite == "thm-binary" and max(ranks) <= 4):
            kw["mode"] = "exhaustive"
    return SuiteConfig(suite=suite, q=q, ranks=tuple(ranks), **kw)


def validate(cfg: SuiteConfig) -> None:
    s, q, ranks = cfg.suite, cfg.q, cfg.ranks
    if s not in SUITE_NAMES:
        raise ConfigError(f"unknown suite {s!r}")
    if cfg.mode not in ("sampled", "exhaustive"):
        raise ConfigError(f"mode must be sampled or exhaustive, not {cfg.mode!r}")
    if not ranks:
        raise ConfigError("at least one rank is needed")
    if cfg.samples < 0 or cfg.chunk_size < 1:
        raise ConfigError("samples must be >= 0 and chunk_size >= 1")
    if cfg.fault is not None and cfg.fault not in _FAULTS[s]:
        raise ConfigError(f"suite {s} knows the faults {_FAULTS[s]}, not {cfg.fault!r}")
    if s == "thm-binary":
        if q != 2:
            raise ConfigError("thm-binary runs over GF(2)")
        if min(ranks) < 3:
            raise ConfigError("thm-binary needs rank >= 3")
        if cfg.mode == "exhaustive" and max(ranks) > 4:
            raise ConfigError("exhaustive thm-binary is limited to rank <= 4")
        if max(ranks) > 12:
            raise ConfigError("thm-binary sampling is limited to rank <= 12")
    elif s == "thm-ternary-bound":
        if q != 3:
            raise ConfigError("thm-ternary-bound runs over GF(3)")
        if min(ranks) < 5:
            raise ConfigError("thm-ternary-bound needs rank >= 5")
        if max(ranks) > 12:
            raise ConfigError("thm-ternary-bound is limited to rank <= 12")
        if cfg.mode != "sampled":
            raise ConfigError("thm-ternary-bound has no exhaustive mode")
    elif s == "thm-two-loose":
        if q not in (2, 3, 4, 5):
            raise ConfigError("thm-two-loose supports q in {2, 3, 4, 5}")
        if min(ranks) < 2:
            raise ConfigError("thm-two-loose needs rank >= 2")
        if q**max(ranks) > 600_000 or q ** (2 * q + 4) > 600_000:
            raise ConfigError("rank too large for this field")
        if cfg.mode == "exhaustive" and (q != 2 or ranks != (5,)):
            raise ConfigError("exhaustive thm-two-loose is the bounded sweep at q = 2, rank 5")
    elif s == "thm-paving":
        if q not in (2, 3):
            raise ConfigError("thm-paving supports q in {2, 3}")
        if q == 2 and (cfg.mode != "exhaustive" or min(ranks) < 2 or max(ranks) > 4):
            raise ConfigError("thm-paving over GF(2) is exhaustive for ranks 2..4")
    elif s == "prop-free":
        if q not in (2, 3):
            raise ConfigError("prop-free supports q in {2, 3}")
        if q == 2 and (cfg.mode != "exhaustive" or min(ranks) < 2 or max(ranks) > 4):
            raise ConfigError("prop-free over GF(2) is exhaustive for ranks 2..4")
        if q == 3 and (min(ranks) < 2 or max(ranks) > 5):
            raise ConfigError("prop-free over GF(3) takes circuit ranks 2..5 (circuits of size <= 6)")


# --------------------------------------------------------------------------
# chunk plumbing


def _rng(cfg: SuiteConfig, chunk: tuple) -> np.random.Generator:
    tag = zlib.crc32(json.dumps([cfg.suite, cfg.q, list(chunk)]).encode())
    return np.random.default_rng([cfg.seed, tag])


def _sample_chunks(kind: str, r: int, total: int, size: int) -> list[tuple]:
    out = []
    for idx, lo in enumerate(range(0, total, size)):
        out.append((kind, r, idx, min(size, total - lo)))
    return out


def plan(cfg: SuiteConfig) -> list[tuple]:
    """The ordered list of chunks making up a suite run."""
    validate(cfg)
    s, q = cfg.suite, cfg.q
    chunks: list[tuple] = []
    if s in ("thm-binary", "thm-paving", "prop-free") and cfg.mode == "exhaustive" and q == 2:
        for r in cfg.ranks:
            total = 1 << ((1 << r) - 1)
            for lo in range(1, total, EXHAUSTIVE_CHUNK):
                chunks.append(("sweep", r, lo, min(lo + EXHAUSTIVE_CHUNK, total)))
    if s == "thm-binary":
        if cfg.mode == "sampled":
            for r in cfg.ranks:
                chunks += _sample_chunks("sample", r, cfg.samples, cfg.chunk_size)
        chunks.append(("families", 12))
    elif s == "thm-ternary-bound":
        for r in cfg.ranks:
            chunks += _sample_chunks("sample", r, cfg.samples, cfg.chunk_size)
    elif s == "thm-two-loose":
        if cfg.mode == "exhaustive":
            r = cfg.ranks[0]
            extra = (cfg.max_elements or 2 * r) - r
            m = (1 << r) - 1 - r
            for k in range(0, extra + 1):
                total = _binom(m, k)
                for lo in range(0, total, EXHAUSTIVE_CHUNK):
                    chunks.append(("bounded", r, k, lo, min(lo + EXHAUSTIVE_CHUNK, total)))
        else:
            for r in cfg.ranks:
                chunks += _sample_chunks("sample", r, cfg.samples, cfg.chunk_size)
            chunks += _sample_chunks("boundary", 2 * q, max(cfg.samples // 25, 50), cfg.chunk_size)
        chunks += _sample_chunks("control", 2 * q + 4, cfg.controls, max(1, cfg.chunk_size // 10))
    elif s == "thm-paving" and q == 3:
        chunks.append(("catalog", 6))
    elif s == "prop-free" and q == 3:
        for r in cfg.ranks:
            chunks.append(("roundtrip", r))
    return chunks


def _binom(n: int, k: int) -> int:
    from math import comb

    return comb(n, k)


def run_chunk(cfg: SuiteConfig, chunk) -> tuple[dict, list]:
    """Run one chunk on its own; also the replay entry point for violations."""
    chunk = tuple(chunk)
    counts: Counter = Counter()
    violations: list = []
    _HANDLERS[cfg.suite](cfg, chunk, counts, violations)
    for v in violations:
        v["chunk"] = list(chunk)
    return dict(counts), violations


def _entry(args):
    return run_chunk(*args)


def merge_counts(parts) -> dict:
    out: Counter = Counter()
    maxima: dict = {}
    for part in parts:
        for k, v in part.items():
            if k.startswith("max_"):
                maxima[k] = max(maxima.get(k, v), v)
            else:
                out[k] += v
    out.update(maxima)
    return dict(sorted(out.items()))


def worker_count(workers: int | None = None) -> int:
    if workers is not None:
        return max(1, int(workers))
    env = os.environ.get(WORKERS_ENV)
    return max(1, int(env)) if env else 1


def run_suite(cfg: SuiteConfig, workers: int | None = None) -> SuiteOutcome:
    """Run every chunk of a suite and merge the results in chunk order."""
    t0 = time.perf_counter()
    chunks = plan(cfg)
    n = worker_count(workers)
    if n == 1 or len(chunks) == 1:
        results = [run_chunk(cfg, c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=n) as pool:
            results = list(pool.map(_entry, [(cfg, c) for c in chunks]))
    counts = merge_counts(r[0] for r in results)
    violations = [v for r in results for v in r[1]]
    return SuiteOutcome(cfg.to_dict(), counts, violations, time.perf_counter() - t0)


def _violation(kind: str, message: str, counterexample: dict | None = None) -> dict:
    return {"kind": kind, "message": message, "counterexample": counterexample or {}}


def _from_error(err: C.FalsificationError) -> dict:
    return _violation(err.kind, err.message, err.counterexample)


# --------------------------------------------------------------------------
# binary point sets


def _points_matroid(points, r: int) -> LinearMatroid:
    """Binary matroid whose columns are the given points of GF(2)^r (bit i = row i)."""
    A = np.array([[(p >> i) & 1 for p in points] for i in range(r)], dtype=np.int64).reshape(r, len(points))
    return linear_matroid(2, A, [f"p{p}" for p in points])


def _mask_points(mask: int) -> list[int]:
    out = []
    p = 1
    while mask:
        if mask & 1:
            out.append(p)
        mask >>= 1
        p += 1
    return out


def _sweep(r: int, lo: int, hi: int, counts: Counter):
    """Yield (mask, matroid) for rank-r coloop-free point sets with mask in [lo, hi)."""
    for mask in range(lo, hi):
        counts["candidates"] += 1
        pts = _mask_points(mask)
        if len(pts) <= r or gf2_rank_packed(pts) != r:
            continue
        M = _points_matroid(pts, r)
        if M.coloop_set:
            continue
        counts["instances"] += 1
        yield mask, M


def _gl2(r: int) -> list[tuple[int, ...]]:
    """All invertible r x r binary matrices, as tuples of column images."""
    out = []

    def bt(cols, span):
        if len(cols) == r:
            out.append(tuple(cols))
            return
        for v in range(1, 1 << r):
            if v not in span:
                bt(cols + [v], span | {s ^ v for s in span})

    bt([], frozenset([0]))
    return out


def _apply(g, p: int) -> int:
    x = 0
    i = 0
    while p:
        if p & 1:
            x ^= g[i]
        p >>= 1
        i += 1
    return x


_BINARY_FAMILIES = ("Lr", "Jr", "Mr", "Nr")
_MIN_RANK = {"Lr": 3, "Jr": 4, "Mr": 3, "Nr": 3}


@lru_cache(maxsize=None)
def _figure(name: str, r: int) -> LinearMatroid:
    return build_figure(FamilyTag(name, r=r))


@lru_cache(maxsize=None)
def orbit_tables(r: int) -> tuple[dict, dict]:
    """Every labelled copy of each figure family inside the points of GF(2)^r.

    Returns (anchored, unanchored): anchored[name] holds (anchor point, mask)
    pairs, unanchored[name] the masks.  For the restriction families Mr and
    Nr, every rank-r sub-mask containing the anchor is included.
    """
    G = _gl2(r)
    anchored, unanchored = {}, {}
    rank_cache: dict[int, int] = {}
    for name in _BINARY_FAMILIES:
        if r < _MIN_RANK[name]:
            anchored[name], unanchored[name] = frozenset(), frozenset()
            continue
        F = _figure(name, r)
        pts = pack_gf2_columns(F.rep.entries)
        e_pt = pts[F.index("e")]
        images = set()
        for g in G:
            full = 0
            for p in pts:
                full |= 1 << (_apply(g, p) - 1)
            images.add((_apply(g, e_pt), full))
        if name in ("Mr", "Nr"):
            closed = set()
            for a, full in images:
                abit = 1 << (a - 1)
                rest = full & ~abit
                sub = rest
                while True:
                    m = sub | abit
                    if m not in rank_cache:
                        rank_cache[m] = gf2_rank_packed(_mask_points(m))
                    if rank_cache[m] == r:
                        closed.add((a, m))
                    if sub == 0:
                        break
                    sub = (sub - 1) & rest
            images = closed
        anchored[name] = frozenset(images)
        unanchored[name] = frozenset(m for _, m in images)
    return anchored, unanchored


def _binary_instance(M: LinearMatroid, cfg, counts, violations, rhs_anchored, rhs_unanchored):
    """Per-instance comparison of looseness, the classifier and the embedding oracle."""
    r = M.rank
    threshold = r - 1 if cfg.fault == "loose_threshold" else r
    any_loose = False
    for e in M.labels:
        g = M.girths[e]
        loose = g is None or g >= threshold
        counts["elements"] += 1
        try:
            verdict = C.classify_binary_loose(M, e, check_loose=False)
            ok = True
        except C.FalsificationError:
            verdict, ok = None, False
        rhs = rhs_anchored(M, e)
        if loose:
            counts["loose_elements"] += 1
            any_loose = True
        if ok:
            counts[f"family_{verdict.family}"] += 1
            counts[f"case_{verdict.case}"] += 1
        if rhs is not None:
            counts[f"embeds_{rhs}"] += 1
        if loose != ok:
            violations.append(_violation(
                "LOOSE_VS_CLASSIFIER",
                f"element {e}: loose={loose} but classifier {'succeeded' if ok else 'failed'}",
                C.serialize(M, element=e),
            ))
        if loose != (rhs is not None):
            violations.append(_violation(
                "LOOSE_VS_EMBEDDING",
                f"element {e}: loose={loose} but anchored embedding {'found in ' + rhs if rhs else 'absent'}",
                C.serialize(M, element=e),
            ))
    unanch = rhs_unanchored(M)
    if unanch == any_loose:
        counts["unanchored_agree"] += 1
    else:
        violations.append(_violation(
            "UNANCHORED_READING",
            f"some element loose={any_loose} but unanchored family match={unanch}",
            C.serialize(M),
        ))


def _table_rhs(r: int):
    anchored, unanchored = orbit_tables(r)

    def mask_of(M):
        m = 0
        for x in M.labels:
            m |= 1 << (int(x[1:]) - 1)
        return m

    def rhs_a(M, e):
        key = (int(e[1:]), mask_of(M))
        for name in _BINARY_FAMILIES:
            if key in anchored[name]:
                return name
        return None

    def rhs_u(M):
        m = mask_of(M)
        return any(m in unanchored[name] for name in _BINARY_FAMILIES)

    return rhs_a, rhs_u


def _embedding_rhs(r: int):
    fams = [n for n in _BINARY_FAMILIES if r >= _MIN_RANK[n]]

    def rhs_a(M, e):
        for name in fams:
            F = _figure(name, r)
            if name in ("Lr", "Jr") and M.n != F.n:
                continue
            if embeds_into(M, e, F, "e") is not None:
                return name
        return None

    def rhs_u(M):
        for name in fams:
            F = _figure(name, r)
            if name in ("Lr", "Jr"):
                if M.n == F.n and embeds_into(M, None, F, None) is not None:
                    return True
            elif embeds_containing(M, F, "e") is not None:
                return True
        return False

    return rhs_a, rhs_u


def _random_gl2(rng, r: int) -> tuple[int, ...]:
    while True:
        cols = [int(x) for x in rng.integers(1, 1 << r, size=r)]
        if gf2_rank_packed(cols) == r:
            return tuple(cols)


def binary_candidate(rng, r: int) -> tuple[list[int], str]:
    """Random point set of GF(2)^r, biased toward sets with loose elements."""
    u = rng.random()
    if u < 0.6:
        fams = [n for n in _BINARY_FAMILIES if r >= _MIN_RANK[n]]
        name = fams[int(rng.integers(len(fams)))]
        F = _figure(name, r)
        pts = pack_gf2_columns(F.rep.entries)
        e_pt = pts[F.index("e")]
        keep = [p for p in pts if p == e_pt or rng.random() < 0.75]
        source = f"restriction_{name}"
        if rng.random() < 0.3:
            extra = [p for p in range(1, 1 << r) if p not in keep]
            keep.append(extra[int(rng.integers(len(extra)))])
            source = f"extension_{name}"
    else:
        n = int(rng.integers(r + 1, min(2 * r + 4, (1 << r) - 1) + 1))
        keep = [int(p) + 1 for p in rng.choice((1 << r) - 1, size=n, replace=False)]
        source = "uniform"
    g = _random_gl2(rng, r)
    pts = [_apply(g, p) for p in keep]
    rng.shuffle(pts)
    return pts, source


def _thm_binary(cfg, chunk, counts, violations):
    kind = chunk[0]
    if kind == "sweep":
        _, r, lo, hi = chunk
        rhs_a, rhs_u = _table_rhs(r)
        for _, M in _sweep(r, lo, hi, counts):
            _binary_instance(M, cfg, counts, violations, rhs_a, rhs_u)
    elif kind == "sample":
        _, r, _, n = chunk
        rng = _rng(cfg, chunk)
        rhs_a, rhs_u = _embedding_rhs(r)
        for _ in range(n):
            pts, source = binary_candidate(rng, r)
            counts["candidates"] += 1
            if gf2_rank_packed(pts) != r:
                continue
            M = _points_matroid(pts, r)
            if M.coloop_set:
                continue
            counts["instances"] += 1
            counts[f"source_{source}"] += 1
            _binary_instance(M, cfg, counts, violations, rhs_a, rhs_u)
    elif kind == "families":
        top = chunk[1]
        expected = {"Lr": "Lr", "Jr": "Jr", "Mr": "Mr_restriction", "Nr": "Nr_restriction"}
        for name in _BINARY_FAMILIES:
            for r in range(_MIN_RANK[name], top + 1):
                F = _figure(name, r)
                counts["family_checks"] += 1
                if not element_status(F, "e").is_loose or F.coloop_set:
                    violations.append(_violation("FAMILY_NOT_LOOSE", f"{name}, r={r}: e not loose or coloops present"))
                    continue
                try:
                    v = C.classify_binary_loose(F, "e")
                except C.FalsificationError as err:
                    violations.append(_from_error(err))
                    continue
                if v.family != expected[name]:
                    violations.append(_violation("FAMILY_MISCLASSIFIED", f"{name}, r={r} classified as {v.family}"))


# --------------------------------------------------------------------------
# growing matroids that keep chosen elements loose


class LooseGrower:
    """Add random columns to a matroid over GF(q)^r while keeping targets loose.

    For each target x a table D_x[v] holds the fewest columns (other than x)
    combining to v.  Adding a column v keeps x loose iff D_x[x - a v] >= r - 2
    for every nonzero a; the set of columns that would break this only grows,
    so it is maintained incrementally.
    """

    def __init__(self, q: int, r: int, columns, target_positions):
        self.q, self.r = q, r
        self.space = _space(q, r)
        self.F = make_field(q)
        self.cols: list[np.ndarray] = []
        self.taken = np.zeros(self.space.size, dtype=bool)
        self.taken[0] = True
        self.blocked = np.zeros(self.space.size, dtype=bool)
        columns = [np.asarray(c, dtype=np.int64) for c in columns]
        self.targets = [columns[i] for i in target_positions]
        self.tables = []
        for t in self.targets:
            D = np.full(self.space.size, _INF, dtype=np.int64)
            D[0] = 0
            self.tables.append(D)
            self._block(t, np.array([0]))  # columns parallel to a target
        self._target_codes = [int(self.space.encode(t.reshape(-1, 1))[0]) for t in self.targets]
        for i, c in enumerate(columns):
            own = target_positions.index(i) if i in target_positions else None
            self._add(c, own)

    def _multiples(self, v: np.ndarray) -> list[int]:
        return [int(self.space.encode(self.F.mul_table[a, v].reshape(-1, 1))[0]) for a in range(1, self.q)]

    def _add(self, v: np.ndarray, own: int | None = None) -> None:
        """Append column v; ``own`` is the index of the target it is, if any."""
        self.cols.append(v)
        for m in self._multiples(v):
            self.taken[m] = True
        limit = self.r - 3
        for k, t in enumerate(self.targets):
            if k == own:
                continue
            old = self.tables[k]
            new = _dp_add(self.space, old, v)
            self.tables[k] = new
            fresh = np.flatnonzero((new <= limit) & (old > limit))
            if fresh.size:
                self._block(t, fresh)

    def _block(self, t: np.ndarray, codes: np.ndarray) -> None:
        """Block every v with t - a v among ``codes`` for some nonzero a."""
        F, sp = self.F, self.space
        diff = sp.shifted(t)[sp.scaled(int(F.neg_table[1]))[codes]]  # t - w
        for a in range(1, self.q):
            self.blocked[sp.scaled(int(F.inv_table[a]))[diff]] = True

    def candidates(self) -> np.ndarray:
        return np.flatnonzero(~self.taken & ~self.blocked)

    def vector(self, code: int) -> np.ndarray:
        return self.space.digits[code].copy()

    def grow(self, rng, target_n: int | None) -> None:
        while target_n is None or len(self.cols) < target_n:
            cand = self.candidates()
            if cand.size == 0:
                return
            self._add(self.vector(int(cand[int(rng.integers(cand.size))])))

    def target_girth_ok(self) -> bool:
        return all(int(D[tc]) >= self.r - 1 for D, tc in zip(self.tables, self._target_codes))


def _disguise(rng, q: int, cols: list[np.ndarray], labels: list[str]) -> tuple[np.ndarray, list[str]]:
    """Random invertible row transform, column scaling and column order."""
    F = make_field(q)
    r = len(cols[0])
    A = np.stack(cols, axis=1)
    while True:
        T = rng.integers(0, q, size=(r, r))
        try:
            invert(F, T)
            break
        except ValueError:
            continue
    A = matmul(F, T, A)
    scale = rng.integers(1, q, size=A.shape[1])
    A = F.mul_table[A, scale[None, :]]
    order = rng.permutation(A.shape[1])
    return A[:, order], [labels[i] for i in order]


def ternary_loose_sample(rng, r: int, q: int = 3) -> LinearMatroid:
    """A simple matroid with an element e lying on a circuit of size r and none smaller."""
    I = np.eye(r, dtype=np.int64)
    e = np.ones(r, dtype=np.int64)
    e[0] = 0
    g = LooseGrower(q, r, [I[:, i] for i in range(r)] + [e], [r])
    target = None if rng.random() < 0.5 else int(rng.integers(r + 2, 6 * r))
    g.grow(rng, target)
    labels = [f"c{i}" for i in range(len(g.cols))]
    labels[r] = "e"
    A, labels = _disguise(rng, q, g.cols, labels)
    n = 0
    out = []
    for x in labels:
        if x == "e":
            out.append("e")
        else:
            n += 1
            out.append(f"c{n}")
    return LinearMatroid(FqMatrix(make_field(q), A, tuple(out)), {"e": "e"})


def inject_census_column(census_rep, label: str = "injected"):
    """Corrupt a normalized census representation with a column (1, 1, 1, 1, 0, ...)."""
    F = census_rep.base.field
    col = np.zeros((census_rep.r, 1), dtype=np.int64)
    col[:4, 0] = 1
    ent = np.concatenate([census_rep.base.entries, col], axis=1)
    return replace(census_rep, base=FqMatrix(F, ent, census_rep.base.labels + (label,)))


def _thm_ternary(cfg, chunk, counts, violations):
    _, r, _, n = chunk
    rng = _rng(cfg, chunk)
    bound = C.ternary_size_bound(r)
    for _ in range(n):
        M = ternary_loose_sample(rng, r, cfg.q)
        counts["samples"] += 1
        if not M.simple_flag:
            violations.append(_violation("GENERATOR", "generated matroid is not simple", C.serialize(M)))
            continue
        if M.coloop_set:
            counts["skipped_coloops"] += 1
            continue
        g = girth_through(M, "e")
        if g is None or g < r:
            violations.append(_violation("GENERATOR", f"girth through e is {g}, below the rank", C.serialize(M)))
            continue
        if g == r + 1:
            counts["routed_free"] += 1
            continue
        counts["instances"] += 1
        counts[f"max_size_r{r}"] = max(counts.get(f"max_size_r{r}", 0), M.n)
        if M.n > bound:
            violations.append(_violation("SIZE_BOUND", f"{M.n} elements exceed {bound}", C.serialize(M, element="e")))
        rep = C.normalized_census_rep(M, "e")
        if cfg.fault == "census_inject":
            rep = inject_census_column(rep)
        census = C.census_from_rep(rep, "e")
        if census.top_zero_count + sum(census.type_counts) + census.overflow_count != census.n - r - 1:
            violations.append(_violation("CENSUS_TOTAL", "column tally does not add up", C.serialize(M, element="e")))
        for key, val in census.observed().items():
            name = f"max_{key}_r{r}"
            counts[name] = max(counts.get(name, 0), val)
        try:
            C.check_census(census, M, "e")
        except C.FalsificationError as err:
            violations.append(_from_error(err))


# --------------------------------------------------------------------------
# two loose elements


def two_loose_sample(rng, q: int, r: int) -> tuple[LinearMatroid, str]:
    """A simple matroid of rank r, usually grown to keep two elements loose."""
    F = make_field(q)
    if rng.random() < 0.75:
        I = np.eye(r, dtype=np.int64)
        # either a full basis, or a hyperplane basis with e and f off the hyperplane
        # above 2q a full-basis start cannot keep both loose, so try it less often
        full = rng.random() < (0.5 if r <= 2 * q else 0.2)
        for _ in range(2 if full else 20):
            e = rng.integers(0, q, size=r)
            f = rng.integers(0, q, size=r)
            e[-1], f[-1] = rng.integers(1, q, size=2)
            base = [I[:, i] for i in range(r if full else r - 1)] + [e, f]
            g = LooseGrower(q, r, base, [len(base) - 2, len(base) - 1])
            pe = {tuple(F.mul_table[a, e]) for a in range(1, q)}
            if tuple(f) in pe or not f.any() or not g.target_girth_ok():
                continue
            target = None if rng.random() < 0.5 else int(rng.integers(r + 2, 4 * r))
            g.grow(rng, target)
            labels = [f"c{i}" for i in range(len(g.cols))]
            k = len(base) - 2
            labels[k], labels[k + 1] = "e", "f"
            A, labels = _disguise(rng, q, g.cols, labels)
            return LinearMatroid(FqMatrix(F, A, tuple(labels))), "grown"
    space = _space(q, r)
    n = int(rng.integers(r + 1, r + 9))
    seen, cols = set(), []
    while len(cols) < n:
        v = space.digits[int(rng.integers(1, space.size))]
        nz = np.flatnonzero(v)
        key = tuple(F.mul_table[F.inv_table[v[nz[0]]], v])
        if key not in seen:
            seen.add(key)
            cols.append(np.array(v, dtype=np.int64))
    A = np.stack(cols, axis=1)
    return LinearMatroid(FqMatrix(F, A, tuple(f"c{i}" for i in range(n)))), "uniform"


def _audit_all_pairs(M: LinearMatroid, cfg, counts, violations, tag: str):
    r, q = M.rank, M.q
    loose = [x for x in M.labels if M.girths[x] is not None and M.girths[x] >= r]
    counts[f"{tag}_loose_elements"] += len(loose)
    has_pair = len(loose) >= 2
    for e, f in combinations(loose, 2):
        counts[f"{tag}_pairs"] += 1
        audit = C.two_loose_audit(M, e, f, check_loose=False, cocircuit_escape=cfg.fault != "drop_cocircuit")
        counts[f"{tag}_{audit.verdict}"] += 1
        if audit.spanning_exactly_one is not None:
            counts[f"{tag}_spanning_checks"] += 1
        if audit.verdict == C.VIOLATION:
            violations.append(_violation("TWO_LOOSE", f"pair {e}, {f} at rank {r}", audit.details))
    if has_pair:
        D = dual(M)
        if D.simple_flag:
            counts[f"{tag}_cosimple_with_pair"] += 1
            if r > 2 * q:
                violations.append(_violation("COSIMPLE_RANK", f"cosimple with loose pair at rank {r} > 2q", C.serialize(M)))


def _thm_two_loose(cfg, chunk, counts, violations):
    kind = chunk[0]
    q = cfg.q
    if kind in ("sample", "boundary"):
        _, r, _, n = chunk
        rng = _rng(cfg, chunk)
        for _ in range(n):
            M, source = two_loose_sample(rng, q, r)
            counts[f"{kind}_samples"] += 1
            if M.rank != r or not M.simple_flag or M.coloop_set:
                continue
            counts[f"{kind}_instances"] += 1
            counts[f"{kind}_source_{source}"] += 1
            _audit_all_pairs(M, cfg, counts, violations, kind)
    elif kind == "bounded":
        _, r, k, lo, hi = chunk
        units = {1 << i for i in range(r)}
        others = [p for p in range(1, 1 << r) if p not in units]
        basis = sorted(units)
        for Q in islice(combinations(others, k), lo, hi):
            pts = basis + list(Q)
            counts["bounded_candidates"] += 1
            M = _points_matroid(pts, r)
            if M.coloop_set:
                continue
            counts["bounded_instances"] += 1
            _audit_all_pairs(M, cfg, counts, violations, "bounded")
    elif kind == "control":
        _, r, _, n = chunk
        rng = _rng(cfg, chunk)
        for _ in range(n):
            M = series_pair_sample(rng, q, r)
            counts["controls"] += 1
            if not (M.simple_flag and not M.coloop_set and element_status(M, "e").is_loose and element_status(M, "f").is_loose):
                violations.append(_violation("CONTROL", "series-pair construction is not a valid two-loose instance", C.serialize(M)))
                continue
            audit = C.two_loose_audit(M, "e", "f", check_loose=False, cocircuit_escape=cfg.fault != "drop_cocircuit")
            counts[f"control_{audit.verdict}"] += 1
            if audit.verdict != C.COCIRCUIT_PAIR:
                violations.append(_violation("CONTROL", f"series pair audited as {audit.verdict}", C.serialize(M)))


def series_pair_sample(rng, q: int, r: int) -> LinearMatroid:
    """Random series-pair instance of rank r.

    N (rank r - 1) is grown around a vector v that needs at least r - 2 of its
    columns; e and f are then attached over a new coordinate.
    """
    m = r - 1
    I = np.eye(m, dtype=np.int64)
    while True:
        v = rng.integers(1, q, size=m)
        g = LooseGrower(q, m, [I[:, i] for i in range(m)] + [v], [m])
        g.grow(rng, int(rng.integers(m + 1, 3 * m)))
        cols = [c for i, c in enumerate(g.cols) if i != m]
        A, labels = _disguise(rng, q, cols, [f"c{i}" for i in range(len(cols))])
        N = LinearMatroid(FqMatrix(make_field(q), A, tuple(labels)))
        # the constructor finds a vector at least as far from N as v
        try:
            M = series_pair_extension(N)
        except ValueError:
            continue
        if M.simple_flag and not M.coloop_set:
            return M


# --------------------------------------------------------------------------
# paving matroids


def _golay_catalog() -> list[tuple[str, LinearMatroid]]:
    G = golay12()
    out = [("golay12", G), ("dual", dual(G))]
    for x in G.labels:
        out.append((f"delete_{x}", delete(G, [x])))
        out.append((f"contract_{x}", contract(G, [x])))
    for x, y in list(combinations(G.labels, 2))[:12]:
        out.append((f"delete_{x}_{y}", delete(G, [x, y])))
        out.append((f"contract_{x}_{y}", contract(G, [x, y])))
    return out


def _audit_paving(M, cfg, counts, violations):
    try:
        a = C.paving_audit(M, q=cfg.q - 1 if cfg.fault == "wrong_q" else None)
    except C.FalsificationError as err:
        violations.append(_from_error(err))
        return None
    counts[f"branch_{a.branch}"] += 1
    if a.r == 2 * a.q and not a.is_circuit:
        counts["rank_2q_no_spanning"] += 1
    return a


def _thm_paving(cfg, chunk, counts, violations):
    kind = chunk[0]
    if kind == "sweep":
        _, r, lo, hi = chunk
        A = ag32()
        for _, M in _sweep(r, lo, hi, counts):
            gs = [v for v in M.girths.values() if v is not None]
            if min(gs) < r:
                continue
            counts["paving"] += 1
            _audit_paving(M, cfg, counts, violations)
            if r == 4 and M.n == 8:
                counts["rank4_size8"] += 1
                if iso_check(M, A) is None:
                    violations.append(_violation("NOT_AG32", "rank-4 8-element paving matroid not isomorphic to AG(3,2)", C.serialize(M)))
    elif kind == "catalog":
        for name, M in _golay_catalog():
            counts["catalog_items"] += 1
            if not M.simple_flag or M.coloop_set:
                counts["catalog_skipped"] += 1
                continue
            gs = [v for v in M.girths.values() if v is not None]
            if min(gs) < M.rank:
                counts["catalog_skipped"] += 1
                continue
            counts["paving"] += 1
            _audit_paving(M, cfg, counts, violations)


# --------------------------------------------------------------------------
# free elements


def _add_random_column(rng, M: LinearMatroid) -> LinearMatroid | None:
    """M plus one random column keeping it simple; None when no such column exists."""
    if M.n >= (M.q**M.rank - 1) // (M.q - 1):
        return None
    while True:
        v = rng.integers(0, M.q, size=M.rank)
        if not v.any():
            continue
        cand = linear_matroid(M.q, np.concatenate([M.coords, v.reshape(-1, 1)], axis=1), M.labels + ("extra",))
        if cand.simple_flag:
            return LinearMatroid(cand.rep, M.designated)


def _prop_free(cfg, chunk, counts, violations):
    kind = chunk[0]
    if kind == "sweep":
        _, r, lo, hi = chunk
        for _, M in _sweep(r, lo, hi, counts):
            rng = None
            for x in M.labels:
                if M.girths[x] != r + 1:
                    continue
                counts["free_elements"] += 1
                target = M
                if cfg.fault == "extra_element":
                    rng = rng or _rng(cfg, chunk)
                    target = _add_random_column(rng, M)
                    if target is None:
                        counts["fault_no_room"] += 1
                        continue
                try:
                    s = C.free_structure_check(target, x)
                except (C.FalsificationError, C.PreconditionError) as err:
                    violations.append(_violation("FREE_SHAPE", str(err), C.serialize(target, element=x)))
                    continue
                counts[f"shape_{s.kind}"] += 1
                if s.kind != C.BINARY_CIRCUIT:
                    violations.append(_violation("FREE_SHAPE", f"free element {x} gave {s.kind}", C.serialize(target, element=x)))
    elif kind == "roundtrip":
        _, rc = chunk
        k = rc + 1
        rng = _rng(cfg, chunk)
        for size in range(0, k):
            for D in combinations(range(1, k), size):
                M = ternary_free_build(k, D)
                if cfg.fault == "extra_element":
                    M = _add_random_column(rng, M) or M
                counts["constructions"] += 1
                st = element_status(M, "e")
                expected_rank = rc + len(D)
                if not M.simple_flag or M.coloop_set or M.rank != expected_rank:
                    violations.append(_violation("CONSTRUCTION", f"circuit size {k}, D={list(D)}: not simple/coloop-free or wrong rank", C.serialize(M)))
                    continue
                if not st.is_free:
                    violations.append(_violation("NOT_FREE", f"circuit size {k}, D={list(D)}: e has girth {st.girth_through}", C.serialize(M)))
                    continue
                try:
                    s = C.free_structure_check(M, "e")
                except C.FalsificationError as err:
                    violations.append(_from_error(err))
                    continue
                counts[f"shape_{s.kind}"] += 1
                if len(s.D) != len(D):
                    violations.append(_violation("ROUNDTRIP", f"recovered |D| = {len(s.D)}, built {len(D)}", C.serialize(M)))
        if rc == 2:
            U = uniform(2, 4, 3)
            counts["constructions"] += 1
            s = C.free_structure_check(U, "c1")
            counts[f"shape_{s.kind}"] += 1
            if s.kind != C.U24:
                violations.append(_violation("ROUNDTRIP", f"U(2,4) recognised as {s.kind}"))


_HANDLERS = {
    "thm-binary": _thm_binary,
    "thm-ternary-bound": _thm_ternary,
    "thm-two-loose": _thm_two_loose,
    "thm-paving": _thm_paving,
    "prop-free": _prop_free,
}


# named entry points, one per suite


def thm_binary(cfg: SuiteConfig) -> SuiteOutcome:
    return run_suite(replace(cfg, suite="thm-binary"))


def thm_ternary_bound(cfg: SuiteConfig) -> SuiteOutcome:
    return run_suite(replace(cfg, suite="thm-ternary-bound"))


def thm_two_loose(cfg: SuiteConfig) -> SuiteOutcome:
    return run_suite(replace(cfg, suite="thm-two-loose"))


def thm_paving(cfg: SuiteConfig) -> SuiteOutcome:
    return run_suite(replace(cfg, suite="thm-paving"))


def prop_free(cfg: SuiteConfig) -> SuiteOutcome:
    return run_suite(replace(cfg, suite="prop-free"))
