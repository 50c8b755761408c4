"""Matroid oracles for matrices over small finite fields.

Everything is computed from a representation: ranks by elimination, girths by
a shortest-combination dynamic programme over the ambient vector space, and
circuits by depth-first search over independent sets.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .gfq import FieldSpec, make_field
from .matvec import (
    FqMatrix,
    Label,
    gf2_rank_packed,
    pack_gf2_columns,
    rref,
    standard_rep,
)

MAX_CIRCUIT_GROUND = 24
MAX_ISO_GROUND = 14
MAX_DP_STATES = 600_000
_INF = 1 << 20


class ResourceGuardError(RuntimeError):
    """Input too large for an exhaustive routine."""


class LinearMatroid:
    """The column matroid of an FqMatrix, with memoised analyses.

    ``designated`` maps role names (``"e"``, ``"b"``, ...) to labels and is
    carried through relabelling and restriction.
    """

    def __init__(self, rep: FqMatrix, designated: dict | None = None, name: str | None = None):
        self.rep = rep
        self.designated = dict(designated or {})
        self.name = name

    @property
    def field(self) -> FieldSpec:
        return self.rep.field

    @property
    def q(self) -> int:
        return self.rep.field.q

    @property
    def labels(self) -> tuple[Label, ...]:
        return self.rep.labels

    @property
    def n(self) -> int:
        return self.rep.cols

    def __len__(self) -> int:
        return self.rep.cols

    def __repr__(self) -> str:
        tag = f"{self.name}, " if self.name else ""
        return f"LinearMatroid({tag}q={self.q}, rank={self.rank}, n={self.n})"

    def index(self, label: Label) -> int:
        return self.rep.index(label)

    @cached_property
    def _reduced(self):
        R, _, piv = rref(self.field, self.rep.entries) if self.rep.rows else (None, None, [])
        r = len(piv)
        coords = R[:r].copy() if r else np.zeros((0, self.n), dtype=np.int64)
        coords.setflags(write=False)
        return coords, tuple(piv)

    @property
    def coords(self) -> np.ndarray:
        """Full-row-rank r x n representation (reduced row echelon form)."""
        return self._reduced[0]

    @cached_property
    def rank(self) -> int:
        return len(self._reduced[1])

    @property
    def lex_basis(self) -> tuple[Label, ...]:
        """The greedy basis taken in label order."""
        return tuple(self.labels[i] for i in self._reduced[1])

    @cached_property
    def packed(self) -> tuple[int, ...]:
        if self.q != 2:
            raise TypeError("packed columns exist only over GF(2)")
        return tuple(pack_gf2_columns(self.coords)) if self.rank else (0,) * self.n

    @cached_property
    def codes(self) -> np.ndarray:
        """Each column as an integer code of the ambient space GF(q)^r."""
        return _space(self.q, self.rank).encode(self.coords)

    def rank_of(self, subset: Iterable[Label] | None = None) -> int:
        idx = range(self.n) if subset is None else self.rep.indices(subset)
        return self.rank_idx(idx)

    def rank_idx(self, idx: Iterable[int]) -> int:
        idx = list(idx)
        if not idx or self.rank == 0:
            return 0
        if self.q == 2:
            p = self.packed
            return gf2_rank_packed(p[i] for i in idx)
        return len(rref(self.field, self.coords[:, idx])[2])

    @cached_property
    def simple_flag(self) -> bool:
        return not loops(self) and not parallel_pairs(self)

    @cached_property
    def coloop_set(self) -> frozenset:
        # a pivot column is a coloop iff its row of the reduced form has no other nonzero
        C, piv = self._reduced
        if not piv:
            return frozenset()
        counts = np.count_nonzero(C, axis=1)
        return frozenset(self.labels[piv[i]] for i in range(len(piv)) if counts[i] == 1)

    @cached_property
    def girths(self) -> dict:
        """Girth through every element (None for coloops)."""
        return _all_girths(self)


def linear_matroid(q: int, rows, labels: Sequence[Label] | None = None, **kw) -> LinearMatroid:
    from .matvec import fq_matrix

    return LinearMatroid(fq_matrix(q, rows, labels), **kw)


# --------------------------------------------------------------------------
# simplicity


def _projective_key(F: FieldSpec, col: np.ndarray) -> tuple:
    nz = np.flatnonzero(col)
    if nz.size == 0:
        return ()
    lead = F.inv(int(col[nz[0]]))
    return tuple(int(x) for x in F.mul_table[lead, col])


def loops(M: LinearMatroid) -> list[Label]:
    return [x for j, x in enumerate(M.labels) if not M.coords[:, j].any()] if M.rank else list(M.labels)


def parallel_pairs(M: LinearMatroid) -> list[tuple[Label, Label]]:
    seen: dict[tuple, Label] = {}
    out = []
    for j, x in enumerate(M.labels):
        key = _projective_key(M.field, M.coords[:, j]) if M.rank else ()
        if key == ():
            continue
        if key in seen:
            out.append((seen[key], x))
        else:
            seen[key] = x
    return out


# --------------------------------------------------------------------------
# shortest combinations over the ambient space


class _Space:
    """Integer codes for the vectors of GF(q)^r: code = sum(v_i * q**i)."""

    def __init__(self, q: int, r: int):
        self.q, self.r = q, r
        self.F = make_field(q)
        self.size = q**r
        self.powers = q ** np.arange(r, dtype=np.int64)
        self._all = None
        self._digits = None
        self._steps: dict = {}

    @property
    def all(self) -> np.ndarray:
        if self._all is None:
            self._all = np.arange(self.size, dtype=np.int64)
        return self._all

    @property
    def digits(self) -> np.ndarray:
        if self._digits is None:
            d = np.empty((self.size, self.r), dtype=np.int64)
            x = self.all.copy()
            for i in range(self.r):
                d[:, i] = x % self.q
                x //= self.q
            self._digits = d
        return self._digits

    def encode(self, vecs: np.ndarray) -> np.ndarray:
        vecs = np.asarray(vecs, dtype=np.int64)
        if vecs.shape[0] == 0:
            return np.zeros(vecs.shape[1], dtype=np.int64)
        return self.powers @ vecs

    def _step(self, i: int, a: int) -> np.ndarray:
        """Codes of ``v + a e_i`` for every v (cached permutation)."""
        key = (i, a)
        perm = self._steps.get(key)
        if perm is None:
            d = self.digits[:, i]
            perm = self.all + (self.F.add_table[d, a] - d) * self.powers[i]
            self._steps[key] = perm
        return perm

    def scaled(self, c: int) -> np.ndarray:
        """Codes of ``c v`` for every v (cached permutation)."""
        key = ("scale", c)
        perm = self._steps.get(key)
        if perm is None:
            perm = self.encode(self.F.mul_table[c, self.digits].T)
            self._steps[key] = perm
        return perm

    def shifted(self, vec: np.ndarray) -> np.ndarray:
        """Codes of ``v + vec`` for every v, in code order."""
        if self.q == 2:
            return self.all ^ int(self.powers @ vec)
        out = None
        for i in np.flatnonzero(vec):
            step = self._step(int(i), int(vec[i]))
            out = step if out is None else step[out]
        return self.all if out is None else out


@lru_cache(maxsize=32)
def _space(q: int, r: int) -> _Space:
    return _Space(q, r)


def _dp_feasible(M: LinearMatroid) -> bool:
    return M.q**M.rank <= (1 << 22 if M.q == 2 else MAX_DP_STATES)


def _dp_add(space: _Space, D: np.ndarray, vec: np.ndarray) -> np.ndarray:
    """Fold one more column into the table of fewest-columns-summing-to-v."""
    F = space.F
    best = None
    for a in range(1, space.q):
        neg = F.mul_table[F.neg_table[a], vec]
        cand = D[space.shifted(neg)]
        best = cand if best is None else np.minimum(best, cand)
    return np.minimum(D, best + 1)


def _dp_table(M: LinearMatroid, idx: Iterable[int]) -> np.ndarray:
    space = _space(M.q, M.rank)
    D = np.full(space.size, _INF, dtype=np.int64)
    D[0] = 0
    for j in idx:
        D = _dp_add(space, D, M.coords[:, j])
    return D


def _all_girths(M: LinearMatroid) -> dict:
    if M.rank == 0:
        return {x: 1 for x in M.labels}
    if not _dp_feasible(M):
        return {x: _girth_search(M, M.index(x)) for x in M.labels}
    space = _space(M.q, M.rank)
    codes = M.codes
    out: dict = {}

    def rec(lo: int, hi: int, D: np.ndarray) -> None:
        if hi - lo == 1:
            d = int(D[codes[lo]])
            out[M.labels[lo]] = None if d >= _INF else d + 1
            return
        mid = (lo + hi) // 2
        left = D
        for j in range(mid, hi):
            left = _dp_add(space, left, M.coords[:, j])
        rec(lo, mid, left)
        right = D
        for j in range(lo, mid):
            right = _dp_add(space, right, M.coords[:, j])
        rec(mid, hi, right)

    D0 = np.full(space.size, _INF, dtype=np.int64)
    D0[0] = 0
    if M.n:
        rec(0, M.n, D0)
    return out


def _girth_search(M: LinearMatroid, j: int) -> int | None:
    """Increasing-size search for the smallest circuit through column j."""
    if not M.coords[:, j].any():
        return 1
    others = [i for i in range(M.n) if i != j]
    if M.rank_idx(others) < M.rank:
        return None
    for s in range(1, M.rank + 1):
        for S in combinations(others, s):
            if M.rank_idx(S) == s and M.rank_idx(S + (j,)) == s:
                return s + 1
    return None


def girth_through(M: LinearMatroid, e: Label) -> int | None:
    """Size of a smallest circuit containing ``e``; None if e is a coloop."""
    j = M.index(e)
    if "girths" in M.__dict__ or not _dp_feasible(M) or M.rank == 0:
        return M.girths[e]
    D = _dp_table(M, (i for i in range(M.n) if i != j))
    d = int(D[M.codes[j]])
    return None if d >= _INF else d + 1


def girth(M: LinearMatroid) -> int | None:
    vals = [g for g in M.girths.values() if g is not None]
    return min(vals) if vals else None


@dataclass(frozen=True)
class ElementStatus:
    element: Label
    is_coloop: bool
    girth_through: int | None
    is_loose: bool
    is_free: bool


def element_status(M: LinearMatroid, e: Label) -> ElementStatus:
    g = girth_through(M, e)
    r = M.rank
    return ElementStatus(
        element=e,
        is_coloop=g is None,
        girth_through=g,
        is_loose=g is None or g >= r,
        is_free=g is None or g == r + 1,
    )


def is_loose(M: LinearMatroid, e: Label) -> bool:
    return element_status(M, e).is_loose


def loose_elements(M: LinearMatroid, include_coloops: bool = False) -> list[Label]:
    out = []
    for x in M.labels:
        st = element_status(M, x)
        if st.is_loose and (include_coloops or not st.is_coloop):
            out.append(x)
    return out


# --------------------------------------------------------------------------
# incremental echelon forms with dependency tracking


class _Echelon2:
    """Xor basis over GF(2); remembers which inserted vectors built each row."""

    def __init__(self):
        self.rows: list[tuple[int, int, int]] = []  # (pivot bit, vector, combination mask)

    def reduce(self, v: int) -> tuple[int, int]:
        comb = 0
        for piv, row, c in self.rows:
            if (v >> piv) & 1:
                v ^= row
                comb ^= c
        return v, comb

    def push(self, v: int) -> int | None:
        """Insert; returns None if independent, else the dependency mask."""
        k = len(self.rows)
        v, comb = self.reduce(v)
        if v == 0:
            return comb
        self.rows.append((v.bit_length() - 1, v, comb | (1 << k)))
        return None

    def pop(self) -> None:
        self.rows.pop()


class _EchelonQ:
    """Echelon form over GF(q) with coefficient tracking."""

    def __init__(self, F: FieldSpec, dim: int, depth: int):
        self.F = F
        self.depth = depth
        self.rows: list[tuple[int, np.ndarray, np.ndarray]] = []

    def reduce(self, v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        F = self.F
        v = v.copy()
        comb = np.zeros(self.depth + 1, dtype=np.int64)
        for piv, row, c in self.rows:
            a = v[piv]
            if a:
                na = F.neg_table[a]
                v = F.add_table[v, F.mul_table[na, row]]
                comb = F.add_table[comb, F.mul_table[na, c]]
        return v, comb

    def push(self, v: np.ndarray) -> int | None:
        k = len(self.rows)
        red, comb = self.reduce(v)
        nz = np.flatnonzero(red)
        if nz.size == 0:
            # v + sum(comb_i * inserted_i) == 0
            return sum(1 << int(i) for i in np.flatnonzero(comb))
        piv = int(nz[0])
        s = self.F.inv(int(red[piv]))
        comb = comb.copy()
        comb[k] = 1
        self.rows.append((piv, self.F.mul_table[s, red], self.F.mul_table[s, comb]))
        return None

    def pop(self) -> None:
        self.rows.pop()


def _echelon(M: LinearMatroid, depth: int):
    return _Echelon2() if M.q == 2 else _EchelonQ(M.field, M.rank, depth)


def _colvec(M: LinearMatroid, j: int):
    return M.packed[j] if M.q == 2 else M.coords[:, j]


# --------------------------------------------------------------------------
# circuits


def _circuit_masks(M: LinearMatroid, max_size: int, within: Sequence[int] | None = None) -> set[int]:
    """Circuits (as bitmasks over column indices) of size <= max_size."""
    order = list(range(M.n)) if within is None else list(within)
    found: set[int] = set()
    ech = _echelon(M, M.rank + 1)
    members: list[int] = []

    def dfs(start: int) -> None:
        for t in range(start, len(order)):
            x = order[t]
            dep = ech.push(_colvec(M, x))
            if dep is not None:
                mask = 1 << x
                i = 0
                while dep:
                    if dep & 1:
                        mask |= 1 << members[i]
                    dep >>= 1
                    i += 1
                if bin(mask).count("1") <= max_size:
                    found.add(mask)
                continue
            members.append(x)
            if len(members) < max_size:
                dfs(t + 1)
            members.pop()
            ech.pop()

    if max_size >= 1:
        dfs(0)
    return found


def _mask_labels(M: LinearMatroid, mask: int) -> frozenset:
    return frozenset(M.labels[i] for i in range(M.n) if (mask >> i) & 1)


def _canonical(M: LinearMatroid, masks: Iterable[int]) -> list[frozenset]:
    def key(mask):
        idx = [i for i in range(M.n) if (mask >> i) & 1]
        return (len(idx), idx)

    return [_mask_labels(M, m) for m in sorted(masks, key=key)]


def circuits(M: LinearMatroid, max_size: int | None = None) -> list[frozenset]:
    """All circuits of size <= max_size (default r + 1), sorted by size then index."""
    if M.n > MAX_CIRCUIT_GROUND:
        raise ResourceGuardError(f"circuit enumeration limited to {MAX_CIRCUIT_GROUND} elements, got {M.n}")
    if max_size is None:
        max_size = M.rank + 1
    return _canonical(M, _circuit_masks(M, max_size))


def circuits_through(M: LinearMatroid, e: Label, max_size: int | None = None) -> list[frozenset]:
    return [C for C in circuits(M, max_size) if e in C]


# --------------------------------------------------------------------------
# duality and minors


def dual(M: LinearMatroid) -> LinearMatroid:
    """Dual matroid on the same labels, via [I | Q] -> [-Q^T | I]."""
    F = M.field
    r, n = M.rank, M.n
    piv = list(M._reduced[1])
    rest = [j for j in range(n) if j not in set(piv)]
    Q = M.coords[:, rest]
    out = np.zeros((n - r, n), dtype=np.int64)
    if r:
        out[:, piv] = F.neg_table[Q.T]
    out[:, rest] = np.eye(n - r, dtype=np.int64)
    name = f"dual({M.name})" if M.name else None
    return LinearMatroid(FqMatrix(F, out, M.labels), M.designated, name)


def restrict(M: LinearMatroid, keep: Iterable[Label]) -> LinearMatroid:
    keep_set = set(keep)
    for x in keep_set:
        M.index(x)
    labels = [x for x in M.labels if x in keep_set]
    des = {k: v for k, v in M.designated.items() if v in keep_set}
    return LinearMatroid(M.rep.select(labels), des)


def delete(M: LinearMatroid, drop: Iterable[Label]) -> LinearMatroid:
    drop_set = set(drop)
    for x in drop_set:
        M.index(x)
    return restrict(M, [x for x in M.labels if x not in drop_set])


def contract(M: LinearMatroid, T: Iterable[Label]) -> LinearMatroid:
    T = list(dict.fromkeys(T))
    tidx = M.rep.indices(T)
    rest = [j for j in range(M.n) if j not in set(tidx)]
    A = M.coords[:, tidx + rest]
    R, _, piv = rref(M.field, A)
    k = sum(1 for p in piv if p < len(tidx))
    ent = R[k: M.rank, len(tidx):]
    labels = tuple(M.labels[j] for j in rest)
    des = {a: b for a, b in M.designated.items() if b in set(labels)}
    return LinearMatroid(FqMatrix(M.field, ent, labels), des)


def relabel(M: LinearMatroid, mapping: dict) -> LinearMatroid:
    des = {k: mapping.get(v, v) for k, v in M.designated.items()}
    return LinearMatroid(M.rep.relabel(mapping), des, M.name)


def cocircuits(M: LinearMatroid, max_size: int | None = None) -> list[frozenset]:
    D = dual(M)
    return circuits(D, max_size if max_size is not None else D.rank + 1)


def is_cocircuit(M: LinearMatroid, S: Iterable[Label]) -> bool:
    """S is a cocircuit iff E - S is a hyperplane."""
    S = set(S)
    for x in S:
        M.index(x)
    if not S:
        return False
    rest = [x for x in M.labels if x not in S]
    if M.rank_of(rest) != M.rank - 1:
        return False
    return all(M.rank_of(rest + [x]) == M.rank for x in S)


# --------------------------------------------------------------------------
# flats, paving


def closure(M: LinearMatroid, S: Iterable[Label]) -> frozenset:
    S = list(S)
    r = M.rank_of(S)
    return frozenset(S) | {x for x in M.labels if x not in S and M.rank_of(S + [x]) == r}


def hyperplane_check(M: LinearMatroid, S: Iterable[Label]) -> bool:
    S = list(S)
    return M.rank_of(S) == M.rank - 1 and closure(M, S) == frozenset(S)


def is_paving(M: LinearMatroid) -> bool:
    g = girth(M)
    return g is None or g >= M.rank


def is_circuit(M: LinearMatroid) -> bool:
    """True when the whole ground set is the unique circuit (U_{r,r+1})."""
    return M.n == M.rank + 1 and all(g == M.n for g in M.girths.values())


def sparse_paving_by_dual(M: LinearMatroid) -> bool:
    return is_paving(M) and is_paving(dual(M))


def sparse_paving_by_hyperplanes(M: LinearMatroid) -> bool:
    if not is_paving(M):
        return False
    return all(hyperplane_check(M, C) for C in circuits(M, M.rank) if M.rank_of(C) < M.rank)


def is_sparse_paving(M: LinearMatroid) -> bool:
    a = sparse_paving_by_dual(M)
    if M.n <= MAX_CIRCUIT_GROUND:
        b = sparse_paving_by_hyperplanes(M)
        if a != b:
            raise AssertionError(f"sparse-paving criteria disagree on {M!r}: dual={a}, hyperplanes={b}")
    return a


def find_spanning_circuit(M: LinearMatroid, through: Label, avoid: Iterable[Label] = ()) -> frozenset | None:
    """A circuit of size r + 1 containing ``through`` and missing ``avoid``, or None.

    Depth-first over independent sets S in label order, looking for a basis
    in which ``through`` has no zero coordinate.
    """
    avoid_idx = set(M.rep.indices(avoid))
    r = M.rank
    t = M.index(through)
    if t in avoid_idx:
        return None
    if r == 0:
        # every element is a loop, a circuit of size r + 1
        return frozenset([through])
    others = [j for j in range(M.n) if j not in avoid_idx and j != t]
    ech = _echelon(M, r + 1)
    tv = _colvec(M, t)
    chosen: list[int] = []

    def dfs(start: int, depth: int) -> bool:
        for s in range(start, len(others) - (r - depth) + 1):
            if ech.push(_colvec(M, others[s])) is not None:
                continue
            chosen.append(others[s])
            dep = ech.push(tv)
            if dep is None:
                ech.pop()
                if depth + 1 < r and dfs(s + 1, depth + 1):
                    return True
            elif depth + 1 == r and bin(dep).count("1") == r:
                return True
            # t inside span(S) with |S| < r: every extension gives t a zero coordinate
            chosen.pop()
            ech.pop()
        return False

    if not dfs(0, 0):
        return None
    return frozenset(M.labels[j] for j in chosen) | {through}


def has_spanning_circuit(M: LinearMatroid, through: Label | None = None, avoid: Iterable[Label] = ()) -> bool:
    avoid = list(avoid)
    targets = [through] if through is not None else [x for x in M.labels if x not in avoid]
    return any(find_spanning_circuit(M, t, avoid) is not None for t in targets)


def min_circuit_through(M: LinearMatroid, e: Label) -> frozenset | None:
    """One smallest circuit containing e (None for a coloop).

    The choice is deterministic: trace back the column-by-column table.
    """
    j = M.index(e)
    if M.rank == 0 or not M.coords[:, j].any():
        return frozenset([e])
    if not _dp_feasible(M):
        g = _girth_search(M, j)
        if g is None:
            return None
        others = [i for i in range(M.n) if i != j]
        for S in combinations(others, g - 1):
            if M.rank_idx(S) == g - 1 and M.rank_idx(S + (j,)) == g - 1:
                if all(M.rank_idx([i for i in S if i != k] + [j]) == g - 1 for k in S):
                    return frozenset(M.labels[i] for i in S) | {e}
        return None
    space = _space(M.q, M.rank)
    F = M.field
    others = [i for i in range(M.n) if i != j]
    tables = []
    D = np.full(space.size, _INF, dtype=np.int64)
    D[0] = 0
    tables.append(D)
    for i in others:
        D = _dp_add(space, D, M.coords[:, i])
        tables.append(D)
    v = int(M.codes[j])
    if tables[-1][v] >= _INF:
        return None
    used = []
    for k in range(len(others), 0, -1):
        cur, prev = tables[k][v], tables[k - 1][v]
        if cur == prev:
            continue
        col = M.coords[:, others[k - 1]]
        for a in range(1, M.q):
            w = int(space.shifted(F.mul_table[F.neg_table[a], col])[v])
            if tables[k - 1][w] == cur - 1:
                used.append(others[k - 1])
                v = w
                break
        else:
            raise AssertionError("traceback failed")
    return frozenset(M.labels[i] for i in used) | {e}


# --------------------------------------------------------------------------
# isomorphism


def _circuit_signature(masks: set[int], n: int) -> list[tuple]:
    sig = [dict() for _ in range(n)]
    for m in masks:
        k = bin(m).count("1")
        for i in range(n):
            if (m >> i) & 1:
                sig[i][k] = sig[i].get(k, 0) + 1
    return [tuple(sorted(s.items())) for s in sig]


def iso_check(A: LinearMatroid, B: LinearMatroid, anchor: tuple[Label, Label] | None = None) -> dict | None:
    """A rank-preserving bijection E(A) -> E(B), or None.

    With ``anchor=(a, b)`` only bijections sending a to b are considered.
    Candidate bijections must carry the circuit family of A onto that of B.
    """
    if anchor is None and max(A.n, B.n) > MAX_ISO_GROUND:
        raise ResourceGuardError(f"unanchored isomorphism search limited to {MAX_ISO_GROUND} elements")
    if max(A.n, B.n) > MAX_CIRCUIT_GROUND:
        raise ResourceGuardError(f"isomorphism search limited to {MAX_CIRCUIT_GROUND} elements")
    if A.n != B.n or A.rank != B.rank:
        return None
    n = A.n
    if anchor is not None:
        a0, b0 = A.index(anchor[0]), B.index(anchor[1])
    cA = _circuit_masks(A, A.rank + 1)
    cB = _circuit_masks(B, B.rank + 1)
    if len(cA) != len(cB):
        return None
    sizesA = sorted(bin(m).count("1") for m in cA)
    if sizesA != sorted(bin(m).count("1") for m in cB):
        return None
    sigA, sigB = _circuit_signature(cA, n), _circuit_signature(cB, n)
    if sorted(sigA) != sorted(sigB):
        return None
    if anchor is not None and sigA[a0] != sigB[b0]:
        return None

    # order A's elements so circuits close early
    order: list[int] = [a0] if anchor is not None else []
    placed = 0
    for i in order:
        placed |= 1 << i
    remaining = [i for i in range(n) if i not in order]
    while remaining:
        def score(i):
            m = placed | (1 << i)
            closed = sum(1 for c in cA if (c >> i) & 1 and c & ~m == 0)
            touching = sum(1 for c in cA if (c >> i) & 1 and c & placed)
            return (closed, touching, -i)

        best = max(remaining, key=score)
        order.append(best)
        placed |= 1 << best
        remaining.remove(best)

    pos = {a: k for k, a in enumerate(order)}
    closing: list[list[int]] = [[] for _ in range(n)]
    for c in cA:
        last = max(pos[i] for i in range(n) if (c >> i) & 1)
        closing[last].append(c)
    byB: list[list[int]] = [[] for _ in range(n)]
    for c in cB:
        for i in range(n):
            if (c >> i) & 1:
                byB[i].append(c)

    phi = [-1] * n
    inv = [-1] * n

    def image(mask: int) -> int:
        out = 0
        i = 0
        while mask:
            if mask & 1:
                out |= 1 << phi[i]
            mask >>= 1
            i += 1
        return out

    def preimage(mask: int) -> int:
        out = 0
        i = 0
        while mask:
            if mask & 1:
                out |= 1 << inv[i]
            mask >>= 1
            i += 1
        return out

    def bt(k: int, img_mask: int) -> bool:
        if k == n:
            return True
        a = order[k]
        cands = [b0] if (anchor is not None and k == 0) else range(n)
        for b in cands:
            if inv[b] != -1 or sigB[b] != sigA[a]:
                continue
            phi[a], inv[b] = b, a
            new_mask = img_mask | (1 << b)
            ok = all(image(c) in cB for c in closing[k])
            if ok:
                ok = all(preimage(d) in cA for d in byB[b] if d & ~new_mask == 0)
            if ok and bt(k + 1, new_mask):
                return True
            phi[a], inv[b] = -1, -1
        return False

    if not bt(0, 0):
        return None
    return {A.labels[i]: B.labels[phi[i]] for i in range(n)}


def is_isomorphism(A: LinearMatroid, B: LinearMatroid, mapping: dict) -> bool:
    """Check rank agreement on every subset of size <= r + 1."""
    if A.n != B.n or A.rank != B.rank or sorted(mapping) != sorted(A.labels):
        return False
    if sorted(mapping.values()) != sorted(B.labels):
        return False
    for k in range(1, A.rank + 2):
        for S in combinations(A.labels, k):
            if A.rank_of(S) != B.rank_of(mapping[x] for x in S):
                return False
    return True


# --------------------------------------------------------------------------
# binary embeddings


def _basis_coords_gf2(M: LinearMatroid, first: Label | None) -> tuple[list[int], list[int]]:
    """Basis (column indices, ``first`` in front) and every column's coordinates in it."""
    order = list(range(M.n))
    if first is not None:
        j = M.index(first)
        order.remove(j)
        order.insert(0, j)
    basis: list[int] = []
    ech = _Echelon2()
    for j in order:
        if ech.push(M.packed[j]) is None:
            basis.append(j)
        else:
            pass
        if len(basis) == M.rank:
            break
    # re-run to get coordinates relative to this basis
    ech = _Echelon2()
    for j in basis:
        ech.push(M.packed[j])
    coords = []
    for j in range(M.n):
        res, comb = ech.reduce(M.packed[j])
        coords.append(comb)
    return basis, coords


def embeds_into(M: LinearMatroid, e: Label | None, F: LinearMatroid, e_F: Label | None) -> dict | None:
    """Injective phi: E(M) -> E(F), phi(e) = e_F, with M isomorphic to F restricted to phi(E(M)).

    Binary matroids only; searches linear maps sending a basis of M (through
    e) to independent columns of F and matches every other column exactly.
    """
    if M.q != 2 or F.q != 2:
        raise ValueError("embeds_into is defined for binary matroids only")
    if M.rank != F.rank:
        raise ValueError(f"rank mismatch: {M.rank} vs {F.rank}")
    if M.n > F.n:
        return None
    r = M.rank
    if r == 0:
        return None
    anchored = e is not None and e_F is not None
    basis, coords = _basis_coords_gf2(M, e if anchored else None)
    Fcols = {v: j for j, v in enumerate(F.packed)}
    # columns of M whose coordinate support tops out at basis position k
    due: list[list[int]] = [[] for _ in range(r)]
    for j, c in enumerate(coords):
        if c == 0:
            return None  # loop in M, F simple-or-not cannot host it injectively here
        due[c.bit_length() - 1].append(j)

    images = [0] * r
    used: dict[int, int] = {}  # F column index -> M column index
    ech = _Echelon2()

    def bt(k: int) -> bool:
        if k == r:
            return True
        if k == 0 and anchored:
            cands = [F.index(e_F)]
        else:
            cands = range(F.n)
        for fj in cands:
            if fj in used:
                continue
            if ech.push(F.packed[fj]) is not None:
                continue
            images[k] = F.packed[fj]
            assigned = []
            ok = True
            for j in due[k]:
                v = 0
                c = coords[j]
                i = 0
                while c:
                    if c & 1:
                        v ^= images[i]
                    c >>= 1
                    i += 1
                tgt = Fcols.get(v)
                if tgt is None or tgt in used:
                    ok = False
                    break
                used[tgt] = j
                assigned.append(tgt)
            if ok and bt(k + 1):
                return True
            for t in assigned:
                del used[t]
            ech.pop()
        return False

    if not bt(0):
        return None
    return {M.labels[j]: F.labels[fj] for fj, j in used.items()}


def embeds_containing(M: LinearMatroid, F: LinearMatroid, e_F: Label) -> dict | None:
    """Unanchored reading: some embedding of M into F whose image contains e_F."""
    for x in M.labels:
        phi = embeds_into(M, x, F, e_F)
        if phi is not None:
            return phi
    return None


def is_embedding(M: LinearMatroid, F: LinearMatroid, phi: dict) -> bool:
    """Check that ``phi`` is an isomorphism from M onto F restricted to its image.

    Compares the standard representations of both sides over a basis of M and
    its image; equal matrices give equal matroids.
    """
    if M.q != F.q or sorted(phi) != sorted(M.labels):
        return False
    image = [phi[x] for x in M.labels]
    if len(set(image)) != len(image) or any(y not in F.labels for y in image):
        return False
    sub = restrict(F, image)
    if sub.rank != M.rank:
        return False
    B = M.lex_basis
    if sub.rank_of(phi[x] for x in B) != len(B):
        return False
    if not B:
        return True
    sm = standard_rep(M.rep, B)
    sf = standard_rep(sub.rep, [phi[x] for x in B])
    return all(np.array_equal(sm.column(x), sf.column(phi[x])) for x in M.labels)
