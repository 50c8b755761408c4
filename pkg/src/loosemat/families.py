"""Named matroids and the gluing operations used to build them.

Figure constructors use the labels ``b1..br`` for the identity block, ``e``
for the designated loose element and ``g1..gk`` for the remaining columns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

import numpy as np

from .gfq import make_field
from .matroid import LinearMatroid, _Echelon2, _echelon, _colvec, delete, dual, loops, relabel
from .matvec import FqMatrix, Label, standard_rep

FAMILY_NAMES = ("Lr", "Jr", "Mr", "Nr", "Pr", "Fano", "AG32", "U", "CircuitU", "Golay12")

# non-identity columns of the L_r and J_r figures, top rows only; every
# lower row is 1 for e and 0 elsewhere
_FIG_L = {"e": (1, 1, 1), "g1": (1, 1, 0), "g2": (1, 0, 1), "g3": (0, 1, 1)}
_FIG_J = {"e": (0, 1, 1, 1), "g1": (1, 1, 1, 0), "g2": (1, 1, 0, 1), "g3": (1, 0, 1, 1)}

# extended ternary Golay code, generator [I_6 | A]
_GOLAY_A = (
    (0, 1, 1, 1, 1, 1),
    (1, 0, 1, 2, 2, 1),
    (1, 1, 0, 1, 2, 2),
    (1, 2, 1, 0, 1, 2),
    (1, 2, 2, 1, 0, 1),
    (1, 1, 2, 2, 1, 0),
)


class FamilyError(ValueError):
    pass


@dataclass(frozen=True)
class FamilyTag:
    name: str
    r: int | None = None
    m: int | None = None
    n: int | None = None
    q: int | None = None
    designated: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.name not in FAMILY_NAMES:
            raise FamilyError(f"unknown family {self.name!r}; choose from {', '.join(FAMILY_NAMES)}")


_MIN_RANK = {"Lr": 3, "Jr": 4, "Mr": 3, "Nr": 3, "Pr": 2}


def _check_rank(name: str, r) -> int:
    if r is None or int(r) < _MIN_RANK[name]:
        raise FamilyError(f"{name} needs rank >= {_MIN_RANK[name]}, got {r}")
    return int(r)


def _figure_matrix(r: int, extra: dict[str, np.ndarray]) -> tuple[np.ndarray, list[str]]:
    cols = [np.eye(r, dtype=np.int64)[:, i] for i in range(r)]
    labels = [f"b{i + 1}" for i in range(r)]
    for lab, col in extra.items():
        cols.append(np.asarray(col, dtype=np.int64))
        labels.append(lab)
    return np.stack(cols, axis=1), labels


def _padded(top: Sequence[int], r: int, fill: int) -> np.ndarray:
    return np.array(list(top) + [fill] * (r - len(top)), dtype=np.int64)


def build_figure(tag: FamilyTag) -> LinearMatroid:
    """The GF(2) matrices for L_r, J_r, M_r and N_r, entry for entry."""
    name = tag.name
    if name not in ("Lr", "Jr", "Mr", "Nr"):
        raise FamilyError(f"no figure matrix for {name}")
    r = _check_rank(name, tag.r)
    extra: dict[str, np.ndarray] = {}
    if name in ("Lr", "Jr"):
        table = _FIG_L if name == "Lr" else _FIG_J
        for lab, top in table.items():
            extra[lab] = _padded(top, r, 1 if lab == "e" else 0)
    elif name == "Mr":
        extra["e"] = np.ones(r, dtype=np.int64)
        for i in range(1, r):
            col = np.zeros(r, dtype=np.int64)
            col[0] = col[i] = 1
            extra[f"g{i}"] = col
    else:
        extra["e"] = _padded([0], r, 1)
        for i in range(2, r):
            col = np.zeros(r, dtype=np.int64)
            col[0] = col[1] = col[i] = 1
            extra[f"g{i - 1}"] = col
    A, labels = _figure_matrix(r, extra)
    return LinearMatroid(FqMatrix(make_field(2), A, tuple(labels)), {"e": "e", "b": "b1"}, f"{name}({r})")


# --------------------------------------------------------------------------
# gluing


def _basis_through(M: LinearMatroid, x: Label) -> list[Label]:
    order = [M.index(x)] + [j for j in range(M.n) if j != M.index(x)]
    ech = _echelon(M, M.rank + 1)
    basis = []
    for j in order:
        if ech.push(_colvec(M, j)) is None:
            basis.append(M.labels[j])
    return basis


def parallel_connection(A: LinearMatroid, B: LinearMatroid, a: Label, b: Label) -> LinearMatroid:
    """Parallel connection of A and B identifying a with b (the result keeps a's label)."""
    if A.field != B.field:
        raise ValueError(f"field mismatch: GF({A.q}) vs GF({B.q})")
    if a in loops(A) or b in loops(B):
        raise ValueError("basepoint must not be a loop")
    clash = (set(A.labels) & set(B.labels)) - {b} if a == b else set(A.labels) & (set(B.labels) - {b})
    if clash:
        raise ValueError(f"label collision between the two matroids: {sorted(clash)}")
    basisA = _basis_through(A, a)
    basisA = basisA[1:] + [a]
    basisB = _basis_through(B, b)
    ra, rb = len(basisA), len(basisB)
    repA = standard_rep(A.rep, basisA).base
    repB = standard_rep(B.rep, basisB).base
    rows = ra + rb - 1
    cols, labels = [], []
    for lab in A.labels:
        col = np.zeros(rows, dtype=np.int64)
        col[:ra] = repA.column(lab)
        cols.append(col)
        labels.append(lab)
    for lab in B.labels:
        if lab == b:
            continue
        col = np.zeros(rows, dtype=np.int64)
        col[ra - 1:] = repB.column(lab)
        cols.append(col)
        labels.append(lab)
    des = {**B.designated, **A.designated}
    des = {k: v for k, v in des.items() if v in labels}
    return LinearMatroid(FqMatrix(A.field, np.stack(cols, axis=1), tuple(labels)), des)


def two_sum(A: LinearMatroid, B: LinearMatroid, a: Label, b: Label) -> LinearMatroid:
    """2-sum along basepoints a, b: parallel connection, then delete the basepoint."""
    if a in A.coloop_set or b in B.coloop_set:
        raise ValueError("2-sum basepoints must not be coloops")
    return delete(parallel_connection(A, B, a, b), [a])


def series_substitute(M: LinearMatroid, x: Label, class_size: int, new_labels: Sequence[Label] | None = None) -> LinearMatroid:
    """Replace x by a series class of ``class_size`` elements (x and the new labels)."""
    if class_size < 1:
        raise ValueError("class_size must be at least 1")
    if x in M.coloop_set:
        raise ValueError(f"{x!r} is a coloop; series substitution is degenerate")
    if new_labels is None:
        new_labels = [f"{x}.{i}" for i in range(2, class_size + 1)]
    new_labels = list(new_labels)
    if len(new_labels) != class_size - 1:
        raise ValueError("need class_size - 1 new labels")
    if set(new_labels) & set(M.labels):
        raise ValueError("new labels collide with existing ones")
    D = dual(M)
    col = D.rep.column(x)
    ent = np.concatenate([D.rep.entries, np.tile(col[:, None], (1, len(new_labels)))], axis=1)
    Dx = LinearMatroid(FqMatrix(M.field, ent, D.labels + tuple(new_labels)), M.designated)
    out = dual(Dx)
    out.name = None
    return out


def add_column(M: LinearMatroid, label: Label, col) -> LinearMatroid:
    col = np.asarray(col, dtype=np.int64).reshape(-1, 1)
    ent = np.concatenate([M.rep.entries, col], axis=1)
    return LinearMatroid(FqMatrix(M.field, ent, M.labels + (label,)), M.designated)


# --------------------------------------------------------------------------
# named matroids


def fano() -> LinearMatroid:
    cols = [[(v >> i) & 1 for i in range(3)] for v in range(1, 8)]
    A = np.array(cols, dtype=np.int64).T
    return LinearMatroid(FqMatrix(make_field(2), A, tuple(f"p{v}" for v in range(1, 8))), name="Fano")


def ag32() -> LinearMatroid:
    cols = [[1] + [(v >> i) & 1 for i in range(3)] for v in range(8)]
    A = np.array(cols, dtype=np.int64).T
    return LinearMatroid(FqMatrix(make_field(2), A, tuple(f"a{v}" for v in range(8))), name="AG(3,2)")


def uniform(m: int, n: int, q: int = 2) -> LinearMatroid:
    """U_{m,n} over GF(q).

    For 2 <= m <= n - 2 the columns are (1, t, ..., t^(m-1)) for distinct t,
    plus (0, ..., 0, 1) when n = q + 1, so n <= q + 1 is required.
    """
    F = make_field(q)
    if not 0 <= m <= n:
        raise FamilyError(f"U_{{{m},{n}}} needs 0 <= m <= n")
    labels = tuple(f"c{i + 1}" for i in range(n))
    if m == n:
        A = np.eye(n, dtype=np.int64)
    elif m == 0:
        A = np.zeros((0, n), dtype=np.int64)
    elif m == n - 1:
        A = np.concatenate([np.eye(m, dtype=np.int64), np.ones((m, 1), dtype=np.int64)], axis=1)
    elif m == 1:
        A = np.ones((1, n), dtype=np.int64)
    else:
        if n > q + 1:
            raise FamilyError(f"U_{{{m},{n}}} is not GF({q})-representable by this construction: need n <= q + 1 = {q + 1}")
        cols = [[F.pow(t, i) for i in range(m)] for t in range(min(n, q))]
        if n == q + 1:
            cols.append([0] * (m - 1) + [1])
        A = np.array(cols, dtype=np.int64).T
    return LinearMatroid(FqMatrix(F, A, labels), name=f"U({m},{n})")


def circuit_matroid(r: int, q: int = 2) -> LinearMatroid:
    """U_{r,r+1}: I_r plus the all-ones column, labelled b1..br, e."""
    A = np.concatenate([np.eye(r, dtype=np.int64), np.ones((r, 1), dtype=np.int64)], axis=1)
    labels = tuple(f"b{i + 1}" for i in range(r)) + ("e",)
    return LinearMatroid(FqMatrix(make_field(q), A, labels), {"e": "e"}, f"U({r},{r + 1})")


def _min_weight_gf3(G: np.ndarray) -> int:
    k = G.shape[0]
    best = G.shape[1]
    for coef in product(range(3), repeat=k):
        if any(coef):
            w = int(np.count_nonzero((np.array(coef) @ G) % 3))
            best = min(best, w)
    return best


def golay12() -> LinearMatroid:
    """Matroid of the extended ternary Golay code; self-checks on construction."""
    G = np.concatenate([np.eye(6, dtype=np.int64), np.array(_GOLAY_A, dtype=np.int64)], axis=1)
    if ((G @ G.T) % 3).any():
        raise AssertionError("Golay generator is not self-orthogonal")
    if _min_weight_gf3(G) != 6:
        raise AssertionError("Golay generator does not have minimum weight 6")
    return LinearMatroid(FqMatrix(make_field(3), G, tuple(f"c{i + 1}" for i in range(12))), name="S(5,6,12)")


# --------------------------------------------------------------------------
# structural constructions


def three_point_line(names: Sequence[Label]) -> LinearMatroid:
    A = np.array([[1, 0, 1], [0, 1, 1]], dtype=np.int64)
    return LinearMatroid(FqMatrix(make_field(2), A, tuple(names)))


def build_P(r: int) -> LinearMatroid:
    """Parallel connection of r - 1 three-point lines {b, x_i, y_i} at b."""
    r = _check_rank("Pr", r)
    P = three_point_line(["b", "x1", "y1"])
    for i in range(2, r):
        P = parallel_connection(P, three_point_line(["b*", f"x{i}", f"y{i}"]), "b", "b*")
    P.designated = {"b": "b"}
    P.name = f"P({r})"
    return P


def _binary_sum(M: LinearMatroid, labels: Sequence[Label]) -> np.ndarray:
    return np.bitwise_xor.reduce(np.stack([M.rep.column(x) for x in labels]), axis=0)


def build_structural(tag: FamilyTag) -> LinearMatroid:
    """L_r, J_r, M_r, N_r (and P_r) assembled from their verbal definitions."""
    name = tag.name
    r = _check_rank(name, tag.r)
    if name == "Pr":
        return build_P(r)
    if name == "Mr":
        P = build_P(r)
        z = _binary_sum(P, ["b"] + [f"x{i}" for i in range(1, r)])
        out = add_column(P, "z", z)
        out.designated = {"e": "z", "b": "b"}
    elif name == "Nr":
        # N_r is the dual of M_{r-1} plus a point on the line through z and b
        if r < 4:
            raise FamilyError("structural N_r needs rank >= 4")
        Mr = build_structural(FamilyTag("Mr", r - 1))
        w = _binary_sum(Mr, ["z", "b"])
        out = dual(add_column(Mr, "w", w))
        out.designated = {"e": "b"}
    elif name == "Lr":
        out = series_substitute(fano(), "p1", r - 2, [f"s{i}" for i in range(2, r - 1)])
        out.designated = {"e": "p1"}
    elif name == "Jr":
        out = series_substitute(ag32(), "a0", r - 3, [f"s{i}" for i in range(2, r - 2)])
        out.designated = {"e": "a0"}
    else:
        raise FamilyError(f"no structural construction for {name}")
    out.name = f"{name}({r})*"
    return out


def build_named(tag: FamilyTag) -> LinearMatroid:
    name = tag.name
    if name == "Fano":
        return fano()
    if name == "AG32":
        return ag32()
    if name == "Golay12":
        if tag.q not in (None, 3):
            raise FamilyError("Golay12 exists over GF(3) only")
        return golay12()
    if name == "U":
        if tag.m is None or tag.n is None:
            raise FamilyError("U needs m and n")
        return uniform(tag.m, tag.n, tag.q or 2)
    if name == "CircuitU":
        if tag.r is None or tag.r < 1:
            raise FamilyError("CircuitU needs rank >= 1")
        return circuit_matroid(tag.r, tag.q or 2)
    raise FamilyError(f"{name} is not a named matroid")


def build(tag: FamilyTag) -> LinearMatroid:
    """Dispatch: figure matrices for the four families, named builders otherwise."""
    if tag.name in ("Lr", "Jr", "Mr", "Nr"):
        return build_figure(tag)
    if tag.name == "Pr":
        return build_P(tag.r)
    return build_named(tag)


# --------------------------------------------------------------------------
# constructions for the free-element and two-loose statements


def free_two_sum_chain(circuit_size: int, D: Sequence[int], q: int = 3) -> LinearMatroid:
    """A circuit C = {e, c1, ..., c_{k-1}} with a U_{2,4} 2-summed across each c_i, i in D."""
    k = circuit_size
    C = circuit_matroid(k - 1, q)
    C = relabel(C, {f"b{i}": f"c{i}" for i in range(1, k)})
    out = C
    for i in sorted(D):
        if not 1 <= i <= k - 1:
            raise ValueError(f"D must index elements c1..c{k - 1}")
        U = relabel(uniform(2, 4, q), {"c1": f"u{i}_0", "c2": f"u{i}_1", "c3": f"u{i}_2", "c4": f"u{i}_3"})
        out = two_sum(out, U, f"c{i}", f"u{i}_0")
    out.designated = {"e": "e"}
    out.name = f"chain({k}, D={sorted(D)})"
    return out


def ternary_free_build(circuit_size: int, D: Sequence[int]) -> LinearMatroid:
    """Ternary matroid with a free element e: a circuit with U_{2,4} glued across D."""
    return free_two_sum_chain(circuit_size, D, q=3)


def series_pair_extension(N: LinearMatroid, e: Label = "e", f: Label = "f", v=None) -> LinearMatroid:
    """Extend N by a new coordinate and two elements e = (0, 1), f = (v, 1).

    {e, f} is then a cocircuit, and every circuit through e is {e, f} plus a
    minimal set of columns of N combining to v.  When ``v`` is None the first
    vector (in code order) needing the most columns of N is used; e and f are
    loose exactly when that count is at least r(N) - 1.
    """
    F = N.field
    r = N.rank
    if v is None:
        from .matroid import _INF, _dp_table, _space

        D = _dp_table(N, range(N.n))
        D = np.where(D >= _INF, -1, D)
        code = int(np.argmax(D))
        v = _space(N.q, r).digits[code] if N.q != 2 else np.array([(code >> i) & 1 for i in range(r)])
        if D[code] < r - 1:
            raise ValueError(f"every vector is a combination of fewer than {r - 1} columns of N; e, f would not be loose")
    v = np.asarray(v, dtype=np.int64)
    top = np.concatenate([N.coords, np.zeros((r, 1), dtype=np.int64), v.reshape(r, 1)], axis=1)
    bottom = np.zeros((1, N.n + 2), dtype=np.int64)
    bottom[0, -2:] = 1
    ent = np.concatenate([top, bottom], axis=0)
    return LinearMatroid(FqMatrix(F, ent, N.labels + (e, f)), {"e": e, "f": f})
