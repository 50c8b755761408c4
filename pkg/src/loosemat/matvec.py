"""Column-labelled matrices over GF(q), elimination and standard representations."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .gfq import FieldSpec, make_field, matmul

Label = str


class UnknownLabelError(KeyError):
    def __str__(self) -> str:
        return f"unknown element label {self.args[0]!r}"


class BasisError(ValueError):
    pass


class ScalingPatternError(ValueError):
    pass


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=np.int64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class FqMatrix:
    """An r x n matrix over ``field`` whose columns carry distinct labels."""

    field: FieldSpec
    entries: np.ndarray
    labels: tuple[Label, ...]
    _index: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        ent = np.array(self.entries, dtype=np.int64)
        if ent.ndim == 1 and ent.size == 0:
            ent = ent.reshape(0, len(self.labels))
        if ent.ndim != 2:
            raise ValueError("entries must be a 2-d array")
        labels = tuple(str(x) for x in self.labels)
        if ent.shape[1] != len(labels):
            raise ValueError(f"{ent.shape[1]} columns but {len(labels)} labels")
        if len(set(labels)) != len(labels):
            dup = sorted({x for x in labels if labels.count(x) > 1})
            raise ValueError(f"duplicate labels: {dup}")
        if ent.size and (ent.min() < 0 or ent.max() >= self.field.q):
            raise ValueError(f"entries must be codes in 0..{self.field.q - 1}")
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "_index", {x: i for i, x in enumerate(labels)})

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    def index(self, label: Label) -> int:
        try:
            return self._index[label]
        except KeyError:
            raise UnknownLabelError(label) from None

    def indices(self, labels: Iterable[Label]) -> list[int]:
        return [self.index(x) for x in labels]

    def column(self, label: Label) -> np.ndarray:
        return self.entries[:, self.index(label)]

    def select(self, labels: Sequence[Label]) -> "FqMatrix":
        return FqMatrix(self.field, self.entries[:, self.indices(labels)], tuple(labels))

    def relabel(self, mapping: dict) -> "FqMatrix":
        return FqMatrix(self.field, self.entries, tuple(mapping.get(x, x) for x in self.labels))

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, FqMatrix)
            and other.field == self.field
            and other.labels == self.labels
            and other.entries.shape == self.entries.shape
            and bool(np.array_equal(other.entries, self.entries))
        )

    def __hash__(self) -> int:
        return hash((self.field.q, self.labels, self.entries.tobytes()))

    def __repr__(self) -> str:
        return f"FqMatrix(q={self.field.q}, {self.rows}x{self.cols}, labels={list(self.labels)})"


def fq_matrix(q: int, rows, labels: Sequence[Label] | None = None) -> FqMatrix:
    """Convenience constructor from nested row lists."""
    ent = np.array(rows, dtype=np.int64)
    if ent.ndim == 1:
        ent = ent.reshape(1, -1) if ent.size else ent.reshape(0, 0)
    if labels is None:
        labels = [f"c{i + 1}" for i in range(ent.shape[1])]
    return FqMatrix(make_field(q), ent, tuple(labels))


# --------------------------------------------------------------------------
# elimination


def rref(F: FieldSpec, A: np.ndarray) -> tuple[np.ndarray, np.ndarray, list[int]]:
    """Reduced row echelon form.

    Returns ``(R, E, pivots)`` with ``E @ A == R`` over F and E invertible.
    Pivots are taken at the leftmost available column, on the lowest-index
    row with a nonzero entry there.
    """
    A = np.array(A, dtype=np.int64)
    m, n = A.shape
    R = np.concatenate([A, np.eye(m, dtype=np.int64)], axis=1)
    add, mul, neg, inv = F.add_table, F.mul_table, F.neg_table, F.inv_table
    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row == m:
            break
        nz = np.flatnonzero(R[row:, col])
        if nz.size == 0:
            continue
        p = row + int(nz[0])
        if p != row:
            R[[row, p]] = R[[p, row]]
        if R[row, col] != 1:
            R[row] = mul[inv[R[row, col]], R[row]]
        others = np.flatnonzero(R[:, col])
        others = others[others != row]
        if others.size:
            factors = neg[R[others, col]]
            R[others] = add[R[others], mul[factors[:, None], R[row][None, :]]]
        pivots.append(col)
        row += 1
    return R[:, :n], R[:, n:], pivots


def matrix_rank(F: FieldSpec, A: np.ndarray) -> int:
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return 0
    if F.q == 2:
        return gf2_rank_packed(pack_gf2_columns(A))
    return len(rref(F, A)[2])


def invert(F: FieldSpec, A: np.ndarray) -> np.ndarray:
    R, E, piv = rref(F, A)
    if len(piv) != A.shape[0] or A.shape[0] != A.shape[1]:
        raise np.linalg.LinAlgError("matrix is singular over the field")
    return E


# --------------------------------------------------------------------------
# bit-packed GF(2): a column is an int whose bit i is the row-i entry


def pack_gf2_columns(A: np.ndarray) -> list[int]:
    A = np.asarray(A, dtype=np.int64) & 1
    if A.shape[0] < 63:
        weights = np.left_shift(1, np.arange(A.shape[0], dtype=np.int64))
        return [int(x) for x in weights @ A]
    return [sum(1 << int(i) for i in np.flatnonzero(A[:, j])) for j in range(A.shape[1])]


def gf2_rank_packed(cols: Iterable[int]) -> int:
    """Rank of a set of packed GF(2) vectors (xor basis keyed by top bit)."""
    basis: dict[int, int] = {}
    for v in cols:
        while v:
            top = v.bit_length() - 1
            b = basis.get(top)
            if b is None:
                basis[top] = v
                break
            v ^= b
    return len(basis)


def rank_of(M: FqMatrix, subset: Iterable[Label] | None = None, packed: bool = True) -> int:
    """Rank of the columns labelled by ``subset`` (all columns when None)."""
    idx = list(range(M.cols)) if subset is None else M.indices(subset)
    if not idx or M.rows == 0:
        return 0
    sub = M.entries[:, idx]
    if M.field.q == 2 and packed:
        return gf2_rank_packed(pack_gf2_columns(sub))
    return len(rref(M.field, sub)[2])


# --------------------------------------------------------------------------
# standard representations


@dataclass(frozen=True)
class OriginMap:
    """How a standard representation was obtained from its source matrix.

    ``base = ((row_transform @ source)[:r, perm]) * col_scale`` with the
    product taken over the field and ``col_scale`` applied per column.
    """

    row_transform: np.ndarray
    perm: tuple[int, ...]
    col_scale: tuple[int, ...]


@dataclass(frozen=True)
class StandardRep:
    base: FqMatrix
    basis_order: tuple[Label, ...]
    origin: OriginMap
    source: FqMatrix = field(repr=False)

    @property
    def r(self) -> int:
        return len(self.basis_order)

    @property
    def nonbasis(self) -> tuple[Label, ...]:
        return self.base.labels[self.r:]

    def column(self, label: Label) -> np.ndarray:
        return self.base.column(label)


def apply_origin(F: FieldSpec, origin: OriginMap, source: np.ndarray, r: int) -> np.ndarray:
    full = matmul(F, origin.row_transform, source)[:r, list(origin.perm)]
    scale = np.array(origin.col_scale, dtype=np.int64)
    return F.mul_table[full, scale[None, :]]


def undo_origin(rep: StandardRep) -> np.ndarray:
    """Recover the source entries from ``rep.base`` and its origin map."""
    F = rep.base.field
    o = rep.origin
    m = o.row_transform.shape[0]
    inv_scale = np.array([F.inv(int(s)) for s in o.col_scale], dtype=np.int64)
    unscaled = F.mul_table[rep.base.entries, inv_scale[None, :]]
    padded = np.zeros((m, unscaled.shape[1]), dtype=np.int64)
    padded[: rep.r] = unscaled
    restored = matmul(F, invert(F, o.row_transform), padded)
    out = np.zeros_like(restored)
    out[:, list(o.perm)] = restored
    return out


def standard_rep(M: FqMatrix, basis: Sequence[Label]) -> StandardRep:
    """Row-reduce ``M`` so the columns of ``basis`` become I_r, in order."""
    F = M.field
    basis = tuple(basis)
    if len(set(basis)) != len(basis):
        raise BasisError("basis has repeated labels")
    bidx = M.indices(basis)
    r = rank_of(M)
    if len(basis) != r:
        raise BasisError(f"basis has {len(basis)} elements but the rank is {r}")
    _, E, piv = rref(F, M.entries[:, bidx])
    if len(piv) != r:
        raise BasisError(f"basis columns {list(basis)} are dependent")
    rest = [i for i in range(M.cols) if i not in set(bidx)]
    perm = tuple(bidx + rest)
    origin = OriginMap(_frozen(E), perm, tuple([1] * M.cols))
    ent = apply_origin(F, origin, M.entries, r)
    base = FqMatrix(F, ent, tuple(M.labels[i] for i in perm))
    return StandardRep(base, basis, origin, M)


def _rescaled(rep: StandardRep, row_scale: np.ndarray, col_scale: np.ndarray) -> StandardRep:
    """Scale rows then columns of ``rep.base`` and fold both into the origin map."""
    F = rep.base.field
    ent = F.mul_table[row_scale[:, None], rep.base.entries]
    ent = F.mul_table[ent, col_scale[None, :]]
    m = rep.origin.row_transform.shape[0]
    D = np.eye(m, dtype=np.int64)
    D[np.arange(rep.r), np.arange(rep.r)] = row_scale
    T = matmul(F, D, rep.origin.row_transform)
    cs = F.mul_table[np.array(rep.origin.col_scale, dtype=np.int64), col_scale]
    origin = OriginMap(_frozen(T), rep.origin.perm, tuple(int(x) for x in cs))
    return replace(rep, base=FqMatrix(F, ent, rep.base.labels), origin=origin)


def scale_normalize(rep: StandardRep, e: Label, mode: str = "all_ones") -> StandardRep:
    """Scale rows so the nonzero entries of column ``e`` become 1.

    ``mode`` is ``"all_ones"`` (every entry of e nonzero) or
    ``"top_zero_rest_ones"`` (only the first entry zero).  Basis columns are
    rescaled to keep the identity block.
    """
    if e in rep.basis_order:
        raise ScalingPatternError(f"{e!r} is a basis element")
    F = rep.base.field
    col = rep.column(e)
    zeros = [i + 1 for i in np.flatnonzero(col == 0)]
    if mode == "all_ones":
        if zeros:
            raise ScalingPatternError(f"column {e!r} has zero entries in rows {zeros}; all_ones needs none")
    elif mode == "top_zero_rest_ones":
        if zeros != [1]:
            raise ScalingPatternError(f"column {e!r} has zero entries in rows {zeros}; expected exactly row 1")
    else:
        raise ValueError(f"unknown scaling mode {mode!r}")
    row_scale = np.array([F.inv(int(c)) if c else 1 for c in col], dtype=np.int64)
    col_scale = np.ones(rep.base.cols, dtype=np.int64)
    col_scale[: rep.r] = F.inv_table[row_scale]
    return _rescaled(rep, row_scale, col_scale)


def scale_columns(rep: StandardRep, factors: dict) -> StandardRep:
    """Multiply non-basis columns by nonzero scalars (label -> scalar)."""
    F = rep.base.field
    col_scale = np.ones(rep.base.cols, dtype=np.int64)
    for label, s in factors.items():
        if label in rep.basis_order:
            raise ValueError(f"cannot scale basis column {label!r} alone")
        if s % F.q == 0:
            raise ValueError("column scale must be nonzero")
        col_scale[rep.base.index(label)] = s
    return _rescaled(rep, np.ones(rep.r, dtype=np.int64), col_scale)


def column_support(rep: StandardRep, f: Label) -> frozenset[int]:
    """1-based row indices of the nonzero entries of column ``f``."""
    return frozenset(int(i) + 1 for i in np.flatnonzero(rep.column(f)))


def root_entries(rep: StandardRep, f: Label) -> list[int]:
    """Entries of column ``f`` below the top row."""
    return [int(x) for x in rep.column(f)[1:]]
