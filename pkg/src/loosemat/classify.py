"""Decision procedures for loose and free elements.

Each procedure either returns a structured verdict or raises
``FalsificationError`` carrying a serialisable counterexample.  Input
conditions that the caller got wrong raise ``PreconditionError`` instead, so
the two can never be confused in a verification run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations

import numpy as np

from .families import FamilyTag, build_figure
from .matroid import (
    LinearMatroid,
    contract,
    delete,
    element_status,
    find_spanning_circuit,
    has_spanning_circuit,
    is_circuit,
    is_cocircuit,
    is_embedding,
    is_paving,
    is_sparse_paving,
    min_circuit_through,
)
from .matvec import Label, StandardRep, column_support, scale_columns, scale_normalize, standard_rep

SPANNING_CASE = "SPANNING_CASE"
NONSPANNING_CASE = "NONSPANNING_CASE"

RANK_OK = "RANK_OK"
COCIRCUIT_PAIR = "COCIRCUIT_PAIR"
VIOLATION = "VIOLATION"

BINARY_CIRCUIT = "BINARY_CIRCUIT"
U24 = "U24"
TWO_SUM_TREE = "TWO_SUM_TREE"
NOT_FREE = "NOT_FREE"

CIRCUIT = "CIRCUIT"
RANK_LE_Q = "RANK_LE_Q"
SPARSE_PAVING = "SPARSE_PAVING"


class PreconditionError(ValueError):
    pass


class FalsificationError(Exception):
    """A checked implication failed on a concrete matroid."""

    def __init__(self, kind: str, message: str, counterexample: dict | None = None):
        super().__init__(f"{kind}: {message}")
        self.kind = kind
        self.message = message
        self.counterexample = counterexample or {}

    def to_dict(self) -> dict:
        return {"kind": self.kind, "message": self.message, "counterexample": self.counterexample}


def serialize(M: LinearMatroid, **extra) -> dict:
    """Enough to rebuild M exactly: field size, labels and entries."""
    out = {"q": M.q, "labels": list(M.labels), "rows": M.rep.entries.tolist()}
    if M.designated:
        out["designated"] = dict(M.designated)
    out.update(extra)
    return out


def _require_simple_coloop_free(M: LinearMatroid):
    if not M.simple_flag:
        raise PreconditionError("matroid is not simple")
    if M.coloop_set:
        raise PreconditionError(f"matroid has coloops {sorted(M.coloop_set)}")


# --------------------------------------------------------------------------
# binary classification


@dataclass(frozen=True)
class BinaryLooseVerdict:
    case: str
    family: str
    witness: dict
    rep: StandardRep = field(repr=False, compare=False)

    def to_dict(self) -> dict:
        return {"case": self.case, "family": self.family, "witness": dict(sorted(self.witness.items()))}


@lru_cache(maxsize=None)
def _figure(name: str, r: int) -> LinearMatroid:
    return build_figure(FamilyTag(name, r=r))


def _contradiction(M, e, message, cols):
    raise FalsificationError(
        "CONTRADICTS_THEOREM", message, serialize(M, element=e, columns=[list(c) for c in cols])
    )


def _pair_pattern(supports: dict, M, e) -> tuple[str, object]:
    """Check that the 2-sets in ``supports`` pairwise meet in exactly one point.

    Returns ("star", centre) or ("triangle", (i, j, k)).
    """
    items = sorted(supports.items())
    for (f, s), (g, t) in combinations(items, 2):
        if len(s & t) != 1:
            _contradiction(M, e, f"supports of {f} and {g} meet in {len(s & t)} rows", [(f, g)])
    sets = [s for _, s in items]
    if not sets:
        return "star", None
    common = frozenset.intersection(*sets)
    if common:
        return "star", min(common)
    # three pairwise-meeting 2-sets without a common point span a triangle
    pts = sorted(frozenset.union(*sets))
    if len(sets) != 3 or len(pts) != 3:
        _contradiction(M, e, "column supports form neither a star nor a triangle", [tuple(f for f, _ in items)])
    return "triangle", tuple(pts)


def _row_order(r: int, first: list[int]) -> list[int]:
    """1-based rows: ``first`` in front, the rest in increasing order."""
    return first + [i for i in range(1, r + 1) if i not in first]


def classify_binary_loose(M: LinearMatroid, e: Label, check_loose: bool = True) -> BinaryLooseVerdict:
    """Identify the figure matroid hosting a loose element of a binary matroid.

    The witness maps every element of M to a label of the figure matroid of
    the same rank, sending e to the figure's ``e``; it is validated before
    returning.  With ``check_loose=False`` the looseness precondition is not
    checked, so success itself can be compared against the girth oracle.
    """
    if M.q != 2:
        raise PreconditionError("classify_binary_loose needs a binary matroid")
    _require_simple_coloop_free(M)
    r = M.rank
    if r < 3:
        raise PreconditionError("rank must be at least 3")
    if check_loose and not element_status(M, e).is_loose:
        raise PreconditionError(f"{e!r} is not loose")
    C = find_spanning_circuit(M, e)
    if C is not None:
        basis = sorted(C - {e}, key=M.index)
        rep = standard_rep(M.rep, basis)
        supports = {}
        for f in rep.nonbasis:
            if f == e:
                continue
            s = column_support(rep, f)
            if len(s) != 2:
                _contradiction(M, e, f"column {f} has {len(s)} ones, expected two", [(f,)])
            supports[f] = s
        shape, data = _pair_pattern(supports, M, e)
        if shape == "star":
            family, rows = "Mr", _row_order(r, [data] if data else [])
        else:
            family, rows = "Lr", _row_order(r, list(data))
        case = SPANNING_CASE
    else:
        others = [x for x in M.labels if x != e]
        basis = list(restrict_lex_basis(M, others))
        rep = standard_rep(M.rep, basis)
        zeros = [i + 1 for i in np.flatnonzero(rep.column(e) == 0)]
        if len(zeros) != 1:
            _contradiction(M, e, f"e has {len(zeros)} zero coordinates with no spanning circuit through it", [(e,)])
        z = zeros[0]
        basis = [basis[z - 1]] + [b for i, b in enumerate(basis) if i != z - 1]
        rep = standard_rep(M.rep, basis)
        supports = {}
        for f in rep.nonbasis:
            if f == e:
                continue
            s = column_support(rep, f)
            if 1 not in s or len(s) != 3:
                _contradiction(M, e, f"column {f} has support {sorted(s)}, expected row 1 and two more", [(f,)])
            supports[f] = s - {1}
        shape, data = _pair_pattern(supports, M, e)
        if shape == "star":
            family, rows = "Nr", _row_order(r, [1, data] if data else [1])
        else:
            family, rows = "Jr", _row_order(r, [1] + list(data))
        case = NONSPANNING_CASE
    F = _figure(family, r)
    witness = _witness(M, rep, F, family, rows, e)
    if witness is None or not is_embedding(M, F, witness):
        _contradiction(M, e, f"structural pattern matched {family} but the embedding does not validate", [])
    name = {"Mr": "Mr_restriction", "Nr": "Nr_restriction"}.get(family, family)
    return BinaryLooseVerdict(case, name, witness, rep)


def restrict_lex_basis(M: LinearMatroid, within) -> tuple[Label, ...]:
    """Greedy basis of the restriction to ``within``, in label order."""
    chosen: list[Label] = []
    for x in within:
        if M.rank_of(chosen + [x]) > len(chosen):
            chosen.append(x)
    return tuple(chosen)


def _witness(M, rep, F, family, rows, e) -> dict | None:
    """Map M's basis row ``rows[k]`` to F's basis element b_{k+1}, and columns by value."""
    r = M.rank
    # position of each M row in the figure's coordinates
    target_row = {src: k for k, src in enumerate(rows)}
    by_value = {}
    Fr = standard_rep(F.rep, [f"b{i}" for i in range(1, r + 1)])
    for y in F.labels:
        by_value[tuple(int(v) for v in Fr.column(y))] = y
    phi = {}
    for x in M.labels:
        col = rep.column(x)
        v = [0] * r
        for i in np.flatnonzero(col):
            v[target_row[int(i) + 1]] = 1
        y = by_value.get(tuple(v))
        if y is None:
            return None
        phi[x] = y
    if phi.get(e) != "e" or len(set(phi.values())) != len(phi):
        return None
    return phi


# --------------------------------------------------------------------------
# ternary census


@dataclass(frozen=True)
class ColumnCensus:
    r: int
    n: int
    top_zero_count: int
    type_counts: tuple[int, ...]
    overflow_count: int
    sign_violations: tuple[Label, ...]
    rep: StandardRep = field(repr=False, compare=False)

    def caps(self) -> dict:
        r = self.r
        return {
            "top_zero": (r - 1) // 2,
            "type4": 8 * r - 34,
            "type3": 12 * r - 42,
            "type2": 12 * r - 40,
            "type1": 2 * r - 2,
            "size": ternary_size_bound(r),
        }

    def observed(self) -> dict:
        t = self.type_counts
        return {"top_zero": self.top_zero_count, "type4": t[4], "type3": t[3], "type2": t[2], "type1": t[1], "size": self.n}

    def violations(self) -> list[str]:
        out = []
        caps, seen = self.caps(), self.observed()
        for key, cap in caps.items():
            if seen[key] > cap:
                out.append(f"{key} count {seen[key]} exceeds {cap}")
        if self.overflow_count:
            out.append(f"{self.overflow_count} columns with more than four nonzero root entries")
        if self.sign_violations:
            out.append(f"columns with too many root entries of one sign: {list(self.sign_violations)}")
        # sharper caps from the two case analyses
        t = self.type_counts
        if t[4] > 0:
            for h, cap in ((3, 8 * self.r - 16), (2, 24), (1, 8)):
                if t[h] > cap:
                    out.append(f"type{h} count {t[h]} exceeds {cap} with a type-4 column present")
        elif t[3] > 0:
            for h, cap in ((2, 7 * (self.r - 4) + 12), (1, 7)):
                if t[h] > cap:
                    out.append(f"type{h} count {t[h]} exceeds {cap} with a type-3 column present")
        return out

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "n": self.n,
            "top_zero_count": self.top_zero_count,
            "type_counts": list(self.type_counts),
            "overflow_count": self.overflow_count,
            "sign_violations": list(self.sign_violations),
        }


def ternary_size_bound(r: int) -> int:
    if r < 2:
        raise ValueError("rank must be at least 2")
    return max(41 * r - 101, 35 * r - 35) // 2


def census_basis(M: LinearMatroid, e: Label) -> list[Label]:
    """Basis [x] + (C - e) for a smallest circuit C through e of size r."""
    C = min_circuit_through(M, e)
    if C is None or len(C) != M.rank:
        size = None if C is None else len(C)
        raise PreconditionError(f"no circuit of size r through {e!r} (smallest: {size})")
    S = sorted(C - {e}, key=M.index)
    for x in M.labels:
        if x not in C and M.rank_of(S + [x]) == M.rank:
            return [x] + S
    raise PreconditionError("circuit does not extend to a basis")  # impossible for |C| = r


def normalized_census_rep(M: LinearMatroid, e: Label) -> StandardRep:
    """Standard representation with e = (0, 1, ..., 1) and every other top entry in {0, 1}."""
    rep = scale_normalize(standard_rep(M.rep, census_basis(M, e)), e, "top_zero_rest_ones")
    F = M.field
    factors = {}
    for f in rep.nonbasis:
        top = int(rep.column(f)[0])
        if f != e and top not in (0, 1):
            factors[f] = F.inv(top)
    return scale_columns(rep, factors) if factors else rep


def census_from_rep(rep: StandardRep, e: Label) -> ColumnCensus:
    """Tally columns of a normalized ternary representation (no checks raised)."""
    r = rep.r
    top_zero = 0
    types = [0] * 5
    overflow = 0
    bad = []
    for f in rep.nonbasis:
        if f == e:
            continue
        col = [int(v) for v in rep.column(f)]
        roots = col[1:]
        plus, minus = roots.count(1), roots.count(2)
        if col[0] == 0:
            top_zero += 1
            # a top-zero column is e minus a sum of basis vectors: one entry of each sign
            if plus > 1 or minus > 1:
                bad.append(f)
            continue
        if plus > 2 or minus > 2:
            bad.append(f)
        h = plus + minus
        if h > 4:
            overflow += 1
        else:
            types[h] += 1
    return ColumnCensus(r, rep.base.cols, top_zero, tuple(types), overflow, tuple(bad), rep)


def ternary_census(M: LinearMatroid, e: Label, check: bool = True) -> ColumnCensus:
    """Column-type census around a loose, non-free element of a ternary matroid."""
    if M.q != 3:
        raise PreconditionError("ternary_census needs a ternary matroid")
    # coloops do not disturb the tally; only simplicity is needed here
    if not M.simple_flag:
        raise PreconditionError("matroid is not simple")
    if M.rank < 5:
        raise PreconditionError("ternary_census needs rank at least 5")
    st = element_status(M, e)
    if not st.is_loose or st.is_free:
        raise PreconditionError(f"{e!r} must be loose and not free (girth through it: {st.girth_through})")
    census = census_from_rep(normalized_census_rep(M, e), e)
    if check:
        check_census(census, M, e)
    return census


def check_census(census: ColumnCensus, M: LinearMatroid | None = None, e: Label | None = None) -> None:
    problems = census.violations()
    if problems:
        cx = serialize(M, element=e) if M is not None else {}
        cx["census"] = census.to_dict()
        raise FalsificationError("CENSUS_VIOLATION", "; ".join(problems), cx)


# --------------------------------------------------------------------------
# two loose elements


@dataclass(frozen=True)
class TwoLooseAudit:
    verdict: str
    r: int
    q: int
    spanning_exactly_one: bool | None = None
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict,
            "r": self.r,
            "q": self.q,
            "spanning_exactly_one": self.spanning_exactly_one,
            "details": self.details,
        }


def spanning_through_exactly_one(M: LinearMatroid, e: Label, f: Label) -> bool:
    return find_spanning_circuit(M, e, [f]) is not None or find_spanning_circuit(M, f, [e]) is not None


def two_loose_audit(
    M: LinearMatroid, e: Label, f: Label, check_loose: bool = True, cocircuit_escape: bool = True
) -> TwoLooseAudit:
    """Rank bound for a pair of loose elements, or the cocircuit escape.

    ``cocircuit_escape=False`` ignores the cocircuit alternative; it exists
    so negative controls can show that the audit does fire.
    """
    if e == f:
        raise PreconditionError("e and f must be distinct")
    _require_simple_coloop_free(M)
    if check_loose:
        for x in (e, f):
            if not element_status(M, x).is_loose:
                raise PreconditionError(f"{x!r} is not loose")
    r, q = M.rank, M.q
    if cocircuit_escape and is_cocircuit(M, [e, f]):
        return TwoLooseAudit(COCIRCUIT_PAIR, r, q)
    if r > 2 * q:
        return TwoLooseAudit(VIOLATION, r, q, None, serialize(M, pair=[e, f], reason="rank above 2q, pair not a cocircuit"))
    exactly_one = None
    if r == 2 * q:
        # below 2q the refined bound holds trivially
        exactly_one = spanning_through_exactly_one(M, e, f)
        if exactly_one:
            return TwoLooseAudit(
                VIOLATION, r, q, True,
                serialize(M, pair=[e, f], reason="rank 2q with a spanning circuit through exactly one of the pair"),
            )
    return TwoLooseAudit(RANK_OK, r, q, exactly_one)


# --------------------------------------------------------------------------
# free elements


@dataclass(frozen=True)
class FreeStructure:
    kind: str
    D: tuple[Label, ...] = ()
    core: tuple[Label, ...] = ()

    def to_dict(self) -> dict:
        return {"kind": self.kind, "D": list(self.D), "core": list(self.core)}


def _peelable_triangle(M: LinearMatroid, e: Label):
    """A 3-circuit T avoiding e whose removal drops the rank by one."""
    labels = [x for x in M.labels if x != e]
    r = M.rank
    for T in combinations(labels, 3):
        if M.rank_of(T) != 2:
            continue
        rest = [x for x in M.labels if x not in T]
        if M.rank_of(rest) == r - 1:
            return T
    return None


def free_structure_check(M: LinearMatroid, e: Label) -> FreeStructure:
    """Shape of a matroid around a free element, binary or ternary."""
    if M.q not in (2, 3):
        raise PreconditionError("free_structure_check handles GF(2) and GF(3) only")
    _require_simple_coloop_free(M)
    if M.rank < 2:
        raise PreconditionError("rank must be at least 2")
    if not element_status(M, e).is_free:
        return FreeStructure(NOT_FREE)
    if M.q == 2:
        if not is_circuit(M):
            raise FalsificationError("FREE_NOT_CIRCUIT", "binary matroid with a free element is not a circuit", serialize(M, element=e))
        return FreeStructure(BINARY_CIRCUIT, (), M.labels)
    if M.rank == 2 and M.n == 4:
        return FreeStructure(U24, (), M.labels)
    D = []
    cur = M
    while not is_circuit(cur):
        T = _peelable_triangle(cur, e)
        if T is None:
            raise FalsificationError(
                "FREE_SHAPE", "free element in a ternary matroid that is neither a circuit nor peelable",
                serialize(M, element=e, stuck_at=list(cur.labels)),
            )
        # contracting one point of a U_{2,4} leaves the rest parallel; delete one copy
        cur = delete(contract(cur, [T[0]]), [T[2]])
        D.append(T[1])
    if e not in cur.labels:
        raise FalsificationError("FREE_SHAPE", "peeling removed the free element", serialize(M, element=e))
    return FreeStructure(TWO_SUM_TREE, tuple(D), cur.labels)


# --------------------------------------------------------------------------
# paving matroids


@dataclass(frozen=True)
class PavingAudit:
    branch: str
    r: int
    n: int
    q: int
    girth: int | None
    is_circuit: bool
    spanning_circuit: bool
    sparse_paving: bool

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def paving_audit(M: LinearMatroid, q: int | None = None) -> PavingAudit:
    """Check the rank, size and sparse-paving implications for a paving matroid.

    ``q`` defaults to the field of the representation; passing a smaller value
    is only useful for negative controls.
    """
    _require_simple_coloop_free(M)
    if not is_paving(M):
        raise PreconditionError("matroid is not paving")
    r, n = M.rank, M.n
    q = M.q if q is None else q
    circ = is_circuit(M)
    spanning = has_spanning_circuit(M)
    sparse = is_sparse_paving(M)
    g = min((v for v in M.girths.values() if v is not None), default=None)
    failures = []
    if not circ and r > 2 * q:
        failures.append(f"rank {r} exceeds 2q = {2 * q}")
    if not circ and r == 2 * q and spanning:
        failures.append("rank 2q with a spanning circuit")
    if r > q and not sparse:
        failures.append(f"rank {r} > q but not sparse paving")
    if not circ and r > q and n > 4 * q:
        failures.append(f"{n} elements exceed 4q = {4 * q}")
    if failures:
        raise FalsificationError("PAVING_BOUND", "; ".join(failures), serialize(M))
    branch = CIRCUIT if circ else RANK_LE_Q if r <= q else SPARSE_PAVING
    return PavingAudit(branch, r, n, q, g, circ, spanning, sparse)
