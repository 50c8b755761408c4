from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from loosemat.families import uniform
from loosemat.gfq import make_field, matmul
from loosemat.matroid import (
    LinearMatroid,
    ResourceGuardError,
    circuits,
    circuits_through,
    closure,
    cocircuits,
    contract,
    delete,
    dual,
    element_status,
    find_spanning_circuit,
    girth,
    girth_through,
    has_spanning_circuit,
    hyperplane_check,
    is_circuit,
    is_cocircuit,
    is_isomorphism,
    is_paving,
    is_sparse_paving,
    iso_check,
    linear_matroid,
    loops,
    loose_elements,
    min_circuit_through,
    parallel_pairs,
    relabel,
    restrict,
    sparse_paving_by_dual,
    sparse_paving_by_hyperplanes,
)
from loosemat.matvec import FqMatrix, invert
from oracles import labelled_circuits, matroid_rank_fn


@st.composite
def small_matroids(draw, qs=(2, 3, 4, 5), max_rank=4, max_n=8):
    q = draw(st.sampled_from(qs))
    r = draw(st.integers(1, max_rank))
    n = draw(st.integers(1, max_n if q in (2, 3, 5) else min(max_n, 6)))
    ent = draw(st.lists(st.integers(0, q - 1), min_size=r * n, max_size=r * n))
    return linear_matroid(q, np.array(ent).reshape(r, n))


def random_matroid(rng, q, r, n):
    return linear_matroid(q, rng.integers(0, q, size=(r, n)))


@given(small_matroids())
@settings(max_examples=120, deadline=None)
def test_circuits_match_brute_force(M):
    assert set(circuits(M, M.n)) == labelled_circuits(M)


@given(small_matroids())
@settings(max_examples=120, deadline=None)
def test_girths_match_brute_force(M):
    cs = labelled_circuits(M)
    for x in M.labels:
        sizes = [len(C) for C in cs if x in C]
        want = min(sizes) if sizes else None
        assert M.girths[x] == want
        # the single-element path must agree with the divide-and-conquer one
        assert girth_through(LinearMatroid(M.rep), x) == want
    all_sizes = [len(C) for C in cs]
    assert girth(M) == (min(all_sizes) if all_sizes else None)


@given(small_matroids())
@settings(max_examples=80, deadline=None)
def test_coloops_and_simplicity(M):
    cs = labelled_circuits(M)
    in_some = set().union(*cs) if cs else set()
    assert M.coloop_set == frozenset(x for x in M.labels if x not in in_some)
    has_small = any(len(C) <= 2 for C in cs)
    assert M.simple_flag == (not has_small)
    assert set(loops(M)) == {x for C in cs if len(C) == 1 for x in C}
    for a, b in parallel_pairs(M):
        assert frozenset({a, b}) in cs


@given(small_matroids(), st.randoms(use_true_random=False))
@settings(max_examples=80, deadline=None)
def test_rank_axioms(M, rnd):
    labels = list(M.labels)
    for _ in range(30):
        X = [x for x in labels if rnd.random() < 0.5]
        Y = [x for x in labels if rnd.random() < 0.5]
        union = sorted(set(X) | set(Y))
        inter = sorted(set(X) & set(Y))
        assert M.rank_of(X) + M.rank_of(Y) >= M.rank_of(union) + M.rank_of(inter)
        assert 0 <= M.rank_of(X) <= len(X)
        assert M.rank_of(X) <= M.rank_of(union)


@given(small_matroids())
@settings(max_examples=80, deadline=None)
def test_rank_matches_oracle(M):
    rk = matroid_rank_fn(M)
    for k in range(M.n + 1):
        for S in combinations(range(M.n), k):
            assert M.rank_idx(S) == rk(list(S))


@given(small_matroids(max_n=7), st.randoms(use_true_random=False))
@settings(max_examples=80, deadline=None)
def test_dual_rank_formula(M, rnd):
    D = dual(M)
    E = list(M.labels)
    assert D.rank == M.n - M.rank
    for _ in range(20):
        X = [x for x in E if rnd.random() < 0.5]
        rest = [x for x in E if x not in X]
        assert D.rank_of(X) == len(X) - M.rank + M.rank_of(rest)
    DD = dual(D)
    assert set(circuits(DD, DD.n)) == set(circuits(M, M.n))


@given(small_matroids(max_n=7))
@settings(max_examples=60, deadline=None)
def test_cocircuits_are_hyperplane_complements(M):
    cocs = set(cocircuits(M, M.n))
    for k in range(1, M.n + 1):
        for S in combinations(M.labels, k):
            assert is_cocircuit(M, S) == (frozenset(S) in cocs)


@given(small_matroids(max_n=7), st.randoms(use_true_random=False))
@settings(max_examples=60, deadline=None)
def test_minor_ranks(M, rnd):
    E = list(M.labels)
    T = [x for x in E if rnd.random() < 0.3]
    C = contract(M, T)
    rest = [x for x in E if x not in T]
    assert list(C.labels) == rest
    for _ in range(10):
        X = [x for x in rest if rnd.random() < 0.5]
        assert C.rank_of(X) == M.rank_of(X + T) - M.rank_of(T)
    R = delete(M, T)
    for _ in range(10):
        X = [x for x in rest if rnd.random() < 0.5]
        assert R.rank_of(X) == M.rank_of(X)
    # deletion and contraction swap under duality
    assert set(circuits(dual(delete(M, T)), 99)) == set(circuits(contract(dual(M), T), 99))


@given(small_matroids(max_n=7))
@settings(max_examples=60, deadline=None)
def test_closure_and_hyperplanes(M):
    r = M.rank
    for k in range(M.n + 1):
        for S in combinations(M.labels, k):
            cl = closure(M, S)
            assert M.rank_of(cl) == M.rank_of(S)
            assert all(M.rank_of(list(cl) + [x]) > M.rank_of(S) for x in M.labels if x not in cl)
            assert hyperplane_check(M, S) == (M.rank_of(S) == r - 1 and cl == frozenset(S))


@given(small_matroids(qs=(2, 3), max_n=8))
@settings(max_examples=100, deadline=None)
def test_spanning_circuit_search(M):
    cs = labelled_circuits(M)
    r = M.rank
    for t in M.labels:
        for f in [None] + list(M.labels):
            avoid = [] if f is None else [f]
            want = any(len(C) == r + 1 and t in C and f not in C for C in cs)
            got = find_spanning_circuit(M, t, avoid)
            assert (got is not None) == want
            if got is not None:
                assert got in cs and len(got) == r + 1 and t in got and f not in got
    assert has_spanning_circuit(M) == any(len(C) == r + 1 for C in cs)


@given(small_matroids())
@settings(max_examples=100, deadline=None)
def test_min_circuit_through(M):
    cs = labelled_circuits(M)
    for x in M.labels:
        C = min_circuit_through(M, x)
        if M.girths[x] is None:
            assert C is None
        else:
            assert C in cs and x in C and len(C) == M.girths[x]


def test_element_status_definitions():
    U = uniform(3, 4, 3)
    st_ = element_status(U, "c1")
    assert st_.is_loose and st_.is_free and st_.girth_through == 4
    M = linear_matroid(2, [[1, 0, 1, 0], [0, 1, 1, 0], [0, 0, 0, 1]], labels="abcd")
    assert element_status(M, "d").is_coloop
    assert element_status(M, "a").girth_through == 3 and element_status(M, "a").is_loose
    assert not is_paving(linear_matroid(2, [[1, 1, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))
    assert loose_elements(M) == ["a", "b", "c"]
    assert loose_elements(M, include_coloops=True) == ["a", "b", "c", "d"]


def test_every_pair_of_a_circuit_matroid_is_a_cocircuit():
    for q in (2, 3):
        for r in range(2, 6):
            U = uniform(r, r + 1, q)
            assert is_circuit(U)
            for a, b in combinations(U.labels, 2):
                assert is_cocircuit(U, [a, b])


def test_rank_zero_and_empty():
    Z = linear_matroid(3, np.zeros((2, 3), dtype=int))
    assert Z.rank == 0 and loops(Z) == list(Z.labels)
    assert all(g == 1 for g in Z.girths.values())
    E = LinearMatroid(FqMatrix(make_field(2), np.zeros((2, 0), dtype=int), ()))
    assert E.rank == 0 and circuits(E) == [] and girth(E) is None


def _disguised(M, rng):
    F = M.field
    while True:
        T = rng.integers(0, M.q, size=(M.rank, M.rank))
        try:
            invert(F, T)
            break
        except ValueError:
            pass
    A = matmul(F, T, M.coords)
    scale = rng.integers(1, M.q, size=M.n)
    A = F.mul_table[A, scale[None, :]]
    perm = rng.permutation(M.n)
    labels = [f"y{i}" for i in range(M.n)]
    return LinearMatroid(FqMatrix(F, A[:, perm], tuple(labels))), {M.labels[p]: labels[i] for i, p in enumerate(perm)}


@pytest.mark.parametrize("seed", range(12))
def test_iso_check_finds_disguised_copies(seed):
    rng = np.random.default_rng(seed)
    q = (2, 3)[seed % 2]
    M = random_matroid(rng, q, 3 + seed % 3, 8)
    N, truth = _disguised(M, rng)
    phi = iso_check(M, N)
    assert phi is not None and is_isomorphism(M, N, phi)
    x = M.labels[0]
    phi = iso_check(M, N, anchor=(x, truth[x]))
    assert phi is not None and phi[x] == truth[x] and is_isomorphism(M, N, phi)


def test_iso_check_rejects():
    A = uniform(2, 4, 3)
    B = linear_matroid(3, [[1, 0, 1, 1], [0, 1, 1, 0]])
    assert iso_check(A, B) is None
    assert iso_check(uniform(2, 4, 3), uniform(3, 4, 3)) is None
    # an anchor into a non-equivalent element
    M = linear_matroid(2, [[1, 0, 1, 0], [0, 1, 1, 0], [0, 0, 0, 1]], labels="abcd")
    assert iso_check(M, M, anchor=("a", "d")) is None
    assert not is_isomorphism(M, M, {"a": "d", "b": "b", "c": "c", "d": "a"})


def test_sparse_paving_criteria_agree_on_randoms():
    rng = np.random.default_rng(5)
    for _ in range(60):
        q = int(rng.choice([2, 3]))
        M = random_matroid(rng, q, int(rng.integers(2, 5)), int(rng.integers(4, 9)))
        assert sparse_paving_by_dual(M) == sparse_paving_by_hyperplanes(M)
        cs = labelled_circuits(M)
        want = all(len(C) >= M.rank for C in cs) and all(
            hyperplane_check(M, C) for C in cs if len(C) == M.rank
        )
        assert is_sparse_paving(M) == want


def test_guards():
    big = linear_matroid(2, np.random.default_rng(0).integers(0, 2, size=(6, 30)))
    with pytest.raises(ResourceGuardError):
        circuits(big)
    with pytest.raises(ResourceGuardError):
        iso_check(big, big)


def test_relabel_and_restrict_carry_designations():
    M = LinearMatroid(uniform(2, 4, 3).rep, {"e": "c1"})
    R = relabel(M, {"c1": "x"})
    assert R.designated == {"e": "x"}
    assert restrict(M, ["c2", "c3"]).designated == {}
    assert restrict(M, ["c1", "c3"]).designated == {"e": "c1"}
    assert circuits_through(M, "c1", 3) == [C for C in circuits(M) if "c1" in C]
