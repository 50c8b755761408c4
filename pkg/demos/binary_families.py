"""Build the four binary families, hide them, and let the classifier find them again.

Run with:  python3 demos/binary_families.py
"""

import numpy as np

from loosemat import FamilyTag, build_figure, classify_binary_loose, element_status, linear_matroid, loose_elements
from loosemat.gfq import matmul
from loosemat.matroid import LinearMatroid
from loosemat.matvec import FqMatrix, invert


def hide(M, rng):
    """Random row transform and column shuffle with fresh labels."""
    while True:
        T = rng.integers(0, 2, size=(M.rank, M.rank))
        try:
            invert(M.field, T)
            break
        except ValueError:
            pass
    perm = rng.permutation(M.n)
    A = matmul(M.field, T, M.coords)[:, perm]
    labels = tuple(f"x{i}" for i in range(M.n))
    where_e = labels[list(perm).index(M.index("e"))]
    return LinearMatroid(FqMatrix(M.field, A, labels)), where_e


def main():
    rng = np.random.default_rng(1)
    for r in (4, 6):
        for name in ("Lr", "Jr", "Mr", "Nr"):
            M = build_figure(FamilyTag(name, r=r))
            st = element_status(M, "e")
            H, e = hide(M, rng)
            v = classify_binary_loose(H, e)
            print(f"{name} r={r}: {M.n} elements, girth through e = {st.girth_through}; "
                  f"hidden copy -> {v.family} ({v.case})")

    # random binary matroids: which elements are loose, and where do they live?
    shown = 0
    for seed in range(200):
        M = linear_matroid(2, np.random.default_rng(seed).integers(0, 2, size=(5, 8)))
        loose = loose_elements(M)
        if M.rank < 5 or not M.simple_flag or M.coloop_set or not loose:
            continue
        print(f"seed {seed}:", ", ".join(f"{x} -> {classify_binary_loose(M, x).family}" for x in loose))
        shown += 1
        if shown == 3:
            break


if __name__ == "__main__":
    main()
