"""Audit the two extremal paving matroids and a few of their minors.

Run with:  python3 demos/extremal_paving.py
"""

from loosemat import ag32, golay12, paving_audit, two_loose_audit
from loosemat.matroid import contract, delete, dual, iso_check


def show(name, M):
    a = paving_audit(M)
    print(f"{name:>18}: q={a.q} r={a.r} n={a.n} girth={a.girth} branch={a.branch} "
          f"spanning circuit={a.spanning_circuit}")


def main():
    A, G = ag32(), golay12()
    show("AG(3,2)", A)
    show("S(5,6,12)", G)
    show("dual of S(5,6,12)", dual(G))
    print("S(5,6,12) is self-dual:", iso_check(G, dual(G)) is not None)
    show("S(5,6,12) / c1", contract(G, ["c1"]))
    show("S(5,6,12) \\ c1", delete(G, ["c1"]))

    # every pair of elements is loose; at rank 2q no pair has a spanning circuit
    # through exactly one of them
    for name, M in (("AG(3,2)", A), ("S(5,6,12)", G)):
        a, b = M.labels[:2]
        audit = two_loose_audit(M, a, b)
        print(f"{name}: pair {a},{b} -> {audit.verdict}, exactly-one spanning = {audit.spanning_exactly_one}")


if __name__ == "__main__":
    main()
