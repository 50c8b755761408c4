"""Small finite fields GF(q), q <= 9, backed by total lookup tables.

Element codes are integers ``0..q-1``.  For an extension field GF(p^k) the
code of ``a_0 + a_1 x + ... + a_{k-1} x^{k-1}`` is ``sum(a_i * p**i)``, i.e.
the base-p digits of the code are the polynomial coefficients, lowest degree
first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

SUPPORTED_Q = (2, 3, 4, 5, 7, 8, 9)

# (p, k) -> coefficients of the monic modulus, lowest degree first
_MODULI = {
    (2, 2): (1, 1, 1),  # x^2 + x + 1
    (2, 3): (1, 1, 0, 1),  # x^3 + x + 1
    (3, 2): (1, 0, 1),  # x^2 + 1
}

_PRIME_POWERS = {2: (2, 1), 3: (3, 1), 4: (2, 2), 5: (5, 1), 7: (7, 1), 8: (2, 3), 9: (3, 2)}


class FieldError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class FieldSpec:
    q: int
    p: int
    k: int
    add_table: np.ndarray = field(repr=False)
    mul_table: np.ndarray = field(repr=False)
    neg_table: np.ndarray = field(repr=False)
    inv_table: np.ndarray = field(repr=False)

    @property
    def is_prime(self) -> bool:
        return self.k == 1

    @property
    def nonzero(self) -> range:
        return range(1, self.q)

    def add(self, a: int, b: int) -> int:
        return int(self.add_table[a, b])

    def sub(self, a: int, b: int) -> int:
        return int(self.add_table[a, self.neg_table[b]])

    def mul(self, a: int, b: int) -> int:
        return int(self.mul_table[a, b])

    def neg(self, a: int) -> int:
        return int(self.neg_table[a])

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError(f"0 has no inverse in GF({self.q})")
        return int(self.inv_table[a])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        out = 1
        for _ in range(n):
            out = self.mul(out, a)
        return out

    def __eq__(self, other: object) -> bool:
        return isinstance(other, FieldSpec) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("FieldSpec", self.q))

    def __reduce__(self):
        return (make_field, (self.q,))


def _digits(code: int, p: int, k: int) -> list[int]:
    out = []
    for _ in range(k):
        out.append(code % p)
        code //= p
    return out


def _undigits(digits, p: int) -> int:
    return sum(int(d) * p**i for i, d in enumerate(digits))


def _poly_mulmod(a: list[int], b: list[int], modulus: tuple[int, ...], p: int) -> list[int]:
    k = len(modulus) - 1
    prod = [0] * (2 * k - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[i + j] = (prod[i + j] + x * y) % p
    # reduce from the top degree down; modulus is monic
    for deg in range(len(prod) - 1, k - 1, -1):
        c = prod[deg]
        if c:
            for i, m in enumerate(modulus):
                prod[deg - k + i] = (prod[deg - k + i] - c * m) % p
    return prod[:k]


@lru_cache(maxsize=None)
def make_field(q: int) -> FieldSpec:
    """Build GF(q) for q in {2, 3, 4, 5, 7, 8, 9}."""
    if q not in _PRIME_POWERS:
        raise FieldError(f"unsupported field size {q!r}; supported: {', '.join(map(str, SUPPORTED_Q))}")
    p, k = _PRIME_POWERS[q]
    add = np.zeros((q, q), dtype=np.int64)
    mul = np.zeros((q, q), dtype=np.int64)
    if k == 1:
        for a in range(q):
            for b in range(q):
                add[a, b] = (a + b) % p
                mul[a, b] = (a * b) % p
    else:
        modulus = _MODULI[(p, k)]
        for a in range(q):
            da = _digits(a, p, k)
            for b in range(q):
                db = _digits(b, p, k)
                add[a, b] = _undigits([(x + y) % p for x, y in zip(da, db)], p)
                mul[a, b] = _undigits(_poly_mulmod(da, db, modulus, p), p)
    neg = np.array([int(np.flatnonzero(add[a] == 0)[0]) for a in range(q)], dtype=np.int64)
    inv = np.zeros(q, dtype=np.int64)
    for a in range(1, q):
        inv[a] = int(np.flatnonzero(mul[a] == 1)[0])
    for t in (add, mul, neg, inv):
        t.setflags(write=False)
    return FieldSpec(q=q, p=p, k=k, add_table=add, mul_table=mul, neg_table=neg, inv_table=inv)


def field_ops(F: FieldSpec, op: str, a: int, b: int | None = None) -> int:
    """Single entry point for the scalar operations, by name."""
    if op in ("neg", "inv"):
        return getattr(F, op)(a)
    if op in ("add", "sub", "mul", "div"):
        if b is None:
            raise TypeError(f"{op} needs two operands")
        return getattr(F, op)(a, b)
    raise ValueError(f"unknown field operation {op!r}")


# vectorised helpers, used by the elimination code

def vadd(F: FieldSpec, a, b):
    return F.add_table[a, b]


def vsub(F: FieldSpec, a, b):
    return F.add_table[a, F.neg_table[b]]


def vmul(F: FieldSpec, a, b):
    return F.mul_table[a, b]


def matmul(F: FieldSpec, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    if F.is_prime:
        return (A @ B) % F.p
    out = np.zeros((A.shape[0], B.shape[1]), dtype=np.int64)
    for t in range(A.shape[1]):
        out = F.add_table[out, F.mul_table[A[:, t][:, None], B[t, :][None, :]]]
    return out
