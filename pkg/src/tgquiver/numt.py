"""Exact integer arithmetic and small integer linear algebra.

Everything here works on Python ints, so determinants and powers such as
``n**k - 1`` never overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Iterable, Sequence


class DomainError(ValueError):
    """Input outside the mathematical domain of an operation."""


@dataclass(frozen=True)
class IntMatrix:
    """Square matrix of arbitrary-precision integers (row-major tuples)."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        d = len(self.rows)
        if d == 0:
            raise DomainError("matrix must have at least one row")
        if any(len(r) != d for r in self.rows):
            raise DomainError("matrix must be square")

    @classmethod
    def of(cls, rows: Iterable[Iterable[int]]) -> "IntMatrix":
        return cls(tuple(tuple(int(v) for v in r) for r in rows))

    @classmethod
    def identity(cls, d: int) -> "IntMatrix":
        return cls(tuple(tuple(int(i == j) for j in range(d)) for i in range(d)))

    @classmethod
    def diag(cls, entries: Sequence[int]) -> "IntMatrix":
        d = len(entries)
        return cls(tuple(tuple(int(entries[i]) if i == j else 0 for j in range(d)) for i in range(d)))

    @classmethod
    def parse(cls, text: str) -> "IntMatrix":
        """Parse ``"a,b;c,d"`` (rows separated by ``;``)."""
        try:
            rows = [[int(v) for v in r.split(",")] for r in text.strip().split(";")]
        except ValueError as exc:
            raise DomainError(f"cannot parse matrix {text!r}") from exc
        return cls.of(rows)

    @property
    def d(self) -> int:
        return len(self.rows)

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return self.rows[i][j]

    def row(self, i: int) -> tuple[int, ...]:
        return self.rows[i]

    def col(self, j: int) -> tuple[int, ...]:
        return tuple(r[j] for r in self.rows)

    def tolist(self) -> list[list[int]]:
        return [list(r) for r in self.rows]

    def format(self) -> str:
        return ";".join(",".join(str(v) for v in r) for r in self.rows)

    @property
    def T(self) -> "IntMatrix":
        return IntMatrix(tuple(zip(*self.rows)))

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.d != other.d:
            raise DomainError("dimension mismatch")
        cols = other.T.rows
        return IntMatrix(tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows))

    def __pow__(self, k: int) -> "IntMatrix":
        if k < 0:
            raise DomainError("negative matrix power")
        out = IntMatrix.identity(self.d)
        for _ in range(k):
            out = out @ self
        return out

    def scale(self, c: int) -> "IntMatrix":
        return IntMatrix(tuple(tuple(c * v for v in r) for r in self.rows))

    def apply(self, v: Sequence[int]) -> tuple[int, ...]:
        """Matrix times column vector."""
        return tuple(sum(a * b for a, b in zip(r, v)) for r in self.rows)

    def rapply(self, v: Sequence[int]) -> tuple[int, ...]:
        """Row vector times matrix."""
        return tuple(sum(v[i] * self.rows[i][j] for i in range(self.d)) for j in range(self.d))

    def det(self) -> int:
        return det(self)

    def is_diagonal(self) -> bool:
        return all(v == 0 for i, r in enumerate(self.rows) for j, v in enumerate(r) if i != j)

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.rows[i][i] for i in range(self.d))


def det(M: IntMatrix) -> int:
    """Determinant by Bareiss fraction-free elimination."""
    a = M.tolist()
    n = len(a)
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def bezout(a: int, b: int) -> tuple[int, int, int]:
    """Return ``(g, x, y)`` with ``g = gcd(a, b) >= 0`` and ``x*a + y*b == g``."""
    if a == 0 and b == 0:
        raise DomainError("bezout(0, 0) is undefined")
    if a and b % a == 0:  # prefer the certificate (1, 0) when a already is the gcd
        return abs(a), (1 if a > 0 else -1), 0
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r != 0:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r < 0:
        old_r, old_x, old_y = -old_r, -old_x, -old_y
    return old_r, old_x, old_y


def mult_order(n: int, p: int) -> int:
    """Multiplicative order of ``n`` modulo ``p``."""
    if p < 2:
        raise DomainError(f"modulus must be >= 2, got {p}")
    if gcd(n, p) != 1:
        raise DomainError(f"gcd({n}, {p}) = {gcd(n, p)} != 1; {n} is not a unit mod {p}")
    n %= p
    k, acc = 1, n
    while acc != 1:
        acc = acc * n % p
        k += 1
    return k


def divisors(n: int) -> list[int]:
    if n <= 0:
        raise DomainError(f"divisors need n >= 1, got {n}")
    small, large = [], []
    i = 1
    while i * i <= n:
        if n % i == 0:
            small.append(i)
            if i * i != n:
                large.append(n // i)
        i += 1
    return small + large[::-1]


def divisor_count(n: int) -> int:
    return len(divisors(n))


def inverse_mod(n: int, p: int) -> int:
    g, x, _ = bezout(n % p, p)
    if g != 1:
        raise DomainError(f"{n} is not invertible mod {p}")
    return x % p


def smith_normal_form(M: IntMatrix) -> tuple[IntMatrix, IntMatrix, IntMatrix]:
    """Return ``(U, D, V)`` with ``M == U @ D @ V``, ``U, V`` unimodular and
    ``D`` positive diagonal with ``D[0,0] | D[1,1] | ...``.

    Elementary operations applied to a working copy ``A`` are mirrored on
    ``U`` (inverse column ops) and ``V`` (inverse row ops) so that the
    identity ``M == U @ A @ V`` holds after every step.
    """
    if det(M) == 0:
        raise DomainError("Smith normal form requested for a singular matrix")
    n = M.d
    A = M.tolist()
    U = IntMatrix.identity(n).tolist()
    V = IntMatrix.identity(n).tolist()

    def swap_rows(i: int, j: int) -> None:
        A[i], A[j] = A[j], A[i]
        for r in U:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i: int, j: int) -> None:
        for r in A:
            r[i], r[j] = r[j], r[i]
        V[i], V[j] = V[j], V[i]

    def add_row(dst: int, src: int, c: int) -> None:
        # row dst += c * row src
        A[dst] = [a + c * b for a, b in zip(A[dst], A[src])]
        for r in U:
            r[src] -= c * r[dst]

    def add_col(dst: int, src: int, c: int) -> None:
        # col dst += c * col src
        for r in A:
            r[dst] += c * r[src]
        V[src] = [a - c * b for a, b in zip(V[src], V[dst])]

    for t in range(n):
        while True:
            piv = min(
                ((i, j) for i in range(t, n) for j in range(t, n) if A[i][j] != 0),
                key=lambda ij: abs(A[ij[0]][ij[1]]),
            )
            swap_rows(t, piv[0])
            swap_cols(t, piv[1])
            p = A[t][t]
            dirty = False
            for i in range(t + 1, n):
                if A[i][t]:
                    add_row(i, t, -(A[i][t] // p))
                    dirty |= A[i][t] != 0
            for j in range(t + 1, n):
                if A[t][j]:
                    add_col(j, t, -(A[t][j] // p))
                    dirty |= A[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, n) for j in range(t + 1, n) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if A[t][t] < 0:
            A[t] = [-a for a in A[t]]
            for r in U:
                r[t] = -r[t]
    return IntMatrix.of(U), IntMatrix.of(A), IntMatrix.of(V)


def adjugate(M: IntMatrix) -> IntMatrix:
    """Classical adjoint: ``adjugate(M) @ M == det(M) * I``."""
    n = M.d
    if n == 1:
        return IntMatrix(((1,),))
    cof = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [[M[r, c] for c in range(n) if c != j] for r in range(n) if r != i]
            cof[i][j] = (-1) ** (i + j) * det(IntMatrix.of(minor))
    return IntMatrix.of(cof).T


def inverse_unimodular(M: IntMatrix) -> IntMatrix:
    """Exact inverse of a matrix with determinant +-1."""
    D = det(M)
    if abs(D) != 1:
        raise DomainError(f"matrix is not unimodular (det = {D})")
    return adjugate(M).scale(D)


def solve_row(G: IntMatrix, v: Sequence[int]) -> tuple[int, ...] | None:
    """Integer row vector ``q`` with ``q @ G == v``, or ``None`` if none exists."""
    D = det(G)
    if D == 0:
        raise DomainError("singular matrix")
    w = adjugate(G).rapply(v)
    if any(x % D for x in w):
        return None
    return tuple(x // D for x in w)
