"""Laurent-polynomial matrices: the picture of the level-k algebra as N^k x N^k
matrices over the Laurent polynomials in U_1..U_d."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from ..numt import DomainError, IntMatrix, solve_row
from .algebra import AlgebraElement, NormalTerm, StarAlgebra
from .coeff import GaussianRational

Index = tuple[int, ...]
Path = tuple[Index, ...]
LaurentPoly = dict[Index, GaussianRational]


def poly_mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    out: LaurentPoly = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            out[e] = out[e] + c1 * c2 if e in out else c1 * c2
    return {e: c for e, c in out.items() if c}


def poly_add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    out = dict(p)
    for e, c in q.items():
        out[e] = out[e] + c if e in out else c
    return {e: c for e, c in out.items() if c}


@dataclass
class LaurentMatrix:
    """Sparse square matrix indexed by I(F)^k in lexicographic order."""

    labels: tuple[Path, ...]
    d: int
    entries: dict[tuple[Path, Path], LaurentPoly] = field(default_factory=dict)

    @property
    def size(self) -> int:
        return len(self.labels)

    def __getitem__(self, key: tuple[Path, Path]) -> LaurentPoly:
        return self.entries.get(key, {})

    def __matmul__(self, other: "LaurentMatrix") -> "LaurentMatrix":
        if self.labels != other.labels:
            raise DomainError("matrix index sets differ")
        rows: dict[Path, list[tuple[Path, LaurentPoly]]] = {}
        for (i, k), p in self.entries.items():
            rows.setdefault(i, []).append((k, p))
        cols: dict[Path, list[tuple[Path, LaurentPoly]]] = {}
        for (k, j), q in other.entries.items():
            cols.setdefault(k, []).append((j, q))
        out: dict[tuple[Path, Path], LaurentPoly] = {}
        for i, row in rows.items():
            for k, p in row:
                for j, q in cols.get(k, ()):
                    out[(i, j)] = poly_add(out.get((i, j), {}), poly_mul(p, q))
        return LaurentMatrix(self.labels, self.d, {key: v for key, v in out.items() if v})

    def __eq__(self, other) -> bool:
        return isinstance(other, LaurentMatrix) and self.labels == other.labels and self.entries == other.entries

    @classmethod
    def identity(cls, labels: tuple[Path, ...], d: int) -> "LaurentMatrix":
        one = {(0,) * d: GaussianRational(1)}
        return cls(labels, d, {(a, a): dict(one) for a in labels})

    def exponents(self) -> set[Index]:
        return {e for p in self.entries.values() for e in p}


def level_labels(alg: StarAlgebra, k: int) -> tuple[Path, ...]:
    return tuple(itertools.product(alg.index, repeat=k))


def to_matrix(x: AlgebraElement, k: int) -> LaurentMatrix:
    """Entry (alpha, beta) is S_alpha* x S_beta, which must be a Laurent polynomial."""
    alg = x.alg
    labels = level_labels(alg, k)
    z = alg.zero_index
    out: dict[tuple[Path, Path], LaurentPoly] = {}
    for a in labels:
        left = alg.element({NormalTerm((), z, a): 1}) * x
        for b in labels:
            entry = left * alg.element({NormalTerm(b, z, ()): 1})
            poly: LaurentPoly = {}
            for t, c in entry.terms.items():
                if t.alpha or t.beta:
                    raise DomainError(f"not in level-{k} algebra: entry {a},{b} is not a Laurent polynomial")
                poly[t.nu] = c
            if poly:
                out[(a, b)] = poly
    return LaurentMatrix(labels, alg.d, out)


def from_matrix(alg: StarAlgebra, M: LaurentMatrix) -> AlgebraElement:
    """sum_{alpha, beta} S_alpha M[alpha, beta] S_beta*."""
    terms = []
    for (a, b), p in M.entries.items():
        for e, c in p.items():
            terms.append((NormalTerm(a, e, b), c))
    return alg.element(terms)


def exponents_in_row_lattice(M: LaurentMatrix, G: IntMatrix, k: int) -> bool:
    """Whether every exponent of M lies in the integer row span of G^k.

    That span is exactly the set of monomials in W_j = U_j^{a_j^k} acting on
    the level-k matrix units, since W_j S_alpha = S_alpha U^{(G^k)_j}.
    """
    Gk = G ** k
    return all(solve_row(Gk, e) is not None for e in M.exponents())
