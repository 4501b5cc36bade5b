"""Torus quivers Q_{F,G}(T^d): Smith reduction, fibres, inner product, basis check.

Points of T^d are stored as angle vectors t in [0, 1)^d standing for
x = exp(2 pi i t).  Edges are pairs (x, y) with F y = G x, i.e.
F t_y = G t_x (mod Z^d).
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .numt import DomainError, IntMatrix, det, inverse_unimodular, smith_normal_form

Angle = float | Fraction
MultiIndex = tuple[int, ...]
TestFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]

VERIFY_TOL = 1e-9
POINT_TOL = 1e-12


@dataclass(frozen=True)
class TorusQuiverSpec:
    """Data (F, G) with F positive diagonal and det G != 0."""

    F: IntMatrix
    G: IntMatrix

    def __post_init__(self) -> None:
        if self.F.d != self.G.d:
            raise DomainError("F and G must have the same size")
        if not self.F.is_diagonal() or any(a < 1 for a in self.F.diagonal()):
            raise DomainError("F must be a positive diagonal matrix; use reduce() first")
        if det(self.G) == 0:
            raise DomainError("singular G")

    @classmethod
    def of(cls, F, G) -> "TorusQuiverSpec":
        def conv(M):
            if isinstance(M, IntMatrix):
                return M
            if isinstance(M, int):
                return IntMatrix(((M,),))
            return IntMatrix.of(M)

        return cls(conv(F), conv(G))

    @property
    def d(self) -> int:
        return self.F.d

    @property
    def a(self) -> tuple[int, ...]:
        return self.F.diagonal()

    @property
    def N(self) -> int:
        out = 1
        for a in self.a:
            out *= a
        return out

    @property
    def detG(self) -> int:
        return det(self.G)

    def G_row(self, j: int) -> tuple[int, ...]:
        return self.G.row(j)

    def to_json(self) -> str:
        return json.dumps({"d": self.d, "F": self.F.tolist(), "G": self.G.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "TorusQuiverSpec":
        data = json.loads(text)
        spec = cls.of(data["F"], data["G"])
        if spec.d != data["d"]:
            raise DomainError("declared dimension does not match the matrices")
        return spec


def reduce(F: IntMatrix, G: IntMatrix) -> tuple[TorusQuiverSpec, IntMatrix, IntMatrix]:
    """Bring F to positive diagonal form: ``F = U F' V`` and ``G' = U^-1 G V^-1``."""
    if det(F) == 0:
        raise DomainError("singular F")
    if det(G) == 0:
        raise DomainError("singular G")
    if F.is_diagonal() and all(a > 0 for a in F.diagonal()):
        I = IntMatrix.identity(F.d)
        return TorusQuiverSpec(F, G), I, I
    U, D, V = smith_normal_form(F)
    G2 = inverse_unimodular(U) @ G @ inverse_unimodular(V)
    return TorusQuiverSpec(D, G2), U, V


def index_set(spec: TorusQuiverSpec) -> list[MultiIndex]:
    return list(itertools.product(*(range(a) for a in spec.a)))


def _mod1(v: Angle) -> Angle:
    return v - int(v // 1)


def fiber(spec: TorusQuiverSpec, t: Sequence[Angle]) -> list[tuple[Angle, ...]]:
    """Angles of all y with F y = G x for x = exp(2 pi i t).

    Rational input (ints/Fractions) gives exact output.
    """
    if len(t) != spec.d:
        raise DomainError(f"point has {len(t)} coordinates, expected {spec.d}")
    if all(isinstance(v, (int, Fraction)) for v in t):
        gt = [_mod1(Fraction(v)) for v in spec.G.apply(t)]
        div = Fraction
    else:
        gt = [_mod1(sum(g * float(v) for g, v in zip(row, t))) for row in spec.G.rows]
        div = lambda num, den: num / den
    out = []
    for nu in index_set(spec):
        out.append(tuple(_mod1(div(gt[j] + nu[j], spec.a[j])) for j in range(spec.d)))
    return out


def fiber_defect(spec: TorusQuiverSpec, t: Sequence[Angle], ys: Sequence[Sequence[Angle]]) -> float:
    """Largest distance from F y - G t to the integer lattice."""
    gt = [sum(g * float(v) for g, v in zip(row, t)) for row in spec.G.rows]
    worst = 0.0
    for y in ys:
        for j in range(spec.d):
            r = spec.a[j] * float(y[j]) - gt[j]
            worst = max(worst, abs(r - round(r)))
    return worst


def _points(angles) -> np.ndarray:
    return np.exp(2j * np.pi * np.asarray(angles, dtype=float))


def inner_product(spec: TorusQuiverSpec, xi: TestFunction, eta: TestFunction, t: Sequence[Angle]) -> complex:
    """Fibre average of conj(xi) * eta over the N points above x = exp(2 pi i t).

    ``xi`` and ``eta`` receive complex coordinate arrays ``x`` of shape (d,)
    and ``y`` of shape (N, d) and return N values.
    """
    x = _points(t)
    y = _points(fiber(spec, t))
    return complex(np.mean(np.conj(xi(x, y)) * eta(x, y)))


def basis_function(nu: MultiIndex) -> TestFunction:
    """u_nu(x, y) = y^nu."""
    exps = np.asarray(nu)
    return lambda x, y: np.prod(y ** exps, axis=-1)


def monomial_battery(d: int, max_degree: int = 3) -> list[tuple[MultiIndex, MultiIndex]]:
    """All exponent pairs (a, b) in Z^d x Z^d with |a|_1 + |b|_1 <= max_degree."""
    rng = range(-max_degree, max_degree + 1)
    out = [
        (e[:d], e[d:])
        for e in itertools.product(rng, repeat=2 * d)
        if sum(abs(v) for v in e) <= max_degree
    ]
    return sorted(out)


@dataclass(frozen=True)
class OnbReport:
    orth_defect: float
    recon_defect: float
    samples: int
    seed: int

    def passed(self, tol: float = VERIFY_TOL) -> bool:
        return self.orth_defect < tol and self.recon_defect < tol

    def to_json(self) -> str:
        return json.dumps(
            {
                "orth_defect": self.orth_defect,
                "recon_defect": self.recon_defect,
                "samples": self.samples,
                "seed": self.seed,
            },
            sort_keys=True,
        )


def verify_onb(
    spec: TorusQuiverSpec,
    samples: int = 100,
    seed: int = 0,
    battery: Sequence[tuple[MultiIndex, MultiIndex]] | None = None,
) -> OnbReport:
    """Check <u_nu, u_mu>(x) = delta and sum_nu u_nu <u_nu, xi> = xi at random x."""
    if samples < 1:
        raise DomainError("need at least one sample")
    rng = np.random.default_rng(seed)
    if battery is None:
        battery = monomial_battery(spec.d)
    nus = np.asarray(index_set(spec))
    xa = np.asarray([b[0] for b in battery])
    ya = np.asarray([b[1] for b in battery])
    orth = recon = 0.0
    eye = np.eye(spec.N)
    for _ in range(samples):
        t = rng.random(spec.d)
        x = _points(t)
        y = _points(fiber(spec, list(t)))  # (N, d)
        B = np.prod(y[:, None, :] ** nus[None, :, :], axis=-1)  # B[y, nu] = y^nu
        gram = B.conj().T @ B / spec.N
        orth = max(orth, float(np.max(np.abs(gram - eye))))
        X = np.prod(x[None, :] ** xa, axis=-1)  # (M,)
        Y = np.prod(y[:, None, :] ** ya[None, :, :], axis=-1)  # (N, M)
        vals = Y * X[None, :]
        coeffs = B.conj().T @ vals / spec.N
        recon = max(recon, float(np.max(np.abs(B @ coeffs - vals))))
    return OnbReport(orth, recon, samples, seed)
