"""Normal forms in O_{F,G}(T^d).

The algebra is generated by commuting unitaries U_1..U_d and an isometry S
subject to

    S* U^nu S = delta(nu, 0)            (nu in I(F))
    U_j^{a_j} S = S U^{G_j}
    sum_{nu in I(F)} U^nu S S* U^-nu = 1

Every element is a finite combination of normal terms S_alpha U^nu S_beta*,
where S_i = U^i S for i in I(F) and S_alpha = S_{alpha_1} ... S_{alpha_k}.
Two terms multiply to at most one term, using

    U^nu S_i = S_r U^{qG}     with nu + i = r + F q, r in I(F)   (push)
    S_i* S_j = delta(i, j)

and the adjoint of the push for moving U past S*.  The only source of
non-uniqueness is the partition of unity, which lets a term be rewritten one
level deeper (``expand``).  Terms of a fixed shape (|alpha|, |beta|) are
linearly independent: compressing by S_alpha* (.) S_beta lands in the
Laurent polynomials in U, which embed faithfully.  The canonical form of an
element therefore puts each gauge degree at the smallest shape that can
represent it (``contract`` undoes ``expand`` whenever that is possible).
"""

from __future__ import annotations

import itertools
from typing import Iterable, NamedTuple, Sequence

from ..numt import DomainError, IntMatrix, adjugate, det
from ..torquiver import TorusQuiverSpec
from .coeff import ONE, GaussianRational

Index = tuple[int, ...]
Path = tuple[Index, ...]


class NormalTerm(NamedTuple):
    """S_alpha U^nu S_beta*."""

    alpha: Path
    nu: Index
    beta: Path

    @property
    def degree(self) -> int:
        return len(self.alpha) - len(self.beta)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.alpha), len(self.beta)

    def sort_key(self) -> tuple:
        return (self.degree, len(self.beta), self.alpha, self.nu, self.beta)

    def adjoint(self) -> "NormalTerm":
        return NormalTerm(self.beta, tuple(-v for v in self.nu), self.alpha)


class StarAlgebra:
    """Rewriting context for one (F, G) with F positive diagonal."""

    def __init__(self, spec: TorusQuiverSpec) -> None:
        self.spec = spec
        self.d = spec.d
        self.a = spec.a
        self.N = spec.N
        self.G = spec.G
        self.rows = tuple(spec.G.row(j) for j in range(self.d))
        self.detG = det(spec.G)
        self.adjG = adjugate(spec.G)
        self.index = tuple(itertools.product(*(range(a) for a in self.a)))
        self.zero_index: Index = (0,) * self.d
        self._push_cache: dict[Index, tuple[Index, Index]] = {}

    def __eq__(self, other) -> bool:
        return isinstance(other, StarAlgebra) and self.spec == other.spec

    def __hash__(self) -> int:
        return hash(self.spec)

    # -- vector helpers ---------------------------------------------------

    def qG(self, q: Sequence[int]) -> Index:
        """Row vector q times G, i.e. sum_j q_j G_j."""
        return tuple(sum(q[j] * self.rows[j][l] for j in range(self.d)) for l in range(self.d))

    def split(self, nu: Sequence[int]) -> tuple[Index, Index]:
        """nu = r + F q with r in I(F) (floored division per coordinate)."""
        r = tuple(v % a for v, a in zip(nu, self.a))
        q = tuple(v // a for v, a in zip(nu, self.a))
        return r, q

    def push1(self, nu: Index) -> tuple[Index, Index]:
        """U^nu S = S_r U^{qG}; returns (r, qG)."""
        hit = self._push_cache.get(nu)
        if hit is None:
            r, q = self.split(nu)
            hit = (r, self.qG(q))
            self._push_cache[nu] = hit
        return hit

    def push(self, nu: Index, path: Path) -> tuple[Path, Index]:
        """U^nu S_path = S_path' U^nu'."""
        out = []
        for i in path:
            r, nu = self.push1(tuple(x + y for x, y in zip(nu, i)))
            out.append(r)
        return tuple(out), nu

    def pull(self, path: Path, lam: Index) -> tuple[Index, Path]:
        """S_path* U^lam = U^lam' S_path'*; adjoint of ``push``."""
        new_path, nu = self.push(tuple(-v for v in lam), path)
        return tuple(-v for v in nu), new_path

    # -- term algebra ------------------------------------------------------

    def term_product(self, s: NormalTerm, t: NormalTerm) -> NormalTerm | None:
        b, c = len(s.beta), len(t.alpha)
        m = min(b, c)
        # innermost factors meet first: S_{beta_1}* S_{alpha_1}
        if s.beta[:m] != t.alpha[:m]:
            return None
        if b <= c:
            extra, nu = self.push(s.nu, t.alpha[m:])
            return NormalTerm(s.alpha + extra, tuple(x + y for x, y in zip(nu, t.nu)), t.beta)
        lam, extra = self.pull(s.beta[m:], t.nu)
        return NormalTerm(s.alpha, tuple(x + y for x, y in zip(s.nu, lam)), t.beta + extra)

    def expand_term(self, t: NormalTerm) -> list[NormalTerm]:
        """S_a U^nu S_b* = sum_mu S_(a,mu) U^{nu_mu} S*_(b,w_mu)."""
        out = []
        for mu in self.index:
            lam, w = self.pull((self.zero_index,), tuple(x - y for x, y in zip(t.nu, mu)))
            out.append(NormalTerm(t.alpha + (mu,), lam, t.beta + w))
        return out

    def solve_qG(self, v: Index) -> Index | None:
        """Integer q with qG = v, if any."""
        w = self.adjG.rapply(v)
        if any(x % self.detG for x in w):
            return None
        return tuple(x // self.detG for x in w)

    def contract_cell(self, cell: dict[tuple[Index, Index, Index], GaussianRational]) -> dict[Index, GaussianRational] | None:
        """Find a Laurent polynomial f with expand(f) == cell.

        ``cell`` maps (mu, nu, w) -> coefficient for terms S_mu U^nu S_w*.
        """
        if len(cell) % self.N:
            return None
        f: dict[Index, GaussianRational] = {}
        zero = self.zero_index
        for (mu, nu, w), c in cell.items():
            if mu != zero:
                continue
            q = self.solve_qG(tuple(-v for v in nu))
            if q is None:
                return None
            lam = tuple(m - x - a * y for m, x, a, y in zip(mu, w, self.a, q))
            f[lam] = c
        if len(f) * self.N != len(cell):
            return None
        for lam, c in f.items():
            for t in self.expand_term(NormalTerm((), lam, ())):
                if cell.get((t.alpha[0], t.nu, t.beta[0])) != c:
                    return None
        return f

    # -- element constructors ---------------------------------------------

    def element(self, terms: dict[NormalTerm, GaussianRational] | Iterable[tuple[NormalTerm, object]], canonical: bool = True) -> "AlgebraElement":
        items = terms.items() if isinstance(terms, dict) else terms
        acc: dict[NormalTerm, GaussianRational] = {}
        for t, c in items:
            acc[t] = acc.get(t, GaussianRational(0)) + GaussianRational.coerce(c)
        el = AlgebraElement(self, {t: c for t, c in acc.items() if c}, canonical=False)
        return el.canonical() if canonical else el

    def term(self, alpha: Sequence[Sequence[int]], nu: Sequence[int], beta: Sequence[Sequence[int]], coeff=ONE) -> "AlgebraElement":
        t = NormalTerm(tuple(tuple(i) for i in alpha), tuple(nu), tuple(tuple(i) for i in beta))
        self.check_term(t)
        return self.element({t: GaussianRational.coerce(coeff)})

    def check_term(self, t: NormalTerm) -> None:
        if len(t.nu) != self.d:
            raise DomainError(f"exponent vector has length {len(t.nu)}, expected {self.d}")
        for i in t.alpha + t.beta:
            if len(i) != self.d or any(not 0 <= v < a for v, a in zip(i, self.a)):
                raise DomainError(f"path entry {i} is not in I(F)")

    def one(self) -> "AlgebraElement":
        return self.element({NormalTerm((), self.zero_index, ()): ONE})

    def zero(self) -> "AlgebraElement":
        return AlgebraElement(self, {}, canonical=True)

    def scalar(self, c) -> "AlgebraElement":
        return self.element({NormalTerm((), self.zero_index, ()): c})

    def U(self, j: int, e: int = 1) -> "AlgebraElement":
        """U_j^e with j counted from 1."""
        if not 1 <= j <= self.d:
            raise DomainError(f"unitary index {j} out of range 1..{self.d}")
        nu = tuple(e if l == j - 1 else 0 for l in range(self.d))
        return self.element({NormalTerm((), nu, ()): ONE})

    def Unu(self, nu: Sequence[int]) -> "AlgebraElement":
        return self.element({NormalTerm((), tuple(nu), ()): ONE})

    def S(self) -> "AlgebraElement":
        return self.element({NormalTerm((self.zero_index,), self.zero_index, ()): ONE})

    def Sstar(self) -> "AlgebraElement":
        return self.element({NormalTerm((), self.zero_index, (self.zero_index,)): ONE})

    def S_path(self, path: Sequence[Sequence[int]]) -> "AlgebraElement":
        return self.term(path, self.zero_index, ())


class AlgebraElement:
    """Finite combination of normal terms; treat as immutable.

    ``canonical`` marks elements already in minimal-shape form.  Results of
    ``expand_level`` and of ``rho`` applied to such expansions are kept
    uncontracted on purpose.
    """

    __slots__ = ("alg", "terms", "canonical_flag")

    def __init__(self, alg: StarAlgebra, terms: dict[NormalTerm, GaussianRational], canonical: bool) -> None:
        self.alg = alg
        self.terms = terms
        self.canonical_flag = canonical

    # -- shape bookkeeping ---------------------------------------------------

    def degrees(self) -> list[int]:
        return sorted({t.degree for t in self.terms})

    def by_degree(self) -> dict[int, dict[NormalTerm, GaussianRational]]:
        out: dict[int, dict[NormalTerm, GaussianRational]] = {}
        for t, c in self.terms.items():
            out.setdefault(t.degree, {})[t] = c
        return out

    def sorted_terms(self) -> list[tuple[NormalTerm, GaussianRational]]:
        return sorted(self.terms.items(), key=lambda tc: tc[0].sort_key())

    def canonical(self) -> "AlgebraElement":
        if self.canonical_flag:
            return self
        alg = self.alg
        out: dict[NormalTerm, GaussianRational] = {}
        for deg, part in self.by_degree().items():
            k2 = max(len(t.beta) for t in part)
            part = _expand_to(alg, part, k2)
            while k2 > 0 and k2 + deg > 0:
                smaller = _contract(alg, part)
                if smaller is None:
                    break
                part, k2 = smaller, k2 - 1
            out.update(part)
        return AlgebraElement(alg, out, canonical=True)

    def is_zero(self) -> bool:
        return not self.terms

    # -- arithmetic ------------------------------------------------------------

    def _same(self, other: "AlgebraElement") -> None:
        if self.alg != other.alg:
            raise DomainError("elements belong to different algebras (spec mismatch)")

    def __add__(self, other) -> "AlgebraElement":
        other = _lift(self.alg, other)
        self._same(other)
        return self.alg.element(itertools.chain(self.terms.items(), other.terms.items()))

    __radd__ = __add__

    def __neg__(self) -> "AlgebraElement":
        return self.scale(-1)

    def __sub__(self, other) -> "AlgebraElement":
        return self + (-_lift(self.alg, other))

    def __rsub__(self, other) -> "AlgebraElement":
        return _lift(self.alg, other) - self

    def scale(self, c) -> "AlgebraElement":
        c = GaussianRational.coerce(c)
        if not c:
            return self.alg.zero()
        return AlgebraElement(self.alg, {t: c * v for t, v in self.terms.items()}, self.canonical_flag)

    def __mul__(self, other) -> "AlgebraElement":
        if not isinstance(other, AlgebraElement):
            return self.scale(other)
        self._same(other)
        prod = self.alg.term_product
        acc: list[tuple[NormalTerm, GaussianRational]] = []
        for s, c in self.terms.items():
            for t, e in other.terms.items():
                r = prod(s, t)
                if r is not None:
                    acc.append((r, c * e))
        return self.alg.element(acc)

    def __rmul__(self, other) -> "AlgebraElement":
        return self.scale(other)

    def __pow__(self, n: int) -> "AlgebraElement":
        if n < 0:
            raise DomainError("negative powers are not defined for general elements")
        out = self.alg.one()
        for _ in range(n):
            out = out * self
        return out

    def adjoint(self) -> "AlgebraElement":
        return AlgebraElement(
            self.alg, {t.adjoint(): c.conjugate() for t, c in self.terms.items()}, self.canonical_flag
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, AlgebraElement):
            try:
                other = _lift(self.alg, other)
            except TypeError:
                return NotImplemented
        return equals(self, other)

    __hash__ = None  # type: ignore[assignment]

    def __repr__(self) -> str:
        from .words import format_element

        return f"<{format_element(self)}>"


def _lift(alg: StarAlgebra, value) -> AlgebraElement:
    if isinstance(value, AlgebraElement):
        return value
    return alg.scalar(GaussianRational.coerce(value))


def _expand_to(alg: StarAlgebra, part: dict[NormalTerm, GaussianRational], k2: int) -> dict[NormalTerm, GaussianRational]:
    """Expand every term of one gauge degree until |beta| == k2, merging coefficients."""
    out: dict[NormalTerm, GaussianRational] = {}
    stack = list(part.items())
    while stack:
        t, c = stack.pop()
        if len(t.beta) > k2:
            raise DomainError(f"term of shape {t.shape} is deeper than the target")
        if len(t.beta) == k2:
            out[t] = out[t] + c if t in out else c
        else:
            stack.extend((s, c) for s in alg.expand_term(t))
    return {t: c for t, c in out.items() if c}


def _contract(alg: StarAlgebra, part: dict[NormalTerm, GaussianRational]) -> dict[NormalTerm, GaussianRational] | None:
    """Rewrite one fixed-shape degree part one level shallower, if possible."""
    cells: dict[tuple[Path, Path], dict] = {}
    for t, c in part.items():
        cells.setdefault((t.alpha[:-1], t.beta[:-1]), {})[(t.alpha[-1], t.nu, t.beta[-1])] = c
    out: dict[NormalTerm, GaussianRational] = {}
    for (ap, bp), cell in cells.items():
        f = alg.contract_cell(cell)
        if f is None:
            return None
        for lam, c in f.items():
            out[NormalTerm(ap, lam, bp)] = c
    return out


# -- public operations -----------------------------------------------------


def multiply(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return x * y


def add(x: AlgebraElement, y: AlgebraElement) -> AlgebraElement:
    return x + y


def scale(c, x: AlgebraElement) -> AlgebraElement:
    return x.scale(c)


def adjoint(x: AlgebraElement) -> AlgebraElement:
    return x.adjoint()


def expand_level(x: AlgebraElement, target_k1: int, target_k2: int) -> AlgebraElement:
    """Rewrite every term at shape (target_k1, target_k2); the value is unchanged."""
    deg = target_k1 - target_k2
    for t in x.terms:
        if t.degree != deg:
            raise DomainError(f"term of gauge degree {t.degree} cannot reach shape ({target_k1}, {target_k2})")
        if len(t.beta) > target_k2:
            raise DomainError(f"term of shape {t.shape} is already deeper than ({target_k1}, {target_k2})")
    return AlgebraElement(x.alg, _expand_to(x.alg, x.terms, target_k2), canonical=False)


def equals(x: AlgebraElement, y: AlgebraElement) -> bool:
    """Compare after expanding each gauge degree of both sides to a common shape."""
    x._same(y)
    dx, dy = x.by_degree(), y.by_degree()
    for deg in set(dx) | set(dy):
        px, py = dx.get(deg, {}), dy.get(deg, {})
        k2 = max([len(t.beta) for t in px] + [len(t.beta) for t in py])
        if _expand_to(x.alg, px, k2) != _expand_to(x.alg, py, k2):
            return False
    return True


def expectation(x: AlgebraElement) -> AlgebraElement:
    """Average over the gauge action: keep the degree-0 part."""
    return AlgebraElement(x.alg, {t: c for t, c in x.terms.items() if t.degree == 0}, x.canonical_flag)


def gauge_action(x: AlgebraElement, z) -> AlgebraElement:
    """gamma_z(x) for a Gaussian-rational z (|z| = 1 not enforced)."""
    z = GaussianRational.coerce(z)
    terms = {}
    for t, c in x.terms.items():
        f = ONE
        k = t.degree
        base = z if k >= 0 else z.conjugate()
        for _ in range(abs(k)):
            f = f * base
        terms[t] = c * f
    return AlgebraElement(x.alg, terms, x.canonical_flag)


def matrix_unit(alg: StarAlgebra, alpha: Sequence[Sequence[int]], beta: Sequence[Sequence[int]]) -> AlgebraElement:
    """E_{alpha beta} = S_alpha S_beta*."""
    if len(alpha) != len(beta):
        raise DomainError(f"matrix unit needs |alpha| == |beta|, got {len(alpha)} and {len(beta)}")
    return alg.term(alpha, alg.zero_index, beta)


def rho(x: AlgebraElement) -> AlgebraElement:
    """S_a f S_b* -> S_(0,a) f S_(0,b)*, defined on the gauge-invariant part."""
    z = x.alg.zero_index
    out = {}
    for t, c in x.terms.items():
        if t.degree != 0:
            raise DomainError(f"rho is defined on degree-0 elements; found degree {t.degree}")
        out[NormalTerm((z,) + t.alpha, t.nu, (z,) + t.beta)] = c
    el = AlgebraElement(x.alg, out, canonical=False)
    return el.canonical() if x.canonical_flag else el
