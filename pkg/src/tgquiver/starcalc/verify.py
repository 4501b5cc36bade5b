"""Relation suites checked with exact arithmetic in the normal-form engine."""

from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field
from math import gcd
from typing import Sequence

from ..numt import DomainError, IntMatrix, adjugate, bezout, det
from ..torquiver import TorusQuiverSpec
from .algebra import AlgebraElement, NormalTerm, StarAlgebra, equals, expand_level, matrix_unit, rho
from .laurent import exponents_in_row_lattice, from_matrix, level_labels, to_matrix
from .words import GeneratorWord, Letter, format_words, normalize
from .coeff import ONE, GaussianRational


@dataclass
class Check:
    label: str
    ok: bool
    detail: str = ""


@dataclass
class Report:
    name: str
    checks: list[Check] = field(default_factory=list)
    hypotheses: dict[str, bool] = field(default_factory=dict)
    notes: dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.ok]

    def add(self, label: str, lhs: AlgebraElement, rhs: AlgebraElement) -> bool:
        ok = equals(lhs, rhs)
        self.checks.append(Check(label, ok, "" if ok else f"lhs={lhs!r} rhs={rhs!r}"))
        return ok

    def expect(self, label: str, ok: bool, detail: str = "") -> None:
        self.checks.append(Check(label, ok, "" if ok else detail))

    def as_dict(self) -> dict:
        return {
            "check": self.name,
            "passed": self.passed,
            "hypotheses": self.hypotheses,
            "count": len(self.checks),
            "failures": [{"label": c.label, "detail": c.detail} for c in self.failures],
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True, default=str)

    def summary(self) -> str:
        status = "pass" if self.passed else "FAIL"
        lines = [f"{self.name}: {status} ({len(self.checks) - len(self.failures)}/{len(self.checks)} checks)"]
        for k, v in self.hypotheses.items():
            lines.append(f"  hypothesis {k}: {'holds' if v else 'violated'}")
        for c in self.failures[:10]:
            lines.append(f"  failed: {c.label}")
        return "\n".join(lines)


def _alg(spec: TorusQuiverSpec | StarAlgebra) -> StarAlgebra:
    return spec if isinstance(spec, StarAlgebra) else StarAlgebra(spec)


def _delta(alg: StarAlgebra, flag: bool) -> AlgebraElement:
    return alg.one() if flag else alg.zero()


def _neg(v: Sequence[int]) -> tuple[int, ...]:
    return tuple(-x for x in v)


def verify_presentation(spec: TorusQuiverSpec | StarAlgebra) -> Report:
    """The defining relations and every derived rewriting rule, instance by instance."""
    alg = _alg(spec)
    rep = Report("presentation")
    S, Ss, one = alg.S(), alg.Sstar(), alg.one()
    I = alg.index
    z = alg.zero_index
    rep.add("S* S = 1", Ss * S, one)
    for j in range(1, alg.d + 1):
        rep.add(f"U{j} U{j}* = 1", alg.U(j) * alg.U(j, -1), one)
        rep.add(f"U{j}* U{j} = 1", alg.U(j, -1) * alg.U(j), one)
        for l in range(j + 1, alg.d + 1):
            rep.add(f"U{j} U{l} = U{l} U{j}", alg.U(j) * alg.U(l), alg.U(l) * alg.U(j))
    for nu in I:
        rep.add(f"S* U^{nu} S = delta", Ss * alg.Unu(nu) * S, _delta(alg, nu == z))
    Snu = {nu: alg.Unu(nu) * S for nu in I}
    for nu, mu in itertools.product(I, I):
        rep.add(f"S_{nu}* S_{mu} = delta", Snu[nu].adjoint() * Snu[mu], _delta(alg, nu == mu))
    for nu in I:
        rep.add(f"U^{nu} S = S_{nu}", alg.Unu(nu) * S, alg.term([nu], z, []))
    for j in range(alg.d):
        Gj = alg.rows[j]
        rep.add(f"U{j + 1}^{alg.a[j]} S = S U^G{j + 1}", alg.U(j + 1, alg.a[j]) * S, S * alg.Unu(Gj))
    total = alg.zero()
    for nu in I:
        total = total + alg.Unu(nu) * S * Ss * alg.Unu(_neg(nu))
    rep.add("sum U^nu S S* U^-nu = 1", total, one)
    rep.add("sum S_nu S_nu* = 1", sum((alg.term([nu], z, [nu]) for nu in I), alg.zero()), one)
    # rule instances over nu in I(F), j <= d
    for nu in I:
        for j in range(alg.d):
            e = tuple(alg.a[j] if l == j else 0 for l in range(alg.d))
            shifted = tuple(x + y for x, y in zip(nu, e))
            Gj = alg.rows[j]
            rep.add(f"R1 U^{shifted} S = S_{nu} U^G{j + 1}", alg.Unu(shifted) * S, alg.term([nu], Gj, []))
            rep.add(f"R2 S* U^{shifted} S = delta U^G{j + 1}", Ss * alg.Unu(shifted) * S, alg.Unu(Gj) if nu == z else alg.zero())
    for j in range(alg.d):
        a, Gj = alg.a[j], alg.rows[j]
        rep.add(f"R3 U{j + 1}* S = U{j + 1}^{a - 1} S U^-G{j + 1}", alg.U(j + 1, -1) * S, alg.U(j + 1, a - 1) * S * alg.Unu(_neg(Gj)))
        rep.add(f"R3* S* U{j + 1} = U^G{j + 1} S* U{j + 1}^{1 - a}", Ss * alg.U(j + 1), alg.Unu(Gj) * Ss * alg.U(j + 1, 1 - a))
    return rep


def verify_matrix_units(spec: TorusQuiverSpec | StarAlgebra, k: int, full_limit: int = 30) -> Report:
    """E_ab E_cd = delta(b, c) E_ad, sum_a E_aa = 1, E_ab* = E_ba.

    The product law is checked on every quadruple when N^k <= full_limit;
    above that every (b, c) pair is checked with a and d cycling through
    the index set, which still exercises each contraction.
    """
    alg = _alg(spec)
    rep = Report(f"matrix-units k={k}")
    labels = level_labels(alg, k)
    z = alg.zero_index
    prod = alg.term_product
    n = len(labels)
    ok = True
    if n <= full_limit:
        quads = itertools.product(labels, repeat=4)
        rep.notes["product_law"] = f"all {n ** 4} quadruples"
    else:
        quads = ((labels[(i + j) % n], labels[i], labels[j], labels[(3 * i + j + 1) % n]) for i in range(n) for j in range(n))
        rep.notes["product_law"] = f"all {n * n} (beta, alpha') pairs"
    for a, b, c, e in quads:
        got = prod(NormalTerm(a, z, b), NormalTerm(c, z, e))
        want = NormalTerm(a, z, e) if b == c else None
        if got != want:
            ok = False
            rep.expect(f"E_{a}{b} E_{c}{e}", False, f"got {got}")
    rep.expect("E_ab E_cd = delta(b,c) E_ad", ok)
    total = alg.element([(NormalTerm(a, z, a), ONE) for a in labels])
    rep.add("sum_a E_aa = 1", total, alg.one())
    adj_ok = all(matrix_unit(alg, a, b).adjoint() == matrix_unit(alg, b, a) for a in labels[:8] for b in labels)
    rep.expect("E_ab* = E_ba", adj_ok)
    return rep


def verify_power_quotient(spec: TorusQuiverSpec | StarAlgebra, k: int) -> Report:
    """Relations of O_{F^k, G^k} for S~ = S^k inside O_{F,G}."""
    if k < 1:
        raise DomainError("k must be >= 1")
    alg = _alg(spec)
    F, G = alg.spec.F, alg.spec.G
    rep = Report(f"power-quotient k={k}")
    rep.hypotheses["|det G| = 1"] = abs(alg.detG) == 1
    # used implicitly when U^{a_j G_j} S is rewritten as S U^{(G^2)_j}
    rep.hypotheses["F G = G F"] = F @ G == G @ F
    St = alg.S() ** k
    Sts = St.adjoint()
    ak = tuple(a ** k for a in alg.a)
    Ik = list(itertools.product(*(range(a) for a in ak)))
    z = alg.zero_index
    for nu in Ik:
        rep.add(f"S~* U^{nu} S~ = delta", Sts * alg.Unu(nu) * St, _delta(alg, nu == z))
    Gk = G ** k
    for j in range(alg.d):
        rep.add(f"U{j + 1}^{ak[j]} S~ = S~ U^(G^k)_{j + 1}", alg.U(j + 1, ak[j]) * St, St * alg.Unu(Gk.row(j)))
    total = alg.zero()
    P = St * Sts
    for nu in Ik:
        total = total + alg.Unu(nu) * P * alg.Unu(_neg(nu))
    rep.add("sum U^nu S~ S~* U^-nu = 1", total, alg.one())
    return rep


def _check_gcd(alg: StarAlgebra) -> None:
    g = gcd(det(alg.spec.F), alg.detG)
    if g != 1:
        raise DomainError(f"gcd(det F, det G) = gcd({det(alg.spec.F)}, {alg.detG}) = {g} != 1")


def subalgebra_witness(alg: StarAlgebra, ks: Sequence[int], j: int) -> GeneratorWord:
    """A word in U_l^{+-k_l}, S, S* equal to U_j (j counted from 0).

    U_j = (U_j^{a_j})^p (U_j^{det G})^q with p a_j + q det G = 1, where
    U_j^{det G} = prod_l (U^{G_l})^{Q_jl} for Q = adj G and
    U^{G_l} = S* U_l^{a_l} S.
    """
    Q = adjugate(alg.spec.G)
    _, p, q = bezout(alg.a[j], alg.detG)
    letters: list[Letter] = []

    def power_of_generator(l: int, exponent: int) -> list[Letter]:
        # U_l^exponent as repeated U_l^{+-k_l}; exponent is a multiple of k_l
        reps, rem = divmod(abs(exponent), ks[l])
        assert rem == 0
        sign = 1 if exponent > 0 else -1
        return [Letter("U", l + 1, sign * ks[l])] * reps

    letters += power_of_generator(j, p * alg.a[j])
    for l in range(alg.d):
        e = Q[j, l] * q
        block = [Letter("S*")] + power_of_generator(l, alg.a[l] if e > 0 else -alg.a[l]) + [Letter("S")]
        letters += block * abs(e)
    return GeneratorWord(ONE, tuple(letters))


def verify_subalgebra_generators(spec: TorusQuiverSpec | StarAlgebra, ks: Sequence[int]) -> Report:
    """Each U_j is a word in {U_l^{k_l}}, S when k_l | a_l and gcd(det F, det G) = 1."""
    alg = _alg(spec)
    if len(ks) != alg.d:
        raise DomainError(f"need {alg.d} exponents, got {len(ks)}")
    for l, (kl, al) in enumerate(zip(ks, alg.a)):
        if kl < 1 or al % kl:
            raise DomainError(f"k_{l + 1} = {kl} does not divide a_{l + 1} = {al}")
    _check_gcd(alg)
    rep = Report(f"subalgebra-generators k={tuple(ks)}")
    witnesses = {}
    for j in range(alg.d):
        w = subalgebra_witness(alg, ks, j)
        allowed = all(l.kind != "U" or abs(l.e) == ks[l.j - 1] for l in w.letters)
        rep.expect(f"witness for U{j + 1} uses only U_l^(+-k_l), S, S*", allowed)
        rep.add(f"normalize(witness) = U{j + 1}", normalize(alg, w), alg.U(j + 1))
        witnesses[f"U{j + 1}"] = format_words([w])
    rep.notes["witnesses"] = witnesses
    return rep


def verify_twisted_family(spec: TorusQuiverSpec | StarAlgebra, ks: Sequence[int]) -> Report:
    """S~_l = U^{l k} S and W_j = U_j^{k_j} satisfy the (F, G) relations."""
    alg = _alg(spec)
    if len(ks) != alg.d:
        raise DomainError(f"need {alg.d} exponents, got {len(ks)}")
    for l, (kl, al) in enumerate(zip(ks, alg.a)):
        if kl < 1 or gcd(kl, al) != 1:
            raise DomainError(f"gcd(k_{l + 1}, a_{l + 1}) = gcd({kl}, {al}) != 1")
    rep = Report(f"twisted-family k={tuple(ks)}")
    G = alg.spec.G
    rep.hypotheses["gcd(det F, det G) = 1"] = gcd(det(alg.spec.F), alg.detG) == 1
    # W^{G_j} = U^{(k_l b_jl)_l} but W_j^{a_j} S = S U^{k_j G_j}
    rep.hypotheses["k_j G_jl = k_l G_jl"] = all(ks[j] * G[j, l] == ks[l] * G[j, l] for j in range(alg.d) for l in range(alg.d))
    S = alg.S()
    z = alg.zero_index

    def W(v: Sequence[int]) -> AlgebraElement:
        return alg.Unu(tuple(x * kk for x, kk in zip(v, ks)))

    St = {lam: W(lam) * S for lam in alg.index}
    for lam, mu in itertools.product(alg.index, alg.index):
        rep.add(f"S~_{lam}* S~_{mu} = delta", St[lam].adjoint() * St[mu], _delta(alg, lam == mu))
    for j in range(alg.d):
        ej = tuple(alg.a[j] if l == j else 0 for l in range(alg.d))
        rep.add(f"W{j + 1}^{alg.a[j]} S~ = S~ W^G{j + 1}", W(ej) * St[z], St[z] * W(alg.rows[j]))
    rep.add("sum S~_l S~_l* = 1", sum((St[lam] * St[lam].adjoint() for lam in alg.index), alg.zero()), alg.one())
    rep.add(
        "sum W^nu S~ S~* W^-nu = 1",
        sum((W(nu) * St[z] * St[z].adjoint() * W(_neg(nu)) for nu in alg.index), alg.zero()),
        alg.one(),
    )
    return rep


def colimit_battery(alg: StarAlgebra) -> list[tuple[int, ...]]:
    nus = set(alg.index) | {alg.zero_index}
    for row in alg.rows:
        nus.add(tuple(row))
        nus.add(_neg(row))
    return sorted(nus)


def verify_colimit_diagram(spec: TorusQuiverSpec | StarAlgebra, k: int) -> Report:
    """phi_{k+1} o rho_k = rho_{k+1} o phi_k on S_a U^nu S_b*, |a| = |b| = k."""
    if k < 0:
        raise DomainError("k must be >= 0")
    alg = _alg(spec)
    rep = Report(f"colimit-diagram k={k}")
    labels = level_labels(alg, k)
    battery = colimit_battery(alg)
    rep.notes["nu_battery"] = [list(v) for v in battery]
    ok = True
    count = 0
    for a, b in itertools.product(labels, labels):
        for nu in battery:
            g = AlgebraElement(alg, {NormalTerm(a, nu, b): ONE}, canonical=False)
            lhs = expand_level(rho(g), k + 2, k + 2)
            rhs = rho(expand_level(g, k + 1, k + 1))
            count += 1
            if lhs.terms != rhs.terms or not equals(lhs, rhs):
                ok = False
                rep.expect(f"diagram at {a},{nu},{b}", False, f"{lhs!r} vs {rhs!r}")
    rep.expect(f"diagram commutes on {count} generators", ok)
    return rep


def random_level_element(alg: StarAlgebra, k: int, rng: random.Random, max_terms: int = 4) -> AlgebraElement:
    labels = level_labels(alg, k)
    terms = []
    for _ in range(rng.randint(1, max_terms)):
        a, b = rng.choice(labels), rng.choice(labels)
        nu = tuple(rng.randint(-3, 3) for _ in range(alg.d))
        c = rng.randint(-2, 2)
        terms.append((NormalTerm(a, nu, b), c))
    return alg.element(terms)


def verify_crossed_product(spec: TorusQuiverSpec | StarAlgebra, k: int, trials: int = 25, seed: int = 0) -> Report:
    """rho(x) = S x S* on random level-k elements, plus the supporting identities."""
    if trials < 1:
        raise DomainError("trials must be >= 1")
    alg = _alg(spec)
    rep = Report(f"crossed-product k={k}")
    rng = random.Random(seed)
    S, Ss = alg.S(), alg.Sstar()
    rep.add("rho(1) = S S*", rho(alg.one()), S * Ss)
    samples = [random_level_element(alg, k, rng) for _ in range(trials)]
    for i, x in enumerate(samples):
        rep.add(f"trial {i}: S x S* = rho(x)", S * x * Ss, rho(x))
        y = samples[(i + 1) % trials]
        rep.add(f"trial {i}: rho(xy) = rho(x) rho(y)", rho(x * y), rho(x) * rho(y))
        rep.add(f"trial {i}: rho(x*) = rho(x)*", rho(x.adjoint()), rho(x).adjoint())
    for j in range(alg.d):
        rep.add(f"S* U{j + 1}^{alg.a[j]} S = U^G{j + 1}", Ss * alg.U(j + 1, alg.a[j]) * S, alg.Unu(alg.rows[j]))
    # partition of unity is invariant under conjugation by the unitaries
    total = alg.zero()
    for nu in alg.index:
        total = total + alg.Unu(nu) * S * Ss * alg.Unu(_neg(nu))
    rep.add("sum U^nu S S* U^-nu = 1", total, alg.one())
    for j in range(1, alg.d + 1):
        rep.add(f"U{j} (sum U^nu S S* U^-nu) U{j}* = 1", alg.U(j) * total * alg.U(j, -1), alg.one())
    return rep


def verify_tensor_picture(spec: TorusQuiverSpec | StarAlgebra, k: int, trials: int = 10, seed: int = 0) -> Report:
    """to_matrix is unital, multiplicative, *-preserving and inverted by from_matrix."""
    alg = _alg(spec)
    rep = Report(f"tensor-picture k={k}")
    rng = random.Random(seed)
    labels = level_labels(alg, k)
    from .laurent import LaurentMatrix

    rep.expect("to_matrix(1) = identity", to_matrix(alg.one(), k) == LaurentMatrix.identity(labels, alg.d))
    in_lattice = True
    for i in range(trials):
        x, y = random_level_element(alg, k, rng), random_level_element(alg, k, rng)
        Mx, My = to_matrix(x, k), to_matrix(y, k)
        rep.expect(f"trial {i}: multiplicative", to_matrix(x * y, k) == Mx @ My)
        rep.add(f"trial {i}: round trip", from_matrix(alg, Mx), x)
        in_lattice &= exponents_in_row_lattice(Mx, alg.spec.G, k)
    # recorded, not asserted: entries need not be polynomials in U_j^{a_j^k}
    rep.notes["entries_in_W_subring"] = in_lattice
    return rep
