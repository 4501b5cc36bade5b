import json
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import invariant_factors
from tgquiver import torquiver as tq
from tgquiver.numt import DomainError, IntMatrix, det

# spec battery shared with the acceptance suite
ONB_BATTERY = [
    (2, 3),
    (3, 1),
    (2, -1),
    (1, 5),
    ([[2, 0], [0, 3]], [[1, 1], [0, 1]]),
    ([[2, 0], [0, 3]], [[1, 0], [0, 1]]),
    ([[2, 0], [0, 3]], [[5, 0], [0, 1]]),
    ([[2, 0, 0], [0, 2, 0], [0, 0, 3]], [[1, 1, 0], [0, 1, 1], [1, 0, 1]]),
]


def test_spec_validation():
    s = tq.TorusQuiverSpec.of([[2, 0], [0, 3]], [[1, 1], [0, 1]])
    assert s.N == 6 and s.a == (2, 3) and s.detG == 1
    with pytest.raises(DomainError):
        tq.TorusQuiverSpec.of([[2, 1], [0, 3]], [[1, 0], [0, 1]])
    with pytest.raises(DomainError):
        tq.TorusQuiverSpec.of(2, 0)
    with pytest.raises(DomainError):
        tq.TorusQuiverSpec.of(-2, 1)


def test_spec_json():
    s = tq.TorusQuiverSpec.of([[2, 0], [0, 3]], [[1, 1], [0, 1]])
    data = json.loads(s.to_json())
    assert data == {"d": 2, "F": [[2, 0], [0, 3]], "G": [[1, 1], [0, 1]]}
    assert tq.TorusQuiverSpec.from_json(s.to_json()) == s


def test_reduce_examples():
    F = IntMatrix.diag([2, 3])
    G = IntMatrix.of([[1, 1], [0, 1]])
    spec, U, V = tq.reduce(F, G)
    assert U == V == IntMatrix.identity(2) and spec.G == G and spec.F == F

    spec, U, V = tq.reduce(IntMatrix.of([[4, 6], [2, 2]]), IntMatrix.identity(2))
    assert spec.a == (2, 2)
    assert abs(spec.detG) == 1
    assert U @ spec.F @ V == IntMatrix.of([[4, 6], [2, 2]])

    spec, U, V = tq.reduce(IntMatrix.diag([-2, 3]), IntMatrix.identity(2))
    assert all(a > 0 for a in spec.a) and spec.N == 6

    with pytest.raises(DomainError, match="singular F"):
        tq.reduce(IntMatrix.of([[1, 1], [1, 1]]), IntMatrix.identity(2))


def test_reduce_round_trip_random():
    rng = random.Random(5)
    done = 0
    while done < 100:
        d = rng.randint(1, 3)
        F = IntMatrix.of([[rng.randint(-6, 6) for _ in range(d)] for _ in range(d)])
        G = IntMatrix.of([[rng.randint(-6, 6) for _ in range(d)] for _ in range(d)])
        if det(F) == 0 or det(G) == 0:
            continue
        spec, U, V = tq.reduce(F, G)
        assert U @ spec.F @ V == F
        assert U @ spec.G @ V == G
        assert spec.N == abs(det(F)) and abs(spec.detG) == abs(det(G))
        if not (F.is_diagonal() and all(a > 0 for a in F.diagonal())):
            assert list(spec.a) == invariant_factors(F.tolist())
        done += 1


def test_index_set():
    assert tq.index_set(tq.TorusQuiverSpec.of(2, 1)) == [(0,), (1,)]
    idx = tq.index_set(tq.TorusQuiverSpec.of([[2, 0], [0, 3]], [[1, 0], [0, 1]]))
    assert len(idx) == 6 and idx == sorted(idx) and idx[0] == (0, 0) and idx[-1] == (1, 2)
    assert tq.index_set(tq.TorusQuiverSpec.of([[1, 0], [0, 1]], [[1, 0], [0, 1]])) == [(0, 0)]


def test_fiber_examples():
    s = tq.TorusQuiverSpec.of(2, 3)
    ys = tq.fiber(s, [Fraction(1, 3)])
    assert sorted(ys) == [(Fraction(0),), (Fraction(1, 2),)]
    s2 = tq.TorusQuiverSpec.of([[2, 0], [0, 3]], [[1, 1], [0, 1]])
    assert tq.fiber(s2, [0, 0]) == [(Fraction(i, 2), Fraction(j, 3)) for i in range(2) for j in range(3)]
    s3 = tq.TorusQuiverSpec.of(1, 5)
    assert tq.fiber(s3, [Fraction(1, 7)]) == [(Fraction(5, 7),)]


@pytest.mark.parametrize("F,G", ONB_BATTERY)
def test_fiber_defining_equation(F, G):
    s = tq.TorusQuiverSpec.of(F, G)
    rng = np.random.default_rng(0)
    for _ in range(20):
        t = list(rng.random(s.d))
        ys = tq.fiber(s, t)
        assert len(ys) == s.N
        assert tq.fiber_defect(s, t, ys) < tq.POINT_TOL
        pts = np.exp(2j * np.pi * np.asarray(ys))
        dists = [np.max(np.abs(pts[i] - pts[j])) for i in range(len(ys)) for j in range(i)]
        assert not dists or min(dists) > 1e-12


def test_inner_product_examples():
    s = tq.TorusQuiverSpec.of(2, 3)
    one = lambda x, y: np.ones(len(y), dtype=complex)
    assert abs(tq.inner_product(s, one, one, [0.3]) - 1) < 1e-12
    u0, u1 = tq.basis_function((0,)), tq.basis_function((1,))
    assert abs(tq.inner_product(s, u0, u1, [0.17])) < 1e-9
    y = lambda x, yy: yy[:, 0]
    assert abs(tq.inner_product(s, y, y, [0.41]) - 1) < 1e-12


@settings(max_examples=50)
@given(st.floats(0, 1, exclude_max=True), st.integers(-3, 3), st.integers(-3, 3))
def test_inner_product_positive(t, a, b):
    s = tq.TorusQuiverSpec.of(3, 2)
    xi = lambda x, y: x[0] ** a * y[:, 0] ** b + 0.5 * y[:, 0]
    v = tq.inner_product(s, xi, xi, [t])
    assert abs(v.imag) < 1e-12 and v.real >= -1e-12


def test_monomial_battery():
    bat = tq.monomial_battery(1)
    assert ((0,), (0,)) in bat and ((1,), (-2,)) in bat and ((2,), (2,)) not in bat
    assert all(sum(map(abs, a + b)) <= 3 for a, b in bat)
    assert len(bat) == len(set(bat))


@pytest.mark.parametrize("F,G", ONB_BATTERY)
def test_onb(F, G):
    rep = tq.verify_onb(tq.TorusQuiverSpec.of(F, G), samples=100, seed=0)
    assert rep.passed()
    assert rep.orth_defect < 1e-9 and rep.recon_defect < 1e-9


def test_onb_trivial_fiber_is_exact():
    rep = tq.verify_onb(tq.TorusQuiverSpec.of(1, 7), samples=20, seed=3)
    assert rep.orth_defect == 0.0 and rep.recon_defect == 0.0


def test_onb_quadratic_test_function():
    s = tq.TorusQuiverSpec.of(2, 3)
    rep = tq.verify_onb(s, samples=30, seed=1, battery=[((0,), (2,))])
    assert rep.recon_defect < 1e-9


def test_onb_detects_wrong_fiber():
    # a basis that is not orthonormal for this fibre: treat F=3 data with F=2 exponents
    s = tq.TorusQuiverSpec.of(3, 1)
    t = [0.2]
    u0, u3 = tq.basis_function((0,)), tq.basis_function((3,))
    assert abs(tq.inner_product(s, u0, u3, t)) > 0.5


def test_onb_report_json_is_deterministic():
    s = tq.TorusQuiverSpec.of(2, 3)
    a = tq.verify_onb(s, samples=10, seed=4).to_json()
    b = tq.verify_onb(s, samples=10, seed=4).to_json()
    assert a == b
    assert set(json.loads(a)) == {"orth_defect", "recon_defect", "samples", "seed"}
    with pytest.raises(DomainError):
        tq.verify_onb(s, samples=0)
