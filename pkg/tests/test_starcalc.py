import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from batteries import SPEC_BATTERY, random_word, word_battery
from oracles import naive_word_term
from tgquiver.numt import DomainError, IntMatrix
from tgquiver.starcalc import (
    GaussianRational,
    GeneratorWord,
    Letter,
    NormalTerm,
    ParseError,
    StarAlgebra,
    element_from_json,
    element_to_json,
    equals,
    expand_level,
    expectation,
    format_element,
    format_words,
    gauge_action,
    matrix_unit,
    normalize,
    parse_word,
    rho,
)
from tgquiver.starcalc.laurent import LaurentMatrix, exponents_in_row_lattice, from_matrix, level_labels, to_matrix
from tgquiver.starcalc.verify import random_level_element
from tgquiver.torquiver import TorusQuiverSpec

A21 = StarAlgebra(TorusQuiverSpec.of(2, 3))  # U^2 S = S U^3, S* U S = 0
A2 = StarAlgebra(TorusQuiverSpec.of([[2, 0], [0, 3]], [[1, 1], [0, 1]]))


def N(text, alg=A21):
    return normalize(alg, text)


# -- coefficients -----------------------------------------------------------


def test_gaussian_rational():
    z = GaussianRational.parse("3/4i")
    assert z == GaussianRational(0, GaussianRational.parse("3/4").re)
    assert GaussianRational.parse("i") * GaussianRational.parse("i") == -1
    assert (GaussianRational(1, 2) / GaussianRational(1, 2)) == 1
    assert GaussianRational(1, -1).conjugate() == GaussianRational(1, 1)
    assert not GaussianRational(0)


# -- parsing ------------------------------------------------------------------


def test_parse_examples():
    (w,) = parse_word("S* U1^2 S", 1)
    assert w.letters == (Letter("S*"), Letter("U", 1, 2), Letter("S"))
    words = parse_word("S S* + U1 S S* U1^-1", 1)
    assert len(words) == 2
    assert parse_word("U1*", 1)[0].letters == (Letter("U", 1, -1),)
    (w,) = parse_word("-1/2 S", 1)
    assert w.coeff == -GaussianRational.parse("1/2")
    (w,) = parse_word("3i", 1)
    assert w.coeff == GaussianRational(0, 3) and w.letters == ()


@pytest.mark.parametrize(
    "text,msg,pos",
    [
        ("U3 S", "index out of range", 0),
        ("S U1^0", "malformed exponent", 2),
        ("S 3", "coefficient must come first", 2),
        ("S + + S", "expected a term", 4),
        ("S +", "dangling operator", 2),
        ("", "empty input", 0),
        ("S X", "unknown token", 2),
        ("1/0 S", "zero denominator", 0),
    ],
)
def test_parse_errors(text, msg, pos):
    with pytest.raises(ParseError) as e:
        parse_word(text, 2)
    assert msg in e.value.message and e.value.position == pos


def test_parse_print_round_trip():
    for w in word_battery(2, 200, seed=7):
        text = format_words([w])
        back = parse_word(text, 2)
        assert equals(normalize(A2, back), normalize(A2, [w]))
        if w.letters and w.coeff.is_real():
            assert back == [w]


# -- normalize examples ----------------------------------------------------


def test_normalize_examples():
    assert equals(N("S* S"), A21.one())
    assert N("S* S").terms == {NormalTerm((), (0,), ()): 1}
    assert N("S* U1^2 S").terms == {NormalTerm((), (3,), ()): 1}
    assert format_element(N("S* U1^2 S")) == "U1^3"
    assert N("U1^-1 S").terms == {NormalTerm(((1,),), (-3,), ()): 1}
    assert equals(N("S S* + U1 S S* U1^-1"), A21.one())
    assert N("S S* + U1 S S* U1^-1").terms == A21.one().terms
    assert N("S* U1^3 S").is_zero()


def test_single_step_relations():
    # S* U S = 0 and U^2 S = S U^3 for F = 2, G = 3
    assert N("S* U1 S").is_zero()
    assert equals(N("U1^2 S"), N("S U1^3"))
    assert equals(N("U1* S"), N("U1 S U1^-3"))


def test_normalize_rejects_foreign_element():
    with pytest.raises(DomainError):
        normalize(A21, A2.one())


@pytest.mark.parametrize("spec", SPEC_BATTERY, ids=str)
def test_engine_agrees_with_naive_rewriter(spec):
    alg = StarAlgebra(spec)
    G = spec.G.tolist()
    for w in word_battery(spec.d, 300, seed=11):
        letters = [l.kind if l.kind != "U" else ("U", l.j, l.e) for l in w.letters]
        ref = naive_word_term(letters, spec.a, G)
        got = normalize(alg, GeneratorWord(GaussianRational(1), w.letters))
        if ref is None:
            assert got.is_zero()
        else:
            assert equals(got, alg.element({NormalTerm(*ref): 1}, canonical=False))


# -- algebra operations ------------------------------------------------------


def test_multiply_examples():
    S, Ss = A21.S(), A21.Sstar()
    assert (S * Ss).terms == {NormalTerm(((0,),), (0,), ((0,),)): 1}
    E01, E10 = matrix_unit(A21, [(0,)], [(1,)]), matrix_unit(A21, [(1,)], [(0,)])
    assert equals(E01 * E10, matrix_unit(A21, [(0,)], [(0,)]))
    assert equals(E01, N("S S* U1^-1"))
    t = N("U1^-1 S")
    assert equals(t.adjoint(), N("S* U1"))
    assert equals(t.adjoint().adjoint(), t)


def test_equals_examples():
    assert equals(N("S* S"), A21.one())
    x = N("S U1 S*")
    assert equals(expand_level(x, 2, 2), x)
    assert len(expand_level(x, 2, 2).terms) == 2
    assert not equals(N("S S*"), A21.one())
    assert N("S S*") != A21.one()


def test_expand_level_examples():
    one = expand_level(A21.one(), 1, 1)
    assert one.terms == {NormalTerm((n,), (0,), (n,)): 1 for n in [(0,), (1,)]}
    s = expand_level(A21.S(), 2, 1)
    assert equals(s, A21.S()) and all(t.shape == (2, 1) for t in s.terms)
    with pytest.raises(DomainError):
        expand_level(A21.S(), 1, 1)
    with pytest.raises(DomainError):
        expand_level(N("S S*"), 0, 0)


def test_expectation_examples():
    assert expectation(A21.S()).is_zero()
    x = N("S U1 S*")
    assert equals(expectation(x + A21.S()), x)
    assert equals(expectation(A21.one()), A21.one())


def test_gauge_action():
    z = GaussianRational(0, 1)
    assert equals(gauge_action(A21.S(), z), A21.S().scale(z))
    assert equals(gauge_action(A21.Sstar(), z), A21.Sstar().scale(z.conjugate()))
    x = N("S U1 S* + 2 U1")
    assert equals(gauge_action(x, z), x)


def test_matrix_unit_examples():
    total = sum((matrix_unit(A21, a, a) for a in level_labels(A21, 2)), A21.zero())
    assert len(level_labels(A21, 2)) == 4
    assert equals(total, A21.one())
    for a, b in itertools.product(level_labels(A21, 1), repeat=2):
        assert equals(matrix_unit(A21, a, b).adjoint(), matrix_unit(A21, b, a))
    with pytest.raises(DomainError):
        matrix_unit(A21, [(0,)], [])


def test_rho_examples():
    assert equals(rho(A21.one()), N("S S*"))
    E = matrix_unit(A21, [(1,)], [(0,)])
    assert equals(rho(E), matrix_unit(A21, [(0,), (1,)], [(0,), (0,)]))
    assert equals(rho(A21.U(1)), N("S U1 S*"))
    with pytest.raises(DomainError):
        rho(A21.S())


def test_json_round_trip():
    x = N("1/2 S U1 S* + 3i U1^-2 - S")
    text = element_to_json(x)
    assert list(json.loads(text)) == ["degree_terms"]
    assert equals(element_from_json(A21, text), x)
    assert element_to_json(element_from_json(A21, text).canonical()) == text
    bad = json.loads(text)
    bad["degree_terms"][0]["alpha"] = [[5]]
    with pytest.raises(DomainError):
        element_from_json(A21, json.dumps(bad))


def test_canonical_is_sorted_and_stable():
    x = N("S U1 S* + U1 S + 2")
    keys = [t.sort_key() for t, _ in x.sorted_terms()]
    assert keys == sorted(keys)
    assert format_element(x) == format_element(normalize(A21, format_element(x)))


# -- properties on the seeded battery ---------------------------------------


@pytest.mark.parametrize("spec", SPEC_BATTERY, ids=str)
def test_rewrite_properties(spec):
    alg = StarAlgebra(spec)
    words = word_battery(spec.d, 120, seed=3)
    xs = [normalize(alg, [w]) for w in words]
    for i, (w, x) in enumerate(zip(words, xs)):
        assert normalize(alg, x).terms == x.terms
        assert equals(normalize(alg, [w.adjoint()]), x.adjoint())
        w2 = words[(i + 1) % len(words)]
        cat = GeneratorWord(w.coeff * w2.coeff, w.letters + w2.letters)
        assert equals(normalize(alg, [cat]), x * xs[(i + 1) % len(xs)])
        y, z = xs[(i + 1) % len(xs)], xs[(i + 2) % len(xs)]
        assert equals((x * y) * z, x * (y * z))
        assert equals(x * (y + z), x * y + x * z)


@pytest.mark.parametrize("spec", SPEC_BATTERY[:3] + SPEC_BATTERY[6:8], ids=str)
def test_expectation_module_property(spec):
    alg = StarAlgebra(spec)
    rng = random.Random(9)
    for _ in range(20):
        x = normalize(alg, [random_word(spec.d, rng) for _ in range(3)])
        a = random_level_element(alg, rng.randint(0, 1), rng)
        b = random_level_element(alg, rng.randint(0, 1), rng)
        Ex = expectation(x)
        assert equals(expectation(Ex), Ex)
        assert equals(expectation(a * x * b), a * Ex * b)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.sampled_from(["S", "S*", "U1", "U1*", "U2", "U2^-2", "U1^3"]), max_size=8), st.integers(-3, 3))
def test_hypothesis_words(tokens, c):
    text = (f"{c} " if c else "") + " ".join(tokens)
    if not text.strip():
        return
    x = normalize(A2, text)
    assert normalize(A2, x).terms == x.terms
    adj = [w.adjoint() for w in parse_word(text, 2)]
    assert equals(normalize(A2, adj), x.adjoint())
    assert equals(gauge_action(gauge_action(x, GaussianRational(0, 1)), GaussianRational(0, -1)), x)


# -- Laurent-matrix picture -----------------------------------------------


def test_to_matrix_examples():
    M = to_matrix(N("U1^2 S S*"), 1)
    assert M.entries == {(((0,),), ((0,),)): {(3,): 1}}
    for k in range(3):
        labels = level_labels(A21, k)
        assert to_matrix(A21.one(), k) == LaurentMatrix.identity(labels, 1)
    E = matrix_unit(A21, [(0,), (1,)], [(1,), (1,)])
    assert to_matrix(E, 2).entries == {(((0,), (1,)), ((1,), (1,))): {(0,): 1}}
    with pytest.raises(DomainError, match="not in level-1 algebra"):
        to_matrix(A21.S(), 1)


@pytest.mark.parametrize("spec", SPEC_BATTERY[:2] + SPEC_BATTERY[6:8], ids=str)
def test_to_matrix_properties(spec):
    alg = StarAlgebra(spec)
    rng = random.Random(2)
    for k in (1, 2):
        if spec.N ** k > 36:
            continue
        for _ in range(4):
            x, y = random_level_element(alg, k, rng), random_level_element(alg, k, rng)
            Mx = to_matrix(x, k)
            assert to_matrix(x * y, k) == Mx @ to_matrix(y, k)
            assert equals(from_matrix(alg, Mx), x)


def test_w_subring_record():
    # U itself compresses to [[0, U^3], [1, 0]], inside the W-subring; S U S* does not
    G = IntMatrix.of([[3]])
    assert exponents_in_row_lattice(to_matrix(A21.U(1), 1), G, 1)
    assert not exponents_in_row_lattice(to_matrix(N("S U1 S*"), 1), G, 1)
    assert exponents_in_row_lattice(to_matrix(A21.one(), 1), G, 1)
