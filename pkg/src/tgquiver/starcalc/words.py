"""Text front end: generator words, their parser/printer, and ``normalize``.

Grammar (tokens separated by whitespace)::

    sum    := ['+' | '-'] term (('+' | '-') term)*
    term   := [coeff] letter*          (at least one of the two)
    letter := 'U<j>' | 'U<j>^<int>' | 'U<j>*' | 'S' | 'S*'
    coeff  := <int> | <int>/<int>, optionally followed by 'i'
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from ..numt import DomainError
from ..torquiver import TorusQuiverSpec
from .algebra import AlgebraElement, NormalTerm, StarAlgebra
from .coeff import ONE, GaussianRational


class ParseError(ValueError):
    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} at position {position}")
        self.message = message
        self.position = position


@dataclass(frozen=True)
class Letter:
    kind: str  # "U", "S" or "S*"
    j: int = 0
    e: int = 0

    def adjoint(self) -> "Letter":
        if self.kind == "U":
            return Letter("U", self.j, -self.e)
        return Letter("S*" if self.kind == "S" else "S")

    def __str__(self) -> str:
        if self.kind != "U":
            return self.kind
        return f"U{self.j}" if self.e == 1 else f"U{self.j}^{self.e}"


@dataclass(frozen=True)
class GeneratorWord:
    coeff: GaussianRational
    letters: tuple[Letter, ...]

    def adjoint(self) -> "GeneratorWord":
        return GeneratorWord(self.coeff.conjugate(), tuple(l.adjoint() for l in reversed(self.letters)))


WordSum = list[GeneratorWord]

_TOKEN = re.compile(
    r"""\s*(?:
        (?P<u>U(?P<j>\d+)(?:\^(?P<e>[-+]?\d+)|(?P<star>\*))?)
      | (?P<s>S\*?)
      | (?P<num>\d+(?:/\d+)?i?|i)
      | (?P<op>[+-])
    )""",
    re.VERBOSE,
)


def _tokens(text: str):
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            return
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unknown token {text[pos:].split()[0]!r}", pos)
        yield m, pos
        pos = m.end()


def parse_word(text: str, d: int) -> WordSum:
    """Parse a formal sum of generator words for an algebra with d unitaries."""
    words: WordSum = []
    sign = 1
    coeff: GaussianRational | None = None
    letters: list[Letter] = []
    last_op: int | None = None

    def has_term() -> bool:
        return coeff is not None or bool(letters)

    def close() -> None:
        nonlocal coeff, letters
        c = coeff if coeff is not None else ONE
        words.append(GeneratorWord(c * sign, tuple(letters)))
        coeff, letters = None, []

    for m, pos in _tokens(text):
        if m.group("op"):
            if has_term():
                close()
            elif last_op is not None or words:
                raise ParseError("expected a term", pos)
            sign = -1 if m.group("op") == "-" else 1
            last_op = pos
            continue
        last_op = None
        if m.group("num"):
            if has_term():
                raise ParseError("coefficient must come first in a term", pos)
            tok = m.group("num")
            if "/" in tok and int(tok.rstrip("i").split("/")[1]) == 0:
                raise ParseError("zero denominator", pos)
            coeff = GaussianRational.parse(tok)
        elif m.group("s"):
            letters.append(Letter(m.group("s")))
        else:
            j = int(m.group("j"))
            if not 1 <= j <= d:
                raise ParseError(f"index out of range: U{j} with d={d}", pos)
            if m.group("star"):
                e = -1
            elif m.group("e") is not None:
                e = int(m.group("e"))
                if e == 0:
                    raise ParseError("malformed exponent: U^0 is not a generator letter", pos)
            else:
                e = 1
            letters.append(Letter("U", j, e))
    if not has_term():
        if last_op is not None:
            raise ParseError("dangling operator", last_op)
        raise ParseError("empty input", len(text))
    close()
    return words


def format_coeff_word(coeff: GaussianRational, body: str, first: bool) -> list[str]:
    """Render c*body as one or two signed chunks (real and imaginary parts)."""
    chunks = []
    parts = [(coeff.re, "")] if not coeff.im else ([(coeff.re, "")] if coeff.re else []) + [(coeff.im, "i")]
    for value, unit in parts:
        neg = value < 0
        mag = abs(value)
        if mag == 1 and unit == "" and body:
            text = body
        else:
            text = f"{mag}{unit}" + (f" {body}" if body else "")
        if first and not chunks:
            chunks.append(f"- {text}" if neg else text)
        else:
            chunks.append(f"{'-' if neg else '+'} {text}")
    return chunks


def format_words(words: Sequence[GeneratorWord]) -> str:
    out: list[str] = []
    for w in words:
        out.extend(format_coeff_word(w.coeff, " ".join(str(l) for l in w.letters), first=not out))
    return " ".join(out) if out else "0"


# -- normal terms as text --------------------------------------------------


def _u_letters(nu: Sequence[int]) -> list[Letter]:
    return [Letter("U", j + 1, e) for j, e in enumerate(nu) if e]


def term_letters(t: NormalTerm) -> list[Letter]:
    """S_alpha U^nu S_beta* spelled with U_j, S, S*."""
    letters: list[Letter] = []
    for i in t.alpha:
        letters += _u_letters(i) + [Letter("S")]
    letters += _u_letters(t.nu)
    for i in reversed(t.beta):
        letters += [Letter("S*")] + _u_letters(tuple(-v for v in i))
    return letters


def element_words(x: AlgebraElement) -> list[GeneratorWord]:
    return [GeneratorWord(c, tuple(term_letters(t))) for t, c in x.sorted_terms()]


def format_element(x: AlgebraElement) -> str:
    return format_words(element_words(x))


def _frac(v: Fraction) -> str:
    return f"{v.numerator}/{v.denominator}"


def element_to_json(x: AlgebraElement) -> str:
    return json.dumps(
        {
            "degree_terms": [
                {
                    "alpha": [list(i) for i in t.alpha],
                    "nu": list(t.nu),
                    "beta": [list(i) for i in t.beta],
                    "re": _frac(c.re),
                    "im": _frac(c.im),
                }
                for t, c in x.sorted_terms()
            ]
        }
    )


def element_from_json(alg: StarAlgebra, text: str) -> AlgebraElement:
    data = json.loads(text)
    out = []
    for row in data["degree_terms"]:
        t = NormalTerm(tuple(tuple(i) for i in row["alpha"]), tuple(row["nu"]), tuple(tuple(i) for i in row["beta"]))
        alg.check_term(t)
        out.append((t, GaussianRational(Fraction(row["re"]), Fraction(row["im"]))))
    return alg.element(out, canonical=False)


# -- normalization ---------------------------------------------------------


def letter_term(alg: StarAlgebra, letter: Letter) -> NormalTerm:
    z = alg.zero_index
    if letter.kind == "S":
        return NormalTerm((z,), z, ())
    if letter.kind == "S*":
        return NormalTerm((), z, (z,))
    if not 1 <= letter.j <= alg.d:
        raise DomainError(f"U{letter.j} out of range for d={alg.d}")
    return NormalTerm((), tuple(letter.e if l == letter.j - 1 else 0 for l in range(alg.d)), ())


def evaluate_word(alg: StarAlgebra, word: GeneratorWord) -> NormalTerm | None:
    """Reduce a single word to one normal term (or zero).

    Letters are absorbed left to right into an accumulated normal term
    S_a U^nu S_b*.  Absorbing U^e moves it left through S_b* (adjoint push);
    absorbing S either cancels against the innermost S* of S_b* (S_i* S_j =
    delta) or, when S_b* is empty, is pushed past U^nu (U^nu S = S_r U^{qG}).
    Absorbing S* prepends to S_b*.  Each step consumes exactly one letter and
    does a bounded amount of work, so the number of unread letters is a
    strictly decreasing termination measure.
    """
    acc: NormalTerm | None = NormalTerm((), alg.zero_index, ())
    for letter in word.letters:
        acc = alg.term_product(acc, letter_term(alg, letter))
        if acc is None:
            return None
    return acc


def words_to_element(alg: StarAlgebra, words: Sequence[GeneratorWord], canonical: bool = True) -> AlgebraElement:
    acc = []
    for w in words:
        t = evaluate_word(alg, w)
        if t is not None:
            acc.append((t, w.coeff))
    return alg.element(acc, canonical=canonical)


Normalizable = Union[str, GeneratorWord, Sequence[GeneratorWord], AlgebraElement]


def normalize(spec_or_alg: TorusQuiverSpec | StarAlgebra, value: Normalizable) -> AlgebraElement:
    alg = spec_or_alg if isinstance(spec_or_alg, StarAlgebra) else StarAlgebra(spec_or_alg)
    if isinstance(value, AlgebraElement):
        if value.alg != alg:
            raise DomainError("element belongs to a different algebra")
        return value.canonical()
    if isinstance(value, str):
        value = parse_word(value, alg.d)
    if isinstance(value, GeneratorWord):
        value = [value]
    return words_to_element(alg, value)
