from .algebra import (
    AlgebraElement,
    NormalTerm,
    StarAlgebra,
    add,
    adjoint,
    equals,
    expand_level,
    expectation,
    gauge_action,
    matrix_unit,
    multiply,
    rho,
    scale,
)
from .coeff import GaussianRational
from .words import (
    GeneratorWord,
    Letter,
    ParseError,
    element_from_json,
    element_to_json,
    format_element,
    format_words,
    normalize,
    parse_word,
)
