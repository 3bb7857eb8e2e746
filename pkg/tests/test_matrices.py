"""Matrix compilation against the direct-arithmetic oracle."""

import random
from fractions import Fraction

import pytest

from genlib import SCALARS
from lsodot.kernel import App, Scal, Sum, alpha_eq, make_scalar
from lsodot.matrices import (Matrix, apply_linear, compile_matrix, kron,
                             kron_vec, matvec)
from lsodot.rewrite import convertible, normalize
from lsodot.syntax import parse_prop, parse_term
from lsodot.vectors import VShape, encode, vshape


def shape(text):
    return vshape(parse_prop(text))


UNIT = shape("unit")
PAIR = shape("unit & unit")


def test_matrix_validation():
    with pytest.raises(ValueError):
        Matrix.from_rows([])
    with pytest.raises(ValueError):
        Matrix.from_rows([[1, 2], [3]])
    m = Matrix.from_rows([[1, 2, 3]])
    assert (m.rows, m.cols) == (1, 3)


def test_compile_one_by_one():
    t = compile_matrix(Matrix.from_rows([[Fraction(5)]]), UNIT, UNIT)
    assert alpha_eq(t, parse_term("\\x:unit. dtop(x, {5}.*)"))


def test_compile_two_by_two_is_the_textbook_term():
    m = Matrix.from_rows([["a" and 1, 3], [2, 4]])  # [[a,c],[b,d]] = [[1,3],[2,4]]
    t = compile_matrix(m, PAIR, PAIR)
    assert alpha_eq(t, parse_term(
        "\\x:unit&unit. dand1(x, y. dtop(y, <{1}.*, {2}.*>))"
        " + dand2(x, z. dtop(z, <{3}.*, {4}.*>))"))


def test_compile_uncontracted_form_is_convertible():
    # the raw inductive construction applies sub-proofs to the projections
    m = Matrix.from_rows([[1, 3], [2, 4]])
    compiled = compile_matrix(m, PAIR, PAIR)
    raw = parse_term(
        "\\x:unit&unit. dand1(x, y. (\\w:unit. dtop(w, <{1}.*, {2}.*>)) y)"
        " + dand2(x, z. (\\w:unit. dtop(w, <{3}.*, {4}.*>)) z)")
    u = [Fraction(9), Fraction(-2)]
    assert convertible(App(compiled, encode(u, PAIR)), App(raw, encode(u, PAIR)))


def test_apply_identity():
    t = compile_matrix(Matrix.identity(2), PAIR, PAIR)
    assert apply_linear(t, [5, 7], PAIR, PAIR) == [Fraction(5), Fraction(7)]


def test_apply_two_by_two_formula():
    a, b, c, d, e, f = (Fraction(x) for x in (2, -3, 5, 7, 11, -13))
    t = compile_matrix(Matrix.from_rows([[a, c], [b, d]]), PAIR, PAIR)
    assert apply_linear(t, [e, f], PAIR, PAIR) == [a * e + c * f, b * e + d * f]


def test_apply_zero_vector():
    rng = random.Random(3)
    for _ in range(10):
        rows = rng.randint(1, 4)
        cols = rng.randint(1, 4)
        m = Matrix.from_rows([[rng.choice(SCALARS) for _ in range(cols)]
                              for _ in range(rows)])
        a, b = _shapes(rng, cols, rows)
        t = compile_matrix(m, a, b)
        assert apply_linear(t, [0] * cols, a, b) == [make_scalar(0)] * rows


def test_apply_is_additive_and_homogeneous():
    rng = random.Random(17)
    for _ in range(15):
        cols, rows = rng.randint(1, 4), rng.randint(1, 4)
        m = Matrix.from_rows([[rng.choice(SCALARS) for _ in range(cols)]
                              for _ in range(rows)])
        a, b = _shapes(rng, cols, rows)
        t = compile_matrix(m, a, b)
        u = [rng.choice(SCALARS) for _ in range(cols)]
        v = [rng.choice(SCALARS) for _ in range(cols)]
        c = rng.choice(SCALARS)
        eu, ev = encode(u, a), encode(v, a)
        assert convertible(App(t, Sum(eu, ev)), Sum(App(t, eu), App(t, ev)))
        assert convertible(App(t, Scal(c, eu)), Scal(c, App(t, eu)))


def _shapes(rng, cols, rows):
    from lsodot.kernel import And, Top

    def build(n):
        if n == 1:
            return Top()
        cut = rng.randint(1, n - 1)
        return And(build(cut), build(n - cut))

    return VShape(build(cols), "and"), VShape(build(rows), "and")


def test_oracle_equivalence_random_matrices():
    rng = random.Random(2024)
    for _ in range(25):
        cols, rows = rng.randint(1, 8), rng.randint(1, 8)
        m = Matrix.from_rows([[rng.choice(SCALARS) for _ in range(cols)]
                              for _ in range(rows)])
        a, b = _shapes(rng, cols, rows)
        t = compile_matrix(m, a, b)
        for _ in range(8):
            u = [rng.choice(SCALARS) for _ in range(cols)]
            assert apply_linear(t, u, a, b) == matvec(m, u)


def test_non_vector_codomain_counterexample():
    # \x. \y. (y x) : unit -> (unit -> unit) -> unit is not linear
    t = parse_term("\\x:unit. \\y:unit->unit. y x")
    lhs = normalize(App(t, parse_term("{1}.* + {2}.*")))
    rhs = normalize(Sum(App(t, parse_term("{1}.*")), App(t, parse_term("{2}.*"))))
    assert alpha_eq(lhs, parse_term("\\y:unit->unit. y {3}.*"))
    assert alpha_eq(rhs, parse_term("\\y:unit->unit. (y {1}.*) + (y {2}.*)"))
    assert not alpha_eq(lhs, rhs)


def test_dimension_mismatch_rejected():
    with pytest.raises(ValueError):
        compile_matrix(Matrix.identity(2), UNIT, PAIR)


def test_kron_oracles():
    assert kron_vec([1, 0], [0, 1]) == [Fraction(0), Fraction(1),
                                        Fraction(0), Fraction(0)]
    h = Matrix.from_rows([[1, 1], [1, -1]])
    hh = kron(h, h)
    assert hh.rows == 4 and hh.cols == 4
    assert matvec(hh, [1, 0, 0, 0]) == [Fraction(1)] * 4
