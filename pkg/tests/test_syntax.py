"""Parser/printer round trips, grammar corners, matrix files."""

import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from genlib import random_term
from lsodot.kernel import (DTop, Imp, Lam, Scal, Star, Sum, Top, Var,
                           alpha_eq, make_scalar)
from lsodot.syntax import (ParseError, parse_matrix_rows, parse_prop,
                           parse_scalar, parse_term, parse_vector, print_prop,
                           print_scalar, print_term)


def test_parse_star():
    assert parse_term("{2}.*") == Star(make_scalar(2))


def test_parse_lambda():
    assert parse_term("\\x:unit. x") == Lam("x", Top(), Var("x"))


def test_parse_dtop():
    t = parse_term("dtop({2}.*, {3}.*)")
    assert t == DTop(Star(make_scalar(2)), Star(make_scalar(3)))


def test_print_star_fraction():
    assert print_term(Star(make_scalar(Fraction(1, 2)))) == "{1/2}.*"


def test_print_sum():
    t = Sum(Star(make_scalar(1)), Star(make_scalar(2)))
    assert print_term(t) == "{1}.* + {2}.*"


def test_scalar_literals_round_trip():
    for text in ("0", "7", "-3", "5/4", "-5/4", "2i", "-1/3i", "1+2i", "1+-2i"):
        val = parse_scalar(text)
        assert parse_scalar(print_scalar(val)) == val


def test_scalar_rejects_garbage():
    for bad in ("", "1.5", "i", "1+", "2+2", "1/0", "--3"):
        with pytest.raises(ParseError) as err:
            parse_scalar(bad)
        assert err.value.span is not None


@settings(max_examples=1000, deadline=None)
@given(st.integers(0, 2 ** 32 - 1))
def test_round_trip_random_terms(seed):
    rng = random.Random(seed)
    t = random_term(rng, 4)
    back = parse_term(print_term(t), allow_tensor=True)
    assert alpha_eq(back, t), print_term(t)


def test_prop_precedence():
    p = parse_prop("unit -> unit & void -> unit")
    # -> is right associative and lowest
    assert p == Imp(Top(), parse_prop("unit & void -> unit"))
    assert print_prop(parse_prop("(unit -> unit) -> unit")) == \
        "(unit -> unit) -> unit"
    assert parse_prop("unit & unit | unit") == \
        parse_prop("(unit & unit) | unit")


def test_application_is_left_associative_and_tight():
    t = parse_term("f x + g y")
    assert isinstance(t, Sum)
    t2 = parse_term("{2}*f x")
    assert isinstance(t2, Scal)  # the prefix scales the whole application


def test_scalar_prefix_nests_right():
    t = parse_term("{2}*{3}*x")
    assert t == Scal(make_scalar(2), Scal(make_scalar(3), Var("x")))


def test_tensor_gate():
    with pytest.raises(ParseError):
        parse_term("x >< y")
    from lsodot.kernel import Tensor
    assert parse_term("x >< y", allow_tensor=True) == Tensor(Var("x"), Var("y"))


def test_every_rejection_carries_span():
    bad_inputs = ("", "dtop({2}.*", "\\x unit. x", "<a, b", "{1/0}.*",
                  "x + + y", "inl(x)", "dor(x, y. z)", ")", "{2}.* {")
    for text in bad_inputs:
        with pytest.raises(ParseError) as err:
            parse_term(text)
        span = err.value.span
        assert span is not None and span.start <= span.end


def test_parse_error_location_points_at_offender():
    with pytest.raises(ParseError) as err:
        parse_term("dtop({2}.*, {3}.*) +\n dtop({4}.*")
    assert err.value.span.line == 2


def test_spans_attached_to_parsed_terms():
    t = parse_term("dtop({2}.*, {3}.*)")
    assert t.span is not None and t.span.start == 0
    assert t.scrut.span is not None and t.scrut.span.line == 1


def test_matrix_identity():
    rows = parse_matrix_rows("1 0\n0 1")
    assert rows == [[Fraction(1), Fraction(0)], [Fraction(0), Fraction(1)]]


def test_matrix_hadamard():
    rows = parse_matrix_rows("1 1\n1 -1")
    assert rows[1][1] == Fraction(-1)


def test_matrix_ragged_rejected():
    with pytest.raises(ParseError, match="ragged"):
        parse_matrix_rows("1/2 3\n4 5 6")


def test_matrix_empty_rejected():
    with pytest.raises(ParseError, match="empty"):
        parse_matrix_rows("\n  \n")


def test_matrix_crlf_accepted():
    assert parse_matrix_rows("1 0\r\n0 1\r\n") == parse_matrix_rows("1 0\n0 1")


def test_vector_file():
    assert parse_vector("1\n-2/3\n\n4i\n") == \
        [Fraction(1), Fraction(-2, 3), make_scalar(0, 4)]


def test_crlf_term_input():
    t = parse_term("dtop({2}.*,\r\n {3}.*)")
    assert t == parse_term("dtop({2}.*, {3}.*)")
