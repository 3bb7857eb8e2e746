"""Vector shapes, the proof/vector bijection, zero and inverse."""

import random
from fractions import Fraction

import pytest

from genlib import SCALARS
from lsodot.kernel import Scal, Star, Sum, alpha_eq, make_scalar
from lsodot.rewrite import convertible
from lsodot.syntax import parse_prop, parse_term
from lsodot.vectors import (VShape, decode, dim, encode, neg_proof, vshape,
                            zero_proof)


def shape(text, flavor=None):
    return vshape(parse_prop(text), flavor)


def test_dim_examples():
    assert dim(shape("unit")) == 1
    assert dim(shape("(unit & unit) & unit")) == 3
    from lsodot.quantum import qubit_shape
    assert dim(qubit_shape(3)) == 8


def test_flavor_validation():
    with pytest.raises(ValueError):
        vshape(parse_prop("unit & (unit @ unit)"))
    with pytest.raises(ValueError):
        vshape(parse_prop("unit -> unit"))
    assert vshape(parse_prop("unit")).flavor == "and"
    assert vshape(parse_prop("unit @ unit")).flavor == "sup"


def test_zero_proof():
    assert zero_proof(shape("unit")) == Star(make_scalar(0))
    assert zero_proof(shape("unit & unit")) == parse_term("<{0}.*, {0}.*>")
    s = shape("(unit & unit) & (unit & unit)")
    assert decode(zero_proof(s), s) == [Fraction(0)] * 4


def test_neg_proof():
    assert neg_proof(shape("unit"), Star(make_scalar(3))) == Star(make_scalar(-3))
    s = shape("unit & unit")
    assert neg_proof(s, parse_term("<{1}.*, {2}.*>")) == parse_term("<{-1}.*, {-2}.*>")


def test_neg_is_additive_inverse():
    s = shape("unit & (unit & unit)")
    t = encode([1, -2, Fraction(3, 4)], s)
    assert convertible(Sum(t, neg_proof(s, t)), zero_proof(s))


def test_encode_examples():
    assert encode([Fraction(5)], shape("unit")) == Star(make_scalar(5))
    assert encode([1, 2], shape("unit & unit")) == parse_term("<{1}.*, {2}.*>")
    assert encode([1, 2, 3], shape("unit & (unit & unit)")) == \
        parse_term("<{1}.*, <{2}.*, {3}.*>>")
    assert encode([1, 2], shape("unit @ unit")) == parse_term("[{1}.*, {2}.*]")


def test_encode_length_mismatch():
    with pytest.raises(ValueError):
        encode([1, 2, 3], shape("unit & unit"))


def test_decode_examples():
    s = shape("unit & unit")
    assert decode(parse_term("<{1}.*, {2}.*>"), s) == [Fraction(1), Fraction(2)]
    u, v = encode([1, 2], s), encode([3, 5], s)
    assert decode(Sum(u, v), s) == [Fraction(4), Fraction(7)]
    assert decode(Scal(make_scalar(3), u), s) == [Fraction(3), Fraction(6)]


def test_decode_wrong_shape():
    with pytest.raises(ValueError):
        decode(parse_term("<{1}.*, {2}.*>"), shape("unit @ unit", "sup"))


def test_bijection_both_flavors():
    rng = random.Random(40)
    for flavor in ("and", "sup"):
        for _ in range(250):
            s = VShape(_random_vprop(rng, rng.randint(1, 16), flavor), flavor)
            vec = [rng.choice(SCALARS) for _ in range(dim(s))]
            t = encode(vec, s)
            assert decode(t, s) == [make_scalar_like(v) for v in vec]
            # encode . decode is the alpha-identity on closed normal proofs
            assert alpha_eq(encode(decode(t, s), s), t)


def make_scalar_like(v):
    return v


def _random_vprop(rng, n, flavor):
    from lsodot.kernel import And, Sup, Top
    if n == 1:
        return Top()
    cut = rng.randint(1, n - 1)
    ctor = And if flavor == "and" else Sup
    return ctor(_random_vprop(rng, cut, flavor), _random_vprop(rng, n - cut, flavor))


def test_decode_normalizes_first():
    s = shape("unit & unit")
    t = parse_term("(\\x:unit&unit. x) (<{1}.*, {2}.*> + <{3}.*, {4}.*>)")
    assert decode(t, s) == [Fraction(4), Fraction(6)]
