"""Encoding vectors as closed proofs and reading them back.

A vector shape is a proposition whose leaves are all `unit`, combined with
either `&` throughout (the plain flavor) or `@` throughout (the
superposition flavor used by the qubit layer).  Closed normal proofs of a
shape of dimension n are in bijection with exact-scalar vectors of length n:
stars carry the entries, pairs carry the block structure.  Both flavors
share one implementation because sums and scalar products commute with the
two pair formers identically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .kernel import (And, Pair, Proposition, Scalar, Star, Sup, SupPair,
                     Term, Top, as_scalar)
from .rewrite import normalize
from .syntax import print_prop, print_term


@dataclass(frozen=True)
class VShape:
    """A vector-encodable proposition plus its pair flavor ("and" | "sup")."""
    prop: Proposition
    flavor: str

    def __post_init__(self):
        if self.flavor not in ("and", "sup"):
            raise ValueError(f"bad flavor {self.flavor!r}")
        if not _well_shaped(self.prop, And if self.flavor == "and" else Sup):
            raise ValueError(
                f"{print_prop(self.prop)} is not a {self.flavor}-shaped "
                "vector proposition")

    @property
    def parts(self) -> tuple["VShape", "VShape"]:
        p = self.prop
        assert isinstance(p, (And, Sup))
        return VShape(p.left, self.flavor), VShape(p.right, self.flavor)


def _well_shaped(p: Proposition, ctor) -> bool:
    if isinstance(p, Top):
        return True
    return (isinstance(p, ctor)
            and _well_shaped(p.left, ctor) and _well_shaped(p.right, ctor))


def vshape(prop: Proposition, flavor: Optional[str] = None) -> VShape:
    """Wrap a proposition as a vector shape, inferring the flavor when the
    connectives determine it (a bare unit defaults to the plain flavor)."""
    if flavor is None:
        flavor = _infer_flavor(prop)
    return VShape(prop, flavor)


def _infer_flavor(p: Proposition) -> str:
    if _contains(p, Sup):
        return "sup"
    return "and"


def _contains(p: Proposition, ctor) -> bool:
    if isinstance(p, ctor):
        return True
    if isinstance(p, (And, Sup)):
        return _contains(p.left, ctor) or _contains(p.right, ctor)
    return False


def dim(shape: VShape) -> int:
    """Number of unit leaves: d(unit) = 1, d(A op B) = d(A) + d(B)."""
    return _dim(shape.prop)


def _dim(p: Proposition) -> int:
    if isinstance(p, Top):
        return 1
    return _dim(p.left) + _dim(p.right)


def _pair(shape: VShape, left: Term, right: Term) -> Term:
    return Pair(left, right) if shape.flavor == "and" else SupPair(left, right)


def zero_proof(shape: VShape) -> Term:
    """The closed irreducible all-zeroes proof of the shape."""
    if isinstance(shape.prop, Top):
        return Star(as_scalar(0))
    a, b = shape.parts
    return _pair(shape, zero_proof(a), zero_proof(b))


def encode(u: Sequence[Scalar], shape: VShape) -> Term:
    """The closed irreducible proof carrying the entries of u."""
    u = [as_scalar(x) for x in u]
    n = dim(shape)
    if len(u) != n:
        raise ValueError(f"vector has {len(u)} entries, shape has dimension {n}")
    if isinstance(shape.prop, Top):
        return Star(u[0])
    a, b = shape.parts
    cut = dim(a)
    return _pair(shape, encode(u[:cut], a), encode(u[cut:], b))


def decode(t: Term, shape: VShape) -> list[Scalar]:
    """Entries of the closed proof t, normalizing first."""
    return _read(normalize(t), shape)


def _read(t: Term, shape: VShape) -> list[Scalar]:
    if isinstance(shape.prop, Top):
        if isinstance(t, Star):
            return [t.coeff]
        raise ValueError(f"expected a star at shape unit, got {print_term(t)}")
    want = Pair if shape.flavor == "and" else SupPair
    if not isinstance(t, want):
        raise ValueError(
            f"expected a {shape.flavor} pair at shape "
            f"{print_prop(shape.prop)}, got {print_term(t)}")
    a, b = shape.parts
    return _read(t.left, a) + _read(t.right, b)


def neg_proof(shape: VShape, t: Term) -> Term:
    """The additive inverse: normalize, then negate every star entry."""
    return _neg(normalize(t), shape)


def _neg(t: Term, shape: VShape) -> Term:
    if isinstance(shape.prop, Top):
        assert isinstance(t, Star), t
        return Star(-t.coeff)
    a, b = shape.parts
    return _pair(shape, _neg(t.left, a), _neg(t.right, b))
