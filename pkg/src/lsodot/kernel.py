"""Core data types of the calculus: scalars, propositions, proof terms, contexts.

Everything here is immutable and pure.  Scalars are exact (no floats): plain
rationals are `fractions.Fraction`, Gaussian rationals (re + im*i with exact
rational parts) are `GaussianRational`.  Arithmetic results with a zero
imaginary part collapse back to `Fraction` so scalar equality is canonical.

Terms are identified up to alpha-equivalence; `alpha_eq` compares canonical
nameless forms.  Binder annotations (the domain on lambdas, the absent
disjunct on injections, the result type on void-eliminations) are part of the
syntax so that type synthesis is unique and decidable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Mapping, Optional, Union

# ---------------------------------------------------------------------------
# Scalars

class GaussianRational:
    """Exact complex scalar re + im*i with Fraction parts, im != 0.

    Purely real values are represented as plain Fraction (see `make_scalar`);
    the constructor enforces this so equality stays canonical.
    """

    __slots__ = ("re", "im")

    def __init__(self, re: Fraction, im: Fraction):
        if im == 0:
            raise ValueError("purely real scalars must be Fraction, not GaussianRational")
        object.__setattr__(self, "re", Fraction(re))
        object.__setattr__(self, "im", Fraction(im))

    def __setattr__(self, name, value):
        raise AttributeError("GaussianRational is immutable")

    def __repr__(self) -> str:
        return f"GaussianRational({self.re!r}, {self.im!r})"

    def __eq__(self, other) -> bool:
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return False  # im != 0 by construction
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.re, self.im))

    def __bool__(self) -> bool:
        return True

    def __neg__(self) -> "Scalar":
        return make_scalar(-self.re, -self.im)

    def __add__(self, other) -> "Scalar":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return make_scalar(self.re + o[0], self.im + o[1])

    __radd__ = __add__

    def __sub__(self, other) -> "Scalar":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return make_scalar(self.re - o[0], self.im - o[1])

    def __rsub__(self, other) -> "Scalar":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return make_scalar(o[0] - self.re, o[1] - self.im)

    def __mul__(self, other) -> "Scalar":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        return make_scalar(self.re * o[0] - self.im * o[1],
                           self.re * o[1] + self.im * o[0])

    __rmul__ = __mul__

    def __truediv__(self, other) -> "Scalar":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        d = o[0] * o[0] + o[1] * o[1]
        if d == 0:
            raise ZeroDivisionError("scalar division by zero")
        return make_scalar((self.re * o[0] + self.im * o[1]) / d,
                           (self.im * o[0] - self.re * o[1]) / d)

    def __rtruediv__(self, other) -> "Scalar":
        o = _coerce(other)
        if o is None:
            return NotImplemented
        d = self.re * self.re + self.im * self.im
        return make_scalar((o[0] * self.re + o[1] * self.im) / d,
                           (o[1] * self.re - o[0] * self.im) / d)


Scalar = Union[Fraction, GaussianRational]


def _coerce(x) -> Optional[tuple[Fraction, Fraction]]:
    if isinstance(x, GaussianRational):
        return (x.re, x.im)
    if isinstance(x, (int, Fraction)):
        return (Fraction(x), Fraction(0))
    return None


def make_scalar(re, im=0) -> Scalar:
    """Build a canonical scalar: Fraction when the imaginary part is zero."""
    re, im = Fraction(re), Fraction(im)
    if im == 0:
        return re
    return GaussianRational(re, im)


def as_scalar(x) -> Scalar:
    """Coerce ints/Fractions to canonical scalar values."""
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    raise TypeError(f"not a scalar: {x!r}")


def norm_sq(a: Scalar) -> Fraction:
    """Norm-square map: a*a for rationals, re^2 + im^2 for Gaussian rationals."""
    if isinstance(a, GaussianRational):
        return a.re * a.re + a.im * a.im
    return Fraction(a) * Fraction(a)


# ---------------------------------------------------------------------------
# Propositions

@dataclass(frozen=True, slots=True)
class Top:
    pass


@dataclass(frozen=True, slots=True)
class Bot:
    pass


@dataclass(frozen=True, slots=True)
class Imp:
    dom: "Proposition"
    cod: "Proposition"


@dataclass(frozen=True, slots=True)
class And:
    left: "Proposition"
    right: "Proposition"


@dataclass(frozen=True, slots=True)
class Or:
    left: "Proposition"
    right: "Proposition"


@dataclass(frozen=True, slots=True)
class Sup:
    left: "Proposition"
    right: "Proposition"


Proposition = Union[Top, Bot, Imp, And, Or, Sup]

TOP = Top()
BOT = Bot()


# ---------------------------------------------------------------------------
# Source spans (attached by the parser; ignored by equality)

@dataclass(frozen=True, slots=True)
class SourceSpan:
    start: int
    end: int
    line: int
    col: int

    def __post_init__(self):
        if self.start > self.end:
            raise ValueError("span start after end")


def _span_field():
    return field(default=None, compare=False, repr=False)


# ---------------------------------------------------------------------------
# Terms

@dataclass(frozen=True, slots=True)
class Var:
    name: str
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class Sum:
    left: "Term"
    right: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class Scal:
    coeff: Scalar
    body: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class Star:
    coeff: Scalar
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class DTop:
    scrut: "Term"
    body: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class DBot:
    result: Proposition
    scrut: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class Lam:
    var: str
    dom: Proposition
    body: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class App:
    fn: "Term"
    arg: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class Pair:
    left: "Term"
    right: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class DAnd1:
    scrut: "Term"
    var: str
    body: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class DAnd2:
    scrut: "Term"
    var: str
    body: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class Inl:
    other: Proposition  # the absent right disjunct
    body: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class Inr:
    other: Proposition  # the absent left disjunct
    body: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class DOr:
    scrut: "Term"
    lvar: str
    lbody: "Term"
    rvar: str
    rbody: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class SupPair:
    left: "Term"
    right: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class DSup1:
    scrut: "Term"
    var: str
    body: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class DSup2:
    scrut: "Term"
    var: str
    body: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class DSup:
    scrut: "Term"
    lvar: str
    lbody: "Term"
    rvar: str
    rbody: "Term"
    span: Optional[SourceSpan] = _span_field()


@dataclass(frozen=True, slots=True)
class Tensor:
    left: "Term"
    right: "Term"
    span: Optional[SourceSpan] = _span_field()


Term = Union[Var, Sum, Scal, Star, DTop, DBot, Lam, App, Pair, DAnd1, DAnd2,
             Inl, Inr, DOr, SupPair, DSup1, DSup2, DSup, Tensor]

# Linear contexts are plain finite maps; exchange is implicit in dict order.
Context = Mapping[str, Proposition]

# One-binder eliminations share traversal logic.
_UNARY_BRANCH = (DAnd1, DAnd2, DSup1, DSup2)
_BINARY_BRANCH = (DOr, DSup)
_PLAIN_PAIRS = (Sum, DTop, App, Pair, SupPair, Tensor)


def children(t: Term) -> tuple[Term, ...]:
    """Immediate subterms in left-to-right order (bodies after scrutinees)."""
    if isinstance(t, (Var, Star)):
        return ()
    if isinstance(t, _PLAIN_PAIRS):
        a, b = _pair_parts(t)
        return (a, b)
    if isinstance(t, Scal):
        return (t.body,)
    if isinstance(t, DBot):
        return (t.scrut,)
    if isinstance(t, Lam):
        return (t.body,)
    if isinstance(t, _UNARY_BRANCH):
        return (t.scrut, t.body)
    if isinstance(t, (Inl, Inr)):
        return (t.body,)
    if isinstance(t, _BINARY_BRANCH):
        return (t.scrut, t.lbody, t.rbody)
    raise TypeError(f"not a term: {t!r}")


def _pair_parts(t) -> tuple[Term, Term]:
    if isinstance(t, DTop):
        return (t.scrut, t.body)
    if isinstance(t, App):
        return (t.fn, t.arg)
    return (t.left, t.right)


def with_children(t: Term, new: tuple[Term, ...]) -> Term:
    """Rebuild t with its subterms replaced (binder names/annotations kept)."""
    if isinstance(t, (Var, Star)):
        return t
    if isinstance(t, Sum):
        return Sum(new[0], new[1])
    if isinstance(t, Scal):
        return Scal(t.coeff, new[0])
    if isinstance(t, DTop):
        return DTop(new[0], new[1])
    if isinstance(t, DBot):
        return DBot(t.result, new[0])
    if isinstance(t, Lam):
        return Lam(t.var, t.dom, new[0])
    if isinstance(t, App):
        return App(new[0], new[1])
    if isinstance(t, Pair):
        return Pair(new[0], new[1])
    if isinstance(t, DAnd1):
        return DAnd1(new[0], t.var, new[1])
    if isinstance(t, DAnd2):
        return DAnd2(new[0], t.var, new[1])
    if isinstance(t, Inl):
        return Inl(t.other, new[0])
    if isinstance(t, Inr):
        return Inr(t.other, new[0])
    if isinstance(t, DOr):
        return DOr(new[0], t.lvar, new[1], t.rvar, new[2])
    if isinstance(t, SupPair):
        return SupPair(new[0], new[1])
    if isinstance(t, DSup1):
        return DSup1(new[0], t.var, new[1])
    if isinstance(t, DSup2):
        return DSup2(new[0], t.var, new[1])
    if isinstance(t, DSup):
        return DSup(new[0], t.lvar, new[1], t.rvar, new[2])
    if isinstance(t, Tensor):
        return Tensor(new[0], new[1])
    raise TypeError(f"not a term: {t!r}")


def binder_of_child(t: Term, i: int) -> Optional[str]:
    """Name bound around child i, or None.  Child order as in `children`."""
    if isinstance(t, Lam) and i == 0:
        return t.var
    if isinstance(t, _UNARY_BRANCH) and i == 1:
        return t.var
    if isinstance(t, _BINARY_BRANCH):
        if i == 1:
            return t.lvar
        if i == 2:
            return t.rvar
    return None


def subterm_at(t: Term, path: tuple[int, ...]) -> Term:
    for i in path:
        kids = children(t)
        if i < 0 or i >= len(kids):
            raise IndexError(f"path {path} invalid at {t!r}")
        t = kids[i]
    return t


def replace_at(t: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    i = path[0]
    kids = list(children(t))
    if i < 0 or i >= len(kids):
        raise IndexError(f"path {path} invalid at {t!r}")
    kids[i] = replace_at(kids[i], path[1:], new)
    return with_children(t, tuple(kids))


def positions(t: Term) -> Iterator[tuple[tuple[int, ...], Term]]:
    """Pre-order (path, subterm) pairs, leftmost-outermost order."""
    stack = [((), t)]
    while stack:
        path, node = stack.pop()
        yield path, node
        kids = children(node)
        for i in range(len(kids) - 1, -1, -1):
            stack.append((path + (i,), kids[i]))


# ---------------------------------------------------------------------------
# Free variables, substitution, alpha-equivalence

def free_vars(t: Term) -> frozenset[str]:
    if isinstance(t, Var):
        return frozenset((t.name,))
    if isinstance(t, Star):
        return frozenset()
    acc: set[str] = set()
    for i, child in enumerate(children(t)):
        fv = free_vars(child)
        b = binder_of_child(t, i)
        if b is not None:
            fv = fv - {b}
        acc |= fv
    return frozenset(acc)


def fresh_name(base: str, avoid) -> str:
    """A name not in `avoid`, derived from base by appending primes."""
    name = base
    while name in avoid:
        name += "'"
    return name


def substitute(t: Term, x: str, u: Term) -> Term:
    """Capture-avoiding substitution of u for the free variable x in t."""
    return _subst(t, x, u, free_vars(u))


def _subst(t: Term, x: str, u: Term, fv_u: frozenset[str]) -> Term:
    if isinstance(t, Var):
        return u if t.name == x else t
    if isinstance(t, Star):
        return t
    if x not in free_vars(t):
        return t
    kids = list(children(t))
    renames: dict[int, tuple[str, str]] = {}
    for i, child in enumerate(kids):
        b = binder_of_child(t, i)
        if b is None:
            kids[i] = _subst(child, x, u, fv_u)
        elif b == x:
            pass  # shadowed: x is not free in this child
        else:
            body = child
            if b in fv_u and x in free_vars(body):
                nb = fresh_name(b, fv_u | free_vars(body) | {x})
                body = _subst(body, b, Var(nb), frozenset((nb,)))
                renames[i] = (b, nb)
            kids[i] = _subst(body, x, u, fv_u)
    out = with_children(t, tuple(kids))
    for i, (_, nb) in renames.items():
        out = _rebind(out, i, nb)
    return out


def _rebind(t: Term, i: int, name: str) -> Term:
    if isinstance(t, Lam):
        return Lam(name, t.dom, t.body)
    if isinstance(t, DAnd1):
        return DAnd1(t.scrut, name, t.body)
    if isinstance(t, DAnd2):
        return DAnd2(t.scrut, name, t.body)
    if isinstance(t, DSup1):
        return DSup1(t.scrut, name, t.body)
    if isinstance(t, DSup2):
        return DSup2(t.scrut, name, t.body)
    if isinstance(t, DOr):
        return DOr(t.scrut, name if i == 1 else t.lvar, t.lbody,
                   name if i == 2 else t.rvar, t.rbody)
    if isinstance(t, DSup):
        return DSup(t.scrut, name if i == 1 else t.lvar, t.lbody,
                    name if i == 2 else t.rvar, t.rbody)
    raise TypeError(f"no binder at child {i} of {t!r}")


def _nameless(t: Term, env: dict[str, int], depth: int):
    # Canonical de-Bruijn-level form used for alpha-equality and hashing.
    if isinstance(t, Var):
        lvl = env.get(t.name)
        return ("b", lvl) if lvl is not None else ("f", t.name)
    if isinstance(t, Star):
        return ("star", t.coeff)
    tag = type(t).__name__
    parts = [tag]
    if isinstance(t, Scal):
        parts.append(t.coeff)
    if isinstance(t, DBot):
        parts.append(t.result)
    if isinstance(t, Lam):
        parts.append(t.dom)
    if isinstance(t, (Inl, Inr)):
        parts.append(t.other)
    for i, child in enumerate(children(t)):
        b = binder_of_child(t, i)
        if b is None:
            parts.append(_nameless(child, env, depth))
        else:
            parts.append(_nameless(child, {**env, b: depth}, depth + 1))
    return tuple(parts)


def alpha_key(t: Term):
    """Hashable canonical form; equal keys iff alpha-equal terms."""
    return _nameless(t, {}, 0)


def alpha_eq(t: Term, u: Term) -> bool:
    return alpha_key(t) == alpha_key(u)


def term_size(t: Term) -> int:
    return 1 + sum(term_size(c) for c in children(t))
