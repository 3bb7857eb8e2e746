"""Linear type synthesis with one-pass context-splitting.

Instead of guessing the declarative context splits, synthesis computes for
every subterm the pair (used, slack): the minimal set of variables the
subterm consumes, and whether it contains a position able to absorb extra
variables.  Absorbing positions are the premise-free weakening of the
void-elimination, and the two zero-scalar forms `{0}.*` and `{0}*t` (the
zero coefficient annihilates whatever the absorbed resources would carry;
without this the measurement operator of the superposition layer, whose
branches pair a variable with a closed zero proof, would not type-check).

Rule summary:
  - additive nodes (sum, pair, sup pair, the two branches of a disjunction
    or sup elimination) must consume the same set, up to absorption;
  - multiplicative nodes (the eliminations and application) split the
    context, so their sides must consume disjoint sets;
  - every bound variable must be consumed by its body, or absorbed.

`derive` resolves the absorptions into an explicit derivation tree whose
every node can be re-verified independently against the deduction rules.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .kernel import (And, App, Bot, Context, DAnd1, DAnd2, DBot, DOr, DSup,
                     DSup1, DSup2, DTop, Imp, Inl, Inr, Lam, Or, Pair,
                     Proposition, Scal, SourceSpan, Star, Sum, Sup, SupPair,
                     Tensor, Term, Top, Var)
from .syntax import print_prop

ERROR_KINDS = ("unbound-var", "reused-var", "unused-var", "context-mismatch",
               "connective-mismatch", "star-in-nonempty-context",
               "annotation-mismatch")


class TypeCheckError(Exception):
    """Typing rejection with a closed error kind and an optional source span."""

    def __init__(self, kind: str, message: str, span: Optional[SourceSpan] = None):
        assert kind in ERROR_KINDS, kind
        self.kind = kind
        self.message = message
        self.span = span
        loc = f" at line {span.line}, column {span.col}" if span else ""
        super().__init__(f"[{kind}] {message}{loc}")


@dataclass(frozen=True)
class Usage:
    """Variables consumed exactly once, plus the absorption flag."""
    used: frozenset[str]
    slack: bool


_EMPTY = frozenset()


def synthesize(ctx: Context, t: Term) -> tuple[Proposition, Usage]:
    """Unique type of t under ctx, with its usage report.

    Unused context entries are not an error here: the judgment holds for the
    restriction of ctx to the used set (extended by absorbable variables when
    slack is set).  Binders, additive joins, and multiplicative splits raise
    `TypeCheckError` when linearity is violated.
    """
    if isinstance(t, Var):
        prop = ctx.get(t.name)
        if prop is None:
            raise TypeCheckError("unbound-var", f"unbound variable {t.name!r}", t.span)
        return prop, Usage(frozenset((t.name,)), False)

    if isinstance(t, Star):
        return Top(), Usage(_EMPTY, t.coeff == 0)

    if isinstance(t, Sum):
        lp, lu = synthesize(ctx, t.left)
        rp, ru = synthesize(ctx, t.right)
        if lp != rp:
            raise TypeCheckError(
                "connective-mismatch",
                f"sum of proofs of different propositions: "
                f"{print_prop(lp)} vs {print_prop(rp)}", t.span)
        return lp, _join_additive(lu, ru, t, "the two sides of a sum")

    if isinstance(t, Scal):
        prop, usage = synthesize(ctx, t.body)
        if t.coeff == 0:
            return prop, Usage(usage.used, True)
        return prop, usage

    if isinstance(t, DTop):
        sp, su = synthesize(ctx, t.scrut)
        if not isinstance(sp, Top):
            raise TypeCheckError(
                "connective-mismatch",
                f"unit elimination scrutinee has type {print_prop(sp)}", t.span)
        bp, bu = synthesize(ctx, t.body)
        return bp, _join_mult(su, bu, t)

    if isinstance(t, DBot):
        sp, su = synthesize(ctx, t.scrut)
        if not isinstance(sp, Bot):
            raise TypeCheckError(
                "connective-mismatch",
                f"void elimination scrutinee has type {print_prop(sp)}", t.span)
        return t.result, Usage(su.used, True)

    if isinstance(t, Lam):
        bp, bu = synthesize({**ctx, t.var: t.dom}, t.body)
        return Imp(t.dom, bp), _consume(t.var, bu, t.body, t.span)

    if isinstance(t, App):
        fp, fu = synthesize(ctx, t.fn)
        if not isinstance(fp, Imp):
            raise TypeCheckError(
                "connective-mismatch",
                f"applied term has type {print_prop(fp)}, not an implication", t.span)
        ap, au = synthesize(ctx, t.arg)
        if ap != fp.dom:
            raise TypeCheckError(
                "connective-mismatch",
                f"argument has type {print_prop(ap)}, "
                f"function expects {print_prop(fp.dom)}", t.span)
        return fp.cod, _join_mult(fu, au, t)

    if isinstance(t, (Pair, SupPair)):
        lp, lu = synthesize(ctx, t.left)
        rp, ru = synthesize(ctx, t.right)
        usage = _join_additive(lu, ru, t, "the two components of a pair")
        ctor = And if isinstance(t, Pair) else Sup
        return ctor(lp, rp), usage

    if isinstance(t, (DAnd1, DAnd2, DSup1, DSup2)):
        want = And if isinstance(t, (DAnd1, DAnd2)) else Sup
        sp, su = synthesize(ctx, t.scrut)
        if not isinstance(sp, want):
            raise TypeCheckError(
                "connective-mismatch",
                f"projection scrutinee has type {print_prop(sp)}", t.span)
        hyp = sp.left if isinstance(t, (DAnd1, DSup1)) else sp.right
        bp, bu = synthesize({**ctx, t.var: hyp}, t.body)
        bu = _consume(t.var, bu, t.body, t.span)
        return bp, _join_mult(su, bu, t)

    if isinstance(t, Inl):
        bp, bu = synthesize(ctx, t.body)
        return Or(bp, t.other), bu

    if isinstance(t, Inr):
        bp, bu = synthesize(ctx, t.body)
        return Or(t.other, bp), bu

    if isinstance(t, (DOr, DSup)):
        want = Or if isinstance(t, DOr) else Sup
        sp, su = synthesize(ctx, t.scrut)
        if not isinstance(sp, want):
            raise TypeCheckError(
                "connective-mismatch",
                f"case scrutinee has type {print_prop(sp)}", t.span)
        lp, lu = synthesize({**ctx, t.lvar: sp.left}, t.lbody)
        lu = _consume(t.lvar, lu, t.lbody, t.span)
        rp, ru = synthesize({**ctx, t.rvar: sp.right}, t.rbody)
        ru = _consume(t.rvar, ru, t.rbody, t.span)
        if lp != rp:
            raise TypeCheckError(
                "connective-mismatch",
                f"case branches have different types: "
                f"{print_prop(lp)} vs {print_prop(rp)}", t.span)
        branches = _join_additive(lu, ru, t, "the two branches of a case")
        return lp, _join_mult(su, branches, t)

    if isinstance(t, Tensor):
        lp, lu = synthesize(ctx, t.left)
        rp, ru = synthesize(ctx, t.right)
        for p in (lp, rp):
            if not is_sup_shape(p):
                raise TypeCheckError(
                    "connective-mismatch",
                    f"tensor operand has type {print_prop(p)}, "
                    "not a sup-shaped proposition", t.span)
        return tensor_prop(lp, rp), _join_mult(lu, ru, t)

    raise TypeError(f"not a term: {t!r}")


def _join_additive(lu: Usage, ru: Usage, t: Term, what: str) -> Usage:
    ok = (ru.used <= lu.used or lu.slack) and (lu.used <= ru.used or ru.slack)
    if not ok:
        raise TypeCheckError(
            "context-mismatch",
            f"{what} must consume the same variables: "
            f"{_set_str(lu.used)} vs {_set_str(ru.used)}", t.span)
    return Usage(lu.used | ru.used, lu.slack and ru.slack)


def _join_mult(lu: Usage, ru: Usage, t: Term) -> Usage:
    overlap = lu.used & ru.used
    if overlap:
        raise TypeCheckError(
            "reused-var",
            f"variable{'s' if len(overlap) > 1 else ''} {_set_str(overlap)} "
            "consumed on both sides of a context split", t.span)
    return Usage(lu.used | ru.used, lu.slack or ru.slack)


def _consume(x: str, usage: Usage, body: Term, span) -> Usage:
    if x in usage.used:
        return Usage(usage.used - {x}, usage.slack)
    if usage.slack:
        return usage
    if isinstance(body, Star):
        raise TypeCheckError(
            "star-in-nonempty-context",
            f"scalar star admits no context, but {x!r} must be consumed", span)
    raise TypeCheckError("unused-var", f"bound variable {x!r} is never consumed", span)


def _set_str(s) -> str:
    return "{" + ", ".join(sorted(s)) + "}"


def check_closed(t: Term, expected: Proposition) -> None:
    """Check the closed judgment |- t : expected; raises on any mismatch."""
    prop, _ = synthesize({}, t)
    if prop != expected:
        raise TypeCheckError(
            "annotation-mismatch",
            f"term has type {print_prop(prop)}, expected {print_prop(expected)}",
            t.span)


# ---------------------------------------------------------------------------
# Sup-shaped propositions and the tensor result type

def is_sup_shape(p: Proposition) -> bool:
    if isinstance(p, Top):
        return True
    return isinstance(p, Sup) and is_sup_shape(p.left) and is_sup_shape(p.right)


def tensor_prop(a: Proposition, b: Proposition) -> Proposition:
    """Replace every unit leaf of a by b (dimension multiplies)."""
    if isinstance(a, Top):
        return b
    assert isinstance(a, Sup)
    return Sup(tensor_prop(a.left, b), tensor_prop(a.right, b))


# ---------------------------------------------------------------------------
# Materialized derivations

@dataclass(frozen=True)
class Derivation:
    """One judgment ctx |- term : prop concluded by `rule` from `premises`."""
    rule: str
    ctx: tuple[tuple[str, Proposition], ...]
    term: Term
    prop: Proposition
    premises: tuple["Derivation", ...]

    def context(self) -> dict[str, Proposition]:
        return dict(self.ctx)


def _freeze(ctx: Context) -> tuple[tuple[str, Proposition], ...]:
    return tuple(sorted(ctx.items()))


def derive(ctx: Context, t: Term) -> Derivation:
    """Build an auditable derivation for the default judgment of t under ctx.

    The consumed restriction of ctx is chosen canonically (exactly the used
    set); absorbed variables are routed to the first absorbing premise.
    """
    _, usage = synthesize(ctx, t)
    exact = {x: ctx[x] for x in ctx if x in usage.used}
    return _derive(exact, t)


def _derive(ctx: dict[str, Proposition], t: Term) -> Derivation:
    # Precondition: t consumes exactly ctx (absorbing where needed).
    if isinstance(t, Var):
        return Derivation("ax", _freeze(ctx), t, ctx[t.name], ())

    if isinstance(t, Star):
        rule = "top_i" if not ctx else "top_i0w"
        return Derivation(rule, _freeze(ctx), t, Top(), ())

    if isinstance(t, Sum):
        l = _derive(ctx, t.left)
        r = _derive(ctx, t.right)
        return Derivation("sum", _freeze(ctx), t, l.prop, (l, r))

    if isinstance(t, Scal):
        _, bu = synthesize(ctx, t.body)
        inner = {x: p for x, p in ctx.items() if x in bu.used} \
            if t.coeff == 0 else dict(ctx)
        b = _derive(inner, t.body)
        rule = "prod" if len(inner) == len(ctx) else "prod0w"
        return Derivation(rule, _freeze(ctx), t, b.prop, (b,))

    if isinstance(t, DTop):
        s, b = _split_two(ctx, t.scrut, t.body)
        return Derivation("top_e", _freeze(ctx), t, b.prop, (s, b))

    if isinstance(t, DBot):
        _, su = synthesize(ctx, t.scrut)
        s = _derive({x: p for x, p in ctx.items() if x in su.used}, t.scrut)
        return Derivation("bot_e", _freeze(ctx), t, t.result, (s,))

    if isinstance(t, Lam):
        b = _derive({**ctx, t.var: t.dom}, t.body)
        return Derivation("imp_i", _freeze(ctx), t, Imp(t.dom, b.prop), (b,))

    if isinstance(t, App):
        f, a = _split_two(ctx, t.fn, t.arg)
        assert isinstance(f.prop, Imp)
        return Derivation("imp_e", _freeze(ctx), t, f.prop.cod, (f, a))

    if isinstance(t, (Pair, SupPair)):
        l = _derive(ctx, t.left)
        r = _derive(ctx, t.right)
        rule = "and_i" if isinstance(t, Pair) else "sup_i"
        ctor = And if isinstance(t, Pair) else Sup
        return Derivation(rule, _freeze(ctx), t, ctor(l.prop, r.prop), (l, r))

    if isinstance(t, (DAnd1, DAnd2, DSup1, DSup2)):
        sp, _ = synthesize(ctx, t.scrut)
        hyp = sp.left if isinstance(t, (DAnd1, DSup1)) else sp.right
        s, b = _split_binding(ctx, t.scrut, ((t.var, hyp, t.body),))
        rule = {DAnd1: "and_e1", DAnd2: "and_e2",
                DSup1: "sup_e1", DSup2: "sup_e2"}[type(t)]
        return Derivation(rule, _freeze(ctx), t, b[0].prop, (s, b[0]))

    if isinstance(t, Inl):
        b = _derive(ctx, t.body)
        return Derivation("or_i1", _freeze(ctx), t, Or(b.prop, t.other), (b,))

    if isinstance(t, Inr):
        b = _derive(ctx, t.body)
        return Derivation("or_i2", _freeze(ctx), t, Or(t.other, b.prop), (b,))

    if isinstance(t, (DOr, DSup)):
        sp, _ = synthesize(ctx, t.scrut)
        s, bs = _split_binding(ctx, t.scrut,
                               ((t.lvar, sp.left, t.lbody),
                                (t.rvar, sp.right, t.rbody)))
        rule = "or_e" if isinstance(t, DOr) else "sup_e"
        return Derivation(rule, _freeze(ctx), t, bs[0].prop, (s, bs[0], bs[1]))

    if isinstance(t, Tensor):
        l, r = _split_two(ctx, t.left, t.right)
        return Derivation("tens", _freeze(ctx), t, tensor_prop(l.prop, r.prop), (l, r))

    raise TypeError(f"not a term: {t!r}")


def _route_extras(ctx, left_used, left_slack, right_used, right_slack):
    extras = {x for x in ctx if x not in left_used and x not in right_used}
    left = set(left_used)
    right = set(right_used)
    if extras:
        if left_slack:
            left |= extras
        else:
            assert right_slack, "unroutable extra variables"
            right |= extras
    return left, right


def _split_two(ctx, left_term, right_term):
    _, lu = synthesize(ctx, left_term)
    _, ru = synthesize(ctx, right_term)
    lset, rset = _route_extras(ctx, lu.used, lu.slack, ru.used, ru.slack)
    l = _derive({x: p for x, p in ctx.items() if x in lset}, left_term)
    r = _derive({x: p for x, p in ctx.items() if x in rset}, right_term)
    return l, r


def _split_binding(ctx, scrut, branches):
    # branches: tuple of (binder, hypothesis, body); they share one context.
    _, su = synthesize(ctx, scrut)
    b_used: set[str] = set()
    b_slack = True
    for var, hyp, body in branches:
        _, bu = synthesize({**ctx, var: hyp}, body)
        b_used |= bu.used - {var}
        b_slack = b_slack and bu.slack
    sset, bset = _route_extras(ctx, su.used, su.slack, b_used, b_slack)
    s = _derive({x: p for x, p in ctx.items() if x in sset}, scrut)
    shared = {x: p for x, p in ctx.items() if x in bset}
    bs = tuple(_derive({**shared, var: hyp}, body)
               for var, hyp, body in branches)
    return s, bs


def verify_derivation(d: Derivation) -> bool:
    """Re-check every node against the deduction rules, independently of
    `synthesize`; absorbing rule forms (bot_e, top_i0w, prod0w) may widen."""
    for p in d.premises:
        if not verify_derivation(p):
            return False
    ctx = d.context()
    t, rule, ps = d.term, d.rule, d.premises
    if rule == "ax":
        return isinstance(t, Var) and ctx == {t.name: d.prop}
    if rule == "top_i":
        return isinstance(t, Star) and not ctx and d.prop == Top()
    if rule == "top_i0w":
        return isinstance(t, Star) and t.coeff == 0 and d.prop == Top()
    if rule == "sum":
        return (isinstance(t, Sum) and len(ps) == 2
                and all(p.context() == ctx and p.prop == d.prop for p in ps)
                and ps[0].term == t.left and ps[1].term == t.right)
    if rule == "prod":
        return (isinstance(t, Scal) and len(ps) == 1
                and ps[0].context() == ctx and ps[0].prop == d.prop)
    if rule == "prod0w":
        return (isinstance(t, Scal) and t.coeff == 0 and len(ps) == 1
                and _included(ps[0].context(), ctx) and ps[0].prop == d.prop)
    if rule == "top_e":
        return (isinstance(t, DTop) and len(ps) == 2
                and ps[0].prop == Top() and ps[1].prop == d.prop
                and _partition(ctx, ps[0].context(), ps[1].context()))
    if rule == "bot_e":
        return (isinstance(t, DBot) and len(ps) == 1
                and ps[0].prop == Bot() and d.prop == t.result
                and _included(ps[0].context(), ctx))
    if rule == "imp_i":
        return (isinstance(t, Lam) and len(ps) == 1
                and ps[0].context() == {**ctx, t.var: t.dom}
                and d.prop == Imp(t.dom, ps[0].prop))
    if rule == "imp_e":
        return (isinstance(t, App) and len(ps) == 2
                and isinstance(ps[0].prop, Imp)
                and ps[0].prop.dom == ps[1].prop
                and ps[0].prop.cod == d.prop
                and _partition(ctx, ps[0].context(), ps[1].context()))
    if rule in ("and_i", "sup_i"):
        ctor = And if rule == "and_i" else Sup
        return (isinstance(t, Pair if rule == "and_i" else SupPair)
                and len(ps) == 2
                and all(p.context() == ctx for p in ps)
                and d.prop == ctor(ps[0].prop, ps[1].prop))
    if rule in ("and_e1", "and_e2", "sup_e1", "sup_e2"):
        want = And if rule.startswith("and") else Sup
        if not (len(ps) == 2 and isinstance(ps[0].prop, want)
                and ps[1].prop == d.prop):
            return False
        hyp = ps[0].prop.left if rule.endswith("1") else ps[0].prop.right
        gamma = ps[0].context()
        delta = {x: p for x, p in ctx.items() if x not in gamma}
        return ps[1].context() == {**delta, t.var: hyp} and \
            _partition(ctx, gamma, {x: p for x, p in delta.items()})
    if rule in ("or_i1", "or_i2"):
        if not (isinstance(t, (Inl, Inr)) and len(ps) == 1
                and ps[0].context() == ctx and isinstance(d.prop, Or)):
            return False
        side = d.prop.left if rule == "or_i1" else d.prop.right
        return ps[0].prop == side
    if rule in ("or_e", "sup_e"):
        want = Or if rule == "or_e" else Sup
        if not (len(ps) == 3 and isinstance(ps[0].prop, want)
                and ps[1].prop == d.prop and ps[2].prop == d.prop):
            return False
        gamma = ps[0].context()
        delta = {x: p for x, p in ctx.items() if x not in gamma}
        return (ps[1].context() == {**delta, t.lvar: ps[0].prop.left}
                and ps[2].context() == {**delta, t.rvar: ps[0].prop.right}
                and _partition(ctx, gamma, delta))
    if rule == "tens":
        return (isinstance(t, Tensor) and len(ps) == 2
                and is_sup_shape(ps[0].prop) and is_sup_shape(ps[1].prop)
                and d.prop == tensor_prop(ps[0].prop, ps[1].prop)
                and _partition(ctx, ps[0].context(), ps[1].context()))
    return False


def _partition(whole: dict, a: dict, b: dict) -> bool:
    return not (a.keys() & b.keys()) and {**a, **b} == whole


def _included(part: dict, whole: dict) -> bool:
    return all(whole.get(x) == p for x, p in part.items())
