"""Reduction engine: the full rule set, normalization, and sampling.

The rules come in three groups: six beta rules (cuts on unit, implication,
conjunction, disjunction), eight commutation rules pushing sums and scalar
products through introductions (and through the disjunction elimination),
and the superposition/tensor extension.  The case elimination on a
superposition pair is the one NON-deterministic pair (BetaSupL/BetaSupR);
`normalize` refuses to fire it, `sample_normalize` resolves it with a
probability hook.

Strategy: leftmost-outermost, reducing under binders (full normal forms).
On the deterministic fragment the system is orthogonal, so the strategy
cannot change the result; it only pins traces.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Optional

from .kernel import (App, DAnd1, DAnd2, DOr, DSup, DSup1, DSup2, DTop, Inl,
                     Inr, Lam, Pair, Scal, Star, Sum, SupPair, Tensor, Term,
                     Var, alpha_eq, children, free_vars, fresh_name,
                     replace_at, substitute)

DEFAULT_BUDGET = 10 ** 6

#: When set, normalization of closed terms re-checks typability first.
DEBUG_TYPECHECK = bool(os.environ.get("LSODOT_DEBUG_TYPECHECK"))


def step_budget() -> int:
    raw = os.environ.get("LSODOT_BUDGET")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return DEFAULT_BUDGET


class StuckOnNondeterminism(Exception):
    """normalize reached a case elimination on a closed irreducible
    superposition pair; the caller must use sample_normalize."""

    def __init__(self, path: tuple[int, ...]):
        self.path = path
        super().__init__(f"non-deterministic redex at position {list(path)}")


class StepBudgetExceeded(Exception):
    """Budget blown: well-typed terms always terminate, so this signals an
    engine bug (or an ill-typed input), not a user error."""


class RuleId(enum.Enum):
    BetaTop = enum.auto()
    BetaArrow = enum.auto()
    BetaAnd1 = enum.auto()
    BetaAnd2 = enum.auto()
    BetaOr1 = enum.auto()
    BetaOr2 = enum.auto()
    SumStar = enum.auto()
    SumLam = enum.auto()
    SumPair = enum.auto()
    OrCommSum = enum.auto()
    ProdStar = enum.auto()
    ProdLam = enum.auto()
    ProdPair = enum.auto()
    OrCommProd = enum.auto()
    BetaSup1 = enum.auto()
    BetaSup2 = enum.auto()
    BetaSupL = enum.auto()
    BetaSupR = enum.auto()
    SumSup = enum.auto()
    ProdSup = enum.auto()
    TensorSup = enum.auto()
    TensorStar = enum.auto()


def _beta_top(t: Term) -> Optional[Term]:
    if isinstance(t, DTop) and isinstance(t.scrut, Star):
        return Scal(t.scrut.coeff, t.body)
    return None


def _beta_arrow(t: Term) -> Optional[Term]:
    if isinstance(t, App) and isinstance(t.fn, Lam):
        return substitute(t.fn.body, t.fn.var, t.arg)
    return None


def _beta_and1(t: Term) -> Optional[Term]:
    if isinstance(t, DAnd1) and isinstance(t.scrut, Pair):
        return substitute(t.body, t.var, t.scrut.left)
    return None


def _beta_and2(t: Term) -> Optional[Term]:
    if isinstance(t, DAnd2) and isinstance(t.scrut, Pair):
        return substitute(t.body, t.var, t.scrut.right)
    return None


def _beta_or1(t: Term) -> Optional[Term]:
    if isinstance(t, DOr) and isinstance(t.scrut, Inl):
        return substitute(t.lbody, t.lvar, t.scrut.body)
    return None


def _beta_or2(t: Term) -> Optional[Term]:
    if isinstance(t, DOr) and isinstance(t.scrut, Inr):
        return substitute(t.rbody, t.rvar, t.scrut.body)
    return None


def _sum_star(t: Term) -> Optional[Term]:
    if isinstance(t, Sum) and isinstance(t.left, Star) and isinstance(t.right, Star):
        return Star(t.left.coeff + t.right.coeff)
    return None


def _sum_lam(t: Term) -> Optional[Term]:
    # Fires only when the domain annotations agree, which subject reduction
    # guarantees for well-typed sums.
    if (isinstance(t, Sum) and isinstance(t.left, Lam)
            and isinstance(t.right, Lam) and t.left.dom == t.right.dom):
        l, r = t.left, t.right
        if l.var == r.var:
            return Lam(l.var, l.dom, Sum(l.body, r.body))
        if l.var not in free_vars(r.body):
            return Lam(l.var, l.dom,
                       Sum(l.body, substitute(r.body, r.var, Var(l.var))))
        x = fresh_name(l.var, free_vars(l.body) | free_vars(r.body))
        return Lam(x, l.dom, Sum(substitute(l.body, l.var, Var(x)),
                                 substitute(r.body, r.var, Var(x))))
    return None


def _sum_pair(t: Term) -> Optional[Term]:
    if isinstance(t, Sum) and isinstance(t.left, Pair) and isinstance(t.right, Pair):
        return Pair(Sum(t.left.left, t.right.left),
                    Sum(t.left.right, t.right.right))
    return None


def _or_comm_sum(t: Term) -> Optional[Term]:
    if isinstance(t, DOr) and isinstance(t.scrut, Sum):
        return Sum(DOr(t.scrut.left, t.lvar, t.lbody, t.rvar, t.rbody),
                   DOr(t.scrut.right, t.lvar, t.lbody, t.rvar, t.rbody))
    return None


def _prod_star(t: Term) -> Optional[Term]:
    if isinstance(t, Scal) and isinstance(t.body, Star):
        return Star(t.coeff * t.body.coeff)
    return None


def _prod_lam(t: Term) -> Optional[Term]:
    if isinstance(t, Scal) and isinstance(t.body, Lam):
        b = t.body
        return Lam(b.var, b.dom, Scal(t.coeff, b.body))
    return None


def _prod_pair(t: Term) -> Optional[Term]:
    if isinstance(t, Scal) and isinstance(t.body, Pair):
        return Pair(Scal(t.coeff, t.body.left), Scal(t.coeff, t.body.right))
    return None


def _or_comm_prod(t: Term) -> Optional[Term]:
    if isinstance(t, DOr) and isinstance(t.scrut, Scal):
        return Scal(t.scrut.coeff,
                    DOr(t.scrut.body, t.lvar, t.lbody, t.rvar, t.rbody))
    return None


def _beta_sup1(t: Term) -> Optional[Term]:
    if isinstance(t, DSup1) and isinstance(t.scrut, SupPair):
        return substitute(t.body, t.var, t.scrut.left)
    return None


def _beta_sup2(t: Term) -> Optional[Term]:
    if isinstance(t, DSup2) and isinstance(t.scrut, SupPair):
        return substitute(t.body, t.var, t.scrut.right)
    return None


def _beta_sup_left(t: Term) -> Optional[Term]:
    if isinstance(t, DSup) and isinstance(t.scrut, SupPair):
        return substitute(t.lbody, t.lvar, t.scrut.left)
    return None


def _beta_sup_right(t: Term) -> Optional[Term]:
    if isinstance(t, DSup) and isinstance(t.scrut, SupPair):
        return substitute(t.rbody, t.rvar, t.scrut.right)
    return None


def _sum_sup(t: Term) -> Optional[Term]:
    if isinstance(t, Sum) and isinstance(t.left, SupPair) and isinstance(t.right, SupPair):
        return SupPair(Sum(t.left.left, t.right.left),
                       Sum(t.left.right, t.right.right))
    return None


def _prod_sup(t: Term) -> Optional[Term]:
    if isinstance(t, Scal) and isinstance(t.body, SupPair):
        return SupPair(Scal(t.coeff, t.body.left), Scal(t.coeff, t.body.right))
    return None


def _tensor_sup(t: Term) -> Optional[Term]:
    if isinstance(t, Tensor) and isinstance(t.left, SupPair):
        return SupPair(Tensor(t.left.left, t.right),
                       Tensor(t.left.right, t.right))
    return None


def _tensor_star(t: Term) -> Optional[Term]:
    if isinstance(t, Tensor) and isinstance(t.left, Star):
        return Scal(t.left.coeff, t.right)
    return None


#: The auditable rule table: every rewrite the engine can perform.  The two
#: BetaSup entries form the non-deterministic pair; all others are applied
#: deterministically wherever they match.
RULES: dict[RuleId, Callable[[Term], Optional[Term]]] = {
    RuleId.BetaTop: _beta_top,
    RuleId.BetaArrow: _beta_arrow,
    RuleId.BetaAnd1: _beta_and1,
    RuleId.BetaAnd2: _beta_and2,
    RuleId.BetaOr1: _beta_or1,
    RuleId.BetaOr2: _beta_or2,
    RuleId.SumStar: _sum_star,
    RuleId.SumLam: _sum_lam,
    RuleId.SumPair: _sum_pair,
    RuleId.OrCommSum: _or_comm_sum,
    RuleId.ProdStar: _prod_star,
    RuleId.ProdLam: _prod_lam,
    RuleId.ProdPair: _prod_pair,
    RuleId.OrCommProd: _or_comm_prod,
    RuleId.BetaSup1: _beta_sup1,
    RuleId.BetaSup2: _beta_sup2,
    RuleId.BetaSupL: _beta_sup_left,
    RuleId.BetaSupR: _beta_sup_right,
    RuleId.SumSup: _sum_sup,
    RuleId.ProdSup: _prod_sup,
    RuleId.TensorSup: _tensor_sup,
    RuleId.TensorStar: _tensor_star,
}

NONDETERMINISTIC = (RuleId.BetaSupL, RuleId.BetaSupR)

# Candidate deterministic rules indexed by the head constructor, so the scan
# does not try all twenty at every node.
_BY_HEAD: dict[type, tuple[tuple[RuleId, Callable], ...]] = {}
_HEAD_OF = {
    RuleId.BetaTop: DTop, RuleId.BetaArrow: App,
    RuleId.BetaAnd1: DAnd1, RuleId.BetaAnd2: DAnd2,
    RuleId.BetaOr1: DOr, RuleId.BetaOr2: DOr,
    RuleId.SumStar: Sum, RuleId.SumLam: Sum, RuleId.SumPair: Sum,
    RuleId.OrCommSum: DOr, RuleId.ProdStar: Scal, RuleId.ProdLam: Scal,
    RuleId.ProdPair: Scal, RuleId.OrCommProd: DOr,
    RuleId.BetaSup1: DSup1, RuleId.BetaSup2: DSup2,
    RuleId.SumSup: Sum, RuleId.ProdSup: Scal,
    RuleId.TensorSup: Tensor, RuleId.TensorStar: Tensor,
}
for _rid, _head in _HEAD_OF.items():
    _BY_HEAD.setdefault(_head, ())
    _BY_HEAD[_head] += ((_rid, RULES[_rid]),)


def root_step(t: Term) -> Optional[tuple[RuleId, Term]]:
    """Apply the unique deterministic rule matching at the root, if any."""
    for rid, fn in _BY_HEAD.get(type(t), ()):
        out = fn(t)
        if out is not None:
            return rid, out
    return None


def step_at(t: Term, pos: tuple[int, ...]) -> Optional[Term]:
    """One deterministic step at the addressed position, or None.

    The non-deterministic pair is never applied here; resolving it belongs
    to sample_normalize.  Raises IndexError on an invalid path.
    """
    sub = _subterm_checked(t, pos)
    hit = root_step(sub)
    if hit is None:
        return None
    return replace_at(t, pos, hit[1])


def apply_rule_at(t: Term, pos: tuple[int, ...], rule: RuleId) -> Term:
    """Apply a specific rule (including BetaSupL/R); used by trace replay."""
    sub = _subterm_checked(t, pos)
    out = RULES[rule](sub)
    if out is None:
        raise ValueError(f"rule {rule.name} does not match at {list(pos)}")
    return replace_at(t, pos, out)


def _subterm_checked(t: Term, pos: tuple[int, ...]) -> Term:
    for i in pos:
        kids = children(t)
        if not 0 <= i < len(kids):
            raise IndexError(f"invalid path {list(pos)}")
        t = kids[i]
    return t


# ---------------------------------------------------------------------------
# Redex discovery

def _nondet_ready(t: Term) -> bool:
    # Case elimination fires only on a closed irreducible superposition pair.
    return (isinstance(t, DSup) and isinstance(t.scrut, SupPair)
            and not free_vars(t.scrut)
            and is_normal(t.scrut.left) and is_normal(t.scrut.right))


def _find_event(t: Term, path: tuple[int, ...] = ()):
    """First event in leftmost-outermost order.

    Returns ("det", path, rule, reduct), ("nondet", path, node), or None.
    """
    hit = root_step(t)
    if hit is not None:
        return ("det", path, hit[0], hit[1])
    if _nondet_ready(t):
        return ("nondet", path, t)
    for i, child in enumerate(children(t)):
        ev = _find_event(child, path + (i,))
        if ev is not None:
            return ev
    return None


def is_normal(t: Term) -> bool:
    """No rule applies anywhere, counting ready non-deterministic redexes."""
    return _find_event(t) is None


def find_redexes(t: Term) -> list[tuple[tuple[int, ...], RuleId]]:
    """All deterministic redex positions, in leftmost-outermost order."""
    out = []
    for path, sub in _positions(t):
        hit = root_step(sub)
        if hit is not None:
            out.append((path, hit[0]))
    return out


def find_nondet_redexes(t: Term) -> list[tuple[int, ...]]:
    return [path for path, sub in _positions(t) if _nondet_ready(sub)]


def _positions(t: Term, path: tuple[int, ...] = ()):
    yield path, t
    for i, child in enumerate(children(t)):
        yield from _positions(child, path + (i,))


# ---------------------------------------------------------------------------
# Traces

@dataclass(frozen=True)
class TraceStep:
    rule: RuleId
    path: tuple[int, ...]
    term_after: Term
    probability: Optional[Fraction] = None


@dataclass(frozen=True)
class Trace:
    start: Term
    steps: tuple[TraceStep, ...]


def replay(trace: Trace) -> Term:
    """Re-apply every recorded step; raises if any intermediate disagrees."""
    t = trace.start
    for i, step in enumerate(trace.steps):
        t = apply_rule_at(t, step.path, step.rule)
        if t != step.term_after:
            raise ValueError(f"trace diverges at step {i}")
    return t


# ---------------------------------------------------------------------------
# Normalization

Weigher = Callable[[Term, Term], Fraction]


def half_weigher(_u1: Term, _u2: Term) -> Fraction:
    return Fraction(1, 2)


def _debug_check(t: Term) -> None:
    if DEBUG_TYPECHECK and not free_vars(t):
        from .typecheck import synthesize
        synthesize({}, t)


def normalize(t: Term, budget: Optional[int] = None) -> Term:
    """The unique normal form under leftmost-outermost reduction.

    Raises StuckOnNondeterminism if a ready case-elimination redex is
    reached, and StepBudgetExceeded past the step budget.
    """
    _debug_check(t)
    budget = budget if budget is not None else step_budget()
    steps = 0
    while True:
        ev = _find_event(t)
        if ev is None:
            return t
        if ev[0] == "nondet":
            raise StuckOnNondeterminism(ev[1])
        _, path, _rule, reduct = ev
        t = replace_at(t, path, reduct)
        steps += 1
        if steps > budget:
            raise StepBudgetExceeded(
                f"exceeded {budget} steps; well-typed terms terminate, "
                "so this indicates an engine bug or ill-typed input")


def normalize_traced(t: Term, budget: Optional[int] = None) -> tuple[Term, Trace]:
    """normalize, recording every step (deterministic fragment only)."""
    _debug_check(t)
    budget = budget if budget is not None else step_budget()
    start = t
    steps: list[TraceStep] = []
    while True:
        ev = _find_event(t)
        if ev is None:
            return t, Trace(start, tuple(steps))
        if ev[0] == "nondet":
            raise StuckOnNondeterminism(ev[1])
        _, path, rule, reduct = ev
        t = replace_at(t, path, reduct)
        steps.append(TraceStep(rule, path, t))
        if len(steps) > budget:
            raise StepBudgetExceeded(f"exceeded {budget} steps")


def sample_normalize(t: Term, rng, weigher: Optional[Weigher] = None,
                     budget: Optional[int] = None) -> tuple[Term, Trace]:
    """Normalize, resolving case eliminations probabilistically.

    Deterministic steps proceed leftmost-outermost; a ready case redex
    fires its left branch with probability weigher(u1, u2) and the right
    branch otherwise.  Identical seeds give identical results and traces.
    """
    _debug_check(t)
    budget = budget if budget is not None else step_budget()
    weigher = weigher if weigher is not None else half_weigher
    start = t
    steps: list[TraceStep] = []
    while True:
        ev = _find_event(t)
        if ev is None:
            return t, Trace(start, tuple(steps))
        if ev[0] == "det":
            _, path, rule, reduct = ev
            t = replace_at(t, path, reduct)
            steps.append(TraceStep(rule, path, t))
        else:
            _, path, node = ev
            p = weigher(node.scrut.left, node.scrut.right)
            if not 0 <= p <= 1:
                raise ValueError(f"weigher returned {p}, not a probability")
            if rng.random() < p:
                rule, prob = RuleId.BetaSupL, p
            else:
                rule, prob = RuleId.BetaSupR, 1 - p
            t = apply_rule_at(t, path, rule)
            steps.append(TraceStep(rule, path, t, probability=Fraction(prob)))
        if len(steps) > budget:
            raise StepBudgetExceeded(f"exceeded {budget} steps")


def normalize_random_order(t: Term, rng, budget: Optional[int] = None) -> Term:
    """Normal form under a random redex-selection order (deterministic
    fragment); by confluence it agrees with `normalize`."""
    budget = budget if budget is not None else step_budget()
    steps = 0
    while True:
        redexes = find_redexes(t)
        if not redexes:
            if find_nondet_redexes(t):
                raise StuckOnNondeterminism(find_nondet_redexes(t)[0])
            return t
        path, rule = redexes[rng.randrange(len(redexes))]
        t = apply_rule_at(t, path, rule)
        steps += 1
        if steps > budget:
            raise StepBudgetExceeded(f"exceeded {budget} steps")


def convertible(t: Term, u: Term, budget: Optional[int] = None) -> bool:
    """Decide t == u (joinability) by comparing normal forms; valid on the
    fragment where no non-deterministic redex is reachable."""
    return alpha_eq(normalize(t, budget), normalize(u, budget))
