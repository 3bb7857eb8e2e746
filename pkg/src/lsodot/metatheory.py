"""Machine-checkable metatheory: size measure, decomposition, fuzz suites.

The size measure mixes size and depth: additive nodes (sums, pairs, case
branches) contribute the max of their parts, everything else the sum.  That
choice makes it non-increasing under every rewrite rule and subadditive
under substitution, which the suites check on random well-typed terms.

Terms are generated derivation-directed: the generator walks the typing
rules top-down, splitting the linear context at multiplicative rules,
duplicating it at additive ones, and discharging leftovers through a
void-elimination (or, rarely, a zero-weighted absorber).  Raw random terms
are almost never linear, so generate-and-filter would starve the suites.
Shrinking replaces subterms by same-judgment subderivations, so every
shrunk counterexample still type-checks.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping, Optional

from .kernel import (And, App, Bot, DAnd1, DAnd2, DBot, DOr, DSup, DSup1,
                     DSup2, DTop, Imp, Inl, Inr, Lam, Or, Pair, Proposition,
                     Scal, Scalar, Star, Sum, Sup, SupPair, Tensor, Term, Top,
                     Var, alpha_eq, children, free_vars, make_scalar,
                     positions, replace_at, substitute, with_children)
from .rewrite import (RuleId, StepBudgetExceeded, apply_rule_at, find_redexes,
                      find_nondet_redexes, normalize, normalize_random_order,
                      normalize_traced, convertible)
from .syntax import print_prop, print_term
from .typecheck import TypeCheckError, synthesize
from .vectors import VShape, dim, encode, neg_proof, zero_proof

TOP = Top()
BOT = Bot()


# ---------------------------------------------------------------------------
# Size of a proof

def mu(t: Term) -> int:
    """The size measure: max over additive parts, sum over the rest."""
    if isinstance(t, Var):
        return 0
    if isinstance(t, Star):
        return 1
    if isinstance(t, (Sum, Pair, SupPair)):
        return 1 + max(mu(t.left), mu(t.right))
    if isinstance(t, Scal):
        return 1 + mu(t.body)
    if isinstance(t, DTop):
        return 1 + mu(t.scrut) + mu(t.body)
    if isinstance(t, DBot):
        return 1 + mu(t.scrut)
    if isinstance(t, Lam):
        return 1 + mu(t.body)
    if isinstance(t, App):
        return 1 + mu(t.fn) + mu(t.arg)
    if isinstance(t, (DAnd1, DAnd2, DSup1, DSup2)):
        return 1 + mu(t.scrut) + mu(t.body)
    if isinstance(t, (Inl, Inr)):
        return 1 + mu(t.body)
    if isinstance(t, (DOr, DSup)):
        return 1 + mu(t.scrut) + max(mu(t.lbody), mu(t.rbody))
    if isinstance(t, Tensor):
        return 1 + mu(t.left) + mu(t.right)
    raise TypeError(f"not a term: {t!r}")


# ---------------------------------------------------------------------------
# Elimination contexts

HOLE = "_"

_ELIMS = (DTop, DBot, App, DAnd1, DAnd2, DOr, DSup1, DSup2, DSup)


@dataclass(frozen=True)
class ElimContext:
    """A one-holed stack of eliminations; the hole is the variable `_` and
    sits in scrutinee/head position only.  All other components are closed
    (branch bodies may use just their own binder)."""
    term: Term

    def __post_init__(self):
        if not _valid_context(self.term):
            raise ValueError(f"not an elimination context: {print_term(self.term)}")


def _valid_context(t: Term) -> bool:
    if isinstance(t, Var):
        return t.name == HOLE
    if not isinstance(t, _ELIMS):
        return False
    scrut = t.fn if isinstance(t, App) else t.scrut
    if not _valid_context(scrut):
        return False
    if isinstance(t, DTop) and free_vars(t.body):
        return False
    if isinstance(t, App) and free_vars(t.arg):
        return False
    if isinstance(t, (DAnd1, DAnd2, DSup1, DSup2)) \
            and not free_vars(t.body) <= {t.var}:
        return False
    if isinstance(t, (DOr, DSup)):
        if not (free_vars(t.lbody) <= {t.lvar} and free_vars(t.rbody) <= {t.rvar}):
            return False
    return True


def fill_context(k: ElimContext, t: Term) -> Term:
    return substitute(k.term, HOLE, t)


def decompose(t: Term) -> tuple[ElimContext, Term]:
    """Split an irreducible one-free-variable proof into an elimination
    context and a head that is a variable, introduction, sum, or product."""
    fv = free_vars(t)
    if len(fv) != 1:
        raise ValueError("decompose needs a proof with exactly one free variable")
    if find_redexes(t) or find_nondet_redexes(t):
        raise ValueError("decompose needs an irreducible proof")
    ctx_term, head = _peel(t, fv)
    return ElimContext(ctx_term), head


def _peel(t: Term, fv: frozenset[str]) -> tuple[Term, Term]:
    if isinstance(t, _ELIMS):
        scrut = t.fn if isinstance(t, App) else t.scrut
        if free_vars(scrut) & fv:
            inner, head = _peel(scrut, fv)
            if isinstance(t, App):
                return App(inner, t.arg), head
            kids = list(children(t))
            kids[0] = inner
            return with_children(t, tuple(kids)), head
    return Var(HOLE), t


# ---------------------------------------------------------------------------
# Derivation-directed generation

class GenExhausted(Exception):
    """Generation failed for the requested (context, target) after retries."""


class _GenFail(Exception):
    pass


DEFAULT_WEIGHTS: dict[str, float] = {
    # term-construction moves
    "sum": 1.0, "prod": 1.0, "intro": 3.0, "elim": 2.0, "zero": 0.15,
    # connectives of invented propositions (targets, scrutinees, contexts)
    "top": 3.0, "bot": 0.6, "imp": 1.0, "and": 1.5, "or": 1.0, "sup": 1.0,
    # the non-deterministic case elimination; 0 keeps terms normalize-safe
    "dsup": 0.5,
}

_DEFAULT_POOL = (make_scalar(0), make_scalar(1), make_scalar(-1),
                 make_scalar(2), make_scalar(Fraction(1, 2)), make_scalar(3))


@dataclass
class GenConfig:
    max_depth: int = 4
    scalar_pool: tuple[Scalar, ...] = _DEFAULT_POOL
    weights: dict[str, float] = field(default_factory=lambda: dict(DEFAULT_WEIGHTS))
    seed: int = 0

    def __post_init__(self):
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")
        if any(w < 0 for w in self.weights.values()) or \
                not any(w > 0 for w in self.weights.values()):
            raise ValueError("weights must be nonnegative and not all zero")


def ls_config(**kw) -> GenConfig:
    """Plain-fragment generation: no superposition connective at all."""
    cfg = GenConfig(**kw)
    cfg.weights.update(sup=0.0, dsup=0.0)
    return cfg


def det_sup_config(**kw) -> GenConfig:
    """Superpositions allowed, but not the non-deterministic elimination."""
    cfg = GenConfig(**kw)
    cfg.weights.update(dsup=0.0)
    return cfg


class TermGenerator:
    """Random well-typed terms, built by walking the typing rules."""

    def __init__(self, cfg: GenConfig, rng: Optional[random.Random] = None):
        self.cfg = cfg
        self.rng = rng if rng is not None else random.Random(cfg.seed)
        self._closable: dict[Proposition, bool] = {}
        self._spendable: dict[tuple[Proposition, Proposition], bool] = {}
        self._fresh = 0

    # -- small helpers

    def fresh(self) -> str:
        self._fresh += 1
        return f"v{self._fresh}"

    def scalar(self, nonzero: bool = False) -> Scalar:
        pool = [s for s in self.cfg.scalar_pool if not (nonzero and s == 0)]
        return self.rng.choice(pool)

    def _w(self, key: str) -> float:
        return self.cfg.weights.get(key, 0.0)

    def _pick(self, options: list[tuple[str, float]]) -> str:
        total = sum(w for _, w in options)
        if total <= 0:
            raise _GenFail("no weighted options")
        roll = self.rng.random() * total
        for name, w in options:
            roll -= w
            if roll <= 0:
                return name
        return options[-1][0]

    # -- propositions

    def prop(self, depth: int = 2) -> Proposition:
        leaves = [("top", self._w("top")), ("bot", self._w("bot"))]
        if depth <= 0:
            kind = self._pick(leaves)
        else:
            kind = self._pick(leaves + [
                ("imp", self._w("imp")), ("and", self._w("and")),
                ("or", self._w("or")), ("sup", self._w("sup"))])
        if kind == "top":
            return TOP
        if kind == "bot":
            return BOT
        ctor = {"imp": Imp, "and": And, "or": Or, "sup": Sup}[kind]
        return ctor(self.prop(depth - 1), self.prop(depth - 1))

    def vprop(self, max_dim: int, flavor: str) -> Proposition:
        if max_dim <= 1 or self.rng.random() < 0.3:
            return TOP
        cut = self.rng.randint(1, max_dim - 1)
        ctor = And if flavor == "and" else Sup
        return ctor(self.vprop(cut, flavor), self.vprop(max_dim - cut, flavor))

    # -- satisfiability predicates

    def closable(self, a: Proposition) -> bool:
        hit = self._closable.get(a)
        if hit is not None:
            return hit
        if isinstance(a, Top):
            out = True
        elif isinstance(a, Bot):
            out = False
        elif isinstance(a, Imp):
            out = self.spendable(a.dom, a.cod) or self.closable(a.cod)
        elif isinstance(a, (And, Sup)):
            out = self.closable(a.left) and self.closable(a.right)
        elif isinstance(a, Or):
            out = self.closable(a.left) or self.closable(a.right)
        else:
            out = False
        self._closable[a] = out
        return out

    def spendable(self, b: Proposition, a: Proposition) -> bool:
        """Can a term with exactly one free variable of type b have type a,
        using no other resources?"""
        key = (b, a)
        hit = self._spendable.get(key)
        if hit is not None:
            return hit
        out = b == a or isinstance(b, Bot)
        if not out and isinstance(b, Top):
            out = self.closable(a)
        if not out and isinstance(b, (And, Sup)):
            out = self.spendable(b.left, a) or self.spendable(b.right, a)
        if not out and isinstance(b, Or):
            out = self.spendable(b.left, a) and self.spendable(b.right, a)
        if not out and isinstance(b, Imp):
            out = self.closable(b.dom) and self.spendable(b.cod, a)
        self._spendable[key] = out
        return out

    # -- canonical closed proofs (deterministic)

    def canonical(self, a: Proposition) -> Term:
        if isinstance(a, Top):
            return Star(make_scalar(1))
        if isinstance(a, Imp):
            x = self.fresh()
            if self.spendable(a.dom, a.cod):
                return Lam(x, a.dom, self.spend(Var(x), a.dom, a.cod, 0, det=True))
            # zero-weighted body absorbs the unused argument
            return Lam(x, a.dom, Scal(make_scalar(0), self.canonical(a.cod)))
        if isinstance(a, And):
            return Pair(self.canonical(a.left), self.canonical(a.right))
        if isinstance(a, Sup):
            return SupPair(self.canonical(a.left), self.canonical(a.right))
        if isinstance(a, Or):
            if self.closable(a.left):
                return Inl(a.right, self.canonical(a.left))
            return Inr(a.left, self.canonical(a.right))
        raise _GenFail(f"no closed proof of {print_prop(a)}")

    # -- consuming a single resource

    def spend(self, head: Term, b: Proposition, a: Proposition,
              depth: int, det: bool = False) -> Term:
        options = []
        if b == a:
            options.append("id")
        if isinstance(b, Bot):
            options.append("bot")
        if isinstance(b, Top) and self.closable(a):
            options.append("top")
        if isinstance(b, (And, Sup)):
            if self.spendable(b.left, a):
                options.append("proj1")
            if self.spendable(b.right, a):
                options.append("proj2")
        if isinstance(b, Or) and self.spendable(b.left, a) \
                and self.spendable(b.right, a):
            options.append("case")
        if isinstance(b, Imp) and self.closable(b.dom) \
                and self.spendable(b.cod, a):
            options.append("app")
        if not options:
            raise _GenFail(f"cannot spend {print_prop(b)} toward {print_prop(a)}")
        kind = options[0] if det else self.rng.choice(options)
        mk = self.canonical if det or depth <= 0 else \
            (lambda p: self.closed(p, depth - 1))
        if kind == "id":
            return head
        if kind == "bot":
            return DBot(a, head)
        if kind == "top":
            return DTop(head, mk(a))
        if kind in ("proj1", "proj2"):
            y = self.fresh()
            side = b.left if kind == "proj1" else b.right
            ctor = (DAnd1 if kind == "proj1" else DAnd2) if isinstance(b, And) \
                else (DSup1 if kind == "proj1" else DSup2)
            return ctor(head, y, self.spend(Var(y), side, a, depth - 1, det))
        if kind == "case":
            y, z = self.fresh(), self.fresh()
            return DOr(head,
                       y, self.spend(Var(y), b.left, a, depth - 1, det),
                       z, self.spend(Var(z), b.right, a, depth - 1, det))
        arg = mk(b.dom)
        return self.spend(App(head, arg), b.cod, a, depth - 1, det)

    # -- closed terms

    def closed(self, a: Proposition, depth: int) -> Term:
        if not self.closable(a):
            raise _GenFail(f"{print_prop(a)} has no closed proof")
        if depth <= 0:
            return self.canonical(a)
        for _ in range(4):
            move = self._pick([("intro", self._w("intro")),
                               ("sum", self._w("sum")),
                               ("prod", self._w("prod")),
                               ("elim", self._w("elim"))])
            try:
                if move == "sum":
                    return Sum(self.closed(a, depth - 1), self.closed(a, depth - 1))
                if move == "prod":
                    return Scal(self.scalar(), self.closed(a, depth - 1))
                if move == "elim":
                    return self._closed_elim(a, depth)
                return self._closed_intro(a, depth)
            except _GenFail:
                continue
        return self.canonical(a)

    def _closed_intro(self, a: Proposition, depth: int) -> Term:
        if isinstance(a, Top):
            return Star(self.scalar())
        if isinstance(a, Imp):
            x = self.fresh()
            return Lam(x, a.dom, self.open({x: a.dom}, a.cod, depth - 1))
        if isinstance(a, (And, Sup)):
            ctor = Pair if isinstance(a, And) else SupPair
            return ctor(self.closed(a.left, depth - 1),
                        self.closed(a.right, depth - 1))
        if isinstance(a, Or):
            sides = [s for s in ("l", "r")
                     if self.closable(a.left if s == "l" else a.right)]
            side = self.rng.choice(sides)
            if side == "l":
                return Inl(a.right, self.closed(a.left, depth - 1))
            return Inr(a.left, self.closed(a.right, depth - 1))
        raise _GenFail("no introduction")

    def _closed_elim(self, a: Proposition, depth: int) -> Term:
        candidates = [p for p in (TOP, And(a, TOP), Or(a, a), Imp(TOP, a),
                                  self.prop(1))
                      if self.closable(p) and self.spendable(p, a)]
        if not candidates:
            raise _GenFail("no eliminable scrutinee type")
        d = self.rng.choice(candidates)
        scrut = self.closed(d, depth - 1)
        return self.spend(scrut, d, a, depth - 1)

    # -- open terms consuming a context exactly

    def open(self, ctx: dict[str, Proposition], a: Proposition, depth: int) -> Term:
        if not ctx:
            return self.closed(a, depth)
        if depth <= 0:
            return self._discharge(ctx, a)
        for _ in range(6):
            move = self._pick([("var", 1.0), ("sum", self._w("sum")),
                               ("prod", self._w("prod")),
                               ("intro", self._w("intro")),
                               ("elim", self._w("elim")),
                               ("zero", self._w("zero"))])
            try:
                if move == "var":
                    if len(ctx) == 1:
                        (x, b), = ctx.items()
                        if b == a:
                            return Var(x)
                    raise _GenFail("var move inapplicable")
                if move == "sum":
                    return Sum(self.open(dict(ctx), a, depth - 1),
                               self.open(dict(ctx), a, depth - 1))
                if move == "prod":
                    return Scal(self.scalar(), self.open(dict(ctx), a, depth - 1))
                if move == "zero":
                    keep = {x: p for x, p in ctx.items()
                            if self.rng.random() < 0.5}
                    return Scal(make_scalar(0), self.open(keep, a, depth - 1))
                if move == "intro":
                    return self._open_intro(ctx, a, depth)
                return self._open_elim(ctx, a, depth)
            except _GenFail:
                continue
        return self._discharge(ctx, a)

    def _open_intro(self, ctx, a, depth):
        if isinstance(a, Imp):
            x = self.fresh()
            return Lam(x, a.dom, self.open({**ctx, x: a.dom}, a.cod, depth - 1))
        if isinstance(a, (And, Sup)):
            ctor = Pair if isinstance(a, And) else SupPair
            return ctor(self.open(dict(ctx), a.left, depth - 1),
                        self.open(dict(ctx), a.right, depth - 1))
        if isinstance(a, Or):
            if self.rng.random() < 0.5:
                return Inl(a.right, self.open(dict(ctx), a.left, depth - 1))
            return Inr(a.left, self.open(dict(ctx), a.right, depth - 1))
        raise _GenFail("no context-tolerant introduction")

    def _open_elim(self, ctx, a, depth):
        kinds = [("top", 1.0), ("bot", 1.0), ("imp", self._w("imp")),
                 ("and", self._w("and")), ("or", self._w("or")),
                 ("supproj", self._w("sup")), ("dsup", self._w("dsup"))]
        kind = self._pick(kinds)
        items = list(ctx.items())
        self.rng.shuffle(items)
        cut = self.rng.randint(0, len(items))
        c1 = dict(items[:cut])
        c2 = dict(items[cut:])

        if kind == "bot":
            if not any(self.spendable(b, BOT) for b in c1.values()):
                raise _GenFail("no falsity resource")
            scrut = self.open(c1, BOT, depth - 1)
            return DBot(a, scrut)  # c2 is absorbed by the weakening

        if kind == "top":
            scrut = self.open(c1, TOP, depth - 1)
            return DTop(scrut, self.open(c2, a, depth - 1))

        if kind == "imp":
            b = self._closable_prop()
            fn = self.open(c1, Imp(b, a), depth - 1)
            return App(fn, self.open(c2, b, depth - 1))

        if kind in ("and", "supproj"):
            want = And if kind == "and" else Sup
            d = self._scrutinee_prop(c1, want)
            scrut = self.open(c1, d, depth - 1)
            y = self.fresh()
            if self.rng.random() < 0.5:
                ctor = DAnd1 if kind == "and" else DSup1
                hyp = d.left
            else:
                ctor = DAnd2 if kind == "and" else DSup2
                hyp = d.right
            return ctor(scrut, y, self.open({**c2, y: hyp}, a, depth - 1))

        want = Or if kind == "or" else Sup
        d = self._scrutinee_prop(c1, want)
        scrut = self.open(c1, d, depth - 1)
        y, z = self.fresh(), self.fresh()
        lbody = self.open({**c2, y: d.left}, a, depth - 1)
        rbody = self.open({**c2, z: d.right}, a, depth - 1)
        ctor = DOr if kind == "or" else DSup
        return ctor(scrut, y, lbody, z, rbody)

    def _scrutinee_prop(self, c1: dict, want) -> Proposition:
        owned = [b for b in c1.values() if isinstance(b, want)]
        if owned and self.rng.random() < 0.7:
            return self.rng.choice(owned)
        return want(self._closable_prop(), self._closable_prop())

    def _closable_prop(self) -> Proposition:
        for _ in range(8):
            p = self.prop(1)
            if self.closable(p):
                return p
        return TOP

    def _discharge(self, ctx: dict[str, Proposition], a: Proposition) -> Term:
        if not ctx:
            if not self.closable(a):
                raise _GenFail(f"{print_prop(a)} has no closed proof")
            return self.canonical(a)
        if len(ctx) == 1:
            (x, b), = ctx.items()
            if self.spendable(b, a):
                return self.spend(Var(x), b, a, 0, det=True)
        for x, b in ctx.items():
            if self.spendable(b, BOT):
                return DBot(a, self.spend(Var(x), b, BOT, 0, det=True))
        for x, b in ctx.items():
            if self.spendable(b, TOP):
                rest = {y: p for y, p in ctx.items() if y != x}
                return DTop(self.spend(Var(x), b, TOP, 0, det=True),
                            self._discharge(rest, a))
        raise _GenFail("cannot discharge context")

    # -- public entry points

    def closed_typed(self, depth: Optional[int] = None,
                     retries: int = 50) -> tuple[Term, Proposition]:
        for _ in range(retries):
            a = self.prop(2)
            if not self.closable(a):
                continue
            try:
                t = self.closed(a, depth if depth is not None else self.cfg.max_depth)
            except _GenFail:
                continue
            return t, a
        raise GenExhausted("no closed term found")

    def typed(self, depth: Optional[int] = None,
              retries: int = 50) -> tuple[dict[str, Proposition], Term, Proposition]:
        for _ in range(retries):
            k = self.rng.choice((0, 1, 1, 2))
            ctx = {}
            for i in range(k):
                ctx[f"h{i + 1}"] = self._context_prop()
            a = self.prop(2)
            try:
                t = self.open(dict(ctx), a,
                              depth if depth is not None else self.cfg.max_depth)
            except _GenFail:
                continue
            prop, _ = synthesize(ctx, t)  # self-validation; must not raise
            assert prop == a, "generator emitted a term of the wrong type"
            return ctx, t, a
        raise GenExhausted("no (context, term) pair found")

    def _context_prop(self) -> Proposition:
        for _ in range(12):
            p = self.prop(self.rng.choice((1, 1, 2)))
            if self.spendable(p, TOP) or self.spendable(p, BOT):
                return p
        return TOP

    def vvalue(self, shape: VShape, depth: int = 2) -> Term:
        """A random closed proof of a vector shape: encoded vectors combined
        with sums and scalings, or an arbitrary generated closed proof."""
        roll = self.rng.random()
        if depth <= 0 or roll < 0.45:
            vec = [self.scalar() for _ in range(dim(shape))]
            return encode(vec, shape)
        if roll < 0.65:
            return Sum(self.vvalue(shape, depth - 1), self.vvalue(shape, depth - 1))
        if roll < 0.8:
            return Scal(self.scalar(), self.vvalue(shape, depth - 1))
        try:
            return self.closed(shape.prop, 2)
        except _GenFail:
            return encode([self.scalar() for _ in range(dim(shape))], shape)


def generate_typed(cfg: GenConfig) -> tuple[dict[str, Proposition], Term, Proposition]:
    """One random well-typed (context, term, proposition) triple."""
    return TermGenerator(cfg).typed()


# ---------------------------------------------------------------------------
# Generic shrinking (derivation-preserving)

def _shrink_candidates(sub: Term):
    if isinstance(sub, Sum):
        yield sub.left
        yield sub.right
    if isinstance(sub, Scal):
        yield sub.body
        if sub.coeff != 1:
            yield Scal(make_scalar(1), sub.body)
    if isinstance(sub, DTop):
        yield sub.body
    if isinstance(sub, Star) and sub.coeff != 1:
        yield Star(make_scalar(1))


def shrink_term(t: Term, still_fails: Callable[[Term], bool],
                ctx: Optional[Mapping[str, Proposition]] = None,
                max_tries: int = 300) -> Term:
    """Greedy shrink keeping the term well-typed and the predicate failing."""
    tries = 0
    improved = True
    while improved and tries < max_tries:
        improved = False
        for path, sub in positions(t):
            for cand in _shrink_candidates(sub):
                tries += 1
                if tries > max_tries:
                    return t
                t2 = replace_at(t, path, cand)
                try:
                    synthesize(dict(ctx) if ctx else {}, t2)
                except TypeCheckError:
                    continue
                if still_fails(t2):
                    t = t2
                    improved = True
                    break
            if improved:
                break
    return t


# ---------------------------------------------------------------------------
# Suites

SUITE_NAMES = ("subject-reduction", "confluence", "termination", "mu-subst",
               "mu-red", "vecspace", "linearity", "introduction")


@dataclass
class CaseResult:
    index: int
    seed: int
    ok: bool
    detail: str = ""
    term: str = ""
    shrunk: str = ""


@dataclass
class SuiteReport:
    suite: str
    n: int
    seed: int
    cases: list[CaseResult]

    @property
    def failures(self) -> list[CaseResult]:
        return [c for c in self.cases if not c.ok]

    def summary(self) -> str:
        return (f"suite {self.suite}: {self.n - len(self.failures)}/{self.n} "
                f"passed (seed {self.seed})")


class _CaseFailure(Exception):
    def __init__(self, detail: str, term: Optional[Term] = None,
                 ctx: Optional[Mapping[str, Proposition]] = None,
                 still_fails: Optional[Callable[[Term], bool]] = None):
        super().__init__(detail)
        self.detail = detail
        self.term = term
        self.ctx = ctx
        self.still_fails = still_fails


def _all_steps(t: Term) -> list[tuple[tuple[int, ...], RuleId]]:
    steps = list(find_redexes(t))
    for path in find_nondet_redexes(t):
        steps.append((path, RuleId.BetaSupL))
        steps.append((path, RuleId.BetaSupR))
    return steps


def _subject_reduction_violation(ctx, t) -> Optional[str]:
    try:
        prop, usage = synthesize(ctx, t)
    except TypeCheckError:
        return None  # shrink candidate left the property's scope
    for path, rule in _all_steps(t):
        u = apply_rule_at(t, path, rule)
        try:
            prop2, usage2 = synthesize(ctx, u)
        except TypeCheckError as e:
            return f"{rule.name} at {list(path)} breaks typing: {e}"
        if prop2 != prop:
            return (f"{rule.name} at {list(path)} changes type "
                    f"{print_prop(prop)} -> {print_prop(prop2)}")
        if not usage2.used <= usage.used:
            return f"{rule.name} at {list(path)} grows the used set"
    return None


def _case_subject_reduction(seed: int, cfg: Optional[GenConfig]):
    g = TermGenerator(cfg or GenConfig(), random.Random(seed))
    ctx, t, _ = g.typed()
    bad = _subject_reduction_violation(ctx, t)
    if bad:
        raise _CaseFailure(bad, term=t, ctx=ctx,
                           still_fails=lambda t2: bool(
                               _subject_reduction_violation(ctx, t2)))


def _case_confluence(seed: int, cfg: Optional[GenConfig]):
    g = TermGenerator(cfg or ls_config(), random.Random(seed))
    t, _ = g.closed_typed()
    nf = normalize(t, budget=100000)
    for _ in range(5):
        alt = normalize_random_order(t, g.rng, budget=100000)
        if not alpha_eq(alt, nf):
            raise _CaseFailure(
                f"orders disagree: {print_term(nf)} vs {print_term(alt)}",
                term=t, ctx={}, still_fails=_confluence_fails(g.rng))


def _confluence_fails(rng):
    def check(t2):
        try:
            nf = normalize(t2, budget=100000)
            return any(not alpha_eq(normalize_random_order(t2, rng, budget=100000), nf)
                       for _ in range(5))
        except Exception:
            return False
    return check


def _case_termination(seed: int, cfg: Optional[GenConfig]):
    g = TermGenerator(cfg or det_sup_config(), random.Random(seed))
    t, _ = g.closed_typed()
    try:
        _, trace = normalize_traced(t, budget=100000)
    except StepBudgetExceeded:
        raise _CaseFailure("budget exceeded", term=t, ctx={}) from None
    size = mu(t)
    for step in trace.steps:
        nxt = mu(step.term_after)
        if nxt > size:
            raise _CaseFailure(
                f"size measure grew {size} -> {nxt} on {step.rule.name}",
                term=t, ctx={})
        size = nxt


def _case_mu_subst(seed: int, cfg: Optional[GenConfig]):
    g = TermGenerator(cfg or GenConfig(), random.Random(seed))
    for _ in range(50):
        a = g._context_prop()
        b = g.prop(2)
        try:
            t = g.open({"x": a}, b, g.cfg.max_depth)
            u = g.closed(a, 2)
        except _GenFail:
            continue
        break
    else:
        raise GenExhausted("mu-subst generation failed")
    lhs = mu(substitute(t, "x", u))
    rhs = mu(t) + mu(u)
    if lhs > rhs:
        raise _CaseFailure(f"mu(subst) = {lhs} > {rhs} = mu(t) + mu(u)",
                           term=t, ctx={"x": a})


def _case_mu_red(seed: int, cfg: Optional[GenConfig]):
    g = TermGenerator(cfg or GenConfig(), random.Random(seed))
    ctx, t, _ = g.typed()

    def violation(t2: Term) -> Optional[str]:
        m = mu(t2)
        for path, rule in _all_steps(t2):
            m2 = mu(apply_rule_at(t2, path, rule))
            if m2 > m:
                return f"mu grew {m} -> {m2} on {rule.name} at {list(path)}"
        return None

    bad = violation(t)
    if bad:
        raise _CaseFailure(bad, term=t, ctx=ctx,
                           still_fails=lambda t2: bool(violation(t2)))


def _case_vecspace(seed: int, cfg: Optional[GenConfig]):
    g = TermGenerator(cfg or det_sup_config(), random.Random(seed))
    flavor = g.rng.choice(("and", "sup"))
    shape = VShape(g.vprop(8, flavor), flavor)
    t = g.vvalue(shape)
    t1, t2, t3 = (g.vvalue(shape) for _ in range(3))
    a, b = g.scalar(), g.scalar()
    zero = zero_proof(shape)
    checks = [
        ("assoc", Sum(Sum(t1, t2), t3), Sum(t1, Sum(t2, t3))),
        ("comm", Sum(t1, t2), Sum(t2, t1)),
        ("unit", Sum(t, zero), t),
        ("inverse", Sum(t, neg_proof(shape, t)), zero),
        ("prod-assoc", Scal(a, Scal(b, t)), Scal(a * b, t)),
        ("one", Scal(make_scalar(1), t), t),
        ("distrib-sum", Scal(a, Sum(t1, t2)), Sum(Scal(a, t1), Scal(a, t2))),
        ("distrib-scalar", Scal(a + b, t), Sum(Scal(a, t), Scal(b, t))),
    ]
    for name, lhs, rhs in checks:
        if not convertible(lhs, rhs):
            raise _CaseFailure(f"axiom {name} fails on {print_term(t)}",
                               term=None)


def _case_linearity(seed: int, cfg: Optional[GenConfig]):
    g = TermGenerator(cfg or ls_config(), random.Random(seed))
    for _ in range(50):
        a = g.prop(2)
        target = Imp(a, g.vprop(6, "and"))
        if not g.closable(target) or not g.closable(a):
            continue
        try:
            f = g.closed(target, g.cfg.max_depth)
            u = g.closed(a, 2)
            v = g.closed(a, 2)
        except _GenFail:
            continue
        break
    else:
        raise GenExhausted("linearity generation failed")
    c = g.scalar()
    if not convertible(App(f, Sum(u, v)), Sum(App(f, u), App(f, v))):
        raise _CaseFailure(
            f"f (u + v) != f u + f v for f = {print_term(f)}", term=f, ctx={})
    if not convertible(App(f, Scal(c, u)), Scal(c, App(f, u))):
        raise _CaseFailure(
            f"f (a * u) != a * f u for f = {print_term(f)}", term=f, ctx={})


_INTRO_SHAPES = ((Top, (Star,)), (Imp, (Lam,)), (And, (Pair,)),
                 (Or, (Inl, Inr, Sum, Scal)), (Sup, (SupPair,)))


def _case_introduction(seed: int, cfg: Optional[GenConfig]):
    g = TermGenerator(cfg or det_sup_config(), random.Random(seed))
    t, a = g.closed_typed()
    if isinstance(a, Bot):
        raise _CaseFailure("generator produced a closed proof of void", term=t)
    nf = normalize(t, budget=100000)
    for prop_ctor, term_ctors in _INTRO_SHAPES:
        if isinstance(a, prop_ctor):
            if not isinstance(nf, term_ctors):
                raise _CaseFailure(
                    f"closed normal proof of {print_prop(a)} has head "
                    f"{type(nf).__name__}", term=t, ctx={})
            return


_SUITES = {
    "subject-reduction": _case_subject_reduction,
    "confluence": _case_confluence,
    "termination": _case_termination,
    "mu-subst": _case_mu_subst,
    "mu-red": _case_mu_red,
    "vecspace": _case_vecspace,
    "linearity": _case_linearity,
    "introduction": _case_introduction,
}


def run_suite(name: str, n: int, seed: int,
              config: Optional[GenConfig] = None) -> SuiteReport:
    """Run n seeded cases of a named suite; failures become data, with
    shrunk counterexamples where a shrink predicate is available."""
    if name not in _SUITES:
        raise ValueError(f"unknown suite {name!r}; pick one of {SUITE_NAMES}")
    fn = _SUITES[name]
    cases: list[CaseResult] = []
    for i in range(n):
        cseed = (seed * 1000003 + i) & 0x7FFFFFFF
        try:
            fn(cseed, config)
            cases.append(CaseResult(i, cseed, True))
        except _CaseFailure as f:
            shrunk = ""
            if f.term is not None and f.still_fails is not None:
                small = shrink_term(f.term, f.still_fails, f.ctx)
                shrunk = print_term(small)
            cases.append(CaseResult(i, cseed, False, f.detail,
                                    print_term(f.term) if f.term is not None else "",
                                    shrunk))
        except GenExhausted as e:
            cases.append(CaseResult(i, cseed, False, f"generation exhausted: {e}"))
    return SuiteReport(name, n, seed, cases)
