"""Every rewrite rule, strategy behavior, sampling, traces."""

import random
from fractions import Fraction

import pytest

from lsodot.kernel import (App, Lam, Scal, Star, Sum, SupPair, Top, Var,
                           alpha_eq, make_scalar)
from lsodot.rewrite import (NONDETERMINISTIC, RULES, RuleId,
                            StepBudgetExceeded, StuckOnNondeterminism,
                            apply_rule_at, convertible, find_nondet_redexes,
                            find_redexes, half_weigher, is_normal, normalize,
                            normalize_random_order, normalize_traced, replay,
                            root_step, sample_normalize, step_at)
from lsodot.syntax import parse_term


def t_(text):
    return parse_term(text, allow_tensor=True)


def fired(text):
    hit = root_step(t_(text))
    assert hit is not None, text
    return hit


def test_rule_table_covers_the_enum_exactly():
    assert set(RULES) == set(RuleId)
    assert set(NONDETERMINISTIC) == {RuleId.BetaSupL, RuleId.BetaSupR}


# one unit test per rule ----------------------------------------------------

def test_beta_top():
    rule, out = fired("dtop({2}.*, {3}.*)")
    assert rule is RuleId.BetaTop and out == t_("{2}*{3}.*")


def test_beta_arrow():
    rule, out = fired("(\\x:unit. x) {5}.*")
    assert rule is RuleId.BetaArrow and out == t_("{5}.*")


def test_beta_and1():
    rule, out = fired("dand1(<{1}.*, {2}.*>, x. dtop(x, {3}.*))")
    assert rule is RuleId.BetaAnd1 and out == t_("dtop({1}.*, {3}.*)")


def test_beta_and2():
    rule, out = fired("dand2(<{1}.*, {2}.*>, x. dtop(x, {3}.*))")
    assert rule is RuleId.BetaAnd2 and out == t_("dtop({2}.*, {3}.*)")


def test_beta_or1():
    rule, out = fired("dor(inl[void]({1}.*), x. dtop(x, {3}.*), y. dtop(y, {4}.*))")
    assert rule is RuleId.BetaOr1 and out == t_("dtop({1}.*, {3}.*)")


def test_beta_or2():
    rule, out = fired("dor(inr[void]({1}.*), x. dtop(x, {3}.*), y. dtop(y, {4}.*))")
    assert rule is RuleId.BetaOr2 and out == t_("dtop({1}.*, {4}.*)")


def test_sum_star():
    rule, out = fired("{2}.* + {3}.*")
    assert rule is RuleId.SumStar and out == Star(make_scalar(5))


def test_sum_lam():
    rule, out = fired("(\\x:unit. x) + (\\y:unit. dtop(y, {1}.*))")
    assert rule is RuleId.SumLam
    assert alpha_eq(out, t_("\\x:unit. x + dtop(x, {1}.*)"))


def test_sum_lam_avoids_capture():
    left = Lam("x", Top(), Var("x"))
    right = Lam("y", Top(), Sum(Var("y"), Var("x")))  # free x on the right
    hit = root_step(Sum(left, right))
    assert hit is not None
    rule, out = hit
    assert rule is RuleId.SumLam
    assert out.var != "x" and "x" in {v for v in ("x",)}  # binder renamed
    assert alpha_eq(out, Lam("z", Top(), Sum(Var("z"), Sum(Var("z"), Var("x")))))


def test_sum_pair():
    rule, out = fired("<{1}.*, {2}.*> + <{3}.*, {4}.*>")
    assert rule is RuleId.SumPair
    assert out == t_("<{1}.* + {3}.*, {2}.* + {4}.*>")


def test_or_comm_sum():
    rule, out = fired("dor(inl[void]({1}.*) + inr[unit]({2}.*), x. x, y. dbot[unit](y))")
    assert rule is RuleId.OrCommSum
    assert out == t_("dor(inl[void]({1}.*), x. x, y. dbot[unit](y))"
                     " + dor(inr[unit]({2}.*), x. x, y. dbot[unit](y))")


def test_prod_star():
    rule, out = fired("{2}*{3}.*")
    assert rule is RuleId.ProdStar and out == Star(make_scalar(6))


def test_prod_lam():
    rule, out = fired("{2}*(\\x:unit. x)")
    assert rule is RuleId.ProdLam and out == t_("\\x:unit. {2}*x")


def test_prod_pair():
    rule, out = fired("{2}*<{1}.*, {3}.*>")
    assert rule is RuleId.ProdPair and out == t_("<{2}*{1}.*, {2}*{3}.*>")


def test_or_comm_prod():
    rule, out = fired("dor({2}*inl[void]({1}.*), x. x, y. dbot[unit](y))")
    assert rule is RuleId.OrCommProd
    assert out == t_("{2}*dor(inl[void]({1}.*), x. x, y. dbot[unit](y))")


def test_beta_sup1():
    rule, out = fired("dsup1([{1}.*, {2}.*], x. dtop(x, {3}.*))")
    assert rule is RuleId.BetaSup1 and out == t_("dtop({1}.*, {3}.*)")


def test_beta_sup2():
    rule, out = fired("dsup2([{1}.*, {2}.*], x. dtop(x, {3}.*))")
    assert rule is RuleId.BetaSup2 and out == t_("dtop({2}.*, {3}.*)")


def test_beta_sup_left_right_via_apply_rule():
    t = t_("dsup([{1}.*, {2}.*], x. x, y. y)")
    assert apply_rule_at(t, (), RuleId.BetaSupL) == t_("{1}.*")
    assert apply_rule_at(t, (), RuleId.BetaSupR) == t_("{2}.*")


def test_sum_sup():
    rule, out = fired("[{1}.*, {2}.*] + [{3}.*, {4}.*]")
    assert rule is RuleId.SumSup
    assert out == t_("[{1}.* + {3}.*, {2}.* + {4}.*]")


def test_prod_sup():
    rule, out = fired("{2}*[{1}.*, {3}.*]")
    assert rule is RuleId.ProdSup
    assert out == t_("[{2}*{1}.*, {2}*{3}.*]")


def test_tensor_sup():
    rule, out = fired("[{1}.*, {2}.*] >< [{3}.*, {4}.*]")
    assert rule is RuleId.TensorSup
    assert out == t_("[{1}.* >< [{3}.*, {4}.*], {2}.* >< [{3}.*, {4}.*]]")


def test_tensor_star():
    rule, out = fired("{2}.* >< [{3}.*, {4}.*]")
    assert rule is RuleId.TensorStar
    assert out == t_("{2}*[{3}.*, {4}.*]")


# step_at and positions ------------------------------------------------------

def test_step_at_root_and_inside():
    t = t_("dtop({2}.*, {3}.*)")
    assert step_at(t, ()) == t_("{2}*{3}.*")
    t2 = t_("<dtop({2}.*, {3}.*), {4}.*>")
    assert step_at(t2, (0,)) == t_("<{2}*{3}.*, {4}.*>")
    assert step_at(t2, (1,)) is None
    with pytest.raises(IndexError):
        step_at(t2, (5,))


def test_step_at_example_scal_suppair():
    t = Scal(make_scalar(2), SupPair(Var("t"), Var("u")))
    out = step_at(t, ())
    assert out == SupPair(Scal(make_scalar(2), Var("t")),
                          Scal(make_scalar(2), Var("u")))


def test_step_at_never_fires_nondet():
    t = t_("dsup([{1}.*, {2}.*], x. x, y. y)")
    assert step_at(t, ()) is None
    assert find_nondet_redexes(t) == [()]


# normalization ---------------------------------------------------------------

def test_normalize_dtop():
    assert normalize(t_("dtop({2}.*, {3}.*)")) == t_("{6}.*")


def test_normalize_matrix_example():
    t = t_("(\\x:unit&unit. dand1(x, y. dtop(y, <{1}.*, {2}.*>))"
           " + dand2(x, z. dtop(z, <{3}.*, {4}.*>))) <{5}.*, {7}.*>")
    assert normalize(t) == t_("<{26}.*, {38}.*>")


def test_normalize_under_binders():
    t = t_("(\\x:unit. \\y:unit->unit. y x) ({1}.* + {2}.*)")
    assert alpha_eq(normalize(t), t_("\\y:unit->unit. y {3}.*"))


def test_normalize_is_deterministic_leftmost_outermost():
    t = t_("dtop({2}.* + {3}.*, dtop({1}.*, {4}.*))")
    nf, trace = normalize_traced(t)
    assert nf == t_("{20}.*")
    assert trace.steps[0].rule is RuleId.SumStar  # leftmost redex first
    assert replay(trace) == nf


def test_normalize_raises_on_nondet():
    t = t_("dsup([{1}.*, {1}.*], x. x, y. y)")
    with pytest.raises(StuckOnNondeterminism):
        normalize(t)
    # inner redexes are still reduced before the case fires
    t2 = t_("dsup([dtop({1}.*, {2}.*), {1}.*], x. x, y. y)")
    with pytest.raises(StuckOnNondeterminism):
        normalize(t2)


def test_open_scrutinee_is_not_a_nondet_redex():
    t = t_("\\q:unit. dsup([q, {1}.*], x. x, y. y)")
    assert is_normal(t)
    assert find_nondet_redexes(t) == []


def test_budget_exceeded():
    t = t_("(\\x:unit. \\y:unit->unit. y x) ({1}.* + {2}.*)")
    with pytest.raises(StepBudgetExceeded):
        normalize(t, budget=1)


def test_sample_normalize_zero_weight_forces_branch():
    t = t_("dsup([{1}.*, {0}.*], x. x, y. y)")
    from lsodot.quantum import norm_weigher
    for seed in range(20):
        nf, _ = sample_normalize(t, random.Random(seed), weigher=norm_weigher)
        assert nf == t_("{1}.*")


def test_sample_normalize_balanced_within_band():
    # 10000 seeded runs of measuring [1,1]: binomial 3-sigma band
    from lsodot.quantum import measure_op, norm_weigher
    t = App(measure_op(1), t_("[{1}.*, {1}.*]"))
    rng = random.Random(20260809)
    first = 0
    for _ in range(10000):
        nf, _ = sample_normalize(t, rng, weigher=norm_weigher)
        if nf == t_("[{1}.*, {0}.*]"):
            first += 1
        else:
            assert nf == t_("[{0}.*, {1}.*]")
    assert 0.45 <= first / 10000 <= 0.55


def test_sample_normalize_bit_identical_with_same_seed():
    t = t_("dsup([{1}.*, {1}.*], x. [x, {0}.*], y. [{0}.*, y])")
    a = sample_normalize(t, random.Random(99))
    b = sample_normalize(t, random.Random(99))
    assert a == b  # includes the Trace


def test_sample_trace_records_probability_and_replays():
    t = t_("dsup([{1}.*, {2}.*], x. x, y. y)")
    from lsodot.quantum import norm_weigher
    nf, trace = sample_normalize(t, random.Random(4), weigher=norm_weigher)
    probs = [s.probability for s in trace.steps if s.probability is not None]
    assert probs and probs[0] in (Fraction(1, 5), Fraction(4, 5))
    assert replay(trace) == nf


def test_default_weigher_is_half():
    assert half_weigher(Star(make_scalar(1)), Star(make_scalar(2))) == Fraction(1, 2)


def test_convertible_examples():
    assert convertible(t_("<{1}.*, {2}.*> + <{3}.*, {4}.*>"), t_("<{4}.*, {6}.*>"))
    assert not convertible(t_("\\y:unit->unit. y {3}.*"),
                           t_("\\y:unit->unit. (y {1}.*) + (y {2}.*)"))
    t = t_("dtop({2}.*, {3}.*)")
    assert convertible(t, t)


def test_random_order_agrees_with_leftmost():
    rng = random.Random(8)
    t = t_("dtop({1}.* + {2}.*, <{1}.*,{2}.*> + <{3}.*,{4}.*>)"
           " + dtop({2}.*, <{0}.*, {1}.*>)")
    nf = normalize(t)
    for _ in range(10):
        assert alpha_eq(normalize_random_order(t, rng), nf)


def test_find_redexes_order_is_leftmost_outermost():
    t = t_("dtop({1}.* + {2}.*, {3}.* + {4}.*)")
    paths = [p for p, _ in find_redexes(t)]
    assert paths == [(0,), (1,)]


def test_convertible_propagates_nondeterminism():
    t = t_("dsup([{1}.*, {1}.*], x. x, y. y)")
    with pytest.raises(StuckOnNondeterminism):
        convertible(t, t_("{1}.*"))
