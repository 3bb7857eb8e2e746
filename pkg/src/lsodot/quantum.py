"""Qubits as superposition-shaped proofs: norms, measurement, tensor, Deutsch.

Qubit propositions: Q(0) = unit, Q(n+1) = Q(n) @ Q(n), dimension 2^n.
States follow the unnormalized convention: any nonzero closed proof of Q(n)
denotes the qubit obtained by normalizing its decoded vector, so gates like
the Hadamard stay integer matrices and every amplitude stays exact.
Measurement probabilities are norm-square ratios, hence scale-invariant.

`measure` samples the first-qubit measurement operator: a case elimination
whose branches rebuild the state with the unobserved half zeroed out.  The
branch weights come from `norm_weigher`, which implements the probability
hook of the rewrite engine.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Optional, Sequence

from .kernel import (App, DOr, DSup, DTop, Inl, Inr, Lam, Proposition,
                     Scalar, Star, Sup, SupPair, Tensor, Term, Top, Var,
                     as_scalar, free_vars, fresh_name)
from .kernel import norm_sq as scalar_norm_sq
from .matrices import Matrix, compile_matrix, kron, matvec
from .rewrite import RuleId, Trace, is_normal, sample_normalize
from .rewrite import normalize as term_normalize
from .syntax import print_term
from .typecheck import check_closed, is_sup_shape, tensor_prop
from .vectors import VShape, encode, zero_proof


def qubit_prop(n: int) -> Proposition:
    """Q(n): unit for n = 0, Q(n-1) @ Q(n-1) above."""
    if n < 0:
        raise ValueError("qubit index must be >= 0")
    p: Proposition = Top()
    for _ in range(n):
        p = Sup(p, p)
    return p


def qubit_shape(n: int) -> VShape:
    return VShape(qubit_prop(n), "sup")


def qubit_index(t: Term) -> Optional[int]:
    """n such that t is a closed irreducible proof of Q(n), else None."""
    if isinstance(t, Star):
        return 0
    if isinstance(t, SupPair):
        left = qubit_index(t.left)
        if left is not None and left == qubit_index(t.right):
            return left + 1
    return None


def norm_sq(t: Term, n: int) -> Fraction:
    """Square of the norm of a closed irreducible proof of Q(n)."""
    if n == 0:
        if not isinstance(t, Star):
            raise ValueError(f"expected a star for a 0-qubit, got {print_term(t)}")
        return scalar_norm_sq(t.coeff)
    if not isinstance(t, SupPair):
        raise ValueError(
            f"expected a superposition pair for a {n}-qubit, got {print_term(t)}")
    return norm_sq(t.left, n - 1) + norm_sq(t.right, n - 1)


def norm_weigher(u1: Term, u2: Term) -> Fraction:
    """Probability of the left branch of a case elimination.

    The norm-square ratio when both branches are closed irreducible proofs
    of the same Q(n) with a nonzero total; exactly 1/2 otherwise.
    """
    n1, n2 = qubit_index(u1), qubit_index(u2)
    if (n1 is None or n1 != n2
            or free_vars(u1) or free_vars(u2)
            or not is_normal(u1) or not is_normal(u2)):
        return Fraction(1, 2)
    w1, w2 = norm_sq(u1, n1), norm_sq(u2, n2)
    if w1 + w2 == 0:
        return Fraction(1, 2)
    return w1 / (w1 + w2)


# ---------------------------------------------------------------------------
# Bits and the linear test combinator

def bit(b: int) -> Term:
    """0 as inl({1}.*), 1 as inr({1}.*), both of unit | unit."""
    if b == 0:
        return Inl(Top(), Star(as_scalar(1)))
    if b == 1:
        return Inr(Top(), Star(as_scalar(1)))
    raise ValueError("bit must be 0 or 1")


def test_term(t: Term, u: Term, v: Term) -> Term:
    """Case split on a bit, consuming the scrutinee's star linearly:
    dor(t, x. dtop(x, u), y. dtop(y, v)) with x, y fresh."""
    avoid = free_vars(u) | free_vars(v)
    x = fresh_name("x", avoid)
    y = fresh_name("y", avoid | {x})
    return DOr(t, x, DTop(Var(x), u), y, DTop(Var(y), v))


# ---------------------------------------------------------------------------
# Measurement

def measure_op(n: int) -> Term:
    """First-qubit measurement on Q(n): case-split the state, rebuilding it
    with the unobserved block zeroed."""
    if n < 1:
        raise ValueError("measurement needs at least one qubit")
    zero = zero_proof(qubit_shape(n - 1))
    return Lam("x", qubit_prop(n),
               DSup(Var("x"),
                    "y", SupPair(Var("y"), zero),
                    "z", SupPair(zero, Var("z"))))


def measure(state: Term, n: int, samples: int, seed: int,
            budget: Optional[int] = None) -> dict[int, int]:
    """Sample the first-qubit measurement of a closed proof of Q(n).

    Returns outcome counts {0: .., 1: ..}.  Outcome 0 is the left branch
    (first block kept).  Each sample runs under its own child seed derived
    from `seed`, so batches are reproducible and may be fanned out.
    """
    check_closed(state, qubit_prop(n))
    state = term_normalize(state, budget)
    pi = measure_op(n)
    base = random.Random(seed)
    counts = {0: 0, 1: 0}
    for _ in range(samples):
        child = random.Random(base.getrandbits(64))
        _, trace = sample_normalize(App(pi, state), child,
                                    weigher=norm_weigher, budget=budget)
        counts[_outcome_of(trace)] += 1
    return counts


def _outcome_of(trace: Trace) -> int:
    for step in trace.steps:
        if step.probability is not None:
            return 0 if step.rule is RuleId.BetaSupL else 1
    raise ValueError("no probabilistic step in trace")


# ---------------------------------------------------------------------------
# Tensor extension

def tensor(t: Term, a: VShape, u: Term, b: VShape) -> Term:
    """The tensor of two closed superposition-flavored proofs; normalizes to
    the encoding of the Kronecker product of the decoded vectors."""
    for shape in (a, b):
        if shape.flavor != "sup" or not is_sup_shape(shape.prop):
            raise ValueError("tensor operands must have sup-flavored shapes")
    check_closed(t, a.prop)
    check_closed(u, b.prop)
    return Tensor(t, u)


def tensor_shape(a: VShape, b: VShape) -> VShape:
    return VShape(tensor_prop(a.prop, b.prop), "sup")


# ---------------------------------------------------------------------------
# Deutsch's algorithm

HADAMARD = Matrix.from_rows([[1, 1], [1, -1]])  # unnormalized

ORACLES = ("c0", "c1", "id", "not")

_ORACLE_FN = {"c0": lambda x: 0, "c1": lambda x: 1,
              "id": lambda x: x, "not": lambda x: 1 - x}


def oracle_matrix(oracle: str) -> Matrix:
    """|x,y> -> |x, y xor f(x)| as a 4x4 permutation matrix."""
    if oracle not in _ORACLE_FN:
        raise ValueError(f"unknown oracle {oracle!r}; pick one of {ORACLES}")
    f = _ORACLE_FN[oracle]
    rows = [[0] * 4 for _ in range(4)]
    for x in range(2):
        for y in range(2):
            rows[2 * x + (y ^ f(x))][2 * x + y] = 1
    return Matrix.from_rows(rows)


def deutsch_state(oracle: str) -> Term:
    """The two-qubit state just before measurement, as a closed Q(2) proof."""
    q2 = qubit_shape(2)
    hh = compile_matrix(kron(HADAMARD, HADAMARD), q2, q2)
    uf = compile_matrix(oracle_matrix(oracle), q2, q2)
    hi = compile_matrix(kron(HADAMARD, Matrix.identity(2)), q2, q2)
    init = encode([0, 1, 0, 0], q2)  # |01>
    return term_normalize(App(hi, App(uf, App(hh, init))))


def deutsch_statevector_oracle(oracle: str) -> tuple[Fraction, Fraction]:
    """Outcome distribution computed by plain linear algebra, no terms."""
    sv: Sequence[Scalar] = [as_scalar(v) for v in (0, 1, 0, 0)]
    for m in (kron(HADAMARD, HADAMARD), oracle_matrix(oracle),
              kron(HADAMARD, Matrix.identity(2))):
        sv = matvec(m, sv)
    w0 = scalar_norm_sq(sv[0]) + scalar_norm_sq(sv[1])
    w1 = scalar_norm_sq(sv[2]) + scalar_norm_sq(sv[3])
    total = w0 + w1
    return w0 / total, w1 / total


def deutsch_demo(oracle: str, samples: int = 1000, seed: int = 0) -> dict[int, int]:
    """Sampled outcome counts of Deutsch's algorithm: constant oracles give
    outcome 0 always, balanced oracles give outcome 1 always."""
    return measure(deutsch_state(oracle), 2, samples, seed)
