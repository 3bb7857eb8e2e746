"""Compiling matrices to proof terms, and the independent arithmetic oracle.

`compile_matrix` follows the column-block construction: a one-column matrix
becomes `\\x. dtop(x, <encoded column>)`, and a wider matrix splits into the
blocks matching the input shape, one projection per block, summed.  The
administrative beta redex of the inductive step (applying the sub-proof to
the projection variable) is contracted on emission, so the 2x2 output is
literally the worked textbook term; the uncontracted form is convertible.

`matvec` and `kron` are deliberately plain loops over exact scalars with no
dependency on terms or rewriting: they are the oracle the compiled terms are
tested against.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .kernel import (App, DAnd1, DAnd2, DSup1, DSup2, DTop, Imp, Lam, Scalar,
                     Sum, Term, Top, Var, as_scalar, substitute)
from .rewrite import normalize
from .syntax import print_scalar
from .typecheck import check_closed
from .vectors import VShape, decode, dim, encode


@dataclass(frozen=True)
class Matrix:
    """Dense rectangular grid of exact scalars."""
    entries: tuple[tuple[Scalar, ...], ...]

    def __post_init__(self):
        if not self.entries or not self.entries[0]:
            raise ValueError("matrix must have at least one row and column")
        width = len(self.entries[0])
        if any(len(row) != width for row in self.entries):
            raise ValueError("ragged matrix rows")

    @staticmethod
    def from_rows(rows: Sequence[Sequence]) -> "Matrix":
        return Matrix(tuple(tuple(as_scalar(x) for x in row) for row in rows))

    @staticmethod
    def identity(n: int) -> "Matrix":
        return Matrix.from_rows([[1 if i == j else 0 for j in range(n)]
                                 for i in range(n)])

    @property
    def rows(self) -> int:
        return len(self.entries)

    @property
    def cols(self) -> int:
        return len(self.entries[0])

    def column(self, j: int) -> list[Scalar]:
        return [row[j] for row in self.entries]

    def column_block(self, start: int, stop: int) -> "Matrix":
        return Matrix(tuple(row[start:stop] for row in self.entries))

    def __str__(self) -> str:
        return "\n".join(" ".join(print_scalar(x) for x in row)
                         for row in self.entries)


def matvec(m: Matrix, u: Sequence[Scalar]) -> list[Scalar]:
    """Direct matrix-vector product; the oracle for the compiled terms."""
    if len(u) != m.cols:
        raise ValueError(f"vector length {len(u)} != {m.cols} columns")
    u = [as_scalar(x) for x in u]
    out = []
    for row in m.entries:
        acc = as_scalar(0)
        for a, x in zip(row, u):
            acc = acc + a * x
        out.append(acc)
    return out


def kron_vec(u: Sequence[Scalar], v: Sequence[Scalar]) -> list[Scalar]:
    """Kronecker product of vectors; oracle for the tensor extension."""
    return [as_scalar(a) * as_scalar(b) for a in u for b in v]


def kron(a: Matrix, b: Matrix) -> Matrix:
    rows = []
    for ra in a.entries:
        for rb in b.entries:
            rows.append([x * y for x in ra for y in rb])
    return Matrix.from_rows(rows)


def compile_matrix(m: Matrix, in_shape: VShape, out_shape: VShape) -> Term:
    """A closed proof of in -> out computing u |-> m.u on encoded vectors.

    Checked against `synthesize` after emission as a self-test.
    """
    if m.cols != dim(in_shape) or m.rows != dim(out_shape):
        raise ValueError(
            f"matrix is {m.rows}x{m.cols}, shapes have dimensions "
            f"{dim(out_shape)}x{dim(in_shape)}")
    term = _compile(m, in_shape, out_shape, _NameGen())
    check_closed(term, Imp(in_shape.prop, out_shape.prop))
    return term


class _NameGen:
    def __init__(self):
        self.counter = 0

    def trio(self) -> tuple[str, str, str]:
        # Bare x/y/z for the outermost level keeps small outputs textbook-like.
        suffix = "" if self.counter == 0 else str(self.counter)
        self.counter += 1
        return "x" + suffix, "y" + suffix, "z" + suffix


def _compile(m: Matrix, in_shape: VShape, out_shape: VShape, names: _NameGen) -> Term:
    x, y, z = names.trio()
    if isinstance(in_shape.prop, Top):
        return Lam(x, in_shape.prop, DTop(Var(x), encode(m.column(0), out_shape)))
    a, b = in_shape.parts
    cut = dim(a)
    sub1 = _compile(m.column_block(0, cut), a, out_shape, names)
    sub2 = _compile(m.column_block(cut, m.cols), b, out_shape, names)
    proj1, proj2 = (DAnd1, DAnd2) if in_shape.flavor == "and" else (DSup1, DSup2)
    left = proj1(Var(x), y, substitute(sub1.body, sub1.var, Var(y)))
    right = proj2(Var(x), z, substitute(sub2.body, sub2.var, Var(z)))
    return Lam(x, in_shape.prop, Sum(left, right))


def apply_linear(f: Term, u: Sequence[Scalar], in_shape: VShape,
                 out_shape: VShape) -> list[Scalar]:
    """Apply a closed proof of in -> out to a vector and decode the result."""
    return decode(normalize(App(f, encode(u, in_shape))), out_shape)
