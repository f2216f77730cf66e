"""Exact arithmetic primitives: rational scalars and integer matrix forms.

Everything in the package computes over exact types; floats never appear.
This module provides the rational text syntax used by all file formats,
a small immutable integer matrix, and a Smith normal form that carries
the unimodular transforms (needed to count solutions of linear systems
over Z_d).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

__all__ = [
    "Rational",
    "parse_rational",
    "format_rational",
    "IntMatrix",
    "SnfResult",
    "snf",
    "det_int",
]

Rational = Fraction

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def parse_rational(text: str) -> Fraction:
    """Parse ``num`` or ``num/den`` with the sign on the numerator only."""
    m = _RATIONAL_RE.match(text)
    if m is None:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ValueError(f"zero denominator: {text!r}")
    return Fraction(num, den)


def format_rational(x: Fraction) -> str:
    """Inverse of parse_rational; str(Fraction) already has the right shape."""
    return str(Fraction(x))


@dataclass(frozen=True)
class IntMatrix:
    """Immutable integer matrix stored as a tuple of row tuples."""

    rows: int
    cols: int
    entries: tuple[tuple[int, ...], ...]

    @staticmethod
    def from_rows(rows: Sequence[Sequence[int]], *, cols: int | None = None) -> "IntMatrix":
        data = tuple(tuple(int(x) for x in row) for row in rows)
        if data:
            width = len(data[0])
            if any(len(row) != width for row in data):
                raise ValueError("ragged rows")
        else:
            width = 0 if cols is None else cols
        if cols is not None and data and width != cols:
            raise ValueError(f"expected {cols} columns, rows have {width}")
        return IntMatrix(len(data), width, data)

    @staticmethod
    def identity(n: int) -> "IntMatrix":
        return IntMatrix(n, n, tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @staticmethod
    def zeros(m: int, n: int) -> "IntMatrix":
        return IntMatrix(m, n, tuple((0,) * n for _ in range(m)))

    def __getitem__(self, pos: tuple[int, int]) -> int:
        i, j = pos
        return self.entries[i][j]

    def mul(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        ot = list(zip(*other.entries)) if other.entries and other.entries[0] else []
        out = []
        for row in self.entries:
            if ot:
                out.append(tuple(sum(a * b for a, b in zip(row, col)) for col in ot))
            else:
                out.append((0,) * other.cols if other.cols else ())
        return IntMatrix(self.rows, other.cols, tuple(out))

    def diagonal(self) -> tuple[int, ...]:
        return tuple(self.entries[i][i] for i in range(min(self.rows, self.cols)))


def det_int(m: IntMatrix) -> int:
    """Exact determinant by Bareiss fraction-free elimination."""
    if m.rows != m.cols:
        raise ValueError("determinant of a non-square matrix")
    n = m.rows
    if n == 0:
        return 1
    a = [list(row) for row in m.entries]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


@dataclass(frozen=True)
class SnfResult:
    """Diagonalization U * M * V = S with |det U| = |det V| = 1.

    S is diagonal with nonnegative entries and s_1 | s_2 | ... | s_rank;
    rank is the number of nonzero diagonal entries.
    """

    U: IntMatrix
    S: IntMatrix
    V: IntMatrix
    rank: int


def _min_abs_nonzero(a: list[list[int]], t: int, rows: int, cols: int) -> tuple[int, int] | None:
    best: tuple[int, int] | None = None
    best_val = 0
    for i in range(t, rows):
        row = a[i]
        for j in range(t, cols):
            v = row[j]
            if v != 0 and (best is None or abs(v) < best_val):
                best = (i, j)
                best_val = abs(v)
    return best


def snf(m: IntMatrix) -> SnfResult:
    """Smith normal form with transforms.

    Pivoting picks the smallest-|value| nonzero entry of the working
    submatrix (ties: lowest row, then column), which keeps intermediate
    entries small without needing gcd tricks in the common case.
    """
    rows, cols = m.rows, m.cols
    a = [list(row) for row in m.entries]
    u = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v = [[1 if i == j else 0 for j in range(cols)] for i in range(cols)]
    t = 0
    limit = min(rows, cols)
    while t < limit:
        piv = _min_abs_nonzero(a, t, rows, cols)
        if piv is None:
            break
        while True:
            pr, pc = piv
            if pr != t:
                a[t], a[pr] = a[pr], a[t]
                u[t], u[pr] = u[pr], u[t]
            if pc != t:
                for row in a:
                    row[t], row[pc] = row[pc], row[t]
                for row in v:
                    row[t], row[pc] = row[pc], row[t]
            p = a[t][t]
            clean = True
            for i in range(t + 1, rows):
                if a[i][t] != 0:
                    q = a[i][t] // p
                    if q:
                        ai, at = a[i], a[t]
                        for j in range(t, cols):
                            ai[j] -= q * at[j]
                        ui, ut = u[i], u[t]
                        for j in range(rows):
                            ui[j] -= q * ut[j]
                    if a[i][t] != 0:
                        clean = False
            for j in range(t + 1, cols):
                if a[t][j] != 0:
                    q = a[t][j] // p
                    if q:
                        for row in a:
                            row[j] -= q * row[t]
                        for row in v:
                            row[j] -= q * row[t]
                    if a[t][j] != 0:
                        clean = False
            if clean:
                # pivot must divide the rest of the submatrix for the
                # divisibility chain; fold an offending row in and redo
                offender = None
                for i in range(t + 1, rows):
                    ai = a[i]
                    for j in range(t + 1, cols):
                        if ai[j] % p != 0:
                            offender = i
                            break
                    if offender is not None:
                        break
                if offender is None:
                    break
                at, ao = a[t], a[offender]
                for j in range(t, cols):
                    at[j] += ao[j]
                ut, uo = u[t], u[offender]
                for j in range(rows):
                    ut[j] += uo[j]
            piv = _min_abs_nonzero(a, t, rows, cols)
        t += 1
    rank = t
    for i in range(rank):
        if a[i][i] < 0:
            a[i] = [-x for x in a[i]]
            u[i] = [-x for x in u[i]]
    for i in range(rows):
        for j in range(cols):
            if i != j and a[i][j] != 0:
                raise AssertionError("smith reduction left an off-diagonal entry")
    return SnfResult(
        U=IntMatrix.from_rows(u, cols=rows),
        S=IntMatrix.from_rows(a, cols=cols),
        V=IntMatrix.from_rows(v, cols=cols),
        rank=rank,
    )


def lcm_all(values: Iterable[int]) -> int:
    """lcm of an iterable of positive integers (1 for an empty iterable)."""
    import math

    out = 1
    for v in values:
        out = math.lcm(out, v)
    return out
