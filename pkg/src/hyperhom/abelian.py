"""Finite Abelian groups given by addition tables, and exact counting of
solutions to linear systems over Z_d.

The group side is deliberately small: orders here never exceed the domain
size of a weight function, so everything is table-driven and verified
exhaustively. The counting side has to scale to instances with thousands
of scopes, so count_solutions_mod routes between a Smith normal form
formula (small systems) and modular elimination per prime power (large
systems, with a bitset path for mod 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .exactcore import IntMatrix, SnfResult, snf
from .model import Instance

__all__ = [
    "AbelianGroup",
    "CyclicDecomposition",
    "decompose",
    "count_solutions_mod",
    "count_homs",
    "snf",
    "SnfResult",
]


@dataclass(frozen=True, eq=False)
class AbelianGroup:
    """Abelian group on {0..order-1} with an explicit addition table."""

    order: int
    add_table: tuple[tuple[int, ...], ...]
    zero: int
    neg_table: tuple[int, ...]

    @staticmethod
    def from_add_table(table: Sequence[Sequence[int]]) -> "AbelianGroup":
        n = len(table)
        rows = tuple(tuple(row) for row in table)
        if any(len(row) != n for row in rows):
            raise ValueError("addition table is not square")
        if any(x < 0 or x >= n for row in rows for x in row):
            raise ValueError("addition table entry out of range")
        zeros = [e for e in range(n) if all(rows[e][x] == x for x in range(n))]
        if len(zeros) != 1:
            raise ValueError(f"expected exactly one identity, found {zeros}")
        zero = zeros[0]
        for a in range(n):
            for b in range(a, n):
                if rows[a][b] != rows[b][a]:
                    raise ValueError(f"not commutative at ({a}, {b})")
        for a in range(n):
            for b in range(n):
                for c in range(n):
                    if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
                        raise ValueError(f"not associative at ({a}, {b}, {c})")
        neg = []
        for a in range(n):
            inv = [b for b in range(n) if rows[a][b] == zero]
            if len(inv) != 1:
                raise ValueError(f"element {a} has {len(inv)} inverses")
            neg.append(inv[0])
        return AbelianGroup(n, rows, zero, tuple(neg))

    @staticmethod
    def cyclic(n: int) -> "AbelianGroup":
        table = tuple(tuple((a + b) % n for b in range(n)) for a in range(n))
        return AbelianGroup(n, table, 0, tuple((-a) % n for a in range(n)))

    @staticmethod
    def direct_sum(*groups: "AbelianGroup") -> "AbelianGroup":
        order = math.prod(g.order for g in groups)
        sizes = [g.order for g in groups]

        def split(x: int) -> list[int]:
            out = []
            for s in reversed(sizes):
                out.append(x % s)
                x //= s
            return out[::-1]

        def join(parts: Sequence[int]) -> int:
            x = 0
            for s, p in zip(sizes, parts):
                x = x * s + p
            return x

        table = tuple(
            tuple(
                join([g.add_table[pa][pb] for g, pa, pb in zip(groups, split(a), split(b))])
                for b in range(order)
            )
            for a in range(order)
        )
        zero = join([g.zero for g in groups])
        neg = tuple(join([g.neg_table[p] for g, p in zip(groups, split(a))]) for a in range(order))
        return AbelianGroup(order, table, zero, neg)

    def add(self, a: int, b: int) -> int:
        return self.add_table[a][b]

    def neg(self, a: int) -> int:
        return self.neg_table[a]

    def scale(self, k: int, x: int) -> int:
        """k-fold sum of x (k may be any integer)."""
        if k < 0:
            return self.scale(-k, self.neg_table[x])
        acc = self.zero
        while k:
            if k & 1:
                acc = self.add_table[acc][x]
            x = self.add_table[x][x]
            k >>= 1
        return acc

    def element_order(self, x: int) -> int:
        acc = x
        k = 1
        while acc != self.zero:
            acc = self.add_table[acc][x]
            k += 1
        return k


@dataclass(frozen=True)
class CyclicDecomposition:
    """Isomorphism with a direct sum of cyclic groups.

    factors is the invariant chain d_1 | d_2 | ... | d_t (empty for the
    trivial group); iso[x] is the coordinate tuple of element x, with
    iso[x][i] in Z_{factors[i]}.
    """

    factors: tuple[int, ...]
    iso: tuple[tuple[int, ...], ...]


def decompose(group: AbelianGroup) -> CyclicDecomposition:
    """Invariant-factor decomposition by greedy maximal-order quotients.

    Each round picks a coset representative of maximal order in the
    quotient by the span built so far, shifts it inside its coset until
    its true order matches (a direct complement always exists), and
    extends the coordinate map. The result is verified exhaustively.
    """
    if group.order == 1:
        return CyclicDecomposition((), ((),))
    spans: dict[int, tuple[int, ...]] = {group.zero: ()}
    orders_desc: list[int] = []
    while len(spans) < group.order:
        best_x, best_d = -1, 0
        for x in range(group.order):
            if x in spans:
                continue
            acc, k = x, 1
            while acc not in spans:
                acc = group.add(acc, x)
                k += 1
            if k > best_d:
                best_x, best_d = x, k
        rep = next(
            (group.add(best_x, s) for s in spans if group.element_order(group.add(best_x, s)) == best_d),
            None,
        )
        if rep is None:
            raise AssertionError("no direct complement representative found")
        new_spans: dict[int, tuple[int, ...]] = {}
        step = group.zero
        for j in range(best_d):
            for s, coords in spans.items():
                new_spans[group.add(s, step)] = coords + (j,)
            step = group.add(step, rep)
        if len(new_spans) != len(spans) * best_d:
            raise AssertionError("span extension collided")
        spans = new_spans
        orders_desc.append(best_d)
    factors = tuple(reversed(orders_desc))
    iso = tuple(tuple(reversed(spans[x])) for x in range(group.order))
    _verify_decomposition(group, factors, iso)
    return CyclicDecomposition(factors, iso)


def _verify_decomposition(
    group: AbelianGroup, factors: tuple[int, ...], iso: tuple[tuple[int, ...], ...]
) -> None:
    if math.prod(factors) != group.order or len(set(iso)) != group.order:
        raise AssertionError("decomposition is not a bijection")
    for i in range(len(factors) - 1):
        if factors[i + 1] % factors[i] != 0:
            raise AssertionError(f"invariant chain broken: {factors}")
    for a in range(group.order):
        for b in range(group.order):
            want = tuple((x + y) % d for x, y, d in zip(iso[a], iso[b], factors))
            if iso[group.add(a, b)] != want:
                raise AssertionError(f"coordinate map not additive at ({a}, {b})")


# ---------------------------------------------------------------------------
# linear systems over Z_d

_SNF_CELL_LIMIT = 20_000


def count_solutions_mod(m: IntMatrix, c: Sequence[int], d: int) -> int:
    """Number of x in (Z_d)^n with M x = c over Z_d.

    Small systems go through the Smith normal form U M V = S: with
    c' = U c the count is prod_i gcd(s_i, d) * d^(n-m) when every
    congruence is satisfiable, else 0. Large systems are counted per
    prime power of d and combined by the Chinese remainder theorem.
    """
    if d < 1:
        raise ValueError(f"modulus must be positive, got {d}")
    if len(c) != m.rows:
        raise ValueError(f"right-hand side has {len(c)} entries for {m.rows} rows")
    if d == 1:
        return 1
    if m.rows * m.cols <= _SNF_CELL_LIMIT:
        return _count_via_snf(m, c, d)
    total = 1
    for p, e in _factorize(d):
        if p == 2 and e == 1:
            part = _count_gf2(m.entries, c, m.cols)
        else:
            part = _count_prime_power(m.entries, c, m.cols, p, e)
        if part == 0:
            return 0
        total *= part
    return total


def _count_via_snf(m: IntMatrix, c: Sequence[int], d: int) -> int:
    res = snf(m)
    cp = [sum(u * ci for u, ci in zip(row, c)) for row in res.U.entries]
    diag = res.S.diagonal()
    count = 1
    for i in range(m.rows):
        if i < len(diag):
            g = math.gcd(diag[i], d)
            if cp[i] % g != 0:
                return 0
            count *= g
        elif cp[i] % d != 0:
            return 0
    if m.cols > m.rows:
        count *= d ** (m.cols - m.rows)
    return count


def _factorize(d: int) -> list[tuple[int, int]]:
    out = []
    p = 2
    while p * p <= d:
        if d % p == 0:
            e = 0
            while d % p == 0:
                d //= p
                e += 1
            out.append((p, e))
        p += 1 if p == 2 else 2
    if d > 1:
        out.append((d, 1))
    return out


def _count_gf2(rows: Sequence[Sequence[int]], c: Sequence[int], ncols: int) -> int:
    """Solution count of M x = c over GF(2) via bitset row echelon."""
    aug_bit = 1 << ncols
    pivots: dict[int, int] = {}
    for row, ci in zip(rows, c):
        bits = 0
        for j, v in enumerate(row):
            if v & 1:
                bits |= 1 << j
        if ci & 1:
            bits |= aug_bit
        while bits:
            low = bits & -bits
            if low == aug_bit:
                return 0
            piv = pivots.get(low)
            if piv is None:
                pivots[low] = bits
                break
            bits ^= piv
    return 1 << (ncols - len(pivots))


def _count_prime_power(
    rows: Sequence[Sequence[int]], c: Sequence[int], ncols: int, p: int, e: int
) -> int:
    """Diagonalize over Z_{p^e} by minimum-valuation pivoting and count."""
    d = p**e
    a = [[v % d for v in row] for row in rows]
    aug = [ci % d for ci in c]
    nrows = len(a)
    row_active = list(range(nrows))
    col_active = list(range(ncols))
    pivot_vals: list[int] = []
    while True:
        best = None  # (valuation, row position, col position)
        for ri, i in enumerate(row_active):
            ai = a[i]
            for cj, j in enumerate(col_active):
                v = ai[j]
                if v == 0:
                    continue
                val = 0
                while v % p == 0:
                    v //= p
                    val += 1
                if best is None or val < best[0]:
                    best = (val, ri, cj)
                if best[0] == 0:
                    break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        val, ri, cj = best
        i = row_active.pop(ri)
        j = col_active.pop(cj)
        pv = p**val
        unit = a[i][j] // pv
        inv = pow(unit, -1, d)
        ai = a[i]
        for jj in range(ncols):
            ai[jj] = (ai[jj] * inv) % d
        aug[i] = (aug[i] * inv) % d
        for k in row_active:
            ak = a[k]
            t = ak[j] // pv
            if t:
                for jj in col_active:
                    ak[jj] = (ak[jj] - t * ai[jj]) % d
                aug[k] = (aug[k] - t * aug[i]) % d
                ak[j] = 0
        pivot_vals.append(pv)
        if aug[i] % pv != 0:
            return 0
    for k in row_active:
        if aug[k] % d != 0:
            return 0
    count = math.prod(pivot_vals)
    return count * d ** len(col_active)


def occurrence_matrix(inst: Instance) -> IntMatrix:
    """Scopes-by-vertices matrix of occurrence counts."""
    rows = []
    for scope in inst.scopes:
        row = [0] * inst.n
        for v in scope:
            row[v] += 1
        rows.append(row)
    return IntMatrix.from_rows(rows, cols=inst.n)


def count_homs(dec: CyclicDecomposition, a: int, inst: Instance) -> int:
    """Number of vertex maps into the group with every scope summing to a.

    Splitting along the cyclic decomposition turns the condition into one
    linear system per invariant factor, with the constant right-hand side
    given by the coordinates of a.
    """
    occ = occurrence_matrix(inst)
    target = dec.iso[a]
    total = 1
    for di, ci in zip(dec.factors, target):
        part = count_solutions_mod(occ, [ci] * occ.rows, di)
        if part == 0:
            return 0
        total *= part
    return total
