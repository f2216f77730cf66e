"""Exact evaluation of the partition sum Z: brute force and structured paths.

Z is the sum over all assignments sigma: vertices -> domain of the product
of the weight function over all scopes. The brute-force path is the oracle
(guarded by an assignment-count cap); the structured path uses a Tractable
classification to evaluate in polynomial time as a product over connected
instance pieces of sum-over-components Lambda * hom-count, and comes in
two flavors: a closed form for Lambda and an independent monomial dynamic
program kept as a cross-check.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .abelian import count_homs
from .dichotomy import Classification, FactorStructure
from .exactcore import lcm_all
from .model import CspInstance, Instance, degrees, instance_components

__all__ = [
    "DEFAULT_BRUTE_CAP",
    "CapExceeded",
    "resolve_brute_cap",
    "eval_bruteforce",
    "lambda_factor_direct",
    "MonomialTally",
    "lambda_monomial_dp",
    "ContingencyTable",
    "northwest_contingency",
    "monomial_value",
    "TermBreakdown",
    "PieceBreakdown",
    "EvalReport",
    "eval_tractable",
    "evaluate",
]

DEFAULT_BRUTE_CAP = 10_000_000
_CAP_ENV = "HYPERHOM_BRUTE_CAP"


class CapExceeded(RuntimeError):
    """Brute-force refusal: the assignment space exceeds the configured cap."""


def resolve_brute_cap(cap: int | None = None) -> int:
    if cap is not None:
        return cap
    env = os.environ.get(_CAP_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise ValueError(f"bad {_CAP_ENV} value {env!r}") from exc
    return DEFAULT_BRUTE_CAP


def _check_instance(g_r: int, inst: Instance) -> None:
    if isinstance(inst, CspInstance) and inst.equalities:
        raise ValueError(
            "instance carries equality constraints; eliminate them with the gadget tools first"
        )
    if inst.scopes and len(inst.scopes[0]) != g_r:
        raise ValueError(f"instance arity {len(inst.scopes[0])} != function arity {g_r}")


def _dfs_plan(inst: Instance) -> tuple[list[int], list[list[tuple[int, ...]]]]:
    """Vertex order greedy for early scope completion, plus, per depth, the
    scopes (as position tuples) that become fully assigned there."""
    n = inst.n
    scopes = inst.scopes
    touching: list[list[int]] = [[] for _ in range(n)]
    for si, scope in enumerate(scopes):
        for v in set(scope):
            touching[v].append(si)
    unseen = [len(set(s)) for s in scopes]
    chosen = [False] * n
    order: list[int] = []
    for _ in range(n):
        best_v, best_key = -1, None
        for v in range(n):
            if chosen[v]:
                continue
            completes = sum(1 for si in touching[v] if unseen[si] == 1)
            active = sum(1 for si in touching[v] if unseen[si] > 0)
            key = (completes, active, -v)
            if best_key is None or key > best_key:
                best_v, best_key = v, key
        order.append(best_v)
        chosen[best_v] = True
        for si in touching[best_v]:
            unseen[si] -= 1
    pos = {v: i for i, v in enumerate(order)}
    completing: list[list[tuple[int, ...]]] = [[] for _ in range(n)]
    for scope in scopes:
        positions = tuple(pos[v] for v in scope)
        completing[max(positions)].append(positions)
    return order, completing


def eval_bruteforce(g, inst: Instance, cap: int | None = None) -> Fraction:
    """Oracle evaluation by depth-first search over assignments.

    Scopes are checked as soon as their last vertex is assigned and zero
    partial products are pruned; weights are pre-scaled to integers so the
    hot loop never touches Fractions. Raises CapExceeded when q^n exceeds
    the cap (argument, then HYPERHOM_BRUTE_CAP, then the default).
    """
    _check_instance(g.r, inst)
    cap = resolve_brute_cap(cap)
    n, q = inst.n, g.q
    if q**n > cap:
        raise CapExceeded(f"{q}^{n} assignments exceed the configured cap {cap}")
    if not inst.scopes:
        return Fraction(q) ** n
    scale = lcm_all(w.denominator for w in g.weights.values())
    table = {key: int(w * scale) for key, w in g.weights.items()}
    _, completing = _dfs_plan(inst)
    sigma = [0] * n
    lookup = table.get
    total = 0

    def descend(depth: int, weight: int) -> None:
        nonlocal total
        if depth == n:
            total += weight
            return
        checks = completing[depth]
        for value in range(q):
            sigma[depth] = value
            w = weight
            for positions in checks:
                f = lookup(tuple(sorted(sigma[p] for p in positions)))
                if f is None:
                    w = 0
                    break
                w *= f
            if w:
                descend(depth + 1, w)

    descend(0, 1)
    return Fraction(total, scale ** len(inst.scopes))


def lambda_factor_direct(fs: FactorStructure, degs: Sequence[int], m_count: int) -> Fraction:
    """Closed form C^M * prod_v sum_i mu[i]^d_v.

    This is the per-component degree factor of the structured evaluation;
    the root-free form is exact because the index-0 weight is 1 and the
    constant contributes once per scope.
    """
    r = len(next(iter(fs.relation)))
    if sum(degs) != r * m_count:
        raise ValueError(f"degree sum {sum(degs)} != arity {r} * scopes {m_count}")
    out = fs.constant**m_count
    for d in degs:
        out *= sum(m**d for m in fs.mu)
    return out


@dataclass(frozen=True, eq=False)
class MonomialTally:
    """Exponent-vector histogram of index assignments.

    coeff[(M_1..M_s)] counts assignments of indices to vertices whose
    degree-weighted index loads are exactly M_i; vectors sum to rM and
    coefficients sum to s^n.
    """

    s: int
    rM: int
    coeff: Mapping[tuple[int, ...], int]


def lambda_monomial_dp(fs: FactorStructure, inst: Instance) -> tuple[MonomialTally, Fraction]:
    """Degree factor via the monomial dynamic program.

    Walks the vertices, tracking the partial exponent load of the first
    s-1 indices (the last is forced by the budget); the value recombines
    the tally through monomial_value. Cross-checks lambda_factor_direct.
    """
    m_count = len(inst.scopes)
    if m_count < 1:
        raise ValueError("instance has no scopes; edgeless pieces bypass the degree factor")
    degs = degrees(inst)
    r = len(next(iter(fs.relation)))
    s = fs.s
    states: dict[tuple[int, ...], int] = {(0,) * (s - 1): 1}
    for d in degs:
        nxt: dict[tuple[int, ...], int] = {}
        for state, cnt in states.items():
            for i in range(s - 1):
                key = state[:i] + (state[i] + d,) + state[i + 1 :]
                nxt[key] = nxt.get(key, 0) + cnt
            nxt[state] = nxt.get(state, 0) + cnt
        states = nxt
    total = r * m_count
    coeff: dict[tuple[int, ...], int] = {}
    value = Fraction(0)
    for state, cnt in sorted(states.items()):
        mvec = state + (total - sum(state),)
        coeff[mvec] = cnt
        value += cnt * monomial_value(fs, mvec)
    return MonomialTally(s, total, coeff), value


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Nonnegative integer matrix with prescribed row sums and constant
    column sums; columns read as index multisets."""

    entries: tuple[tuple[int, ...], ...]
    col_total: int

    def __post_init__(self):
        for j in range(len(self.entries[0]) if self.entries else 0):
            if sum(row[j] for row in self.entries) != self.col_total:
                raise ValueError(f"column {j} does not sum to {self.col_total}")


def northwest_contingency(row_totals: Sequence[int], col_count: int, col_total: int) -> ContingencyTable:
    """Deterministic table with the given margins, by northwest-corner fill."""
    if any(t < 0 for t in row_totals):
        raise ValueError("negative row total")
    if sum(row_totals) != col_count * col_total:
        raise ValueError(
            f"row totals sum to {sum(row_totals)}, expected {col_count} * {col_total}"
        )
    row_rem = list(row_totals)
    col_rem = [col_total] * col_count
    table = [[0] * col_count for _ in row_totals]
    for i in range(len(row_totals)):
        for j in range(col_count):
            t = min(row_rem[i], col_rem[j])
            if t:
                table[i][j] = t
                row_rem[i] -= t
                col_rem[j] -= t
    return ContingencyTable(tuple(tuple(row) for row in table), col_total)


def monomial_value(fs: FactorStructure, mvec: Sequence[int]) -> Fraction:
    """Value of one exponent vector, column by column.

    The table splits the loads into per-scope index multisets; each column
    contributes the weight of one relation member at those indices, which
    the product form gives as constant * prod mu. No r-th roots appear.
    """
    if len(mvec) != fs.s:
        raise ValueError(f"exponent vector has {len(mvec)} entries, expected {fs.s}")
    if not fs.relation:
        raise ValueError("empty relation")
    r = len(next(iter(fs.relation)))
    total = sum(mvec)
    if total % r != 0:
        raise ValueError(f"exponent total {total} not divisible by arity {r}")
    m_count = total // r
    table = northwest_contingency(mvec, m_count, r)
    value = Fraction(1)
    for j in range(m_count):
        col = Fraction(fs.constant)
        for i in range(fs.s):
            cnt = table.entries[i][j]
            if cnt:
                col *= fs.mu[i] ** cnt
        value *= col
    return value


@dataclass(frozen=True, eq=False)
class TermBreakdown:
    """One domain component's contribution on one instance piece."""

    component: tuple[int, ...]
    lam: Fraction
    homs: int

    @property
    def product(self) -> Fraction:
        return self.lam * self.homs


@dataclass(frozen=True, eq=False)
class PieceBreakdown:
    """One connected instance piece: original vertices and its factor."""

    vertices: tuple[int, ...]
    terms: tuple[TermBreakdown, ...]
    total: Fraction


@dataclass(frozen=True, eq=False)
class EvalReport:
    value: Fraction
    method: str  # "brute" | "structured" | "structured-dp"
    pieces: tuple[PieceBreakdown, ...] | None = None
    isolated: int | None = None

    def to_json(self) -> dict:
        """Machine-readable form: rationals as strings, full breakdown."""
        out: dict = {"value": str(self.value), "method": self.method}
        if self.isolated is not None:
            out["isolated_vertices"] = self.isolated
        if self.pieces is not None:
            out["pieces"] = [
                {
                    "vertices": list(piece.vertices),
                    "total": str(piece.total),
                    "terms": [
                        {
                            "component": list(term.component),
                            "lambda": str(term.lam),
                            "homs": term.homs,
                        }
                        for term in piece.terms
                    ],
                }
                for piece in self.pieces
            ]
        return out


def eval_tractable(cls: Classification, inst: Instance, method: str = "structured") -> EvalReport:
    """Polynomial-time evaluation from a Tractable classification.

    Z factors over connected instance pieces; each piece sums, over the
    domain components, the degree factor times the count of group-equation
    solutions. Isolated vertices contribute the original domain size each.
    """
    if not cls.tractable:
        raise ValueError("structured evaluation requires a Tractable classification")
    if method not in ("structured", "structured-dp"):
        raise ValueError(f"unknown method {method!r}")
    _check_instance(cls.func.r, inst)
    split = instance_components(inst)
    value = Fraction(1)
    pieces: list[PieceBreakdown] = []
    for sub, verts in split.pieces:
        degs = degrees(sub)
        m_count = len(sub.scopes)
        terms: list[TermBreakdown] = []
        total = Fraction(0)
        for comp in cls.components:
            if method == "structured":
                lam = lambda_factor_direct(comp.factor, degs, m_count)
            else:
                _, lam = lambda_monomial_dp(comp.factor, sub)
            homs = count_homs(comp.group.decomposition, comp.group.a, sub)
            terms.append(TermBreakdown(comp.factor.component, lam, homs))
            total += lam * homs
        value *= total
        pieces.append(PieceBreakdown(verts, tuple(terms), total))
    value *= Fraction(cls.func.q) ** split.isolated
    return EvalReport(value, method, tuple(pieces), split.isolated)


def evaluate(
    g,
    inst: Instance,
    method: str = "auto",
    cap: int | None = None,
    cls: Classification | None = None,
) -> tuple[EvalReport, Classification | None]:
    """Method dispatch used by the CLI.

    auto classifies and takes the structured path when Tractable, falling
    back to guarded brute force; structured/structured-dp require a
    Tractable function; brute never classifies.
    """
    from .dichotomy import classify

    if method == "brute":
        return EvalReport(eval_bruteforce(g, inst, cap), "brute"), cls
    if cls is None:
        cls = classify(g)
    if method == "auto":
        if cls.tractable:
            return eval_tractable(cls, inst, "structured"), cls
        return EvalReport(eval_bruteforce(g, inst, cap), "brute"), cls
    if method in ("structured", "structured-dp"):
        if not cls.tractable:
            raise ValueError("structured evaluation requires a Tractable function")
        return eval_tractable(cls, inst, method), cls
    raise ValueError(f"unknown method {method!r}")
