"""Core objects: symmetric weight functions, instances, and their file formats.

A weight function assigns a nonnegative rational to every size-r multiset
over the domain {0..q-1}; instances are r-uniform hypergraphs (distinct
vertices per edge) or constraint lists (repeats allowed, plus optional
equality constraints that only the gadget tools consume).

Text formats are line based, with '#' starting a comment anywhere:

    symfunc v1          hypergraph v1       csp v1
    q 2                 n 3                 n 3
    r 3                 e 0 1 2             c 0 0 1
    0 0 0 = 1                               eq 0 2
    0 1 1 = 1/2

Weight lines list the multiset in non-decreasing order; absent multisets
weigh 0. Hypergraph edges are strictly increasing and may not repeat in a
file; constraint lines may repeat (a multiset of scopes).
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations_with_replacement
from typing import Iterator, Mapping, Sequence, Union

from .exactcore import format_rational, parse_rational

__all__ = [
    "FormatError",
    "SymFunc",
    "Hypergraph",
    "CspInstance",
    "Instance",
    "MarginalTable",
    "PruneResult",
    "InstanceComponents",
    "orderings_count",
    "load_symfunc",
    "dump_symfunc",
    "load_hypergraph",
    "dump_hypergraph",
    "load_csp",
    "dump_csp",
    "load_instance",
    "marginalize",
    "prune_domain",
    "domain_components",
    "instance_components",
    "degrees",
]


class FormatError(ValueError):
    """Malformed input text; carries the 1-based line number."""

    def __init__(self, line: int, message: str):
        super().__init__(f"line {line}: {message}")
        self.line = line


@dataclass(frozen=True, eq=False)
class SymFunc:
    """Symmetric function on size-r multisets over {0..q-1}.

    weights holds only the nonzero entries, keyed by sorted tuples.
    """

    q: int
    r: int
    weights: Mapping[tuple[int, ...], Fraction]

    @staticmethod
    def from_weights(q: int, r: int, weights: Mapping[Sequence[int], Fraction | int]) -> "SymFunc":
        if q < 1:
            raise ValueError(f"domain size must be positive, got {q}")
        if r < 3:
            raise ValueError(f"arity must be at least 3, got {r}")
        table: dict[tuple[int, ...], Fraction] = {}
        for key, w in weights.items():
            k = tuple(sorted(int(z) for z in key))
            if len(k) != r:
                raise ValueError(f"key {k} has arity {len(k)}, expected {r}")
            if any(z < 0 or z >= q for z in k):
                raise ValueError(f"key {k} out of domain range 0..{q - 1}")
            w = Fraction(w)
            if w < 0:
                raise ValueError(f"negative weight {w} at {k}")
            if k in table:
                raise ValueError(f"duplicate key {k}")
            if w != 0:
                table[k] = w
        return SymFunc(q, r, table)

    def value(self, key: Sequence[int]) -> Fraction:
        return self.weights.get(tuple(sorted(key)), _ZERO)

    def keys(self) -> Iterator[tuple[int, ...]]:
        """All size-r multisets over the domain, in lexicographic order."""
        return combinations_with_replacement(range(self.q), self.r)

    def support(self) -> list[tuple[int, ...]]:
        return sorted(self.weights)


_ZERO = Fraction(0)


@dataclass(frozen=True)
class Hypergraph:
    """Uniform hypergraph; every edge lists distinct vertices in increasing
    order. Edges form a multiset (gadget constructions may duplicate them)."""

    n: int
    edges: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative vertex count")
        arity = None
        for e in self.edges:
            if arity is None:
                arity = len(e)
            elif len(e) != arity:
                raise ValueError(f"mixed edge arities {arity} and {len(e)}")
            if len(e) < 1 or any(e[i] >= e[i + 1] for i in range(len(e) - 1)):
                raise ValueError(f"edge {e} is not strictly increasing")
            if e[0] < 0 or e[-1] >= self.n:
                raise ValueError(f"edge {e} out of vertex range 0..{self.n - 1}")

    @property
    def arity(self) -> int | None:
        return len(self.edges[0]) if self.edges else None

    @property
    def scopes(self) -> tuple[tuple[int, ...], ...]:
        return self.edges


@dataclass(frozen=True)
class CspInstance:
    """Constraint instance: scopes may repeat vertices and whole lines; the
    equalities are auxiliary variable-identification pairs (evaluation
    rejects them, the gadget tools eliminate them)."""

    n: int
    scopes: tuple[tuple[int, ...], ...]
    equalities: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("negative variable count")
        arity = None
        for s in self.scopes:
            if arity is None:
                arity = len(s)
            elif len(s) != arity:
                raise ValueError(f"mixed scope arities {arity} and {len(s)}")
            if len(s) < 1 or any(v < 0 or v >= self.n for v in s):
                raise ValueError(f"scope {s} out of variable range 0..{self.n - 1}")
        for u, w in self.equalities:
            if not (0 <= u < self.n and 0 <= w < self.n):
                raise ValueError(f"equality ({u}, {w}) out of variable range")

    @property
    def arity(self) -> int | None:
        return len(self.scopes[0]) if self.scopes else None


Instance = Union[Hypergraph, CspInstance]


def orderings_count(key: Sequence[int]) -> int:
    """Number of distinct orderings of a multiset (multinomial coefficient)."""
    counts = Counter(key)
    out = math.factorial(len(key))
    for c in counts.values():
        out //= math.factorial(c)
    return out


# ---------------------------------------------------------------------------
# file formats


def _content_lines(text: str) -> Iterator[tuple[int, str]]:
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            yield lineno, line


def _expect_header(lines: Iterator[tuple[int, str]], expected: str) -> None:
    try:
        lineno, line = next(lines)
    except StopIteration:
        raise FormatError(1, f"empty file, expected header {expected!r}") from None
    if line != expected:
        raise FormatError(lineno, f"expected header {expected!r}, got {line!r}")


def _keyword_int(lines: Iterator[tuple[int, str]], keyword: str) -> int:
    try:
        lineno, line = next(lines)
    except StopIteration:
        raise FormatError(0, f"missing '{keyword} <int>' line") from None
    parts = line.split()
    if len(parts) != 2 or parts[0] != keyword:
        raise FormatError(lineno, f"expected '{keyword} <int>', got {line!r}")
    try:
        return int(parts[1])
    except ValueError:
        raise FormatError(lineno, f"bad integer {parts[1]!r}") from None


def load_symfunc(text: str) -> SymFunc:
    lines = _content_lines(text)
    _expect_header(lines, "symfunc v1")
    q = _keyword_int(lines, "q")
    r = _keyword_int(lines, "r")
    if q < 1:
        raise FormatError(2, f"domain size must be positive, got {q}")
    if r < 3:
        raise FormatError(3, f"arity must be at least 3, got {r}")
    weights: dict[tuple[int, ...], Fraction] = {}
    for lineno, line in lines:
        if "=" not in line:
            raise FormatError(lineno, f"expected '<z1> .. <zr> = <weight>', got {line!r}")
        left, _, right = line.partition("=")
        try:
            key = tuple(int(tok) for tok in left.split())
        except ValueError:
            raise FormatError(lineno, f"bad element list {left.strip()!r}") from None
        if len(key) != r:
            raise FormatError(lineno, f"key has {len(key)} elements, expected {r}")
        if any(z < 0 or z >= q for z in key):
            raise FormatError(lineno, f"element out of range 0..{q - 1} in {key}")
        if any(key[i] > key[i + 1] for i in range(r - 1)):
            raise FormatError(lineno, f"key {key} is not in non-decreasing order")
        try:
            w = parse_rational(right.strip())
        except ValueError as exc:
            raise FormatError(lineno, str(exc)) from None
        if w < 0:
            raise FormatError(lineno, f"negative weight {w}")
        if key in weights:
            raise FormatError(lineno, f"duplicate key {key}")
        weights[key] = w
    return SymFunc.from_weights(q, r, weights)


def dump_symfunc(g: SymFunc) -> str:
    out = ["symfunc v1", f"q {g.q}", f"r {g.r}"]
    for key in sorted(g.weights):
        out.append(" ".join(map(str, key)) + " = " + format_rational(g.weights[key]))
    return "\n".join(out) + "\n"


def load_hypergraph(text: str) -> Hypergraph:
    lines = _content_lines(text)
    _expect_header(lines, "hypergraph v1")
    n = _keyword_int(lines, "n")
    if n < 0:
        raise FormatError(2, f"vertex count must be nonnegative, got {n}")
    edges: list[tuple[int, ...]] = []
    seen: set[tuple[int, ...]] = set()
    arity = None
    for lineno, line in lines:
        parts = line.split()
        if parts[0] != "e":
            raise FormatError(lineno, f"expected 'e <v1> ..', got {line!r}")
        try:
            e = tuple(int(tok) for tok in parts[1:])
        except ValueError:
            raise FormatError(lineno, f"bad vertex list {line!r}") from None
        if len(e) < 1:
            raise FormatError(lineno, "empty edge")
        if any(e[i] >= e[i + 1] for i in range(len(e) - 1)):
            raise FormatError(lineno, f"edge {e} is not strictly increasing")
        if e[0] < 0 or e[-1] >= n:
            raise FormatError(lineno, f"edge {e} out of vertex range 0..{n - 1}")
        if arity is None:
            arity = len(e)
        elif len(e) != arity:
            raise FormatError(lineno, f"edge arity {len(e)} differs from {arity}")
        if e in seen:
            raise FormatError(lineno, f"duplicate edge {e}")
        seen.add(e)
        edges.append(e)
    return Hypergraph(n, tuple(edges))


def dump_hypergraph(h: Hypergraph) -> str:
    seen = set()
    for e in h.edges:
        if e in seen:
            raise ValueError(f"duplicate edge {e}: multigraphs have no file form")
        seen.add(e)
    out = ["hypergraph v1", f"n {h.n}"]
    out.extend("e " + " ".join(map(str, e)) for e in h.edges)
    return "\n".join(out) + "\n"


def load_csp(text: str) -> CspInstance:
    lines = _content_lines(text)
    _expect_header(lines, "csp v1")
    n = _keyword_int(lines, "n")
    if n < 0:
        raise FormatError(2, f"variable count must be nonnegative, got {n}")
    scopes: list[tuple[int, ...]] = []
    equalities: list[tuple[int, int]] = []
    arity = None
    for lineno, line in lines:
        parts = line.split()
        try:
            vs = tuple(int(tok) for tok in parts[1:])
        except ValueError:
            raise FormatError(lineno, f"bad vertex list {line!r}") from None
        if any(v < 0 or v >= n for v in vs):
            raise FormatError(lineno, f"variable out of range 0..{n - 1} in {line!r}")
        if parts[0] == "c":
            if len(vs) < 1:
                raise FormatError(lineno, "empty scope")
            if arity is None:
                arity = len(vs)
            elif len(vs) != arity:
                raise FormatError(lineno, f"scope arity {len(vs)} differs from {arity}")
            scopes.append(vs)
        elif parts[0] == "eq":
            if len(vs) != 2:
                raise FormatError(lineno, f"expected 'eq <u> <w>', got {line!r}")
            equalities.append((vs[0], vs[1]))
        else:
            raise FormatError(lineno, f"expected 'c ..' or 'eq ..', got {line!r}")
    return CspInstance(n, tuple(scopes), tuple(equalities))


def dump_csp(inst: CspInstance) -> str:
    out = ["csp v1", f"n {inst.n}"]
    out.extend("c " + " ".join(map(str, s)) for s in inst.scopes)
    out.extend(f"eq {u} {w}" for u, w in inst.equalities)
    return "\n".join(out) + "\n"


def load_instance(text: str) -> Instance:
    """Dispatch on the header line: hypergraph or csp."""
    for _, line in _content_lines(text):
        if line == "hypergraph v1":
            return load_hypergraph(text)
        if line == "csp v1":
            return load_csp(text)
        raise FormatError(1, f"unknown instance header {line!r}")
    raise FormatError(1, "empty file")


# ---------------------------------------------------------------------------
# marginals, pruning, components


@dataclass(frozen=True, eq=False)
class MarginalTable:
    """Sum of a weight function over all ordered completions of a k-multiset.

    values holds only nonzero entries keyed by sorted k-tuples; the support
    of this table is the arity-k co-occurrence relation of the function.
    """

    q: int
    k: int
    values: Mapping[tuple[int, ...], Fraction]

    def value(self, key: Sequence[int]) -> Fraction:
        return self.values.get(tuple(sorted(key)), _ZERO)

    def support(self) -> list[tuple[int, ...]]:
        return sorted(self.values)


def marginalize(g: SymFunc, k: int) -> MarginalTable:
    """Table of f(z1..zk) = sum over ordered (r-k)-tuples w of g(z, w).

    Completions are grouped by multiset and weighted by their number of
    orderings, so the result is exact for the ordered-sum definition.
    """
    if not 1 <= k <= g.r:
        raise ValueError(f"marginal arity {k} outside 1..{g.r}")
    values: dict[tuple[int, ...], Fraction] = {}
    if k == g.r:
        values.update(g.weights)
        return MarginalTable(g.q, k, values)
    completions = [
        (w, orderings_count(w)) for w in combinations_with_replacement(range(g.q), g.r - k)
    ]
    for key in combinations_with_replacement(range(g.q), k):
        total = _ZERO
        for w, mult in completions:
            gv = g.weights.get(tuple(sorted(key + w)))
            if gv is not None:
                total += mult * gv
        if total:
            values[key] = total
    return MarginalTable(g.q, k, values)


@dataclass(frozen=True)
class PruneResult:
    """Restriction of a function to elements with nonzero unary marginal.

    func is renumbered to the surviving domain; kept[i] is the original id
    of new element i, removed lists the dropped originals.
    """

    func: SymFunc
    kept: tuple[int, ...]
    removed: tuple[int, ...]


def prune_domain(g: SymFunc) -> PruneResult:
    f1 = marginalize(g, 1)
    kept = tuple(z for z in range(g.q) if (z,) in f1.values)
    removed = tuple(z for z in range(g.q) if (z,) not in f1.values)
    if not removed:
        return PruneResult(g, kept, removed)
    if not kept:
        return PruneResult(SymFunc(0, g.r, {}), kept, removed)
    renum = {old: new for new, old in enumerate(kept)}
    keep_set = set(kept)
    weights = {
        tuple(renum[z] for z in key): w
        for key, w in g.weights.items()
        if keep_set.issuperset(key)
    }
    out = SymFunc.from_weights(len(kept), g.r, weights)
    check = marginalize(out, 1)
    if len(check.values) != out.q:
        raise AssertionError("pruning left an element with zero unary marginal")
    return PruneResult(out, kept, removed)


def domain_components(g: SymFunc) -> tuple[tuple[int, ...], ...]:
    """Connected components of the binary co-occurrence relation.

    Requires a pruned function (every element has positive unary marginal);
    components are sorted by least element, each listed ascending.
    """
    f1 = marginalize(g, 1)
    missing = [z for z in range(g.q) if (z,) not in f1.values]
    if missing:
        raise ValueError(f"domain not pruned: zero unary marginal at {missing}")
    parent = list(range(g.q))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for pair in marginalize(g, 2).support():
        a, b = find(pair[0]), find(pair[1])
        if a != b:
            parent[max(a, b)] = min(a, b)
    groups: dict[int, list[int]] = {}
    for z in range(g.q):
        groups.setdefault(find(z), []).append(z)
    return tuple(tuple(groups[root]) for root in sorted(groups))


@dataclass(frozen=True)
class InstanceComponents:
    """Connected pieces of an instance plus the count of scope-free vertices.

    Each piece is (sub-instance, vertices) with vertices[new_id] = old_id.
    """

    pieces: tuple[tuple[Instance, tuple[int, ...]], ...]
    isolated: int


def degrees(inst: Instance) -> tuple[int, ...]:
    """Occurrence count of each vertex across all scopes (with multiplicity)."""
    d = [0] * inst.n
    for scope in inst.scopes:
        for v in scope:
            d[v] += 1
    return tuple(d)


def instance_components(inst: Instance) -> InstanceComponents:
    parent = list(range(inst.n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for scope in inst.scopes:
        base = find(scope[0])
        for v in scope[1:]:
            root = find(v)
            if root != base:
                a, b = min(base, root), max(base, root)
                parent[b] = a
                base = a
    deg = degrees(inst)
    isolated = sum(1 for v in range(inst.n) if deg[v] == 0)
    members: dict[int, list[int]] = {}
    for v in range(inst.n):
        if deg[v] > 0:
            members.setdefault(find(v), []).append(v)
    scope_groups: dict[int, list[tuple[int, ...]]] = {root: [] for root in members}
    for scope in inst.scopes:
        scope_groups[find(scope[0])].append(scope)
    eq_groups: dict[int, list[tuple[int, int]]] = {root: [] for root in members}
    if isinstance(inst, CspInstance):
        for u, w in inst.equalities:
            ru, rw = find(u), find(w)
            if ru != rw or deg[u] == 0 or deg[w] == 0:
                raise ValueError(f"equality ({u}, {w}) does not stay inside one component")
            eq_groups[ru].append((u, w))
    pieces = []
    for root in sorted(members):
        verts = tuple(members[root])
        renum = {old: new for new, old in enumerate(verts)}
        scopes = tuple(tuple(renum[v] for v in s) for s in scope_groups[root])
        if isinstance(inst, Hypergraph):
            piece: Instance = Hypergraph(len(verts), scopes)
        else:
            eqs = tuple((renum[u], renum[w]) for u, w in eq_groups[root])
            piece = CspInstance(len(verts), scopes, eqs)
        pieces.append((piece, verts))
    return InstanceComponents(tuple(pieces), isolated)
