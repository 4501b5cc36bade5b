"""Finite quivers Q_{n,m}(Z_p) of the relation n*y = m*x (mod p).

Vertices are the residues 0..p-1 written additively; an edge (x, y) has
range x and source y.  Fibres carry normalized counting measure, so a quiver
isomorphism is exactly a digraph isomorphism that commutes with range and
source maps.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from math import gcd
from typing import Iterator

from .numt import DomainError, divisor_count, inverse_mod, mult_order

Edge = tuple[int, int]


@dataclass(frozen=True)
class CyclicQuiver:
    p: int
    n: int
    m: int
    edges: frozenset[Edge] = field(repr=False)

    def out_map(self) -> dict[int, list[int]]:
        """Range vertex -> sorted list of source vertices."""
        adj: dict[int, list[int]] = {v: [] for v in range(self.p)}
        for x, y in sorted(self.edges):
            adj[x].append(y)
        return adj

    def to_json(self) -> str:
        return json.dumps(
            {"p": self.p, "n": self.n, "m": self.m, "edges": [list(e) for e in sorted(self.edges)]}
        )

    @classmethod
    def from_json(cls, text: str) -> "CyclicQuiver":
        data = json.loads(text)
        q = build(data["p"], data["n"], data["m"])
        if {tuple(e) for e in data["edges"]} != q.edges:
            raise DomainError("edge list does not match n*y = m*x (mod p)")
        return q


def build(p: int, n: int, m: int) -> CyclicQuiver:
    if p < 1:
        raise DomainError(f"modulus must be >= 1, got {p}")
    n, m = n % p, m % p
    edges = frozenset((x, y) for x in range(p) for y in range(p) if (n * y - m * x) % p == 0)
    return CyclicQuiver(p, n, m, edges)


def reverse(q: CyclicQuiver) -> CyclicQuiver:
    """Swap range and source; the result is Q_{m,n}(Z_p)."""
    return CyclicQuiver(q.p, q.m, q.n, frozenset((y, x) for x, y in q.edges))


def sink_source_report(q: CyclicQuiver) -> tuple[bool, bool]:
    """``(sinkless, sourceless)``: source map onto, range map onto."""
    ranges = {x for x, _ in q.edges}
    sources = {y for _, y in q.edges}
    return len(sources) == q.p, len(ranges) == q.p


# -- isomorphism -------------------------------------------------------------


def _refine(q: CyclicQuiver) -> list[int]:
    """Colour refinement (1-WL on the directed graph with loops marked)."""
    succ: dict[int, list[int]] = {v: [] for v in range(q.p)}
    pred: dict[int, list[int]] = {v: [] for v in range(q.p)}
    for x, y in q.edges:
        succ[x].append(y)
        pred[y].append(x)
    colour = [0] * q.p
    palette: dict[tuple, int] = {}
    for _ in range(q.p + 1):
        sigs = [
            (
                colour[v],
                (v, v) in q.edges,
                tuple(sorted(colour[u] for u in succ[v])),
                tuple(sorted(colour[u] for u in pred[v])),
            )
            for v in range(q.p)
        ]
        # shared palette keeps colours comparable across the two quivers
        new = [palette.setdefault(s, len(palette)) for s in sigs]
        if len(set(new)) == len(set(colour)) and _same_partition(new, colour):
            return new
        colour = new
    return colour


def _same_partition(a: list[int], b: list[int]) -> bool:
    return len(set(zip(a, b))) == len(set(a)) == len(set(b))


def _canonical_colours(q1: CyclicQuiver, q2: CyclicQuiver) -> tuple[list[int], list[int]] | None:
    """Jointly refined colourings; ``None`` when the histograms already differ."""
    if q1.p != q2.p or len(q1.edges) != len(q2.edges):
        return None
    # disjoint union so colour names agree between the two graphs
    p = q1.p
    union = CyclicQuiver(2 * p, 0, 0, frozenset(q1.edges | {(x + p, y + p) for x, y in q2.edges}))
    col = _refine(union)
    c1, c2 = col[:p], col[p:]
    if Counter(c1) != Counter(c2):
        return None
    return c1, c2


def invariants(q: CyclicQuiver) -> tuple:
    """Cheap isomorphism invariant used for bucketing."""
    indeg = Counter(y for _, y in q.edges)
    outdeg = Counter(x for x, _ in q.edges)
    loops = sum(1 for x, y in q.edges if x == y)
    degs = sorted((outdeg[v], indeg[v], (v, v) in q.edges) for v in range(q.p))
    return (q.p, len(q.edges), loops, tuple(degs), tuple(sorted(_component_sizes(q))))


def isomorphic(q1: CyclicQuiver, q2: CyclicQuiver) -> tuple[dict[int, int], dict[Edge, Edge]] | None:
    """Return ``(vertex_map, edge_map)`` commuting with range and source, or ``None``."""
    if invariants(q1) != invariants(q2):
        return None
    cols = _canonical_colours(q1, q2)
    if cols is None:
        return None
    c1, c2 = cols
    p = q1.p
    E1, E2 = q1.edges, q2.edges
    order = sorted(range(p), key=lambda v: (sum(1 for w in range(p) if c1[w] == c1[v]), v))
    by_colour: dict[int, list[int]] = {}
    for v in range(p):
        by_colour.setdefault(c2[v], []).append(v)
    mapping: dict[int, int] = {}
    used: set[int] = set()

    def consistent(v: int, w: int) -> bool:
        if ((v, v) in E1) != ((w, w) in E2):
            return False
        for u, img in mapping.items():
            if ((v, u) in E1) != ((w, img) in E2) or ((u, v) in E1) != ((img, w) in E2):
                return False
        return True

    def extend(i: int) -> bool:
        if i == p:
            return True
        v = order[i]
        for w in by_colour.get(c1[v], ()):
            if w not in used and consistent(v, w):
                mapping[v] = w
                used.add(w)
                if extend(i + 1):
                    return True
                del mapping[v]
                used.discard(w)
        return False

    if not extend(0):
        return None
    vmap = dict(sorted(mapping.items()))
    emap = {e: (vmap[e[0]], vmap[e[1]]) for e in sorted(E1)}
    check_witness(q1, q2, vmap, emap)
    return vmap, emap


def check_witness(q1: CyclicQuiver, q2: CyclicQuiver, vmap: dict[int, int], emap: dict[Edge, Edge]) -> None:
    """Raise ``AssertionError`` unless the witness is a quiver isomorphism."""
    assert sorted(vmap) == list(range(q1.p)) and sorted(vmap.values()) == list(range(q2.p))
    assert set(emap) == set(q1.edges) and set(emap.values()) == set(q2.edges)
    assert len(set(emap.values())) == len(emap)
    for (x, y), (x2, y2) in emap.items():
        # range and source commute with the vertex map
        assert vmap[x] == x2 and vmap[y] == y2


# -- Z_p structure ---------------------------------------------------------


def _component_sizes(q: CyclicQuiver) -> list[int]:
    return [len(c) for c in weak_components(q)]


def weak_components(q: CyclicQuiver) -> list[list[int]]:
    parent = list(range(q.p))

    def find(v: int) -> int:
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for x, y in q.edges:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)
    comps: dict[int, list[int]] = {}
    for v in range(q.p):
        comps.setdefault(find(v), []).append(v)
    return sorted(comps.values())


def loop_base_points(p: int, n: int, k: int) -> int:
    """Vertices fixed by the k-th power of y -> n*y, i.e. gcd(n^k - 1, p)."""
    if gcd(n, p) != 1:
        raise DomainError(f"gcd({n}, {p}) != 1")
    if k < 1:
        raise DomainError("loop length must be >= 1")
    # gcd(0, p) == p counts every vertex when n^k = 1 (mod p)
    return gcd((pow(n, k, p) - 1) % p, p)


def _permutation(p: int, n: int, m: int) -> list[int]:
    for name, c in (("n", n), ("m", m)):
        if gcd(c, p) != 1:
            raise DomainError(f"coefficient {name}={c} is not coprime to p={p}")
    step = inverse_mod(n, p) * m % p
    # edge (x, y) with y = n^-1 m x
    return [step * x % p for x in range(p)]


def cycle_structure(p: int, n: int, m: int) -> dict[int, int]:
    """Histogram {cycle length: number of cycles} of x -> n^-1 m x on Z_p."""
    perm = _permutation(p, n, m)
    seen = [False] * p
    hist: Counter[int] = Counter()
    for start in range(p):
        if seen[start]:
            continue
        length, v = 0, start
        while not seen[v]:
            seen[v] = True
            v = perm[v]
            length += 1
        hist[length] += 1
    return dict(sorted(hist.items()))


@dataclass(frozen=True)
class DecompositionReport:
    """Direct sum of M_k(C(T)) blocks: ``summands`` is [(k, multiplicity), ...]."""

    summands: tuple[tuple[int, int], ...]

    @property
    def total(self) -> int:
        return sum(k * c for k, c in self.summands)

    def render(self) -> str:
        parts = []
        for k, c in self.summands:
            block = "C(T)" if k == 1 else f"M{k}(C(T))"
            parts.append(block if c == 1 else f"{block}^{c}")
        return " ⊕ ".join(parts)

    def as_dict(self) -> dict:
        return {"summands": [{"block_size": k, "multiplicity": c} for k, c in self.summands], "total": self.total}


def algebra_decomposition(p: int, n: int, m: int) -> DecompositionReport:
    return DecompositionReport(tuple(cycle_structure(p, n, m).items()))


def qnn_components(p: int, n: int) -> tuple[int, int]:
    """``(p/g, g)`` with ``g = gcd(n, p)``, checked against the actual components."""
    if p < 1:
        raise DomainError(f"modulus must be >= 1, got {p}")
    n %= p
    g = gcd(n, p)  # n == 0 gives g == p: one copy of Q_{0,0}(Z_p)
    q = build(p, n, n)
    comps = weak_components(q)
    for comp in comps:
        inside = sum(1 for x, y in q.edges if x in comp)
        if len(comp) != g or inside != g * g:
            raise AssertionError(f"component {comp} is not a copy of Q_(0,0)(Z_{g})")
    if len(comps) != p // g:
        raise AssertionError(f"expected {p // g} components, found {len(comps)}")
    return p // g, g


@dataclass
class CensusClass:
    representative: tuple[int, int]
    members: list[tuple[int, int]]

    @property
    def size(self) -> int:
        return len(self.members)


def census(p: int) -> list[CensusClass]:
    """Isomorphism classes of all p^2 quivers Q_{n,m}(Z_p), ordered by representative."""
    if p < 1:
        raise DomainError(f"modulus must be >= 1, got {p}")
    classes: list[CensusClass] = []
    quivers: list[CyclicQuiver] = []
    buckets: dict[tuple, list[int]] = {}
    for n, m in _pairs(p):
        q = build(p, n, m)
        key = invariants(q)
        for idx in buckets.get(key, []):
            if isomorphic(quivers[idx], q) is not None:
                classes[idx].members.append((n, m))
                break
        else:
            buckets.setdefault(key, []).append(len(classes))
            classes.append(CensusClass((n, m), [(n, m)]))
            quivers.append(q)
    return classes


def _pairs(p: int) -> Iterator[tuple[int, int]]:
    for n in range(p):
        for m in range(p):
            yield n, m


def census_closed_form(p: int) -> int:
    """Class count predicted for prime p: number of divisors of p-1, plus 3."""
    return divisor_count(p - 1) + 3


def order_of_ratio(p: int, n: int, m: int) -> int:
    return 1 if p == 1 else mult_order(inverse_mod(n, p) * m % p, p)
