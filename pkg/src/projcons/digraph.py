"""Weighted dependency digraphs and their forest structure.

An arc ``(i, j, w)`` means agent ``i`` depends on agent ``j`` with strength
``w``; it corresponds to the entry ``a_ij = w`` of the dependency matrix.
Vertices are 0-based here; the command line converts to and from 1-based.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .exceptions import EnumerationLimitError
from .matrix_kernel import as_fraction

__all__ = [
    "ComponentStructure",
    "InForest",
    "MAX_ENUMERATION_VERTICES",
    "WeightedDigraph",
    "enumerate_max_in_forests",
    "forest_matrix",
    "has_spanning_in_tree",
    "random_digraph",
    "strongly_connected_components",
]

MAX_ENUMERATION_VERTICES = 10


@dataclass(frozen=True)
class WeightedDigraph:
    """Digraph on vertices ``0..n-1`` with strictly positive arc weights."""

    n: int
    arcs: tuple = ()
    exact: bool = True
    _out: tuple = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a digraph needs at least one vertex")
        conv = as_fraction if self.exact else float
        arcs = []
        seen = set()
        for i, j, w in self.arcs:
            i, j = int(i), int(j)
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise ValueError(f"arc ({i}, {j}) has a vertex outside 0..{self.n - 1}")
            if i == j:
                raise ValueError(f"self-loop at vertex {i}")
            if (i, j) in seen:
                raise ValueError(f"duplicate arc ({i}, {j})")
            w = conv(w)
            if not w > 0:
                raise ValueError(f"arc ({i}, {j}) has non-positive weight {w}")
            seen.add((i, j))
            arcs.append((i, j, w))
        arcs.sort(key=lambda a: (a[0], a[1]))
        object.__setattr__(self, "arcs", tuple(arcs))
        out = [[] for _ in range(self.n)]
        for i, j, w in arcs:
            out[i].append((j, w))
        object.__setattr__(self, "_out", tuple(tuple(o) for o in out))

    @classmethod
    def from_matrix(cls, A, exact: Optional[bool] = None) -> "WeightedDigraph":
        """Digraph of a dependency matrix (arc wherever ``a_ij > 0``).

        ``exact`` defaults to whether ``A`` is an exact (object) array.
        """
        A = np.asarray(A)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("dependency matrix must be square")
        if exact is None:
            exact = A.dtype == object or np.issubdtype(A.dtype, np.integer)
        arcs = [(i, j, A[i, j]) for i in range(A.shape[0])
                for j in range(A.shape[1]) if i != j and A[i, j] > 0]
        return cls(A.shape[0], tuple(arcs), exact=exact)

    def out_arcs(self, v: int) -> tuple:
        return self._out[v]

    def successors(self, v: int):
        return [j for j, _ in self._out[v]]

    def to_matrix(self) -> np.ndarray:
        if self.exact:
            A = np.full((self.n, self.n), Fraction(0), dtype=object)
        else:
            A = np.zeros((self.n, self.n))
        for i, j, w in self.arcs:
            A[i, j] = w
        return A


@dataclass(frozen=True)
class ComponentStructure:
    """Strong components, their condensation, and the final classes.

    ``components`` are sorted by smallest vertex; ``condensation`` holds
    component-index pairs; ``final`` lists indices of components with no
    outgoing condensation arc.
    """

    components: tuple
    condensation: frozenset
    final: tuple
    component_of: tuple

    @property
    def final_classes(self) -> tuple:
        return tuple(self.components[c] for c in self.final)

    @property
    def d(self) -> int:
        return len(self.final)


def _tarjan(n, successors):
    index = {}
    low = {}
    on_stack = set()
    stack = []
    counter = itertools.count()
    sccs = []

    def connect(v):
        index[v] = low[v] = next(counter)
        stack.append(v)
        on_stack.add(v)
        for w in successors(v):
            if w not in index:
                connect(w)
                low[v] = min(low[v], low[w])
            elif w in on_stack:
                low[v] = min(low[v], index[w])
        if low[v] == index[v]:
            comp = []
            while True:
                w = stack.pop()
                on_stack.discard(w)
                comp.append(w)
                if w == v:
                    break
            sccs.append(tuple(sorted(comp)))

    for v in range(n):
        if v not in index:
            connect(v)
    return sccs


def strongly_connected_components(g: WeightedDigraph) -> ComponentStructure:
    comps = sorted(_tarjan(g.n, g.successors), key=lambda c: c[0])
    comp_of = [0] * g.n
    for k, comp in enumerate(comps):
        for v in comp:
            comp_of[v] = k
    cond = frozenset((comp_of[i], comp_of[j]) for i, j, _ in g.arcs
                     if comp_of[i] != comp_of[j])
    has_out = {a for a, _ in cond}
    final = tuple(k for k in range(len(comps)) if k not in has_out)
    return ComponentStructure(tuple(comps), cond, final, tuple(comp_of))


def has_spanning_in_tree(g: WeightedDigraph) -> bool:
    return strongly_connected_components(g).d == 1


@dataclass(frozen=True)
class InForest:
    """Spanning in-forest: ``parent[v]`` is v's out-neighbour or None for a root."""

    parent: tuple
    weight: object

    @property
    def arcs(self) -> tuple:
        return tuple((v, p) for v, p in enumerate(self.parent) if p is not None)

    @property
    def roots(self) -> tuple:
        """Root (sink) of the tree containing each vertex."""
        out = []
        for v in range(len(self.parent)):
            while self.parent[v] is not None:
                v = self.parent[v]
            out.append(v)
        return tuple(out)

    @property
    def n_trees(self) -> int:
        return sum(p is None for p in self.parent)


def enumerate_max_in_forests(g: WeightedDigraph,
                             max_vertices: int = MAX_ENUMERATION_VERTICES) -> list:
    """All spanning in-forests with the maximum number of arcs, ``n - d``.

    Every vertex either stays a root or picks one of its out-arcs; partial
    choices that close a cycle or exceed ``d`` roots are pruned.  Output
    order is deterministic (lexicographic in the per-vertex choices).
    """
    if g.n > max_vertices:
        raise EnumerationLimitError(
            f"forest enumeration is limited to {max_vertices} vertices (got {g.n})"
        )
    d = strongly_connected_components(g).d
    one = Fraction(1) if g.exact else 1.0
    parent = [None] * g.n
    forests = []

    def closes_cycle(v, head):
        u = head
        while u is not None:
            if u == v:
                return True
            u = parent[u]
        return False

    def extend(v, roots, weight):
        if v == g.n:
            if roots == d:
                forests.append(InForest(tuple(parent), weight))
            return
        if roots < d:
            extend(v + 1, roots + 1, weight)
        for j, w in g.out_arcs(v):
            if closes_cycle(v, j):
                continue
            parent[v] = j
            extend(v + 1, roots, weight * w)
            parent[v] = None

    extend(0, 0, one)
    return forests


def forest_matrix(g: WeightedDigraph,
                  max_vertices: int = MAX_ENUMERATION_VERTICES) -> np.ndarray:
    """Normalized matrix of maximum in-forests.

    Entry ``(k, s)`` is the total weight of maximum in-forests in which ``k``
    lies in a tree rooted at ``s``, divided by the total weight of all of
    them.  Exact when the digraph is exact.
    """
    forests = enumerate_max_in_forests(g, max_vertices)
    zero = Fraction(0) if g.exact else 0.0
    F = np.full((g.n, g.n), zero, dtype=object if g.exact else float)
    total = zero
    for f in forests:
        total += f.weight
        for k, s in enumerate(f.roots):
            F[k, s] += f.weight
    return F / total


def random_digraph(n: int, density: float = 0.3, weights=(1, 3),
                   rng=None) -> WeightedDigraph:
    """Random exact digraph: each ordered pair is an arc with probability
    ``density`` and gets an integer weight drawn uniformly from ``weights``
    (inclusive bounds)."""
    rng = np.random.default_rng(rng)
    lo, hi = weights
    arcs = []
    for i in range(n):
        for j in range(n):
            if i != j and rng.random() < density:
                arcs.append((i, j, int(rng.integers(lo, hi + 1))))
    return WeightedDigraph(n, tuple(arcs))
