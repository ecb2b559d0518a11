"""
Backtracking engine deciding whether the vertices 0..size-1 of a hypergraph
admit an r-coloring with no monochromatic edge.

Vertices are branched in index order, colors ascending, and a color may
only be opened in order (a vertex takes at most max_used + 1), so the first
coloring found is the lexicographically least canonical bad coloring.
Assigning a vertex propagates: an edge with one free vertex whose other
vertices share a color forbids that color on the free vertex.
"""
import logging
import time
from dataclasses import dataclass
from itertools import product
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

logger = logging.getLogger(__name__)

Edge = Tuple[int, ...]


@dataclass(frozen=True)
class Hypergraph:
    size: int
    edges: Tuple[Edge, ...]

    @classmethod
    def build(cls, size: int, edges: Iterable[Iterable[int]], minimize: bool = True) -> "Hypergraph":
        unique = sorted(set(tuple(sorted(set(e))) for e in edges), key=lambda e: (len(e), e))
        if minimize:
            # a coloring avoiding a mono edge also avoids every superset of it
            kept: List[Edge] = []
            by_first: Dict[int, List[frozenset]] = {}
            for edge in unique:
                as_set = frozenset(edge)
                if any(k < as_set for v in edge for k in by_first.get(v, ())):
                    continue
                kept.append(edge)
                if edge:
                    by_first.setdefault(edge[0], []).append(as_set)
            unique = kept
        return cls(size, tuple(unique))

    def is_bad(self, coloring: Sequence[int]) -> bool:
        return not any(len({coloring[v] for v in e}) == 1 for e in self.edges)


@dataclass(frozen=True)
class EngineLimits:
    max_nodes: int = 2_000_000
    max_seconds: float = 60.0


@dataclass(frozen=True)
class EngineResult:
    coloring: Optional[Tuple[int, ...]]
    exhausted: bool
    nodes: int

    @property
    def decided(self) -> bool:
        return not self.exhausted or self.coloring is not None


class _Stop(Exception):
    pass


class _Conflict(Exception):
    pass


class ColoringEngine:
    def __init__(self, graph: Hypergraph, r: int, limits: EngineLimits, deadline: Optional[float] = None):
        self.graph = graph
        self.r = r
        self.limits = limits
        self.deadline = deadline if deadline is not None else time.monotonic() + limits.max_seconds
        self.nodes = 0
        self.incidence: List[List[int]] = [[] for _ in range(graph.size)]
        for index, edge in enumerate(graph.edges):
            for v in edge:
                self.incidence[v].append(index)
        self.color = [-1] * graph.size
        self.allowed = [(1 << r) - 1] * graph.size
        self.free = [len(e) for e in graph.edges]
        self.counts = [[0] * r for _ in graph.edges]
        self.trail: List[Tuple[str, int, int]] = []
        self.max_used = -1

    # ================ STATE ================

    def _assign(self, v: int, col: int, queue: List[Tuple[int, int]]):
        self.color[v] = col
        self.trail.append(("color", v, self.max_used))
        self.max_used = max(self.max_used, col)
        for e in self.incidence[v]:
            self.free[e] -= 1
            self.counts[e][col] += 1
        for e in self.incidence[v]:
            edge = self.graph.edges[e]
            if self.counts[e][col] == len(edge):
                raise _Conflict()
            if self.free[e] == 1 and self.counts[e][col] == len(edge) - 1:
                u = next(x for x in edge if self.color[x] < 0)
                if self.allowed[u] >> col & 1:
                    self.trail.append(("allowed", u, self.allowed[u]))
                    self.allowed[u] &= ~(1 << col)
                    if not self.allowed[u]:
                        raise _Conflict()
                    if self.allowed[u] & (self.allowed[u] - 1) == 0:
                        queue.append((u, self.allowed[u].bit_length() - 1))

    def _assign_and_propagate(self, v: int, col: int):
        queue = [(v, col)]
        while queue:
            u, c = queue.pop()
            if self.color[u] >= 0:
                if self.color[u] != c:
                    raise _Conflict()
                continue
            self._assign(u, c, queue)

    def _undo(self, mark: int):
        while len(self.trail) > mark:
            kind, v, old = self.trail.pop()
            if kind == "allowed":
                self.allowed[v] = old
            else:
                col = self.color[v]
                for e in self.incidence[v]:
                    self.free[e] += 1
                    self.counts[e][col] -= 1
                self.color[v] = -1
                self.max_used = old

    # ================ SEARCH ================

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.limits.max_nodes:
            raise _Stop()
        if self.nodes % 1024 == 0 and time.monotonic() > self.deadline:
            raise _Stop()

    def _next_free(self, v: int) -> int:
        while v < self.graph.size and self.color[v] >= 0:
            v += 1
        return v

    def _branch(self, start: int) -> bool:
        """
        Depth-first over free vertices with an explicit stack of
        [vertex, next color to try, trail mark] frames.
        """
        v = self._next_free(start)
        if v == self.graph.size:
            return True
        stack = [[v, 0, len(self.trail)]]
        while stack:
            frame = stack[-1]
            v, col, mark = frame
            self._undo(mark)
            limit = min(self.r, self.max_used + 2)
            while col < limit and not self.allowed[v] >> col & 1:
                col += 1
            if col >= limit:
                stack.pop()
                continue
            frame[1] = col + 1
            self._tick()
            try:
                self._assign_and_propagate(v, col)
            except _Conflict:
                continue
            nxt = self._next_free(v + 1)
            if nxt == self.graph.size:
                return True
            stack.append([nxt, 0, len(self.trail)])
        return False

    def run(self, prefix: Sequence[int] = ()) -> EngineResult:
        if any(len(e) <= 1 for e in self.graph.edges) and self.graph.size:
            # a single point is monochromatic under every coloring
            return EngineResult(None, False, 0)
        try:
            for v, col in enumerate(prefix):
                if col > self.max_used + 1 or not self.allowed[v] >> col & 1:
                    return EngineResult(None, False, self.nodes)
                self._tick()
                self._assign_and_propagate(v, col)
            found = self._branch(len(prefix))
        except _Conflict:
            return EngineResult(None, False, self.nodes)
        except _Stop:
            logger.debug(f"engine stopped after {self.nodes} nodes")
            return EngineResult(None, True, self.nodes)
        if not found:
            return EngineResult(None, False, self.nodes)
        return EngineResult(tuple(self.color), False, self.nodes)


def find_bad_coloring(
    graph: Hypergraph,
    r: int,
    limits: EngineLimits = EngineLimits(),
    prefix: Sequence[int] = (),
    deadline: Optional[float] = None,
) -> EngineResult:
    """Lexicographically least canonical r-coloring with no monochromatic edge"""
    if r < 1:
        raise ValueError("need at least one color")
    if len(prefix) > graph.size:
        prefix = prefix[:graph.size]
    return ColoringEngine(graph, r, limits, deadline).run(prefix)


def canonical_prefixes(r: int, depth: int) -> List[Tuple[int, ...]]:
    """Color sequences of the given length that open colors in order, lexicographically"""
    out = []
    for seq in product(range(r), repeat=depth):
        opened = -1
        ok = True
        for col in seq:
            if col > opened + 1:
                ok = False
                break
            opened = max(opened, col)
        if ok:
            out.append(seq)
    return out


def merge_results(results: Sequence[EngineResult]) -> EngineResult:
    """
    Combine subtree results given in prefix order. The answer is the first
    subtree holding a bad coloring; it is the global least only when every
    earlier subtree finished.
    """
    nodes = sum(res.nodes for res in results)
    exhausted = False
    for res in results:
        if res.coloring is not None:
            return EngineResult(res.coloring, exhausted, nodes)
        exhausted = exhausted or res.exhausted
    return EngineResult(None, exhausted, nodes)
