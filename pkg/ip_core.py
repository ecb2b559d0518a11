"""
Finite IP sets: FS(x_1..x_n), their sub-IP sets along ordered blocks, and
an exhaustive probe for a finite set I in Z such that every r-coloring of I
holds a monochromatic {a} u {a + f(y_alpha) : f in F} for one alpha.

Subsets alpha of [n] are sorted tuples of 1-based indices. Repeated
generators are accepted; FS is then the set their sums collapse to.
"""
import logging
import time
from dataclasses import dataclass
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel

from errors import UsageError, Verdict, failed, passed
from hypergraph import EngineLimits, Hypergraph
from linalg import add_vectors
from polymaps import Point, PolyMap
from search import decode_colors, encode_colors
from shapes import PolyMapDocument
from workers import search_pool

logger = logging.getLogger(__name__)

Subset = Tuple[int, ...]
Block = Tuple[int, ...]


def _as_point(x: Union[int, Sequence[int]]) -> Point:
    return (x,) if isinstance(x, int) else tuple(x)


@dataclass(frozen=True)
class FiniteIP:
    generators: Tuple[Point, ...]

    def __post_init__(self):
        if not self.generators:
            raise UsageError("an IP set needs at least one generator")
        if len({len(x) for x in self.generators}) != 1:
            raise UsageError("generators differ in dimension")

    @property
    def n(self) -> int:
        return len(self.generators)

    @property
    def dim(self) -> int:
        return len(self.generators[0])

    def subsets(self) -> List[Subset]:
        return [alpha for size in range(1, self.n + 1) for alpha in combinations(range(1, self.n + 1), size)]

    def value(self, alpha: Sequence[int]) -> Point:
        if not alpha:
            raise UsageError("x_alpha needs a nonempty alpha")
        total = (0,) * self.dim
        for i in set(alpha):
            if not 1 <= i <= self.n:
                raise UsageError(f"index {i} outside [1, {self.n}]")
            total = add_vectors(total, self.generators[i - 1])
        return total

    @property
    def values(self) -> Dict[Subset, Point]:
        return {alpha: self.value(alpha) for alpha in self.subsets()}

    @property
    def points(self) -> Tuple[Point, ...]:
        return tuple(sorted(set(self.values.values())))


def fs(generators: Sequence[Union[int, Sequence[int]]]) -> FiniteIP:
    return FiniteIP(tuple(_as_point(x) for x in generators))


def check_blocks(blocks: Sequence[Sequence[int]], n: int) -> Tuple[Block, ...]:
    """Blocks must be nonempty and ordered with max of one below min of the next"""
    out = []
    for block in blocks:
        block = tuple(sorted(set(block)))
        if not block:
            raise UsageError("empty block")
        if block[0] < 1 or block[-1] > n:
            raise UsageError(f"block {block} leaves [1, {n}]")
        if out and out[-1][-1] >= block[0]:
            raise UsageError(f"blocks {out[-1]} and {block} overlap or are out of order")
        out.append(block)
    if not out:
        raise UsageError("need at least one block")
    return tuple(out)


def sub_ip(ip: FiniteIP, blocks: Sequence[Sequence[int]]) -> FiniteIP:
    """The IP set generated by (x_{alpha_1}, ..., x_{alpha_m})"""
    return FiniteIP(tuple(ip.value(block) for block in check_blocks(blocks, ip.n)))


def compose_blocks(outer: Sequence[Sequence[int]], inner: Sequence[Sequence[int]]) -> Tuple[Block, ...]:
    """Blocks of sub_ip(sub_ip(ip, outer), inner) expressed against ip"""
    outer = check_blocks(outer, max(max(b) for b in outer))
    inner = check_blocks(inner, len(outer))
    return tuple(tuple(i for j in beta for i in outer[j - 1]) for beta in inner)


# ================ PROBE ================

@dataclass(frozen=True)
class ProbeResult:
    family: Tuple[PolyMap, ...]
    y: FiniteIP
    r: int
    size: Optional[int]
    bad: Optional[Tuple[int, ...]]
    bad_size: int
    exhausted: bool

    @property
    def found(self) -> bool:
        return self.size is not None

    @property
    def interval(self) -> Optional[Tuple[int, int]]:
        return (1, self.size) if self.size is not None else None


def _check_family(family: Sequence[PolyMap], y: FiniteIP):
    if not family:
        raise UsageError("empty map family")
    for f in family:
        if f.dim != 1 or f.arity != y.dim:
            raise UsageError(f"map {f} does not send Z^{y.dim} to Z")


def probe_configurations(family: Sequence[PolyMap], y: FiniteIP, size: int) -> List[Tuple[int, ...]]:
    """Sets {a} u {a + f(y_alpha)} lying inside [1, size]"""
    shifts = []
    for alpha, point in y.values.items():
        args = [(x,) for x in point]
        shifts.append(tuple(f(*args)[0] for f in family))
    out = []
    for a in range(1, size + 1):
        for shift in shifts:
            config = (a,) + tuple(a + x for x in shift)
            if all(1 <= p <= size for p in config):
                out.append(tuple(sorted(set(config))))
    return list(dict.fromkeys(out))


def finitistic_ip_vdw_probe(
    family: Sequence[PolyMap],
    y: FiniteIP,
    r: int,
    max_size: int = 24,
    limits: EngineLimits = EngineLimits(),
    split_depth: int = 0,
    workers: int = 1,
) -> ProbeResult:
    """
    Smallest interval I = [1, L], L <= max_size, every r-coloring of which
    holds a monochromatic configuration; size None when none is certified.
    """
    _check_family(family, y)
    if r < 1:
        raise UsageError("need at least one color")
    deadline = time.monotonic() + limits.max_seconds
    bad: Optional[Tuple[int, ...]] = None
    bad_size = 0
    for size in range(1, max_size + 1):
        configs = probe_configurations(family, y, size)
        graph = Hypergraph.build(size, ([p - 1 for p in c] for c in configs))
        result = search_pool.solve(graph, r, limits, split_depth, workers, deadline)
        if result.coloring is not None:
            bad, bad_size = result.coloring, size
            continue
        if result.exhausted:
            logger.info(f"⏱️ IP probe ran out of budget at |I| = {size}")
            return ProbeResult(tuple(family), y, r, None, bad, bad_size, True)
        logger.info(f"✅ IP probe: I = [1, {size}] forces a monochromatic configuration for r = {r}")
        return ProbeResult(tuple(family), y, r, size, bad, bad_size, False)
    logger.info(f"❌ IP probe: no I within [1, {max_size}]")
    return ProbeResult(tuple(family), y, r, None, bad, bad_size, False)


def _has_mono(configs: Sequence[Tuple[int, ...]], colors: Sequence[int]) -> bool:
    return any(len({colors[p - 1] for p in c}) == 1 for c in configs)


def verify_probe(result: ProbeResult, max_colorings: int = 1 << 20) -> Verdict:
    """Brute force over every coloring, without the search engine"""
    if result.bad is not None:
        configs = probe_configurations(result.family, result.y, result.bad_size)
        if len(result.bad) != result.bad_size or _has_mono(configs, result.bad):
            return failed(f"recorded coloring of [1, {result.bad_size}] holds a monochromatic configuration")
    if result.size is None:
        return passed("no interval claimed; recorded bad coloring checked")
    if result.size > 1 and result.bad_size != result.size - 1:
        return failed(f"no bad coloring recorded for [1, {result.size - 1}]")
    if result.r ** result.size > max_colorings:
        return failed(f"{result.r ** result.size} colorings exceed the brute-force limit {max_colorings}")
    configs = probe_configurations(result.family, result.y, result.size)
    for colors in product(range(result.r), repeat=result.size):
        if not _has_mono(configs, colors):
            return failed(f"coloring {list(colors)} of [1, {result.size}] avoids every configuration")
    return passed(f"all {result.r ** result.size} colorings of [1, {result.size}] checked")


# ================ DOCUMENTS ================

class FiniteIPDocument(BaseModel):
    generators: List[List[int]]
    values: List[Tuple[List[int], List[int]]]

    @classmethod
    def from_ip(cls, ip: FiniteIP) -> "FiniteIPDocument":
        return cls(
            generators=[list(x) for x in ip.generators],
            values=[(list(alpha), list(v)) for alpha, v in ip.values.items()],
        )


class ProbeDocument(BaseModel):
    family: List[PolyMapDocument]
    y: List[List[int]]
    r: int
    size: Optional[int] = None
    bad: Optional[str] = None
    bad_size: int = 0
    exhausted: bool = False

    @classmethod
    def from_result(cls, result: ProbeResult) -> "ProbeDocument":
        return cls(
            family=[PolyMapDocument.from_map(f) for f in result.family],
            y=[list(x) for x in result.y.generators],
            r=result.r,
            size=result.size,
            bad=encode_colors(result.bad) if result.bad is not None else None,
            bad_size=result.bad_size,
            exhausted=result.exhausted,
        )

    def to_result(self) -> ProbeResult:
        return ProbeResult(
            tuple(f.to_map(1) for f in self.family),
            fs([tuple(x) for x in self.y]),
            self.r,
            self.size,
            tuple(decode_colors(self.bad)) if self.bad is not None else None,
            self.bad_size,
            self.exhausted,
        )
