"""
Finite search over colorings and seeds.

A Configuration is a shape, optionally with a row selector B: the searched
point set is then the entries of B s (a subset of D(m, F, c; s)) rather
than the whole set. Partition searches and bad-coloring checks take every
seed whose point set fits the domain; find_mono scans max-norm shells out
to the domain's seed bound, lexicographically inside a shell, skipping
seeds with a zero point. An explicit seed range narrows either scan and
marks it truncated.
"""
import logging
import random
import re
import time
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

from config import settings
from errors import DimensionMismatch, UsageError
from hypergraph import EngineLimits, EngineResult, Hypergraph
from linalg import IntMatrix, add_vectors, adjugate
from polymaps import Point
from shapes import Seed, Shape, generate
from workers import search_pool

logger = logging.getLogger(__name__)


# ================ CONFIGURATIONS ================

@dataclass(frozen=True)
class Configuration:
    shape: Shape
    rows: Optional[IntMatrix] = None
    name: str = ""

    def __post_init__(self):
        if self.rows is not None and self.rows.cols != self.shape.m + 1:
            raise DimensionMismatch(
                f"row selector has {self.rows.cols} columns, shape takes {self.shape.m + 1} seed points"
            )

    @property
    def d(self) -> int:
        return self.shape.d

    @property
    def seed_length(self) -> int:
        return self.shape.m + 1

    @property
    def expected_size(self) -> int:
        return self.rows.rows if self.rows is not None else self.shape.full_size

    def points(self, seed: Sequence[Point]) -> Tuple[Point, ...]:
        if self.rows is None:
            return generate(self.shape, seed).points
        out = set()
        for i in range(self.rows.rows):
            terms = [tuple(coef * x for x in point) for coef, point in zip(self.rows.row(i), seed)]
            out.add(add_vectors(*terms))
        return tuple(sorted(out))


def as_configuration(target: Union[Shape, Configuration]) -> Configuration:
    return target if isinstance(target, Configuration) else Configuration(target)


# ================ DOMAINS AND COLORINGS ================

@dataclass(frozen=True)
class Domain:
    lo: Tuple[int, ...]
    hi: Tuple[int, ...]

    def __post_init__(self):
        if len(self.lo) != len(self.hi) or any(a > b for a, b in zip(self.lo, self.hi)):
            raise UsageError(f"bad domain bounds {self.lo}..{self.hi}")

    @property
    def d(self) -> int:
        return len(self.lo)

    @property
    def widths(self) -> Tuple[int, ...]:
        return tuple(b - a + 1 for a, b in zip(self.lo, self.hi))

    @property
    def size(self) -> int:
        out = 1
        for w in self.widths:
            out *= w
        return out

    def __contains__(self, point) -> bool:
        return len(point) == self.d and all(a <= x <= b for x, a, b in zip(point, self.lo, self.hi))

    def index(self, point: Point) -> int:
        out = 0
        for x, a, w in zip(point, self.lo, self.widths):
            out = out * w + (x - a)
        return out

    def point(self, index: int) -> Point:
        coords = []
        for a, w in zip(reversed(self.lo), reversed(self.widths)):
            index, rem = divmod(index, w)
            coords.append(a + rem)
        return tuple(reversed(coords))

    def points(self) -> Iterator[Point]:
        return product(*(range(a, b + 1) for a, b in zip(self.lo, self.hi)))

    def __str__(self) -> str:
        if self.d == 1:
            return f"[{self.lo[0]},{self.hi[0]}]"
        return " x ".join(f"[{a},{b}]" for a, b in zip(self.lo, self.hi))


def interval(n: int) -> Domain:
    """[1, n] in Z"""
    return Domain((1,), (n,))


def box(n: int, d: int) -> Domain:
    """[-n, n]^d"""
    return Domain((-n,) * d, (n,) * d)


def domain_for(d: int, n: int) -> Domain:
    return interval(n) if d == 1 else box(n, d)


@dataclass(frozen=True)
class Coloring:
    domain: Domain
    r: int
    colors: Tuple[int, ...]

    def __post_init__(self):
        if self.r < 1:
            raise UsageError("a coloring needs at least one color")
        if len(self.colors) != self.domain.size:
            raise UsageError(f"coloring has {len(self.colors)} entries for a domain of {self.domain.size} points")
        if any(not 0 <= col < self.r for col in self.colors):
            raise UsageError(f"colors must lie in [0, {self.r})")

    def __call__(self, point: Point) -> int:
        return self.colors[self.domain.index(point)]

    @classmethod
    def constant(cls, domain: Domain, r: int = 1, color: int = 0) -> "Coloring":
        return cls(domain, r, (color,) * domain.size)

    @classmethod
    def parity(cls, domain: Domain) -> "Coloring":
        return cls(domain, 2, tuple(sum(p) % 2 for p in domain.points()))

    @classmethod
    def from_function(cls, domain: Domain, r: int, fn: Callable[[Point], int]) -> "Coloring":
        return cls(domain, r, tuple(fn(p) for p in domain.points()))

    @classmethod
    def random(cls, domain: Domain, r: int, seed: int = 0) -> "Coloring":
        rng = random.Random(seed)
        return cls(domain, r, tuple(rng.randrange(r) for _ in range(domain.size)))

    def permuted(self, perm: Sequence[int]) -> "Coloring":
        return Coloring(self.domain, self.r, tuple(perm[c] for c in self.colors))

    def recolored(self, point: Point, color: int) -> "Coloring":
        colors = list(self.colors)
        colors[self.domain.index(point)] = color
        return Coloring(self.domain, max(self.r, color + 1), tuple(colors))


# ================ BUDGETS ================

@dataclass(frozen=True)
class SearchBudget:
    """seed_range None scans every seed fitting the domain; a range is an explicit override"""
    seed_range: Optional[Tuple[int, int]] = field(default_factory=lambda: settings.SEED_RANGE)
    max_nodes: int = field(default_factory=lambda: settings.MAX_NODES)
    max_seconds: float = field(default_factory=lambda: float(settings.MAX_SECONDS))
    workers: int = field(default_factory=lambda: settings.WORKERS)
    split_depth: int = field(default_factory=lambda: settings.SPLIT_DEPTH)

    def __post_init__(self):
        if self.seed_range is not None and self.seed_range[0] > self.seed_range[1]:
            raise UsageError(f"empty seed range {self.seed_range}")
        if self.max_nodes < 1 or self.max_seconds <= 0 or self.workers < 1 or self.split_depth < 0:
            raise UsageError("search limits must be positive")

    @property
    def limits(self) -> EngineLimits:
        return EngineLimits(self.max_nodes, self.max_seconds)


# ================ SEED SCAN ================

def seed_shells(length: int, d: int, seed_range: Tuple[int, int]) -> Iterator[Seed]:
    """
    Seeds of `length` points in Z^d with every coordinate in seed_range and
    no zero point, by increasing max-norm, lexicographic within a norm.
    """
    lo, hi = seed_range
    reach = max(abs(lo), abs(hi))
    total = length * d

    def shell(radius: int):
        values = range(max(lo, -radius), min(hi, radius) + 1)
        flat: List[int] = []

        def rec(pos: int, hit: bool):
            if pos == total:
                if hit:
                    yield tuple(tuple(flat[i:i + d]) for i in range(0, total, d))
                return
            for v in values:
                flat.append(v)
                # a finished point may not be zero
                if (pos + 1) % d == 0 and not any(flat[pos + 1 - d:pos + 1]):
                    flat.pop()
                    continue
                yield from rec(pos + 1, hit or abs(v) == radius)
                flat.pop()

        yield from rec(0, False)

    for radius in range(1, reach + 1):
        yield from shell(radius)


def _radius(domain: Domain) -> int:
    return max(max(abs(a), abs(b)) for a, b in zip(domain.lo, domain.hi))


def _spread(adj: IntMatrix, det: int, radius: int) -> int:
    """ceil of |c^-1 v| over |v| <= radius, with c^-1 = adj / det"""
    rows = max((sum(abs(x) for x in adj.row(i)) for i in range(adj.rows)), default=0)
    return -(-rows * radius // abs(det))


def _selector_reach(rows: IntMatrix, radius: int) -> Optional[int]:
    best = None
    for picks in combinations(range(rows.rows), rows.cols):
        inverse = adjugate(IntMatrix.from_rows([rows.row(i) for i in picks], cols=rows.cols))
        if inverse is None:
            continue
        reach = _spread(*inverse, radius)
        best = reach if best is None else min(best, reach)
    return best


def seed_reach(config: Configuration, domain: Domain) -> Optional[int]:
    """
    Max-norm bound on every seed whose point set fits the domain. None when
    no finite bound exists: a selector without full column rank, a singular
    c, or an empty family.
    """
    radius = _radius(domain)
    if config.rows is not None:
        return _selector_reach(config.rows, radius)
    shape = config.shape
    inverse = adjugate(shape.c)
    if inverse is None or any(not family for family in shape.families):
        return None
    # line k pins c(s_k) to within the domain radius of f(s_0..s_{k-1})
    reach = _spread(*inverse, radius)
    for family in shape.families:
        offset = min(f.bound(reach) for f in family)
        reach = max(reach, _spread(*inverse, radius + offset))
    return reach


def _shape_seeds(shape: Shape, domain: Domain) -> Iterator[Seed]:
    """Every seed whose D-set fits the domain; c must be invertible and no family empty"""
    adj, det = adjugate(shape.c)
    targets = list(domain.points())

    def preimages(offset: Point) -> Iterator[Point]:
        for p in targets:
            image = adj.apply(tuple(a - b for a, b in zip(p, offset)))
            if all(x % det == 0 for x in image):
                s = tuple(x // det for x in image)
                if any(s):
                    yield s

    def extend(prefix: Seed) -> Iterator[Seed]:
        k = len(prefix)
        if k == shape.m + 1:
            yield prefix
            return
        family = shape.family(k) if k else ()
        offset = family[0](*prefix) if k else (0,) * shape.d
        for s in preimages(offset):
            base = shape.c.apply(s)
            if all(add_vectors(f(*prefix), base) in domain for f in family[1:]):
                yield from extend(prefix + (s,))

    yield from extend(())


def _within(seed: Seed, seed_range: Tuple[int, int]) -> bool:
    lo, hi = seed_range
    return all(lo <= x <= hi for point in seed for x in point)


@dataclass(frozen=True)
class SeedScan:
    """
    Seeds whose point sets fit a domain. truncated: an explicit seed range
    left some out (or no bound exists); exhausted: more than the limit fit.
    """
    seeds: Tuple[Seed, ...]
    truncated: bool = False
    exhausted: bool = False


def scan_seeds(
    config: Configuration,
    domain: Domain,
    seed_range: Optional[Tuple[int, int]] = None,
    strict: bool = False,
    limit: Optional[int] = None,
) -> SeedScan:
    reach = seed_reach(config, domain)
    if reach is None:
        if seed_range is None:
            raise UsageError(
                f"{config.name or 'configuration'} has no finite seed bound on {domain}; give an explicit seed range"
            )
        candidates = seed_shells(config.seed_length, config.d, seed_range)
    elif config.rows is None:
        candidates = _shape_seeds(config.shape, domain)
    else:
        candidates = seed_shells(config.seed_length, config.d, (-reach, reach))
    seeds: List[Seed] = []
    dropped = reach is None
    for seed in candidates:
        points = config.points(seed)
        if strict and len(points) != config.expected_size:
            continue
        if not all(p in domain for p in points):
            continue
        if seed_range is not None and not _within(seed, seed_range):
            dropped = True
            continue
        seeds.append(seed)
        if limit is not None and len(seeds) > limit:
            logger.info(f"⏱️ more than {limit} seeds fit {domain}")
            return SeedScan(tuple(seeds), dropped, True)
    if dropped:
        logger.warning(f"⚠️ seed range {seed_range} does not cover every seed fitting {domain}; scan truncated")
    return SeedScan(tuple(seeds), dropped, False)


@dataclass(frozen=True)
class MonoSearch:
    seed: Optional[Seed]
    color: Optional[int]
    points: Tuple[Point, ...]
    scanned: int
    exhausted: bool
    truncated: bool = False

    @property
    def found(self) -> bool:
        return self.seed is not None


def find_mono(
    target: Union[Shape, Configuration],
    coloring: Coloring,
    budget: Optional[SearchBudget] = None,
    strict: bool = False,
) -> MonoSearch:
    """
    First seed in scan order whose point set lies in the domain and is
    monochromatic. Shells run out to the domain's seed bound unless the
    budget gives an explicit range.
    """
    config = as_configuration(target)
    budget = budget or SearchBudget()
    if config.d != coloring.domain.d:
        raise DimensionMismatch(f"shape over Z^{config.d} against a coloring of Z^{coloring.domain.d}")
    reach = seed_reach(config, coloring.domain)
    if budget.seed_range is not None:
        seed_range = budget.seed_range
        truncated = reach is None or seed_range[0] > -reach or seed_range[1] < reach
    elif reach is not None:
        seed_range, truncated = (-reach, reach), False
    else:
        raise UsageError(f"no finite seed bound on {coloring.domain}; give an explicit seed range")
    deadline = time.monotonic() + budget.max_seconds
    scanned = 0
    for seed in seed_shells(config.seed_length, config.d, seed_range):
        scanned += 1
        if scanned > budget.max_nodes or (scanned % 4096 == 0 and time.monotonic() > deadline):
            logger.info(f"⏱️ seed scan budget exhausted after {scanned - 1} seeds")
            return MonoSearch(None, None, (), scanned - 1, True, truncated)
        points = config.points(seed)
        if strict and len(points) != config.expected_size:
            continue
        if not all(p in coloring.domain for p in points):
            continue
        colors = {coloring(p) for p in points}
        if len(colors) == 1:
            logger.info(f"✅ monochromatic set {points} from seed {seed}")
            return MonoSearch(seed, colors.pop(), points, scanned, False, truncated)
    return MonoSearch(None, None, (), scanned, False, truncated)


def hypergraph_for(config: Configuration, domain: Domain, seeds: Sequence[Seed]) -> Hypergraph:
    return Hypergraph.build(domain.size, (tuple(domain.index(p) for p in config.points(s)) for s in seeds))


# ================ PARTITION NUMBERS ================

@dataclass(frozen=True)
class BadColoring:
    coloring: Coloring
    exhausted: bool = False


@dataclass(frozen=True)
class PartitionNumber:
    """
    n is the least size proven forced (None if the budget ran out first);
    bad is the bad coloring of the largest size proven insufficient.
    truncated marks a search run under an explicit seed range that left
    fitting seeds out, so neither claim is proven.
    """
    n: Optional[int]
    r: int
    proof_mode: Optional[str]
    bad: Optional[BadColoring]
    nodes: int
    truncated: bool = False

    @property
    def exhausted(self) -> bool:
        return self.n is None


def decide(
    config: Configuration, domain: Domain, r: int, budget: SearchBudget, strict: bool = False, deadline: Optional[float] = None
) -> Tuple[EngineResult, bool]:
    """
    Engine run over every seed fitting the domain: (a bad coloring or none
    when every coloring is forced, whether the seed scan was truncated).
    """
    scan = scan_seeds(config, domain, budget.seed_range, strict, limit=budget.max_nodes)
    if scan.exhausted:
        return EngineResult(None, True, 0), scan.truncated
    graph = hypergraph_for(config, domain, scan.seeds)
    logger.debug(f"{domain}: {len(scan.seeds)} seeds, {len(graph.edges)} minimal edges")
    result = search_pool.solve(graph, r, budget.limits, budget.split_depth, budget.workers, deadline)
    return result, scan.truncated


def min_partition_number(
    target: Union[Shape, Configuration],
    r: int,
    budget: Optional[SearchBudget] = None,
    strict: bool = False,
    max_n: int = 10_000,
    assume_forced_at: Optional[int] = None,
) -> PartitionNumber:
    """
    Least N such that every r-coloring of [1, N] (or [-N, N]^d) holds a
    monochromatic set. With assume_forced_at the forcing at that N is taken
    as given and only the bad coloring below it is searched.
    """
    config = as_configuration(target)
    budget = budget or SearchBudget()
    if r < 1:
        raise UsageError("need at least one color")
    deadline = time.monotonic() + budget.max_seconds
    nodes = 0
    truncated = False
    best: Optional[BadColoring] = None
    for n in range(1, max_n + 1):
        domain = domain_for(config.d, n)
        if assume_forced_at is not None and n >= assume_forced_at:
            logger.info(f"✅ N = {n} assumed forced for r = {r}")
            return PartitionNumber(n, r, "assumed", best, nodes, truncated)
        if time.monotonic() > deadline:
            break
        result, cut = decide(config, domain, r, budget, strict, deadline)
        truncated = truncated or cut
        nodes += result.nodes
        if result.coloring is not None:
            best = BadColoring(Coloring(domain, r, result.coloring), result.exhausted)
            logger.debug(f"{domain} admits a bad {r}-coloring")
            continue
        if result.exhausted:
            break
        logger.info(f"✅ N = {n} is forced for r = {r} ({nodes} nodes)")
        return PartitionNumber(n, r, "exhaustive", best, nodes, truncated)
    logger.info(f"⏱️ budget exhausted; largest insufficient size {best.coloring.domain if best else None}")
    return PartitionNumber(None, r, None, best, nodes, truncated)


def verify_bad_coloring(
    target: Union[Shape, Configuration],
    coloring: Coloring,
    seed_range: Optional[Tuple[int, int]] = None,
    strict: bool = False,
) -> Tuple[bool, Optional[Seed]]:
    """Re-scans every seed fitting the domain; returns (ok, first monochromatic seed)"""
    config = as_configuration(target)
    for seed in scan_seeds(config, coloring.domain, seed_range, strict).seeds:
        if len({coloring(p) for p in config.points(seed)}) == 1:
            return False, seed
    return True, None


# ================ RLE ================

def encode_colors(colors: Sequence[int]) -> str:
    """[0, 0, 0, 1, 1] -> 'a3b2'"""
    out = []
    i = 0
    while i < len(colors):
        j = i
        while j < len(colors) and colors[j] == colors[i]:
            j += 1
        if not 0 <= colors[i] < 26:
            raise UsageError("run-length encoding supports at most 26 colors")
        out.append(f"{chr(ord('a') + colors[i])}{j - i}")
        i = j
    return "".join(out)


def decode_colors(text: str) -> Tuple[int, ...]:
    if re.fullmatch(r"(?:[a-z]\d+)*", text) is None:
        raise UsageError(f"malformed coloring string '{text}'")
    out: List[int] = []
    for letter, count in re.findall(r"([a-z])(\d+)", text):
        out.extend([ord(letter) - ord("a")] * int(count))
    return tuple(out)

