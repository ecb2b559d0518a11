"""
The constructive lift of a shape (m, F, c) to a shape (M, H, C) such that in
any r-coloring of an (M, H, C)-set whose last k lines are each monochromatic
there sits an (m, F, c)-set whose last k+1 lines are each monochromatic,
and its iteration to a shape all of whose r-colorings contain a
monochromatic (m, F, c)-set.

Notation follows the construction: q = m - k, <n> = {0, ..., n-1},
N = n q, M = N + k, T_i = (t_{iq}, ..., t_{iq+q-1}) and C = c b, where b
and the a_f (c a_f = f (b, ..., b)) come from the concordance witness.
Seeds u of the small set are

    u_j = sum_{i in A} b(t_{iq+j})                 for 0 <= j < q
    u_q = sum_{i in B} a_{w_i}(T_i) + b(t_N)       (empty sum when B is empty)
    u_j = b(t_{M-m+j})                             for q < j <= m

for a variable word w over F_q with A its STAR positions and B = <n> - A.
"""
import logging
import random
from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Any, Callable, Dict, List, Mapping, Optional, Sequence, Tuple, Union

from pydantic import BaseModel

from config import settings
from errors import BudgetExhausted, ConcordanceFailure, UsageError, VerificationFailure
from hales_jewett import STAR, find_mono_line, hj_number, lines, render, words
from hypergraph import EngineLimits
from linalg import IntMatrix
from polymaps import Point, PolyMap
from shapes import (
    ConfigSet, Concordance, Seed, Shape, ShapeDocument, concordance_witness, generate, normalize_for_lift,
)
from workers import search_pool

logger = logging.getLogger(__name__)

ColorFn = Callable[[Point], int]
BigColoring = Union[ColorFn, Mapping[Point, int]]


def _color_fn(coloring: BigColoring) -> ColorFn:
    if isinstance(coloring, Mapping):
        return lambda p: coloring[tuple(p)]
    return coloring


def _embed(d: int, width: int, start: int, block: IntMatrix) -> IntMatrix:
    """d x (width d) matrix holding block at argument position start"""
    rows = [[0] * (width * d) for _ in range(d)]
    for r in range(d):
        for col in range(block.cols):
            rows[r][start * d + col] = block[r, col]
    return IntMatrix.from_rows(rows, cols=width * d)


def _sum(d: int, width: int, terms: Sequence[IntMatrix]) -> IntMatrix:
    total = IntMatrix.zeros(d, width * d)
    for term in terms:
        total = total + term
    return total


# ================ PLAN ================

class LiftPlan:
    def __init__(self, shape: Shape, r: int, k: int, n: int, concordance: Concordance):
        if not 0 <= k <= shape.m - 1:
            raise UsageError(f"k must lie in [0, {shape.m - 1}], got {k}")
        if n < 1:
            raise UsageError(f"HJ length must be positive, got {n}")
        self.shape = shape
        self.r = r
        self.k = k
        self.n = n
        self.concordance = concordance
        self.q = shape.m - k
        self.N = n * self.q
        self.M = self.N + k
        self.C = shape.c @ concordance.b
        self._families: Dict[int, Tuple[PolyMap, ...]] = {}

    @property
    def d(self) -> int:
        return self.shape.d

    @property
    def letters(self) -> Tuple[PolyMap, ...]:
        """F_q; letter l of a word stands for letters[l - 1]"""
        return self.shape.family(self.q)

    def _a(self, letter: int) -> IntMatrix:
        return self.concordance.witnesses[self.q - 1][letter - 1]

    # ================ SEEDS ================

    def u_matrices(self, word: Sequence[int], width: int, count: int) -> List[IntMatrix]:
        """u_0..u_{count-1} as d x (width d) matrices acting on (t_0..t_{width-1})"""
        d, q, b = self.d, self.q, self.concordance.b
        stars = [i for i, x in enumerate(word) if x == STAR]
        out = []
        for j in range(count):
            if j < q:
                out.append(_sum(d, width, [_embed(d, width, i * q + j, b) for i in stars]))
            elif j == q:
                terms = [_embed(d, width, self.N, b)]
                terms += [_embed(d, width, i * q, self._a(x)) for i, x in enumerate(word) if x != STAR]
                out.append(_sum(d, width, terms))
            else:
                out.append(_embed(d, width, self.M - self.shape.m + j, b))
        return out

    # ================ FAMILIES ================

    def family_size(self, L: int) -> int:
        """Map count of H_L before deduplication"""
        K = len(self.letters)
        if L < self.N:
            a, j = divmod(L, self.q)
            return (len(self.shape.family(j)) if j else 1) * 2 ** a
        if L == self.N:
            return K ** self.n
        j = L - (self.M - self.shape.m)
        return len(self.shape.family(j)) * ((K + 1) ** self.n - K ** self.n)

    def size_estimate(self) -> int:
        return sum(self.family_size(L) for L in range(1, self.M + 1))

    def family(self, L: int) -> Tuple[PolyMap, ...]:
        if not 1 <= L <= self.M:
            raise UsageError(f"no family H_{L} in a shape of arity {self.M}")
        if L not in self._families:
            if L < self.N:
                maps = self._low_family(L)
            elif L == self.N:
                maps = self._middle_family()
            else:
                maps = self._high_family(L)
            self._families[L] = tuple(dict.fromkeys(maps))
        return self._families[L]

    def _low_family(self, L: int) -> List[PolyMap]:
        # L = a q + j: f(u_0..u_{j-1}) + sum_{i in A'} C t_{iq+j}, A = A' u {a}
        d, q = self.d, self.q
        a, j = divmod(L, q)
        bases = [f.to_matrix() for f in self.shape.family(j)] if j else []
        maps = []
        for size in range(a + 1):
            for rest in combinations(range(a), size):
                shift = _sum(d, L, [_embed(d, L, i * q + j, self.C) for i in rest])
                if not j:
                    maps.append(PolyMap.from_matrix(shift, L))
                    continue
                word = [STAR if i in rest or i == a else 1 for i in range(a + 1)]
                stacked = IntMatrix.vstack(self.u_matrices(word, L, j))
                for f in bases:
                    maps.append(PolyMap.from_matrix(f @ stacked + shift, L))
        return maps

    def _middle_family(self) -> List[PolyMap]:
        # sum_i f_i b(T_i) over (f_0..f_{n-1}) in F_q^n
        d, q = self.d, self.q
        spread = [f.to_matrix() @ IntMatrix.block_diagonal(self.concordance.b, q) for f in self.letters]
        maps = []
        for choice in product(range(len(spread)), repeat=self.n):
            terms = [_embed(d, self.N, i * q, spread[x]) for i, x in enumerate(choice)]
            maps.append(PolyMap.from_matrix(_sum(d, self.N, terms), self.N))
        return maps

    def _high_family(self, L: int) -> List[PolyMap]:
        # L = M - m + j: f(u_0..u_{j-1}) over f in F_j and every variable word
        j = L - (self.M - self.shape.m)
        bases = [f.to_matrix() for f in self.shape.family(j)]
        maps = []
        for word in lines(len(self.letters), self.n):
            stacked = IntMatrix.vstack(self.u_matrices(word, L, j))
            for f in bases:
                maps.append(PolyMap.from_matrix(f @ stacked, L))
        return maps

    def output_shape(self, max_maps: Optional[int] = None) -> Shape:
        limit = max_maps if max_maps is not None else settings.MAX_MAPS
        estimate = self.size_estimate()
        if estimate > limit:
            raise BudgetExhausted(f"lifted shape needs about {estimate} maps (limit {limit})", partial=estimate)
        families = tuple(self.family(L) for L in range(1, self.M + 1))
        return Shape(self.d, self.M, families, self.C)

    def output_concordance(self) -> Optional[Concordance]:
        witness = concordance_witness(self.output_shape())
        if witness is None:
            logger.warning(f"⚠️ no concordance witness found for the lifted C = [{self.C}]")
        return witness


def lift(
    shape: Shape,
    r: int,
    k: int,
    n_override: Optional[int] = None,
    normalize: bool = True,
    limits: Optional[EngineLimits] = None,
) -> LiftPlan:
    """Plan of the lift; n is HJ(|F_q|, r) unless given"""
    shape.require_homomorphic("lift")
    if r < 1:
        raise UsageError("need at least one color")
    if not 0 <= k <= shape.m - 1:
        raise UsageError(f"k must lie in [0, {shape.m - 1}], got {k}")
    base = normalize_for_lift(shape) if normalize else shape
    concordance = concordance_witness(base)
    if concordance is None:
        raise ConcordanceFailure(f"c = [{shape.c}] has no concordance witness with b = c or b = id")
    K = len(base.family(shape.m - k))
    if n_override is not None:
        n = n_override
    else:
        found = hj_number(K, r, limits or EngineLimits(settings.MAX_NODES, settings.MAX_SECONDS))
        if found.n is None:
            raise BudgetExhausted(
                f"HJ({K},{r}) was not decided within budget: [{K}]^{found.bad_n} has a line-free coloring, "
                f"[{K}]^{found.bad_n + 1} holds {(K + 1) ** (found.bad_n + 1) - K ** (found.bad_n + 1)} lines; pass an explicit n",
                partial=found,
            )
        n = found.n
    plan = LiftPlan(base, r, k, n, concordance)
    logger.info(f"✅ lift plan m={shape.m} k={k} |F_q|={K} n={n}: N={plan.N} M={plan.M}, ~{plan.size_estimate()} maps")
    return plan


# ================ EXTRACTION ================

@dataclass(frozen=True)
class ExtractResult:
    status: str
    seed: Optional[Seed] = None
    word: Optional[Tuple[int, ...]] = None
    placements: Tuple[int, ...] = ()

    @property
    def ok(self) -> bool:
        return self.status == "ok"


def _flat(t: Sequence[Point]) -> Tuple[int, ...]:
    return tuple(x for point in t for x in point)


def extract(plan: LiftPlan, t: Sequence[Point], coloring: BigColoring, big: Optional[ConfigSet] = None) -> ExtractResult:
    """
    Seed of an (m, F, c)-set inside D(M, H, C; t) whose last k+1 lines are
    monochromatic. Returns status "n-insufficient" when the induced coloring
    of F_q^n has no monochromatic line; raises VerificationFailure when a
    containment or monochromatic claim does not check out.
    """
    color = _color_fn(coloring)
    t = tuple(tuple(p) for p in t)
    if len(t) != plan.M + 1:
        raise UsageError(f"lifted shape takes {plan.M + 1} seed points, got {len(t)}")
    if big is None:
        big = generate(plan.output_shape(), t, allow_zero=True)
    for L in range(plan.M - plan.k + 1, plan.M + 1):
        if len({color(p) for p in big.line(L)}) > 1:
            raise UsageError(f"line {L} of the lifted set is not monochromatic")

    d, q, n = plan.d, plan.q, plan.n
    flat = _flat(t)
    b_blocks = [f.to_matrix() @ IntMatrix.block_diagonal(plan.concordance.b, q) for f in plan.letters]
    base = plan.C.apply(t[plan.N])
    word_colors = []
    for w in words(len(plan.letters), n):
        point = base
        for i, letter in enumerate(w):
            value = b_blocks[letter - 1].apply(flat[i * q * d:(i + 1) * q * d])
            point = tuple(x + y for x, y in zip(point, value))
        word_colors.append(color(point))
    word = find_mono_line(len(plan.letters), n, word_colors)
    if word is None:
        logger.debug(f"no monochromatic line in F_q^{n} for t = {t}")
        return ExtractResult("n-insufficient")

    u = plan.u_matrices(word, plan.M + 1, plan.shape.m + 1)
    seed = tuple(U.apply(flat) for U in u)
    small = generate(plan.shape, seed, allow_zero=True)
    a = max(i for i, x in enumerate(word) if x == STAR)
    placements = []
    for j in range(plan.shape.m + 1):
        if j > q:
            L = plan.M - plan.shape.m + j
        elif j == q:
            L = plan.N
        else:
            L = a * q + j
        placements.append(L)
        if not set(small.line(j)) <= set(big.line(L)):
            raise VerificationFailure(
                f"line {j} of the extracted set is not inside line {L} of the lifted set",
                instance={"t": t, "word": render(word), "line": j, "target": L},
            )
    for j in range(q, plan.shape.m + 1):
        if len({color(p) for p in small.line(j)}) > 1:
            raise VerificationFailure(
                f"line {j} of the extracted set is not monochromatic",
                instance={"t": t, "word": render(word), "line": j},
            )
    return ExtractResult("ok", seed, tuple(word), tuple(placements))


# ================ FULL THEOREM ================

def initial_families(shape: Shape, depth: int) -> Tuple[Tuple[PolyMap, ...], ...]:
    """H^(0)_j = {0} u {f(x_{i_1}, ..., x_{i_l}) : f in F_l, i_1 < ... < i_l < j}"""
    d = shape.d
    out = []
    for j in range(1, depth + 1):
        maps = [PolyMap.zero(j, d)]
        for ell in range(1, min(j, shape.m) + 1):
            for picks in combinations(range(j), ell):
                blocks = []
                for f in shape.family(ell):
                    matrix = f.to_matrix()
                    placed = _sum(d, j, [_embed(d, j, pos, matrix.column_block(x, d)) for x, pos in enumerate(picks)])
                    blocks.append(PolyMap.from_matrix(placed, j))
                maps.extend(blocks)
        out.append(tuple(dict.fromkeys(maps)))
    return tuple(out)


@dataclass
class FullLift:
    base: Shape
    r: int
    depth: int
    levels: List[LiftPlan] = field(default_factory=list)
    shapes: List[Shape] = field(default_factory=list)

    @property
    def shape(self) -> Shape:
        return self.shapes[-1] if self.shapes else self.base


def full_lift(
    shape: Shape,
    r: int,
    max_maps: Optional[int] = None,
    n_overrides: Optional[Sequence[int]] = None,
    limits: Optional[EngineLimits] = None,
    depth: Optional[int] = None,
) -> FullLift:
    """
    A shape all of whose r-colorings hold a monochromatic (m, F, c)-set:
    start from H^(0) of arity depth and lift with k = depth-1, ..., 0.

    depth defaults to m r, the least arity whose depth+1 lines always hold
    m+1 lines of one color. A smaller depth is accepted; full_extract then
    reports "pigeonhole-insufficient" for colorings that defeat it.
    """
    shape.require_homomorphic("full lift")
    if r == 1:
        return FullLift(shape, 1, 0)
    limit = max_maps if max_maps is not None else settings.MAX_MAPS
    depth = shape.m * r if depth is None else depth
    if depth < shape.m:
        raise UsageError(f"depth {depth} is below the arity {shape.m}")
    current = Shape(shape.d, depth, initial_families(shape, depth), shape.c)
    full = FullLift(shape, r, depth, [], [current])
    total = sum(len(f) for f in current.families)
    for i in range(1, depth + 1):
        n = n_overrides[i - 1] if n_overrides else None
        try:
            plan = lift(current, r, depth - i, n_override=n, limits=limits)
        except BudgetExhausted as e:
            raise BudgetExhausted(f"level {i} of {depth}: {e.detail}", partial=full)
        total += plan.size_estimate()
        if total > limit:
            raise BudgetExhausted(
                f"full lift needs about {total} maps by level {i} of {depth} (limit {limit})", partial=full
            )
        current = plan.output_shape(limit)
        full.levels.append(plan)
        full.shapes.append(current)
    logger.info(f"✅ full lift of arity {full.shape.m} built in {depth} levels ({total} maps)")
    return full


@dataclass(frozen=True)
class FullExtractResult:
    status: str
    seed: Optional[Seed] = None
    lines: Tuple[int, ...] = ()
    color: Optional[int] = None


def full_extract(full: FullLift, t: Sequence[Point], coloring: BigColoring) -> FullExtractResult:
    """A monochromatic (m, F, c)-set inside the colored D(M, H, C; t)"""
    color = _color_fn(coloring)
    base = full.base
    seed = tuple(tuple(p) for p in t)
    if full.r == 1 or not full.levels:
        points = generate(base, seed, allow_zero=True).points
        if len({color(p) for p in points}) > 1:
            raise VerificationFailure("a one-color lift was given a multicolored set", instance={"t": seed})
        return FullExtractResult("ok", seed, tuple(range(base.m + 1)), color(points[0]))
    outer = set(generate(full.shape, seed, allow_zero=True).points)
    for plan in reversed(full.levels):
        result = extract(plan, seed, color)
        if not result.ok:
            return FullExtractResult(result.status)
        seed = result.seed

    # every line of the H^(0)-set is monochromatic now
    initial = generate(full.shapes[0], seed, allow_zero=True)
    line_color = [color(line[0]) for line in initial.lines]
    by_color: Dict[int, List[int]] = {}
    for ell, col in enumerate(line_color):
        by_color.setdefault(col, []).append(ell)
    found = next(((c, ls) for c, ls in sorted(by_color.items()) if len(ls) >= base.m + 1), None)
    if found is None:
        return FullExtractResult("pigeonhole-insufficient", seed)
    col, chosen = found
    chosen = chosen[:base.m + 1]
    s = tuple(seed[ell] for ell in chosen)
    small = generate(base, s, allow_zero=True)
    for j, ell in enumerate(chosen):
        if not set(small.line(j)) <= set(initial.line(ell)):
            raise VerificationFailure(
                f"line {j} of the final set is not inside line {ell}", instance={"t": tuple(t), "s": s}
            )
    if not set(small.points) <= outer or len({color(p) for p in small.points}) > 1:
        raise VerificationFailure("final set is not a monochromatic subset", instance={"t": tuple(t), "s": s})
    return FullExtractResult("ok", s, tuple(chosen), col)


# ================ VERIFICATION SWEEPS ================

@dataclass(frozen=True)
class LiftReport:
    tried: int
    succeeded: int
    insufficient: int
    failures: Tuple[Dict[str, Any], ...]

    @property
    def ok(self) -> bool:
        return not self.failures


def _colorings_for(plan: LiftPlan, big: ConfigSet, exhaustive: bool, samples: int, rng: random.Random):
    points = big.points
    tail = [big.line(L) for L in range(plan.M - plan.k + 1, plan.M + 1)]
    if exhaustive:
        for colors in product(range(plan.r), repeat=len(points)):
            yield dict(zip(points, colors))
        return
    for _ in range(samples):
        assignment = {p: rng.randrange(plan.r) for p in points}
        for line in tail:
            col = rng.randrange(plan.r)
            for p in line:
                assignment[p] = col
        yield assignment


def _tail_is_mono(plan: LiftPlan, big: ConfigSet, assignment: Mapping[Point, int]) -> bool:
    return all(
        len({assignment[p] for p in big.line(L)}) == 1 for L in range(plan.M - plan.k + 1, plan.M + 1)
    )


def _sweep_job(job) -> LiftReport:
    plan, t, exhaustive, samples, rng_seed = job
    big = generate(plan.output_shape(), t, allow_zero=True)
    rng = random.Random(rng_seed)
    tried = succeeded = insufficient = 0
    failures = []
    for assignment in _colorings_for(plan, big, exhaustive, samples, rng):
        if not _tail_is_mono(plan, big, assignment):
            continue
        tried += 1
        try:
            result = extract(plan, t, assignment, big)
        except VerificationFailure as e:
            failures.append({"t": [list(p) for p in t], "reason": e.detail, "instance": repr(e.instance)})
            continue
        if result.ok:
            succeeded += 1
        else:
            insufficient += 1
    return LiftReport(tried, succeeded, insufficient, tuple(failures))


def verify_lift(
    plan: LiftPlan,
    seeds: Sequence[Sequence[Point]],
    exhaustive: bool = True,
    samples: int = 1000,
    rng_seed: int = 0,
    workers: Optional[int] = None,
) -> LiftReport:
    """Runs extract over every coloring (or `samples` random ones) of each seed's lifted set"""
    jobs = [(plan, tuple(tuple(p) for p in t), exhaustive, samples, rng_seed + i) for i, t in enumerate(seeds)]
    reports = search_pool.map(_sweep_job, jobs, workers)
    merged = LiftReport(
        sum(rep.tried for rep in reports),
        sum(rep.succeeded for rep in reports),
        sum(rep.insufficient for rep in reports),
        tuple(f for rep in reports for f in rep.failures),
    )
    marker = "✅" if merged.ok else "❌"
    logger.info(f"{marker} lift sweep: {merged.succeeded}/{merged.tried} extracted, "
                f"{merged.insufficient} n-insufficient, {len(merged.failures)} failures")
    return merged


# ================ DOCUMENTS ================

class LiftPlanDocument(BaseModel):
    shape: ShapeDocument
    r: int
    k: int
    n: int
    q: int
    N: int
    M: int
    b: List[List[int]]
    witnesses: List[List[List[List[int]]]]
    C: List[List[int]]
    size_estimate: int

    @classmethod
    def from_plan(cls, plan: LiftPlan) -> "LiftPlanDocument":
        return cls(
            shape=ShapeDocument.from_shape(plan.shape),
            r=plan.r, k=plan.k, n=plan.n, q=plan.q, N=plan.N, M=plan.M,
            b=plan.concordance.b.as_rows(),
            witnesses=[[a.as_rows() for a in row] for row in plan.concordance.witnesses],
            C=plan.C.as_rows(),
            size_estimate=plan.size_estimate(),
        )

    def to_plan(self) -> LiftPlan:
        shape = self.shape.to_shape()
        d = shape.d
        concordance = Concordance(
            IntMatrix.from_rows(self.b, cols=d),
            tuple(
                tuple(IntMatrix.from_rows(a, cols=(j + 1) * d) for a in row)
                for j, row in enumerate(self.witnesses)
            ),
        )
        return LiftPlan(shape, self.r, self.k, self.n, concordance)


class LiftReportDocument(BaseModel):
    plan: LiftPlanDocument
    seeds: List[List[List[int]]]
    exhaustive: bool
    samples: int
    rng_seed: int = 0
    tried: int
    succeeded: int
    insufficient: int
    failures: List[Dict[str, Any]]


class FullLiftDocument(BaseModel):
    base: ShapeDocument
    r: int
    depth: int
    levels: List[LiftPlanDocument]
    final_arity: int
    final_size: int
