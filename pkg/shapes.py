"""
Shapes (m, F, c) over Z^d and the sets D(m, F, c; s) they generate.

A shape holds m finite families of polynomial maps, F_j of input arity j,
and an endomorphism c of Z^d. For a seed s = (s_0, ..., s_m) of nonzero
points the k-th line is {f(s_0..s_{k-1}) + c(s_k) : f in F_k} and line 0
is {c(s_0)}.
"""
import logging
from dataclasses import dataclass
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel

from errors import DimensionMismatch, InvalidShape
from linalg import IntMatrix, add_vectors, index_of_image, solve_integer_matrix
from polymaps import Point, PolyMap

logger = logging.getLogger(__name__)

Seed = Tuple[Point, ...]


@dataclass(frozen=True)
class Shape:
    d: int
    m: int
    families: Tuple[Tuple[PolyMap, ...], ...]
    c: IntMatrix

    def __post_init__(self):
        if self.d < 1 or self.m < 0:
            raise InvalidShape(f"bad shape signature d={self.d} m={self.m}")
        if len(self.families) != self.m:
            raise InvalidShape(f"shape of arity {self.m} needs {self.m} families, got {len(self.families)}")
        if (self.c.rows, self.c.cols) != (self.d, self.d):
            raise DimensionMismatch(f"c must be {self.d}x{self.d}, got {self.c.rows}x{self.c.cols}")
        deduped = []
        for j, family in enumerate(self.families, start=1):
            family = tuple(dict.fromkeys(family))
            for f in family:
                if f.arity != j:
                    raise InvalidShape(f"map {f} of arity {f.arity} in family F_{j}")
                if f.dim != self.d:
                    raise DimensionMismatch(f"map {f} has dimension {f.dim}, shape has {self.d}")
            deduped.append(family)
        object.__setattr__(self, "families", tuple(deduped))

    def family(self, j: int) -> Tuple[PolyMap, ...]:
        """F_j, 1-based"""
        return self.families[j - 1]

    @property
    def is_homomorphic(self) -> bool:
        return all(f.is_homomorphism for family in self.families for f in family)

    @property
    def full_size(self) -> int:
        """1 + sum |F_j|, the size of a D-set with no repeated terms"""
        return 1 + sum(len(family) for family in self.families)

    def require_homomorphic(self, what: str):
        for j, family in enumerate(self.families, start=1):
            for f in family:
                if not f.is_homomorphism:
                    raise InvalidShape(f"{what} needs homomorphism families; F_{j} holds {f}")


@dataclass(frozen=True)
class ConfigSet:
    lines: Tuple[Tuple[Point, ...], ...]
    points: Tuple[Point, ...]

    def line(self, k: int) -> Tuple[Point, ...]:
        return self.lines[k]

    def __contains__(self, point) -> bool:
        return tuple(point) in set(self.points)

    def __len__(self) -> int:
        return len(self.points)


# ================ GENERATION ================

def check_seed(shape: Shape, s: Sequence[Sequence[int]], allow_zero: bool = False) -> Seed:
    if len(s) != shape.m + 1:
        raise DimensionMismatch(f"shape of arity {shape.m} needs {shape.m + 1} seed points, got {len(s)}")
    seed = tuple(tuple(int(x) for x in point) for point in s)
    for i, point in enumerate(seed):
        if len(point) != shape.d:
            raise DimensionMismatch(f"seed point s_{i}={point} is not in Z^{shape.d}")
        if not allow_zero and not any(point):
            raise InvalidShape(f"seed point s_{i} is zero")
    return seed


def generate(shape: Shape, s: Sequence[Sequence[int]], allow_zero: bool = False) -> ConfigSet:
    """
    D(m, F, c; s) with its line decomposition.

    allow_zero admits zero seed points; the lift produces such seeds for
    its intermediate sets and they are only ever used for containment.
    """
    seed = check_seed(shape, s, allow_zero)
    lines = [(shape.c.apply(seed[0]),)]
    for k in range(1, shape.m + 1):
        base = shape.c.apply(seed[k])
        lines.append(tuple(add_vectors(f(*seed[:k]), base) for f in shape.family(k)))
    points = tuple(sorted(set(p for line in lines for p in line)))
    return ConfigSet(tuple(lines), points)


def contains(big: Shape, big_seed, small: Shape, small_seed, allow_zero: bool = False) -> bool:
    """D(small; small_seed) is a subset of D(big; big_seed)"""
    outer = set(generate(big, big_seed, allow_zero).points)
    return set(generate(small, small_seed, allow_zero).points) <= outer


def collisions(shape: Shape, s) -> List[Tuple[Tuple[int, int], Tuple[int, int], Point]]:
    """Pairs of (line, map index) positions that land on the same point"""
    config = generate(shape, s)
    seen: Dict[Point, Tuple[int, int]] = {}
    out = []
    for k, line in enumerate(config.lines):
        for i, point in enumerate(line):
            if point in seen:
                out.append((seen[point], (k, i), point))
            else:
                seen[point] = (k, i)
    return out


# ================ CONSTRUCTIONS ================

def from_mpc(m: int, p: int, c: int) -> Shape:
    """
    The shape of (m, p, c)-sets in Z: F_j = {x -> <x, xi> : xi in [-p, p]^j}
    and c acting as multiplication.
    """
    if m < 1 or p < 1 or c < 1:
        raise InvalidShape(f"(m, p, c) must be positive, got ({m}, {p}, {c})")
    families = tuple(
        tuple(PolyMap.linear_form(xi) for xi in product(range(-p, p + 1), repeat=j))
        for j in range(1, m + 1)
    )
    return Shape(1, m, families, IntMatrix.scalar(1, c))


def join(shape1: Shape, shape2: Shape) -> Shape:
    """
    A shape whose sets contain a set of each input shape:
    c = c1 c2 and F_n = {f o c2 : f in F_n^(1)} u {f o c1 : f in F_n^(2)}.
    """
    if shape1.d != shape2.d:
        raise DimensionMismatch(f"cannot join shapes over Z^{shape1.d} and Z^{shape2.d}")
    c1, c2 = shape1.c, shape2.c
    if c1 @ c2 != c2 @ c1:
        raise InvalidShape("join needs commuting endomorphisms c1, c2")
    shape1.require_homomorphic("join")
    shape2.require_homomorphic("join")
    m = max(shape1.m, shape2.m)
    families = []
    for n in range(1, m + 1):
        first = shape1.family(n) if n <= shape1.m else ()
        second = shape2.family(n) if n <= shape2.m else ()
        families.append(tuple(f.compose_each(c2) for f in first) + tuple(f.compose_each(c1) for f in second))
    return Shape(shape1.d, m, tuple(families), c1 @ c2)


def join_seeds(shape1: Shape, shape2: Shape, s) -> Tuple[Seed, Seed]:
    """(c2(s), c1(s)) truncated to each shape's arity"""
    first = tuple(shape2.c.apply(point) for point in s[:shape1.m + 1])
    second = tuple(shape1.c.apply(point) for point in s[:shape2.m + 1])
    return first, second


@dataclass(frozen=True)
class Concordance:
    """b and, per family and map, a_f with c a_f = f (b, ..., b)"""
    b: IntMatrix
    witnesses: Tuple[Tuple[IntMatrix, ...], ...]

    def a(self, j: int, index: int) -> PolyMap:
        return PolyMap.from_matrix(self.witnesses[j - 1][index], j)


def concordance_holds(shape: Shape, b: IntMatrix, witnesses) -> bool:
    """c a_f = f (b, ..., b) for every map, with b nonzero"""
    if b.is_zero or len(witnesses) != shape.m:
        return False
    if any(len(row) != len(family) for row, family in zip(witnesses, shape.families)):
        return False
    for j, family in enumerate(shape.families, start=1):
        spread = IntMatrix.block_diagonal(b, j)
        for f, a in zip(family, witnesses[j - 1]):
            if shape.c @ a != f.to_matrix() @ spread:
                return False
    return True


def concordance_witness(shape: Shape) -> Optional[Concordance]:
    """
    Tries b = c (c a nonzero scalar, hence central) and then b = id, solving
    c X = f over the integers for each map. None when neither works.
    """
    shape.require_homomorphic("concordance")
    matrices = tuple(tuple(f.to_matrix() for f in family) for family in shape.families)

    if shape.c.scalar_value():
        witness = Concordance(shape.c, matrices)
        if concordance_holds(shape, witness.b, witness.witnesses):
            return witness

    identity = IntMatrix.identity(shape.d)
    solved = []
    for family in matrices:
        row = []
        for f in family:
            if shape.c @ f == f:
                row.append(f)
                continue
            x = solve_integer_matrix(shape.c, f)
            if x is None:
                logger.debug(f"no integer a_f with c a_f = f for f = {f}")
                return None
            row.append(x)
        solved.append(tuple(row))
    witness = Concordance(identity, tuple(solved))
    if not concordance_holds(shape, witness.b, witness.witnesses):
        return None
    return witness


def normalize_for_lift(shape: Shape) -> Shape:
    """
    Closes each F_i under the zero map, the projections (x_0..x_{i-1}) -> x_k
    and the arity lifts of every lower family. Never drops a map.
    """
    normalized: List[Tuple[PolyMap, ...]] = []
    for i in range(1, shape.m + 1):
        candidates = list(shape.family(i))
        candidates.append(PolyMap.zero(i, shape.d))
        candidates.extend(PolyMap.projection(i, shape.d, k) for k in range(i))
        for lower in normalized:
            candidates.extend(g.lift_arity(i) for g in lower)
        normalized.append(tuple(dict.fromkeys(candidates)))
    return Shape(shape.d, shape.m, tuple(normalized), shape.c)


def regularity_criterion(shape: Shape) -> Optional[str]:
    """
    A sufficient condition for partition regularity that the shape meets:
    "identity-homomorphism" when c = id with homomorphism families,
    "finite-index" when c(Z^d) has finite index. None if neither applies.
    """
    if shape.c.is_identity and shape.is_homomorphic:
        return "identity-homomorphism"
    if index_of_image(shape.c) is not None:
        return "finite-index"
    return None


# ================ DOCUMENTS ================

class PolyMapDocument(BaseModel):
    arity: int
    monomials: List[List[List[int]]]

    @classmethod
    def from_map(cls, f: PolyMap) -> "PolyMapDocument":
        return cls(arity=f.arity, monomials=[[list(e) + [c] for e, c in coord] for coord in f.coordinates])

    def to_map(self, dim: int) -> PolyMap:
        coords = []
        for coord in self.monomials:
            coords.append(tuple((tuple(term[:-1]), term[-1]) for term in coord))
        return PolyMap(self.arity, dim, tuple(coords))


class ShapeDocument(BaseModel):
    d: int
    m: int
    c: List[List[int]]
    families: List[List[PolyMapDocument]]

    @classmethod
    def from_shape(cls, shape: Shape) -> "ShapeDocument":
        return cls(
            d=shape.d,
            m=shape.m,
            c=shape.c.as_rows(),
            families=[[PolyMapDocument.from_map(f) for f in family] for family in shape.families],
        )

    def to_shape(self) -> Shape:
        families = tuple(tuple(doc.to_map(self.d) for doc in family) for family in self.families)
        return Shape(self.d, self.m, families, IntMatrix.from_rows(self.c, cols=self.d))


class DSetDocument(BaseModel):
    shape: ShapeDocument
    seed: List[List[int]]
    lines: List[List[List[int]]]
    points: List[List[int]]
    collisions: int = 0

    @classmethod
    def from_generation(cls, shape: Shape, seed, config: ConfigSet) -> "DSetDocument":
        return cls(
            shape=ShapeDocument.from_shape(shape),
            seed=[list(p) for p in seed],
            lines=[[list(p) for p in line] for line in config.lines],
            points=[list(p) for p in config.points],
            collisions=sum(len(line) for line in config.lines) - len(config.points),
        )
