"""
Rado's columns condition over Z and its generalization over Z^d, plus the
reductions from a columns certificate to a configuration: the matrix B with
A B = 0 whose rows lie in an (m, p, c)-set, and the shape whose sets contain
a solution of A(x) = 0.
"""
import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Callable, Dict, FrozenSet, List, Optional, Sequence, Tuple

from pydantic import BaseModel
from sympy import Rational

from errors import DimensionMismatch, InvalidCertificate, UsageError, Verdict, failed, passed
from linalg import IntMatrix, add_vectors, in_span, index_of_image, lcm_of, solve_integer_matrix
from polymaps import PolyMap
from shapes import Shape

logger = logging.getLogger(__name__)

Blocks = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class ColumnsCertificate:
    """
    blocks[0] sums to zero; for t >= 1 the sum of blocks[t] equals
    sum_e coefficients[t-1][e] * column(earlier(t)[e]) where earlier(t) is
    the concatenation of blocks[:t].
    """
    blocks: Blocks
    coefficients: Tuple[Tuple[Rational, ...], ...]

    @property
    def permutation(self) -> Tuple[int, ...]:
        return tuple(i for block in self.blocks for i in block)

    def earlier(self, t: int) -> Tuple[int, ...]:
        return tuple(i for block in self.blocks[:t] for i in block)

    @property
    def m(self) -> int:
        return len(self.blocks) - 1


@dataclass(frozen=True)
class GenColumnsCertificate:
    """
    c_list holds the column maps c_i : Z^d' -> Z^(k d') as (k d') x d'
    matrices. (sum_{i in blocks[0]} c_i) c = 0 and, for t >= 1,
    (sum_{i in blocks[t]} c_i) c + sum_e c_{earlier(t)[e]} witnesses[t-1][e] = 0.
    """
    c_list: Tuple[IntMatrix, ...]
    c: IntMatrix
    blocks: Blocks
    witnesses: Tuple[Tuple[IntMatrix, ...], ...]

    def earlier(self, t: int) -> Tuple[int, ...]:
        return tuple(i for block in self.blocks[:t] for i in block)

    @property
    def m(self) -> int:
        return len(self.blocks) - 1

    @property
    def dim(self) -> int:
        return self.c.rows

    def f(self, i: int, t: int) -> IntMatrix:
        """f_i^(t): column i's witness in block t's equation"""
        return self.witnesses[t - 1][self.earlier(t).index(i)]


# ================ ORDERED PARTITION SEARCH ================

def _partition_search(
    count: int, accept: Callable[[Tuple[int, ...], Tuple[int, ...]], Optional[object]]
) -> Optional[Tuple[Blocks, Tuple[object, ...]]]:
    """
    Ordered set partitions of range(count), blocks chosen smallest first and
    lexicographically. accept(block, earlier) returns a witness for the block
    or None; failures are memoized on the set of already placed columns.
    """
    dead: set = set()

    def extend(placed: FrozenSet[int], earlier: Tuple[int, ...]):
        if len(placed) == count:
            return (), ()
        if placed in dead:
            return None
        rest = [i for i in range(count) if i not in placed]
        for size in range(1, len(rest) + 1):
            for block in combinations(rest, size):
                witness = accept(block, earlier)
                if witness is None:
                    continue
                tail = extend(placed | set(block), earlier + block)
                if tail is not None:
                    return (block,) + tail[0], (witness,) + tail[1]
        dead.add(placed)
        return None

    return extend(frozenset(), ())


# ================ CLASSIC COLUMNS CONDITION ================

def check_columns(A: IntMatrix) -> Optional[ColumnsCertificate]:
    """A certificate that A satisfies the columns condition after some column permutation, or None"""
    if A.rows == 0 or A.cols == 0:
        raise UsageError("columns condition needs a nonempty matrix")
    columns = [A.col(j) for j in range(A.cols)]

    def accept(block, earlier):
        total = add_vectors(*(columns[i] for i in block))
        if not earlier:
            return () if not any(total) else None
        # latest columns first so that the combination leans on recent blocks
        membership = in_span(total, [columns[i] for i in reversed(earlier)])
        if not membership:
            return None
        return tuple(reversed(membership.coefficients))

    found = _partition_search(A.cols, accept)
    if found is None:
        logger.info(f"❌ columns condition fails for A = [{A}]")
        return None
    blocks, witnesses = found
    cert = ColumnsCertificate(blocks, tuple(witnesses[1:]))
    logger.info(f"✅ columns condition holds for A = [{A}] with blocks {blocks}")
    return cert


def verify_columns(A: IntMatrix, cert: ColumnsCertificate) -> Verdict:
    if sorted(cert.permutation) != list(range(A.cols)):
        return failed(f"blocks {cert.blocks} do not partition the {A.cols} columns")
    if any(not block for block in cert.blocks):
        return failed("empty block")
    if len(cert.coefficients) != len(cert.blocks) - 1:
        return failed("one coefficient row is needed per block after the first")
    columns = [A.col(j) for j in range(A.cols)]
    if any(add_vectors(*(columns[i] for i in cert.blocks[0]))):
        return failed(f"first block {cert.blocks[0]} does not sum to zero")
    for t in range(1, len(cert.blocks)):
        earlier = cert.earlier(t)
        q = cert.coefficients[t - 1]
        if len(q) != len(earlier):
            return failed(f"block {t} has {len(q)} coefficients for {len(earlier)} earlier columns")
        total = add_vectors(*(columns[i] for i in cert.blocks[t]))
        combined = [sum((Rational(qe) * columns[e][r] for qe, e in zip(q, earlier)), Rational(0)) for r in range(A.rows)]
        if any(Rational(x) != y for x, y in zip(total, combined)):
            return failed(f"block {t} sum {total} is not the certified combination")
    return passed()


@dataclass(frozen=True)
class Reduction:
    B: IntMatrix
    m: int
    p: int
    c: int


def deuber_reduce(A: IntMatrix, cert: ColumnsCertificate) -> Reduction:
    """
    B with A B = 0 whose row i, for column i in block j, reads c at seed
    index m-j and -c q_t at seed index m-t for every later block t. Every
    entry of B s then lies in D(m, p, c; s).
    """
    verdict = verify_columns(A, cert)
    if not verdict:
        raise InvalidCertificate(f"columns certificate rejected: {verdict.reason}")
    c = lcm_of(Rational(q).q for row in cert.coefficients for q in row)
    m = max(1, cert.m)
    rows = [[0] * (m + 1) for _ in range(A.cols)]
    for j, block in enumerate(cert.blocks):
        for i in block:
            rows[i][m - j] = c
    for t in range(1, len(cert.blocks)):
        for qe, e in zip(cert.coefficients[t - 1], cert.earlier(t)):
            rows[e][m - t] = int(-c * Rational(qe))
    B = IntMatrix.from_rows(rows, cols=m + 1)
    # entries left of a row's own seed index are its linear-form coefficients
    p = max([1] + [abs(x) for j, block in enumerate(cert.blocks) for i in block for x in rows[i][:m - j]])
    if not (A @ B).is_zero:
        raise InvalidCertificate("reduction produced A B != 0")
    logger.info(f"✅ reduced A = [{A}] to (m, p, c) = ({m}, {p}, {c})")
    return Reduction(B, m, p, c)


# ================ GENERALIZED COLUMNS CONDITION ================

def _check_column_maps(c_list: Sequence[IntMatrix], c: IntMatrix):
    if not c_list:
        raise UsageError("at least one column map is needed")
    dim = c.rows
    if not c.is_square:
        raise DimensionMismatch(f"c must be square, got {c.rows}x{c.cols}")
    height = c_list[0].rows
    for ci in c_list:
        if ci.cols != dim or ci.rows != height or height % dim:
            raise DimensionMismatch(f"column map of size {ci.rows}x{ci.cols} does not fit c of size {dim}x{dim}")


def check_columns_general(c_list: Sequence[IntMatrix], c: IntMatrix) -> Optional[GenColumnsCertificate]:
    """Certificate that the column maps satisfy the generalized condition for this c, or None"""
    _check_column_maps(c_list, c)
    c_list = tuple(c_list)

    def block_sum(block):
        total = c_list[block[0]]
        for i in block[1:]:
            total = total + c_list[i]
        return total

    def accept(block, earlier):
        target = -(block_sum(block) @ c)
        if not earlier:
            return () if target.is_zero else None
        solved = solve_integer_matrix(IntMatrix.hstack([c_list[i] for i in earlier]), target)
        if solved is None:
            return None
        return tuple(solved.row_block(e, c.rows) for e in range(len(earlier)))

    found = _partition_search(len(c_list), accept)
    if found is None:
        logger.debug(f"generalized columns condition fails for c = [{c}]")
        return None
    blocks, witnesses = found
    return GenColumnsCertificate(c_list, c, blocks, tuple(witnesses[1:]))


def verify_general_columns(cert: GenColumnsCertificate) -> Verdict:
    count = len(cert.c_list)
    if sorted(i for block in cert.blocks for i in block) != list(range(count)):
        return failed(f"blocks {cert.blocks} do not partition the {count} column maps")
    height = cert.c_list[0].rows
    for t, block in enumerate(cert.blocks):
        total = IntMatrix.zeros(height, cert.dim)
        for i in block:
            total = total + cert.c_list[i] @ cert.c
        if t:
            earlier = cert.earlier(t)
            if len(cert.witnesses[t - 1]) != len(earlier):
                return failed(f"block {t} has {len(cert.witnesses[t - 1])} witnesses for {len(earlier)} columns")
            for i, f in zip(earlier, cert.witnesses[t - 1]):
                total = total + cert.c_list[i] @ f
        if not total.is_zero:
            return failed(f"block {t} identity does not vanish")
    return passed()


def candidate_endomorphisms(c_list: Sequence[IntMatrix]) -> List[IntMatrix]:
    """identity, scalars +-1..+-3, then products of square column maps"""
    dim = c_list[0].cols
    out = [IntMatrix.identity(dim)]
    for k in (1, 2, 3):
        for sign in (1, -1):
            out.append(IntMatrix.scalar(dim, sign * k))
    square = [ci for ci in c_list if ci.is_square]
    for a in square:
        for b in square:
            out.append(a @ b)
    return list(dict.fromkeys(out))


def find_general_columns(c_list: Sequence[IntMatrix]) -> Optional[GenColumnsCertificate]:
    for c in candidate_endomorphisms(c_list):
        if c.is_zero:
            continue
        cert = check_columns_general(c_list, c)
        if cert is not None:
            logger.info(f"✅ generalized columns condition holds with c = [{c}]")
            return cert
    logger.info("❌ no built-in candidate c satisfies the generalized columns condition")
    return None


def hypothesis_check(c: IntMatrix) -> Optional[str]:
    """'center' for integer scalars, 'finite-index' when det c != 0"""
    if c.scalar_value() is not None:
        return "center"
    if index_of_image(c) is not None:
        return "finite-index"
    return None


def _block_of(cert: GenColumnsCertificate) -> Dict[int, int]:
    return {i: t for t, block in enumerate(cert.blocks) for i in block}


def columns_shape(cert: GenColumnsCertificate) -> Shape:
    """
    F_j = {(s_0..s_{j-1}) -> sum_l f_i^(m-l)(s_l)} over the columns i of
    block m-j; its sets contain a solution of A(x) = 0.
    """
    m = cert.m
    families = []
    for j in range(1, m + 1):
        maps = []
        for i in cert.blocks[m - j]:
            matrix = IntMatrix.hstack([cert.f(i, m - ell) for ell in range(j)])
            maps.append(PolyMap.from_matrix(matrix, j))
        families.append(tuple(maps))
    return Shape(cert.dim, m, tuple(families), cert.c)


def columns_solution(cert: GenColumnsCertificate, s) -> Tuple[Tuple[int, ...], ...]:
    """x_i = sum_{l<j} f_i^(m-l)(s_l) + c(s_j) for column i in block m-j"""
    m = cert.m
    if len(s) != m + 1:
        raise DimensionMismatch(f"certificate with {m + 1} blocks needs {m + 1} seed points")
    blocks = _block_of(cert)
    out = []
    for i in range(len(cert.c_list)):
        j = m - blocks[i]
        terms = [cert.f(i, m - ell).apply(s[ell]) for ell in range(j)]
        out.append(add_vectors(cert.c.apply(s[j]), *terms))
    return tuple(out)


def apply_column_maps(c_list: Sequence[IntMatrix], x) -> Tuple[int, ...]:
    """A(x) = sum_i c_i(x_i)"""
    return add_vectors(*(ci.apply(xi) for ci, xi in zip(c_list, x)))


# ================ DOCUMENTS ================

class ColumnsDocument(BaseModel):
    matrix: List[List[int]]
    permutation: List[int]
    blocks: List[List[int]]
    coefficients: List[List[str]]

    @classmethod
    def from_certificate(cls, A: IntMatrix, cert: ColumnsCertificate) -> "ColumnsDocument":
        return cls(
            matrix=A.as_rows(),
            permutation=list(cert.permutation),
            blocks=[list(b) for b in cert.blocks],
            coefficients=[[str(q) for q in row] for row in cert.coefficients],
        )

    def to_certificate(self) -> Tuple[IntMatrix, ColumnsCertificate]:
        A = IntMatrix.from_rows(self.matrix)
        cert = ColumnsCertificate(
            tuple(tuple(b) for b in self.blocks),
            tuple(tuple(Rational(q) for q in row) for row in self.coefficients),
        )
        return A, cert


class ReductionDocument(BaseModel):
    matrix: List[List[int]]
    B: List[List[int]]
    m: int
    p: int
    c: int
    columns: ColumnsDocument


class GenColumnsDocument(BaseModel):
    c_list: List[List[List[int]]]
    c: List[List[int]]
    blocks: List[List[int]]
    witnesses: List[List[List[List[int]]]]
    hypothesis: Optional[str] = None

    @classmethod
    def from_certificate(cls, cert: GenColumnsCertificate) -> "GenColumnsDocument":
        return cls(
            c_list=[ci.as_rows() for ci in cert.c_list],
            c=cert.c.as_rows(),
            blocks=[list(b) for b in cert.blocks],
            witnesses=[[f.as_rows() for f in row] for row in cert.witnesses],
            hypothesis=hypothesis_check(cert.c),
        )

    def to_certificate(self) -> GenColumnsCertificate:
        dim = len(self.c)
        return GenColumnsCertificate(
            tuple(IntMatrix.from_rows(ci, cols=dim) for ci in self.c_list),
            IntMatrix.from_rows(self.c, cols=dim),
            tuple(tuple(b) for b in self.blocks),
            tuple(tuple(IntMatrix.from_rows(f, cols=dim) for f in row) for row in self.witnesses),
        )
