"""
Exact integer and rational linear algebra.

Integer matrices are small frozen values (IntMatrix) so they can be hashed,
compared and serialized; anything that needs elimination over Q goes through
sympy, and integer solvability goes through a Smith decomposition with its
unimodular transforms.
"""
from dataclasses import dataclass
from math import lcm
from typing import Iterable, List, Optional, Sequence, Tuple

from sympy import ImmutableMatrix, Matrix, Rational

from errors import DimensionMismatch, UsageError

Vector = Tuple[int, ...]
RatMatrix = ImmutableMatrix


@dataclass(frozen=True)
class IntMatrix:
    rows: int
    cols: int
    entries: Tuple[int, ...]

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise DimensionMismatch(f"negative matrix size {self.rows}x{self.cols}")
        if len(self.entries) != self.rows * self.cols:
            raise DimensionMismatch(
                f"{self.rows}x{self.cols} matrix needs {self.rows * self.cols} entries, got {len(self.entries)}"
            )

    # ================ CONSTRUCTION ================

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "IntMatrix":
        rows = [tuple(int(x) for x in row) for row in rows]
        width = len(rows[0]) if rows else (cols or 0)
        if any(len(row) != width for row in rows):
            raise DimensionMismatch("ragged rows")
        return cls(len(rows), width, tuple(x for row in rows for x in row))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "IntMatrix":
        return cls(rows, cols, (0,) * (rows * cols))

    @classmethod
    def scalar(cls, n: int, value: int) -> "IntMatrix":
        return cls(n, n, tuple(value if i == j else 0 for i in range(n) for j in range(n)))

    @classmethod
    def identity(cls, n: int) -> "IntMatrix":
        return cls.scalar(n, 1)

    @classmethod
    def hstack(cls, blocks: Sequence["IntMatrix"], rows: Optional[int] = None) -> "IntMatrix":
        if not blocks:
            return cls.zeros(rows or 0, 0)
        height = blocks[0].rows
        if any(b.rows != height for b in blocks):
            raise DimensionMismatch("hstack blocks differ in height")
        return cls.from_rows(
            [sum((b.row(i) for b in blocks), ()) for i in range(height)],
            cols=sum(b.cols for b in blocks),
        )

    @classmethod
    def vstack(cls, blocks: Sequence["IntMatrix"]) -> "IntMatrix":
        width = blocks[0].cols
        if any(b.cols != width for b in blocks):
            raise DimensionMismatch("vstack blocks differ in width")
        return cls(sum(b.rows for b in blocks), width, sum((b.entries for b in blocks), ()))

    @classmethod
    def block_diagonal(cls, block: "IntMatrix", copies: int) -> "IntMatrix":
        n = block.rows * copies
        m = block.cols * copies
        out = [[0] * m for _ in range(n)]
        for k in range(copies):
            for i in range(block.rows):
                for j in range(block.cols):
                    out[k * block.rows + i][k * block.cols + j] = block[i, j]
        return cls.from_rows(out, cols=m)

    # ================ ACCESS ================

    def __getitem__(self, index: Tuple[int, int]) -> int:
        i, j = index
        return self.entries[i * self.cols + j]

    def row(self, i: int) -> Vector:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> Vector:
        return tuple(self.entries[i * self.cols + j] for i in range(self.rows))

    def as_rows(self) -> List[List[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def column_block(self, index: int, width: int) -> "IntMatrix":
        """Columns [index*width, (index+1)*width)"""
        return IntMatrix.from_rows(
            [self.row(i)[index * width:(index + 1) * width] for i in range(self.rows)], cols=width
        )

    def row_block(self, index: int, height: int) -> "IntMatrix":
        return IntMatrix(height, self.cols, self.entries[index * height * self.cols:(index + 1) * height * self.cols])

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    @property
    def is_zero(self) -> bool:
        return not any(self.entries)

    def scalar_value(self) -> Optional[int]:
        """a if the matrix is a*I, else None"""
        if not self.is_square or self.rows == 0:
            return None
        a = self[0, 0]
        return a if self == IntMatrix.scalar(self.rows, a) else None

    @property
    def is_identity(self) -> bool:
        return self.scalar_value() == 1

    # ================ ARITHMETIC ================

    def __matmul__(self, other: "IntMatrix") -> "IntMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        cols = [other.col(j) for j in range(other.cols)]
        return IntMatrix(
            self.rows,
            other.cols,
            tuple(sum(a * b for a, b in zip(self.row(i), col)) for i in range(self.rows) for col in cols),
        )

    def __add__(self, other: "IntMatrix") -> "IntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("cannot add matrices of different sizes")
        return IntMatrix(self.rows, self.cols, tuple(a + b for a, b in zip(self.entries, other.entries)))

    def __neg__(self) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(-a for a in self.entries))

    def __sub__(self, other: "IntMatrix") -> "IntMatrix":
        return self + (-other)

    def scale(self, k: int) -> "IntMatrix":
        return IntMatrix(self.rows, self.cols, tuple(k * a for a in self.entries))

    def apply(self, vector: Sequence[int]) -> Vector:
        if len(vector) != self.cols:
            raise DimensionMismatch(f"vector of length {len(vector)} for a {self.rows}x{self.cols} matrix")
        return tuple(sum(a * x for a, x in zip(self.row(i), vector)) for i in range(self.rows))

    def transpose(self) -> "IntMatrix":
        return IntMatrix.from_rows([self.col(j) for j in range(self.cols)], cols=self.rows)

    def to_sympy(self) -> ImmutableMatrix:
        return ImmutableMatrix(self.rows, self.cols, list(self.entries))

    def __str__(self) -> str:
        return "; ".join(" ".join(str(x) for x in self.row(i)) for i in range(self.rows))


def add_vectors(*vectors: Sequence[int]) -> Vector:
    return tuple(sum(xs) for xs in zip(*vectors))


def parse_matrix(text: str) -> IntMatrix:
    """'1 1 -1; 0 2 3' -> 2x3 matrix"""
    rows = [r.replace(",", " ").split() for r in text.strip().split(";") if r.strip()]
    try:
        return IntMatrix.from_rows([[int(x) for x in r] for r in rows])
    except ValueError:
        raise UsageError(f"cannot read an integer matrix from '{text}'")


# ================ ELIMINATION OVER Q ================

def rref(matrix) -> Tuple[RatMatrix, Tuple[int, ...]]:
    """Reduced row echelon form and pivot columns"""
    if isinstance(matrix, IntMatrix):
        matrix = matrix.to_sympy()
    reduced, pivots = Matrix(matrix).rref()
    return ImmutableMatrix(reduced), tuple(pivots)


@dataclass(frozen=True)
class SpanMembership:
    member: bool
    coefficients: Optional[Tuple[Rational, ...]] = None

    def __bool__(self) -> bool:
        return self.member


def in_span(vector: Sequence, basis: Sequence[Sequence]) -> SpanMembership:
    """Rational coefficients expressing vector in terms of basis, if any"""
    length = len(vector)
    if any(len(b) != length for b in basis):
        raise DimensionMismatch("span vectors differ in length")
    if not basis:
        # the empty set spans only 0
        if all(x == 0 for x in vector):
            return SpanMembership(True, ())
        return SpanMembership(False)
    augmented = Matrix(length, len(basis) + 1, lambda i, j: basis[j][i] if j < len(basis) else vector[i])
    reduced, pivots = augmented.rref()
    if len(basis) in pivots:
        return SpanMembership(False)
    coefficients = [Rational(0)] * len(basis)
    for row, col in enumerate(pivots):
        coefficients[col] = Rational(reduced[row, len(basis)])
    return SpanMembership(True, tuple(coefficients))


def combine(basis: Sequence[Sequence], coefficients: Sequence) -> Tuple[Rational, ...]:
    """sum_i coefficients[i] * basis[i], exactly"""
    if not basis:
        return ()
    return tuple(sum((Rational(c) * Rational(b[i]) for c, b in zip(coefficients, basis)), Rational(0))
                 for i in range(len(basis[0])))


# ================ INTEGER SOLVING ================

def smith_decomposition(matrix: IntMatrix) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """
    (D, U, V) with U @ matrix @ V == D, D diagonal with d_1 | d_2 | ...
    and U, V unimodular.
    """
    a = matrix.as_rows()
    m, n = matrix.rows, matrix.cols
    left = IntMatrix.identity(m).as_rows()
    right = IntMatrix.identity(n).as_rows()

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        left[i], left[j] = left[j], left[i]

    def swap_cols(i, j):
        for row in a:
            row[i], row[j] = row[j], row[i]
        for row in right:
            row[i], row[j] = row[j], row[i]

    def add_row(target, source, q):
        a[target] = [x + q * y for x, y in zip(a[target], a[source])]
        left[target] = [x + q * y for x, y in zip(left[target], left[source])]

    def add_col(target, source, q):
        for row in a:
            row[target] += q * row[source]
        for row in right:
            row[target] += q * row[source]

    for s in range(min(m, n)):
        while True:
            candidates = [(abs(a[i][j]), i, j) for i in range(s, m) for j in range(s, n) if a[i][j] != 0]
            if not candidates:
                return IntMatrix.from_rows(a, cols=n), IntMatrix.from_rows(left, cols=m), IntMatrix.from_rows(right, cols=n)
            _, pi, pj = min(candidates)
            swap_rows(s, pi)
            swap_cols(s, pj)
            pivot = a[s][s]
            clean = True
            for i in range(s + 1, m):
                add_row(i, s, -(a[i][s] // pivot))
                clean = clean and a[i][s] == 0
            for j in range(s + 1, n):
                add_col(j, s, -(a[s][j] // pivot))
                clean = clean and a[s][j] == 0
            if not clean:
                continue
            # pivot has to divide the rest of the block
            bad = next((i for i in range(s + 1, m) for j in range(s + 1, n) if a[i][j] % pivot), None)
            if bad is None:
                break
            add_row(s, bad, 1)
        if a[s][s] < 0:
            a[s] = [-x for x in a[s]]
            left[s] = [-x for x in left[s]]
    return IntMatrix.from_rows(a, cols=n), IntMatrix.from_rows(left, cols=m), IntMatrix.from_rows(right, cols=n)


@dataclass(frozen=True)
class SmithObstruction:
    """Row `index` of D y = U b: divisor d_i does not divide value"""
    index: int
    divisor: int
    value: int


@dataclass(frozen=True)
class IntegerSolvability:
    solution: Optional[Vector]
    rational: bool
    obstruction: Optional[SmithObstruction] = None


def integer_solvability(matrix: IntMatrix, rhs: Sequence[int]) -> IntegerSolvability:
    if len(rhs) != matrix.rows:
        raise DimensionMismatch(f"right-hand side of length {len(rhs)} for {matrix.rows} equations")
    diagonal, left, right = smith_decomposition(matrix)
    target = left.apply(rhs)
    rank = sum(1 for i in range(min(matrix.rows, matrix.cols)) if diagonal[i, i] != 0)
    if any(target[i] != 0 for i in range(rank, matrix.rows)):
        return IntegerSolvability(None, rational=False)
    y = [0] * matrix.cols
    for i in range(rank):
        d = diagonal[i, i]
        if target[i] % d:
            return IntegerSolvability(None, rational=True, obstruction=SmithObstruction(i, d, target[i]))
        y[i] = target[i] // d
    return IntegerSolvability(right.apply(y), rational=True)


def solve_integer_linear(matrix: IntMatrix, rhs: Sequence[int]) -> Optional[Vector]:
    """Some integer x with matrix @ x == rhs, or None"""
    return integer_solvability(matrix, rhs).solution


def solve_integer_matrix(matrix: IntMatrix, rhs: IntMatrix) -> Optional[IntMatrix]:
    """Integer X with matrix @ X == rhs, column by column"""
    if rhs.rows != matrix.rows:
        raise DimensionMismatch("matrix equation sides differ in height")
    columns = []
    for j in range(rhs.cols):
        x = solve_integer_linear(matrix, rhs.col(j))
        if x is None:
            return None
        columns.append(x)
    if not columns:
        return IntMatrix.zeros(matrix.cols, 0)
    return IntMatrix.from_rows(columns, cols=matrix.cols).transpose()


def index_of_image(c: IntMatrix) -> Optional[int]:
    """[Z^d : c(Z^d)] = |det c|, None when the index is infinite"""
    if not c.is_square:
        raise DimensionMismatch(f"index of image needs a square matrix, got {c.rows}x{c.cols}")
    det = int(c.to_sympy().det()) if c.rows else 1
    return abs(det) if det != 0 else None


def adjugate(c: IntMatrix) -> Optional[Tuple[IntMatrix, int]]:
    """(adj c, det c) with c^-1 = adj c / det c; None when c is singular"""
    if not c.is_square:
        raise DimensionMismatch(f"adjugate needs a square matrix, got {c.rows}x{c.cols}")
    matrix = c.to_sympy()
    det = int(matrix.det()) if c.rows else 1
    if det == 0:
        return None
    adj = matrix.adjugate() if c.rows else matrix
    return IntMatrix(c.rows, c.cols, tuple(int(x) for x in adj)), det


def lcm_of(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = lcm(out, v)
    return out
