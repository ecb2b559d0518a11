"""
Integer polynomial maps (Z^d)^j -> Z^d with f(0) = 0.

Each output coordinate is a sparse polynomial over the j*d input variables,
stored as (exponent-vector, coefficient) monomials; variable i*d + r is
coordinate r of argument i.
"""
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from sympy import Poly, symbols, sympify

from errors import DimensionMismatch, InvalidShape
from linalg import IntMatrix

Point = Tuple[int, ...]
Monomial = Tuple[Tuple[int, ...], int]


def _canonical(terms, nvars: int) -> Tuple[Monomial, ...]:
    merged: Dict[Tuple[int, ...], int] = {}
    for exponents, coeff in terms:
        exponents = tuple(int(e) for e in exponents)
        if len(exponents) != nvars:
            raise InvalidShape(f"exponent vector of length {len(exponents)}, expected {nvars}")
        if any(e < 0 for e in exponents):
            raise InvalidShape("negative exponent")
        merged[exponents] = merged.get(exponents, 0) + int(coeff)
    return tuple(sorted((e, c) for e, c in merged.items() if c != 0))


@dataclass(frozen=True)
class PolyMap:
    arity: int
    dim: int
    coordinates: Tuple[Tuple[Monomial, ...], ...]

    def __post_init__(self):
        if self.arity < 0 or self.dim < 1:
            raise InvalidShape(f"bad polynomial map signature arity={self.arity} dim={self.dim}")
        if len(self.coordinates) != self.dim:
            raise InvalidShape(f"{len(self.coordinates)} output coordinates for dimension {self.dim}")
        canonical = tuple(_canonical(coord, self.nvars) for coord in self.coordinates)
        for coord in canonical:
            if any(not any(e) for e, _ in coord):
                raise InvalidShape("polynomial map must send 0 to 0 (nonzero constant term)")
        object.__setattr__(self, "coordinates", canonical)

    @property
    def nvars(self) -> int:
        return self.arity * self.dim

    # ================ CONSTRUCTORS ================

    @classmethod
    def zero(cls, arity: int, dim: int) -> "PolyMap":
        return cls(arity, dim, tuple(() for _ in range(dim)))

    @classmethod
    def from_matrix(cls, matrix: IntMatrix, arity: int) -> "PolyMap":
        """Homomorphism given by a d x (arity*d) integer matrix"""
        dim = matrix.rows
        if matrix.cols != arity * dim:
            raise DimensionMismatch(f"{matrix.rows}x{matrix.cols} matrix is not a map (Z^{dim})^{arity} -> Z^{dim}")
        nvars = arity * dim
        coords = []
        for r in range(dim):
            coords.append(tuple(
                (tuple(1 if v == col else 0 for v in range(nvars)), matrix[r, col])
                for col in range(nvars) if matrix[r, col] != 0
            ))
        return cls(arity, dim, tuple(coords))

    @classmethod
    def projection(cls, arity: int, dim: int, index: int) -> "PolyMap":
        """(x_0, ..., x_{arity-1}) -> x_index"""
        if not 0 <= index < arity:
            raise InvalidShape(f"projection index {index} out of range for arity {arity}")
        blocks = [IntMatrix.identity(dim) if i == index else IntMatrix.zeros(dim, dim) for i in range(arity)]
        return cls.from_matrix(IntMatrix.hstack(blocks), arity)

    @classmethod
    def linear_form(cls, xi: Sequence[int]) -> "PolyMap":
        """x -> <x, xi> on Z^len(xi), d = 1"""
        return cls.from_matrix(IntMatrix.from_rows([list(xi)], cols=len(xi)), len(xi))

    @classmethod
    def parse(cls, expressions: Sequence[str], arity: int, dim: int = 1) -> "PolyMap":
        """
        One sympy expression per output coordinate over x0, x1, ...
        (variable i*dim + r is coordinate r of argument i), e.g. ["x0**2"].
        """
        if len(expressions) != dim:
            raise InvalidShape(f"{len(expressions)} expressions for dimension {dim}")
        nvars = arity * dim
        names = symbols(f"x0:{nvars}") if nvars else ()
        coords = []
        for text in expressions:
            expr = sympify(text, locals={str(s): s for s in names})
            if nvars == 0:
                if expr != 0:
                    raise InvalidShape("arity-0 map must be zero")
                coords.append(())
                continue
            stray = expr.free_symbols - set(names)
            if stray:
                raise InvalidShape(f"unknown variables {sorted(map(str, stray))} (arity {arity}, dim {dim})")
            poly = Poly(expr, *names)
            if any(not c.is_integer for c in poly.coeffs()):
                raise InvalidShape(f"non-integer coefficient in {text}")
            coords.append(tuple((exps, int(c)) for exps, c in poly.terms()))
        return cls(arity, dim, tuple(coords))

    # ================ PROPERTIES ================

    @property
    def degree(self) -> int:
        return max((sum(e) for coord in self.coordinates for e, _ in coord), default=0)

    @property
    def is_homomorphism(self) -> bool:
        return all(sum(e) == 1 for coord in self.coordinates for e, _ in coord)

    def bound(self, radius: int) -> int:
        """Largest |coordinate| of f over arguments of max-norm <= radius"""
        return max((sum(abs(c) * radius ** sum(e) for e, c in coord) for coord in self.coordinates), default=0)

    def to_matrix(self) -> IntMatrix:
        if not self.is_homomorphism:
            raise InvalidShape("polynomial map of degree > 1 has no matrix")
        rows = [[0] * self.nvars for _ in range(self.dim)]
        for r, coord in enumerate(self.coordinates):
            for exponents, coeff in coord:
                rows[r][exponents.index(1)] += coeff
        return IntMatrix.from_rows(rows, cols=self.nvars)

    # ================ EVALUATION ================

    def __call__(self, *args: Point) -> Point:
        if len(args) != self.arity:
            raise DimensionMismatch(f"map of arity {self.arity} called with {len(args)} arguments")
        flat: List[int] = []
        for point in args:
            if len(point) != self.dim:
                raise DimensionMismatch(f"argument {point} is not in Z^{self.dim}")
            flat.extend(point)
        out = []
        for coord in self.coordinates:
            total = 0
            for exponents, coeff in coord:
                term = coeff
                for x, e in zip(flat, exponents):
                    if e:
                        term *= x ** e
                total += term
            out.append(total)
        return tuple(out)

    # ================ DERIVED MAPS ================

    def lift_arity(self, arity: int) -> "PolyMap":
        """phi(x_0..x_{arity-1}) = f(x_0..x_{j-1})"""
        if arity < self.arity:
            raise InvalidShape(f"cannot lift arity {self.arity} down to {arity}")
        pad = (0,) * ((arity - self.arity) * self.dim)
        return PolyMap(arity, self.dim, tuple(tuple((e + pad, c) for e, c in coord) for coord in self.coordinates))

    def compose_each(self, c: IntMatrix) -> "PolyMap":
        """f o (c, ..., c), i.e. c applied to every argument; homomorphisms only"""
        spread = IntMatrix.block_diagonal(c, self.arity)
        return PolyMap.from_matrix(self.to_matrix() @ spread, self.arity)

    def __str__(self) -> str:
        parts = []
        for coord in self.coordinates:
            if not coord:
                parts.append("0")
                continue
            monos = []
            for exponents, coeff in coord:
                factors = [f"x{v}" + (f"^{e}" if e > 1 else "") for v, e in enumerate(exponents) if e]
                monos.append(f"{coeff}*" + "*".join(factors) if coeff != 1 else "*".join(factors))
            parts.append(" + ".join(monos))
        return "(" + ", ".join(parts) + ")"
