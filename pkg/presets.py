"""Named configurations for the CLI and the tests"""
import logging
import re
from itertools import product
from typing import Callable, Dict

from errors import UsageError
from linalg import IntMatrix, parse_matrix
from polymaps import PolyMap
from rado import check_columns, deuber_reduce
from search import Configuration
from shapes import Shape, from_mpc

logger = logging.getLogger(__name__)


def schur() -> Configuration:
    """x + y = z through the reduction of [1 1 -1]"""
    A = parse_matrix("1 1 -1")
    reduction = deuber_reduce(A, check_columns(A))
    shape = from_mpc(reduction.m, reduction.p, reduction.c)
    return Configuration(shape, reduction.B, "schur")


def ap3() -> Configuration:
    """{a, a+d, a+2d} with d = s_0 and a = s_1"""
    rows = IntMatrix.from_rows([[0, 1], [1, 1], [2, 1]])
    return Configuration(from_mpc(1, 2, 1), rows, "ap3")


def brauer(k: int) -> Configuration:
    return Configuration(from_mpc(1, k, 1), None, f"brauer-{k}")


def brauer_rows(k: int) -> Configuration:
    """{d, a, a+d, ..., a+kd}"""
    rows = IntMatrix.from_rows([[1, 0]] + [[i, 1] for i in range(k + 1)])
    return Configuration(from_mpc(1, k, 1), rows, f"brauer-rows-{k}")


def folkman(m: int) -> Configuration:
    """F_j = {x -> <x, xi> : xi in {0,1}^j}, so every set holds FS(s_0..s_m)"""
    families = tuple(
        tuple(PolyMap.linear_form(xi) for xi in product((0, 1), repeat=j)) for j in range(1, m + 1)
    )
    return Configuration(Shape(1, m, families, IntMatrix.identity(1)), None, f"folkman-{m}")


def quadruple() -> Configuration:
    """{x, y + x^2, z, z + y^2}"""
    families = (
        (PolyMap.parse(["x0**2"], 1),),
        (PolyMap.zero(2, 1), PolyMap.parse(["x1**2"], 2)),
    )
    return Configuration(Shape(1, 2, families, IntMatrix.identity(1)), None, "quadruple")


def chain(k: int, expression: str = "x**2") -> Configuration:
    """
    F_i = {0, (x_0..x_{i-1}) -> f(x_{i-1})}; a set holds x_0..x_k and
    a_i = x_i + f(x_{i-1}).
    """
    families = []
    for i in range(1, k + 1):
        link = PolyMap.parse([expression.replace("x", f"x{i - 1}")], i)
        families.append((PolyMap.zero(i, 1), link))
    return Configuration(Shape(1, k, tuple(families), IntMatrix.identity(1)), None, f"chain-{k}")


def multidim_brauer(d: int = 2, k: int = 1) -> Configuration:
    """
    F_1 = {x -> (i_1 f(x), ..., i_d f(x)) : 0 <= i <= k} with f the sum of
    coordinates; a set is {b} u {a + (i_1 f(b), ..., i_d f(b))}.
    """
    maps = []
    for coeffs in product(range(k + 1), repeat=d):
        maps.append(PolyMap.from_matrix(IntMatrix.from_rows([[i] * d for i in coeffs]), 1))
    return Configuration(Shape(d, 1, (tuple(maps),), IntMatrix.identity(d)), None, f"multidim-brauer-{d}-{k}")


def poly_brauer(d: int = 1) -> Configuration:
    """
    {b} u {a + (f_1(b), ..., f_d(b)) : f_i in F} with F = {sigma, sigma^2},
    sigma the coordinate sum.
    """
    sigma = " + ".join(f"x{i}" for i in range(d))
    polys = [f"{sigma}", f"({sigma})**2"]
    maps = [PolyMap.parse(list(choice), 1, d) for choice in product(polys, repeat=d)]
    return Configuration(Shape(d, 1, (tuple(maps),), IntMatrix.identity(d)), None, f"poly-brauer-{d}")


def mpc(m: int, p: int, c: int) -> Configuration:
    return Configuration(from_mpc(m, p, c), None, f"mpc-{m}-{p}-{c}")


_FIXED: Dict[str, Callable[[], Configuration]] = {
    "schur": schur,
    "ap3": ap3,
    "quadruple": quadruple,
    "multidim-brauer": multidim_brauer,
    "poly-brauer": poly_brauer,
}

_PATTERNS = [
    (re.compile(r"brauer-(\d+)"), lambda k: brauer(int(k))),
    (re.compile(r"brauer-rows-(\d+)"), lambda k: brauer_rows(int(k))),
    (re.compile(r"folkman-(\d+)"), lambda m: folkman(int(m))),
    (re.compile(r"chain-(\d+)"), lambda k: chain(int(k))),
    (re.compile(r"mpc-(\d+)-(\d+)-(\d+)"), lambda m, p, c: mpc(int(m), int(p), int(c))),
    (re.compile(r"multidim-brauer-(\d+)-(\d+)"), lambda d, k: multidim_brauer(int(d), int(k))),
    (re.compile(r"poly-brauer-(\d+)"), lambda d: poly_brauer(int(d))),
]

PRESET_NAMES = sorted(_FIXED) + [
    "brauer-K", "brauer-rows-K", "folkman-M", "chain-K", "mpc-M-P-C", "multidim-brauer-D-K", "poly-brauer-D",
]


def preset(name: str) -> Configuration:
    if name in _FIXED:
        return _FIXED[name]()
    for pattern, build in _PATTERNS:
        match = pattern.fullmatch(name)
        if match:
            return build(*match.groups())
    raise UsageError(f"unknown preset '{name}'; known: {', '.join(PRESET_NAMES)}")
