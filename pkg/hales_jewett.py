"""
Combinatorial lines in [k]^n.

Letters are 1..k and STAR (0) marks the moving coordinates of a variable
word. Words are indexed as mixed-radix integers, most significant letter
first, so a coloring of [k]^n is a flat sequence of k^n colors.
"""
import logging
import time
from dataclasses import dataclass
from itertools import product
from typing import Callable, Iterator, List, Optional, Sequence, Tuple, Union

from pydantic import BaseModel

from errors import UsageError
from hypergraph import EngineLimits, Hypergraph
from workers import search_pool

logger = logging.getLogger(__name__)

STAR = 0

Word = Tuple[int, ...]
VariableWord = Tuple[int, ...]
WordColoring = Union[Sequence[int], Callable[[Word], int]]


def _check_alphabet(k: int, n: int):
    if k < 1 or n < 1:
        raise UsageError(f"need k >= 1 and n >= 1, got k={k} n={n}")


def word_index(word: Word, k: int) -> int:
    out = 0
    for letter in word:
        out = out * k + (letter - 1)
    return out


def word_at(index: int, k: int, n: int) -> Word:
    letters = []
    for _ in range(n):
        index, rem = divmod(index, k)
        letters.append(rem + 1)
    return tuple(reversed(letters))


def words(k: int, n: int) -> Iterator[Word]:
    return product(range(1, k + 1), repeat=n)


def is_variable_word(w: Sequence[int], k: int) -> bool:
    return STAR in w and all(0 <= a <= k for a in w)


def instantiate(w: VariableWord, a: int, k: Optional[int] = None) -> Word:
    """Every STAR replaced by a"""
    if a < 1 or (k is not None and a > k):
        raise UsageError(f"letter {a} is not in the alphabet")
    if k is not None and any(not 0 <= x <= k for x in w):
        raise UsageError(f"{w} is not a word over [{k}]")
    return tuple(a if x == STAR else x for x in w)


def line(w: VariableWord, k: int) -> List[Word]:
    if not is_variable_word(w, k):
        raise UsageError(f"{w} is not a variable word over [{k}]")
    return [instantiate(w, a, k) for a in range(1, k + 1)]


def lines(k: int, n: int) -> Iterator[VariableWord]:
    """Variable words in scan order; the all-STAR word comes first"""
    _check_alphabet(k, n)
    for w in product(range(0, k + 1), repeat=n):
        if STAR in w:
            yield w


def _color_of(coloring: WordColoring, word: Word, k: int) -> int:
    if callable(coloring):
        return coloring(word)
    return coloring[word_index(word, k)]


def find_mono_line(k: int, n: int, coloring: WordColoring) -> Optional[VariableWord]:
    """First variable word in scan order whose line is single-colored"""
    if not callable(coloring) and len(coloring) != k ** n:
        raise UsageError(f"coloring of [{k}]^{n} needs {k ** n} entries, got {len(coloring)}")
    for w in lines(k, n):
        if len({_color_of(coloring, x, k) for x in line(w, k)}) == 1:
            return w
    return None


def render(w: Sequence[int]) -> str:
    return "".join("*" if x == STAR else str(x) for x in w)


def parse_word(text: str) -> Tuple[int, ...]:
    return tuple(STAR if ch == "*" else int(ch) for ch in text.strip())


# ================ HJ NUMBERS ================

def line_hypergraph(k: int, n: int) -> Hypergraph:
    return Hypergraph.build(k ** n, ([word_index(x, k) for x in line(w, k)] for w in lines(k, n)))


@dataclass(frozen=True)
class HJNumber:
    k: int
    r: int
    n: Optional[int]
    bad: Optional[Tuple[int, ...]]
    bad_n: int
    exhausted: bool


def hj_number(
    k: int,
    r: int,
    limits: EngineLimits = EngineLimits(),
    max_n: int = 6,
    split_depth: int = 0,
    workers: int = 1,
) -> HJNumber:
    """
    Least n with every r-coloring of [k]^n holding a monochromatic line;
    n is None if the budget or max_n runs out first.
    """
    if k < 1 or r < 1:
        raise UsageError(f"need k, r >= 1, got k={k} r={r}")
    deadline = time.monotonic() + limits.max_seconds
    bad: Optional[Tuple[int, ...]] = None
    bad_n = 0
    for n in range(1, max_n + 1):
        incidences = k * ((k + 1) ** n - k ** n)
        if incidences > limits.max_nodes:
            logger.info(f"⏱️ [{k}]^{n} has about {incidences} line incidences, over the {limits.max_nodes} node budget")
            break
        result = search_pool.solve(line_hypergraph(k, n), r, limits, split_depth, workers, deadline)
        if result.coloring is not None:
            bad, bad_n = result.coloring, n
            continue
        if result.exhausted:
            break
        logger.info(f"✅ HJ({k},{r}) = {n}")
        return HJNumber(k, r, n, bad, bad_n, False)
    logger.info(f"⏱️ HJ({k},{r}) undecided; [{k}]^{bad_n} has a line-free {r}-coloring")
    return HJNumber(k, r, None, bad, bad_n, True)


class HJLineDocument(BaseModel):
    k: int
    n: int
    coloring: List[int]
    line: Optional[str] = None


class HJNumberDocument(BaseModel):
    k: int
    r: int
    n: Optional[int] = None
    bad_n: int = 0
    bad: Optional[List[int]] = None
    exhausted: bool = False

    @classmethod
    def from_result(cls, result: HJNumber) -> "HJNumberDocument":
        return cls(
            k=result.k, r=result.r, n=result.n, bad_n=result.bad_n,
            bad=list(result.bad) if result.bad is not None else None, exhausted=result.exhausted,
        )
