import logging
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, TypeVar

from config import settings
from hypergraph import EngineLimits, EngineResult, Hypergraph, canonical_prefixes, find_bad_coloring, merge_results

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def _engine_job(job) -> EngineResult:
    graph, r, limits, prefix, deadline = job
    return find_bad_coloring(graph, r, limits, prefix, deadline)


class SearchPool:
    """Fans independent jobs out to worker processes; inline when one worker is configured"""

    def __init__(self, workers: Optional[int] = None):
        self.workers = workers or settings.WORKERS

    def map(self, fn: Callable[[T], R], jobs: Sequence[T], workers: Optional[int] = None) -> List[R]:
        width = workers or self.workers
        if width <= 1 or len(jobs) <= 1:
            return [fn(job) for job in jobs]
        logger.debug(f"dispatching {len(jobs)} jobs to {width} workers")
        with ProcessPoolExecutor(max_workers=width) as pool:
            return list(pool.map(fn, jobs))

    def solve(
        self,
        graph: Hypergraph,
        r: int,
        limits: EngineLimits,
        split_depth: int = 0,
        workers: Optional[int] = None,
        deadline: Optional[float] = None,
    ) -> EngineResult:
        """Bad-coloring decision, split into canonical color-prefix subtrees at split_depth"""
        if deadline is None:
            deadline = time.monotonic() + limits.max_seconds
        depth = min(split_depth, graph.size)
        if depth <= 0:
            return find_bad_coloring(graph, r, limits, deadline=deadline)
        prefixes = canonical_prefixes(r, depth)
        jobs = [(graph, r, limits, prefix, deadline) for prefix in prefixes]
        results = self.map(_engine_job, jobs, workers)
        merged = merge_results(results)
        logger.debug(f"merged {len(results)} subtrees, {merged.nodes} nodes")
        return merged


search_pool = SearchPool()
