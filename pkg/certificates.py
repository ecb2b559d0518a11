"""
Search certificates: a monochromatic witness, a bad coloring, or a minimal N
together with the bad coloring one size below it. Each certificate carries
its configuration so it can be re-verified from the document alone.
"""
import logging
from typing import List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from config import ENGINE_VERSION
from digests import digest_manager
from errors import InvalidCertificate, UsageError, Verdict, failed, passed
from linalg import IntMatrix
from search import (
    BadColoring, Coloring, Configuration, Domain, MonoSearch, PartitionNumber, SearchBudget,
    as_configuration, decide, decode_colors, domain_for, encode_colors, verify_bad_coloring,
)
from shapes import ShapeDocument

logger = logging.getLogger(__name__)

CertificateKind = Literal["mono-witness", "bad-coloring", "minimal-N"]


class DomainDocument(BaseModel):
    lo: List[int]
    hi: List[int]

    @classmethod
    def from_domain(cls, domain: Domain) -> "DomainDocument":
        return cls(lo=list(domain.lo), hi=list(domain.hi))

    def to_domain(self) -> Domain:
        return Domain(tuple(self.lo), tuple(self.hi))


class ConfigurationDocument(BaseModel):
    name: str = ""
    shape: ShapeDocument
    rows: Optional[List[List[int]]] = None

    @classmethod
    def from_configuration(cls, config: Configuration) -> "ConfigurationDocument":
        return cls(
            name=config.name,
            shape=ShapeDocument.from_shape(config.shape),
            rows=config.rows.as_rows() if config.rows is not None else None,
        )

    def to_configuration(self) -> Configuration:
        shape = self.shape.to_shape()
        rows = IntMatrix.from_rows(self.rows, cols=shape.m + 1) if self.rows is not None else None
        return Configuration(shape, rows, self.name)


def configuration_hash(config: Configuration) -> str:
    """Hash of the geometric content; the display name does not take part"""
    doc = ConfigurationDocument.from_configuration(config)
    return digest_manager.content_hash(doc.model_dump(mode="json", exclude={"name"}))


class Certificate(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    kind: CertificateKind
    shape_hash: str = Field(alias="shape-hash")
    configuration: ConfigurationDocument
    domain: DomainDocument
    r: int
    seed_range: Optional[List[int]] = Field(default=None, alias="seed-range")
    truncated: bool = False
    strict: bool = False
    seed: Optional[List[List[int]]] = None
    color: Optional[int] = None
    coloring: Optional[str] = None
    N: Optional[int] = None
    proof_mode: Optional[Literal["exhaustive", "assumed"]] = Field(default=None, alias="proof-mode")
    bad: Optional["Certificate"] = None
    budget_exhausted: bool = Field(default=False, alias="budget-exhausted")
    engine_version: str = Field(default=ENGINE_VERSION, alias="engine-version")

    def to_coloring(self) -> Coloring:
        if self.coloring is None:
            raise InvalidCertificate(f"{self.kind} certificate carries no coloring")
        return Coloring(self.domain.to_domain(), self.r, decode_colors(self.coloring))


Certificate.model_rebuild()


# ================ BUILDERS ================

def _base(config: Configuration, domain: Domain, r: int, seed_range, strict: bool) -> dict:
    return {
        "shape_hash": configuration_hash(config),
        "configuration": ConfigurationDocument.from_configuration(config),
        "domain": DomainDocument.from_domain(domain),
        "r": r,
        "seed_range": list(seed_range) if seed_range is not None else None,
        "strict": strict,
    }


def mono_witness_certificate(
    target, coloring: Coloring, found: MonoSearch, budget: SearchBudget, strict: bool = False
) -> Certificate:
    if not found.found:
        raise UsageError("no witness to certify")
    config = as_configuration(target)
    return Certificate(
        kind="mono-witness",
        seed=[list(p) for p in found.seed],
        color=found.color,
        coloring=encode_colors(coloring.colors),
        **_base(config, coloring.domain, coloring.r, budget.seed_range, strict),
    )


def bad_coloring_certificate(
    target, bad: BadColoring, seed_range=None, strict: bool = False, truncated: bool = False
) -> Certificate:
    config = as_configuration(target)
    coloring = bad.coloring
    return Certificate(
        kind="bad-coloring",
        coloring=encode_colors(coloring.colors),
        N=coloring.domain.hi[0] if coloring.domain.d == 1 else None,
        truncated=truncated,
        **_base(config, coloring.domain, coloring.r, seed_range, strict),
    )


def partition_certificate(target, result: PartitionNumber, budget: SearchBudget, strict: bool = False) -> Certificate:
    """minimal-N when the search decided, otherwise the best bad coloring marked budget-exhausted"""
    config = as_configuration(target)
    bad = None
    if result.bad:
        bad = bad_coloring_certificate(config, result.bad, budget.seed_range, strict, result.truncated)
    if result.n is None:
        if bad is None:
            raise InvalidCertificate("budget ran out before any size was decided")
        return bad.model_copy(update={"budget_exhausted": True})
    return Certificate(
        kind="minimal-N",
        N=result.n,
        proof_mode=result.proof_mode,
        bad=bad,
        truncated=result.truncated,
        **_base(config, domain_for(config.d, result.n), result.r, budget.seed_range, strict),
    )


# ================ VERIFICATION ================

def verify_certificate(cert: Certificate, target=None, budget: Optional[SearchBudget] = None) -> Verdict:
    """
    Re-derives the certificate's claim; never raises for a failed check.
    Scans cover every seed fitting the domain whatever range the
    certificate records.
    """
    try:
        config = cert.configuration.to_configuration()
        coloring = cert.to_coloring() if cert.coloring is not None else None
    except Exception as e:
        return failed(f"unreadable certificate: {e}")
    if configuration_hash(config) != cert.shape_hash:
        return failed("shape-hash does not match the embedded configuration")
    if target is not None and configuration_hash(as_configuration(target)) != cert.shape_hash:
        return failed("certificate was issued for a different shape")

    if cert.kind == "mono-witness":
        if cert.seed is None or coloring is None or cert.color is None:
            return failed("mono-witness needs seed, color and coloring")
        seed = tuple(tuple(p) for p in cert.seed)
        if len(seed) != config.seed_length or any(not any(p) for p in seed):
            return failed(f"seed {cert.seed} is not a valid seed")
        points = config.points(seed)
        if cert.strict and len(points) != config.expected_size:
            return failed("witness has repeated points under strict mode")
        for p in points:
            if p not in coloring.domain:
                return failed(f"point {p} lies outside {coloring.domain}")
            if coloring(p) != cert.color:
                return failed(f"point {p} has color {coloring(p)}, not {cert.color}")
        return passed(f"seed {cert.seed} gives a set of color {cert.color}")

    if cert.kind == "bad-coloring":
        if coloring is None:
            return failed("bad-coloring certificate carries no coloring")
        try:
            ok, seed = verify_bad_coloring(config, coloring, None, cert.strict)
        except UsageError as e:
            return failed(f"cannot re-scan the domain exhaustively: {e.detail}")
        if not ok:
            return failed(f"seed {seed} yields a monochromatic set")
        return passed(f"no seed fitting {coloring.domain} gives a monochromatic set")

    # minimal-N
    if cert.N is None or cert.N < 1:
        return failed("minimal-N certificate without N")
    if cert.N > 1:
        if cert.bad is None:
            return failed(f"no bad coloring for N - 1 = {cert.N - 1}")
        below = domain_for(config.d, cert.N - 1)
        if cert.bad.domain.to_domain() != below:
            return failed(f"bad coloring is on {cert.bad.domain.to_domain()}, expected {below}")
        verdict = verify_certificate(cert.bad, config)
        if not verdict:
            return failed(f"bad coloring for N - 1 rejected: {verdict.reason}")
    if cert.proof_mode == "assumed":
        return passed(f"N = {cert.N} assumed; bad coloring below it verified")
    budget = budget or SearchBudget(seed_range=None, workers=1, split_depth=0)
    if budget.seed_range is not None:
        budget = SearchBudget(None, budget.max_nodes, budget.max_seconds, budget.workers, budget.split_depth)
    try:
        result, _ = decide(config, domain_for(config.d, cert.N), cert.r, budget, cert.strict)
    except UsageError as e:
        return failed(f"cannot re-decide N = {cert.N} exhaustively: {e.detail}")
    if result.coloring is not None:
        return failed(f"found a bad coloring at N = {cert.N}: {encode_colors(result.coloring)}")
    if result.exhausted:
        return failed(f"re-deciding N = {cert.N} exhausted the budget")
    return passed(f"every {cert.r}-coloring at N = {cert.N} is forced")
