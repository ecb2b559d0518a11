"""
Artifacts written by the CLI and their re-verification from the file alone.

Every artifact is an envelope {kind, engine-version, input-hash, payload}
around one of the module documents.
"""
import json
import logging
import os
from typing import Any, Dict, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field

from certificates import Certificate, verify_certificate
from config import ENGINE_VERSION
from digests import digest_manager
from errors import InvalidCertificate, Verdict, failed, passed
from hales_jewett import (
    HJLineDocument, HJNumberDocument, find_mono_line, line, line_hypergraph, parse_word, word_index,
)
from hypergraph import EngineLimits, find_bad_coloring
from ip_core import FiniteIPDocument, ProbeDocument, fs, verify_probe
from lift import FullLiftDocument, LiftPlanDocument, LiftReportDocument, verify_lift
from linalg import IntMatrix
from rado import ColumnsDocument, GenColumnsDocument, ReductionDocument, deuber_reduce, verify_columns, verify_general_columns
from shapes import DSetDocument, ShapeDocument, concordance_holds, generate

logger = logging.getLogger(__name__)

ArtifactKind = Literal[
    "certificate", "shape", "dset", "columns", "gen-columns", "reduction", "hj-line", "hj-number",
    "lift-plan", "full-lift", "lift-report", "ip-fs", "ip-probe",
]


class Artifact(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    kind: ArtifactKind
    engine_version: str = Field(default=ENGINE_VERSION, alias="engine-version")
    input_hash: str = Field(default="", alias="input-hash")
    payload: Dict[str, Any]


def wrap(kind: str, document: BaseModel, inputs: Any = None) -> Artifact:
    return Artifact(
        kind=kind,
        payload=document.model_dump(mode="json", by_alias=True),
        input_hash=digest_manager.content_hash(inputs) if inputs is not None else "",
    )


def save_artifact(artifact: Artifact, path: str) -> str:
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(json.dumps(artifact.model_dump(mode="json", by_alias=True), indent=2, sort_keys=True))
        fh.write("\n")
    logger.debug(f"wrote {artifact.kind} artifact to {path}")
    return path


def load_artifact(path: str) -> Artifact:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return Artifact.model_validate(json.load(fh))
    except FileNotFoundError:
        raise InvalidCertificate(f"no artifact at {path}")
    except ValueError as e:
        raise InvalidCertificate(f"unreadable artifact {path}: {e}")


# ================ PER-KIND CHECKS ================

def _verify_dset(doc: DSetDocument) -> Verdict:
    config = generate(doc.shape.to_shape(), doc.seed, allow_zero=True)
    if [list(p) for p in config.points] != doc.points:
        return failed("stored points differ from the regenerated set")
    if [[list(p) for p in ln] for ln in config.lines] != doc.lines:
        return failed("stored lines differ from the regenerated set")
    return passed(f"{len(doc.points)} points regenerated")


def _verify_reduction(doc: ReductionDocument) -> Verdict:
    A, cert = doc.columns.to_certificate()
    verdict = verify_columns(A, cert)
    if not verdict:
        return verdict
    B = IntMatrix.from_rows(doc.B, cols=doc.m + 1)
    if not (IntMatrix.from_rows(doc.matrix) @ B).is_zero:
        return failed("A B is not zero")
    again = deuber_reduce(A, cert)
    if (again.B, again.m, again.p, again.c) != (B, doc.m, doc.p, doc.c):
        return failed("stored reduction differs from the recomputed one")
    return passed(f"A B = 0 with (m, p, c) = ({doc.m}, {doc.p}, {doc.c})")


def _verify_hj_line(doc: HJLineDocument) -> Verdict:
    found = find_mono_line(doc.k, doc.n, doc.coloring)
    if doc.line is None:
        return passed("no monochromatic line") if found is None else failed("a monochromatic line exists")
    word = parse_word(doc.line)
    if len({doc.coloring[word_index(x, doc.k)] for x in line(word, doc.k)}) != 1:
        return failed(f"line {doc.line} is not monochromatic")
    return passed(f"line {doc.line} is monochromatic")


def _verify_hj_number(doc: HJNumberDocument) -> Verdict:
    if doc.bad is not None and not line_hypergraph(doc.k, doc.bad_n).is_bad(doc.bad):
        return failed(f"recorded coloring of [{doc.k}]^{doc.bad_n} has a monochromatic line")
    if doc.n is None:
        return passed("undecided; recorded line-free coloring checked")
    if doc.n > 1 and doc.bad_n != doc.n - 1:
        return failed(f"no line-free coloring recorded for n = {doc.n - 1}")
    result = find_bad_coloring(line_hypergraph(doc.k, doc.n), doc.r, EngineLimits())
    if result.coloring is not None or result.exhausted:
        return failed(f"n = {doc.n} is not forced")
    return passed(f"HJ({doc.k},{doc.r}) = {doc.n}")


def _verify_plan(doc: LiftPlanDocument) -> Verdict:
    plan = doc.to_plan()
    if (plan.q, plan.N, plan.M) != (doc.q, doc.N, doc.M):
        return failed("stored q, N, M disagree with k and n")
    if plan.C.as_rows() != doc.C:
        return failed("stored C is not c b")
    if not concordance_holds(plan.shape, plan.concordance.b, plan.concordance.witnesses):
        return failed("concordance identities c a_f = f b do not hold")
    return passed(f"plan of arity {doc.M} with concordant witnesses")


def _verify_report(doc: LiftReportDocument) -> Verdict:
    verdict = _verify_plan(doc.plan)
    if not verdict:
        return verdict
    seeds = [tuple(tuple(p) for p in t) for t in doc.seeds]
    report = verify_lift(doc.plan.to_plan(), seeds, doc.exhaustive, doc.samples, doc.rng_seed)
    if (report.tried, report.succeeded, report.insufficient) != (doc.tried, doc.succeeded, doc.insufficient):
        return failed(f"rerun gave {report.succeeded}/{report.tried}, stored {doc.succeeded}/{doc.tried}")
    if not report.ok:
        return failed(f"{len(report.failures)} colorings failed extraction")
    return passed(f"{report.succeeded} of {report.tried} colorings extracted on rerun")


def _verify_fs(doc: FiniteIPDocument) -> Verdict:
    ip = fs([tuple(x) for x in doc.generators])
    stored = {tuple(alpha): tuple(v) for alpha, v in doc.values}
    if stored != ip.values:
        return failed("stored subset sums differ from the recomputed ones")
    return passed(f"{len(stored)} subset sums recomputed")


def verify_artifact(artifact: Artifact) -> Verdict:
    """Re-derives the claim of any artifact the CLI writes"""
    payload = artifact.payload
    try:
        if artifact.kind == "certificate":
            return verify_certificate(Certificate.model_validate(payload))
        if artifact.kind == "shape":
            ShapeDocument.model_validate(payload).to_shape()
            return passed("shape is well formed")
        if artifact.kind == "dset":
            return _verify_dset(DSetDocument.model_validate(payload))
        if artifact.kind == "columns":
            A, cert = ColumnsDocument.model_validate(payload).to_certificate()
            return verify_columns(A, cert)
        if artifact.kind == "gen-columns":
            return verify_general_columns(GenColumnsDocument.model_validate(payload).to_certificate())
        if artifact.kind == "reduction":
            return _verify_reduction(ReductionDocument.model_validate(payload))
        if artifact.kind == "hj-line":
            return _verify_hj_line(HJLineDocument.model_validate(payload))
        if artifact.kind == "hj-number":
            return _verify_hj_number(HJNumberDocument.model_validate(payload))
        if artifact.kind == "lift-plan":
            return _verify_plan(LiftPlanDocument.model_validate(payload))
        if artifact.kind == "full-lift":
            doc = FullLiftDocument.model_validate(payload)
            for i, level in enumerate(doc.levels, start=1):
                verdict = _verify_plan(level)
                if not verdict:
                    return failed(f"level {i}: {verdict.reason}")
            return passed(f"{len(doc.levels)} levels checked")
        if artifact.kind == "lift-report":
            return _verify_report(LiftReportDocument.model_validate(payload))
        if artifact.kind == "ip-fs":
            return _verify_fs(FiniteIPDocument.model_validate(payload))
        if artifact.kind == "ip-probe":
            return verify_probe(ProbeDocument.model_validate(payload).to_result())
    except Exception as e:
        logger.error(f"❌ {artifact.kind} artifact failed to load: {e}")
        return failed(f"unreadable {artifact.kind} payload: {e}")
    return failed(f"unknown artifact kind {artifact.kind}")
