import pytest

from certificates import partition_certificate
from errors import InvalidCertificate
from hales_jewett import HJLineDocument, HJNumberDocument, hj_number
from ip_core import FiniteIPDocument, ProbeDocument, finitistic_ip_vdw_probe, fs
from lift import LiftPlanDocument, LiftReportDocument, lift, verify_lift
from linalg import parse_matrix
from polymaps import PolyMap
from presets import preset, schur
from rado import ColumnsDocument, ReductionDocument, check_columns, deuber_reduce
from search import SearchBudget, min_partition_number
from shapes import DSetDocument, ShapeDocument, from_mpc, generate
from verification import Artifact, load_artifact, save_artifact, verify_artifact, wrap


def _reduction_doc(text):
    A = parse_matrix(text)
    cert = check_columns(A)
    red = deuber_reduce(A, cert)
    return ReductionDocument(
        matrix=A.as_rows(), B=red.B.as_rows(), m=red.m, p=red.p, c=red.c,
        columns=ColumnsDocument.from_certificate(A, cert),
    )


def test_save_and_load(tmp_path):
    artifact = wrap("shape", ShapeDocument.from_shape(from_mpc(1, 1, 1)), {"m": 1})
    path = save_artifact(artifact, str(tmp_path / "nested" / "shape.json"))
    again = load_artifact(path)
    assert again == artifact
    assert again.input_hash.startswith("sha256:")
    assert verify_artifact(again)


def test_load_errors(tmp_path):
    with pytest.raises(InvalidCertificate):
        load_artifact(str(tmp_path / "missing.json"))
    broken = tmp_path / "broken.json"
    broken.write_text("{", encoding="utf-8")
    with pytest.raises(InvalidCertificate):
        load_artifact(str(broken))


def test_certificate_artifact():
    budget = SearchBudget(seed_range=None, workers=1, split_depth=0)
    cert = partition_certificate(schur(), min_partition_number(schur(), 2, budget), budget)
    assert verify_artifact(wrap("certificate", cert))


def test_dset_artifact_detects_edits():
    shape = from_mpc(1, 1, 1)
    seed = [(2,), (3,)]
    doc = DSetDocument.from_generation(shape, seed, generate(shape, seed))
    assert verify_artifact(wrap("dset", doc))
    forged = doc.model_copy(update={"points": doc.points[:-1]})
    assert not verify_artifact(wrap("dset", forged))


def test_reduction_artifact():
    doc = _reduction_doc("1 1 -1")
    assert verify_artifact(wrap("reduction", doc))
    forged = doc.model_copy(update={"B": [[1, 1], [1, 0], [1, 1]]})
    assert not verify_artifact(wrap("reduction", forged))


def test_columns_artifact():
    A = parse_matrix("1 1 -1")
    assert verify_artifact(wrap("columns", ColumnsDocument.from_certificate(A, check_columns(A))))


def test_hj_artifacts():
    assert verify_artifact(wrap("hj-number", HJNumberDocument.from_result(hj_number(2, 2))))
    assert verify_artifact(wrap("hj-line", HJLineDocument(k=2, n=2, coloring=[0, 1, 1, 1], line="*2")))
    assert not verify_artifact(wrap("hj-line", HJLineDocument(k=2, n=2, coloring=[0, 1, 1, 1], line="**")))
    assert not verify_artifact(wrap("hj-line", HJLineDocument(k=2, n=2, coloring=[0, 1, 1, 1])))


def test_lift_artifacts():
    plan = lift(preset("folkman-1").shape, 2, 0)
    plan_doc = LiftPlanDocument.from_plan(plan)
    assert verify_artifact(wrap("lift-plan", plan_doc))
    seeds = [((1,), (2,), (4,))]
    report = verify_lift(plan, seeds, exhaustive=True, workers=1)
    doc = LiftReportDocument(
        plan=plan_doc, seeds=[[list(p) for p in t] for t in seeds], exhaustive=True, samples=0, rng_seed=0,
        tried=report.tried, succeeded=report.succeeded, insufficient=report.insufficient, failures=[],
    )
    assert verify_artifact(wrap("lift-report", doc))
    inflated = doc.model_copy(update={"succeeded": doc.succeeded + 1})
    assert not verify_artifact(wrap("lift-report", inflated))
    wrong_c = plan_doc.model_copy(update={"C": [[2]]})
    assert not verify_artifact(wrap("lift-plan", wrong_c))


def test_ip_artifacts():
    assert verify_artifact(wrap("ip-fs", FiniteIPDocument.from_ip(fs([1, 2, 4]))))
    result = finitistic_ip_vdw_probe([PolyMap.parse(["x0"], 1)], fs([1, 2]), 2)
    assert verify_artifact(wrap("ip-probe", ProbeDocument.from_result(result)))


def test_unreadable_payload_fails_cleanly():
    verdict = verify_artifact(Artifact(kind="shape", payload={"d": "nope"}))
    assert not verdict
    assert "unreadable" in verdict.reason
