import random

import pytest

from certificates import (
    Certificate, bad_coloring_certificate, configuration_hash, mono_witness_certificate, partition_certificate,
    verify_certificate,
)
from errors import InvalidCertificate, UsageError
from presets import ap3, schur
from search import BadColoring, Coloring, SearchBudget, find_mono, interval, min_partition_number

BUDGET = SearchBudget(seed_range=None, workers=1, split_depth=0)


def _round_trip(cert: Certificate) -> Certificate:
    return Certificate.model_validate_json(cert.model_dump_json(by_alias=True))


def test_minimal_n_certificate_verifies():
    result = min_partition_number(schur(), 2, BUDGET)
    cert = partition_certificate(schur(), result, BUDGET)
    assert cert.kind == "minimal-N"
    assert cert.N == 5
    assert cert.bad.N == 4
    again = _round_trip(cert)
    assert verify_certificate(again)
    assert verify_certificate(again, schur())


def test_certificate_for_other_shape_rejected():
    cert = partition_certificate(schur(), min_partition_number(schur(), 2, BUDGET), BUDGET)
    assert not verify_certificate(cert, ap3())


def test_tampered_hash_fails():
    cert = partition_certificate(schur(), min_partition_number(schur(), 2, BUDGET), BUDGET)
    tampered = cert.model_copy(update={"shape_hash": "0" * 64})
    verdict = verify_certificate(tampered)
    assert not verdict
    assert "shape-hash" in verdict.reason


def test_wrong_n_fails():
    cert = partition_certificate(schur(), min_partition_number(schur(), 2, BUDGET), BUDGET)
    assert not verify_certificate(cert.model_copy(update={"N": 4}))


def test_bad_coloring_certificate():
    bad = BadColoring(Coloring(interval(4), 2, (0, 1, 1, 0)))
    cert = bad_coloring_certificate(schur(), bad)
    assert cert.coloring == "a1b2a1"
    assert verify_certificate(_round_trip(cert))
    flipped = cert.model_copy(update={"coloring": "a2b2"})
    assert not verify_certificate(flipped)


def test_mono_witness_certificate():
    coloring = Coloring.parity(interval(30))
    found = find_mono(ap3(), coloring, BUDGET)
    cert = mono_witness_certificate(ap3(), coloring, found, BUDGET)
    assert verify_certificate(_round_trip(cert))
    assert not verify_certificate(cert.model_copy(update={"color": 1 - found.color}))


def test_mono_witness_needs_a_witness():
    coloring = Coloring(interval(4), 2, (0, 1, 1, 0))
    found = find_mono(schur(), coloring, BUDGET)
    assert not found.found
    with pytest.raises(UsageError):
        mono_witness_certificate(schur(), coloring, found, BUDGET)


def test_assumed_certificate_checks_only_the_bad_coloring():
    result = min_partition_number(ap3(), 2, BUDGET, assume_forced_at=9)
    cert = partition_certificate(ap3(), result, BUDGET)
    assert cert.proof_mode == "assumed"
    assert verify_certificate(cert)


def test_exhausted_search_gives_marked_bad_coloring():
    budget = SearchBudget(seed_range=None, max_nodes=1, workers=1)
    result = min_partition_number(ap3(), 2, budget)
    cert = partition_certificate(ap3(), result, budget)
    assert cert.kind == "bad-coloring"
    assert cert.budget_exhausted


def test_configuration_hash_ignores_name():
    named = schur()
    renamed = type(named)(named.shape, named.rows, "other")
    assert configuration_hash(named) == configuration_hash(renamed)
    assert configuration_hash(named) != configuration_hash(ap3())


def test_coloring_missing_raises():
    cert = partition_certificate(schur(), min_partition_number(schur(), 2, BUDGET), BUDGET)
    with pytest.raises(InvalidCertificate):
        cert.to_coloring()


def test_narrow_recorded_range_does_not_hide_a_monochromatic_set():
    constant = BadColoring(Coloring.constant(interval(5), 2))
    forged = bad_coloring_certificate(schur(), constant, (-1, -1))
    assert forged.seed_range == [-1, -1]
    verdict = verify_certificate(_round_trip(forged))
    assert not verdict
    assert "monochromatic" in verdict.reason


def test_forged_bad_coloring_below_n_is_rejected():
    cert = partition_certificate(schur(), min_partition_number(schur(), 2, BUDGET), BUDGET)
    constant = BadColoring(Coloring.constant(interval(5), 2))
    forged = cert.model_copy(update={"N": 6, "bad": bad_coloring_certificate(schur(), constant, (-1, -1))})
    verdict = verify_certificate(_round_trip(forged))
    assert not verdict
    assert "N - 1 rejected" in verdict.reason


def test_truncated_search_certificate_fails_verification():
    budget = SearchBudget(seed_range=(-6, 6), workers=1, split_depth=0)
    result = min_partition_number(ap3(), 2, budget, max_n=12)
    cert = partition_certificate(ap3(), result, budget)
    assert cert.truncated
    assert not verify_certificate(_round_trip(cert))


def test_default_certificate_records_no_range():
    cert = partition_certificate(schur(), min_partition_number(schur(), 2, BUDGET), BUDGET)
    assert cert.seed_range is None
    assert not cert.truncated


def test_random_certificates_survive_a_round_trip():
    rng = random.Random(23)
    kinds = set()
    for _ in range(1000):
        coloring = Coloring.random(interval(8), 2, rng.randrange(10 ** 9))
        found = find_mono(ap3(), coloring, BUDGET)
        if found.found:
            cert = mono_witness_certificate(ap3(), coloring, found, BUDGET)
        else:
            cert = bad_coloring_certificate(ap3(), BadColoring(coloring))
        kinds.add(cert.kind)
        assert verify_certificate(_round_trip(cert), ap3())
    assert kinds == {"mono-witness", "bad-coloring"}
