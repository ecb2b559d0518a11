import random
from itertools import product

import pytest

from errors import BudgetExhausted, ConcordanceFailure, InvalidShape, UsageError
from hypergraph import EngineLimits
from linalg import IntMatrix, parse_matrix
from lift import (
    LiftPlanDocument, extract, full_extract, full_lift, initial_families, lift, verify_lift,
)
from polymaps import PolyMap
from presets import preset
from shapes import Shape, generate


@pytest.fixture(scope="module")
def folkman_one():
    return preset("folkman-1").shape


@pytest.fixture(scope="module")
def plan(folkman_one):
    return lift(folkman_one, 2, 0)


def test_plan_parameters(plan):
    assert (plan.q, plan.n, plan.N, plan.M) == (1, 2, 2, 2)
    assert plan.C == IntMatrix.identity(1)


def test_lifted_families(plan):
    h1, h2 = plan.family(1), plan.family(2)
    assert set(h1) == {PolyMap.zero(1, 1), PolyMap.linear_form((1,))}
    assert set(h2) == {PolyMap.linear_form(xi) for xi in product((0, 1), repeat=2)}
    assert plan.family_size(1) == 2 and plan.family_size(2) == 4
    assert plan.size_estimate() == 6


def test_lifted_set_points(plan):
    big = generate(plan.output_shape(), [(1,), (2,), (4,)])
    assert {p[0] for p in big.points} == set(range(1, 8))


def test_exhaustive_sweep_never_fails(plan):
    seeds = [tuple((x,) for x in t) for t in product(range(1, 5), repeat=3)]
    report = verify_lift(plan, seeds, exhaustive=True, workers=1)
    assert report.ok
    assert report.failures == ()
    assert report.insufficient == 0
    assert report.succeeded == report.tried > 0


def test_extract_result_is_monochromatic(plan):
    t = [(1,), (2,), (4,)]
    big = generate(plan.output_shape(), t)
    for colors in product(range(2), repeat=len(big.points)):
        coloring = dict(zip(big.points, colors))
        result = extract(plan, t, coloring, big)
        assert result.ok
        small = generate(plan.shape, result.seed, allow_zero=True)
        assert len({coloring[p] for p in small.line(plan.shape.m)}) == 1
        assert set(small.points) <= set(big.points)


def test_short_hj_length_reports_insufficient(folkman_one):
    short = lift(folkman_one, 2, 0, n_override=1)
    assert short.M == 1
    report = verify_lift(short, [((1,), (3,))], exhaustive=True, workers=1)
    assert report.failures == ()
    assert report.insufficient > 0
    assert report.succeeded > 0


def test_random_sweep_with_assumed_tail():
    plan = lift(preset("folkman-2").shape, 2, 1)
    assert (plan.q, plan.n, plan.M) == (1, 2, 3)
    report = verify_lift(plan, [((1,), (2,), (4,), (8,))], exhaustive=False, samples=200, workers=1)
    assert report.tried == 200
    assert report.failures == ()
    assert report.insufficient == 0


def test_extract_needs_a_monochromatic_tail():
    plan = lift(preset("folkman-2").shape, 2, 1)
    t = [(1,), (2,), (4,), (8,)]
    big = generate(plan.output_shape(), t)
    top = sorted(set(big.line(plan.M)))
    assert len(top) > 1
    coloring = {p: 0 for p in big.points}
    coloring[top[0]] = 1
    with pytest.raises(UsageError):
        extract(plan, t, coloring, big)


def test_extract_checks_seed_length(plan):
    with pytest.raises(UsageError):
        extract(plan, [(1,), (2,)], lambda p: 0)


def test_single_map_family_keeps_arity():
    shape = Shape(1, 1, ((PolyMap.linear_form((1,)),),), IntMatrix.identity(1))
    plan = lift(shape, 2, 0, normalize=False)
    assert (plan.n, plan.M) == (1, 1)
    out = plan.output_shape()
    assert {p[0] for p in generate(out, [(3,), (5,)]).points} == {3, 8}


def test_lift_argument_checks(folkman_one):
    with pytest.raises(UsageError):
        lift(folkman_one, 2, 1)
    with pytest.raises(UsageError):
        lift(folkman_one, 0, 0)


def test_lift_needs_concordance():
    c = parse_matrix("2 0; 0 3")
    shape = Shape(2, 1, ((PolyMap.projection(1, 2, 0),),), c)
    with pytest.raises(ConcordanceFailure):
        lift(shape, 2, 0, n_override=1)


def test_lift_rejects_polynomial_shapes():
    with pytest.raises(InvalidShape):
        lift(preset("quadruple").shape, 2, 0, n_override=1)


def test_output_shape_budget(plan):
    with pytest.raises(BudgetExhausted):
        plan.output_shape(max_maps=3)


def test_plan_document_round_trip(plan):
    doc = LiftPlanDocument.from_plan(plan)
    again = LiftPlanDocument.model_validate_json(doc.model_dump_json()).to_plan()
    assert (again.q, again.N, again.M) == (plan.q, plan.N, plan.M)
    assert again.output_shape() == plan.output_shape()


def test_initial_families(folkman_one):
    families = initial_families(folkman_one, 2)
    assert set(families[0]) == {PolyMap.zero(1, 1), PolyMap.linear_form((1,))}
    assert set(families[1]) == {PolyMap.zero(2, 1), PolyMap.linear_form((1, 0)), PolyMap.linear_form((0, 1))}


def test_full_lift_single_color_is_the_base(folkman_one):
    full = full_lift(folkman_one, 1)
    assert full.shape == folkman_one
    assert not full.levels
    result = full_extract(full, [(1,), (2,)], lambda p: 0)
    assert result.status == "ok"


def test_full_lift_below_pigeonhole_depth(folkman_one):
    full = full_lift(folkman_one, 2, depth=1)
    assert len(full.levels) == 1
    t = [(1,), (2,), (4,)]
    big = generate(full.shape, t)
    statuses = set()
    for colors in product(range(2), repeat=len(big.points)):
        coloring = dict(zip(big.points, colors))
        result = full_extract(full, t, coloring)
        statuses.add(result.status)
        if result.status == "ok":
            small = generate(folkman_one, result.seed, allow_zero=True)
            assert {coloring[p] for p in small.points} == {result.color}
    assert statuses == {"ok", "pigeonhole-insufficient"}


def test_full_lift_depth_checks(folkman_one):
    with pytest.raises(UsageError):
        full_lift(preset("folkman-2").shape, 2, depth=1)


def test_full_lift_budget_keeps_partial(folkman_one):
    with pytest.raises(BudgetExhausted) as info:
        full_lift(folkman_one, 2, max_maps=3)
    partial = info.value.partial
    assert partial.depth == 2
    assert partial.shapes


def test_full_lift_at_pigeonhole_depth(folkman_one):
    full = full_lift(folkman_one, 2, n_overrides=[2, 1])
    assert full.depth == folkman_one.m * 2
    assert len(full.levels) == 2
    t = [(2 ** i,) for i in range(full.shape.m + 1)]
    big = generate(full.shape, t)
    rng = random.Random(3)
    colorings = [dict.fromkeys(big.points, 0)]
    colorings += [{p: rng.randrange(2) for p in big.points} for _ in range(100)]
    statuses = set()
    for coloring in colorings:
        result = full_extract(full, t, coloring)
        statuses.add(result.status)
        if result.status == "ok":
            small = generate(folkman_one, result.seed, allow_zero=True)
            assert set(small.points) <= set(big.points)
            assert {coloring[p] for p in small.points} == {result.color}
    # depth m r leaves the pigeonhole step nothing to miss
    assert "ok" in statuses
    assert statuses <= {"ok", "n-insufficient"}


def test_full_lift_without_overrides_reports_blow_up(folkman_one):
    try:
        full = full_lift(folkman_one, 2, limits=EngineLimits(50_000, 10))
    except BudgetExhausted as e:
        assert e.detail.startswith("level ")
        assert e.partial.depth == 2
    else:
        assert len(full.levels) == 2
