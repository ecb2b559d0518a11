import argparse
import json
import logging
import os
import random
import sys
import time
from dataclasses import dataclass
from itertools import product
from typing import Callable, List, Optional, Sequence

from pydantic import ValidationError

from certificates import ConfigurationDocument, mono_witness_certificate, partition_certificate
from config import ENGINE_VERSION, settings
from digests import digest_manager
from errors import BudgetExhausted, ToolkitError, UsageError
from hales_jewett import HJLineDocument, HJNumberDocument, find_mono_line, hj_number, render
from ip_core import FiniteIPDocument, ProbeDocument, finitistic_ip_vdw_probe, fs, sub_ip
from ledger import append_record, new_record, verify_ledger
from lift import FullLiftDocument, LiftPlanDocument, LiftReportDocument, full_lift, lift, verify_lift
from linalg import parse_matrix
from polymaps import PolyMap
from presets import preset
from rado import (
    ColumnsDocument, GenColumnsDocument, ReductionDocument, check_columns, check_columns_general, deuber_reduce,
    find_general_columns,
)
from search import (
    Coloring, Configuration, SearchBudget, decode_colors, domain_for, find_mono, min_partition_number,
)
from shapes import (
    DSetDocument, ShapeDocument, concordance_witness, from_mpc, generate, join, normalize_for_lift,
    regularity_criterion,
)
from verification import load_artifact, save_artifact, verify_artifact, wrap

logger = logging.getLogger("main")


@dataclass
class Outcome:
    artifact: object = None
    status: int = 0
    message: str = ""


# ================ ARGUMENT HELPERS ================

def parse_points(text: str):
    """'1;2;4' -> ((1,), (2,), (4,)); '1,0;0,1' -> ((1, 0), (0, 1))"""
    try:
        return tuple(tuple(int(x) for x in part.split(",")) for part in text.split(";") if part.strip())
    except ValueError:
        raise UsageError(f"cannot read points from '{text}'")


def parse_range(text: str):
    try:
        lo, hi = (int(x) for x in text.split(","))
    except ValueError:
        raise UsageError(f"range must read 'lo,hi', got '{text}'")
    if lo > hi:
        raise UsageError(f"empty range {text}")
    return lo, hi


def parse_blocks(text: str):
    try:
        return [tuple(int(x) for x in part.split(",")) for part in text.split(";") if part.strip()]
    except ValueError:
        raise UsageError(f"cannot read blocks from '{text}'")


def _read_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, ValueError) as e:
        raise UsageError(f"cannot read {path}: {e}")


def load_configuration(path: Optional[str], preset_name: Optional[str]):
    if preset_name:
        return preset(preset_name)
    if not path:
        raise UsageError("give --shape FILE or --preset NAME")
    try:
        return _configuration_from(_read_json(path), path)
    except (ValidationError, KeyError, TypeError) as e:
        raise UsageError(f"{path} does not hold a shape or configuration: {e}")


def _configuration_from(data, path: str):
    if "kind" in data and "payload" in data:
        if data["kind"] == "certificate":
            return ConfigurationDocument.model_validate(data["payload"]["configuration"]).to_configuration()
        data = data["payload"]
    if "shape" in data and "d" not in data:
        return ConfigurationDocument.model_validate(data).to_configuration()
    return Configuration(ShapeDocument.model_validate(data).to_shape(), None, os.path.basename(path))


def load_shape(path: Optional[str], preset_name: Optional[str]):
    return load_configuration(path, preset_name).shape


def budget_from(args):
    return SearchBudget(
        seed_range=parse_range(args.seed_range) if args.seed_range else settings.SEED_RANGE,
        max_nodes=args.max_nodes or settings.MAX_NODES,
        max_seconds=float(args.max_seconds or settings.MAX_SECONDS),
        workers=args.workers or settings.WORKERS,
        split_depth=args.split_depth if args.split_depth is not None else settings.SPLIT_DEPTH,
    )


# ================ SHAPE ================

def cmd_shape_gen(args) -> Outcome:
    config = load_configuration(args.shape, args.preset)
    seed = parse_points(args.seed)
    dset = generate(config.shape, seed, allow_zero=args.allow_zero)
    doc = DSetDocument.from_generation(config.shape, seed, dset)
    return Outcome(wrap("dset", doc, {"seed": args.seed}), 0, f"{len(dset)} points, {doc.collisions} repeated terms")


def cmd_shape_mpc(args) -> Outcome:
    shape = from_mpc(args.m, args.p, args.c)
    return Outcome(wrap("shape", ShapeDocument.from_shape(shape)), 0, f"({args.m},{args.p},{args.c}) shape, {shape.full_size} terms")


def cmd_shape_join(args) -> Outcome:
    first = load_shape(args.shape, args.preset)
    second = load_shape(args.other, args.other_preset)
    joined = join(first, second)
    return Outcome(wrap("shape", ShapeDocument.from_shape(joined)), 0, f"joined shape of arity {joined.m}")


def cmd_shape_info(args) -> Outcome:
    shape = load_shape(args.shape, args.preset)
    criterion = regularity_criterion(shape)
    lines = [f"d={shape.d} m={shape.m} |F|={[len(f) for f in shape.families]} c=[{shape.c}]",
             f"regularity: {criterion or 'no sufficient condition applies'}"]
    if shape.is_homomorphic:
        witness = concordance_witness(normalize_for_lift(shape))
        lines.append(f"concordance: {'b = [' + str(witness.b) + ']' if witness else 'none'}")
    return Outcome(wrap("shape", ShapeDocument.from_shape(shape)), 0, "\n".join(lines))


# ================ RADO ================

def cmd_rado_check(args) -> Outcome:
    A = parse_matrix(args.matrix)
    cert = check_columns(A)
    if cert is None:
        return Outcome(None, 1, f"[{A}] fails the columns condition")
    blocks = " ".join("{" + ",".join(str(i + 1) for i in b) + "}" for b in cert.blocks)
    return Outcome(wrap("columns", ColumnsDocument.from_certificate(A, cert), {"matrix": args.matrix}), 0, f"blocks {blocks}")


def cmd_rado_check_gen(args) -> Outcome:
    c_list = [parse_matrix(text) for text in args.map]
    if args.c:
        cert = check_columns_general(c_list, parse_matrix(args.c))
    else:
        cert = find_general_columns(c_list)
    if cert is None:
        return Outcome(None, 1, "no generalized columns certificate found")
    doc = GenColumnsDocument.from_certificate(cert)
    return Outcome(wrap("gen-columns", doc, {"maps": args.map, "c": args.c}), 0,
                   f"c = [{cert.c}], {len(cert.blocks)} blocks, hypothesis: {doc.hypothesis or 'none'}")


def cmd_rado_reduce(args) -> Outcome:
    A = parse_matrix(args.matrix)
    cert = check_columns(A)
    if cert is None:
        return Outcome(None, 1, f"[{A}] fails the columns condition; nothing to reduce")
    red = deuber_reduce(A, cert)
    doc = ReductionDocument(
        matrix=A.as_rows(), B=red.B.as_rows(), m=red.m, p=red.p, c=red.c,
        columns=ColumnsDocument.from_certificate(A, cert),
    )
    return Outcome(wrap("reduction", doc, {"matrix": args.matrix}), 0, f"B = [{red.B}], (m, p, c) = ({red.m}, {red.p}, {red.c})")


# ================ SEARCH ================

def coloring_from(args, domain):
    spec = args.coloring
    if spec == "parity":
        return Coloring.parity(domain)
    if spec == "random":
        return Coloring.random(domain, args.colors, args.rng_seed)
    if spec == "constant":
        return Coloring.constant(domain, args.colors)
    if spec.startswith("rle:"):
        return Coloring(domain, args.colors, decode_colors(spec[4:]))
    raise UsageError(f"unknown coloring '{spec}' (parity, random, constant, rle:...)")


def cmd_search_mono(args) -> Outcome:
    config = load_configuration(args.shape, args.preset)
    budget = budget_from(args)
    coloring = coloring_from(args, domain_for(config.d, args.n))
    found = find_mono(config, coloring, budget, args.strict)
    if not found.found:
        status = 3 if found.exhausted else 1
        cut = " (seed range truncated)" if found.truncated else ""
        return Outcome(None, status, f"no monochromatic set after {found.scanned} seeds{cut}")
    cert = mono_witness_certificate(config, coloring, found, budget, args.strict)
    return Outcome(wrap("certificate", cert), 0, f"seed {[list(p) for p in found.seed]} color {found.color}: {list(found.points)}")


def cmd_search_number(args) -> Outcome:
    config = load_configuration(args.shape, args.preset)
    budget = budget_from(args)
    result = min_partition_number(config, args.colors, budget, args.strict, args.max_n, args.assume_n)
    cert = partition_certificate(config, result, budget, args.strict)
    cut = "; seed range truncated, not a proof" if result.truncated else ""
    if result.n is None:
        return Outcome(wrap("certificate", cert), 3, f"undecided; bad coloring up to N = {cert.N}{cut}")
    return Outcome(wrap("certificate", cert), 0, f"N = {result.n} ({result.proof_mode}){cut}")


# ================ HALES-JEWETT ================

def cmd_hj_line(args) -> Outcome:
    size = args.k ** args.n
    if args.coloring == "random":
        rng = random.Random(args.rng_seed)
        colors = [rng.randrange(args.colors) for _ in range(size)]
    else:
        colors = list(decode_colors(args.coloring))
    found = find_mono_line(args.k, args.n, colors)
    doc = HJLineDocument(k=args.k, n=args.n, coloring=colors, line=render(found) if found else None)
    if found is None:
        return Outcome(wrap("hj-line", doc), 1, f"no monochromatic line in [{args.k}]^{args.n}")
    return Outcome(wrap("hj-line", doc), 0, f"line {render(found)}")


def cmd_hj_number(args) -> Outcome:
    budget = budget_from(args)
    result = hj_number(args.k, args.colors, budget.limits, args.max_n, budget.split_depth, budget.workers)
    doc = HJNumberDocument.from_result(result)
    if result.n is None:
        return Outcome(wrap("hj-number", doc), 3, f"HJ({args.k},{args.colors}) undecided up to n = {result.bad_n}")
    return Outcome(wrap("hj-number", doc), 0, f"HJ({args.k},{args.colors}) = {result.n}")


# ================ LIFT ================

def cmd_lift_build(args) -> Outcome:
    shape = load_shape(args.shape, args.preset)
    limits = budget_from(args).limits
    if args.full:
        overrides = [int(x) for x in args.n.split(",")] if args.n else None
        try:
            full = full_lift(shape, args.colors, args.max_maps, overrides, limits, args.depth)
        except BudgetExhausted as e:
            partial = e.partial
            if partial is None or not hasattr(partial, "levels"):
                raise
            doc = FullLiftDocument(
                base=ShapeDocument.from_shape(shape), r=args.colors, depth=partial.depth,
                levels=[LiftPlanDocument.from_plan(p) for p in partial.levels],
                final_arity=partial.shape.m, final_size=partial.shape.full_size,
            )
            return Outcome(wrap("full-lift", doc), 3, e.detail)
        doc = FullLiftDocument(
            base=ShapeDocument.from_shape(shape), r=args.colors, depth=full.depth,
            levels=[LiftPlanDocument.from_plan(p) for p in full.levels],
            final_arity=full.shape.m, final_size=full.shape.full_size,
        )
        return Outcome(wrap("full-lift", doc), 0, f"{full.depth} levels, final arity {full.shape.m}, {full.shape.full_size} terms")
    plan = lift(shape, args.colors, args.k, int(args.n) if args.n else None, not args.no_normalize, limits)
    doc = LiftPlanDocument.from_plan(plan)
    return Outcome(wrap("lift-plan", doc), 0, f"q={plan.q} n={plan.n} N={plan.N} M={plan.M}, ~{doc.size_estimate} maps")


def lift_seeds(args, plan) -> List:
    if args.seeds:
        return [parse_points(text) for text in args.seeds]
    lo, hi = parse_range(args.seed_box)
    points = [p for p in product(range(lo, hi + 1), repeat=plan.d) if any(p)]
    total = len(points) ** (plan.M + 1)
    if not args.limit_seeds or total <= args.limit_seeds:
        return list(product(points, repeat=plan.M + 1))
    rng = random.Random(args.rng_seed)
    return [tuple(rng.choice(points) for _ in range(plan.M + 1)) for _ in range(args.limit_seeds)]


def cmd_lift_verify(args) -> Outcome:
    if args.plan:
        artifact = load_artifact(args.plan)
        if artifact.kind != "lift-plan":
            raise UsageError(f"{args.plan} holds a {artifact.kind}, not a lift-plan")
        try:
            plan_doc = LiftPlanDocument.model_validate(artifact.payload)
        except ValidationError as e:
            raise UsageError(f"{args.plan} holds an unreadable lift-plan: {e}")
        plan = plan_doc.to_plan()
    else:
        shape = load_shape(args.shape, args.preset)
        plan = lift(shape, args.colors, args.k, int(args.n) if args.n else None, not args.no_normalize,
                    budget_from(args).limits)
        plan_doc = LiftPlanDocument.from_plan(plan)
    seeds = lift_seeds(args, plan)
    budget = budget_from(args)
    report = verify_lift(plan, seeds, args.exhaustive, args.samples, args.rng_seed, budget.workers)
    doc = LiftReportDocument(
        plan=plan_doc, seeds=[[list(p) for p in t] for t in seeds], exhaustive=args.exhaustive,
        samples=args.samples, rng_seed=args.rng_seed, tried=report.tried, succeeded=report.succeeded,
        insufficient=report.insufficient, failures=list(report.failures),
    )
    message = (f"{report.succeeded}/{report.tried} colorings extracted over {len(seeds)} seeds, "
               f"{report.insufficient} n-insufficient, {len(report.failures)} failures")
    return Outcome(wrap("lift-report", doc), 0 if report.ok else 1, message)


# ================ IP ================

def cmd_ip_fs(args) -> Outcome:
    ip = fs(parse_points(args.gens))
    if args.blocks:
        ip = sub_ip(ip, parse_blocks(args.blocks))
    return Outcome(wrap("ip-fs", FiniteIPDocument.from_ip(ip)), 0, f"FS = {[list(p) for p in ip.points]}")


def cmd_ip_probe(args) -> Outcome:
    y = fs(parse_points(args.y))
    family = [PolyMap.parse([text], y.dim, 1) for text in args.map]
    budget = budget_from(args)
    result = finitistic_ip_vdw_probe(family, y, args.colors, args.max_size, budget.limits, budget.split_depth, budget.workers)
    doc = ProbeDocument.from_result(result)
    if not result.found:
        status = 3 if result.exhausted else 1
        return Outcome(wrap("ip-probe", doc), status, f"none within budget (bad coloring up to |I| = {result.bad_size})")
    return Outcome(wrap("ip-probe", doc), 0, f"I = [1, {result.size}]")


# ================ CERTIFICATES AND LEDGER ================

def cmd_cert_verify(args) -> Outcome:
    verdict = verify_artifact(load_artifact(args.file))
    return Outcome(None, 0 if verdict else 1, verdict.reason)


def cmd_ledger_verify(args) -> Outcome:
    verdicts = verify_ledger(args.ledger)
    bad = [n for n, v in verdicts if not v]
    if bad:
        return Outcome(None, 1, f"{len(bad)} of {len(verdicts)} records failed: lines {bad}")
    return Outcome(None, 0, f"all {len(verdicts)} records verified")


# ================ PARSER ================

def _budget_options(p: argparse.ArgumentParser):
    p.add_argument("--max-nodes", type=int, default=None)
    p.add_argument("--max-seconds", type=float, default=None)
    p.add_argument("--seed-range", default=None, help="lo,hi")
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--split-depth", type=int, default=None)


def _shape_options(p: argparse.ArgumentParser):
    p.add_argument("--shape", help="shape, configuration or artifact JSON file")
    p.add_argument("--preset", help="named configuration, e.g. schur, ap3, brauer-3")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="artifact directory")
    common.add_argument("--ledger", default=None, help="ledger file")
    common.add_argument("--no-ledger", action="store_true")
    common.add_argument("--log-level", default=None)

    parser = argparse.ArgumentParser(prog="ramsey", description=f"{settings.APP_NAME} {ENGINE_VERSION}")
    groups = parser.add_subparsers(dest="group", required=True)

    def command(group, name: str, handler: Callable, help_text: str) -> argparse.ArgumentParser:
        p = group.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    shape = groups.add_parser("shape").add_subparsers(dest="command", required=True)
    p = command(shape, "gen", cmd_shape_gen, "emit D(m, F, c; s)")
    _shape_options(p)
    p.add_argument("--seed", required=True, help="points separated by ';', coordinates by ','")
    p.add_argument("--allow-zero", action="store_true")
    p = command(shape, "mpc", cmd_shape_mpc, "emit the (m, p, c) shape")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--c", type=int, required=True)
    p = command(shape, "join", cmd_shape_join, "join two shapes")
    _shape_options(p)
    p.add_argument("--other")
    p.add_argument("--other-preset")
    p = command(shape, "info", cmd_shape_info, "regularity criterion and concordance")
    _shape_options(p)

    rado = groups.add_parser("rado").add_subparsers(dest="command", required=True)
    p = command(rado, "check", cmd_rado_check, "columns condition")
    p.add_argument("--matrix", required=True, help="rows separated by ';'")
    p = command(rado, "check-gen", cmd_rado_check_gen, "generalized columns condition")
    p.add_argument("--map", action="append", required=True, help="one column map per flag")
    p.add_argument("--c", default=None)
    p = command(rado, "reduce", cmd_rado_reduce, "reduce to an (m, p, c) row selector")
    p.add_argument("--matrix", required=True)

    search = groups.add_parser("search").add_subparsers(dest="command", required=True)
    p = command(search, "mono", cmd_search_mono, "monochromatic set under a given coloring")
    _shape_options(p)
    _budget_options(p)
    p.add_argument("--n", type=int, required=True, help="domain [1,n], or [-n,n]^d")
    p.add_argument("--colors", type=int, default=2)
    p.add_argument("--coloring", default="parity")
    p.add_argument("--rng-seed", type=int, default=0)
    p.add_argument("--strict", action="store_true")
    p = command(search, "number", cmd_search_number, "least N forcing a monochromatic set")
    _shape_options(p)
    _budget_options(p)
    p.add_argument("--colors", type=int, default=2)
    p.add_argument("--max-n", type=int, default=10_000)
    p.add_argument("--assume-n", type=int, default=None)
    p.add_argument("--strict", action="store_true")

    hj = groups.add_parser("hj").add_subparsers(dest="command", required=True)
    p = command(hj, "line", cmd_hj_line, "monochromatic line under a coloring of [k]^n")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--colors", type=int, default=2)
    p.add_argument("--coloring", default="random", help="random or an RLE string")
    p.add_argument("--rng-seed", type=int, default=0)
    p = command(hj, "number", cmd_hj_number, "HJ(k, r)")
    _budget_options(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--colors", type=int, default=2)
    p.add_argument("--max-n", type=int, default=6)

    lift_group = groups.add_parser("lift").add_subparsers(dest="command", required=True)
    for name, handler in (("build", cmd_lift_build), ("verify", cmd_lift_verify)):
        p = command(lift_group, name, handler, f"lift {name}")
        _shape_options(p)
        _budget_options(p)
        p.add_argument("--colors", type=int, default=2)
        p.add_argument("--k", type=int, default=0)
        p.add_argument("--n", default=None, help="HJ length; comma list per level with --full")
        p.add_argument("--no-normalize", action="store_true")
    p = lift_group.choices["build"]
    p.add_argument("--full", action="store_true")
    p.add_argument("--max-maps", type=int, default=None)
    p.add_argument("--depth", type=int, default=None, help="arity of the initial shape; default m r")
    p = lift_group.choices["verify"]
    p.add_argument("--plan", default=None, help="lift-plan artifact")
    p.add_argument("--seeds", action="append", default=None)
    p.add_argument("--seed-box", default="1,5")
    p.add_argument("--limit-seeds", type=int, default=20)
    p.add_argument("--exhaustive", action="store_true")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--rng-seed", type=int, default=0)

    ip = groups.add_parser("ip").add_subparsers(dest="command", required=True)
    p = command(ip, "fs", cmd_ip_fs, "finite sums, optionally along blocks")
    p.add_argument("--gens", required=True)
    p.add_argument("--blocks", default=None, help="e.g. '1,2;3'")
    p = command(ip, "probe", cmd_ip_probe, "finite I for the IP polynomial vdW statement")
    _budget_options(p)
    p.add_argument("--map", action="append", required=True, help="expression in x0..x{h-1}")
    p.add_argument("--y", required=True)
    p.add_argument("--colors", type=int, default=2)
    p.add_argument("--max-size", type=int, default=24)

    cert = groups.add_parser("cert").add_subparsers(dest="command", required=True)
    p = command(cert, "verify", cmd_cert_verify, "re-verify any artifact")
    p.add_argument("--file", required=True)

    ledger = groups.add_parser("ledger").add_subparsers(dest="command", required=True)
    command(ledger, "verify", cmd_ledger_verify, "re-verify every ledger record")
    return parser


# ================ ENTRY POINT ================

INPUT_FILE_OPTIONS = ("shape", "other", "plan", "file")


def _record(args, outcome: Outcome, path: Optional[str], wall: float):
    if args.no_ledger or args.group in ("cert", "ledger"):
        return
    arguments = {k: v for k, v in vars(args).items() if k not in ("handler", "out", "ledger", "no_ledger", "log_level")}
    files = {key: arguments[key] for key in INPUT_FILE_OPTIONS if arguments.get(key)}
    record = new_record(
        f"{args.group} {args.command}", arguments, outcome.artifact, input_files=files,
        artifact_path=path, exit_status=outcome.status, wall_time=round(wall, 3),
    )
    append_record(record, args.ledger)


def run(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, (args.log_level or settings.LOG_LEVEL).upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    )
    started = time.monotonic()
    try:
        outcome = args.handler(args)
    except BudgetExhausted as e:
        outcome = Outcome(None, e.exit_code, f"budget exhausted: {e.detail}")
    except ToolkitError as e:
        print(f"❌ {e.detail}")
        return e.exit_code
    path = None
    if outcome.artifact is not None:
        digest = digest_manager.content_hash(outcome.artifact).split(":")[1][:12]
        out_dir = args.out or settings.OUTPUT_DIR
        path = save_artifact(outcome.artifact, os.path.join(out_dir, f"{args.group}-{args.command}-{digest}.json"))
    _record(args, outcome, path, time.monotonic() - started)
    marker = {0: "✅", 3: "⏱️"}.get(outcome.status, "❌")
    print(f"{marker} {args.group} {args.command}: {outcome.message}")
    if path:
        print(f"   artifact: {path}")
    return outcome.status


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
