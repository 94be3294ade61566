"""Full-scale release gate.

Each test here covers one release criterion at its stated tolerance
and prints a single PASS/FAIL verdict line.  The heavy replays (ten
streams of 5,000 to 10,000 updates with per-update validation) are
shared through module-scoped fixtures, so the whole sweep runs each
stream exactly once.
"""

import math
import random
import time
from typing import NamedTuple

import pytest

from dynmatch.edcs_general import GeneralEdcs
from dynmatch.graph import DynBipartiteGraph, left_vertex, right_vertex
from dynmatch.oracle import brute_force_mu, hopcroft_karp
from dynmatch.orientation import SqrtOrientation
from dynmatch.pipeline import (
    PipelineConfig,
    ResolvedParams,
    RunResult,
    plan_parameters,
    run_pipeline,
)
from dynmatch.report import write_metrics_csv
from dynmatch.streams import generate_stream

pytestmark = pytest.mark.acceptance


class Run(NamedTuple):
    cfg: PipelineConfig
    params: ResolvedParams
    result: RunResult
    wall_s: float


GENERAL_STREAMS = (
    ("density10", "random",
     {"n_left": 60, "n_right": 60, "steps": 10_000, "density": 0.1}, 101),
    ("density50", "random",
     {"n_left": 60, "n_right": 60, "steps": 10_000, "density": 0.5}, 102),
    ("density90", "random",
     {"n_left": 60, "n_right": 60, "steps": 10_000, "density": 0.9}, 103),
    ("four_block", "four_block", {"block": 30, "steps": 10_000}, 104),
)

FOREST_ALPHAS = (1, 3)


def _timed_run(cfg: PipelineConfig, kind: str, params: dict, seed: int) -> Run:
    stream = generate_stream(kind, params, seed)
    began = time.perf_counter()
    result = run_pipeline(cfg, stream)
    wall = time.perf_counter() - began
    return Run(cfg, plan_parameters(cfg), result, wall)


@pytest.fixture(scope="module")
def general_runs() -> dict[tuple[float, str], Run]:
    runs = {}
    for eps in (0.25, 0.5):
        for label, kind, params, seed in GENERAL_STREAMS:
            cfg = PipelineConfig(
                mode="general",
                eps=eps,
                n_left=60,
                n_right=60,
                seed=seed,
                checkpoint_every=100,
                validate_every=1,
                deterministic_timing=True,
            )
            runs[(eps, label)] = _timed_run(cfg, kind, params, seed)
    return runs


@pytest.fixture(scope="module")
def forest_runs() -> dict[int, Run]:
    runs = {}
    for alpha in FOREST_ALPHAS:
        cfg = PipelineConfig(
            mode="small_arboricity",
            eps=0.5,
            beta=33,
            alpha=alpha,
            n_left=200,
            n_right=200,
            seed=200 + alpha,
            checkpoint_every=100,
            validate_every=1,
            deterministic_timing=True,
        )
        params = {
            "n_left": 200, "n_right": 200, "steps": 5_000, "alpha": alpha,
        }
        runs[alpha] = _timed_run(cfg, "forest_union", params, 200 + alpha)
    return runs


def _verdict(label: str, problems: list[str]) -> None:
    status = "FAIL" if problems else "PASS"
    print(f"[{status}] {label}", flush=True)
    assert not problems, f"{label}: " + "; ".join(problems[:6])


def _tagged(run_key, violations: list[str], needle: str) -> list[str]:
    return [f"{run_key}: {v}" for v in violations if needle in v]


def test_general_streams_validate_after_every_update(general_runs):
    problems = []
    for key, run in sorted(general_runs.items()):
        s = run.result.summary
        problems += _tagged(key, run.result.violations, "validator")
        if s["aborted"]:
            problems.append(f"{key}: run aborted at step {s['steps']}")
        if s["validator_runs"] != s["steps"]:
            problems.append(
                f"{key}: {s['validator_runs']} validations for "
                f"{s['steps']} updates"
            )
        if run.wall_s >= 120.0:
            problems.append(f"{key}: stream took {run.wall_s:.1f}s")
    _verdict("subgraph validity on general streams", problems)


def test_general_checkpoints_hold_floor_and_ratio(general_runs):
    problems = []
    for key, run in sorted(general_runs.items()):
        eps = run.cfg.eps
        cap = (1.5 + eps) * (1.0 + eps)
        if len(run.result.rows) != 100:
            problems.append(f"{key}: {len(run.result.rows)} checkpoints")
        for row in run.result.rows:
            if row.mu_h < (2.0 / 3.0 - eps) * row.mu_g:
                problems.append(
                    f"{key} step {row.step}: mu_h {row.mu_h} under "
                    f"(2/3-{eps}) * {row.mu_g}"
                )
            if row.ratio > cap:
                problems.append(
                    f"{key} step {row.step}: ratio {row.ratio:.4f} over "
                    f"{cap:.4f}"
                )
    _verdict("general matching floor and composed ratio", problems)


def test_forest_streams_hold_the_weighted_floor(forest_runs):
    problems = []
    for alpha, run in sorted(forest_runs.items()):
        s = run.result.summary
        problems += _tagged(alpha, run.result.violations, "validator")
        if s["aborted"]:
            problems.append(f"alpha={alpha}: run aborted at {s['steps']}")
        if s["validator_runs"] != s["steps"]:
            problems.append(
                f"alpha={alpha}: {s['validator_runs']} validations for "
                f"{s['steps']} updates"
            )
        if len(run.result.rows) != 50:
            problems.append(
                f"alpha={alpha}: {len(run.result.rows)} checkpoints"
            )
        for row in run.result.rows:
            if row.mu_h < 0.5 * row.mu_g:
                problems.append(
                    f"alpha={alpha} step {row.step}: mu_h {row.mu_h} "
                    f"under half of {row.mu_g}"
                )
    _verdict("weighted floor on forest streams", problems)


def test_alternating_paths_stay_within_bounds(general_runs, forest_runs):
    problems = []
    everything = [*sorted(general_runs.items()), *sorted(forest_runs.items())]
    for key, run in everything:
        problems += _tagged(key, run.result.violations, "path length")
        seen = run.result.summary["max_path_len"]
        if seen > run.params.max_path_len:
            problems.append(
                f"{key}: path of {seen} over cap {run.params.max_path_len}"
            )
        # Simplicity and distinct same-side degrees are asserted inside
        # the engines; a breach aborts the replay.
        if run.result.summary["aborted"]:
            problems.append(f"{key}: aborted")
    _verdict("alternating path bounds", problems)


def test_update_change_budgets_hold(general_runs, forest_runs):
    problems = []
    for key, run in sorted(general_runs.items()):
        problems += _tagged(key, run.result.violations, "H changes")
        seen = run.result.summary["max_h_changes"]
        if seen > run.params.max_h_changes:
            problems.append(
                f"{key}: {seen} changes over cap {run.params.max_h_changes}"
            )
    for alpha, run in sorted(forest_runs.items()):
        problems += _tagged(alpha, run.result.violations, "unit")
        problems += _tagged(alpha, run.result.violations, "update total")
    _verdict("per-update change budgets", problems)


def test_orientation_load_and_flips_stay_bounded(general_runs, forest_runs):
    problems = []
    for key, run in sorted(general_runs.items()):
        problems += _tagged(key, run.result.violations, "flips")
        problems += _tagged(key, run.result.violations, "breaks")
        if run.result.summary["max_flips"] > 10:
            problems.append(
                f"{key}: {run.result.summary['max_flips']} flips in one step"
            )
    for alpha, run in sorted(forest_runs.items()):
        cap = 4 * alpha + 2 * math.ceil(math.log2(400))
        problems += _tagged(alpha, run.result.violations, "exceeds cap")
        if run.result.summary["alpha_cap"] != cap:
            problems.append(
                f"alpha={alpha}: planned cap {run.result.summary['alpha_cap']}"
                f" is not {cap}"
            )
        if run.result.summary["max_load"] > cap:
            problems.append(
                f"alpha={alpha}: load {run.result.summary['max_load']} "
                f"over {cap}"
            )
    _verdict("orientation load and flip bounds", problems)


def test_matching_oracles_agree_on_small_graphs():
    began = time.perf_counter()
    problems = []
    lefts = [left_vertex(i) for i in range(4)]
    rights = [right_vertex(j) for j in range(4)]
    pair_of = [(i, j) for i in range(4) for j in range(4)]
    for mask in range(1 << 16):
        adj = {}
        bits = mask
        while bits:
            low = bits & -bits
            i, j = pair_of[low.bit_length() - 1]
            adj.setdefault(lefts[i], []).append(rights[j])
            bits ^= low
        if hopcroft_karp(adj)[0] != brute_force_mu(adj):
            problems.append(f"4x4 edge set {mask:#06x}")
            if len(problems) > 5:
                break

    rng = random.Random(66)
    all_pairs = [(i, j) for i in range(6) for j in range(6)]
    for trial in range(1_000):
        chosen = rng.sample(all_pairs, rng.randint(0, 20))
        adj = {}
        for i, j in chosen:
            adj.setdefault(left_vertex(i), []).append(right_vertex(j))
        if hopcroft_karp(adj)[0] != brute_force_mu(adj):
            problems.append(f"6x6 trial {trial}")
    wall = time.perf_counter() - began
    if wall >= 30.0:
        problems.append(f"sweep took {wall:.1f}s")
    _verdict("matching oracle agreement", problems)


def test_degree_estimates_stay_within_one_bucket():
    # Replays the composition by hand because the audit has to run
    # between updates, not just at checkpoints.
    stream = generate_stream(
        "random",
        {"n_left": 60, "n_right": 60, "steps": 10_000, "density": 0.1},
        seed=105,
    )
    graph = DynBipartiteGraph(60, 60)
    orientation = SqrtOrientation(graph)
    subgraph = GeneralEdcs(graph, orientation, beta=96, lam=0.125)
    assert subgraph.ell == 2
    problems = []
    for step, (op, u, v) in enumerate(stream, start=1):
        if op == "+":
            edge = graph.insert_edge(u, v)
            flips = orientation.insert(edge)
            for flip in flips:
                if flip.edge != edge:
                    subgraph.on_flip(flip)
            subgraph.on_graph_insert(edge)
        else:
            edge = graph.delete_edge(u, v)
            flips = orientation.delete(edge)
            for flip in flips:
                if flip.edge != edge:
                    subgraph.on_flip(flip)
            subgraph.on_graph_delete(edge)
        subgraph.drain_h_events()
        if graph.m and orientation.needs_rebuild():
            orientation.rebuild()
            subgraph.on_orientation_rebuild()
        stale = subgraph.audit_estimates()
        if stale:
            problems.append(f"step {step}: {stale[0]}")
            if len(problems) > 5:
                break
    _verdict("degree estimate staleness", problems)


def test_metrics_rerun_is_byte_identical(general_runs, tmp_path):
    label, kind, params, seed = GENERAL_STREAMS[0]
    first = general_runs[(0.5, label)]
    again = _timed_run(first.cfg, kind, params, seed)
    a = tmp_path / "first.csv"
    b = tmp_path / "again.csv"
    write_metrics_csv(first.result.rows, a)
    write_metrics_csv(again.result.rows, b)
    problems = []
    if a.read_bytes() != b.read_bytes():
        problems.append("metrics files differ between identical runs")
    _verdict("byte-identical metrics rerun", problems)
