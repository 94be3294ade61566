"""Parameter planning and full-pipeline replay.

The replay wires the three layers together per update: the graph
mutates, the orientation reassigns owners, the degree-bounded
subgraph absorbs the flips and the edge change, and the matching
consumes the resulting membership events.  Checkpoints sample oracle
matching sizes; validators re-check the subgraph invariants from
scratch.  Every bound the run is expected to honor is recorded as a
violation string instead of an exception, so a finished RunResult
tells the whole story and the exit code can reflect it.

Wall-clock timing is the one non-deterministic output; runs meant to
be byte-reproducible set deterministic_timing and report zero there.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .edcs_general import GeneralEdcs
from .edcs_weighted import WeightedEdcs
from .errors import (
    CapacityExceededError,
    ConfigError,
    InvariantBreachError,
)
from .graph import DynBipartiteGraph, Edge, VertexId
from .matching import MaintainedMatching
from .oracle import (
    hopcroft_karp,
    validate_edcs_unweighted,
    validate_edcs_weighted,
)
from .orientation import ArbOrientation, SqrtOrientation, default_delta_cap
from .streams import Update, validate_stream

MODES = ("general", "small_arboricity")


@dataclass
class PipelineConfig:
    mode: str
    eps: float
    beta: int | None = None
    lam: float | None = None
    alpha: int | None = None
    alpha_cap: int | None = None
    m_max: int = 4096
    seed: int = 0
    checkpoint_every: int = 100
    validate_every: int = 1
    n_left: int | None = None
    n_right: int | None = None
    greedy: bool = True
    deterministic_timing: bool = False


@dataclass(frozen=True)
class ResolvedParams:
    """Planned run parameters plus the per-update ceilings they imply."""

    mode: str
    eps: float
    beta: int
    lam: float | None
    ell: int | None
    max_path_len: int
    max_h_changes: int | None
    unit_cap: int | None
    update_cap: int | None

    def as_dict(self) -> dict:
        return {
            "mode": self.mode,
            "eps": self.eps,
            "beta": self.beta,
            "lam": self.lam,
            "ell": self.ell,
            "max_path_len": self.max_path_len,
            "max_h_changes": self.max_h_changes,
            "unit_cap": self.unit_cap,
            "update_cap": self.update_cap,
        }


def _bucket_width(beta: int, lam: float) -> int | None:
    """The valid bucket width for (beta, lam), or None if there is none."""
    ell = round(beta * lam / 6)
    if abs(6 * ell - beta * lam) > 1e-9:
        return None
    if ell < 2 or beta % ell:
        return None
    return ell


def plan_parameters(cfg: PipelineConfig) -> ResolvedParams:
    """Resolve (beta, lambda) and the ceilings for the chosen mode.

    General mode derives lambda = eps/4 when not given and, absent an
    explicit beta, rounds the m_max**(1/4) preset up to the least
    feasible value.  Small-arboricity mode uses the 8/eps**2 + 1
    preset.  Explicit values are accepted only if they still satisfy
    the mode's constraints.
    """
    if cfg.mode not in MODES:
        raise ConfigError(f"mode must be one of {MODES}, got {cfg.mode!r}")
    if cfg.checkpoint_every < 1:
        raise ConfigError("checkpoint_every must be >= 1")
    if cfg.validate_every < 0:
        raise ConfigError("validate_every must be >= 0")

    if cfg.mode == "small_arboricity":
        if not 0.0 < cfg.eps < 1.0:
            raise ConfigError(
                f"small_arboricity mode needs 0 < eps < 1, got {cfg.eps}"
            )
        floor = 8.0 / cfg.eps**2
        beta = cfg.beta if cfg.beta is not None else math.ceil(floor) + 1
        if beta <= floor:
            raise ConfigError(
                f"beta {beta} too small; mode needs beta > {floor:g}"
            )
        return ResolvedParams(
            mode=cfg.mode,
            eps=cfg.eps,
            beta=beta,
            lam=None,
            ell=None,
            max_path_len=2 * beta + 1,
            max_h_changes=None,
            unit_cap=4 * beta,
            update_cap=4 * beta * beta,
        )

    if not 0.0 < cfg.eps < 2.0 / 3.0:
        raise ConfigError(
            f"general mode needs 0 < eps < 2/3, got {cfg.eps}"
        )
    lam = cfg.lam if cfg.lam is not None else cfg.eps / 4.0
    if not 0.0 < lam < 1.0:
        raise ConfigError(f"lambda must lie in (0, 1), got {lam}")
    least = math.ceil(12.0 / lam - 1e-9)
    if cfg.beta is not None:
        beta = cfg.beta
        if beta < least or _bucket_width(beta, lam) is None:
            raise ConfigError(
                f"beta {beta} infeasible for lambda {lam}: need beta >= "
                f"{least} with lambda*beta a multiple of 6 dividing beta"
            )
    else:
        preset = math.ceil(cfg.m_max**0.25 * cfg.eps**0.5)
        beta = max(preset, least)
        while _bucket_width(beta, lam) is None:
            beta += 1
            if beta > least + 10**6:
                raise ConfigError(
                    f"no feasible beta near {least} for lambda {lam}"
                )
    ell = _bucket_width(beta, lam)
    assert ell is not None
    return ResolvedParams(
        mode=cfg.mode,
        eps=cfg.eps,
        beta=beta,
        lam=lam,
        ell=ell,
        max_path_len=12 * beta // (6 * ell) + 1,
        max_h_changes=24 * beta // (6 * ell) + 2,
        unit_cap=None,
        update_cap=None,
    )


@dataclass(frozen=True)
class MetricsRow:
    step: int
    m: int
    mu_g: int
    mu_h: int
    matching: int
    ratio: float
    max_load: int
    max_path_len: int
    h_changes: int
    us_per_update: float

    def __post_init__(self) -> None:
        if self.mu_h > self.mu_g:
            raise InvariantBreachError(
                f"step {self.step}: mu_h {self.mu_h} > mu_g {self.mu_g}"
            )
        if self.matching > self.mu_h:
            raise InvariantBreachError(
                f"step {self.step}: matching {self.matching} exceeds "
                f"mu_h {self.mu_h}"
            )
        want = self.mu_g / max(1, self.matching)
        if abs(self.ratio - want) > 1e-12:
            raise InvariantBreachError(
                f"step {self.step}: ratio {self.ratio} != {want}"
            )


@dataclass
class RunResult:
    rows: list[MetricsRow] = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def _mu_of_edges(edges) -> int:
    adj: dict[VertexId, set[VertexId]] = {}
    for edge in edges:
        adj.setdefault(edge.left, set()).add(edge.right)
    mu, _ = hopcroft_karp(adj)
    return mu


class _Replay:
    """Single-run state for run_pipeline; owns every pipeline layer."""

    def __init__(
        self,
        cfg: PipelineConfig,
        params: ResolvedParams,
        n_left: int,
        n_right: int,
    ) -> None:
        self.cfg = cfg
        self.params = params
        self.graph = DynBipartiteGraph(n_left, n_right)
        self.general = cfg.mode == "general"
        if self.general:
            self.orientation = SqrtOrientation(self.graph)
            self.subgraph = GeneralEdcs(
                self.graph, self.orientation, params.beta, params.lam
            )
            self.alpha_cap = None
        else:
            cap = cfg.alpha_cap
            if cap is None:
                if cfg.alpha is None:
                    raise ConfigError(
                        "small_arboricity mode needs alpha or alpha_cap"
                    )
                cap = default_delta_cap(cfg.alpha, n_left + n_right)
            self.alpha_cap = cap
            self.orientation = ArbOrientation(cap)
            self.subgraph = WeightedEdcs(
                self.graph, self.orientation, params.beta
            )
        self.matching = MaintainedMatching(cfg.eps, greedy=cfg.greedy)
        self.violations: list[str] = []
        self.rows: list[MetricsRow] = []
        self.max_load_seen = 0
        self.max_path_seen = 0
        self.max_changes_seen = 0
        self.max_flips_seen = 0
        self.validator_runs = 0
        self.ns_total = 0
        self._ns_window = 0
        self._window_updates = 0
        self._window_path_max = 0
        self._last_h_changes = 0

    # -- one pass of the three-layer composition -----------------------

    def apply(self, step: int, op: str, u: VertexId, v: VertexId) -> None:
        if op == "+":
            edge = self.graph.insert_edge(u, v)
            flips = self.orientation.insert(edge)
            for flip in flips:
                if flip.edge != edge:
                    self.subgraph.on_flip(flip)
            self.subgraph.on_graph_insert(edge)
        else:
            edge = self.graph.delete_edge(u, v)
            flips = self.orientation.delete(edge)
            for flip in flips:
                if flip.edge != edge:
                    self.subgraph.on_flip(flip)
            self.subgraph.on_graph_delete(edge)
        events = self.subgraph.drain_h_events()
        for event in events:
            self.matching.on_h_change(event)
        if self.general and self.graph.m and self.orientation.needs_rebuild():
            self.orientation.rebuild()
            self.subgraph.on_orientation_rebuild()
        self._observe(step, len(flips), len(events))

    def _observe(self, step: int, n_flips: int, n_events: int) -> None:
        bad = self.violations
        params = self.params
        self._last_h_changes = n_events
        self.max_changes_seen = max(self.max_changes_seen, n_events)
        self.max_flips_seen = max(self.max_flips_seen, n_flips)
        paths = self.subgraph.last_path_lengths
        longest = max(paths, default=0)
        self.max_path_seen = max(self.max_path_seen, longest)
        self._window_path_max = max(self._window_path_max, longest)
        if longest > params.max_path_len:
            bad.append(
                f"step {step}: path length {longest} exceeds "
                f"{params.max_path_len}"
            )
        load = self.orientation.max_load()
        self.max_load_seen = max(self.max_load_seen, load)
        if self.general:
            if n_flips > 10:
                bad.append(f"step {step}: {n_flips} flips exceed 10")
            if load**2 > 9 * self.orientation.m_bar:
                bad.append(
                    f"step {step}: load {load} breaks 3*sqrt(mBar) with "
                    f"mBar {self.orientation.m_bar}"
                )
            if n_events > params.max_h_changes:
                bad.append(
                    f"step {step}: {n_events} H changes exceed "
                    f"{params.max_h_changes}"
                )
        else:
            if load > self.alpha_cap:
                bad.append(
                    f"step {step}: load {load} exceeds cap {self.alpha_cap}"
                )
            units = self.subgraph.last_unit_change_counts
            worst = max(units, default=0)
            if worst > params.unit_cap:
                bad.append(
                    f"step {step}: {worst} changes in one unit exceed "
                    f"{params.unit_cap}"
                )
            if len(units) > params.beta:
                bad.append(
                    f"step {step}: {len(units)} units exceed beta"
                )
            if sum(units) > params.update_cap:
                bad.append(
                    f"step {step}: update total exceeds {params.update_cap}"
                )

    # -- oracle sampling ----------------------------------------------

    def validate(self, step: int) -> None:
        self.validator_runs += 1
        if self.general:
            report = validate_edcs_unweighted(
                self.graph,
                set(self.subgraph.h_edges()),
                self.params.beta,
                self.params.lam,
            )
        else:
            report = validate_edcs_weighted(
                self.graph, self.subgraph.weights(), self.params.beta
            )
        if not report.ok:
            edge, rule, ed = report.violations[0]
            self.violations.append(
                f"step {step}: validator {rule} at ({edge.left!r}-"
                f"{edge.right!r}) edge degree {ed} "
                f"(+{len(report.violations) - 1} more)"
            )

    def checkpoint(self, step: int) -> None:
        mu_g, _ = hopcroft_karp(self.graph)
        mu_h = _mu_of_edges(self.subgraph.h_edges())
        size = self.matching.size
        eps = self.cfg.eps
        if self.general:
            floor = (2.0 / 3.0 - eps) * mu_g
            label = "(2/3-eps)"
        else:
            floor = (1.0 - eps) * mu_g
            label = "(1-eps)"
        if mu_h < floor - 1e-9:
            self.violations.append(
                f"step {step}: mu_h {mu_h} below {label}*mu_g = {floor:.3f}"
            )
        ratio = mu_g / max(1, size)
        cap = (1.5 + eps) * (1.0 + eps)
        if ratio > cap + 1e-9:
            self.violations.append(
                f"step {step}: ratio {ratio:.3f} exceeds {cap:.3f}"
            )
        if self.cfg.deterministic_timing or not self._window_updates:
            us = 0.0
        else:
            us = self._ns_window / (1000.0 * self._window_updates)
        self.rows.append(
            MetricsRow(
                step=step,
                m=self.graph.m,
                mu_g=mu_g,
                mu_h=mu_h,
                matching=size,
                ratio=ratio,
                max_load=self.orientation.max_load(),
                max_path_len=self._window_path_max,
                h_changes=self._last_h_changes,
                us_per_update=us,
            )
        )
        self._ns_window = 0
        self._window_updates = 0
        self._window_path_max = 0

    def note_time(self, ns: int) -> None:
        self.ns_total += ns
        self._ns_window += ns
        self._window_updates += 1


def run_pipeline(cfg: PipelineConfig, stream: list[Update]) -> RunResult:
    """Replay a stream through the full composition and measure it."""
    params = plan_parameters(cfg)
    need_left, need_right = validate_stream(stream)
    n_left = cfg.n_left if cfg.n_left is not None else max(1, need_left)
    n_right = cfg.n_right if cfg.n_right is not None else max(1, need_right)
    if n_left < need_left or n_right < need_right:
        raise ConfigError(
            f"stream needs {need_left}x{need_right} vertices but config "
            f"allows {n_left}x{n_right}"
        )

    replay = _Replay(cfg, params, n_left, n_right)
    steps_done = 0
    aborted = False
    for step, (op, u, v) in enumerate(stream, start=1):
        began = time.perf_counter_ns()
        try:
            replay.apply(step, op, u, v)
        except (CapacityExceededError, InvariantBreachError) as exc:
            replay.violations.append(f"step {step}: {exc}")
            aborted = True
            break
        replay.note_time(time.perf_counter_ns() - began)
        steps_done = step
        if cfg.validate_every and step % cfg.validate_every == 0:
            replay.validate(step)
        if step % cfg.checkpoint_every == 0:
            replay.checkpoint(step)
    if steps_done and steps_done % cfg.checkpoint_every:
        replay.checkpoint(steps_done)

    wall_ms = 0.0 if cfg.deterministic_timing else replay.ns_total / 1e6
    last = replay.rows[-1] if replay.rows else None
    summary = {
        "params": params.as_dict(),
        "alpha_cap": replay.alpha_cap,
        "seed": cfg.seed,
        "n_left": n_left,
        "n_right": n_right,
        "checkpoint_every": cfg.checkpoint_every,
        "validate_every": cfg.validate_every,
        "steps": steps_done,
        "aborted": aborted,
        "final_m": replay.graph.m,
        "final_mu_g": last.mu_g if last else 0,
        "final_mu_h": last.mu_h if last else 0,
        "final_matching": last.matching if last else 0,
        "final_ratio": last.ratio if last else 0.0,
        "max_load": replay.max_load_seen,
        "max_path_len": replay.max_path_seen,
        "max_h_changes": replay.max_changes_seen,
        "max_flips": replay.max_flips_seen,
        "validator_runs": replay.validator_runs,
        "wall_ms": round(wall_ms, 3),
        "violations": len(replay.violations),
        "violation_samples": replay.violations[:10],
    }
    return RunResult(
        rows=replay.rows, summary=summary, violations=replay.violations
    )
