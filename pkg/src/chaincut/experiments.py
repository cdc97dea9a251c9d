"""Random layered networks and the seeded sweep harness.

The generator draws trellis networks shaped like the layered fixture:
source, K layers of N candidate nodes, destination, with every
consecutive-layer edge independently present with probability p and,
when present, capacity uniform on the open interval (1-U, 1+U), rounded
to micro-units.  All payload sizes are 1.

`run_sweep` evaluates the selected algorithms on `trials` independent
instances per grid point of a one-parameter sweep.  All algorithms run
on the same instances (paired design).  Instance seeds derive from
(base seed, grid index, trial, resample round), so identical configs
produce identical tables bit for bit.  Infeasible (disconnected)
instances are discarded and redrawn — averages are over feasible
instances only, with the discard count reported per row — and a trial
that stays infeasible after 100 redraws aborts the sweep.
"""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Mapping, Optional, Sequence, TextIO, Union

import numpy as np

from .chain import ChainRequest
from .netgraph import MICRO, Capacity, Network, to_micro
from .solvers import (
    MincutCache,
    SolveResult,
    solve_alpha_greedy,
    solve_alpha_optimal,
    solve_greedy,
    solve_no_redundancy,
)

ALGORITHMS = ("no_redundancy", "greedy", "alpha_optimal", "alpha_greedy")
SWEEPABLE = ("n", "k", "alpha", "p", "u")

THREADS_ENV = "CHAINCUT_THREADS"

_MAX_RESAMPLES = 100


@dataclass(frozen=True)
class SweepSpec:
    """One swept parameter and its grid values."""

    param: str
    values: tuple

    def __post_init__(self) -> None:
        if self.param not in SWEEPABLE:
            raise ValueError(
                f"cannot sweep {self.param!r}; choose one of {', '.join(SWEEPABLE)}"
            )
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise ValueError("sweep grid must be nonempty")


@dataclass(frozen=True)
class ExperimentConfig:
    """Sweep configuration (defaults: N=K=10, alpha=2, p=1, U=0.5, 10 trials)."""

    n: int = 10
    k: int = 10
    alpha: int = 2
    p: float = 1.0
    u: float = 0.5
    trials: int = 10
    seed: int = 0
    algorithms: tuple[str, ...] = ALGORITHMS
    sweep: Optional[SweepSpec] = None

    def __post_init__(self) -> None:
        for name in ("n", "k", "alpha", "trials"):
            if int(getattr(self, name)) < 1:
                raise ValueError(f"{name} must be >= 1, got {getattr(self, name)}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must be in [0,1], got {self.p}")
        if not 0.0 <= self.u <= 1.0:
            raise ValueError(f"u must be in [0,1], got {self.u}")
        if self.seed < 0:
            raise ValueError(f"seed must be nonnegative, got {self.seed}")
        object.__setattr__(self, "algorithms", tuple(self.algorithms))
        if not self.algorithms:
            raise ValueError("algorithms must be nonempty")
        for a in self.algorithms:
            if a not in ALGORITHMS:
                raise ValueError(
                    f"unknown algorithm {a!r}; choose from {', '.join(ALGORITHMS)}"
                )
        for _, point in self.grid():  # reject invalid grid values early
            pass

    def grid(self) -> list[tuple[object, "ExperimentConfig"]]:
        """(value, point-config) per grid point; one '' point when no sweep."""
        if self.sweep is None:
            return [("", self)]
        return [
            (v, replace(self, **{self.sweep.param: v}, sweep=None))
            for v in self.sweep.values
        ]

    @property
    def sweep_param(self) -> str:
        return self.sweep.param if self.sweep is not None else ""

    @classmethod
    def from_dict(cls, data: Mapping) -> "ExperimentConfig":
        """Build from a parsed JSON object; unknown keys are rejected."""
        known = {"n", "k", "alpha", "p", "u", "trials", "seed", "algorithms", "sweep"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
        kwargs: dict = {}
        for name in ("n", "k", "alpha", "trials", "seed"):
            if name in data:
                kwargs[name] = int(data[name])
        for name in ("p", "u"):
            if name in data:
                kwargs[name] = float(data[name])
        if "algorithms" in data:
            kwargs["algorithms"] = tuple(str(a) for a in data["algorithms"])
        if "sweep" in data and data["sweep"] is not None:
            s = data["sweep"]
            extra = set(s) - {"param", "values"}
            if extra:
                raise ValueError(f"unknown sweep keys: {', '.join(sorted(extra))}")
            param = str(s["param"])
            caster = float if param in ("p", "u") else int
            kwargs["sweep"] = SweepSpec(param, tuple(caster(v) for v in s["values"]))
        return cls(**kwargs)

    def to_dict(self) -> dict:
        out: dict = {
            "n": self.n,
            "k": self.k,
            "alpha": self.alpha,
            "p": self.p,
            "u": self.u,
            "trials": self.trials,
            "seed": self.seed,
            "algorithms": list(self.algorithms),
        }
        if self.sweep is not None:
            out["sweep"] = {"param": self.sweep.param, "values": list(self.sweep.values)}
        return out


def gen_layered_network(
    n: int,
    k: int,
    p: float,
    u: float,
    seed: Union[int, np.random.SeedSequence],
) -> tuple[Network, ChainRequest]:
    """One random trellis instance: s, K layers of N nodes, d.

    Node 0 is the source, layer k occupies indices 1+(k-1)N .. kN, and
    the destination is K*N+1.  Edges s→layer 1, layer k→layer k+1 (all
    pairs), layer K→d are each present with probability p; a present
    edge's capacity is uniform on the open interval (1-U, 1+U) in
    micro-units, drawn by rejecting the interval endpoints (exactly 1
    when U=0).  Absent edges are omitted.  The request has unit payloads
    and the K layers as candidate sets.
    """
    if n < 1 or k < 1:
        raise ValueError(f"n and k must be >= 1, got n={n}, k={k}")
    if not 0.0 <= p <= 1.0 or not 0.0 <= u <= 1.0:
        raise ValueError(f"p and u must be in [0,1], got p={p}, u={u}")
    rng = np.random.default_rng(seed)
    lo = to_micro(1.0 - float(u))
    hi = to_micro(1.0 + float(u))

    def draw_cap() -> int:
        if lo == hi:
            return MICRO
        while True:
            c = int(rng.integers(lo, hi + 1))
            if c != lo and c != hi:
                return c

    edges: list[tuple[int, int, Capacity]] = []

    def maybe(tail: int, head: int) -> None:
        if rng.random() < p:
            edges.append((tail, head, Capacity(draw_cap())))

    def node(layer: int, i: int) -> int:  # layer 1..k, i 1..n
        return 1 + (layer - 1) * n + (i - 1)

    dest = k * n + 1
    for j in range(1, n + 1):
        maybe(0, node(1, j))
    for layer in range(1, k):
        for i in range(1, n + 1):
            for j in range(1, n + 1):
                maybe(node(layer, i), node(layer + 1, j))
    for i in range(1, n + 1):
        maybe(node(k, i), dest)

    labels = ["s"]
    for layer in range(1, k + 1):
        labels.extend(f"v{layer}_{i}" for i in range(1, n + 1))
    labels.append("d")
    net = Network(k * n + 2, edges, labels)
    layers = [range(node(layer, 1), node(layer, n) + 1) for layer in range(1, k + 1)]
    req = ChainRequest(0, dest, [1] * (k + 1), layers)
    return net, req


@dataclass(frozen=True)
class TrialRow:
    """One algorithm's exact delay on one feasible instance."""

    sweep_param: str
    value: object
    algorithm: str
    trial: int
    seed: int
    delay: Fraction
    resamples: int


def _solve(
    algorithm: str,
    net: Network,
    req: ChainRequest,
    alpha: int,
    cache: MincutCache,
) -> SolveResult:
    if algorithm == "no_redundancy":
        return solve_no_redundancy(net, req, cache=cache)
    if algorithm == "greedy":
        return solve_greedy(net, req, cache=cache)
    if algorithm == "alpha_optimal":
        return solve_alpha_optimal(net, req, alpha, cache=cache)
    if algorithm == "alpha_greedy":
        return solve_alpha_greedy(net, req, alpha, cache=cache)
    raise ValueError(f"unknown algorithm {algorithm!r}")


def _run_trial(
    base_seed: int,
    sweep_param: str,
    value: object,
    grid_index: int,
    point: ExperimentConfig,
    trial: int,
) -> list[TrialRow]:
    """All algorithm rows for one (grid point, trial), resampling as needed."""
    for round_ in range(_MAX_RESAMPLES + 1):
        seq = np.random.SeedSequence((base_seed, grid_index, trial, round_))
        inst_seed = int(seq.generate_state(1)[0])
        net, req = gen_layered_network(point.n, point.k, point.p, point.u, inst_seed)
        cache = MincutCache(net)
        results: list[tuple[str, SolveResult]] = []
        for algorithm in point.algorithms:
            res = _solve(algorithm, net, req, point.alpha, cache)
            if res.delay.is_infeasible:
                results = []
                break
            results.append((algorithm, res))
        if results:
            return [
                TrialRow(sweep_param, value, a, trial, inst_seed, r.delay.fraction, round_)
                for a, r in results
            ]
    where = f"grid point {sweep_param}={value!r}" if sweep_param else "base config"
    raise RuntimeError(
        f"{where}: trial {trial} is still infeasible after {_MAX_RESAMPLES} "
        f"resamples; the topology parameters (p={point.p}) rarely produce a "
        f"connected chain"
    )


def _worker_count(workers: Optional[int]) -> int:
    count = 1 if workers is None else max(1, int(workers))
    cap = os.environ.get(THREADS_ENV)
    if cap:
        count = min(count, max(1, int(cap)))
    return count


def run_sweep(config: ExperimentConfig, *, workers: Optional[int] = None) -> list[TrialRow]:
    """Evaluate every selected algorithm on every grid point and trial.

    Returns one row per (grid value, trial, algorithm) in deterministic
    order; the row's seed identifies the accepted instance draw and
    `resamples` counts the infeasible draws discarded before it.
    Workers (capped by the CHAINCUT_THREADS environment variable) split
    trials across threads; the output is identical for any worker count.

    Raises:
        RuntimeError: when a trial exhausts its resample budget.
    """
    sweep_param = config.sweep_param
    tasks = [
        (config.seed, sweep_param, value, gi, point, trial)
        for gi, (value, point) in enumerate(config.grid())
        for trial in range(config.trials)
    ]
    count = _worker_count(workers)
    if count == 1:
        per_task = [_run_trial(*t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=count) as pool:
            per_task = list(pool.map(lambda t: _run_trial(*t), tasks))
    return [row for rows in per_task for row in rows]


@dataclass(frozen=True)
class SummaryRow:
    """Aggregate of one algorithm at one grid point."""

    sweep_param: str
    value: object
    algorithm: str
    count: int
    mean: Fraction
    std: float


def summarize(rows: Sequence[TrialRow]) -> list[SummaryRow]:
    """Per-(grid value, algorithm) mean and sample standard deviation.

    Means are exact rationals; the standard deviation uses ddof=1 and is
    reported as 0.0 for groups with a single row.  Group order follows
    first appearance in the input.

    Raises:
        ValueError: on an empty table.
    """
    if not rows:
        raise ValueError("cannot summarize an empty table")
    groups: dict[tuple, list[Fraction]] = {}
    for row in rows:
        groups.setdefault((row.sweep_param, row.value, row.algorithm), []).append(row.delay)
    out = []
    for (param, value, algorithm), delays in groups.items():
        mean = sum(delays, Fraction(0)) / len(delays)
        if len(delays) > 1:
            var = sum((d - mean) ** 2 for d in delays) / (len(delays) - 1)
            std = math.sqrt(var)
        else:
            std = 0.0
        out.append(SummaryRow(param, value, algorithm, len(delays), mean, std))
    return out


def write_rows_csv(rows: Sequence[TrialRow], out: TextIO) -> None:
    """Emit trial rows as CSV (delays as shortest round-trip decimals)."""
    writer = csv.writer(out)
    writer.writerow(
        ["sweep_param", "value", "algorithm", "trial", "seed", "delay_decimal", "resamples"]
    )
    for r in rows:
        writer.writerow(
            [r.sweep_param, r.value, r.algorithm, r.trial, r.seed, repr(float(r.delay)), r.resamples]
        )


def write_summary_csv(summary: Sequence[SummaryRow], out: TextIO) -> None:
    """Emit summary rows as CSV (mean and std to six decimal places)."""
    writer = csv.writer(out)
    writer.writerow(["sweep_param", "value", "algorithm", "count", "mean", "std"])
    for r in summary:
        writer.writerow(
            [
                r.sweep_param,
                r.value,
                r.algorithm,
                r.count,
                f"{float(r.mean):.6f}",
                f"{r.std:.6f}",
            ]
        )
