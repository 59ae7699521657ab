"""Prior sweeps and conditional-probability profiles as plain tables."""

from __future__ import annotations

import csv
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import astuple, dataclass, fields
from functools import partial
from typing import IO, Any, Sequence

import numpy as np

from .core import build_r10, conditional_probabilities, optimal_cost, optimal_strategy
from .optimizer import OptimizerConfig, optimize_probe
from .prior import CircularPrior, diffusive_prior, prior_to_dict, prior_uncertainty
from .states import ProbeState, named_state, state_to_dict

FLOAT_FORMAT = ".12g"


@dataclass(frozen=True)
class SweepRecord:
    t: float
    delta_phi_prior: float
    state: str
    cost: float
    delta_phi: float
    ratio: float


CSV_HEADER = [f.name for f in fields(SweepRecord)]


def parse_t_grid(text: str) -> np.ndarray:
    """Parse ``min:max:log|lin:count`` into an array of diffusion times."""
    parts = text.split(":")
    if len(parts) != 4:
        raise ValueError(f"t-grid must look like min:max:log:count, got {text!r}")
    lo, hi, scale, count = float(parts[0]), float(parts[1]), parts[2], int(parts[3])
    if scale not in ("log", "lin"):
        raise ValueError(f"t-grid spacing must be 'log' or 'lin', got {scale!r}")
    if count < 1 or not lo > 0:
        raise ValueError("t-grid needs count >= 1 and positive times")
    if count == 1:
        if lo != hi:
            raise ValueError("a single-point t-grid needs min == max")
        return np.array([lo])
    if not hi > lo:
        raise ValueError("t-grid needs max > min")
    return np.geomspace(lo, hi, count) if scale == "log" else np.linspace(lo, hi, count)


def sweep_point(t: float, n: int, states: Sequence[str], cfg: OptimizerConfig) -> list[SweepRecord]:
    """One row per state family at diffusion time ``t``."""
    prior = diffusive_prior(float(t), min_order=n + 1)
    spread = prior_uncertainty(prior)
    rows = []
    for name in states:
        if name == "optimal":
            cost = optimize_probe(n, prior, cfg).cost
        else:
            cost = optimal_cost(build_r10(named_state(name, n), prior))
        dphi = math.sqrt(max(cost, 0.0))
        rows.append(SweepRecord(float(t), spread, name, cost, dphi, dphi / spread))
    return rows


def run_sweep(n: int, ts: Sequence[float], states: Sequence[str], cfg: OptimizerConfig | None = None,
              jobs: int = 1) -> list[SweepRecord]:
    """Evaluate every (t, state) pair; rows come back in grid order."""
    cfg = cfg or OptimizerConfig()
    work = partial(sweep_point, n=n, states=list(states), cfg=cfg)
    if jobs > 1 and len(ts) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(work, ts))
    else:
        chunks = [work(t) for t in ts]
    return [row for chunk in chunks for row in chunk]


def _fmt(value: Any) -> str:
    return format(value, FLOAT_FORMAT) if isinstance(value, float) else str(value)


def write_rows(stream: IO[str], header: Sequence[str], rows) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) for v in row])


def write_sweep_csv(stream: IO[str], records: Sequence[SweepRecord]) -> None:
    write_rows(stream, CSV_HEADER, (astuple(r) for r in records))


@dataclass(frozen=True)
class Profile:
    """Conditional outcome probabilities of the optimal strategy over a phase grid."""

    phi: np.ndarray
    probabilities: np.ndarray
    phases: np.ndarray
    state: ProbeState
    prior: CircularPrior
    cost: float

    @property
    def header(self) -> list[str]:
        return ["phi"] + [f"p{k}" for k in range(self.probabilities.shape[1])]

    def rows(self):
        for phi, probs in zip(self.phi.tolist(), self.probabilities.tolist()):
            yield [phi, *probs]

    def metadata(self) -> dict[str, Any]:
        return {
            "n": self.state.n,
            "prior": prior_to_dict(self.prior),
            "cost": self.cost,
            "phases": self.phases.tolist(),
            "amplitudes": state_to_dict(self.state)["values"],
        }


def profile(state: ProbeState, prior: CircularPrior, points: int = 512) -> Profile:
    if points < 1:
        raise ValueError("profile grid needs at least one point")
    report = optimal_strategy(state, prior)
    phi = -np.pi + 2 * np.pi * np.arange(points) / points
    probs = conditional_probabilities(state, report.measurement, phi)
    return Profile(phi, probs, report.measurement.phases, state, prior, report.cost)


def default_jobs() -> int:
    return os.cpu_count() or 1
