"""Alternating maximization of the fidelity over probe state and measurement."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from .core import PhaseMeasurement, build_r10, optimal_fidelity, optimal_measurement
from .prior import CircularPrior
from .states import (
    ProbeState,
    berry_wiseman,
    classical_binomial,
    flat,
    from_amplitudes,
    noon,
    random_state,
    state_to_dict,
)

log = logging.getLogger(__name__)

FIXED_POINT_TOL = 1e-9


@dataclass(frozen=True)
class OptimizerConfig:
    """Stopping rule and restart policy.

    The four analytic starts (BW, N00N, flat, binomial) always run;
    ``restarts - 4`` Haar-random starts are added when positive.
    """

    tol: float = 1e-12
    max_iter: int = 1000
    restarts: int = 4
    seed: int = 0

    def __post_init__(self):
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iter < 1 or self.restarts < 1:
            raise ValueError("max_iter and restarts must be at least 1")


@dataclass(frozen=True)
class OptimizerResult:
    state: ProbeState
    cost: float
    fidelity_trace: list[float]
    iterations: int
    converged: bool
    start: str = field(default="")


def fidelity_operator(m: PhaseMeasurement, prior: CircularPrior) -> np.ndarray:
    """Hermitian matrix whose expectation in ``psi`` is the fidelity of ``(psi, m)``.

    Entry ``[n, m]`` is ``sum_k psi_k[n] conj(psi_k[m]) I_{n-m}(phi_k)`` with
    ``I_q(phi_k) = int p(phi) e^{i q phi} (1 + cos(phi - phi_k))/2 dphi``.
    Expanding the cosine leaves only ``p_{-q}``, ``p_{-q-1}``, ``p_{-q+1}``,
    so the sum over outcomes collapses onto the unitary
    ``W = sum_k e^{-i phi_k}|psi_k><psi_k|``:
    ``1/2 I + 1/4 (P o W) + 1/4 (P o W)^dag`` with ``P[n, m] = p_{m-n-1}``.
    """
    dim = m.n + 1
    p = prior.fourier(dim)
    idx = np.arange(dim)
    lag = idx[None, :] - idx[:, None] - 1
    half = 0.25 * p[lag + dim] * m.unitary()
    return 0.5 * np.eye(dim) + half + half.conj().T


def _top_eigenvector(op: np.ndarray) -> np.ndarray:
    _, vecs = np.linalg.eigh(op)
    return vecs[:, -1]


def ascend(psi: ProbeState, prior: CircularPrior, cfg: OptimizerConfig):
    """Run one restart from ``psi``; returns (final state, fidelity trace, converged)."""
    amps = psi.amplitudes
    trace: list[float] = []
    converged = False
    for _ in range(cfg.max_iter + 1):
        block = build_r10(ProbeState(amps), prior)
        trace.append(optimal_fidelity(block))
        if len(trace) > 1 and trace[-1] - trace[-2] < cfg.tol:
            converged = True
            break
        if len(trace) > cfg.max_iter:
            break
        op = fidelity_operator(optimal_measurement(block), prior)
        amps = _top_eigenvector(op)
        amps = amps / np.linalg.norm(amps)
    if converged:
        # a stalled trace is only a fixed point if psi is the top eigenvector of its own operator
        op = fidelity_operator(optimal_measurement(build_r10(ProbeState(amps), prior)), prior)
        overlap = abs(np.vdot(_top_eigenvector(op), amps)) ** 2
        converged = bool(overlap >= 1 - FIXED_POINT_TOL)
    return from_amplitudes(amps, label="optimal"), trace, converged


def initial_states(n: int, cfg: OptimizerConfig) -> list[ProbeState]:
    starts = [berry_wiseman(n), noon(n), flat(n), classical_binomial(n)]
    extra = max(0, cfg.restarts - len(starts))
    for child in np.random.SeedSequence(cfg.seed).spawn(extra):
        starts.append(random_state(n, np.random.default_rng(child)))
    return starts


def optimize_probe(n: int, prior: CircularPrior, cfg: OptimizerConfig | None = None) -> OptimizerResult:
    """Best pure probe state for ``prior`` found by alternating maximization.

    Each step takes the optimal measurement for the current state, then the
    top eigenvector of :func:`fidelity_operator` as the next state; both
    half-steps are exact maximizations, so the fidelity never decreases.
    Returns the restart with the highest final fidelity (ties go to the
    earlier start).
    """
    cfg = cfg or OptimizerConfig()
    best = None
    for start in initial_states(n, cfg):
        state, trace, converged = ascend(start, prior, cfg)
        if not converged:
            log.info("restart from %s did not converge after %d steps", start.label, len(trace) - 1)
        if best is None or trace[-1] > best.fidelity_trace[-1]:
            best = OptimizerResult(
                state=state,
                cost=4.0 * (1.0 - trace[-1]),
                fidelity_trace=trace,
                iterations=len(trace) - 1,
                converged=converged,
                start=start.label,
            )
    return best


def result_to_dict(result: OptimizerResult) -> dict[str, Any]:
    return {
        "state": state_to_dict(result.state),
        "cost": result.cost,
        "iterations": result.iterations,
        "converged": result.converged,
        "fidelity_trace": list(result.fidelity_trace),
    }
