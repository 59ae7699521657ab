"""Quick self-check of the closed-form results against the brute-force oracles."""

from __future__ import annotations

import math

import numpy as np

from .core import build_r10, evaluate_strategy, optimal_cost, optimal_measurement
from .oracle import QuadratureGrid, quadrature_cost, random_strategy_search, tridiagonal_dominant
from .prior import diffusive_prior, uniform_prior
from .states import berry_wiseman, random_state


def _bw_closed_form():
    worst = 0.0
    for n in range(1, 21):
        lam, _ = tridiagonal_dominant(n)
        cost = optimal_cost(build_r10(berry_wiseman(n), uniform_prior()))
        worst = max(worst, abs(cost - 2 * (1 - lam)))
    return worst < 1e-6, f"max deviation {worst:.2e}"


def _saturation(rng):
    worst = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 13))
        psi = random_state(n, rng)
        prior = diffusive_prior(10 ** rng.uniform(-3, 1), min_order=n + 1)
        block = build_r10(psi, prior)
        report = evaluate_strategy(psi, prior, optimal_measurement(block))
        worst = max(worst, abs(report.cost - optimal_cost(block)))
    return worst < 1e-12, f"max deviation {worst:.2e}"


def _quadrature(rng):
    worst = 0.0
    for _ in range(20):
        n = int(rng.integers(1, 7))
        psi = random_state(n, rng)
        prior = diffusive_prior(10 ** rng.uniform(-1.5, 1), min_order=n + 1)
        m = optimal_measurement(build_r10(psi, prior))
        worst = max(worst, abs(quadrature_cost(psi, prior, m, QuadratureGrid(2048))
                               - evaluate_strategy(psi, prior, m).cost))
    return worst < 1e-6, f"max deviation {worst:.2e}"


def _no_better_strategy(seed):
    margin = math.inf
    for n in (1, 2, 3):
        for t in (0.1, 1.0, 10.0):
            psi = random_state(n, np.random.default_rng(seed + n))
            prior = diffusive_prior(t, min_order=n + 1)
            found = random_strategy_search(psi, prior, 200, seed=seed)
            margin = min(margin, found - optimal_cost(build_r10(psi, prior)))
    return margin >= -1e-9, f"smallest margin {margin:.2e}"


def run_checks(seed: int = 0) -> list[tuple[str, bool, str]]:
    rng = np.random.default_rng(seed)
    checks = [
        ("bw-closed-form", _bw_closed_form()),
        ("saturation", _saturation(rng)),
        ("quadrature", _quadrature(rng)),
        ("no-better-strategy", _no_better_strategy(seed)),
    ]
    return [(name, ok, detail) for name, (ok, detail) in checks]
