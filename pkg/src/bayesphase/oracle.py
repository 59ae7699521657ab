"""Brute-force checks that avoid the SVD route of :mod:`bayesphase.core`.

Everything here works from the cost integral directly: the prior density
and the shifted state are sampled on an equally spaced grid, and strategies
are scored by summing ``p(phi) p(k|phi) 4 sin^2((phi - phi_k)/2)``. For
trigonometric-polynomial priors a fine enough grid makes the sums exact.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .core import PhaseMeasurement
from .prior import CircularPrior, density_at
from .states import DensityMatrix, ProbeState, as_density

DEFAULT_POINTS = 4096


@dataclass(frozen=True)
class QuadratureGrid:
    points: int = DEFAULT_POINTS

    def __post_init__(self):
        if self.points < 2:
            raise ValueError("a quadrature grid needs at least 2 points")

    @property
    def nodes(self) -> np.ndarray:
        return -np.pi + 2 * np.pi * np.arange(self.points) / self.points

    @property
    def weight(self) -> float:
        return 2 * np.pi / self.points


def _require_resolution(grid: QuadratureGrid, n: int, prior: CircularPrior) -> None:
    needed = 8 * (n + prior.order + 1)
    if grid.points < needed:
        raise ValueError(f"grid of {grid.points} points under-resolves this problem (need {needed})")


def _shifted_states(rho: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """``U_phi rho U_phi^dag`` for every grid point, shape (G, d, d)."""
    phase = np.exp(-1j * np.outer(phi, np.arange(rho.shape[0])))
    return phase[:, :, None] * rho[None] * phase.conj()[:, None, :]


def quadrature_cost(state: ProbeState | DensityMatrix, prior: CircularPrior, m: PhaseMeasurement,
                    grid: QuadratureGrid = QuadratureGrid()) -> float:
    """Average cost of ``m`` by direct Riemann summation of the cost integral."""
    rho = as_density(state).entries
    n = rho.shape[0] - 1
    _require_resolution(grid, n, prior)
    phi = grid.nodes
    basis = m.basis
    probs = np.einsum("nk,gnm,mk->gk", basis.conj(), _shifted_states(rho, phi), basis).real
    penalty = 4 * np.sin((phi[:, None] - m.phases[None, :]) / 2) ** 2
    return float(grid.weight * density_at(prior, phi) @ (probs * penalty).sum(axis=1))


def _first_moment(rho: np.ndarray, prior: CircularPrior, grid: QuadratureGrid) -> np.ndarray:
    """``1/2 int p(phi) e^{i phi} U_phi rho U_phi^dag dphi`` by quadrature."""
    phi = grid.nodes
    w = 0.5 * grid.weight * density_at(prior, phi) * np.exp(1j * phi)
    return np.tensordot(w, _shifted_states(rho, phi), axes=1)


def _best_cost_for_bases(moment: np.ndarray, bases: np.ndarray) -> np.ndarray:
    # with phases chosen freely, outcome k contributes |<psi_k|G|psi_k>|
    overlaps = np.einsum("...nk,nm,...mk->...k", bases.conj(), moment, bases)
    return 2.0 - 4.0 * np.abs(overlaps).sum(axis=-1)


def best_phases(state: ProbeState | DensityMatrix, prior: CircularPrior, basis: np.ndarray,
                grid: QuadratureGrid = QuadratureGrid()) -> np.ndarray:
    """Optimal estimator phase for each outcome of a fixed basis."""
    rho = as_density(state).entries
    moment = _first_moment(rho, prior, grid)
    return np.angle(np.einsum("nk,nm,mk->k", basis.conj(), moment, basis))


def random_strategy_search(state: ProbeState | DensityMatrix, prior: CircularPrior, trials: int,
                           seed: int = 0, inject: np.ndarray | None = None,
                           grid: QuadratureGrid = QuadratureGrid()) -> float:
    """Lowest cost over Haar-random bases, each with its best estimator phases.

    Trial ``i`` draws from its own stream spawned from ``seed``, so the
    result is non-increasing in ``trials``. ``inject`` replaces trial 0 with
    a given basis (columns are the measurement vectors).
    """
    if trials < 1:
        raise ValueError("need at least one trial")
    rho = as_density(state).entries
    dim = rho.shape[0]
    _require_resolution(grid, dim - 1, prior)
    moment = _first_moment(rho, prior, grid)
    bases = np.empty((trials, dim, dim), dtype=complex)
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(trials)):
        rng = np.random.default_rng(child)
        bases[i] = unitary_group.rvs(dim, random_state=rng) if dim > 1 else np.ones((1, 1))
    if inject is not None:
        bases[0] = inject
    return float(_best_cost_for_bases(moment, bases).min())


def exhaustive_qubit_search(state: ProbeState | DensityMatrix, prior: CircularPrior,
                            angles: int = 10_000, phases: int = 1_000,
                            grid: QuadratureGrid = QuadratureGrid()) -> float:
    """Grid search over every projective measurement of an N=1 probe.

    Bases are ``(cos a, e^{ic} sin a)`` and ``(-e^{-ic} sin a, cos a)`` for
    ``a`` in [0, pi/2] and ``c`` in [0, 2pi); estimator phases are optimal.
    """
    rho = as_density(state).entries
    if rho.shape[0] != 2:
        raise ValueError("exhaustive search is only defined for N=1")
    _require_resolution(grid, 1, prior)
    moment = _first_moment(rho, prior, grid)
    a = np.linspace(0, np.pi / 2, angles)
    cos, sin = np.cos(a), np.sin(a)
    best = np.inf
    for c in 2 * np.pi * np.arange(phases) / phases:
        e = np.exp(1j * c)
        bases = np.empty((angles, 2, 2), dtype=complex)
        bases[:, 0, 0] = cos
        bases[:, 1, 0] = e * sin
        bases[:, 0, 1] = -np.conj(e) * sin
        bases[:, 1, 1] = cos
        best = min(best, float(_best_cost_for_bases(moment, bases).min()))
    return best


def tridiagonal_dominant(n: int, tol: float = 1e-14, max_iter: int = 1_000_000):
    """Top eigenpair of the (N+1)x(N+1) matrix with 1/2 on both off-diagonals.

    Power iteration on ``T + I`` (the spectrum of T is symmetric about 0, so
    the shift is what makes the top eigenvalue strictly dominant).
    """
    if n < 1:
        raise ValueError("N must be at least 1")

    def apply(x):
        y = x.copy()
        y[:-1] += 0.5 * x[1:]
        y[1:] += 0.5 * x[:-1]
        return y

    x = np.ones(n + 1) / np.sqrt(n + 1)
    for _ in range(max_iter):
        y = apply(x)
        y /= np.linalg.norm(y)
        done = np.linalg.norm(y - x) < tol
        x = y
        if done:
            break
    return float(x @ apply(x) - x @ x), x
