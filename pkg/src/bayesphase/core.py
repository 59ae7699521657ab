"""Optimal phase-estimation strategy for a given probe state and prior.

Everything follows from the off-diagonal block
``R10[n, m] = 1/2 rho[n, m] p_{n-m-1}`` of the state-and-prior operator.
With the cost ``4 sin^2((phi - est)/2)`` and phase shift
``U_phi|n> = exp(-i n phi)|n>``, the fidelity of a projective strategy
``{psi_k, phi_k}`` is ``F = 1/2 + 2 Re Tr(R10 M01)`` with
``M01 = 1/2 sum_k exp(-i phi_k)|psi_k><psi_k|``, and the cost is ``4(1 - F)``.
The best achievable fidelity is ``1/2 + ||R10||_1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.linalg

from .prior import CircularPrior
from .states import DensityMatrix, ProbeState, as_density

GRAM_TOL = 1e-10


def wrap_phase(phi):
    """Map angles into [-pi, pi)."""
    return np.mod(np.asarray(phi, dtype=float) + np.pi, 2 * np.pi) - np.pi


@dataclass(frozen=True, eq=False)
class OffDiagonalBlock:
    matrix: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0] - 1


@dataclass(frozen=True, eq=False)
class PhaseMeasurement:
    """Projective measurement; column ``k`` of ``basis`` is ``psi_k``, estimated phase ``phases[k]``."""

    basis: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        basis = np.array(self.basis, dtype=complex)
        phases = wrap_phase(self.phases).ravel()
        if basis.ndim != 2 or basis.shape[0] != basis.shape[1]:
            raise ValueError("measurement basis must be a square matrix")
        if phases.size != basis.shape[1]:
            raise ValueError("need exactly one estimator phase per outcome")
        gram = basis.conj().T @ basis
        if np.abs(gram - np.eye(basis.shape[1])).max() > GRAM_TOL:
            raise ValueError("measurement basis is not orthonormal")
        basis.setflags(write=False)
        phases.setflags(write=False)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "phases", phases)

    @property
    def n(self) -> int:
        return self.basis.shape[0] - 1

    def unitary(self) -> np.ndarray:
        """``sum_k exp(-i phi_k) |psi_k><psi_k|``."""
        return (self.basis * np.exp(-1j * self.phases)) @ self.basis.conj().T


@dataclass(frozen=True)
class StrategyReport:
    cost: float
    fidelity: float
    posterior_uncertainty: float
    measurement: PhaseMeasurement


def build_r10(state: ProbeState | DensityMatrix, prior: CircularPrior, n: int | None = None) -> OffDiagonalBlock:
    """Off-diagonal block ``R10[n, m] = 1/2 rho[n, m] p_{n-m-1}``.

    Coefficients beyond the prior's truncation order count as zero.
    """
    rho = as_density(state).entries
    dim = rho.shape[0]
    if n is not None and n + 1 != dim:
        raise ValueError(f"state has N={dim - 1}, expected N={n}")
    p = prior.fourier(dim)
    idx = np.arange(dim)
    shift = idx[:, None] - idx[None, :] - 1
    return OffDiagonalBlock(0.5 * rho * p[shift + dim])


def trace_norm(matrix: np.ndarray) -> float:
    return float(np.linalg.svd(matrix, compute_uv=False).sum())


def optimal_fidelity(block: OffDiagonalBlock) -> float:
    return 0.5 + trace_norm(block.matrix)


def optimal_cost(block: OffDiagonalBlock) -> float:
    """Minimal average cost ``4 (1/2 - ||R10||_1)``."""
    return 4.0 * (0.5 - trace_norm(block.matrix))


def optimal_measurement(block: OffDiagonalBlock) -> PhaseMeasurement:
    """Measurement attaining the trace-norm bound.

    With ``R10 = U_R S V_R^dag`` the unitary ``V_R U_R^dag`` is
    ``sum_k exp(-i phi_k)|psi_k><psi_k|``. A complex Schur form of a normal
    matrix is diagonal, which gives orthonormal eigenvectors even for
    degenerate eigenvalues.
    """
    u_r, _, vh_r = np.linalg.svd(block.matrix)
    unitary = vh_r.conj().T @ u_r.conj().T
    tri, vecs = scipy.linalg.schur(unitary, output="complex")
    phases = wrap_phase(-np.angle(np.diag(tri)))
    order = np.argsort(phases, kind="stable")
    return PhaseMeasurement(vecs[:, order], phases[order])


def _fidelity(rho: DensityMatrix, prior: CircularPrior, m: PhaseMeasurement) -> float:
    block = build_r10(rho, prior)
    return 0.5 + float(np.real(np.trace(block.matrix @ m.unitary())))


def evaluate_strategy(state: ProbeState | DensityMatrix, prior: CircularPrior, m: PhaseMeasurement) -> StrategyReport:
    """Cost and fidelity of an arbitrary projective strategy ``m``."""
    rho = as_density(state)
    if rho.n != m.n:
        raise ValueError(f"state has N={rho.n} but measurement has N={m.n}")
    fid = _fidelity(rho, prior, m)
    cost = 4.0 * (1.0 - fid)
    return StrategyReport(cost, fid, math.sqrt(max(cost, 0.0)), m)


def optimal_strategy(state: ProbeState | DensityMatrix, prior: CircularPrior) -> StrategyReport:
    """Optimal measurement for ``state`` together with its cost."""
    block = build_r10(state, prior)
    m = optimal_measurement(block)
    fid = optimal_fidelity(block)
    cost = 4.0 * (1.0 - fid)
    return StrategyReport(cost, fid, math.sqrt(max(cost, 0.0)), m)


def conditional_probabilities(psi: ProbeState, m: PhaseMeasurement, phi_grid) -> np.ndarray:
    """``p(k|phi) = |<psi_k| U_phi |psi>|^2``; one row per grid point, one column per outcome."""
    phi = np.atleast_1d(np.asarray(phi_grid, dtype=float))
    if psi.n != m.n:
        raise ValueError("state and measurement dimensions differ")
    n = np.arange(psi.n + 1)
    shifted = np.exp(-1j * np.outer(phi, n)) * psi.amplitudes
    return np.abs(shifted @ m.basis.conj()) ** 2


def qfi_pure(psi: ProbeState) -> float:
    """Quantum Fisher information ``4 Var(n)`` of a pure state."""
    w = np.abs(psi.amplitudes) ** 2
    n = np.arange(w.size)
    mean = w @ n
    return float(4.0 * (w @ (n - mean) ** 2))


def report_to_dict(report: StrategyReport) -> dict[str, Any]:
    m = report.measurement
    return {
        "cost": report.cost,
        "fidelity": report.fidelity,
        "posterior_uncertainty": report.posterior_uncertainty,
        "phases": m.phases.tolist(),
        "basis": [[[z.real, z.imag] for z in m.basis[:, k].tolist()] for k in range(m.n + 1)],
    }
