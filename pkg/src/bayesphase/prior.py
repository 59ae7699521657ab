"""Circular priors on [-pi, pi) stored as truncated Fourier series.

A density is written as ``p(phi) = (1/2pi) sum_k p_k exp(i k phi)`` with
``p_0 = 1`` and ``p_{-k} = conj(p_k)``. Only ``k >= 0`` is stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

DEFAULT_TOL = 1e-14
#: Largest truncation order :func:`diffusive_prior` will build unless ``min_order`` asks for more.
MAX_ORDER = 10_000
POSITIVITY_EPS = 1e-9


@dataclass(frozen=True, eq=False)
class CircularPrior:
    """Prior density on the circle given by Fourier coefficients ``p_0..p_K``."""

    coeffs: np.ndarray
    label: str = ""
    origin: dict[str, Any] | None = field(default=None, repr=False)

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).ravel()
        if c.size == 0:
            raise ValueError("a prior needs at least the coefficient p_0")
        if c[0] != 1:
            raise ValueError(f"p_0 must equal 1, got {c[0]}")
        if np.any(np.abs(c) > 1 + 1e-12):
            raise ValueError("Fourier coefficients of a density satisfy |p_k| <= 1")
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        if c.size > 1:
            low = _density_on_grid(c, max(4096, 8 * c.size)).min()
            if low < -POSITIVITY_EPS:
                raise ValueError(f"coefficients give a negative density (min {low:.3g})")

    @property
    def order(self) -> int:
        """Truncation order K."""
        return self.coeffs.size - 1

    def coefficient(self, k: int) -> complex:
        """``p_k`` for any integer k; zero beyond the truncation order."""
        if abs(k) > self.order:
            return 0j
        c = self.coeffs[abs(k)]
        return complex(c if k >= 0 else np.conj(c))

    def fourier(self, kmax: int) -> np.ndarray:
        """Coefficients ``p_k`` for ``k = -kmax..kmax``, zero padded.

        Index ``j`` of the result holds ``p_{j - kmax}``.
        """
        out = np.zeros(2 * kmax + 1, dtype=complex)
        m = min(kmax, self.order)
        out[kmax : kmax + m + 1] = self.coeffs[: m + 1]
        out[kmax - m : kmax + 1] = np.conj(self.coeffs[: m + 1])[::-1]
        return out

    def shifted(self, theta: float) -> "CircularPrior":
        """The prior ``p(phi - theta)``."""
        k = np.arange(self.coeffs.size)
        return CircularPrior(self.coeffs * np.exp(-1j * k * theta), label=self.label)


def _density_on_grid(coeffs: np.ndarray, points: int) -> np.ndarray:
    """Density at ``2 pi j / points`` for ``j = 0..points-1`` via one inverse FFT."""
    weights = np.zeros(points, dtype=complex)
    weights[0] = 1.0
    weights[1 : coeffs.size] = 2.0 * coeffs[1:]
    return points * np.fft.ifft(weights).real / (2 * np.pi)


def _raw_density(coeffs: np.ndarray, phi: np.ndarray, chunk: int = 1 << 22) -> np.ndarray:
    k = np.arange(1, coeffs.size)
    flat_phi = phi.ravel()
    series = np.empty(flat_phi.size, dtype=complex)
    step = max(1, chunk // max(1, k.size))
    for start in range(0, flat_phi.size, step):
        part = flat_phi[start : start + step]
        series[start : start + step] = np.exp(1j * np.multiply.outer(part, k)) @ coeffs[1:]
    return ((1.0 + 2.0 * np.real(series)) / (2 * np.pi)).reshape(phi.shape)


def diffusive_prior(t: float, tol: float = DEFAULT_TOL, min_order: int = 0) -> CircularPrior:
    """Heat-kernel prior on the circle, ``p_k = exp(-k^2 t)``.

    The series is cut at the smallest K with ``exp(-(K+1)^2 t) < tol``, but
    never below ``min_order`` (pass ``N + 1`` for an N-photon problem).
    """
    if not t > 0:
        raise ValueError(f"diffusion time must be positive, got {t}")
    if not 0 < tol < 1:
        raise ValueError(f"tol must lie in (0, 1), got {tol}")
    cap = max(MAX_ORDER, min_order)
    # exp(-(K+1)^2 t) < tol  <=>  K + 1 > sqrt(-ln(tol) / t); start just below and walk up
    k = min(cap, max(0, math.floor(math.sqrt(-math.log(tol) / t)) - 2))
    while k < cap and math.exp(-((k + 1) ** 2) * t) >= tol:
        k += 1
    if math.exp(-((k + 1) ** 2) * t) >= tol:
        raise ValueError(f"t={t:g} needs more than {cap} Fourier terms at tol={tol:g}")
    k = max(k, min_order)
    ks = np.arange(k + 1)
    return CircularPrior(
        np.exp(-(ks**2) * t),
        label=f"diffusive(t={t:g})",
        origin={"type": "diffusive", "t": t, "tol": tol},
    )


def uniform_prior() -> CircularPrior:
    return CircularPrior(np.ones(1), label="uniform", origin={"type": "uniform"})


def from_coefficients(coeffs, label: str = "fourier") -> CircularPrior:
    """Prior from an explicit list ``p_0..p_K`` (complex entries allowed)."""
    return CircularPrior(np.asarray(coeffs, dtype=complex), label=label)


def density_at(prior: CircularPrior, phi):
    """Evaluate the truncated density at ``phi`` (scalar or array).

    Values in ``[-POSITIVITY_EPS, 0)`` are clamped to zero; anything lower
    means the coefficients do not describe a density.
    """
    phi_arr = np.asarray(phi, dtype=float)
    values = _raw_density(prior.coeffs, phi_arr)
    if np.any(values < -POSITIVITY_EPS):
        raise ValueError("negative density: invalid coefficient sequence")
    values = np.maximum(values, 0.0)
    return float(values) if np.ndim(values) == 0 else values


def prior_uncertainty(prior: CircularPrior) -> float:
    """``sqrt(int 4 sin^2(phi/2) p(phi) dphi) = sqrt(2 - 2 Re p_1)``."""
    return math.sqrt(max(0.0, 2.0 - 2.0 * prior.coefficient(1).real))


def prior_to_dict(prior: CircularPrior) -> dict[str, Any]:
    if prior.origin is not None:
        return dict(prior.origin)
    return {"type": "fourier", "coeffs": [[c.real, c.imag] for c in prior.coeffs.tolist()]}


def prior_from_dict(data: dict[str, Any], min_order: int = 0) -> CircularPrior:
    kind = data.get("type")
    if kind == "diffusive":
        return diffusive_prior(float(data["t"]), float(data.get("tol", DEFAULT_TOL)), min_order)
    if kind == "uniform":
        return uniform_prior()
    if kind == "fourier":
        coeffs = [complex(*pair) if isinstance(pair, (list, tuple)) else complex(pair)
                  for pair in data["coeffs"]]
        return from_coefficients(coeffs)
    raise ValueError(f"unknown prior type {kind!r}")
