"""Probe states on the (N+1)-dimensional phase-shift eigenbasis |0>..|N>."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Any

import numpy as np

NORM_TOL = 1e-12


def _fix_gauge(amps: np.ndarray) -> np.ndarray:
    """Rephase so the first non-negligible amplitude is real and positive."""
    nz = np.flatnonzero(np.abs(amps) > 1e-14)
    if nz.size:
        amps = amps * np.exp(-1j * np.angle(amps[nz[0]]))
        amps[nz[0]] = amps[nz[0]].real
    return amps


@dataclass(frozen=True, eq=False)
class ProbeState:
    """Pure state ``sum_n alpha_n |n>``."""

    amplitudes: np.ndarray
    label: str = ""

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=complex).ravel()
        if a.size == 0:
            raise ValueError("empty amplitude vector")
        if abs(np.vdot(a, a).real - 1.0) > NORM_TOL:
            raise ValueError("amplitudes are not normalized; use from_amplitudes()")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def n(self) -> int:
        """Photon number N (dimension minus one)."""
        return self.amplitudes.size - 1


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Mixed probe state ``rho`` with entries ``rho[n, m] = <n|rho|m>``."""

    entries: np.ndarray
    label: str = ""

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise ValueError(f"density matrix must be square, got shape {rho.shape}")
        if np.abs(rho - rho.conj().T).max() > 1e-12:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > 1e-12:
            raise ValueError("density matrix trace differs from 1")
        if np.linalg.eigvalsh(rho).min() < -1e-10:
            raise ValueError("density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)

    @property
    def n(self) -> int:
        return self.entries.shape[0] - 1


def from_amplitudes(raw, label: str = "amplitudes") -> ProbeState:
    """Normalized copy of ``raw``; N is ``len(raw) - 1``."""
    a = np.asarray(raw, dtype=complex).ravel()
    norm = np.linalg.norm(a)
    if a.size == 0 or norm == 0:
        raise ValueError("cannot normalize a zero vector")
    return ProbeState(_fix_gauge(a / norm), label=label)


def _check_n(n: int) -> None:
    if int(n) != n or n < 1:
        raise ValueError(f"photon number must be a positive integer, got {n}")


def noon(n: int) -> ProbeState:
    """``(|0> + |N>)/sqrt(2)``."""
    _check_n(n)
    a = np.zeros(n + 1)
    a[0] = a[n] = 1.0
    return from_amplitudes(a, label="noon")


def berry_wiseman(n: int) -> ProbeState:
    """Sine-profile state maximizing ``sum_n |alpha_n alpha_{n+1}|``.

    ``alpha_n = sqrt(2/(N+2)) sin((n+1) pi/(N+2))``, the Perron eigenvector of
    the tridiagonal matrix with 1/2 on both off-diagonals.
    """
    _check_n(n)
    k = np.arange(n + 1)
    return from_amplitudes(np.sin((k + 1) * np.pi / (n + 2)), label="bw")


def classical_binomial(n: int) -> ProbeState:
    """``alpha_k = sqrt(C(N, k) / 2^N)``, i.e. N independent photons."""
    _check_n(n)
    return from_amplitudes(np.sqrt([comb(n, k) / 2.0**n for k in range(n + 1)]), label="binomial")


def flat(n: int) -> ProbeState:
    _check_n(n)
    return from_amplitudes(np.ones(n + 1), label="flat")


def basis_state(n: int, index: int) -> ProbeState:
    """Fock-like state |index> in dimension N+1 (N may be 0)."""
    if not 0 <= index <= n:
        raise ValueError("basis index out of range")
    a = np.zeros(n + 1)
    a[index] = 1.0
    return from_amplitudes(a, label=f"basis{index}")


def pure_to_density(psi: ProbeState) -> DensityMatrix:
    a = psi.amplitudes
    return DensityMatrix(np.outer(a, a.conj()), label=psi.label)


def as_density(state: ProbeState | DensityMatrix) -> DensityMatrix:
    return pure_to_density(state) if isinstance(state, ProbeState) else state


def random_state(n: int, rng: np.random.Generator) -> ProbeState:
    """Haar-random pure state of dimension ``n + 1``."""
    z = rng.standard_normal(n + 1) + 1j * rng.standard_normal(n + 1)
    return from_amplitudes(z, label="random")


_FAMILIES = {"noon": noon, "bw": berry_wiseman, "binomial": classical_binomial, "flat": flat}


def named_state(name: str, n: int) -> ProbeState:
    try:
        return _FAMILIES[name](n)
    except KeyError:
        raise ValueError(f"unknown state family {name!r}") from None


def _pairs(values) -> np.ndarray:
    return np.array(
        [complex(*v) if isinstance(v, (list, tuple)) else complex(v) for v in values]
    )


def state_from_dict(data: dict[str, Any]) -> ProbeState | DensityMatrix:
    kind = data.get("type")
    if kind in _FAMILIES:
        return named_state(kind, int(data["n"]))
    if kind == "amplitudes":
        return from_amplitudes(_pairs(data["values"]))
    if kind == "density":
        return DensityMatrix(np.array([_pairs(row) for row in data["matrix"]]), label="density")
    raise ValueError(f"unknown state type {kind!r}")


def state_to_dict(state: ProbeState | DensityMatrix) -> dict[str, Any]:
    if isinstance(state, DensityMatrix):
        return {
            "type": "density",
            "matrix": [[[z.real, z.imag] for z in row] for row in state.entries.tolist()],
        }
    return {"type": "amplitudes", "values": [[z.real, z.imag] for z in state.amplitudes.tolist()]}
