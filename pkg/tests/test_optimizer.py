import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import unitary_group

from bayesphase.core import PhaseMeasurement, build_r10, evaluate_strategy, optimal_cost, optimal_measurement
from bayesphase.optimizer import (
    OptimizerConfig,
    fidelity_operator,
    initial_states,
    optimize_probe,
    result_to_dict,
)
from bayesphase.prior import diffusive_prior, from_coefficients, uniform_prior
from bayesphase.states import berry_wiseman, classical_binomial, flat, noon, random_state


def random_prior(rng, order):
    # convex mixture of shifted heat kernels: a valid, generally asymmetric density;
    # order >= 28 keeps the dropped tail below e^{-0.04 * 29^2} ~ 1e-15
    k = np.arange(max(order, 28) + 1)
    coeffs = sum(w * np.exp(-t * k**2 - 1j * s * k)
                 for w, t, s in zip(rng.dirichlet(np.ones(3)), rng.uniform(0.04, 2, 3), rng.uniform(-np.pi, np.pi, 3)))
    coeffs[0] = 1
    return from_coefficients(coeffs)


@given(st.integers(1, 9), st.integers(0, 2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_operator_expectation_is_fidelity(n, seed):
    rng = np.random.default_rng(seed)
    psi = random_state(n, rng)
    prior = random_prior(rng, n + 3)
    m = PhaseMeasurement(unitary_group.rvs(n + 1, random_state=rng), rng.uniform(-np.pi, np.pi, n + 1))
    op = fidelity_operator(m, prior)
    value = np.vdot(psi.amplitudes, op @ psi.amplitudes)
    assert abs(value.imag) < 1e-13
    assert value.real == pytest.approx(evaluate_strategy(psi, prior, m).fidelity, abs=1e-12)
    assert np.abs(op - op.conj().T).max() < 1e-13
    eig = np.linalg.eigvalsh(op)
    assert eig.min() >= -1e-12 and eig.max() <= 1 + 1e-12


@pytest.mark.parametrize("n", [1, 3, 10])
def test_operator_at_uniform_prior_is_maximized_by_bw(n):
    prior = uniform_prior()
    m = optimal_measurement(build_r10(berry_wiseman(n), prior))
    vals, vecs = np.linalg.eigh(fidelity_operator(m, prior))
    assert vals[-1] == pytest.approx(0.5 + 0.5 * math.cos(math.pi / (n + 2)), abs=1e-12)
    assert abs(np.vdot(vecs[:, -1], berry_wiseman(n).amplitudes)) ** 2 == pytest.approx(1, abs=1e-12)


def test_config_validation():
    for kwargs in ({"tol": 0}, {"max_iter": 0}, {"restarts": 0}):
        with pytest.raises(ValueError):
            OptimizerConfig(**kwargs)


def test_initial_states_include_analytic_families():
    starts = initial_states(6, OptimizerConfig(restarts=7, seed=3))
    assert [s.label for s in starts] == ["bw", "noon", "flat", "binomial", "random", "random", "random"]
    again = initial_states(6, OptimizerConfig(restarts=7, seed=3))
    assert all(np.array_equal(a.amplitudes, b.amplitudes) for a, b in zip(starts, again))


def test_global_regime_recovers_bw():
    result = optimize_probe(10, diffusive_prior(30, min_order=11))
    overlap = abs(np.vdot(result.state.amplitudes, berry_wiseman(10).amplitudes)) ** 2
    assert overlap >= 1 - 1e-6
    assert result.cost == pytest.approx(2 * (1 - math.cos(math.pi / 12)), abs=1e-8)


def test_local_regime_recovers_noon():
    result = optimize_probe(3, diffusive_prior(0.02, min_order=4))
    w = np.abs(result.state.amplitudes) ** 2
    assert w[0] + w[3] >= 0.99
    assert result.converged


@pytest.mark.parametrize("t", [0.01, 0.1, 0.5, 3.0])
def test_dominates_fixed_candidates_and_ascends(t):
    n = 6
    prior = diffusive_prior(t, min_order=n + 1)
    result = optimize_probe(n, prior, OptimizerConfig(restarts=6, seed=1))
    assert np.all(np.diff(result.fidelity_trace) >= -1e-13)
    for psi in (noon(n), berry_wiseman(n), classical_binomial(n), flat(n)):
        assert result.cost <= optimal_cost(build_r10(psi, prior)) + 1e-10
    assert result.cost == pytest.approx(optimal_cost(build_r10(result.state, prior)), abs=1e-12)


def test_converged_state_is_its_own_fixed_point():
    prior = diffusive_prior(0.2, min_order=11)
    result = optimize_probe(10, prior)
    assert result.converged
    m = optimal_measurement(build_r10(result.state, prior))
    _, vecs = np.linalg.eigh(fidelity_operator(m, prior))
    assert abs(np.vdot(vecs[:, -1], result.state.amplitudes)) ** 2 >= 1 - 1e-9


def test_iteration_budget_reported():
    result = optimize_probe(10, diffusive_prior(0.2, min_order=11), OptimizerConfig(max_iter=2))
    assert result.iterations <= 2
    assert not result.converged
    assert len(result.fidelity_trace) == result.iterations + 1


def test_seeded_runs_are_identical():
    prior = diffusive_prior(0.3, min_order=6)
    cfg = OptimizerConfig(restarts=8, seed=42)
    a, b = optimize_probe(5, prior, cfg), optimize_probe(5, prior, cfg)
    assert a.fidelity_trace == b.fidelity_trace
    assert np.array_equal(a.state.amplitudes, b.state.amplitudes)


def test_result_json():
    result = optimize_probe(2, diffusive_prior(0.5, min_order=3))
    data = result_to_dict(result)
    assert set(data) == {"state", "cost", "iterations", "converged", "fidelity_trace"}
    assert data["state"]["type"] == "amplitudes" and len(data["state"]["values"]) == 3
