"""
Tests for Gibbs ensembles, observation vectors and the thermal oracle.
"""

import pytest
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np
from scipy import linalg

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.errors import ArgumentError, InternalError
from src.models.operators import OperatorSpec, PauliLabel, combine
from src.physics.gge import (
    ChargeSet,
    ThermalOracle,
    charge_densities,
    fit_gibbs_multiplier,
    fit_lagrange_multipliers,
    gge_state,
    gibbs_from_generator,
    observe,
    sample_lagrange,
    thermal_oracle,
)
from src.physics.pauli import build_dense, ising_charges, ising_hamiltonian


class TestGibbsStates:
    """Tests for GGE density matrices."""

    def test_zero_multipliers_give_maximally_mixed_state(self):
        """lambda = 0 gives the identity over 2^L."""
        L = 5
        state = gge_state(ising_charges(3), [0.0, 0.0, 0.0], L)
        np.testing.assert_allclose(state.rho, np.eye(2 ** L) / 2 ** L, atol=1e-14)

    def test_state_is_normalized_hermitian_and_positive(self):
        """Random multipliers give a valid density matrix."""
        rng = np.random.default_rng(3)
        state = gge_state(ising_charges(3), rng.uniform(-2, 2, 3), 6)
        rho = state.rho
        assert abs(np.trace(rho) - 1) < 1e-12
        assert np.max(np.abs(rho - rho.conj().T)) < 1e-14
        assert np.linalg.eigvalsh(rho).min() > -1e-12

    def test_gibbs_state_matches_matrix_exponential(self):
        """A single multiplier reproduces expm(lambda H) / Z."""
        L = 6
        H = build_dense(ising_hamiltonian(), L).matrix
        expected = linalg.expm(-0.7 * H)
        expected /= np.trace(expected)
        rho = gge_state([ising_hamiltonian()], [-0.7], L).rho
        np.testing.assert_allclose(rho, expected, atol=1e-12)

    def test_large_multipliers_do_not_overflow(self):
        """Spectrum shifting keeps |lambda| = 40 finite."""
        rho = gge_state([ising_hamiltonian()], [40.0], 6).rho
        assert np.all(np.isfinite(rho))
        assert abs(np.trace(rho) - 1) < 1e-12

    def test_identity_shift_leaves_state_unchanged(self):
        """Adding c * identity to a charge does not change rho."""
        L = 6
        H = ising_hamiltonian()
        shifted = combine([H, OperatorSpec.from_coefficients({"0": 1.0})], [1.0, 2.5])
        a = gge_state([H], [0.9], L).rho
        b = gge_state([shifted], [0.9], L).rho
        np.testing.assert_allclose(a, b, atol=1e-12)

    def test_energy_increases_with_multiplier(self):
        """<H> is increasing in lambda_0."""
        L = 6
        charge_set = ChargeSet([ising_hamiltonian()], L)
        energies = [charge_set.expectations(charge_set.state([lam]).rho)[0]
                    for lam in np.linspace(-2, 2, 9)]
        assert np.all(np.diff(energies) > 0)

    def test_non_hermitian_generator(self):
        """A non-Hermitian generator is an internal error."""
        with pytest.raises(InternalError):
            gibbs_from_generator(np.array([[0, 1], [0, 0]], dtype=complex))

    def test_chain_too_long(self):
        """L = 13 exceeds the GGE limit."""
        with pytest.raises(ArgumentError):
            gge_state([ising_hamiltonian()], [1.0], 13)

    def test_multiplier_count_mismatch(self):
        """Two multipliers for one charge are rejected."""
        with pytest.raises(ArgumentError):
            gge_state([ising_hamiltonian()], [1.0, 2.0], 4)

    def test_charges_commute_check(self):
        """check_commuting accepts the Ising charges."""
        state = gge_state(ising_charges(3), [0.1, 0.2, 0.3], 6, check_commuting=True)
        assert state.charge_ids == ["C0", "C1", "C2"]


class TestObservations:
    """Tests for Pauli-string observation vectors."""

    def test_maximally_mixed_state_observes_zero(self):
        """Every traceless string has zero expectation at infinite temperature."""
        L = 4
        obs = observe(np.eye(2 ** L) / 2 ** L, 3)
        assert obs.values.shape == (48,)
        np.testing.assert_allclose(obs.values, 0.0, atol=1e-15)

    def test_all_up_product_state(self):
        """|up...up> has <z> = 1, <zz> = 1 and <x> = 0."""
        L = 4
        rho = np.zeros((2 ** L, 2 ** L))
        rho[0, 0] = 1.0
        obs = observe(rho, 2)
        assert obs["z"] == pytest.approx(1.0)
        assert obs["zz"] == pytest.approx(1.0)
        assert obs["x"] == pytest.approx(0.0)

    def test_charge_density_equals_weighted_observations(self):
        """<C_i>/L is the coefficient-weighted sum of observed strings."""
        L = 6
        charges = ising_charges(3)
        state = gge_state(charges, [0.4, -0.3, 0.2], L)
        obs = observe(state, 3)
        densities = charge_densities(state, charges)
        for charge, density in zip(charges, densities):
            from_obs = sum(c * obs[label.trimmed().symbols] for c, label in charge.terms)
            assert density == pytest.approx(from_obs, abs=1e-10)

    def test_support_larger_than_chain(self):
        """Support beyond L is rejected."""
        with pytest.raises(ArgumentError):
            observe(np.eye(4) / 4, 3)

    def test_non_power_of_two_dimension(self):
        """A 3x3 matrix is not a spin-chain state."""
        with pytest.raises(ArgumentError):
            observe(np.eye(3) / 3, 1)

    def test_provenance_records_multipliers(self):
        """Observations of a GGE state carry the multipliers."""
        state = gge_state([ising_hamiltonian()], [0.5], 4)
        obs = observe(state, 2)
        assert obs.provenance["lagrange"] == [0.5]
        assert obs.provenance["L"] == 4


class TestThermalOracle:
    """Tests for the thermal oracle used in reconstruction."""

    def test_zero_coefficients_give_zero_observations(self):
        """a = 0 is the infinite-temperature state."""
        spec = OperatorSpec.from_coefficients({"zz": 0.0, "x": 0.0}, drop_zeros=False)
        np.testing.assert_allclose(thermal_oracle(spec, 3, 6).values, 0.0, atol=1e-15)

    def test_oracle_matches_gibbs_state_at_unit_multiplier(self):
        """The oracle is the Gibbs state at lambda_0 = 1."""
        L = 6
        H = ising_hamiltonian()
        expected = observe(gge_state([H], [1.0], L), 3).values
        np.testing.assert_allclose(thermal_oracle(H, 3, L).values, expected, atol=1e-12)

    def test_cached_oracle_agrees_and_counts_calls(self):
        """ThermalOracle reproduces thermal_oracle and counts evaluations."""
        L = 6
        oracle = ThermalOracle([PauliLabel("zz"), PauliLabel("x00")], L, 3)
        values = oracle([0.8, -0.4])
        spec = OperatorSpec.from_coefficients({"zz": 0.8, "x": -0.4})
        np.testing.assert_allclose(values, thermal_oracle(spec, 3, L).values, atol=1e-12)
        assert oracle.calls == 1
        assert [c.symbols for c in oracle.candidates] == ["zz", "x"]

    def test_call_count_is_exact_across_threads(self):
        """Evaluations from worker threads are all counted."""
        oracle = ThermalOracle([PauliLabel("zz"), PauliLabel("x")], 4, 2)
        with ThreadPoolExecutor(max_workers=8) as pool:
            list(pool.map(oracle, [[0.1 * i, 0.3] for i in range(64)]))
        assert oracle.calls == 64


class TestMultiplierFits:
    """Tests for sampling and inverting Lagrange multipliers."""

    def test_sampling_range(self):
        """Multipliers are uniform in [-2/J, 2/J]."""
        lam = sample_lagrange(500, 3, np.random.default_rng(0), J=2.0)
        assert lam.shape == (500, 3)
        assert np.all(np.abs(lam) <= 1.0)

    def test_gibbs_multiplier_round_trip(self):
        """fit_gibbs_multiplier inverts the energy of a Gibbs state."""
        L = 6
        H = build_dense(ising_hamiltonian(), L).matrix
        rho = gge_state([ising_hamiltonian()], [-0.7], L).rho
        energy = float(np.real(np.trace(rho @ H)))
        assert fit_gibbs_multiplier(H, energy) == pytest.approx(-0.7, abs=1e-8)

    def test_energy_outside_spectrum(self):
        """An energy above the largest eigenvalue has no multiplier."""
        H = build_dense(ising_hamiltonian(), 4).matrix
        with pytest.raises(ArgumentError):
            fit_gibbs_multiplier(H, 100.0)

    def test_lagrange_fit_recovers_multipliers(self):
        """Two charge expectations determine two multipliers."""
        L = 6
        charge_set = ChargeSet(ising_charges(2), L)
        truth = [0.6, -0.4]
        targets = charge_set.expectations(charge_set.state(truth).rho)
        fitted = fit_lagrange_multipliers(charge_set, targets)
        np.testing.assert_allclose(fitted.values, truth, atol=1e-6)
