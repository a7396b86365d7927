"""
Tests for candidate ranking, the Newton coupling solve and full reconstruction.
"""

import pytest
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.data import sample_gge_dataset
from src.errors import ArgumentError, NumericalError, PreconditionError, ReconstructionFailure
from src.models.dataset import Dataset
from src.models.network import SweepPoint, SweepResult
from src.models.operators import PauliLabel
from src.models.states import ObservationVector
from src.physics.gge import gge_state, observe
from src.physics.pauli import enumerate_support_strings, ising_hamiltonian
from src.reconstruction.hamiltonian import (
    check_sweep_evidence,
    newton_solve,
    rank_candidates,
    reconstruct,
)

ONE_LATENT = SweepResult([SweepPoint(0, [1.0], [0]), SweepPoint(1, [1e-5], [0])])


@pytest.fixture(scope="module")
def gibbs_data():
    return sample_gge_dataset(1, 60, 6, support=3, seed=0)


def rotation(angle: float) -> np.ndarray:
    return np.array([[np.cos(angle), -np.sin(angle)], [np.sin(angle), np.cos(angle)]])


class TestNewtonSolve:
    """Tests for the per-row coupling solve."""

    def test_recovers_ising_couplings(self):
        """Thermal Ising data gives a_x / a_zz = h_x and eliminates a spurious term."""
        L = 8
        target = observe(gge_state([ising_hamiltonian(1.0, 0.6)], [1.0], L), 3)
        result = newton_solve(["zz", "x", "zxz"], target, L)
        assert result.ratio("x", "zz") == pytest.approx(0.6, abs=1e-4)
        assert result.coefficients["zz"] == pytest.approx(1.0, abs=1e-4)
        assert "zxz" in result.eliminated
        assert result.residual <= 1e-9

    def test_zero_target_needs_no_iterations(self):
        """Zero observations are solved by a = 0 immediately."""
        labels = enumerate_support_strings(3)
        target = ObservationVector(np.zeros(48), 3, labels)
        result = newton_solve(["zz", "x"], target, 6)
        assert result.iterations == 0
        assert result.coefficients == {"zz": 0.0, "x": 0.0}

    def test_too_many_candidates(self):
        """More than six candidates are refused."""
        target = ObservationVector(np.zeros(48), 3, enumerate_support_strings(3))
        with pytest.raises(ArgumentError):
            newton_solve(["x", "y", "z", "xx", "yy", "zz", "zxz"], target, 6)

    def test_candidate_wider_than_target(self):
        """Candidates must fit in the observation window."""
        target = ObservationVector(np.zeros(12), 2, enumerate_support_strings(2))
        with pytest.raises(ArgumentError):
            newton_solve(["zxz"], target, 6)

    def test_unreachable_target(self):
        """Observations no state can produce make the solve fail numerically."""
        labels = enumerate_support_strings(1)
        target = ObservationVector(np.array([0.95, 0.0, 0.95]), 1, labels)
        with pytest.raises(NumericalError):
            newton_solve(["x", "z"], target, 4)


class TestCandidateRanking:
    """Tests for ranking Pauli strings along the latent manifold."""

    def test_hamiltonian_terms_rank_high(self, gibbs_data):
        """<zz> changes along the thermal line, symmetry-forbidden strings do not."""
        latents = gibbs_data.annotation("lagrange")
        ranking = rank_candidates(gibbs_data, latents, "tangent", k=8)
        assert "zz0" in ranking.top(4)
        assert ranking.magnitudes["y00"] < 1e-10
        assert ranking.magnitudes["z00"] < 1e-10

    def test_rotation_invariance(self, gibbs_data):
        """Rotating the latent space leaves both ranking modes unchanged."""
        lam = gibbs_data.annotation("lagrange")[:, 0]
        latents = np.stack([lam, 0.5 * lam], axis=1)
        rotated = latents @ rotation(0.7).T
        for mode in ("tangent", "pca1"):
            a = rank_candidates(gibbs_data, latents, mode, k=8).magnitudes
            b = rank_candidates(gibbs_data, rotated, mode, k=8).magnitudes
            for label in a:
                assert a[label] == pytest.approx(b[label], abs=1e-10)

    def test_identical_rows_have_zero_magnitudes(self):
        """Rows that never change give an all-zero ranking."""
        labels = [str(s) for s in enumerate_support_strings(2)]
        ds = Dataset(values=np.full((20, 12), 0.3), support=2, labels=labels)
        ranking = rank_candidates(ds, np.linspace(0, 1, 20), "pca1", k=5)
        assert max(ranking.magnitudes.values()) == 0.0

    def test_unknown_mode(self, gibbs_data):
        """Only tangent and pca1 modes exist."""
        with pytest.raises(ArgumentError):
            rank_candidates(gibbs_data, gibbs_data.annotation("lagrange"), "umap")


class TestReconstruction:
    """Tests for the end-to-end reconstruction."""

    def test_gibbs_rows_give_ising_ratio(self):
        """Exact Gibbs rows reproduce h_x relative to the zz coupling."""
        ds = sample_gge_dataset(1, 24, 6, support=3, seed=1)
        result = reconstruct(ds, ds.annotation("lagrange"), 6, candidates=["zz", "x", "zxz"],
                             sweep=ONE_LATENT)
        assert result.reference == "zz"
        assert result.coefficients["zz"] == pytest.approx(1.0)
        assert result.coefficients["x"] == pytest.approx(0.6, abs=1e-4)
        assert "zxz" in result.eliminated
        assert result.n_converged + len(result.diagnostics["failed_rows"]) + result.n_low_signal == 24

    def test_sweep_evidence_required(self):
        """Without sweep evidence reconstruction refuses to run."""
        ds = sample_gge_dataset(1, 12, 4, support=2, seed=0)
        with pytest.raises(PreconditionError):
            reconstruct(ds, ds.annotation("lagrange"), 4, candidates=["zz", "x"])

    def test_weak_sweep_evidence(self):
        """A loss ratio above the limit is not evidence for one latent variable."""
        weak = SweepResult([SweepPoint(0, [1.0], [0]), SweepPoint(1, [0.5], [0])])
        with pytest.raises(PreconditionError):
            check_sweep_evidence(weak)
        assert check_sweep_evidence(ONE_LATENT) == pytest.approx(1e-5)

    def test_all_rows_failing(self):
        """Unreachable observations end in a reconstruction failure with diagnostics."""
        labels = [str(s) for s in enumerate_support_strings(1)]
        ds = Dataset(values=np.tile([0.95, 0.0, 0.95], (10, 1)), support=1, labels=labels)
        with pytest.raises(ReconstructionFailure) as info:
            reconstruct(ds, np.linspace(0, 1, 10), 4, candidates=["x", "z"], force=True)
        assert len(info.value.diagnostics["failed_rows"]) == 10
        assert info.value.diagnostics["forced"] is True

    def test_automatic_candidates_recover_ising_ratio(self):
        """Ranked candidates give x/zz = 0.6 and eliminate the terms absent from H."""
        ds = sample_gge_dataset(1, 60, 8, support=3, seed=0)
        result = reconstruct(ds, ds.annotation("lagrange"), 8, sweep=ONE_LATENT)
        assert {"zz", "x"} <= set(result.coefficients)
        assert result.ratio("x", "zz") == pytest.approx(0.6, abs=1e-4)
        assert {"z0z", "zzx", "xzz"} <= set(result.eliminated)
        assert result.n_converged + result.n_low_signal == 60

    def test_low_signal_rows_do_not_count_against_convergence(self):
        """Only rows that were attempted enter the converged fraction."""
        gibbs = sample_gge_dataset(1, 10, 6, support=3, seed=1)
        values = np.zeros((5, gibbs.dim))
        values[0] = gibbs.values[0]
        ds = Dataset(values=values, support=3, labels=list(gibbs.labels))
        result = reconstruct(ds, np.arange(5.0), 6, candidates=["zz", "x"], sweep=ONE_LATENT)
        assert result.n_low_signal == 4
        assert result.n_converged == 1
        assert result.n_rows == 5
