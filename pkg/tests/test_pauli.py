"""
Tests for Pauli-string enumeration, dense operators and Ising charges.
"""

import pytest
import sys
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).parent.parent))

from src.errors import ArgumentError
from src.models.operators import OperatorSpec, PauliLabel, combine
from src.physics.pauli import (
    PAULI,
    build_dense,
    embed_local,
    enumerate_support_strings,
    ising_charges,
    ising_hamiltonian,
    pauli_string_matrix,
    translation_operator,
)


class TestEnumeration:
    """Tests for canonical label enumeration."""

    def test_count_is_three_times_four_to_the_s_minus_one(self):
        """Support s gives 3 * 4^(s-1) labels."""
        for s in range(1, 5):
            assert len(enumerate_support_strings(s)) == 3 * 4 ** (s - 1)

    def test_support_three_order(self):
        """Labels are left-aligned and lexicographic over 0 < x < y < z."""
        labels = enumerate_support_strings(3)
        assert labels[0].symbols == "x00"
        assert labels[1].symbols == "x0x"
        assert labels[-1].symbols == "zzz"
        assert all(label.canonical for label in labels)
        keys = [label.sort_key() for label in labels]
        assert keys == sorted(keys)

    def test_support_out_of_range(self):
        """Support 0 and 7 are rejected."""
        with pytest.raises(ArgumentError):
            enumerate_support_strings(0)
        with pytest.raises(ArgumentError):
            enumerate_support_strings(7)

    def test_label_validation(self):
        """Unknown symbols and leading identities are rejected in specs."""
        with pytest.raises(ArgumentError):
            PauliLabel("xa")
        with pytest.raises(ArgumentError):
            OperatorSpec(terms=((1.0, "0z"),))

    def test_trim_and_pad(self):
        """Trimming drops trailing identities and padding restores them."""
        assert PauliLabel("zx00").trimmed().symbols == "zx"
        assert PauliLabel("zx").padded(4).symbols == "zx00"
        assert PauliLabel("000").trimmed().symbols == "0"


class TestDenseOperators:
    """Tests for dense Pauli matrices and translation sums."""

    def test_single_site_matrices(self):
        """Single-site strings reproduce the Pauli matrices."""
        for s in "xyz":
            np.testing.assert_allclose(pauli_string_matrix(PauliLabel(s), 1), PAULI[s])

    def test_two_site_string_is_kronecker_product(self):
        """'xz' on two sites is x (x) z with site 0 leftmost."""
        expected = np.kron(PAULI["x"], PAULI["z"])
        np.testing.assert_allclose(pauli_string_matrix(PauliLabel("xz"), 2), expected)

    def test_wrapping_placement_matches_embed_local(self):
        """A string at the last offset wraps onto site 0."""
        L = 4
        wrapped = pauli_string_matrix(PauliLabel("xz"), L, offset=3)
        local = embed_local(np.kron(PAULI["x"], PAULI["z"]), [3, 0], L)
        np.testing.assert_allclose(wrapped, local)

    def test_ising_hamiltonian_matches_manual_sum(self):
        """build_dense sums every term over all periodic offsets."""
        L = 5
        H = build_dense(ising_hamiltonian(1.0, 0.6, 0.3), L).matrix
        zz = np.kron(PAULI["z"], PAULI["z"])
        manual = sum(
            embed_local(zz, [j, j + 1], L)
            + 0.6 * embed_local(PAULI["x"], [j], L)
            + 0.3 * embed_local(PAULI["z"], [j], L)
            for j in range(L)
        )
        np.testing.assert_allclose(H, manual, atol=1e-12)

    def test_hamiltonian_is_hermitian_and_translation_invariant(self):
        """The Ising Hamiltonian is Hermitian and commutes with the shift."""
        L = 6
        H = build_dense(ising_hamiltonian(), L)
        T = translation_operator(L)
        assert H.is_hermitian()
        assert np.linalg.norm(T @ H.matrix - H.matrix @ T) < 1e-10

    def test_translation_operator_has_period_L(self):
        """T is a permutation with T^L = 1."""
        L = 5
        T = translation_operator(L)
        np.testing.assert_allclose(T @ T.T, np.eye(2 ** L))
        np.testing.assert_allclose(np.linalg.matrix_power(T, L), np.eye(2 ** L))

    def test_identity_term_adds_multiple_of_identity(self):
        """An identity label contributes coefficient * L on the diagonal."""
        L = 4
        spec = OperatorSpec.from_coefficients({"0": 0.5})
        np.testing.assert_allclose(build_dense(spec, L).matrix, 0.5 * L * np.eye(2 ** L))

    def test_size_limits(self):
        """Oversized chains and too-short periodic chains are rejected."""
        with pytest.raises(ArgumentError):
            build_dense(ising_hamiltonian(), 15)
        with pytest.raises(ArgumentError):
            build_dense(OperatorSpec.from_coefficients({"zxz": 1.0}), 3)

    def test_single_site_spec_on_one_site(self):
        """A single-site operator is valid on a one-site chain."""
        spec = OperatorSpec.from_coefficients({"x": 1.0})
        np.testing.assert_allclose(build_dense(spec, 1).matrix, PAULI["x"])

    def test_embed_local_rejects_overlap(self):
        """Overlapping target sites are an error."""
        with pytest.raises(ArgumentError):
            embed_local(np.eye(4), [0, 4], 4)


class TestIsingCharges:
    """Tests for the local conserved charges of the Ising chain."""

    @pytest.mark.parametrize("h_x", [0.6, 1.3])
    def test_charges_commute(self, h_x):
        """C0 ... C3 commute pairwise on a periodic chain."""
        L = 8
        matrices = [build_dense(c, L).matrix for c in ising_charges(4, 1.0, h_x)]
        for i in range(4):
            for j in range(i + 1, 4):
                a, b = matrices[i], matrices[j]
                assert np.linalg.norm(a @ b - b @ a) < 1e-9, (i, j)

    def test_charges_are_hermitian_and_independent(self):
        """Charges are Hermitian and not proportional to each other."""
        L = 7
        matrices = [build_dense(c, L).matrix for c in ising_charges(4)]
        flat = np.array([m.reshape(-1) for m in matrices])
        for m in matrices:
            assert np.allclose(m, m.conj().T)
        assert np.linalg.matrix_rank(flat) == 4

    def test_first_charge_is_hamiltonian(self):
        """C0 equals the Ising Hamiltonian."""
        c0 = ising_charges(1, 1.0, 0.6)[0]
        assert c0.coefficient_map() == {"zz": 1.0, "x": 0.6}

    def test_non_positive_charge_count(self):
        """At least one charge is required."""
        with pytest.raises(ArgumentError):
            ising_charges(0)

    def test_combine_merges_labels(self):
        """Combining specs adds coefficients of equal labels."""
        c = combine(ising_charges(1), [2.0])
        assert c.coefficient_map() == {"zz": 2.0, "x": 1.2}
