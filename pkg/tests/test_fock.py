import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kposim.errors import ParameterError, TruncationError, TruncationWarning
from kposim.fock import (
    FockSpace,
    OperatorMatrix,
    annihilation_op,
    cat_state,
    coherent_state,
    creation_op,
    displacement_op,
    fock_state,
    identity_op,
    number_op,
    parity_op,
    product_state,
    tensor,
)


def overlap_series(alpha, beta, n_terms=200):
    """Independent oracle: <beta|alpha> by direct Fock-series summation."""
    total = 0.0 + 0.0j
    term = np.exp(-(abs(alpha) ** 2 + abs(beta) ** 2) / 2.0)
    total += term
    for n in range(1, n_terms):
        term *= np.conj(beta) * alpha / n
        total += term
    return total


class TestSpace:
    def test_dim(self):
        assert FockSpace(30).dim == 30
        assert FockSpace(30, 2).dim == 900

    def test_invalid(self):
        with pytest.raises(ParameterError):
            FockSpace(1)
        with pytest.raises(ParameterError):
            FockSpace(10, 3)


class TestLadder:
    def test_annihilates_vacuum(self):
        space = FockSpace(8)
        a = annihilation_op(space)
        assert np.allclose(a.mat @ fock_state(space, 0).vec, 0.0)

    def test_ladder_entry(self):
        space = FockSpace(8)
        a = annihilation_op(space)
        out = a.mat @ fock_state(space, 3).vec
        expected = math.sqrt(3) * fock_state(space, 2).vec
        assert np.allclose(out, expected)

    def test_commutator_truncation(self):
        space = FockSpace(5)
        a = annihilation_op(space)
        comm = a.mat @ a.dag().mat - a.dag().mat @ a.mat
        expected = np.eye(5, dtype=complex)
        expected[4, 4] = -4.0
        assert np.allclose(comm, expected)

    def test_number_eigenvalues_below_cutoff(self):
        space = FockSpace(12)
        n_op = number_op(space)
        for n in range(space.n_max - 1):
            v = fock_state(space, n).vec
            assert np.allclose(n_op.mat @ v, n * v)

    def test_mode_out_of_range(self):
        with pytest.raises(ParameterError):
            annihilation_op(FockSpace(5), mode=1)

    def test_two_mode_embedding(self):
        space = FockSpace(4, 2)
        a0 = annihilation_op(space, 0)
        a_single = annihilation_op(FockSpace(4)).mat
        assert np.allclose(a0.mat, np.kron(a_single, np.eye(4)))
        a1 = annihilation_op(space, 1)
        assert np.allclose(a1.mat, np.kron(np.eye(4), a_single))


class TestCoherent:
    def test_vacuum(self):
        space = FockSpace(10)
        assert np.allclose(coherent_state(space, 0.0).vec, fock_state(space, 0).vec)

    def test_opposite_overlap(self):
        space = FockSpace(30)
        alpha = math.sqrt(7)
        got = abs(coherent_state(space, alpha).overlap(coherent_state(space, -alpha)))
        want = abs(overlap_series(alpha, -alpha))
        assert want == pytest.approx(np.exp(-14), rel=1e-10)
        assert got == pytest.approx(want, abs=1e-8)

    def test_poisson_mean(self):
        space = FockSpace(30)
        psi = coherent_state(space, math.sqrt(7))
        # oracle: sum n |c_n|^2
        mean = float(np.sum(np.arange(30) * np.abs(psi.vec) ** 2))
        assert mean == pytest.approx(7.0, abs=1e-6)
        assert psi.expect(number_op(space)).real == pytest.approx(mean, abs=1e-12)

    def test_truncation_warning(self):
        with pytest.warns(TruncationWarning):
            coherent_state(FockSpace(6), 3.0)

    def test_truncation_strict(self):
        with pytest.raises(TruncationError):
            coherent_state(FockSpace(6), 3.0, strict=True)

    @settings(max_examples=25, deadline=None)
    @given(
        ar=st.floats(-2.6, 2.6),
        ai=st.floats(-2.6, 2.6),
        br=st.floats(-2.6, 2.6),
        bi=st.floats(-2.6, 2.6),
    )
    def test_overlap_law(self, ar, ai, br, bi):
        # |<beta|alpha>|^2 = exp(-|alpha-beta|^2) within 1e-6 at n_max=30
        space = FockSpace(30)
        alpha, beta = complex(ar, ai), complex(br, bi)
        got = abs(coherent_state(space, alpha).overlap(coherent_state(space, beta))) ** 2
        assert got == pytest.approx(np.exp(-abs(alpha - beta) ** 2), abs=1e-6)


class TestCat:
    def test_even_cat_alpha_zero(self):
        space = FockSpace(10)
        assert np.allclose(cat_state(space, 0.0, "even").vec, fock_state(space, 0).vec)

    def test_odd_cat_alpha_zero_degenerate(self):
        with pytest.raises(ParameterError):
            cat_state(FockSpace(10), 0.0, "odd")

    def test_even_support(self):
        psi = cat_state(FockSpace(30), math.sqrt(7), "even")
        assert np.all(psi.vec[1::2] == 0.0)

    def test_odd_parity_expectation(self):
        space = FockSpace(30)
        psi = cat_state(space, math.sqrt(7), "odd")
        assert psi.expect(parity_op(space)).real == pytest.approx(-1.0, abs=1e-12)

    def test_even_cat_matches_kerr_ground_state(self):
        # dense eigensolver oracle on the single-KPO Hamiltonian, built inline
        n_max, p = 30, 7.0
        space = FockSpace(n_max)
        a = annihilation_op(space).mat
        ad = a.conj().T
        h = 0.5 * (ad @ ad @ a @ a) - (p / 2.0) * (ad @ ad + a @ a)
        vals, vecs = np.linalg.eigh(h)
        # ground doublet is near-degenerate; project the cat onto its span
        cat = cat_state(space, math.sqrt(p), "even").vec
        sub = vecs[:, :2]
        proj = sub @ (sub.conj().T @ cat)
        assert float(np.linalg.norm(proj) ** 2) > 0.99


class TestDisplacement:
    def test_identity_at_zero(self):
        space = FockSpace(12)
        assert np.allclose(displacement_op(space, 0.0).mat, np.eye(12))

    def test_displaced_vacuum_is_coherent(self):
        space = FockSpace(30)
        xi = 1.0 + 0.5j
        psi = displacement_op(space, xi) @ fock_state(space, 0)
        fid = abs(psi.overlap(coherent_state(space, xi))) ** 2
        assert fid > 1 - 1e-8

    def test_unitarity_interior(self):
        space = FockSpace(30)
        xi = 1.0 + 0.5j
        prod = displacement_op(space, -xi).mat @ displacement_op(space, xi).mat
        # interior block: truncation corrupts only the top of the ladder
        k = 15
        assert np.abs(prod[:k, :k] - np.eye(30)[:k, :k]).max() < 1e-8

    def test_norm_preserving_on_low_states(self):
        space = FockSpace(40)
        psi = coherent_state(space, 0.8)
        out = displacement_op(space, 0.7 - 0.3j) @ psi
        assert out.norm() == pytest.approx(1.0, abs=1e-9)


class TestParity:
    def test_signs(self):
        space = FockSpace(8)
        p_op = parity_op(space)
        assert np.allclose(p_op.mat @ fock_state(space, 0).vec, fock_state(space, 0).vec)
        assert np.allclose(p_op.mat @ fock_state(space, 3).vec, -fock_state(space, 3).vec)

    def test_squares_to_identity(self):
        space = FockSpace(8)
        p_op = parity_op(space)
        assert np.allclose((p_op @ p_op).mat, np.eye(8))


class TestTensor:
    def test_identity(self):
        space = FockSpace(5)
        eye = identity_op(space)
        assert np.allclose(tensor(eye, eye).mat, np.eye(25))

    def test_hopping_term_vs_index_oracle(self):
        # independent index-arithmetic construction of a1 a2^dag
        n = 6
        space = FockSpace(n)
        a = annihilation_op(space)
        ad = creation_op(space)
        got = (tensor(a, identity_op(space)) @ tensor(identity_op(space), ad)).mat
        want = np.zeros((n * n, n * n), dtype=complex)
        for m1 in range(n):
            for m2 in range(n):
                # a1 a2^dag |n1,n2> = sqrt(n1) sqrt(n2+1) |n1-1,n2+1>
                if m1 + 1 < n and m2 - 1 >= 0:
                    want[m1 * n + m2, (m1 + 1) * n + (m2 - 1)] = math.sqrt(
                        (m1 + 1) * m2
                    )
        assert np.allclose(got, want)

    def test_dimension_mismatch(self):
        with pytest.raises(ParameterError):
            tensor(identity_op(FockSpace(3)), identity_op(FockSpace(4)))

    @settings(max_examples=20, deadline=None)
    @given(st.integers(0, 10**6))
    def test_mixed_product_property(self, seed):
        # tensor(A,B) @ tensor(C,D) == tensor(AC, BD)
        rng = np.random.default_rng(seed)
        space = FockSpace(4)
        mats = [
            OperatorMatrix(space, rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
            for _ in range(4)
        ]
        a, b, c, d = mats
        lhs = (tensor(a, b) @ tensor(c, d)).mat
        rhs = tensor(a @ c, b @ d).mat
        assert np.abs(lhs - rhs).max() < 1e-12 * max(1.0, np.abs(rhs).max())


class TestProductState:
    def test_kron_order(self):
        space = FockSpace(4)
        psi = product_state(fock_state(space, 1), fock_state(space, 2))
        want = np.zeros(16, dtype=complex)
        want[1 * 4 + 2] = 1.0
        assert np.allclose(psi.vec, want)
