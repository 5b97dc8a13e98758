"""Tests for the analytic reference spectra."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ltlab import (
    GridSpec,
    PotentialSpec,
    PotentialTerm,
    WellSpec,
    compute_spectrum,
    delta_eigenvalue,
    dirichlet_laplacian_spectrum,
    square_well_eigenvalues,
)
from ltlab.discretize import build_operator, sample_potential
from ltlab.eigensolve import hermitian_eigenvalues, pair_greedy
from ltlab.oracles import ContinuationError, OracleDomainError, _matching_residual


class TestDeltaEigenvalue:
    def test_real_coupling(self):
        assert delta_eigenvalue(2.0) == -1.0
        assert delta_eigenvalue(4.0) == -4.0

    def test_complex_coupling(self):
        # c = 2(1+i): -c^2/4 = -2i.
        assert delta_eigenvalue(2 + 2j) == pytest.approx(-2j)

    def test_rejects_nonpositive_real_part(self):
        with pytest.raises(OracleDomainError):
            delta_eigenvalue(-1.0)
        with pytest.raises(OracleDomainError):
            delta_eigenvalue(1j)

    @given(
        st.floats(0.1, 10.0),
        st.floats(-10.0, 10.0),
    )
    def test_modulus_matches_davies_saturation(self, re, im):
        # |lambda| = |c|^2/4 with int |V| = |c|: the modulus bound is tight.
        c = complex(re, im)
        lam = delta_eigenvalue(c)
        assert abs(lam) == pytest.approx(0.25 * abs(c) ** 2, rel=1e-12)


class TestDirichletLaplacianSpectrum:
    def test_matches_dense_solver_1d(self):
        g = GridSpec(1, 3.0, 40)
        m = build_operator(g, sample_potential(PotentialSpec(1, ()), g))
        dense = hermitian_eigenvalues(m.matrix)
        closed = dirichlet_laplacian_spectrum(g)
        assert np.allclose(np.sort(dense), closed, rtol=1e-10, atol=1e-8)

    def test_matches_dense_solver_2d(self):
        g = GridSpec(2, 2.0, 9)
        m = build_operator(g, sample_potential(PotentialSpec(2, ()), g))
        dense = hermitian_eigenvalues(m.matrix)
        closed = dirichlet_laplacian_spectrum(g)
        assert np.allclose(np.sort(dense), closed, rtol=1e-10, atol=1e-8)

    def test_all_positive(self):
        g = GridSpec(1, 5.0, 25)
        assert np.all(dirichlet_laplacian_spectrum(g) > 0)

    def test_periodic_rejected(self):
        g = GridSpec(1, 5.0, 24, boundary="periodic")
        with pytest.raises(OracleDomainError):
            dirichlet_laplacian_spectrum(g)


class TestRealSquareWell:
    def test_shallow_well_asymptotics(self):
        # Shallow well: lambda ~ -(V0 a)^2 (half-width a = 1 here gives
        # integral 2 V0 a and lambda ~ -(int V / 2)^2).
        well = WellSpec(0.01, 1.0)
        lams = square_well_eigenvalues(well)
        assert lams.size == 1
        assert lams[0].real == pytest.approx(-(0.01 * 1.0) ** 2, rel=0.2)
        assert lams[0].imag == 0.0

    def test_root_count_grows_with_depth(self):
        shallow = square_well_eigenvalues(WellSpec(1.0, 1.0))
        deep = square_well_eigenvalues(WellSpec(100.0, 1.0), max_count=20)
        assert deep.size > shallow.size

    def test_real_depth_gives_real_negative(self):
        lams = square_well_eigenvalues(WellSpec(30.0, 1.5), max_count=20)
        assert lams.size >= 1
        assert np.all(lams.imag == 0.0)
        assert np.all(lams.real < 0.0)

    def test_residuals_vanish(self):
        well = WellSpec(25.0, 1.0)
        pairs = square_well_eigenvalues(well, with_branches=True)
        for branch, lam in pairs:
            kappa = np.sqrt(-lam)
            if kappa.real < 0:
                kappa = -kappa
            res = _matching_residual(kappa, well.depth, well.half_width, branch)
            assert abs(res) < 1e-9

    def test_ground_state_matches_grid(self):
        well = WellSpec(9.0, 1.0)
        lams = square_well_eigenvalues(well, max_count=20)
        g = GridSpec(1, 20.0, 2000)
        pot = PotentialSpec(1, (PotentialTerm("box", -9.0, (0.0,), (1.0,)),))
        result = compute_spectrum(g, pot)
        kept = result.filtered.kept
        assert kept.size == lams.size
        worst = pair_greedy(np.sort(kept), np.sort(lams))
        assert worst < 5e-3 * abs(lams[0])

    def test_max_count_truncates(self):
        lams = square_well_eigenvalues(WellSpec(400.0, 2.0), max_count=3)
        assert lams.size == 3
        # Kept eigenvalues are the most deeply bound.
        assert abs(lams[0]) >= abs(lams[1]) >= abs(lams[2])


class TestComplexSquareWell:
    def test_residuals_vanish_complex(self):
        well = WellSpec(3 + 2j, 1.0)
        pairs = square_well_eigenvalues(well, with_branches=True)
        assert len(pairs) >= 1
        for branch, lam in pairs:
            kappa = np.sqrt(complex(-lam))
            if kappa.real < 0:
                kappa = -kappa
            res = _matching_residual(kappa, well.depth, well.half_width, branch)
            assert abs(res) < 1e-9

    def test_conjugate_depth_conjugates_spectrum(self):
        plus = square_well_eigenvalues(WellSpec(3 + 2j, 1.0))
        minus = square_well_eigenvalues(WellSpec(3 - 2j, 1.0))
        assert plus.size == minus.size
        assert np.allclose(np.sort_complex(plus), np.sort_complex(minus.conj()))

    def test_zero_imag_matches_real_route(self):
        direct = square_well_eigenvalues(WellSpec(12.0, 1.0))
        via = square_well_eigenvalues(WellSpec(12.0 + 0j, 1.0))
        assert np.allclose(direct, via)

    def test_matches_grid_spectrum(self):
        well = WellSpec(3 + 2j, 1.0)
        lams = square_well_eigenvalues(well)
        g = GridSpec(1, 18.0, 1400)
        pot = PotentialSpec(1, (PotentialTerm("box", -(3 + 2j), (0.0,), (1.0,)),))
        result = compute_spectrum(g, pot)
        kept = result.filtered.kept
        assert kept.size >= lams.size
        for lam in lams:
            assert np.min(np.abs(kept - lam)) < 2e-2 * max(abs(lam), 1.0)

    def test_small_imaginary_perturbation(self):
        base = square_well_eigenvalues(WellSpec(10.0, 1.0))
        pert = square_well_eigenvalues(WellSpec(10.0 + 1e-6j, 1.0))
        assert pert.size == base.size
        assert np.max(np.abs(np.sort_complex(pert) - np.sort_complex(base))) < 1e-4

    @settings(deadline=None, max_examples=15)
    @given(
        st.floats(2.0, 20.0),
        st.floats(-6.0, 6.0),
    )
    def test_continued_roots_stay_physical(self, re, im):
        well = WellSpec(complex(re, im), 1.0)
        try:
            lams = square_well_eigenvalues(well)
        except ContinuationError:
            return  # collisions can legitimately abort the homotopy
        for lam in lams:
            kappa = np.sqrt(complex(-lam))
            assert abs(kappa.real) > 0.0


class TestWellSpecValidation:
    def test_rejects_nonpositive_real_depth(self):
        with pytest.raises(OracleDomainError):
            WellSpec(-1.0, 1.0)
        with pytest.raises(OracleDomainError):
            WellSpec(2j, 1.0)

    def test_rejects_nonpositive_width(self):
        with pytest.raises(OracleDomainError):
            WellSpec(1.0, 0.0)
