"""Tests for the eigenvalue-bound checks and the exclusion raster."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from ltlab import (
    ConstantMode,
    FilterPolicy,
    GridSpec,
    InequalityRequest,
    PotentialSpec,
    PotentialTerm,
    check_single,
    check_sum,
    compute_spectrum,
    cone_select,
    exclusion_region,
    lemma_check,
)
from ltlab.constants import riesz_lift_constant
from ltlab.corpus import corpus_rng, random_gaussian_potential
from ltlab.discretize import build_operator, sample_potential
from ltlab.eigensolve import FilteredSpectrum, riesz_mean_neg
from ltlab.inequalities import RequestError


def _filtered(values) -> FilteredSpectrum:
    return FilteredSpectrum(
        kept=np.asarray(values, dtype=complex),
        rejected=(),
        policy=FilterPolicy(),
        tau_used=0.0,
    )


def _gaussian_pot(amp, center=0.0, width=1.0):
    return PotentialSpec(1, (PotentialTerm("gaussian", amp, (center,), (width,)),))


class TestConeSelect:
    def test_outside_keeps_left_half_plane(self):
        eigs = [-1.0 + 0j, -2.0 + 0.001j, -3.0 - 5j]
        out = cone_select(eigs, 1.0, "outside")
        assert out.size == 3  # |Im| >= kappa*Re holds whenever Re < 0

    def test_outside_drops_near_axis_right(self):
        eigs = [2.0 + 0.5j, 2.0 + 3j]
        out = cone_select(eigs, 1.0, "outside")
        assert np.allclose(out, [2.0 + 3j])

    def test_inside_cone(self):
        eigs = [-2.0 + 1j, -2.0 + 3j, 1.0 + 0.1j]
        inside = cone_select(eigs, 1.0, "inside")
        assert np.allclose(inside, [-2.0 + 1j])

    def test_boundary_included_both_sides(self):
        # |Im| == kappa*|Re| sits in both selections.
        eigs = [-1.0 + 1j]
        assert cone_select(eigs, 1.0, "outside").size == 1
        assert cone_select(eigs, 1.0, "inside").size == 1

    def test_bad_arguments(self):
        with pytest.raises(RequestError):
            cone_select([1j], 0.0, "outside")
        with pytest.raises(RequestError):
            cone_select([1j], 1.0, "sideways")


class TestRieszLift:
    @given(st.floats(1.1, 4.0), st.lists(st.floats(-5.0, -0.1), min_size=1, max_size=6))
    @settings(max_examples=25, deadline=None)
    def test_lifting_identity(self, gamma, lams):
        # sum (-l)^gamma = gamma(gamma-1) int_0^inf t^{gamma-2} sum (l+t)_- dt
        lams = np.array(lams)
        lhs = riesz_mean_neg(lams, gamma)
        val, err = integrate.quad(
            lambda t: t ** (gamma - 2.0) * riesz_mean_neg(lams + t, 1.0),
            0.0,
            float(-lams.min()),
            limit=200,
        )
        c = riesz_lift_constant(gamma)
        assert lhs == pytest.approx(val / c, rel=1e-6)


class TestLemmaCheck:
    def test_real_potential_exact(self):
        g = GridSpec(1, 8.0, 160)
        pot = _gaussian_pot(-3.0)
        m = build_operator(g, sample_potential(pot, g))
        rep = lemma_check(m, alpha=0.0, gamma=1.0)
        # real V, alpha = 0: both sides are the same Riesz mean
        assert rep.ratio == pytest.approx(1.0, abs=1e-12)
        assert rep.satisfied

    def test_complex_potential_holds_tightly(self):
        g = GridSpec(1, 8.0, 160)
        pot = _gaussian_pot(-3.0 + 2.0j)
        m = build_operator(g, sample_potential(pot, g))
        for alpha in (-1.0, -0.3, 0.0, 0.7, 2.0):
            rep = lemma_check(m, alpha=alpha, gamma=1.5)
            assert rep.satisfied, f"alpha={alpha}: ratio {rep.ratio}"
            assert rep.lhs <= rep.rhs * (1.0 + 1e-9)

    def test_seeded_corpus(self):
        g = GridSpec(1, 10.0, 120)
        for idx in range(6):
            rng = corpus_rng(505, idx)
            pot = random_gaussian_potential(rng, g.half_length)
            m = build_operator(g, sample_potential(pot, g))
            alpha = float(rng.uniform(-2.0, 2.0))
            gamma = float(rng.uniform(1.0, 3.0))
            rep = lemma_check(m, alpha=alpha, gamma=gamma)
            assert rep.satisfied, f"seed idx {idx}: ratio {rep.ratio}"

    def test_relativistic_kinetic(self):
        g = GridSpec(1, 10.0, 128, boundary="periodic")
        pot = _gaussian_pot(-2.0 + 1.5j)
        m = build_operator(g, sample_potential(pot, g), kinetic="relativistic")
        rep = lemma_check(m, alpha=0.5, gamma=1.0)
        assert rep.satisfied

    def test_gamma_below_one_rejected(self):
        g = GridSpec(1, 4.0, 20)
        m = build_operator(g, sample_potential(_gaussian_pot(-1.0), g))
        with pytest.raises(RequestError):
            lemma_check(m, alpha=0.0, gamma=0.5)


class TestCheckSum:
    @pytest.fixture(scope="class")
    def complex_run(self):
        g = GridSpec(1, 16.0, 640)
        pot = _gaussian_pot(-4.0 + 2.0j, width=1.5)
        result = compute_spectrum(g, pot)
        return result, sample_potential(pot, g)

    def test_thm1_i_holds(self, complex_run):
        result, v = complex_run
        req = InequalityRequest("thm1_i", gamma=1.5)
        rep = check_sum(req, result.filtered, v)
        assert rep.satisfied
        assert 0.0 < rep.ratio <= 1.0 + req.slack
        assert rep.constant.guaranteed  # classical constant, gamma >= 3/2

    def test_thm1_ii_holds(self, complex_run):
        result, v = complex_run
        req = InequalityRequest("thm1_ii", gamma=1.5, kappa=1.0)
        rep = check_sum(req, result.filtered, v)
        assert rep.satisfied

    def test_cor_i_holds(self, complex_run):
        result, v = complex_run
        req = InequalityRequest("cor_i", gamma=2.0)
        rep = check_sum(req, result.filtered, v)
        assert rep.satisfied

    def test_cor_ii_holds(self, complex_run):
        result, v = complex_run
        req = InequalityRequest("cor_ii", gamma=1.5, kappa=2.0)
        rep = check_sum(req, result.filtered, v)
        assert rep.satisfied

    def test_refined_rhs_not_larger(self, complex_run):
        result, v = complex_run
        plain = check_sum(
            InequalityRequest("cor_i", gamma=1.5), result.filtered, v
        )
        refined = check_sum(
            InequalityRequest("cor_i", gamma=1.5, refined=True), result.filtered, v
        )
        assert refined.rhs <= plain.rhs + 1e-12
        assert refined.satisfied

    def test_empty_kept_is_trivially_satisfied(self, complex_run):
        _, v = complex_run
        rep = check_sum(InequalityRequest("thm1_i", gamma=1.5), _filtered([]), v)
        assert rep.lhs == 0.0
        assert rep.ratio == 0.0
        assert rep.satisfied

    def test_zero_potential_vacuous_violation(self):
        g = GridSpec(1, 4.0, 30)
        v = sample_potential(PotentialSpec(1, ()), g)
        rep = check_sum(
            InequalityRequest("thm1_i", gamma=1.5), _filtered([-1.0 + 0j]), v
        )
        assert rep.rhs == 0.0
        assert rep.vacuous_violation
        assert not rep.satisfied
        assert rep.ratio == float("inf")

    def test_conjectural_small_gamma(self, complex_run):
        result, v = complex_run
        req = InequalityRequest("cor_i", gamma=0.6, conjectural=True)
        rep = check_sum(req, result.filtered, v)
        assert rep.conjectural
        assert not rep.satisfied  # verdict withheld by construction
        assert not rep.constant.guaranteed
        assert rep.ratio > 0.0

    def test_relativistic_constant_unguaranteed(self):
        g = GridSpec(1, 12.0, 256, boundary="periodic")
        pot = _gaussian_pot(-3.0 + 1.0j)
        result = compute_spectrum(g, pot, kinetic="relativistic")
        v = sample_potential(pot, g)
        rep = check_sum(
            InequalityRequest("thm1_i", gamma=1.5),
            result.filtered,
            v,
            kinetic="relativistic",
        )
        assert not rep.constant.guaranteed
        assert rep.lhs >= 0.0

    def test_report_json_schema(self, complex_run):
        result, v = complex_run
        req = InequalityRequest("thm1_ii", gamma=1.5, kappa=0.5)
        d = check_sum(req, result.filtered, v).to_json_dict()
        for key in (
            "which", "gamma", "kappa", "alpha", "refined", "constant_mode",
            "constant", "constant_guaranteed", "lhs", "rhs", "ratio",
            "satisfied", "conjectural", "vacuous_violation", "slack",
            "eigenvalues_used",
        ):
            assert key in d
        assert d["which"] == "thm1_ii"
        assert all(len(pair) == 2 for pair in d["eigenvalues_used"])

    def test_wrong_kind_rejected(self, complex_run):
        result, v = complex_run
        with pytest.raises(RequestError):
            check_sum(InequalityRequest("davies2", gamma=1.0), result.filtered, v)


class TestRequestValidation:
    def test_kappa_required(self):
        with pytest.raises(RequestError):
            InequalityRequest("thm1_ii", gamma=1.0)
        with pytest.raises(RequestError):
            InequalityRequest("cor_ii", gamma=1.0, kappa=-1.0)

    def test_kappa_forbidden_elsewhere(self):
        with pytest.raises(RequestError):
            InequalityRequest("thm1_i", gamma=1.0, kappa=1.0)

    def test_alpha_only_for_lemma(self):
        with pytest.raises(RequestError):
            InequalityRequest("cor_i", gamma=1.0, alpha=0.5)
        InequalityRequest("lemma", gamma=1.0, alpha=0.5)  # fine

    def test_refined_scope(self):
        with pytest.raises(RequestError):
            InequalityRequest("thm1_i", gamma=1.0, refined=True)
        InequalityRequest("cor_i", gamma=1.0, refined=True)

    def test_gamma_floor_for_sums(self):
        with pytest.raises(RequestError):
            InequalityRequest("thm1_i", gamma=0.9)
        InequalityRequest("thm1_i", gamma=0.9, conjectural=True)  # fine

    def test_negative_slack(self):
        with pytest.raises(RequestError):
            InequalityRequest("thm1_i", gamma=1.0, slack=-0.1)


class TestCheckSingle:
    @pytest.fixture(scope="class")
    def v(self):
        g = GridSpec(1, 10.0, 200)
        return sample_potential(_gaussian_pot(-2.0 + 1.0j), g)

    def test_single_9(self, v):
        rep = check_single(-0.5 + 1.0j, InequalityRequest("single_9", gamma=1.5), v)
        assert rep.lhs == pytest.approx(0.5**1.5)
        assert rep.satisfied

    def test_single_9_precondition(self, v):
        with pytest.raises(RequestError):
            check_single(0.1 + 1j, InequalityRequest("single_9", gamma=1.5), v)

    def test_single_10(self, v):
        rep = check_single(-0.5 + 0.5j, InequalityRequest("single_10", gamma=1.5), v)
        assert rep.lhs == pytest.approx(abs(-0.5 + 0.5j) ** 1.5)
        assert rep.satisfied

    def test_single_11_tilt_grows_with_re(self, v):
        req = InequalityRequest("single_11", gamma=1.0)
        near = check_single(0.1 + 1.0j, req, v)
        far = check_single(2.0 + 1.0j, req, v)
        assert far.rhs > near.rhs  # tilt factor increases with Re mu

    def test_single_11_preconditions(self, v):
        with pytest.raises(RequestError):
            check_single(-0.1 + 1j, InequalityRequest("single_11", gamma=1.0), v)
        with pytest.raises(RequestError):
            check_single(2.0 + 0j, InequalityRequest("single_11", gamma=1.0), v)

    def test_davies2(self, v):
        rep = check_single(-1.0 + 0.2j, InequalityRequest("davies2", gamma=1.0), v)
        assert rep.lhs == pytest.approx(abs(-1.0 + 0.2j))
        assert rep.constant is None

    def test_davies2_excludes_half_line(self, v):
        with pytest.raises(RequestError):
            check_single(3.0 + 0j, InequalityRequest("davies2", gamma=1.0), v)

    def test_davies2_only_1d(self):
        g = GridSpec(2, 4.0, 12)
        v2 = sample_potential(PotentialSpec(2, ()), g)
        with pytest.raises(RequestError):
            check_single(-1.0 + 1j, InequalityRequest("davies2", gamma=1.0), v2)

    def test_zero_potential_vacuous(self):
        g = GridSpec(1, 4.0, 30)
        v0 = sample_potential(PotentialSpec(1, ()), g)
        rep = check_single(1j, InequalityRequest("single_11", gamma=1.0), v0)
        assert rep.vacuous_violation
        assert not rep.satisfied

    def test_delta_like_saturation(self):
        # a narrow deep well nearly saturates the modulus bound
        g = GridSpec(1, 12.0, 2400)
        w = 0.02
        pot = PotentialSpec(1, (PotentialTerm("box", -2.0 / (2 * w), (0.0,), (w,)),))
        v = sample_potential(pot, g)
        result = compute_spectrum(g, pot)
        kept = result.filtered.kept
        assert kept.size == 1
        rep = check_single(kept[0], InequalityRequest("davies2", gamma=1.0), v)
        assert rep.satisfied
        assert rep.ratio > 0.9


class TestExclusionRegion:
    @pytest.fixture(scope="class")
    def setup(self):
        g = GridSpec(1, 10.0, 400)
        pot = _gaussian_pot(-2.0 + 1.5j)
        return g, pot, sample_potential(pot, g)

    def test_zero_potential_excludes_everything_off_half_line(self):
        g = GridSpec(1, 4.0, 30)
        v0 = sample_potential(PotentialSpec(1, ()), g)
        raster = exclusion_region(
            v0, 1.0, ConstantMode.classical(), (-2.0, 2.0, -2.0, 2.0), (41, 41)
        )
        res, ims = raster.pixel_centers()
        on_half_line = (ims[:, None] == 0.0) & (res[None, :] >= 0.0)
        assert np.all(raster.mask | on_half_line)
        assert not raster.excluded_at(1.0 + 0j)

    def test_half_line_never_excluded(self, setup):
        _, _, v = setup
        raster = exclusion_region(
            v, 1.0, ConstantMode.classical(), (-3.0, 3.0, -3.0, 3.0), (61, 61)
        )
        assert not raster.excluded_at(0.0 + 0j)
        assert not raster.excluded_at(1.5 + 0j)

    def test_mask_symmetric_in_imag(self, setup):
        _, _, v = setup
        raster = exclusion_region(
            v, 1.0, ConstantMode.classical(), (-3.0, 3.0, -3.0, 3.0), (61, 61)
        )
        assert np.array_equal(raster.mask, raster.mask[::-1, :])

    def test_far_field_excluded(self, setup):
        _, _, v = setup
        raster = exclusion_region(
            v, 1.0, ConstantMode.classical(), (-60.0, 60.0, -60.0, 60.0), (81, 81)
        )
        assert raster.excluded_at(-59.0 + 59.0j)
        assert raster.excluded_at(59.0 + 59.0j)

    def test_kept_eigenvalues_not_excluded(self, setup):
        g, pot, v = setup
        result = compute_spectrum(g, pot)
        raster = exclusion_region(
            v,
            1.0,
            ConstantMode.scaled(2.0),
            (-6.0, 2.0, -4.0, 4.0),
            (201, 201),
        )
        for lam in result.filtered.kept:
            assert not raster.excluded_at(complex(lam)), f"excluded {lam}"

    def test_resolution_limits(self, setup):
        _, _, v = setup
        with pytest.raises(RequestError):
            exclusion_region(
                v, 1.0, ConstantMode.classical(), (-1, 1, -1, 1), (5000, 10)
            )
        with pytest.raises(RequestError):
            exclusion_region(
                v, 1.0, ConstantMode.classical(), (-1, 1, -1, 1), (0, 10)
            )

    def test_no_davies_weakens_mask(self, setup):
        _, _, v = setup
        window = (-20.0, 20.0, -20.0, 20.0)
        with_d = exclusion_region(
            v, 1.0, ConstantMode.classical(), window, (81, 81), include_davies=True
        )
        without = exclusion_region(
            v, 1.0, ConstantMode.classical(), window, (81, 81), include_davies=False
        )
        assert np.all(without.mask <= with_d.mask)

    def test_scaling_homogeneity(self):
        # V_s(x) = s^2 V(s x) rescales the spectrum by s^2 and, with the
        # Davies bound off, the gamma=1 exclusion mask by the same factor.
        g1 = GridSpec(1, 8.0, 800)
        g2 = GridSpec(1, 4.0, 800)
        s = 2.0
        pot1 = _gaussian_pot(-2.0 + 1.0j, width=1.0)
        pot2 = _gaussian_pot((s * s) * (-2.0 + 1.0j), width=1.0 / s)
        v1 = sample_potential(pot1, g1)
        v2 = sample_potential(pot2, g2)
        w = 3.0
        r1 = exclusion_region(
            v1, 1.0, ConstantMode.classical(), (-w, w, -w, w), (61, 61),
            include_davies=False,
        )
        s2 = s * s
        r2 = exclusion_region(
            v2, 1.0, ConstantMode.classical(),
            (-w * s2, w * s2, -w * s2, w * s2), (61, 61),
            include_davies=False,
        )
        mismatch = np.mean(r1.mask != r2.mask)
        assert mismatch < 0.02  # only pixel-boundary cells may differ
