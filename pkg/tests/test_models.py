"""Theoretical structure factors, pair correlations and the divergence bound."""

import math

import numpy as np
import pytest

from pointspectra.covariance import BumpCovariance, ExponentialCovariance, bump_profile
from pointspectra.models import (
    chi_square_bound,
    intensity,
    make_model,
    model_names,
    pair_correlation_arcsin,
    structure_factor,
    theory_table,
    thinned_structure_factor,
)


class TestModelSpec:
    def test_defaults_are_study_instances(self):
        thomas = make_model("thomas")
        assert dict(thomas.params) == {"alpha": 5.0, "sigma2": 0.25, "mu": 0.2}
        matern = make_model("matern")
        assert dict(matern.params) == {"alpha": 5.0, "rho": 1.5, "mu": 0.2}
        bessel = make_model("bessel_dpp")
        assert dict(bessel.params) == {"rho": 0.3, "alpha": 1.0}

    def test_unknown_model(self):
        with pytest.raises(ValueError):
            make_model("gibbs")

    def test_unknown_parameter(self):
        with pytest.raises(ValueError):
            make_model("poisson", alpha=2.0)

    def test_bessel_existence_condition(self):
        with pytest.raises(ValueError):
            make_model("bessel_dpp", rho=0.5, alpha=1.0)

    def test_intensities(self):
        assert intensity(make_model("poisson", intensity=2.0)) == 2.0
        assert intensity(make_model("thomas")) == pytest.approx(1.0)
        assert intensity(make_model("exp_lgcp")) == pytest.approx(math.exp(0.25))
        assert intensity(make_model("ginibre")) == pytest.approx(1.0 / math.pi)
        assert intensity(make_model("bessel_dpp")) == 0.3
        assert intensity(make_model("perturbed_lattice")) == 1.0


class TestClosedForms:
    def test_poisson_flat(self):
        m = make_model("poisson", intensity=3.0)
        k = np.array([[0.0, 0.0], [1.0, 2.0], [-4.0, 0.3]])
        np.testing.assert_allclose(structure_factor(m, k), 1.0)

    def test_thomas_values(self):
        m = make_model("thomas")
        assert structure_factor(m, [0.0, 0.0]) == pytest.approx(6.0)
        assert structure_factor(m, [2.0, 0.0]) == pytest.approx(1.0 + 5.0 * math.exp(-1.0))

    def test_matern_zero_frequency(self):
        assert structure_factor(make_model("matern"), [0.0, 0.0]) == pytest.approx(6.0)

    def test_ginibre(self):
        m = make_model("ginibre")
        assert structure_factor(m, [0.0, 0.0]) == 0.0
        assert structure_factor(m, [2.0, 0.0]) == pytest.approx(1.0 - math.exp(-1.0))

    def test_bessel_dpp_row(self):
        m = make_model("bessel_dpp")
        assert structure_factor(m, [5.0, 0.0]) == pytest.approx(1.0)
        assert structure_factor(m, [4.0, 0.0]) == pytest.approx(1.0)
        assert structure_factor(m, [0.0, 0.0]) == pytest.approx(1.0 - 0.3 * math.pi)
        # verbatim instance at an interior frequency
        q = 2.5
        printed = 1.0 - 0.3 * (2.0 * math.acos(q / 4.0) - (q / 2.0) * math.sqrt(1.0 - (q / 4.0) ** 2))
        assert structure_factor(m, [q, 0.0]) == pytest.approx(printed, rel=1e-12)

    def test_perturbed_lattice_formula(self):
        m = make_model("perturbed_lattice")
        k = np.array([1.3, -0.7])
        q = np.linalg.norm(k)
        sinc = lambda t: 1.0 if t == 0 else math.sin(t) / t
        expected = 1.0 - sinc(k[0] / 2.0) ** 2 * sinc(k[1] / 2.0) ** 2 * math.exp(-math.sqrt(q / 2.0))
        assert structure_factor(m, k) == pytest.approx(expected, rel=1e-12)
        assert structure_factor(m, [0.0, 0.0]) == pytest.approx(0.0, abs=1e-12)

    def test_even_symmetry(self):
        rng = np.random.default_rng(5)
        ks = rng.uniform(-6, 6, size=(20, 2))
        for name in model_names():
            m = make_model(name)
            np.testing.assert_allclose(
                structure_factor(m, ks), structure_factor(m, -ks), rtol=1e-10, atol=1e-12
            )

    def test_nonnegative_on_grid(self):
        g = np.linspace(-10.0, 10.0, 41)
        k1, k2 = np.meshgrid(g, g)
        ks = np.column_stack([k1.ravel(), k2.ravel()])
        for name in model_names():
            assert np.all(structure_factor(make_model(name), ks) >= 0.0)


class TestLgcpIntegral:
    def test_against_dense_grid(self):
        # 2-d trapezoid Fourier sum of e^{c} - 1 as the oracle
        m = make_model("exp_lgcp")  # mu=0, sigma2=0.5, alpha=1
        g = np.linspace(-30.0, 30.0, 1501)
        step = g[1] - g[0]
        x1, x2 = np.meshgrid(g, g, indexing="ij")
        r = np.hypot(x1, x2)
        f = np.expm1(0.5 * np.exp(-r))
        lam = math.exp(0.25)
        for q in (0.0, 0.7, 2.0):
            phase = np.cos(q * x1)
            oracle = 1.0 + lam * np.sum(f * phase) * step * step
            got = structure_factor(m, [q, 0.0])
            assert got == pytest.approx(oracle, abs=2e-4)

    def test_printed_instance_prefactor(self):
        # at the study parameters S(0) = 1 + e^{0.25} * int (e^{0.5 e^{-|x|}} - 1) dx
        m = make_model("exp_lgcp")
        from scipy.integrate import quad

        radial, _ = quad(lambda s: np.expm1(0.5 * math.exp(-s)) * s, 0.0, 60.0, limit=200)
        expected = 1.0 + math.exp(0.25) * 2.0 * math.pi * radial
        assert structure_factor(m, [0.0, 0.0]) == pytest.approx(expected, abs=1e-6)


class TestArcsinCox:
    def test_pair_correlation_zero_covariance(self):
        cov = ExponentialCovariance(0.0, 1.0)
        assert pair_correlation_arcsin(cov, [0.3, 0.3]) == 1.0

    def test_pair_correlation_value(self):
        cov = BumpCovariance(0.25, 2.0)
        expected = 1.0 + 0.5 * math.exp(-0.25) * (math.exp(0.25) - math.exp(-0.25))
        assert pair_correlation_arcsin(cov, [0.0, 0.0]) == pytest.approx(expected, rel=1e-12)

    def test_pair_correlation_outside_support(self):
        cov = BumpCovariance(0.25, 2.0)
        assert pair_correlation_arcsin(cov, [5.0, 0.0]) == 1.0

    def test_structure_factor_against_dense_fourier_sum(self):
        sigma, rho = 0.6, 2.0
        m = make_model("arcsin_cox", sigma=sigma, rho=rho)
        cov = BumpCovariance(sigma * sigma, rho)
        g = np.linspace(-1.1, 1.1, 441)
        step = g[1] - g[0]
        x1, x2 = np.meshgrid(g, g, indexing="ij")
        c = cov.at_radius(np.hypot(x1, x2))
        gm1 = 0.5 * math.exp(-cov.at_zero) * (np.exp(c) - np.exp(-c))
        rng = np.random.default_rng(11)
        for q in rng.uniform(0.0, 8.0, size=10):
            phase = np.cos(q * x1)
            oracle = 1.0 + np.sum(gm1 * phase) * step * step
            assert structure_factor(m, [q, 0.0]) == pytest.approx(oracle, abs=1e-4)

    def test_bump_profile_properties(self):
        prof = bump_profile()
        s = np.linspace(0.0, 0.5, 200)
        vals = prof(s)
        assert vals[0] == pytest.approx(1.0)
        assert np.all(vals <= 1.0 + 1e-9)
        assert np.all(vals >= -1e-9)
        assert prof(0.5) == pytest.approx(0.0, abs=1e-12)


class TestThinnedStructureFactor:
    def test_poisson_fixed_point(self):
        assert thinned_structure_factor(1.0, 0.5) == 1.0

    def test_table_value(self):
        assert thinned_structure_factor(6.0, 0.5) == 3.5

    def test_zero(self):
        assert thinned_structure_factor(0.0, 0.5) == 0.5

    def test_affine_maps_one_to_one(self):
        for p in (0.0, 0.2, 0.7, 1.0):
            assert thinned_structure_factor(1.0, p) == pytest.approx(1.0)


class TestChiSquareBound:
    def test_zero_sigma(self):
        assert chi_square_bound(0.0, 1.0, 2, 100.0) == 0.0

    def test_hand_case(self):
        # d=1, 8 sigma^4 rho^2 = 1/2, |W| = 2 rho -> (1/2)^{-1} - 1 = 1
        rho = 1.3
        sigma = (1.0 / (16.0 * rho * rho)) ** 0.25
        assert chi_square_bound(sigma, rho, 1, 2.0 * rho) == pytest.approx(1.0, rel=1e-12)

    def test_monotone_in_volume_and_sigma(self):
        vols = np.linspace(1.0, 50.0, 10)
        vals = [chi_square_bound(0.3, 1.0, 1, v) for v in vols]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        sigmas = np.linspace(0.05, 0.5, 10)
        vals = [chi_square_bound(s, 1.0, 1, 10.0) for s in sigmas]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_vacuous_region_rejected(self):
        with pytest.raises(ValueError):
            chi_square_bound(0.9, 2.0, 2, 10.0)


class TestTheoryTable:
    def test_rows(self):
        rows = theory_table(make_model("ginibre"), [0.0, 1.0, 2.0])
        assert rows[0] == (0.0, 0.0)
        assert rows[2][1] == pytest.approx(1.0 - math.exp(-1.0))
