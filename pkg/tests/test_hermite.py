"""Tests for Hermite function evaluation, norms, tails and windowed integrals.

High-precision reference values were computed with mpmath (50 digits)
from the Rodrigues form of the Hermite polynomials and from adaptive
quadrature, then frozen here.
"""

import math

import numpy as np
import pytest
from numpy.polynomial.hermite import hermgauss

from pointspectra.hermite import (
    TaperBasis,
    dilation_factor,
    fourier_integral_tensor,
    hermite_function,
    hermite_series,
    psi,
    psi_l4_norm_sq,
    sobolev_norm_sq,
    tail_mass,
    taper_value,
    windowed_fourier_integral,
)
from pointspectra.patterns import Window

# mpmath Rodrigues-formula oracles, 50-digit evaluation
PSI_25_AT_3 = 0.29344700435648359148
PSI_3_AT_07 = -0.4799535030961140196
PSI_5_AT_M12 = 0.31183925267774483685
PSI_100_AT_8 = 0.22529872838755200173
PSI_1000_AT_25 = 0.017900901387668692979
PSI_2000_AT_60 = 0.079728242238348043432
TAIL_0_RHO1_P2 = 0.39660964064213710268  # sqrt(erfc(1))
TAIL_0_RHO1_P1 = 0.59742985311847844871
WINDOWED_0_K2_R5 = 0.25480886268384211827
SOBOLEV_2_BETA1 = 1.4104739588693907174
SOBOLEV_1_BETA05 = 1.0370510085544400258
L4SQ_PSI3 = 0.47862316865594813215
L4SQ_PSI0 = 0.63161877774606470129


class TestHermiteFunction:
    def test_order_zero_at_origin(self):
        assert hermite_function(0, 0.0) == pytest.approx(math.pi ** -0.25, rel=1e-14)

    def test_odd_order_vanishes_at_origin(self):
        assert hermite_function(1, 0.0) == 0.0

    def test_rodrigues_oracle_moderate_order(self):
        assert hermite_function(25, 3.0) == pytest.approx(PSI_25_AT_3, rel=1e-10)

    def test_rodrigues_oracle_high_orders(self):
        assert hermite_function(100, 8.0) == pytest.approx(PSI_100_AT_8, rel=1e-10)
        assert hermite_function(1000, 25.0) == pytest.approx(PSI_1000_AT_25, rel=1e-9)

    def test_rescaled_recurrence_survives_gaussian_underflow(self):
        # exp(-60^2/2) underflows float64; the log-scaled carry must recover
        assert hermite_function(2000, 60.0) == pytest.approx(PSI_2000_AT_60, rel=1e-9)

    def test_finite_for_extreme_arguments(self):
        for n, y in [(10_000, 1000.0), (10_000, 100.0), (5000, 0.5), (0, -1000.0)]:
            value = hermite_function(n, y)
            assert np.isfinite(value)

    def test_series_consistent_with_scalar(self):
        y = np.array([-2.5, 0.3, 4.0])
        table = hermite_series(y, 12)
        for n in range(12):
            for j, yj in enumerate(y):
                assert table[n, j] == pytest.approx(hermite_function(n, yj), abs=1e-14)

    def test_parity(self):
        y = 1.7
        for n in range(8):
            sign = (-1) ** n
            assert hermite_function(n, -y) == pytest.approx(sign * hermite_function(n, y), rel=1e-12)

    def test_rejects_negative_order(self):
        with pytest.raises(ValueError):
            hermite_function(-1, 0.0)


class TestPsi:
    def test_product_at_origin(self):
        assert psi((0, 0), (0.0, 0.0)) == pytest.approx(math.pi ** -0.5, rel=1e-13)

    def test_odd_factor_vanishes(self):
        assert psi((1, 0), (0.0, 5.0)) == 0.0

    def test_two_dim_oracle(self):
        assert psi((3, 5), (0.7, -1.2)) == pytest.approx(PSI_3_AT_07 * PSI_5_AT_M12, rel=1e-10)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            psi((1, 2), (0.0,))


class TestTaperBasis:
    def test_index_count_and_order(self):
        basis = TaperBasis(d=2, i_max=3, r=1.0, half_width=5.0)
        assert basis.index_count == 9
        assert basis.indices[:4] == ((0, 0), (0, 1), (0, 2), (1, 0))

    def test_dilation_rule(self):
        basis = TaperBasis.square(20.0, 2, 25)
        assert basis.r == pytest.approx(20.0 / math.sqrt(50.0 + 25.0 ** (2.0 / 3.0)))

    def test_parity_restriction(self):
        basis = TaperBasis(d=2, i_max=3, r=1.0, half_width=5.0, parity="even")
        assert all(sum(i) % 2 == 0 for i in basis.indices)
        odd = TaperBasis(d=2, i_max=3, r=1.0, half_width=5.0, parity="odd")
        assert basis.index_count + odd.index_count == 9

    def test_requires_square_window(self):
        with pytest.raises(ValueError):
            TaperBasis.for_window(Window((1.0, 2.0)), 4)

    def test_taper_value_scaling(self):
        b1 = TaperBasis(d=1, i_max=1, r=1.0, half_width=5.0)
        assert taper_value(b1, (0,), [0.0]) == pytest.approx(math.pi ** -0.25)
        b2 = TaperBasis(d=1, i_max=1, r=2.0, half_width=5.0)
        assert taper_value(b2, (0,), [0.0]) == pytest.approx(math.pi ** -0.25 / math.sqrt(2.0))
        b3 = TaperBasis(d=2, i_max=2, r=2.0, half_width=5.0)
        assert taper_value(b3, (1, 1), [2.0, 2.0]) == pytest.approx(0.5 * psi((1, 1), (1.0, 1.0)), rel=1e-12)

    def test_taper_value_outside_basis(self):
        basis = TaperBasis(d=1, i_max=2, r=1.0, half_width=5.0)
        with pytest.raises(ValueError):
            taper_value(basis, (2,), [0.0])


class TestDilationFactor:
    def test_unit_imax(self):
        assert dilation_factor(20.0, 1, 1.0 / 3.0) == pytest.approx(20.0 / math.sqrt(3.0))

    def test_study_setting(self):
        assert dilation_factor(20.0, 25, 1.0 / 3.0) == pytest.approx(
            20.0 / math.sqrt(50.0 + 25.0 ** (2.0 / 3.0)), rel=1e-14
        )

    def test_generic_theta(self):
        assert dilation_factor(10.0, 8, 0.5) == pytest.approx(
            10.0 / math.sqrt(16.0 + 8.0 ** (1.0 / 3.0 + 0.5)), rel=1e-14
        )

    def test_theta_range(self):
        with pytest.raises(ValueError):
            dilation_factor(10.0, 8, 0.7)
        with pytest.raises(ValueError):
            dilation_factor(10.0, 8, 0.0)


def gauss_hermite_gram(n_orders, nodes=220):
    """Gram matrix of the Hermite functions under Gauss-Hermite quadrature."""
    y, w = hermgauss(nodes)
    table = hermite_series(y, n_orders)
    scaled = np.exp(np.log(w) + y * y)
    return (table * scaled) @ table.T


class TestOrthonormality:
    def test_gram_identity_1d(self):
        gram = gauss_hermite_gram(25)
        assert np.max(np.abs(gram - np.eye(25))) < 1e-8

    def test_scaled_family_remains_orthonormal(self):
        # change of variables maps the scaled Gram onto the unscaled one
        for r in (0.5, 2.0, 7.3):
            y, w = hermgauss(220)
            table = hermite_series(y, 10)  # values psi_n(u), u = x / r
            scaled = np.exp(np.log(w) + y * y)
            gram = (table * scaled) @ table.T  # r cancels against r^{-d/2} twice
            assert np.max(np.abs(gram - np.eye(10))) < 1e-8


class TestFourierEigenrelation:
    def test_transform_reproduces_function(self):
        # F[psi_n](k) = i^n psi_n(k) under F f (k) = (2 pi)^{-1/2} int f e^{iky} dy
        n_max = 21
        half = 30.0
        panels = 80
        edges = np.linspace(-half, half, panels + 1)
        from numpy.polynomial.legendre import leggauss

        gl_x, gl_w = leggauss(24)
        mid = 0.5 * (edges[:-1] + edges[1:])
        hw = 0.5 * (edges[1:] - edges[:-1])
        x = (mid[:, None] + hw[:, None] * gl_x[None, :]).ravel()
        w = (hw[:, None] * np.broadcast_to(gl_w, (panels, 24))).ravel()
        table = hermite_series(x, n_max)
        k = np.linspace(-10.0, 10.0, 81)
        phases = np.exp(1j * np.outer(k, x))
        transforms = (phases * w) @ table.T / math.sqrt(2.0 * math.pi)  # (k, n)
        expected = hermite_series(k, n_max).T * (1j ** np.arange(n_max))[None, :]
        assert np.max(np.abs(transforms - expected)) < 1e-6


class TestSobolevNorm:
    def test_exact_identity_beta_two(self):
        assert sobolev_norm_sq((0,), 2.0) == 0.5
        assert sobolev_norm_sq((3, 5), 2.0) == 9.0
        assert sobolev_norm_sq((2, 0, 7), 2.0) == 0.5 * (5 + 1 + 15)

    def test_quadrature_oracle_beta_one(self):
        assert sobolev_norm_sq((2,), 1.0) == pytest.approx(SOBOLEV_2_BETA1, abs=1e-8)

    def test_quadrature_oracle_beta_half(self):
        assert sobolev_norm_sq((1,), 0.5) == pytest.approx(SOBOLEV_1_BETA05, abs=1e-8)

    def test_dense_grid_cross_check_2d(self):
        # brute-force tensor trapezoid on |psi_i(k)|^2 |k|^beta
        idx, beta = (2, 1), 1.0
        g = np.linspace(-9.0, 9.0, 1201)
        va = hermite_series(g, 3)[2]
        vb = hermite_series(g, 2)[1]
        k1, k2 = np.meshgrid(g, g, indexing="ij")
        integrand = np.outer(va * va, vb * vb) * np.hypot(k1, k2) ** beta
        step = g[1] - g[0]
        brute = np.trapezoid(np.trapezoid(integrand, dx=step), dx=step)
        assert sobolev_norm_sq(idx, beta) == pytest.approx(brute, abs=1e-6)

    def test_random_indices_match_dense_grid(self):
        # beta = 2: the exact identity against a dense Fourier-side grid
        rng = np.random.default_rng(7)
        g = np.linspace(-40.0, 40.0, 40001)
        step = g[1] - g[0]
        for _ in range(20):
            idx = tuple(int(v) for v in rng.integers(0, 25, size=int(rng.integers(1, 3))))
            if len(idx) == 1:
                n = idx[0]
                vals = hermite_series(g, n + 1)[n]
                brute = np.trapezoid(vals * vals * g * g, dx=step)
            else:
                a, b = idx
                va = hermite_series(g, a + 1)[a]
                vb = hermite_series(g, b + 1)[b]
                # |k|^2 separates: int psi_a^2 k1^2 * 1 + 1 * int psi_b^2 k2^2
                brute = np.trapezoid(va * va * g * g, dx=step) + np.trapezoid(
                    vb * vb * g * g, dx=step
                )
            assert sobolev_norm_sq(idx, 2.0) == pytest.approx(brute, abs=1e-6)

    def test_low_beta_matches_refined_grid_1d(self):
        # below beta = 2 the |k|^beta kink limits the trapezoid oracle; use
        # a fine grid and a matching tolerance
        g = np.linspace(-40.0, 40.0, 400001)
        step = g[1] - g[0]
        for n, beta in [(5, 0.8), (12, 1.5)]:
            vals = hermite_series(g, n + 1)[n]
            brute = np.trapezoid(vals * vals * np.abs(g) ** beta, dx=step)
            assert sobolev_norm_sq((n,), beta) == pytest.approx(brute, abs=1e-6)

    def test_family_average_bound(self):
        for d in (1, 2):
            for i_max in (1, 2, 4, 7, 10):
                indices = TaperBasis(d=d, i_max=i_max, r=1.0, half_width=1.0).indices
                for beta in (0.5, 1.0, 2.0):
                    avg = np.mean([sobolev_norm_sq(i, beta) for i in indices])
                    assert avg <= len(indices) ** (beta / (2.0 * d)) * (1.0 + 1e-12)

    def test_beta_range(self):
        with pytest.raises(ValueError):
            sobolev_norm_sq((1,), 2.5)
        with pytest.raises(ValueError):
            sobolev_norm_sq((1,), 0.0)


class TestTailMass:
    def test_total_mass_leaves_no_tail(self):
        assert tail_mass((0,), 50.0, 2) <= 1e-12

    def test_gaussian_tail_oracle(self):
        assert tail_mass((0,), 1.0, 2) == pytest.approx(TAIL_0_RHO1_P2, abs=1e-12)

    def test_l1_tail_oracle(self):
        assert tail_mass((0,), 1.0, 1) == pytest.approx(TAIL_0_RHO1_P1, abs=1e-11)

    def test_localization_at_dilation_radius(self):
        # mpmath oracle: the norm itself is 0.0300589...; the squared-norm
        # form that the tail bound controls sits just below 1e-3
        rho = math.sqrt(2.0 * 25.0 + 25.0 ** (2.0 / 3.0))
        value = tail_mass((24,), rho, 2)
        assert value == pytest.approx(0.03005890965885221, abs=1e-10)
        assert value ** 2 <= 1e-3

    def test_monotone_in_rho(self):
        for idx in [(3,), (7, 2)]:
            values = [tail_mass(idx, rho, 2) for rho in np.linspace(0.5, 12.0, 20)]
            assert all(a >= b - 1e-13 for a, b in zip(values, values[1:]))

    def test_two_dim_factorization(self):
        # complement mass of the product equals 1 - prod of inside masses (p=2)
        rho = 2.0
        inside_0 = 1.0 - tail_mass((0,), rho, 2) ** 2
        inside_3 = 1.0 - tail_mass((3,), rho, 2) ** 2
        expected = math.sqrt(1.0 - inside_0 * inside_3)
        assert tail_mass((0, 3), rho, 2) == pytest.approx(expected, abs=1e-10)

    def test_l4_norm_oracles(self):
        assert psi_l4_norm_sq((3,)) == pytest.approx(L4SQ_PSI3, abs=1e-10)
        assert psi_l4_norm_sq((0,)) == pytest.approx(L4SQ_PSI0, abs=1e-10)


class TestWindowedFourierIntegral:
    def test_gaussian_integral_oracle(self):
        basis = TaperBasis(d=1, i_max=1, r=1.0, half_width=50.0)
        value = windowed_fourier_integral(basis, (0,), [0.0], Window((50.0,)))
        assert value.real == pytest.approx(math.sqrt(2.0) * math.pi ** 0.25, rel=1e-12)
        assert abs(value.imag) < 1e-12

    def test_odd_component_vanishes(self):
        basis = TaperBasis(d=2, i_max=2, r=1.3, half_width=8.0)
        value = windowed_fourier_integral(basis, (1, 0), [0.0, 0.0], Window.square(8.0, 2))
        assert abs(value) < 1e-12

    def test_oscillatory_oracle(self):
        basis = TaperBasis(d=1, i_max=1, r=1.0, half_width=5.0)
        value = windowed_fourier_integral(basis, (0,), [2.0], Window((5.0,)))
        assert value.real == pytest.approx(WINDOWED_0_K2_R5, abs=1e-10)
        assert abs(value.imag) < 1e-12

    def test_dense_trapezoid_cross_check(self):
        basis = TaperBasis(d=1, i_max=4, r=1.7, half_width=6.0)
        x = np.linspace(-6.0, 6.0, 200001)
        vals = hermite_series(x / 1.7, 4)[3] / math.sqrt(1.7)
        for k in (0.5, 3.2):
            brute = np.trapezoid(vals * np.exp(-1j * k * x), dx=x[1] - x[0])
            got = windowed_fourier_integral(basis, (3,), [k], Window((6.0,)))
            assert got == pytest.approx(brute, abs=1e-8)

    def test_full_space_limit_matches_eigenrelation(self):
        # int_{R} psi_n e^{-ikx} dx = sqrt(2 pi) (-i)^n... via F[psi_n](-k)
        basis = TaperBasis(d=1, i_max=6, r=1.0, half_width=40.0)
        for n in range(6):
            for k in (0.0, 1.3, -2.7):
                got = windowed_fourier_integral(basis, (n,), [k], Window((40.0,)))
                expected = math.sqrt(2.0 * math.pi) * (1j ** n) * hermite_function(n, -k)
                assert got == pytest.approx(expected, abs=1e-9)

    def test_tensor_matches_entries(self):
        basis = TaperBasis(d=2, i_max=3, r=1.5, half_width=7.0)
        window = Window.square(7.0, 2)
        k = np.array([1.1, -0.4])
        tensor = fourier_integral_tensor(basis, window, k)
        for i in [(0, 0), (2, 1), (1, 2)]:
            assert tensor[i] == pytest.approx(
                windowed_fourier_integral(basis, i, k, window), abs=1e-12
            )

    def test_rejects_index_outside_basis(self):
        basis = TaperBasis(d=1, i_max=2, r=1.0, half_width=5.0)
        with pytest.raises(ValueError):
            windowed_fourier_integral(basis, (5,), [0.0], Window((5.0,)))
