"""Annulus kernels: pole structure, boundary behavior, tangent coordinates."""

import math

import numpy as np
import pytest

from virasoro.annulus import (
    AnnulusChart,
    bergman_connection,
    excursion_kernel,
    excursion_kernel_image_sum,
    harmonic_measure_far,
    poisson_kernel,
    schwarzian_connection,
    v0_field,
    v0_y_derivative,
    v_field,
)
from virasoro.theta import ThetaContext, eta_log_derivative

CTX = ThetaContext(1.0)


class TestVField:
    def test_residue_one_pole(self):
        for eps in (1e-2, 1e-3):
            assert abs(v_field(0.3 + eps, 0.3, CTX) - 1 / eps) < 0.05

    def test_v0_vanishes_at_origin(self):
        assert abs(v0_field(0.0, 0.3, CTX)) < 1e-14

    def test_constant_imaginary_part_on_far_line(self):
        for x in (0.17, 0.44, 0.93):
            v = v_field(x + 1j * CTX.t, 0.4, CTX)
            assert v.imag == pytest.approx(-2 * math.pi, abs=1e-10)

    def test_v0_real_on_bottom(self):
        v = v0_field(0.8, 0.3, CTX)
        assert abs(complex(v).imag) < 1e-12

    def test_v0_imaginary_part_on_far_line(self):
        # Im V0 = -2 pi + Im(-V(0,y)) = -2 pi there (V(0,y) real)
        v = v0_field(0.6 + 1j * CTX.t, 0.3, CTX)
        assert complex(v).imag == pytest.approx(-2 * math.pi, abs=1e-10)

    def test_y_derivatives_vs_finite_difference(self):
        h = 1e-5
        for m in (1, 2, 3):
            fd = (
                v0_y_derivative(0.55, 0.21 + h, CTX, m - 1) * math.factorial(m - 1)
                - v0_y_derivative(0.55, 0.21 - h, CTX, m - 1) * math.factorial(m - 1)
            ) / (2 * h)
            an = v0_y_derivative(0.55, 0.21, CTX, m) * math.factorial(m)
            assert abs(complex(an - fd)) < 1e-6 * max(1.0, abs(complex(an)))


class TestPoissonKernel:
    def test_vanishes_on_both_circles(self):
        for ximag in (1e-10, CTX.t / 2, CTX.t - 1e-10):
            assert abs(poisson_kernel(0.23 + 1j * ximag, 0.55, CTX)) < 1e-9

    def test_positive_in_bulk(self):
        for x in (0.1 + 0.1j, 0.5 + 0.25j, 0.9 + 0.4j):
            assert poisson_kernel(x, 0.55, CTX) > 0

    def test_partition_of_unity(self):
        x = 0.37 + 0.29j
        ys = np.linspace(0, 1, 4096, endpoint=False)
        integral = float(np.mean([poisson_kernel(x, y, CTX) for y in ys]))
        assert integral + harmonic_measure_far(x, CTX.t) == pytest.approx(1.0, abs=1e-8)

    def test_rejects_boundary_x(self):
        with pytest.raises(ValueError):
            poisson_kernel(0.3 + 0j, 0.5, CTX)


class TestExcursionKernel:
    def test_symmetry(self):
        assert excursion_kernel(0.1, 0.62, CTX) == pytest.approx(
            excursion_kernel(0.62, 0.1, CTX), abs=1e-12
        )

    def test_pole_normalization(self):
        for eps in (1e-2, 1e-3):
            diff = excursion_kernel(0.3 + eps, 0.3, CTX) - 1 / (math.pi * eps**2)
            assert abs(diff) < 1.5  # bounded regular part

    @pytest.mark.parametrize("t", [0.8, 1.0, 2.0, 3.0])
    def test_image_sum_oracle(self, t):
        ctx = ThetaContext(t)
        lhs = excursion_kernel(0.15, 0.7, ctx)
        rhs = excursion_kernel_image_sum(0.15, 0.7, t)
        assert lhs == pytest.approx(rhs, abs=1e-10)

    def test_strip_limit(self):
        # t -> infinity: periodized half-plane kernel, approached at rate 1/t
        u = 0.31
        target = sum(1 / (math.pi * (u + k) ** 2) for k in range(-400, 401))
        prev = None
        for t in (2.0, 4.0):
            err = abs(excursion_kernel(0.5, 0.5 - u, ThetaContext(t)) - target)
            assert err < 2.0 / t
            if prev is not None:
                assert err < prev
            prev = err

    def test_coincident_points_rejected(self):
        with pytest.raises(ValueError):
            excursion_kernel(0.3, 0.3, CTX)

    @pytest.mark.parametrize("t", [0.5, 1.0, 2.0])
    def test_parameter_sweep_symmetry(self, t):
        ctx = ThetaContext(t)
        for (x, y) in ((0.05, 0.5), (0.2, 0.9)):
            assert excursion_kernel(x, y, ctx) == pytest.approx(
                excursion_kernel(y, x, ctx), abs=1e-12
            )


class TestSchwarzian:
    def test_definition(self):
        S = schwarzian_connection(CTX)
        expected = 6 * (
            -CTX.theta_at_zero(3) / (3 * CTX.theta_at_zero(1)) - 2 * math.pi / CTX.t
        )
        assert S == expected

    @pytest.mark.parametrize("t", [0.7, 1.0, 1.5])
    def test_eta_route(self, t):
        ctx = ThetaContext(t)
        S6 = schwarzian_connection(ctx) / 6
        assert S6 == pytest.approx(
            -4 * math.pi * eta_log_derivative(t) - 2 * math.pi / t, abs=1e-8
        )

    def test_bergman(self):
        assert bergman_connection(CTX) == pytest.approx(
            -2 * CTX.theta_at_zero(3) / CTX.theta_at_zero(1), abs=1e-12
        )


class TestTangentCoordinates:
    def setup_method(self):
        self.chart = AnnulusChart(1.0, [0.2, 0.5, 0.8], jet_depth=3)

    def test_dt_exact_values(self):
        assert self.chart.tangent_coordinates(-2)["dt"] == 2 * math.pi
        for n in (-3, -4, -5):
            assert self.chart.tangent_coordinates(n)["dt"] == 0.0

    def test_translation_class(self):
        tc = self.chart.tangent_coordinates(-1)
        assert tc["dz"] == [1.0, 0.0, 0.0] and tc["dt"] == 0.0

    def test_c0_diagonal_is_v_at_origin(self):
        tc = self.chart.tangent_coordinates(-2)
        assert -tc["dz"][0] == pytest.approx(v_field(0.2, 0.0, CTX), abs=1e-10)

    def test_spectator_coefficients_are_v0(self):
        tc = self.chart.tangent_coordinates(-2)
        assert tc["dz"][1] == pytest.approx(
            complex(v0_field(0.5, 0.2, CTX)).real, abs=1e-12
        )
        tc3 = self.chart.tangent_coordinates(-3)
        assert tc3["dz"][2] == pytest.approx(
            complex(v0_y_derivative(0.8, 0.2, CTX, 1)).real, abs=1e-10
        )

    def test_spectators_must_be_distinct(self):
        with pytest.raises(ValueError):
            AnnulusChart(1.0, [0.2, 0.2])
        with pytest.raises(ValueError):
            AnnulusChart(1.0, [0.0])
