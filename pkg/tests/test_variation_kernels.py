"""Boundary-variation kernels Q and R: exact divisibility and circle identity."""

import pytest

from virasoro.polynomials import MultiPoly
from virasoro.variation_kernels import (
    conj_on_circle,
    difference_quotient,
    exact_div_z_minus_w,
    q_kernel,
    r_kernel,
    re_parts_agree,
    re_r_closed_form,
)


class TestDifferenceQuotient:
    @pytest.mark.parametrize("a", [-4, -1, 0, 1, 3])
    def test_defining_identity(self, a):
        z = MultiPoly(("z", "w"), {(1, 0): 1}, ("z", "w"))
        w = MultiPoly(("z", "w"), {(0, 1): 1}, ("z", "w"))
        za = MultiPoly(("z", "w"), {(a, 0): 1}, ("z", "w"))
        wa = MultiPoly(("z", "w"), {(0, a): 1}, ("z", "w"))
        assert (difference_quotient(a) * (z - w) - (za - wa)).is_zero()


class TestExactDivision:
    def test_divides(self):
        z = MultiPoly(("z", "w"), {(1, 0): 1}, ("z", "w"))
        w = MultiPoly(("z", "w"), {(0, 1): 1}, ("z", "w"))
        p = (z - w) * (z * w + 3)
        assert (exact_div_z_minus_w(p) - (z * w + 3)).is_zero()

    def test_rejects_remainder(self):
        z = MultiPoly(("z", "w"), {(1, 0): 1}, ("z", "w"))
        with pytest.raises(ValueError):
            exact_div_z_minus_w(z + 1)


class TestKernels:
    def test_r_minus_two_hand_value(self):
        # R(-2) = zw + 1/(zw)
        R = r_kernel(-2)
        expect = MultiPoly(("z", "w"), {(1, 1): 1, (-1, -1): 1}, ("z", "w"))
        assert (R - expect).is_zero()

    @pytest.mark.parametrize("n", range(-2, -7, -1))
    def test_q_removable(self, n):
        q = q_kernel(n)  # raises unless (z-w)^2 divides exactly
        assert not q.is_zero()

    @pytest.mark.parametrize("n", range(-2, -7, -1))
    def test_re_r_closed_form(self, n):
        assert re_parts_agree(n)

    def test_rejects_positive_modes(self):
        with pytest.raises(ValueError):
            q_kernel(0)
        with pytest.raises(ValueError):
            r_kernel(-1)

    def test_conj_on_circle_involution(self):
        R = r_kernel(-3)
        assert (conj_on_circle(conj_on_circle(R)) - R).is_zero()

    def test_closed_form_structure(self):
        C = re_r_closed_form(-4)
        # 2 z w sum_{i+j=2}(i+1)(j+1) z^i w^j: coefficients 2*(1*3, 2*2, 3*1)
        assert C.terms[(1, 3)] == 6
        assert C.terms[(2, 2)] == 8
        assert C.terms[(3, 1)] == 6
