"""Half-plane Witt/Virasoro generators against the explicit expansions."""

from fractions import Fraction as F

import pytest

from virasoro.diffop import DiffOperator
from virasoro.halfplane import (
    HalfPlaneChart,
    InsufficientJetOrder,
    bpz_operator,
    bracket_span,
    delta21,
    kac_weight,
    sle_parameters,
    virasoro_relation_residual,
    witt_relation_residual,
)
from virasoro.polynomials import MultiPoly, poly_ring

G = poly_ring(("a2", "a3", "a4"))
A2, A3, A4 = G["a2"], G["a3"], G["a4"]


class TestVectorFieldCoeffs:
    """The b_{j,n} coefficients of w^{n+1} d/dw = sum b_{j,n} z^{j+1} d/dz."""

    def test_field_inverse_square(self):
        ch = HalfPlaneChart(1, 6)
        b = ch.vector_field_coeffs(-2, 1)
        assert b[0] == 1
        assert b[1] == -A2 * 3
        assert b[2] == A2**2 * 7 - A3 * 4
        assert b[3] == -(A2**3) * 15 + A2 * A3 * 19 - A4 * 5

    def test_field_inverse_first(self):
        b = HalfPlaneChart(1, 6).vector_field_coeffs(-1, 2)
        assert b[0] == 1
        assert b[1] == -A2 * 2
        assert b[2] == A2**2 * 4 - A3 * 3
        assert b[3] == -(A2**3) * 8 + A2 * A3 * 12 - A4 * 4

    def test_field_scaling(self):
        b = HalfPlaneChart(1, 6).vector_field_coeffs(0, 2)
        assert b[0] == 1
        assert b[1] == -A2
        assert b[2] == A2**2 * 2 - A3 * 2

    def test_field_inverse_cube(self):
        b = HalfPlaneChart(1, 7).vector_field_coeffs(-3, 1)
        assert b[0] == 1
        assert b[1] == -A2 * 4
        assert b[2] == A2**2 * 11 - A3 * 5
        assert b[3] == -(A2**3) * 26 + A2 * A3 * 28 - A4 * 6

    def test_leading_is_one(self):
        ch = HalfPlaneChart(1, 8)
        for n in range(-3, 4):
            assert ch.vector_field_coeffs(n, n)[0] == 1

    def test_insufficient_order(self):
        with pytest.raises(InsufficientJetOrder):
            HalfPlaneChart(1, 4).vector_field_coeffs(-2, 5)


class TestGenerators:
    def test_ell_plus_one(self):
        op = HalfPlaneChart(0, 4).witt(1)
        assert op.coefficient((("a2", 1),)) == MultiPoly.constant(-1)
        assert op.coefficient((("a3", 1),)) == -A2 * 2

    def test_ell_zero(self):
        op = HalfPlaneChart(2, 4).witt(0)
        z1 = MultiPoly.var("z1", laurent=True)
        assert op.coefficient((("z1", 1),)) == -z1
        assert op.coefficient((("a2", 1),)) == A2
        assert op.coefficient((("a3", 1),)) == A3 * 2

    def test_ell_minus_one(self):
        op = HalfPlaneChart(2, 5).witt(-1)
        z1 = MultiPoly.var("z1", laurent=True)
        assert op.coefficient((("z1", 1),)) == A2 * z1 * 2 - 1
        assert op.coefficient((("a2", 1),)) == A3 * 3 - A2**2 * 4
        assert op.coefficient((("a3", 1),)) == A4 * 4 - A2 * A3 * 6

    def test_ell_minus_two_spectator_part(self):
        op = HalfPlaneChart(1, 5).witt(-2)
        c = op.coefficient((("z1", 1),))
        z1inv = MultiPoly(("z1",), {(-1,): 1}, ("z1",))
        z1 = MultiPoly.var("z1", laurent=True)
        assert c == -z1inv + A2 * 3 - (A2**2 * 7 - A3 * 4) * z1

    def test_ell_minus_two_jet_part(self):
        op = HalfPlaneChart(1, 5).witt(-2)
        assert op.coefficient((("a2", 1),)) == (
            A2**3 * 15 - A2 * A3 * 19 + A4 * 5
        )

    def test_virasoro_corrections(self):
        ch = HalfPlaneChart(1, 8)
        c = ch.central_charge
        d2 = ch.virasoro(-2) - ch.witt(-2)
        assert d2.coefficient(()) == (A2**2 - A3) * c * F(1, 2)
        d3 = ch.virasoro(-3) - ch.witt(-3)
        assert d3.coefficient(()) == (
            -(A2**3) * 8 + A2 * A3 * 12 - A4 * 4
        ) * c * F(1, 2)
        assert (ch.virasoro(2) - ch.witt(2)).is_zero()


class TestCommutators:
    @pytest.mark.parametrize("m,n", [(1, -1), (-1, -2), (2, -2), (3, -3), (0, 2)])
    def test_witt_pairs(self, m, n):
        assert witt_relation_residual(m, n, n_spectators=2, k_test=6).is_zero()

    def test_witt_example_small_chart(self):
        # [ell_1, ell_-1] = 2 ell_0 on the chart with k = 3, N = 2
        assert witt_relation_residual(1, -1, n_spectators=2, k_test=3).is_zero()

    @pytest.mark.parametrize("m,n", [(2, -2), (-1, -2), (1, 1 - 2)])
    def test_virasoro_pairs(self, m, n):
        assert virasoro_relation_residual(m, n, n_spectators=2, k_test=6).is_zero()

    def test_central_term_value(self):
        # [L_2, L_-2] - 4 L_0 = c/2
        ch = HalfPlaneChart(2, 12)
        comm = ch.virasoro(2).bracket(ch.virasoro(-2))
        resid = comm - ch.virasoro(0).scale(4)
        from virasoro.halfplane import restrict_to_test_order

        resid = restrict_to_test_order(resid, 8)
        assert resid.order() == 0
        assert resid.coefficient(()) == ch.central_charge * F(1, 2)


class TestSchwarzianAxioms:
    def test_axioms(self):
        ch = HalfPlaneChart(1, 7)
        S = ch.schwarzian_poly()
        assert ch.witt(0).apply_poly(S) == S * 2
        assert ch.witt(1).apply_poly(S).is_zero()
        assert ch.witt(2).apply_poly(S) == MultiPoly.constant(6)


class TestKacWeight:
    def test_symbolic_h21(self):
        tau = MultiPoly.var("tau")
        assert kac_weight(2, 1, tau) == tau * F(3, 4) - F(1, 2)

    def test_kappa_eight_thirds(self):
        assert kac_weight(2, 1, F(3, 2)) == F(5, 8)

    def test_identity_weight(self):
        assert kac_weight(1, 1, F(7, 3)) == 0

    def test_zero_tau_rejected(self):
        with pytest.raises(ZeroDivisionError):
            kac_weight(2, 1, 0)

    def test_symmetry(self):
        # h_{r,s}(tau) = h_{s,r}(1/tau)
        assert kac_weight(3, 2, F(5, 7)) == kac_weight(2, 3, F(7, 5))


def _target_operator(chart, tau):
    tgt = DiffOperator.zero()
    zn = chart.spectator_names
    for zi in zn:
        for zj in zn:
            mi = ((zi, 1), (zj, 1)) if zi != zj else ((zi, 2),)
            tgt = tgt + DiffOperator({mi: MultiPoly.constant(1)})
        tgt = tgt + DiffOperator({((zi, 1),): MultiPoly((zi,), {(-1,): 1}, (zi,)) * tau})
    return tgt


class TestDelta21:
    def test_displayed_general_form(self):
        ch = HalfPlaneChart(2, 6)
        tau, h, c = ch.tau, ch.seed_weight, ch.central_charge
        lhs = ch.apply_to_section(delta21(ch))

        def sect(op):
            return ch.apply_to_section(op)

        zn = ch.spectator_names
        dd = DiffOperator.zero()
        for zi in zn:
            for zj in zn:
                mi = ((zi, 1), (zj, 1)) if zi != zj else ((zi, 2),)
                dd = dd + DiffOperator({mi: MultiPoly.constant(1)})
        zd = DiffOperator.zero()
        d1 = DiffOperator.zero()
        for zi in zn:
            zd = zd + DiffOperator({((zi, 1),): MultiPoly((zi,), {(-1,): 1}, (zi,))})
            d1 = d1 + DiffOperator({((zi, 1),): MultiPoly.constant(1)})
        coef_d = A2 * (2 * (2 * h + 1) - tau * 3)
        coef_0 = h * (
            A2**2 * 8 - A3 * 6 + A2**2 * h * 4 - tau * (A2**2 * 7 - A3 * 4)
        ) + tau * c * F(1, 2) * (A3 - A2**2)
        rhs = sect(dd) + tau * sect(zd) + coef_d * sect(d1) + coef_0
        assert (lhs - rhs).is_zero()

    @pytest.mark.parametrize("kappa", [2, F(8, 3), 3, 4])
    def test_bpz_reduction(self, kappa):
        tau, h, c = sle_parameters(kappa)
        ch = HalfPlaneChart(3, 6, seed_weight=h, central_charge=c, tau=tau)
        lhs = ch.apply_to_section(delta21(ch))
        rhs = ch.apply_to_section(_target_operator(ch, tau))
        assert (lhs - rhs).is_zero()

    def test_weight_polynomial_vanishes_iff_kac(self):
        ch = HalfPlaneChart(1, 6)
        applied = ch.apply_to_section(delta21(ch))
        poly = applied.coefficient_of("z1", 0)
        assert not poly.is_zero()
        for tau in (F(3, 2), F(4, 3), 2):
            h21 = kac_weight(2, 1, tau)
            c = h21 * (12 / F(tau) - 8)
            assert poly.subs({"tau": tau, "h": h21, "c": c}).is_zero()
            assert not poly.subs({"tau": tau, "h": h21 + F(1, 7), "c": c}).is_zero()


class TestWeightReduction:
    """ell_n acting on a weight-h section, modulo ell_0 f = h f."""

    def setup_method(self):
        self.ch = HalfPlaneChart(2, 6)
        self.h = self.ch.seed_weight
        zn = self.ch.spectator_names
        self.sum_d = DiffOperator.zero()
        self.sum_zd = DiffOperator.zero()
        self.sum_dd = DiffOperator.zero()
        for zi in zn:
            self.sum_d = self.sum_d + DiffOperator({((zi, 1),): MultiPoly.constant(1)})
            self.sum_zd = self.sum_zd + DiffOperator(
                {((zi, 1),): MultiPoly((zi,), {(-1,): 1}, (zi,))}
            )
            for zj in zn:
                mi = ((zi, 1), (zj, 1)) if zi != zj else ((zi, 2),)
                self.sum_dd = self.sum_dd + DiffOperator({mi: MultiPoly.constant(1)})

    def sect(self, op):
        return self.ch.apply_to_section(op)

    def test_ell_minus_one(self):
        lhs = self.sect(self.ch.witt(-1))
        assert (lhs - (-self.sect(self.sum_d) - A2 * self.h * 2)).is_zero()

    def test_ell_minus_two(self):
        lhs = self.sect(self.ch.witt(-2))
        rhs = (
            -self.sect(self.sum_zd)
            + self.sect(self.sum_d) * A2 * 3
            + (A2**2 * 7 - A3 * 4) * self.h
        )
        assert (lhs - rhs).is_zero()

    def test_ell_minus_one_squared(self):
        lhs = self.sect(self.ch.witt(-1).compose(self.ch.witt(-1)))
        rhs = (
            self.sect(self.sum_dd)
            + A2 * (self.h * 2 + 1) * 2 * self.sect(self.sum_d)
            + (A2**2 * 4 - A3 * 3 + A2**2 * self.h * 2) * self.h * 2
        )
        assert (lhs - rhs).is_zero()


class TestBpzOperator:
    def test_weight_zero(self):
        ch = HalfPlaneChart(1, 4, spectator_weights=(0,), seed_weight=0, tau=F(4, 3))
        op = bpz_operator(ch)
        assert op.apply_poly(MultiPoly.constant(1)).is_zero()
        z1inv = MultiPoly(("z1",), {(-1,): 1}, ("z1",))
        assert op.coefficient((("z1", 1),)) == z1inv * F(4, 3)
        assert op.coefficient((("z1", 2),)) == MultiPoly.constant(1)

    @pytest.mark.parametrize("tau", [2, F(3, 2), F(4, 3), 1])
    def test_annihilates_power_at_kac_weight(self, tau):
        h21 = kac_weight(2, 1, F(tau))
        ch = HalfPlaneChart(
            1, 4, spectator_weights=(h21,), seed_weight=h21, tau=F(tau)
        )
        assert ch.apply_to_section(bpz_operator(ch)).is_zero()

    def test_generic_weight_residual(self):
        tau = F(4, 3)
        kappa = 4 / tau
        h = MultiPoly.var("h")
        ch = HalfPlaneChart(1, 4, spectator_weights=(h,), seed_weight=h, tau=tau)
        resid = ch.apply_to_section(bpz_operator(ch))
        expect = (
            MultiPoly(("z1",), {(-2,): 1}, ("z1",))
            * h
            * (kappa * (2 * h + 1) - 6)
            * (F(2) / kappa)
        )
        assert (resid - expect).is_zero()


class TestBracketSpan:
    def test_chain_to_five(self):
        assert bracket_span(HalfPlaneChart(1, 9), 5) == [-1, -2, -3, -4, -5]

    def test_chain_to_three(self):
        assert bracket_span(HalfPlaneChart(2, 6), 3) == [-1, -2, -3]

    def test_insufficient_jet_order(self):
        with pytest.raises(InsufficientJetOrder):
            bracket_span(HalfPlaneChart(1, 6), 5)


class TestSpectatorWitt:
    """The z-only operators ell^0_n represent the Witt algebra on their own."""

    def _ell0(self, chart, n):
        out = DiffOperator.zero()
        for i, zn in enumerate(chart.spectator_names):
            mono = MultiPoly((zn,), {(n + 1,): 1}, (zn,))
            out = out + DiffOperator({((zn, 1),): -mono})
            w = chart.spectator_weights[i]
            if w != 0:
                out = out + DiffOperator.multiplication(
                    MultiPoly((zn,), {(n,): 1}, (zn,)) * (-(n + 1) * w)
                )
        return out

    @pytest.mark.parametrize("m,n", [(1, -1), (2, -2), (-2, -1), (3, 0), (2, -3)])
    def test_witt_relations_with_weights(self, m, n):
        ch = HalfPlaneChart(2, 4, spectator_weights=(F(1, 2), F(5, 8)))
        comm = self._ell0(ch, m).bracket(self._ell0(ch, n))
        target = self._ell0(ch, m + n).scale(m - n)
        assert (comm - target).is_zero()


def test_operator_canonical_round_trip():
    ch = HalfPlaneChart(2, 5)
    text = ch.witt(-2).canonical()
    assert "dz1" in text and "::" in text
    assert text == ch.witt(-2).canonical()
