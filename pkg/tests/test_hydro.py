"""Bauer-Bernard generators at infinity: closed form, contours, relations."""

from fractions import Fraction as F

import pytest

from virasoro.diffop import DiffOperator
from virasoro.hydro import (
    HydroChart,
    InsufficientDepth,
    bb_virasoro_sweep,
    bb_witt,
    bb_witt_sweep,
    two_region_coeff,
)
from virasoro.polynomials import MultiPoly


class TestClosedForm:
    def test_ell_two_structure(self):
        ch = HydroChart(0, 6)
        op = ch.witt(2, route="closed")
        # ell_2 = -d/df_{-2} + f_{-2} d/df_{-4} + 2 f_{-3} d/df_{-5}
        assert op.coefficient((("fm2", 1),)) == MultiPoly.constant(-1)
        assert op.coefficient((("fm4", 1),)) == ch._gens["fm2"]
        assert op.coefficient((("fm5", 1),)) == ch._gens["fm3"] * 2

    def test_structural_f_minus_one_skipped(self):
        op = HydroChart(0, 6).witt(3, route="closed")
        # the ell = -n-1 slot carries f_{-1} = 0
        assert op.coefficient((("fm4", 1),)).is_zero()

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_contour_matches_closed_form(self, n):
        ch = HydroChart(1, 7)
        assert ch.witt(n, route="closed") == ch.witt(n, route="contour")


class TestContourGenerators:
    def test_scaling_field_at_identity(self):
        ch = HydroChart(2, 5)
        op = ch.witt(0)
        sub = {f: 0 for f in ch.f_names}
        x1 = MultiPoly.var("x1")
        assert op.coefficient((("x1", 1),)).subs(sub) == x1

    def test_translation_at_identity(self):
        ch = HydroChart(1, 5)
        sub = {f: 0 for f in ch.f_names}
        assert ch.witt(1).coefficient((("x1", 1),)).subs(sub) == MultiPoly.constant(1)

    def test_derivation_kills_constants(self):
        ch = HydroChart(1, 6)
        one = MultiPoly.constant(1, ("x1",) + ch.f_names)
        for n in range(-3, 4):
            assert ch.witt(n).apply_poly(one).is_zero()

    def test_insufficient_depth(self):
        with pytest.raises(InsufficientDepth):
            HydroChart(1, 4).witt(-4)


class TestTwoRegion:
    @pytest.mark.parametrize("n,ell", [(0, -3), (1, -4), (-1, -3), (2, -4), (-2, -2)])
    def test_region_swap_differs_by_diagonal_residue(self, n, ell):
        ch = HydroChart(0, 7)
        inner = two_region_coeff(ch, ell, n, v1_inner=True)
        outer = two_region_coeff(ch, ell, n, v1_inner=False)
        j = ell + n
        if j == 0:
            expect = MultiPoly.constant(ell + n + 1)
        elif j == -1 or j < 2 - ch.depth:
            expect = MultiPoly.zero()
        else:
            expect = ch._gens[f"fm{-j}"] * (ell + n + 1)
        assert (outer - inner - expect).is_zero()

    def test_single_f_quadratic(self):
        # f with only f_{-2} active: jet coefficient at (n, ell) = (-2, -2)
        ch = HydroChart(0, 7)
        val = two_region_coeff(ch, -2, -2)
        kill = {f: 0 for f in ch.f_names if f != "fm2"}
        poly = val.subs(kill)
        assert poly.max_degree("fm2") is not None
        assert poly.max_degree("fm2") <= 2


class TestRelations:
    def test_witt_sweep(self):
        res = bb_witt_sweep(span=2, n_pts=2, depth_test=6)
        assert all(v.is_zero() for v in res.values())

    def test_virasoro_sweep(self):
        res = bb_virasoro_sweep(span=2, n_pts=2, depth_test=6)
        assert all(v.is_zero() for v in res.values())

    def test_schwarzian_at_infinity(self):
        ch = HydroChart(1, 6)
        assert ch.schwarzian_at_infinity() == ch._gens["fm2"] * (-6)

    def test_virasoro_equals_witt_at_nonnegative(self):
        ch = HydroChart(1, 6)
        for n in (-1, 0, 1, 2):
            assert ch.central_term(n) is None

    def test_central_bracket_value(self):
        ch = HydroChart(2, 8)
        comm = ch.virasoro(2).bracket(ch.virasoro(-2))
        one = MultiPoly.constant(1, ("x1",))
        applied = comm.apply_poly(one)
        at_identity = applied.subs({f: 0 for f in ch.f_names})
        assert at_identity == ch.central_charge * F(1, 2)

    def test_closure_depth_report(self):
        # the minimal depth for [L_m, L_n] to close is determined empirically:
        # comparing at depth_test requires building at depth_test + |m| + |n| (+2)
        res = bb_witt_sweep(span=3, n_pts=1, depth_test=4)
        assert all(v.is_zero() for v in res.values())


def test_bb_witt_operation_surface():
    ch = HydroChart(1, 6)
    assert bb_witt(ch, 2) == ch.witt(2)
