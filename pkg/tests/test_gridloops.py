"""Discrete random-walk loop measure: exact identities on grid domains."""

import math

import pytest

from virasoro.gridloops import (
    GridDomain,
    conformal_refinement_report,
    cut_line_identity,
    discrete_excursion_kernel,
    discrete_loop_mass,
    loop_mass_two_sets,
    mass_hitting_path,
    total_loop_mass,
    two_hull_mass,
)


class TestHandValues:
    def test_two_site(self):
        D = GridDomain([(0, 0), (1, 0)])
        assert discrete_loop_mass(D, [(0, 0)]) == pytest.approx(
            -math.log(15 / 16), abs=1e-15
        )

    def test_empty_hit_set(self):
        D = GridDomain([(0, 0), (1, 0)])
        assert discrete_loop_mass(D, []) == 0.0

    def test_single_site_domain(self):
        # lone vertex: no loops at all
        D = GridDomain([(0, 0)])
        assert total_loop_mass(D) == 0.0


class TestAdditivity:
    def test_disjoint_union_rule(self):
        D = GridDomain.rectangle(9, 7)
        K1 = [(2, 2), (2, 3)]
        K2 = [(6, 4)]
        lhs = discrete_loop_mass(D, K1 + K2)
        rhs = discrete_loop_mass(D, K1) + discrete_loop_mass(D.subdomain(K1), K2)
        assert lhs == pytest.approx(rhs, abs=1e-13)

    def test_large_grid_additivity(self):
        D = GridDomain.rectangle(40, 40)
        K1 = [(10, 10), (10, 11), (11, 10)]
        K2 = [(30, 5), (30, 6)]
        lhs = discrete_loop_mass(D, K1 + K2)
        rhs = discrete_loop_mass(D, K1) + discrete_loop_mass(D.subdomain(K1), K2)
        assert abs(lhs - rhs) < 1e-12

    def test_monotonicity(self):
        D = GridDomain.rectangle(9, 7)
        K1 = [(2, 2)]
        K2 = [(2, 2), (5, 5)]
        assert discrete_loop_mass(D, K2) > discrete_loop_mass(D, K1)
        bigger = GridDomain.rectangle(11, 9, x0=-1, y0=-1)
        assert discrete_loop_mass(bigger, K1) > discrete_loop_mass(D, K1)

    def test_green_update_route(self):
        D = GridDomain.rectangle(9, 7)
        path = [(1, 1), (2, 1), (3, 1), (3, 2), (4, 2)]
        assert mass_hitting_path(D, path) == pytest.approx(
            discrete_loop_mass(D, path), abs=1e-12
        )


class TestCutLine:
    def test_cut_line_identity_small(self):
        D = GridDomain.rectangle(12, 8)
        lhs, rhs = cut_line_identity(D, [(6, j) for j in range(8)])
        assert abs(lhs - rhs) < 1e-12

    def test_cut_line_identity_40(self):
        D = GridDomain.rectangle(40, 40)
        lhs, rhs = cut_line_identity(D, [(20, j) for j in range(40)])
        assert abs(lhs - rhs) < 1e-12

    def test_cut_must_disconnect(self):
        D = GridDomain.rectangle(8, 8)
        with pytest.raises(ValueError):
            cut_line_identity(D, [(4, j) for j in range(4)])


class TestExcursionKernel:
    def test_symmetry_and_positivity(self):
        D = GridDomain.rectangle(9, 7)
        a = discrete_excursion_kernel(D, (3, -1), (6, -1))
        b = discrete_excursion_kernel(D, (6, -1), (3, -1))
        assert a == pytest.approx(b, abs=1e-15)
        assert a > 0


class TestConformal:
    def test_translation_invariance_exact(self):
        D = GridDomain.rectangle(9, 7)
        Dt = GridDomain.rectangle(9, 7, x0=100, y0=50)
        m1 = discrete_loop_mass(D, [(2, 2), (2, 3)])
        m2 = discrete_loop_mass(Dt, [(102, 52), (102, 53)])
        assert m1 == m2

    def test_refinement_convergence_and_negative_control(self):
        rep = conformal_refinement_report(1.0, 2.0, (8, 16, 32))
        d1 = abs(rep["a"][16] - rep["a"][8])
        d2 = abs(rep["a"][32] - rep["a"][16])
        assert d2 < d1  # same modulus: differences shrink under refinement
        # different moduli: the two-hull masses stay apart
        assert abs(rep["a"][32] - rep["b"][32]) > 10 * d2

    def test_two_hull_mass_positive(self):
        assert two_hull_mass(1.0, 16) > 0


class TestGridFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "grid.txt"
        path.write_text("# demo\n0 0\n1 0\n2 0\n")
        D = GridDomain.from_file(path)
        assert len(D) == 3
        assert (1, 0) in D

    def test_boundary(self):
        D = GridDomain([(0, 0)])
        assert set(D.boundary()) == {(1, 0), (-1, 0), (0, 1), (0, -1)}
