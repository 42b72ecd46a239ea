"""Witt and Virasoro generators in the simply-connected uniformization chart.

The chart is (H, 0, z_1..z_N, infinity) with a marked k-jet at 0 written as
w = z(1 + a_2 z + ... + a_k z^{k-1}).  Spectator positions z_i are chart
coordinates (Laurent-allowed); jet coefficients a_2..a_k are the vertical
coordinates.  The deformation field w^{n+1} d/dw, rewritten as u(z) d/dz with
u = w^{n+1}/w'(z), splits as u = P_n + R_n: the singular-at-0 part P_n
(powers z^{j+1}, j <= 0) moves the spectators, the rest acts on the jet.

The jet action of a vertical field v(z) d/dz is  delta a_m = [z^m] (v * w');
this is the unique rule reproducing the explicit low-order generators
obtained from the expansions of w^{n+1} d/dw, and it is validated against
them in the tests.
"""

from __future__ import annotations

from fractions import Fraction

from .diffop import DiffOperator
from .polynomials import MultiPoly, as_coeff, poly_ring
from .series import ExactSeries, TruncationError


class InsufficientJetOrder(ValueError):
    """The chart's jet order cannot support the requested operator exactly."""


def _sym(value, name):
    """A chart parameter: either an exact scalar or the named formal symbol."""
    if value is None:
        return MultiPoly.var(name)
    if isinstance(value, MultiPoly):
        return value
    return as_coeff(value)


def jet_index(varname):
    """Index m of a jet variable 'a<m>', or None."""
    if varname.startswith("a") and varname[1:].isdigit():
        return int(varname[1:])
    return None


class HalfPlaneChart:
    """Chart data for (H, 0, z_1..z_N, infinity) with a marked jet at 0."""

    def __init__(
        self,
        n_spectators,
        jet_order,
        spectator_weights=None,
        seed_weight=None,
        central_charge=None,
        tau=None,
    ):
        if jet_order < 2:
            raise ValueError("jet_order must be at least 2")
        self.n_spectators = n_spectators
        self.jet_order = jet_order
        self.spectator_names = tuple(f"z{i}" for i in range(1, n_spectators + 1))
        self.jet_names = tuple(f"a{m}" for m in range(2, jet_order + 1))
        if spectator_weights is None:
            spectator_weights = (0,) * n_spectators
        self.spectator_weights = tuple(
            w if isinstance(w, MultiPoly) else as_coeff(w) for w in spectator_weights
        )
        self.seed_weight = _sym(seed_weight, "h")
        self.central_charge = _sym(central_charge, "c")
        self.tau = _sym(tau, "tau")

        self._gens = poly_ring(
            self.spectator_names + self.jet_names, laurent=self.spectator_names
        )
        # w = z + a2 z^2 + ... + ak z^k, exact to order k (higher jet unknown)
        coeffs = {1: 1}
        for m in range(2, jet_order + 1):
            coeffs[m] = self._gens[f"a{m}"]
        self.w_series = ExactSeries("z", coeffs, jet_order)
        self._witt_cache = {}
        self._vir_cache = {}

    # -- vector-field expansion ------------------------------------------------

    def field_series(self, n):
        """u(z) = w^{n+1}/w'(z) as an exact series; u = sum b_{j,n} z^{j+1}."""
        w = self.w_series
        wp = w.differentiate()
        return (w ** (n + 1)) * wp.reciprocal()

    def vector_field_coeffs(self, n, j_max):
        """The coefficients b_{j,n} of w^{n+1} d/dw = sum b_{j,n} z^{j+1} d/dz."""
        u = self.field_series(n)
        out = []
        for j in range(n, j_max + 1):
            try:
                out.append(u.coeff(j + 1))
            except TruncationError as exc:
                raise InsufficientJetOrder(
                    f"b_{{{j},{n}}} needs jet order > {self.jet_order}"
                ) from exc
        return out

    # -- generators --------------------------------------------------------------

    def witt(self, n):
        """The Witt generator ell_n as a DiffOperator on this chart."""
        if n in self._witt_cache:
            return self._witt_cache[n]
        u = self.field_series(n)
        # singular part P_n: powers z^d with d <= 1 (j <= 0)
        P = {d: c for d, c in u.coeffs.items() if d <= 1}
        coeff_map = {}
        zero_order = None
        for i, zname in enumerate(self.spectator_names):
            zi = self._gens[zname]
            p_at = MultiPoly.zero()
            dp_at = MultiPoly.zero()
            for d, c in P.items():
                mono = zi**d if d >= 0 else MultiPoly(
                    zi.vars, {tuple(d if v == zname else 0 for v in zi.vars): 1}, zi.laurent
                )
                p_at = p_at + c * mono
                if d != 0:
                    dmono = (
                        zi ** (d - 1)
                        if d - 1 >= 0
                        else MultiPoly(
                            zi.vars,
                            {tuple(d - 1 if v == zname else 0 for v in zi.vars): 1},
                            zi.laurent,
                        )
                    )
                    dp_at = dp_at + (c * d) * dmono
            coeff_map[zname] = -p_at
            wi = self.spectator_weights[i]
            if wi != 0:
                term = -(dp_at * wi)
                zero_order = term if zero_order is None else zero_order + term
        # jet action: delta a_m = [z^m] (u - P_n) * w' = [z^m] (w^{n+1} - P_n w')
        P_series = ExactSeries("z", P)
        jet_series = (self.w_series ** (n + 1)) - P_series * self.w_series.differentiate()
        jv = self.jet_valid(n)
        for m in range(2, jv + 1):
            c = jet_series.coeff(m)
            if not (isinstance(c, MultiPoly) and c.is_zero()) and c != 0:
                coeff_map[f"a{m}"] = -(
                    c if isinstance(c, MultiPoly) else MultiPoly.constant(c)
                )
        op = DiffOperator.first_order(coeff_map, zero_order)
        self._witt_cache[n] = op
        return op

    def jet_valid(self, n):
        """Largest jet index m whose d/da_m term of ell_n is provable here."""
        return self.jet_order - max(-n, 0)

    def schwarzian_poly(self):
        """S = 6 (a2^2 - a3): the half-plane Schwarzian connection S_H(w)."""
        a2 = self._gens["a2"]
        a3 = self._gens["a3"]
        return (a2 * a2 - a3) * 6

    def _apply_checked(self, op, jv, poly):
        for v in poly.involved_vars():
            m = jet_index(v)
            if m is not None and m > jv:
                raise InsufficientJetOrder(
                    f"need d/da_{m} term (jet_valid={jv}); raise the chart jet order"
                )
        return op.apply_poly(poly)

    def virasoro(self, n):
        """L_n = ell_n for n >= -1; ell_n + c (ell_-1)^{-n-2} S / (12 (-n-2)!) below."""
        if n in self._vir_cache:
            return self._vir_cache[n]
        op = self.witt(n)
        if n <= -2:
            k = -n - 2
            S = self.schwarzian_poly()
            ell_m1 = self.witt(-1)
            jv = self.jet_valid(-1)
            fact = 1
            for j in range(1, k + 1):
                S = self._apply_checked(ell_m1, jv, S)
                fact *= j
            c = self.central_charge
            corr = S * c * Fraction(1, 12 * fact)
            op = op + DiffOperator.multiplication(corr)
        self._vir_cache[n] = op
        return op

    # -- action on weight-h sections ---------------------------------------------

    def section_exponents(self):
        """Generic monomial realization of a weight-h section.

        f = prod z_i^{p_i} with p_1..p_{N-1} free symbols and
        p_N = -h - sum h_i - sum_{i<N} p_i, which encodes ell_0 f = h f.
        """
        N = self.n_spectators
        if N == 0:
            raise ValueError("needs at least one spectator; use an auxiliary one")
        ps = [MultiPoly.var(f"p{i}") for i in range(1, N)]
        h = self.seed_weight
        total = -h if isinstance(h, MultiPoly) else MultiPoly.constant(-h)
        for w in self.spectator_weights:
            total = total - w
        for p in ps:
            total = total - p
        return ps + [total]

    def apply_to_section(self, op):
        """(op f)/f for the generic weight-h section f = prod z_i^{p_i}.

        a-derivatives annihilate f (the section depends on the spectators
        only; its weight is carried by the homogeneity constraint).
        """
        ps = self.section_exponents()
        znames = self.spectator_names
        result = MultiPoly.zero()
        for mi, c in op.terms.items():
            factor = MultiPoly.constant(1)
            skip = False
            shift = {}
            for v, k in mi:
                if v in znames:
                    i = znames.index(v)
                    p = ps[i]
                    for r in range(k):
                        factor = factor * (p - r)
                    shift[v] = -k
                else:
                    skip = True  # d/da_m f = 0
                    break
            if skip or factor.is_zero():
                continue
            mono = MultiPoly(
                tuple(znames),
                {tuple(shift.get(v, 0) for v in znames): 1},
                znames,
            )
            result = result + c * factor * mono
        return result


# -- module-level operation surface ----------------------------------------------


def witt_generator(chart: HalfPlaneChart, n: int) -> DiffOperator:
    return chart.witt(n)


def virasoro_generator(chart: HalfPlaneChart, n: int) -> DiffOperator:
    return chart.virasoro(n)


def vector_field_coeffs(chart: HalfPlaneChart, n: int, j_max: int):
    return chart.vector_field_coeffs(n, j_max)


def commutator(A: DiffOperator, B: DiffOperator) -> DiffOperator:
    return A.bracket(B)


def kac_weight(r, s, tau):
    """h_{r,s}(tau) = ((r tau - s)^2 - (tau - 1)^2) / (4 tau)."""
    if r < 1 or s < 1:
        raise ValueError("Kac labels must satisfy r, s >= 1")
    if isinstance(tau, MultiPoly):
        # exact polynomial division by 4 tau: numerator is divisible by tau
        num = (tau * r - s) ** 2 - (tau - 1) ** 2
        # num = tau * q  =>  q = 3/4 tau - ... ; do synthetic division
        q = _divide_by_var(num, tau)
        return q * Fraction(1, 4)
    tau = Fraction(tau)
    if tau == 0:
        raise ZeroDivisionError("tau must be nonzero")
    return ((r * tau - s) ** 2 - (tau - 1) ** 2) / (4 * tau)


def _divide_by_var(poly: MultiPoly, var_poly: MultiPoly) -> MultiPoly:
    [(exps, _)] = var_poly.terms.items()
    (name,) = [v for v, e in zip(var_poly.vars, exps) if e]
    i = poly.vars.index(name) if name in poly.vars else None
    if i is None:
        raise ValueError("polynomial does not contain the divisor variable")
    out = {}
    for exps, c in poly.terms.items():
        if exps[i] < 1:
            raise ValueError("polynomial not divisible by the variable")
        out[exps[:i] + (exps[i] - 1,) + exps[i + 1 :]] = c
    return MultiPoly(poly.vars, out, poly.laurent)


def sle_parameters(kappa):
    """(tau, h, c) for SLE_kappa: tau=4/kappa, h=h_{2,1}, the paired charge."""
    kappa = Fraction(kappa)
    tau = 4 / kappa
    h = (6 - kappa) / (2 * kappa)
    c = (6 - kappa) * (3 * kappa - 8) / (2 * kappa)
    return tau, h, c


def delta21(chart: HalfPlaneChart) -> DiffOperator:
    """The canonical singular-vector operator L_{-1}^2 - tau L_{-2}."""
    L1 = chart.virasoro(-1)
    L2 = chart.virasoro(-2)
    tau = chart.tau
    if isinstance(tau, MultiPoly):
        return L1.compose(L1) - _scale_poly(L2, tau)
    return L1.compose(L1) - L2.scale(tau)


def _scale_poly(op, poly):
    out = DiffOperator()
    out.terms = {mi: c * poly for mi, c in op.terms.items()}
    return out


def bpz_operator(chart: HalfPlaneChart) -> DiffOperator:
    """The z-only operator from ell^0_{-n} = sum_i (-z_i^{1-n} d_i - (1-n) h_i z_i^{-n})
    substituted into the singular vector: Delta^0 = (ell^0_{-1})^2 - tau ell^0_{-2}."""

    def ell0(n):
        coeff_map = {}
        zero = MultiPoly.zero()
        for i, zname in enumerate(chart.spectator_names):
            zvars = (zname,)
            mono = lambda e: MultiPoly(zvars, {(e,): 1}, zvars)  # noqa: E731
            coeff_map[zname] = -mono(1 - n)
            wi = chart.spectator_weights[i]
            if wi != 0:
                zero = zero + mono(-n) * (-(1 - n) * wi)
        return DiffOperator.first_order(coeff_map, zero if not zero.is_zero() else None)

    e1 = ell0(1)
    e2 = ell0(2)
    tau = chart.tau
    if isinstance(tau, MultiPoly):
        return e1.compose(e1) - _scale_poly(e2, tau)
    return e1.compose(e1) - e2.scale(tau)


def restrict_to_test_order(op: DiffOperator, k_test: int) -> DiffOperator:
    """Drop derivative terms in jet variables beyond a_k_test."""

    def keep(mi):
        for v, _ in mi:
            m = jet_index(v)
            if m is not None and m > k_test:
                return False
        return True

    return op.restrict(keep)


def witt_relation_residual(m, n, n_spectators=3, k_test=10, weights=None):
    """[ell_m, ell_n] - (m - n) ell_{m+n}, restricted to the provable jet order.

    Operators are built on an enlarged internal chart (jet order
    k_test + m^- + n^-) so that every retained term is exact.
    """
    K = k_test + max(-m, 0) + max(-n, 0)
    chart = HalfPlaneChart(n_spectators, K, spectator_weights=weights)
    comm = chart.witt(m).bracket(chart.witt(n))
    target = chart.witt(m + n).scale(m - n)
    return restrict_to_test_order(comm - target, k_test)


def virasoro_relation_residual(m, n, n_spectators=3, k_test=10, central_charge=None):
    """[L_m, L_n] - (m-n) L_{m+n} - (c/12) m (m^2-1) delta_{m+n,0}, restricted."""
    K = k_test + max(-m, 0) + max(-n, 0) + 2
    chart = HalfPlaneChart(n_spectators, K, central_charge=central_charge)
    comm = chart.virasoro(m).bracket(chart.virasoro(n))
    target = chart.virasoro(m + n).scale(m - n)
    if m + n == 0:
        c = chart.central_charge
        central = Fraction(m * (m * m - 1), 12)
        extra = (
            c * central if isinstance(c, MultiPoly) else MultiPoly.constant(c * central)
        )
        target = target + DiffOperator.multiplication(extra)
    return restrict_to_test_order(comm - target, k_test)


def witt_sweep(span=3, n_spectators=3, k_test=10, weights=None):
    """Residuals of [ell_m, ell_n] = (m-n) ell_{m+n} over |m|,|n| <= span.

    One shared chart at jet order k_test + 2*span keeps every retained term
    exact for all pairs; residuals are antisymmetric so only m <= n is
    computed.  Returns {(m, n): residual DiffOperator}.
    """
    K = k_test + 2 * span
    chart = HalfPlaneChart(n_spectators, K, spectator_weights=weights)
    out = {}
    for m in range(-span, span + 1):
        for n in range(m, span + 1):
            if m == n:
                out[(m, n)] = DiffOperator.zero()
                continue
            comm = chart.witt(m).bracket(chart.witt(n))
            target = chart.witt(m + n).scale(m - n)
            res = restrict_to_test_order(comm - target, k_test)
            out[(m, n)] = res
            out[(n, m)] = -res
    return out


def virasoro_sweep(span=3, n_spectators=3, k_test=10, central_charge=None):
    """Residuals of the Virasoro relations over |m|,|n| <= span (shared chart)."""
    K = k_test + 2 * span + 2
    chart = HalfPlaneChart(n_spectators, K, central_charge=central_charge)
    c = chart.central_charge
    out = {}
    for m in range(-span, span + 1):
        for n in range(m, span + 1):
            if m == n:
                out[(m, n)] = DiffOperator.zero()
                continue
            comm = chart.virasoro(m).bracket(chart.virasoro(n))
            target = chart.virasoro(m + n).scale(m - n)
            if m + n == 0:
                central = Fraction(m * (m * m - 1), 12)
                extra = (
                    c * central
                    if isinstance(c, MultiPoly)
                    else MultiPoly.constant(c * central)
                )
                target = target + DiffOperator.multiplication(extra)
            res = restrict_to_test_order(comm - target, k_test)
            out[(m, n)] = res
            out[(n, m)] = -res
    return out


def bracket_span(chart: HalfPlaneChart, n_max: int):
    """Check ell_{-j-1} = [ell_{-1}, ell_{-j}]/(j-1) for 2 <= j < n_max.

    Returns the list of confirmed generators ell_{-1}..ell_{-n_max}; raises
    InsufficientJetOrder when the chart cannot support the comparison.
    """
    if chart.jet_order < n_max + 3:
        raise InsufficientJetOrder(
            f"bracket_span(n_max={n_max}) needs jet order >= {n_max + 3}"
        )
    k_test = chart.jet_order - n_max - 1
    confirmed = [-1, -2]
    for j in range(2, n_max):
        lhs = chart.witt(-1).bracket(chart.witt(-j))
        rhs = chart.witt(-j - 1).scale(j - 1)
        if not restrict_to_test_order(lhs - rhs, k_test).is_zero():
            raise AssertionError(f"bracket chain failed at j={j}")
        confirmed.append(-j - 1)
    return confirmed
