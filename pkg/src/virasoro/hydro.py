"""Witt/Virasoro generators in hydrodynamically normalized coordinates at infinity.

The chart is (H, x_1..x_n, infinity) with the local coordinate at infinity
parameterized by f(u) = u + 0 + f_{-2}/u + f_{-3}/u^2 + ...  (f_0 = 1 and
f_{-1} = 0 are structural).  All contour integrals are realized as exact
coefficient extraction on descending series; a series g(u) = sum g_d u^d is
stored in the reciprocal variable s = 1/u, so that [u^{-1}] g = [s^1] G.

The double-contour coefficients are extracted with the v_1 contour inside the
v_2 contour, i.e. (f(v_1)-f(v_2))^{-1} expanded as a geometric series in
f(v_1)/f(v_2); this is the ordering that reproduces the closed form for
n >= 2 (checked exactly in the tests) and the Witt relations.
"""

from __future__ import annotations

from fractions import Fraction

from .diffop import DiffOperator
from .polynomials import MultiPoly, as_coeff, poly_ring
from .series import ExactSeries, TruncationError


class InsufficientDepth(ValueError):
    """The chart's jet depth cannot support the requested operator exactly."""


def f_index(varname):
    """Index j (negative) of a jet variable 'fm<k>' = f_{-k}, or None."""
    if varname.startswith("fm") and varname[2:].isdigit():
        return -int(varname[2:])
    return None


def f_name(j):
    return f"fm{-j}"


class HydroChart:
    """Marked points x_1..x_n plus jet coordinates f_{-2}..f_{1-K} at infinity."""

    def __init__(self, n_pts, depth, central_charge=None):
        if depth < 3:
            raise ValueError("depth must be at least 3")
        self.n_pts = n_pts
        self.depth = depth
        self.x_names = tuple(f"x{i}" for i in range(1, n_pts + 1))
        self.f_names = tuple(f_name(j) for j in range(-2, -depth, -1))
        if central_charge is None:
            self.central_charge = MultiPoly.var("c")
        elif isinstance(central_charge, MultiPoly):
            self.central_charge = central_charge
        else:
            self.central_charge = as_coeff(central_charge)
        self._gens = poly_ring(self.x_names + self.f_names)
        # s-representation of f: s^{-1} + f_{-2} s + ... + f_{1-K} s^{K-2}
        coeffs = {-1: 1}
        for j in range(-2, -depth, -1):
            coeffs[-j - 1] = self._gens[f_name(j)]
        self.f_s = ExactSeries("s", coeffs, depth - 2)
        self._witt_cache = {}
        self._vir_cache = {}
        self._fpow = [ExactSeries("s", {0: 1}, None)]  # f^k
        self._finvpow = []  # f^{-k-1}
        self._fprime2 = None

    # -- descending-series helpers ------------------------------------------------

    @staticmethod
    def u_deriv(G):
        """s-representation of d/du: g'(u) <-> -s^2 dG/ds."""
        return -G.differentiate().shift(2)

    def f_prime(self):
        return self.u_deriv(self.f_s)

    def extract(self, G):
        """[u^{-1}] of a descending series = its s^1 coefficient."""
        return G.coeff(1)

    def f_valid(self, n):
        """Deepest f-index whose d/df_j term of ell_n is provable here."""
        return 1 - (self.depth + min(n, 0))

    def _fp2(self):
        if self._fprime2 is None:
            fp = self.f_prime()
            self._fprime2 = fp * fp
            self._Ck = {}
        return self._fprime2

    def _C(self, k):
        """Cached f^k * f'^2."""
        fp2 = self._fp2()
        if k not in self._Ck:
            self._Ck[k] = self._f_power(k) * fp2
        return self._Ck[k]

    def _f_power(self, k):
        while len(self._fpow) <= k:
            self._fpow.append(self._fpow[-1] * self.f_s)
        return self._fpow[k]

    def _finv_power(self, k):
        """f^{-k-1} for k >= 0."""
        if not self._finvpow:
            self._finvpow.append(self.f_s.reciprocal())
        while len(self._finvpow) <= k:
            self._finvpow.append(self._finvpow[-1] * self._finvpow[0])
        return self._finvpow[k]

    # -- generators ----------------------------------------------------------------

    def x_polynomial(self, n):
        """P_n(x) = (1/2 pi i) oint u^{1-n} f'(u)^2 / (f(u)-x) du, x a symbol.

        Expanding 1/(f(u)-x) = sum_k x^k f(u)^{-k-1} (x inside the contour)
        gives a polynomial of degree <= 1-n; empty for n >= 2.
        """
        if n >= 2:
            return {}
        fp2 = self._fp2()
        out = {}
        for k in range(0, 1 - n + 1):
            try:
                # [s^1]((f^{-k-1} fp^2) s^{n-1}) = (f^{-k-1} fp^2) coeff at 2-n
                val = (self._finv_power(k) * fp2).coeff(2 - n)
            except TruncationError as exc:
                raise InsufficientDepth(
                    f"x-part of ell_{n} needs depth > {self.depth}"
                ) from exc
            if not _zero(val):
                out[k] = val
        return out

    def jet_coefficient(self, n, ell):
        """D_{n,ell}: the d/df_ell coefficient of ell_n by two-variable extraction."""
        kmin = max(0, n - 2)
        kmax = -ell - 2
        total = MultiPoly.zero()
        for k in range(kmin, kmax + 1):
            try:
                # a = [s^1]((f^k fp^2) s^{n-1}), b = [s^1](f^{-k-1} s^{ell+2})
                a = self._C(k).coeff(2 - n)
                b = self._finv_power(k).coeff(-ell - 1)
            except TruncationError as exc:
                raise InsufficientDepth(
                    f"d/df_{ell} coefficient of ell_{n} needs depth > {self.depth}"
                ) from exc
            prod = _mul(a, b)
            if not _zero(prod):
                total = total + prod
        return -total

    def witt(self, n, route="auto"):
        """ell_n as a DiffOperator; route 'closed' uses the n>=2 closed form."""
        key = (n, route)
        if key in self._witt_cache:
            return self._witt_cache[key]
        if route == "auto":
            route = "closed" if n >= 2 else "contour"
        if route == "closed":
            if n < 2:
                raise ValueError("closed form is only valid for n >= 2")
            op = self._witt_closed(n)
        else:
            op = self._witt_contour(n)
        self._witt_cache[key] = op
        return op

    def _witt_closed(self, n):
        # ell_n = - sum_{ell <= -n} (ell + n + 1) f_{ell+n} d/df_ell, f_0=1, f_{-1}=0
        coeff_map = {}
        for ell in range(-n, -self.depth, -1):
            j = ell + n
            w = ell + n + 1
            if w == 0:
                continue
            if j == 0:
                c = MultiPoly.constant(-w)
            elif j == -1:
                continue
            else:
                c = self._gens[f_name(j)] * (-w)
            coeff_map[f_name(ell)] = c
        return DiffOperator.first_order(coeff_map)

    def _witt_contour(self, n):
        coeff_map = {}
        xpoly = self.x_polynomial(n)
        for xnm in self.x_names:
            xi = self._gens[xnm]
            p = MultiPoly.zero()
            for k, c in xpoly.items():
                p = p + c * xi**k
            if not p.is_zero():
                coeff_map[xnm] = p
        deepest = self.f_valid(n)
        for ell in range(-2, deepest - 1, -1):
            d = self.jet_coefficient(n, ell)
            if not d.is_zero():
                coeff_map[f_name(ell)] = d
        return DiffOperator.first_order(coeff_map)

    def schwarzian_series(self):
        """(Sf)(u) as a descending series (s-representation)."""
        fp = self.f_prime()
        fpp = self.u_deriv(fp)
        fppp = self.u_deriv(fpp)
        inv = fp.reciprocal()
        a = fppp * inv
        b = fpp * inv
        return a - (b * b).scale(Fraction(3, 2))

    def schwarzian_at_infinity(self):
        """S_H w.r.t. the coordinate w at infinity: [u^{-1}] u^3 (Sf)(u) = -6 f_{-2}."""
        return self.extract(self.schwarzian_series().shift(-3))

    def central_term(self, n):
        """(c/12) [u^{-1}] u^{1-n} (Sf)(u); zero for n >= -1."""
        val = self.extract(self.schwarzian_series().shift(n - 1))
        if _zero(val):
            return None
        c = self.central_charge
        if isinstance(val, MultiPoly):
            out = val * c
        else:
            out = (c * val) if isinstance(c, MultiPoly) else MultiPoly.constant(c * val)
        return out * Fraction(1, 12)

    def virasoro(self, n):
        if n in self._vir_cache:
            return self._vir_cache[n]
        op = self.witt(n)
        corr = self.central_term(n)
        if corr is not None:
            op = op + DiffOperator.multiplication(corr)
        self._vir_cache[n] = op
        return op


def _zero(v):
    return v.is_zero() if isinstance(v, MultiPoly) else v == 0


def _mul(a, b):
    if isinstance(a, MultiPoly) or isinstance(b, MultiPoly):
        a = a if isinstance(a, MultiPoly) else MultiPoly.constant(a)
        return a * b
    return a * b


# -- operation surface ------------------------------------------------------------


def bb_witt(chart: HydroChart, n: int, route="auto") -> DiffOperator:
    return chart.witt(n, route)


def bb_virasoro(chart: HydroChart, n: int) -> DiffOperator:
    return chart.virasoro(n)


def two_region_coeff(chart: HydroChart, ell: int, n: int, v1_inner=True):
    """The d/df_ell coefficient extracted with a chosen contour nesting.

    v1_inner=True is the ordering used by the generators (geometric series in
    f(v_1)/f(v_2)); the opposite ordering differs by the residue on the
    diagonal, which equals (ell+n+1) f_{ell+n}.
    """
    if v1_inner:
        return chart.jet_coefficient(n, ell)
    # |v2| < |v1|: 1/(f(v1)-f(v2)) = + sum_k f(v2)^k f(v1)^{-k-1}
    fp2 = chart.f_prime() ** 2
    kmax = 1 - n
    total = MultiPoly.zero()
    for k in range(0, kmax + 1):
        if k < ell + 1:
            continue
        a = chart.extract((chart.f_s.reciprocal() ** (k + 1) * fp2).shift(n - 1))
        b = chart.extract((chart.f_s**k).shift(ell + 2))
        prod = _mul(a, b)
        if not _zero(prod):
            total = total + prod
    return total


def restrict_to_depth(op: DiffOperator, depth: int) -> DiffOperator:
    """Drop derivative terms in f-variables deeper than f_{1-depth}."""

    def keep(mi):
        for v, _ in mi:
            j = f_index(v)
            if j is not None and j < 1 - depth:
                return False
        return True

    return op.restrict(keep)


def bb_witt_sweep(span=3, n_pts=2, depth_test=10):
    """Residuals of [ell_m, ell_n] - (m-n) ell_{m+n} over |m|,|n| <= span."""
    K = depth_test + 2 * span
    chart = HydroChart(n_pts, K)
    out = {}
    for m in range(-span, span + 1):
        for n in range(m, span + 1):
            if m == n:
                out[(m, n)] = DiffOperator.zero()
                continue
            comm = chart.witt(m).bracket(chart.witt(n))
            target = chart.witt(m + n).scale(m - n)
            res = restrict_to_depth(comm - target, depth_test)
            out[(m, n)] = res
            out[(n, m)] = -res
    return out


def bb_virasoro_sweep(span=3, n_pts=2, depth_test=10, central_charge=None):
    K = depth_test + 2 * span + 2
    chart = HydroChart(n_pts, K, central_charge=central_charge)
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
            res = restrict_to_depth(comm - target, depth_test)
            out[(m, n)] = res
            out[(n, m)] = -res
    return out
