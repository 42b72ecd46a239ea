"""Odd Jacobi theta function and Dedekind eta on purely imaginary modulus.

Convention (pinned, and anchored by theta'(0) = 2 pi eta^3 in the tests):

    theta(z | it) = 2 sum_{n>=0} (-1)^n exp(-pi t (n+1/2)^2) sin((2n+1) pi z)

All z-derivatives are term-by-term on the q-series.  The truncation is
adaptive in t with a relative tail bound of 1e-14; moduli below t = 0.3 are
routed through the modular transformation for eta, and rejected for theta
evaluations (the series there would need the full modular machinery).
"""

from __future__ import annotations

import cmath
import math

from fractions import Fraction

from .polynomials import MultiPoly, poly_ring

TAIL_BOUND = 1e-14
MIN_MODULUS = 0.3


class ThetaContext:
    """Evaluation context for theta(z | it), t > 0 real."""

    def __init__(self, t, trunc=None):
        if t <= 0:
            raise ValueError("modulus t must be positive")
        if t < MIN_MODULUS:
            raise ValueError(
                f"t={t} below validated range; theta series needs t >= {MIN_MODULUS}"
            )
        self.t = float(t)
        self.q = math.exp(-2 * math.pi * self.t)  # nome exp(2 i pi tau), tau = it
        if trunc is None:
            trunc = 12
            while _tail_ratio(self.t, trunc) > TAIL_BOUND:
                trunc += 4
        else:
            if _tail_ratio(self.t, trunc) > TAIL_BOUND:
                raise ValueError(
                    f"trunc={trunc} leaves a relative tail above {TAIL_BOUND} at t={t}"
                )
        self.trunc = trunc
        self._weights = [
            2.0 * (-1) ** n * math.exp(-math.pi * self.t * (n + 0.5) ** 2)
            for n in range(trunc)
        ]

    def theta(self, z, deriv=0):
        """theta^(deriv)(z | it); z may be complex."""
        total = 0j if isinstance(z, complex) or deriv >= 0 else 0.0
        for n, wgt in enumerate(self._weights):
            k = (2 * n + 1) * math.pi
            # d^m/dz^m sin(kz) = k^m sin(kz + m pi/2)
            total += wgt * k**deriv * cmath.sin(k * z + deriv * math.pi / 2)
        if isinstance(z, (int, float)) and abs(total.imag) < 1e-300:
            return total.real
        return total

    def theta_at_zero(self, deriv):
        """theta^(deriv)(0); nonzero only for odd order."""
        if deriv % 2 == 0:
            return 0.0
        sign = (-1) ** ((deriv - 1) // 2)
        total = 0.0
        for n, wgt in enumerate(self._weights):
            k = (2 * n + 1) * math.pi
            total += wgt * k**deriv
        return sign * total

    def log_deriv(self, z, order=1):
        """d^order/dz^order of log theta at z (z away from the zero lattice)."""
        rs = {f"r{k}": self.theta(z, k) / self.theta(z) for k in range(1, order + 1)}
        return _LOG_DERIV_POLYS(order).eval_numeric(rs)

    def v_regular_series(self, order):
        """Float coefficients g_1, g_2, ... of theta'/theta(u) - 1/u at u = 0.

        theta is odd, so only odd-index coefficients are nonzero; the leading
        one is theta'''/(3 theta')(0).
        """
        tp = self.theta_at_zero(1)
        # theta(u)/ (theta'(0) u) = 1 + sum_{k even >= 2} (theta^(k+1)/ (k+1)! theta') u^k
        npow = order + 2
        base = [0.0] * (npow + 1)
        base[0] = 1.0
        for k in range(2, npow + 1, 2):
            base[k] = self.theta_at_zero(k + 1) / (math.factorial(k + 1) * tp)
        dbase = [(k + 1) * base[k + 1] for k in range(npow)]
        inv = _poly_inv(base, npow)
        # theta'/theta = 1/u + (d/du log(theta/(theta'u))) = 1/u + dbase * inv
        g = _poly_mul(dbase, inv, npow)
        return g[: order + 1]


def _tail_ratio(t, trunc):
    return math.exp(-math.pi * t * ((trunc + 0.5) ** 2 - 0.25))


def _poly_mul(a, b, order):
    out = [0.0] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if ai == 0.0:
            continue
        for j, bj in enumerate(b[: order + 1 - i]):
            out[i + j] += ai * bj
    return out


def _poly_inv(a, order):
    """Reciprocal of a power series with a[0] = 1, to the given order."""
    out = [0.0] * (order + 1)
    out[0] = 1.0
    for k in range(1, order + 1):
        s = 0.0
        for j in range(1, k + 1):
            if j < len(a):
                s += a[j] * out[k - j]
        out[k] = -s
    return out


_LOG_POLY_CACHE = {}


def _LOG_DERIV_POLYS(order):
    """(log f)^(order) as an exact polynomial in r_k = f^(k)/f.

    Built by repeated differentiation with the rule r_k' = r_{k+1} - r_k r_1.
    """
    if order in _LOG_POLY_CACHE:
        return _LOG_POLY_CACHE[order]
    names = tuple(f"r{k}" for k in range(1, order + 2))
    gens = poly_ring(names)
    expr = gens["r1"]
    for m in range(1, order):
        new = MultiPoly.zero()
        for k in range(1, m + 2):
            rk = f"r{k}"
            d = expr.diff(rk)
            if d.is_zero():
                continue
            new = new + d * (gens[f"r{k+1}"] - gens[rk] * gens["r1"])
        expr = new
    _LOG_POLY_CACHE[order] = expr
    return expr


def dedekind_eta(t):
    """eta(it) by the q-product, with modular routing for small t."""
    if t <= 0:
        raise ValueError("t must be positive")
    if t < 1.0:
        # eta(i/t) = sqrt(t) eta(it)  =>  eta(it) = eta(i/t)/sqrt(t)... careful:
        # eta(-1/tau) = sqrt(-i tau) eta(tau); tau = it: eta(i/t) = sqrt(t) eta(it)
        return dedekind_eta(1.0 / t) / math.sqrt(t)
    q = math.exp(-2 * math.pi * t)
    log_eta = -math.pi * t / 12
    n = 1
    while True:
        qn = q**n
        if qn < 1e-320:
            break
        log_eta += math.log1p(-qn)
        n += 1
    return math.exp(log_eta)


def eta_log_derivative(t):
    """d/dt log eta(it) = -pi/12 + 2 pi sum n e^{-2 pi n t}/(1 - e^{-2 pi n t}).

    An independent oracle (it is -pi/12 E_2(it)); at t = 1 it equals -1/4.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    q = math.exp(-2 * math.pi * t)
    s = -math.pi / 12
    n = 1
    while True:
        qn = q**n
        if qn < 1e-320:
            break
        s += 2 * math.pi * n * qn / (1.0 - qn)
        n += 1
    return s


def weierstrass_invariants(ctx: ThetaContext):
    """(2 eta_1, 2 eta_2) quasi-periods of the Weierstrass zeta on Z + it Z.

    2 eta_1 = -theta'''/(3 theta')(0); 2 eta_2 is evaluated numerically from
    the quasi-periodicity of zeta_W(z) = theta'/theta(z) + 2 eta_1 z, so the
    Legendre relation 2 eta_1 (it) - 2 eta_2 = 2 i pi is an honest check.
    """
    two_eta1 = -ctx.theta_at_zero(3) / (3 * ctx.theta_at_zero(1))
    z0 = 0.31 + 0.17j
    zeta = lambda z: ctx.theta(z, 1) / ctx.theta(z) + two_eta1 * z  # noqa: E731
    two_eta2 = zeta(z0 + 1j * ctx.t) - zeta(z0)
    return two_eta1, two_eta2
