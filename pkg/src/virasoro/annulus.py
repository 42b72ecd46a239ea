"""Kernels and tangent-vector coordinates on the flat cylinder family.

The chart is (S, 0, z_1, ..., z_N) with spectators on one boundary circle and
a jet marked at z_1.  Throughout, ``t`` is the modulus of the doubled torus
Z + itZ used by all explicit formulas:

    V(x, y)   = theta'/theta(x - y | it)
    pi P(x,y) = -Im V(x, y) - (2 pi / t) Im x
    pi H(x,y) = -(theta'/theta)'(x - y | it) - 2 pi / t
    S/6       = -theta'''/(3 theta')(0 | it) - 2 pi / t

The physical cylinder these are the Poisson/excursion kernels of is
{0 < Im z < t/2}/Z (its Schottky double is the torus of modulus it): P
vanishes on Im x = t/2, integrates against the bottom circle to the harmonic
measure 1 - Im x/(t/2), and H matches the periodized-strip image sum at
height t/2.  The formulas extend harmonically to the full 0 < Im x < t strip
and also vanish there, which is how the source material writes them.
"""

from __future__ import annotations

import math

from .theta import ThetaContext


TWO_PI = 2 * math.pi


def v_field(x, y, ctx: ThetaContext):
    """V(x,y) = theta'/theta(x-y): simple pole of residue 1 at x = y."""
    u = x - y
    return ctx.theta(u, 1) / ctx.theta(u)


def v0_field(x, y, ctx: ThetaContext):
    """V0(x,y) = V(x,y) - V(0,y); vanishes at x = 0."""
    return v_field(x, y, ctx) - v_field(0.0, y, ctx)


def v0_y_derivative(x, y, ctx: ThetaContext, m):
    """(1/m!) d^m/dy^m V0(x,y) for x != y (both away from the pole)."""
    sign = (-1) ** m
    val = ctx.log_deriv(x - y, m + 1) - ctx.log_deriv(-y, m + 1)
    return sign * val / math.factorial(m)


def poisson_kernel(x, y, ctx: ThetaContext):
    """P(x,y) for bulk x, boundary y real; vanishes on Im x = t/2 (and t)."""
    if not (0 < x.imag < ctx.t):
        raise ValueError("x must satisfy 0 < Im x < t")
    return (-v_field(x, y, ctx).imag - (TWO_PI / ctx.t) * x.imag) / math.pi


def excursion_kernel(x, y, ctx: ThetaContext):
    """H(x,y) for distinct boundary points x, y (real)."""
    if abs((x - y) - round(x - y)) < 1e-15:
        raise ValueError("coincident boundary points")
    val = -ctx.log_deriv(x - y, 2) - TWO_PI / ctx.t
    return val.real / math.pi if isinstance(val, complex) else val / math.pi


def excursion_kernel_image_sum(x, y, t, n_images=60):
    """Independent oracle: periodized strip kernel of the height-t/2 cylinder.

    H_strip(u) between bottom points of {0 < Im < h} is
    (pi/(4 h^2)) / sinh^2(pi u / (2 h)); summing over the period gives the
    cylinder kernel.  With h = t/2 this must match ``excursion_kernel``.
    """
    h = t / 2.0
    u = x - y
    total = 0.0
    for k in range(-n_images, n_images + 1):
        total += (math.pi / (4 * h * h)) / math.sinh(math.pi * (u + k) / (2 * h)) ** 2
    return total


def harmonic_measure_far(x, t):
    """Harmonic measure of the far boundary circle Im = t/2 seen from x."""
    return x.imag / (t / 2.0)


def schwarzian_connection(ctx: ThetaContext):
    """S(t) with S/6 = -theta'''/(3 theta')(0) - 2 pi / t."""
    return 6.0 * (-ctx.theta_at_zero(3) / (3 * ctx.theta_at_zero(1)) - TWO_PI / ctx.t)


def bergman_connection(ctx: ThetaContext):
    """B = -2 theta'''/theta'(0) in the flat coordinate (x-independent)."""
    return -2.0 * ctx.theta_at_zero(3) / ctx.theta_at_zero(1)


class AnnulusChart:
    """(S_t, 0, z_1, ..., z_N) with a jet of the given depth marked at z_1."""

    def __init__(self, t, spectators, jet_depth=3, trunc=None):
        self.ctx = ThetaContext(t, trunc)
        self.t = float(t)
        self.spectators = [float(z) for z in spectators]
        if len(self.spectators) < 1:
            raise ValueError("need at least the jet point z_1")
        vals = sorted(z % 1.0 for z in self.spectators + [0.0])
        for a, b in zip(vals, vals[1:]):
            if abs(a - b) < 1e-12:
                raise ValueError("spectators must be pairwise distinct mod 1 and nonzero")
        self.jet_depth = jet_depth

    def c_coefficient(self, m, i=0):
        """(1/i!) d_x^i c_m(z_1, z_1), the regular parts at the coincidence.

        c_m(x,y) = (1/m!) d_y^m V0(x,y) - (x-y)^{-m-1}; with
        g(u) = theta'/theta(u) - 1/u this is
        c_m(x,y) = ((-1)^m/m!) g^{(m)}(x-y) + (1/m!) (log theta)^{(m+1)}(y)
        (the last term from -(1/m!) d_y^m V(0,y), V(0,y) = -theta'/theta(y)).
        """
        z1 = self.spectators[0]
        g = self.ctx.v_regular_series(m + i + 1)
        # ((-1)^m/m!) g^{(m+i)}(0) / i! = ((-1)^m/m!) * g_{m+i} * (m+i)! / (m! i!)
        # g_k are Taylor coefficients: g^{(k)}(0) = k! g_k
        lead = (-1) ** m * math.comb(m + i, i) * g[m + i]
        if i == 0:
            lead += self.ctx.log_deriv(z1, m + 1).real / math.factorial(m)
        return lead

    def tangent_coordinates(self, n):
        """Coordinates of the deformation class of (z-z_1)^{n+1} d/dz.

        Returns {'dt': float, 'dz': [per spectator], 'da': [a_1..a_jet]}.
        The dt coefficient is 2 pi for n = -2 and 0 for n <= -3.
        """
        if n > -1:
            raise ValueError("tangent coordinates are defined for n <= -1")
        N = len(self.spectators)
        out = {"dt": 0.0, "dz": [0.0] * N, "da": [0.0] * self.jet_depth}
        if n == -1:
            out["dz"][0] = 1.0
            return out
        m = -n - 2
        if m == 0:
            out["dt"] = TWO_PI
        z1 = self.spectators[0]
        for j in range(1, N):
            out["dz"][j] = v0_y_derivative(self.spectators[j], z1, self.ctx, m).real
        out["dz"][0] = -self.c_coefficient(m, 0)
        for i in range(1, self.jet_depth + 1):
            out["da"][i - 1] = -self.c_coefficient(m, i)
        return out
