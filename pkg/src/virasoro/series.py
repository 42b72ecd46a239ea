"""Truncated Laurent series in one variable with exact coefficients.

Coefficients are exact scalars (int / Fraction) or MultiPoly values, so the
same engine drives both plain series and series whose coefficients are
polynomials in jet variables.

Truncation semantics: coefficients are known exactly for every degree
d <= trunc; degrees beyond trunc are UNKNOWN, not zero.  trunc = None means
the series is an exact (Laurent) polynomial, all omitted coefficients being
genuinely zero.  Every operation propagates the weakest provable truncation
order, so a reported coefficient is always exact.
"""

from __future__ import annotations

from fractions import Fraction

from .polynomials import MultiPoly, as_coeff


class TruncationError(ValueError):
    """A coefficient beyond the provable truncation order was requested."""


def _coerce(c):
    if isinstance(c, MultiPoly):
        return c
    return as_coeff(c)


def _is_zero(c):
    if isinstance(c, MultiPoly):
        return c.is_zero()
    return c == 0


def _min_trunc(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


class ExactSeries:
    """sum_{d} coeffs[d] * var^d, exact for all degrees <= trunc."""

    __slots__ = ("var", "coeffs", "trunc")

    def __init__(self, var, coeffs, trunc=None):
        self.var = var
        self.trunc = trunc
        clean = {}
        for d, c in coeffs.items():
            c = _coerce(c)
            if _is_zero(c):
                continue
            if trunc is not None and d > trunc:
                raise ValueError(f"stored degree {d} beyond truncation order {trunc}")
            clean[int(d)] = c
        self.coeffs = clean

    # -- constructors --------------------------------------------------------

    @classmethod
    def from_terms(cls, var, terms, trunc=None):
        return cls(var, dict(terms), trunc)

    @classmethod
    def zero(cls, var, trunc=None):
        return cls(var, {}, trunc)

    @classmethod
    def identity(cls, var, trunc=None):
        return cls(var, {1: 1}, trunc)

    # -- structure -----------------------------------------------------------

    @property
    def min_deg(self):
        """Smallest stored degree (0 for the zero series by convention)."""
        return min(self.coeffs) if self.coeffs else 0

    def is_zero(self):
        return not self.coeffs

    def coeff(self, k):
        """Exact coefficient of degree k; error if k exceeds the provable order."""
        if self.trunc is not None and k > self.trunc:
            raise TruncationError(
                f"coefficient of degree {k} is unknown (trunc={self.trunc})"
            )
        return self.coeffs.get(k, 0)

    def truncate(self, order):
        """Restrict knowledge to degrees <= order."""
        t = _min_trunc(self.trunc, order)
        return ExactSeries(self.var, {d: c for d, c in self.coeffs.items() if d <= t}, t)

    def degrees(self):
        return sorted(self.coeffs)

    def __eq__(self, other):
        if not isinstance(other, ExactSeries):
            return NotImplemented
        return (
            self.var == other.var
            and self.trunc == other.trunc
            and self.coeffs == other.coeffs
        )

    def same_coeffs(self, other, upto=None):
        """Equality of all provable coefficients up to a degree bound."""
        t = _min_trunc(self.trunc, other.trunc)
        t = _min_trunc(t, upto)
        degs = {d for d in self.coeffs if t is None or d <= t}
        degs |= {d for d in other.coeffs if t is None or d <= t}
        for d in degs:
            a, b = self.coeffs.get(d, 0), other.coeffs.get(d, 0)
            if isinstance(a, MultiPoly) or isinstance(b, MultiPoly):
                if not (
                    (a if isinstance(a, MultiPoly) else MultiPoly.constant(a))
                    == (b if isinstance(b, MultiPoly) else MultiPoly.constant(b))
                ):
                    return False
            elif a != b:
                return False
        return True

    # -- ring operations ------------------------------------------------------

    def _check_var(self, other):
        if self.var != other.var:
            raise ValueError(f"variable mismatch: {self.var} vs {other.var}")

    def __add__(self, other):
        if not isinstance(other, ExactSeries):
            other = ExactSeries(self.var, {0: other})
        self._check_var(other)
        t = _min_trunc(self.trunc, other.trunc)
        coeffs = {d: c for d, c in self.coeffs.items() if t is None or d <= t}
        for d, c in other.coeffs.items():
            if t is not None and d > t:
                continue
            s = coeffs.get(d, 0) + c
            if _is_zero(s):
                coeffs.pop(d, None)
            else:
                coeffs[d] = s
        return ExactSeries(self.var, coeffs, t)

    __radd__ = __add__

    def __neg__(self):
        return ExactSeries(self.var, {d: -c for d, c in self.coeffs.items()}, self.trunc)

    def __sub__(self, other):
        if not isinstance(other, ExactSeries):
            other = ExactSeries(self.var, {0: other})
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c):
        c = _coerce(c)
        if _is_zero(c):
            return ExactSeries(self.var, {}, self.trunc)
        return ExactSeries(
            self.var, {d: k * c for d, k in self.coeffs.items()}, self.trunc
        )

    def __mul__(self, other):
        if not isinstance(other, ExactSeries):
            return self.scale(other)
        self._check_var(other)
        # Cauchy product.  Unknown tails enter at self.trunc + other.min_deg
        # (and symmetrically), so the product is provable up to the min.
        if self.is_zero() or other.is_zero():
            # 0 * unknown-tail is still 0 only if the zero side is exact
            if self.is_zero() and self.trunc is None:
                return ExactSeries(self.var, {}, None)
            if other.is_zero() and other.trunc is None:
                return ExactSeries(self.var, {}, None)
        t = None
        if self.trunc is not None:
            t = self.trunc + (other.min_deg if other.coeffs else 0)
        if other.trunc is not None:
            t2 = other.trunc + (self.min_deg if self.coeffs else 0)
            t = t2 if t is None else min(t, t2)
        out = {}
        for d1, c1 in self.coeffs.items():
            for d2, c2 in other.coeffs.items():
                d = d1 + d2
                if t is not None and d > t:
                    continue
                s = out.get(d, 0) + c1 * c2
                if _is_zero(s):
                    out.pop(d, None)
                else:
                    out[d] = s
        return ExactSeries(self.var, out, t)

    __rmul__ = __mul__

    def shift(self, k):
        """Multiply by var^k."""
        t = None if self.trunc is None else self.trunc + k
        return ExactSeries(self.var, {d + k: c for d, c in self.coeffs.items()}, t)

    def differentiate(self):
        out = {}
        for d, c in self.coeffs.items():
            if d != 0:
                out[d - 1] = c * d
        t = None if self.trunc is None else self.trunc - 1
        return ExactSeries(self.var, out, t)

    def reciprocal(self):
        """1/f for f with invertible leading coefficient.

        If f = c*x^m*(1 + u), the result is c^{-1} x^{-m} sum (-u)^j, provable
        to degree trunc - 2m.
        """
        if self.is_zero():
            raise ZeroDivisionError("reciprocal of zero series")
        m = self.min_deg
        lead = self.coeffs[m]
        if isinstance(lead, MultiPoly):
            if not lead.is_constant():
                raise ValueError("leading coefficient must be an invertible scalar")
            lead = lead.constant_value()
        inv_lead = Fraction(1) / Fraction(lead)
        # u = f / (lead x^m) - 1, known to degree trunc - m, min_deg >= 1
        u_coeffs = {}
        for d, c in self.coeffs.items():
            if d == m:
                continue
            u_coeffs[d - m] = c * inv_lead
        t_u = None if self.trunc is None else self.trunc - m
        u = ExactSeries(self.var, u_coeffs, t_u)
        if u.is_zero() and u.trunc is None:
            return ExactSeries(self.var, {-m: inv_lead}, None)
        # geometric series: need enough terms that u^j is out of range
        if t_u is None:
            raise ValueError(
                "reciprocal of an exact polynomial with infinitely many inverse "
                "terms requires a finite truncation order; call .truncate first"
            )
        acc = ExactSeries(self.var, {0: 1}, t_u)
        term = ExactSeries(self.var, {0: 1}, t_u)
        j = 0
        u_min = u.min_deg if u.coeffs else t_u + 1
        while j * u_min <= t_u:
            term = (term * u).truncate(t_u)
            j += 1
            if term.is_zero():
                break
            acc = acc + (term if j % 2 == 0 else -term)
        return acc.scale(inv_lead).shift(-m)

    def __pow__(self, n):
        if n < 0:
            return self.reciprocal() ** (-n)
        result = ExactSeries(self.var, {0: 1}, None)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result


# -- module-level operations (the spec's operation surface) -------------------


def add(a: ExactSeries, b: ExactSeries) -> ExactSeries:
    return a + b


def mul(a: ExactSeries, b: ExactSeries) -> ExactSeries:
    return a * b


def coeff(f: ExactSeries, k: int):
    return f.coeff(k)


def compose(outer: ExactSeries, inner: ExactSeries) -> ExactSeries:
    """outer(inner), with inner vanishing at 0 (min_deg >= 1).

    Negative powers of the outer series route through the reciprocal of
    inner, which requires an invertible leading coefficient.
    """
    if outer.var == inner.var:
        pass  # same-variable composition is fine; result is in inner.var
    if inner.coeffs and inner.min_deg < 1:
        raise ValueError("inner series must vanish at 0 (min_deg >= 1)")
    var = inner.var
    m = inner.min_deg if inner.coeffs else 1

    # provable order from outer's unknown tail: first unknown outer term
    # contributes at degree (outer.trunc + 1) * m
    t = None
    if outer.trunc is not None:
        if inner.is_zero() and inner.trunc is None:
            t = None  # outer(0): only the constant term survives, exactly
        else:
            t = (outer.trunc + 1) * m - 1
    if inner.trunc is not None:
        t = _min_trunc(t, None)  # powers of inner carry their own truncation

    neg_degrees = [d for d in outer.coeffs if d < 0]
    inv = None
    if neg_degrees:
        base = inner
        if inner.trunc is None and len(inner.coeffs) > 1:
            # exact polynomial: every order is provable, pick a generous one
            span = max(-d for d in neg_degrees)
            big = max(8, (span + 2) * max(inner.degrees()) + 4)
            if outer.trunc is not None:
                big = max(big, (outer.trunc + 1) * m)
            base = inner.truncate(big)
        inv = base.reciprocal()

    result = ExactSeries(var, {}, t)
    # accumulate powers in increasing |degree| with memo
    pos_pows = {0: ExactSeries(var, {0: 1}, None)}
    for d in sorted(outer.coeffs):
        c = outer.coeffs[d]
        if d >= 0:
            while max(pos_pows) < d:
                k = max(pos_pows)
                pos_pows[k + 1] = pos_pows[k] * inner
            p = pos_pows[d]
        else:
            p = inv ** (-d)
        result = result + p.scale(c)
    if t is not None:
        result = result.truncate(t)
    return result


def invert_composition(f: ExactSeries, order=None) -> ExactSeries:
    """Compositional inverse g with f(g(x)) = x, for f = c1*x + c2*x^2 + ...

    c1 must be an invertible scalar.  Coefficients of g are produced order by
    order; g is provable to the truncation order of f (or to ``order`` when f
    is an exact polynomial, whose inverse is exact to every order).
    """
    if f.is_zero() or f.min_deg != 1:
        raise ValueError("series must have min_deg exactly 1 for inversion")
    c1 = f.coeffs[1]
    if isinstance(c1, MultiPoly):
        if not c1.is_constant():
            raise ValueError("linear coefficient must be an invertible scalar")
        c1 = c1.constant_value()
    if c1 == 0:
        raise ValueError("linear coefficient must be invertible")
    inv_c1 = Fraction(1) / Fraction(c1)
    t = f.trunc
    if t is None:
        t = order if order is not None else max(f.degrees())
    elif order is not None:
        t = min(t, order)
    var = f.var
    g_coeffs = {1: inv_c1}
    for n in range(2, t + 1):
        g = ExactSeries(var, g_coeffs, n)
        # residual of f(g) at degree n determines g_n via c1 * g_n + r_n = 0
        comp = compose(f.truncate(n), g)
        r = comp.coeff(n) if (comp.trunc is None or n <= comp.trunc) else 0
        g_coeffs[n] = -(
            r * inv_c1 if isinstance(r, MultiPoly) else Fraction(r) * inv_c1
        )
        if _is_zero(g_coeffs[n]):
            del g_coeffs[n]
    return ExactSeries(var, g_coeffs, t)


def invert_hydrodynamic(coeffs, depth, var="z"):
    """Inverse of f(u) = u + sum_{j<=-2} f_j u^{j+1} in hydrodynamic form.

    ``coeffs`` maps j (<= -2) to the exact coefficient f_j.  Returns the
    coefficients {j: g_j} of the inverse u = g(z) = z + sum_{j<=-2} g_j z^{j+1},
    exact for j >= -depth.

    Implemented through the reciprocal variable s = 1/u: F(s) = 1/f(1/s) is an
    ordinary series with F = s - f_{-2} s^3 - ..., inverted order by order.
    """
    s = "_s_recip"
    den = {0: 1}
    for j, c in coeffs.items():
        if j > -2:
            raise ValueError("hydrodynamic coefficients must have index <= -2")
        den[-j] = c
    denominator = ExactSeries(s, den, depth)
    F = denominator.reciprocal().shift(1)  # 1/f(1/s) = s / (1 + f_{-2} s^2 + ...)
    G = invert_composition(F)
    # G(w) with w = 1/z: u = 1/G(1/z): expand back
    inv_G = G.reciprocal()  # in powers of w = 1/z, degrees -1, 0, 1, ...
    out = {}
    for d, c in inv_G.coeffs.items():
        # u = sum c_d w^d = sum c_d z^{-d}; write as g_j z^{j+1} => j = -d - 1
        out[-d - 1] = c
    if out.pop(0, None) not in (None, 1):
        raise AssertionError("hydrodynamic inverse lost its leading term")
    out.pop(-1, None)
    result = {j: c for j, c in out.items() if j >= -depth and not _is_zero(c)}
    return result


def schwarzian(f: ExactSeries) -> ExactSeries:
    """Schwarzian derivative {f; x} = f'''/f' - (3/2)(f''/f')^2 as a series."""
    f1 = f.differentiate()
    if f1.is_zero() or f1.min_deg != 0:
        raise ValueError("f' must be invertible at 0")
    f2 = f1.differentiate()
    f3 = f2.differentiate()
    inv1 = f1.reciprocal() if f1.trunc is not None else f1.truncate(_poly_order(f)).reciprocal()
    a = f3 * inv1
    b = f2 * inv1
    return a - (b * b).scale(Fraction(3, 2))


def _poly_order(f):
    # exact polynomials get a finite working order for reciprocal-based ops
    top = max(f.degrees()) if f.coeffs else 0
    return max(2 * top + 4, 8)
