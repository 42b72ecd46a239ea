"""Exact algebra for the boundary-variation kernels on the unit circle.

Deforming the gluing of a semidisk by the flow of -z^{n+1} d/dz (n <= -2)
perturbs the Poisson operator and the Dirichlet-to-Neumann operator of the
disk.  The first-order perturbation kernels Q(z,w) (Poisson) and R(z,w)
(DtN) are Laurent polynomials once their apparent poles on the diagonal are
divided out; on the unit circle the real part of R collapses to a short
closed form.  Everything here is exact arithmetic over Q[z^{+-1}, w^{+-1}].
"""

from __future__ import annotations

from .polynomials import MultiPoly

_VARS = ("z", "w")


def _mono(ez, ew, c=1):
    return MultiPoly(_VARS, {(ez, ew): c}, _VARS)


def _zero():
    return MultiPoly.zero(_VARS, _VARS)


def difference_quotient(a):
    """(z^a - w^a)/(z - w) as an exact Laurent polynomial, any integer a."""
    if a == 0:
        return _zero()
    if a > 0:
        out = _zero()
        for k in range(a):
            out = out + _mono(k, a - 1 - k)
        return out
    # (z^a - w^a) = -(zw)^a (z^{-a} - w^{-a})
    out = _zero()
    for k in range(-a):
        out = out + _mono(a + k, -1 - k, -1)
    return out


def exact_div_z_minus_w(P: MultiPoly) -> MultiPoly:
    """Exact division P / (z - w); raises if the division leaves a remainder."""
    if P.is_zero():
        return P
    zmin = min(e[P.vars.index("z")] for e in P.terms)
    shift = max(0, -zmin)
    # view z^shift * P as sum_k c_k(w) z^k and divide synthetically
    ck = {}
    iz = P.vars.index("z")
    iw = P.vars.index("w")
    for exps, c in P.terms.items():
        k = exps[iz] + shift
        ck.setdefault(k, {})[(exps[iw],)] = c
    cpolys = {k: MultiPoly(("w",), t, ("w",)) for k, t in ck.items()}
    d = max(cpolys)
    w = MultiPoly.var("w", laurent=True)
    q = {}
    carry = cpolys.get(d, MultiPoly.zero(("w",), ("w",)))
    for k in range(d, 0, -1):
        q[k - 1] = carry
        carry = cpolys.get(k - 1, MultiPoly.zero(("w",), ("w",))) + w * carry
    if not carry.is_zero():
        raise ValueError("polynomial is not divisible by (z - w)")
    out = _zero()
    for k, cp in q.items():
        for (ew,), c in cp.terms.items():
            out = out + _mono(k - shift, ew, c)
    return out


def exact_div_diag_sq(P: MultiPoly) -> MultiPoly:
    """Exact division by (z - w)^2."""
    return exact_div_z_minus_w(exact_div_z_minus_w(P))


def conj_on_circle(P: MultiPoly) -> MultiPoly:
    """The complex conjugate of P(z,w) on |z| = |w| = 1 for real coefficients:
    conj(P)(z,w) = P(1/z, 1/w), i.e. all exponents negated."""
    out = {}
    for exps, c in P.terms.items():
        out[tuple(-e for e in exps)] = c
    return MultiPoly(P.vars, out, P.vars)


def q_kernel(n: int) -> MultiPoly:
    """The Poisson-variation kernel Q(z,w) for n <= -2, poles divided out.

    Q = (z+w)/(z-w) * [ (z^{n+1}-z^{1-n}+w^{n+1}-w^{1-n})/(z+w)
                        - (z^{n+1}-z^{1-n}-w^{n+1}+w^{1-n})/(z-w)
                        + n (z^n + z^{-n}) ]
    The combined numerator is exactly divisible by (z-w)^2; the quotient is
    the Laurent-polynomial kernel.
    """
    if n > -2:
        raise ValueError("the variation kernels are defined for n <= -2")
    A = _mono(n + 1, 0) - _mono(1 - n, 0) + _mono(0, n + 1) - _mono(0, 1 - n)
    B = _mono(n + 1, 0) - _mono(1 - n, 0) - _mono(0, n + 1) + _mono(0, 1 - n)
    zmw = _mono(1, 0) - _mono(0, 1)
    zpw = _mono(1, 0) + _mono(0, 1)
    numerator = A * zmw - B * zpw + (_mono(n, 0) + _mono(-n, 0)) * n * zpw * zmw
    return exact_div_diag_sq(numerator)


def r_kernel(n: int) -> MultiPoly:
    """The DtN-variation kernel R(z,w) for n <= -2, poles divided out.

    R = -zw/(z-w)^2 * [ (n+1)(z^n + w^n) + (n-1)(z^{-n} + w^{-n})
                        - 2 (z^{n+1}-w^{n+1})/(z-w) + 2 (z^{1-n}-w^{1-n})/(z-w) ]
    The bracket is exactly divisible by (z-w)^2.
    """
    if n > -2:
        raise ValueError("the variation kernels are defined for n <= -2")
    bracket = (
        (_mono(n, 0) + _mono(0, n)) * (n + 1)
        + (_mono(-n, 0) + _mono(0, -n)) * (n - 1)
        - difference_quotient(n + 1) * 2
        + difference_quotient(1 - n) * 2
    )
    return exact_div_diag_sq(bracket) * _mono(1, 1, -1)


def re_r_closed_form(n: int) -> MultiPoly:
    """2 z w sum_{i+j=-n-2, i,j>=0} (i+1)(j+1) z^i w^j  (n <= -2)."""
    if n > -2:
        raise ValueError("defined for n <= -2")
    out = _zero()
    m = -n - 2
    for i in range(m + 1):
        j = m - i
        out = out + _mono(i + 1, j + 1, 2 * (i + 1) * (j + 1))
    return out


def re_parts_agree(n: int) -> bool:
    """Re R(z,w) == Re(closed form) on |z|=|w|=1, as exact Laurent identity.

    For real-coefficient Laurent polynomials, 2 Re P on the torus equals
    P + conj_on_circle(P), so the check is exact algebra.
    """
    R = r_kernel(n)
    C = re_r_closed_form(n)
    lhs = R + conj_on_circle(R)
    rhs = C + conj_on_circle(C)
    return (lhs - rhs).is_zero()
