"""Differential operators with multivariate-polynomial coefficients.

An operator is a finite sum of terms  c_alpha(vars) * d^alpha  where alpha is
a multi-index over named variables and c_alpha is an exact MultiPoly.  The
zero multi-index is a multiplication operator.  Composition is exact Leibniz
calculus; the commutator of two first-order operators uses the direct bracket
formula, which avoids building the cancelling second-order terms.
"""

from __future__ import annotations

from itertools import product as _iproduct
from math import comb

from .polynomials import MultiPoly, as_coeff


def _mi(pairs):
    """Normalize a derivative multi-index: sorted tuple of (var, order>,0)."""
    acc = {}
    for v, k in pairs:
        if k:
            acc[v] = acc.get(v, 0) + k
    return tuple(sorted(acc.items()))


class DiffOperator:
    __slots__ = ("terms",)

    def __init__(self, terms=None):
        self.terms = {}
        if terms:
            for mi, c in terms.items():
                if isinstance(c, (int, str)) or not isinstance(c, MultiPoly):
                    c = MultiPoly.constant(as_coeff(c))
                if c.is_zero():
                    continue
                self.terms[_mi(mi)] = c

    @classmethod
    def zero(cls):
        return cls()

    @classmethod
    def multiplication(cls, poly):
        return cls({(): poly})

    @classmethod
    def first_order(cls, coeff_map, zero_order=None):
        """Build sum c_v d/dv (+ multiplication term)."""
        terms = {(((v, 1),)): c for v, c in coeff_map.items()}
        op = cls(terms)
        if zero_order is not None:
            op = op + cls.multiplication(zero_order)
        return op

    # -- ring structure -------------------------------------------------------

    def __add__(self, other):
        out = dict(self.terms)
        for mi, c in other.terms.items():
            s = out.get(mi)
            s = c if s is None else s + c
            if isinstance(s, MultiPoly) and s.is_zero():
                out.pop(mi, None)
            else:
                out[mi] = s
        op = DiffOperator()
        op.terms = out
        return op

    def __neg__(self):
        op = DiffOperator()
        op.terms = {mi: -c for mi, c in self.terms.items()}
        return op

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        if not isinstance(c, MultiPoly):
            c = as_coeff(c)
            if c == 0:
                return DiffOperator()
        op = DiffOperator()
        op.terms = {}
        for mi, p in self.terms.items():
            q = p * c
            if not q.is_zero():
                op.terms[mi] = q
        return op

    def order(self):
        return max((sum(k for _, k in mi) for mi in self.terms), default=0)

    def is_zero(self):
        return not self.terms

    # -- calculus -------------------------------------------------------------

    def apply_poly(self, poly):
        """Apply the operator to a MultiPoly."""
        result = MultiPoly.zero(poly.vars, poly.laurent)
        for mi, c in self.terms.items():
            d = poly
            for v, k in mi:
                for _ in range(k):
                    d = d.diff(v)
                    if d.is_zero():
                        break
            if isinstance(d, MultiPoly) and d.is_zero():
                continue
            result = result + c * d
        return result

    def compose(self, other):
        """self o other as operators (exact Leibniz expansion)."""
        out = DiffOperator()
        acc = {}
        for alpha, c1 in self.terms.items():
            splits = _alpha_splits(alpha)
            for beta, c2 in other.terms.items():
                for gamma, delta, mult in splits:
                    # c1 * binom * (d^delta c2) * d^(gamma+beta)
                    d = c2
                    ok = True
                    for v, k in delta:
                        for _ in range(k):
                            d = d.diff(v)
                            if d.is_zero():
                                ok = False
                                break
                        if not ok:
                            break
                    if not ok:
                        continue
                    coeff = c1 * d
                    if mult != 1:
                        coeff = coeff * mult
                    if coeff.is_zero():
                        continue
                    key = _mi(tuple(gamma) + tuple(beta))
                    prev = acc.get(key)
                    acc[key] = coeff if prev is None else prev + coeff
        out.terms = {k: v for k, v in acc.items() if not v.is_zero()}
        return out

    def bracket(self, other):
        """[self, other]; fast direct formula when both have order <= 1."""
        if self.order() <= 1 and other.order() <= 1:
            return _bracket_first_order(self, other)
        return self.compose(other) - other.compose(self)

    # -- views ----------------------------------------------------------------

    def restrict(self, keep):
        """Keep only terms whose multi-index satisfies the predicate."""
        op = DiffOperator()
        op.terms = {mi: c for mi, c in self.terms.items() if keep(mi)}
        return op

    def coefficient(self, mi):
        return self.terms.get(_mi(mi), MultiPoly.zero())

    def __eq__(self, other):
        keys = set(self.terms) | set(other.terms)
        for k in keys:
            a = self.terms.get(k, MultiPoly.zero())
            b = other.terms.get(k, MultiPoly.zero())
            if not a == b:
                return False
        return True

    def canonical(self):
        """Canonical sorted text form for golden-file comparisons."""
        if not self.terms:
            return "0"
        lines = []
        for mi in sorted(self.terms):
            dv = " ".join(f"d{v}^{k}" if k > 1 else f"d{v}" for v, k in mi) or "1"
            lines.append(f"({self.terms[mi].canonical()}) :: {dv}")
        return "\n".join(lines)

    def __repr__(self):
        return f"DiffOperator<{len(self.terms)} terms, order {self.order()}>"


def _alpha_splits(alpha):
    """All splits alpha = gamma + delta with multinomial weights."""
    if not alpha:
        return [((), (), 1)]
    ranges = [range(k + 1) for _, k in alpha]
    out = []
    for choice in _iproduct(*ranges):
        gamma = []
        delta = []
        mult = 1
        for (v, k), g in zip(alpha, choice):
            mult *= comb(k, g)
            if g:
                gamma.append((v, g))
            if k - g:
                delta.append((v, k - g))
        out.append((tuple(gamma), tuple(delta), mult))
    return out


def _bracket_first_order(A, B):
    a0 = A.terms.get((), None)
    b0 = B.terms.get((), None)
    acc = {}

    def _add(key, val):
        if val.is_zero():
            return
        prev = acc.get(key)
        acc[key] = val if prev is None else prev + val

    for mi_u, au in A.terms.items():
        if not mi_u:
            continue
        (u, _) = mi_u[0]
        for mi_v, bv in B.terms.items():
            if not mi_v:
                continue
            d = bv.diff(u)
            if not d.is_zero():
                _add(mi_v, au * d)
        if b0 is not None:
            d = b0.diff(u)
            if not d.is_zero():
                _add((), au * d)
    for mi_u, bu in B.terms.items():
        if not mi_u:
            continue
        (u, _) = mi_u[0]
        for mi_v, av in A.terms.items():
            if not mi_v:
                continue
            d = av.diff(u)
            if not d.is_zero():
                _add(mi_v, -(bu * d))
        if a0 is not None:
            d = a0.diff(u)
            if not d.is_zero():
                _add((), -(bu * d))
    op = DiffOperator()
    op.terms = {k: v for k, v in acc.items() if not v.is_zero()}
    return op
