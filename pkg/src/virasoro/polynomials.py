"""Multivariate polynomials over exact rationals.

Coefficients are Python ints or fractions.Fraction (ints preferred whenever the
value is integral, which keeps the common integer-only computations fast).
Exponents are non-negative except for variables explicitly declared
Laurent-allowed (marked-point positions admit negative powers; jet coordinates
do not).
"""

from __future__ import annotations

from fractions import Fraction


def _norm(c):
    """Normalize a coefficient: Fractions with unit denominator become ints."""
    if isinstance(c, Fraction):
        if c.denominator == 1:
            return int(c)
        return c
    return c


def as_coeff(c):
    """Coerce an input scalar to an exact coefficient (int or Fraction)."""
    if isinstance(c, int):
        return c
    if isinstance(c, Fraction):
        return _norm(c)
    if isinstance(c, str):
        return _norm(Fraction(c))
    raise TypeError(f"not an exact scalar: {c!r}")


class MultiPoly:
    """A polynomial in named variables with exact rational coefficients.

    terms maps exponent tuples (aligned with ``vars``) to nonzero coefficients.
    ``laurent`` lists the variables allowed to carry negative exponents.
    """

    __slots__ = ("vars", "terms", "laurent")

    def __init__(self, variables, terms, laurent=()):
        self.vars = tuple(variables)
        self.laurent = frozenset(laurent)
        clean = {}
        for exps, c in terms.items():
            c = _norm(c)
            if c == 0:
                continue
            exps = tuple(exps)
            if len(exps) != len(self.vars):
                raise ValueError("exponent tuple length mismatch")
            for v, e in zip(self.vars, exps):
                if e < 0 and v not in self.laurent:
                    raise ValueError(f"negative exponent for non-Laurent variable {v}")
            clean[exps] = c
        self.terms = clean

    # -- constructors -------------------------------------------------------

    @classmethod
    def constant(cls, c, variables=(), laurent=()):
        c = as_coeff(c)
        variables = tuple(variables)
        if c == 0:
            return cls(variables, {}, laurent)
        return cls(variables, {(0,) * len(variables): c}, laurent)

    @classmethod
    def var(cls, name, laurent=False):
        return cls((name,), {(1,): 1}, (name,) if laurent else ())

    @classmethod
    def zero(cls, variables=(), laurent=()):
        return cls(variables, {}, laurent)

    # -- basic structure ----------------------------------------------------

    def is_zero(self):
        return not self.terms

    def is_constant(self):
        return all(all(e == 0 for e in exps) for exps in self.terms)

    def constant_value(self):
        if not self.terms:
            return 0
        [(exps, c)] = self.terms.items()
        if any(e != 0 for e in exps):
            raise ValueError("not a constant polynomial")
        return c

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(as_coeff(other))
        a, b = _align(self, other)
        return a.terms == b.terms

    def __hash__(self):
        return hash((self.vars, tuple(sorted(self.terms.items()))))

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, MultiPoly):
            other = MultiPoly.constant(as_coeff(other), self.vars, self.laurent)
        a, b = _align(self, other)
        terms = dict(a.terms)
        for exps, c in b.terms.items():
            s = terms.get(exps, 0) + c
            if s:
                terms[exps] = _norm(s)
            else:
                terms.pop(exps, None)
        return MultiPoly(a.vars, terms, a.laurent)

    __radd__ = __add__

    def __neg__(self):
        return MultiPoly(self.vars, {e: -c for e, c in self.terms.items()}, self.laurent)

    def __sub__(self, other):
        return self + (-other if isinstance(other, MultiPoly) else -as_coeff(other))

    def __rsub__(self, other):
        return (-self) + as_coeff(other)

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = as_coeff(other)
            if c == 0:
                return MultiPoly(self.vars, {}, self.laurent)
            if c == 1:
                return self
            return MultiPoly(
                self.vars, {e: _norm(k * c) for e, k in self.terms.items()}, self.laurent
            )
        a, b = _align(self, other)
        if len(a.terms) < len(b.terms):
            a, b = b, a
        out = {}
        for e1, c1 in a.terms.items():
            for e2, c2 in b.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                s = out.get(e, 0) + c1 * c2
                if s:
                    out[e] = s
                else:
                    out.pop(e, None)
        return MultiPoly(a.vars, out, a.laurent)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = as_coeff(other)
        if c == 0:
            raise ZeroDivisionError("division of MultiPoly by zero")
        return self * (Fraction(1) / Fraction(c))

    def __pow__(self, n):
        if n < 0:
            raise ValueError("negative power of a MultiPoly")
        result = MultiPoly.constant(1, self.vars, self.laurent)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # -- calculus and substitution ------------------------------------------

    def diff(self, var):
        """Partial derivative with respect to ``var``."""
        if var not in self.vars:
            return MultiPoly(self.vars, {}, self.laurent)
        i = self.vars.index(var)
        out = {}
        for exps, c in self.terms.items():
            e = exps[i]
            if e == 0:
                continue
            ne = exps[:i] + (e - 1,) + exps[i + 1 :]
            s = out.get(ne, 0) + c * e
            if s:
                out[ne] = s
        return MultiPoly(self.vars, out, self.laurent)

    def subs(self, assignment):
        """Substitute variables by exact scalars or MultiPolys.

        Variables not mentioned are kept. Negative powers require the value
        to be an invertible scalar.
        """
        target_vars = [v for v in self.vars if v not in assignment]
        extra_vars = []
        extra_laurent = set()
        for val in assignment.values():
            if isinstance(val, MultiPoly):
                for v in val.vars:
                    if v not in target_vars and v not in extra_vars:
                        extra_vars.append(v)
                extra_laurent |= val.laurent
        variables = tuple(target_vars + extra_vars)
        laurent = (self.laurent | extra_laurent) & set(variables)
        result = MultiPoly.zero(variables, laurent)
        for exps, c in self.terms.items():
            term = MultiPoly.constant(c, variables, laurent)
            for v, e in zip(self.vars, exps):
                if e == 0:
                    continue
                if v in assignment:
                    val = assignment[v]
                    if isinstance(val, MultiPoly):
                        if e < 0:
                            raise ValueError(
                                f"cannot substitute polynomial into negative power of {v}"
                            )
                        term = term * val**e
                    else:
                        val = as_coeff(val)
                        if e < 0:
                            if val == 0:
                                raise ZeroDivisionError(f"substituting 0 into {v}^{e}")
                            term = term * (Fraction(1) / Fraction(val)) ** (-e)
                        else:
                            term = term * val**e
                else:
                    i = variables.index(v)
                    mono = MultiPoly(
                        variables,
                        {tuple(e if j == i else 0 for j in range(len(variables))): 1},
                        laurent,
                    )
                    term = term * mono
            result = result + term
        return result

    def coefficient_of(self, var, power):
        """The coefficient of var**power, a MultiPoly in the remaining variables."""
        i = self.vars.index(var)
        rest = self.vars[:i] + self.vars[i + 1 :]
        out = {}
        for exps, c in self.terms.items():
            if exps[i] == power:
                out[exps[:i] + exps[i + 1 :]] = c
        return MultiPoly(rest, out, self.laurent & set(rest))

    def max_degree(self, var):
        if var not in self.vars or not self.terms:
            return None
        i = self.vars.index(var)
        return max(e[i] for e in self.terms)

    def involved_vars(self):
        """Variables that actually occur with nonzero exponent."""
        used = set()
        for exps in self.terms:
            for v, e in zip(self.vars, exps):
                if e:
                    used.add(v)
        return used

    def eval_numeric(self, assignment):
        """Evaluate at numeric (float/complex) arguments."""
        total = 0
        for exps, c in self.terms.items():
            term = float(c) if not isinstance(c, complex) else c
            for v, e in zip(self.vars, exps):
                if e:
                    term = term * assignment[v] ** e
            total = total + term
        return total

    # -- display -------------------------------------------------------------

    def canonical(self):
        """Canonical text form: monomials sorted by exponent tuple."""
        if not self.terms:
            return "0"
        pieces = []
        for exps in sorted(self.terms):
            c = self.terms[exps]
            mono = "*".join(
                f"{v}^{e}" if e != 1 else v for v, e in zip(self.vars, exps) if e
            )
            cs = str(c)
            pieces.append(f"{cs}*{mono}" if mono else cs)
        return " + ".join(pieces)

    def __repr__(self):
        return f"MultiPoly({self.canonical()})"


def _align(a: MultiPoly, b: MultiPoly):
    """Put two polynomials over a common ordered variable list."""
    if a.vars == b.vars and a.laurent == b.laurent:
        return a, b
    variables = tuple(sorted(set(a.vars) | set(b.vars), key=_var_key))
    laurent = a.laurent | b.laurent
    return a._embed(variables, laurent), b._embed(variables, laurent)


def _var_key(name):
    """Sort variables as (prefix, numeric index) so a2 < a10."""
    head = name.rstrip("0123456789")
    tail = name[len(head) :]
    return (head, int(tail) if tail else -1)


def _embed(self, variables, laurent):
    idx = [variables.index(v) for v in self.vars]
    n = len(variables)
    out = {}
    for exps, c in self.terms.items():
        ne = [0] * n
        for j, e in zip(idx, exps):
            ne[j] = e
        out[tuple(ne)] = c
    return MultiPoly(variables, out, laurent)


MultiPoly._embed = _embed


def poly_ring(names, laurent=()):
    """Convenience: build generator polynomials for a list of variable names."""
    names = tuple(names)
    laurent = frozenset(laurent)
    gens = {}
    for name in names:
        exps = tuple(1 if m == name else 0 for m in names)
        gens[name] = MultiPoly(names, {exps: 1}, laurent & set(names))
    return gens
