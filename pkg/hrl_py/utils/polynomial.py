"""Sparse multivariate polynomials with exact rational coefficients."""

import itertools
import math
from fractions import Fraction

import numpy as np


class Polynomial:
    """Sparse polynomial in n variables with exact rational coefficients.

    Terms are stored as {exponent tuple: Fraction}."""

    def __init__(self, n, terms=None):
        self.n = n
        self.terms = {}
        for exps, coeff in (terms or {}).items():
            if coeff != 0:
                self.terms[tuple(exps)] = Fraction(coeff)

    @classmethod
    def monomial(cls, exps, coeff=1):
        return cls(len(exps), {tuple(exps): coeff})

    @classmethod
    def from_terms(cls, n, terms):
        """Builds a polynomial from [[exponents, coefficient], ...] pairs."""
        out = cls(n)
        for exps, coeff in terms:
            if len(exps) != n:
                raise ValueError("Exponent tuple %s does not have %d entries" % (exps, n))
            out = out + cls.monomial(exps, Fraction(coeff))
        return out

    def to_terms(self):
        return [[list(e), float(c)] for e, c in sorted(self.terms.items())]

    def __add__(self, other):
        terms = dict(self.terms)
        for exps, coeff in other.terms.items():
            terms[exps] = terms.get(exps, 0) + coeff
        return Polynomial(self.n, terms)

    def scale(self, c):
        return Polynomial(self.n, {e: c * v for e, v in self.terms.items()})

    def __mul__(self, other):
        terms = {}
        for (ea, ca), (eb, cb) in itertools.product(self.terms.items(), other.terms.items()):
            exps = tuple(a + b for a, b in zip(ea, eb))
            terms[exps] = terms.get(exps, 0) + ca * cb
        return Polynomial(self.n, terms)

    def derivative(self, j):
        terms = {}
        for exps, coeff in self.terms.items():
            if exps[j] > 0:
                lowered = list(exps)
                lowered[j] -= 1
                terms[tuple(lowered)] = terms.get(tuple(lowered), 0) + coeff * exps[j]
        return Polynomial(self.n, terms)

    def laplacian(self):
        total = Polynomial(self.n)
        for j in range(self.n):
            total = total + self.derivative(j).derivative(j)
        return total

    def is_zero(self):
        return not self.terms

    def integer_normalized(self, pivot=None):
        """Rescales to coprime integer coefficients, positive at the `pivot` term."""
        if self.is_zero():
            return self
        denominators = [c.denominator for c in self.terms.values()]
        lcm = 1
        for d in denominators:
            lcm = lcm * d // math.gcd(lcm, d)
        ints = [int(c * lcm) for c in self.terms.values()]
        g = 0
        for v in ints:
            g = math.gcd(g, abs(v))
        key = tuple(pivot) if pivot is not None else None
        if key not in self.terms:
            key = max(self.terms)
        sign = 1 if self.terms[key] > 0 else -1
        return self.scale(Fraction(sign * lcm, g))

    def __call__(self, points):
        points = np.asarray(points, dtype=float)
        out = np.zeros(len(points))
        for exps, coeff in self.terms.items():
            out += float(coeff) * np.prod(points ** np.array(exps), axis=1)
        return out

    def gradient(self, points):
        return np.column_stack([self.derivative(j)(points) for j in range(self.n)])

    def __str__(self):
        parts = []
        for exps, coeff in sorted(self.terms.items(), reverse=True):
            mono = "".join(
                "x%d" % (i + 1) + ("^%d" % e if e > 1 else "") for i, e in enumerate(exps) if e
            )
            parts.append("%s%s" % (coeff, "*" + mono if mono else ""))
        return " + ".join(parts) if parts else "0"


