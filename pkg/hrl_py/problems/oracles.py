"""
Solid harmonics with closed-form values and gradients, used as reference
solutions for the Poisson extension.

For degree k the list contains Re and Im of (x_i + i x_j)^k for every
coordinate pair (Re/Im z^k when n = 2) and, for n >= 3 and k >= 2, the
harmonic part of each pure power x_j^k. The harmonic part of a homogeneous
polynomial p of degree k is

    sum_j a_j |x|^{2j} Laplacian^j p,
    a_j = (-1)^j / (2^j j! prod_{i<j} (n + 2k - 2i - 4)),

rescaled here to integer coefficients.
"""

import itertools
import math
from collections import namedtuple
from fractions import Fraction

from hrl_py.framework.extension import BoundaryData
from hrl_py.framework.sphere import check_dimension
from hrl_py.utils.polynomial import Polynomial

Oracle = namedtuple("Oracle", ["data", "value", "gradient", "label"])

MAX_ORACLE_DEGREE = 6


def norm_squared_power(n, j):
    """|x|^{2j} as a Polynomial."""
    base = Polynomial(n)
    for i in range(n):
        exps = [0] * n
        exps[i] = 2
        base = base + Polynomial.monomial(exps)
    out = Polynomial.monomial([0] * n)
    for _ in range(j):
        out = out * base
    return out


def harmonic_projection(p, degree):
    """Harmonic part of a homogeneous polynomial of the given degree."""
    n = p.n
    total = Polynomial(n)
    lap = p
    coeff = Fraction(1)
    for j in range(degree // 2 + 1):
        if j > 0:
            coeff = -coeff / (2 * j * (n + 2 * degree - 2 * j - 2))
            lap = lap.laplacian()
        if lap.is_zero():
            break
        total = total + (norm_squared_power(n, j) * lap).scale(coeff)
    return total


def pair_power(n, i, j, degree):
    """(Re, Im) of (x_i + i x_j)^degree as Polynomials."""
    re, im = Polynomial(n), Polynomial(n)
    for m in range(degree + 1):
        exps = [0] * n
        exps[i] += degree - m
        exps[j] += m
        c = math.comb(degree, m)
        # i^m cycles through 1, i, -1, -i
        phase = m % 4
        if phase == 0:
            re = re + Polynomial.monomial(exps, c)
        elif phase == 1:
            im = im + Polynomial.monomial(exps, c)
        elif phase == 2:
            re = re + Polynomial.monomial(exps, -c)
        else:
            im = im + Polynomial.monomial(exps, -c)
    return re, im


def harmonic_polynomials(n, degree):
    """Labelled solid harmonics of the given degree."""
    if degree == 0:
        return [("1", Polynomial.monomial([0] * n))]
    if degree == 1:
        out = []
        for j in range(n):
            exps = [0] * n
            exps[j] = 1
            out.append(("x%d" % (j + 1), Polynomial.monomial(exps)))
        return out
    out = []
    for i, j in itertools.combinations(range(n), 2):
        re, im = pair_power(n, i, j, degree)
        pair = "x%d+ix%d" % (i + 1, j + 1)
        out.append(("Re(%s)^%d" % (pair, degree), re.integer_normalized()))
        out.append(("Im(%s)^%d" % (pair, degree), im.integer_normalized()))
    if n >= 3:
        for j in range(n):
            exps = [0] * n
            exps[j] = degree
            h = harmonic_projection(Polynomial.monomial(exps), degree)
            out.append(("H[x%d^%d]" % (j + 1, degree), h.integer_normalized(pivot=exps)))
    return out


def oracle_harmonics(n, degree):
    """Solid harmonics of one degree with their boundary data.

    Args:
        n (int): dimension.
        degree (int): polynomial degree, at most 6.
    Returns:
        list of Oracle(data, value, gradient, label); `value` and `gradient`
        are vectorized over (N, n) point arrays.
    """
    check_dimension(n)
    if not 0 <= degree <= MAX_ORACLE_DEGREE:
        raise ValueError("Oracle degree must be in [0, %d], got %s" % (MAX_ORACLE_DEGREE, degree))
    oracles = []
    for label, poly in harmonic_polynomials(n, degree):
        data = BoundaryData(n, poly, name=label)
        oracles.append(Oracle(data, poly, poly.gradient, label))
    return oracles
