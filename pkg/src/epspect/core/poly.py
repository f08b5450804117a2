"""Univariate polynomials, root finding, resultants and discriminants.

Polynomials carry their coefficients in one of the three arithmetic tiers
(see ``scalars``).  Exact-tier polynomials support exact division, gcd and
resultants; floating tiers feed the Aberth-Ehrlich root finder.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp
import numpy as np

from .scalars import (
    EXTENDED_DPS,
    CLUSTER_RTOL,
    ExactTypes,
    MpTypes,
    Precision,
    RootCluster,
    cluster_points,
    is_exact_zero,
    to_double,
    to_extended,
)


class ConvergenceError(RuntimeError):
    """Root iteration hit its cap; carries the unconverged subset."""

    def __init__(self, message, roots=(), unconverged=()):
        super().__init__(message)
        self.roots = tuple(roots)
        self.unconverged = tuple(unconverged)


class Polynomial:
    """Dense univariate polynomial, coefficients in ascending degree.

    Trailing coefficients that are exactly zero are trimmed, so the leading
    coefficient is nonzero unless the polynomial is identically zero (whose
    degree is reported as -1).  Binary operations require both operands in
    the same arithmetic tier; convert explicitly with ``to_double()`` or
    ``to_extended()``.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        cs = list(coeffs)
        while len(cs) > 1 and is_exact_zero(cs[-1]):
            cs.pop()
        if not cs:
            cs = [0]
        self.coeffs = tuple(cs)

    # -- basic properties ---------------------------------------------------

    @property
    def degree(self) -> int:
        if self.is_zero:
            return -1
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and is_exact_zero(self.coeffs[0])

    @property
    def lc(self):
        """Leading coefficient (0 for the zero polynomial)."""
        return self.coeffs[-1]

    @property
    def mode(self) -> Precision:
        if any(isinstance(c, MpTypes) for c in self.coeffs):
            return Precision.EXTENDED
        if all(isinstance(c, ExactTypes) for c in self.coeffs):
            return Precision.EXACT
        return Precision.DOUBLE

    def __repr__(self):
        return f"Polynomial({list(self.coeffs)!r})"

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    # -- conversions ----------------------------------------------------------

    def to_double(self) -> "Polynomial":
        return Polynomial([to_double(c) for c in self.coeffs])

    def to_extended(self) -> "Polynomial":
        return Polynomial([to_extended(c) for c in self.coeffs])

    # -- arithmetic -----------------------------------------------------------

    def _check_mode(self, other: "Polynomial"):
        a, b = self.mode, other.mode
        if Precision.EXACT in (a, b) and a != b:
            raise TypeError(
                "mixed exact/floating polynomial arithmetic; convert "
                "explicitly with to_double()/to_extended()"
            )

    def __add__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_mode(other)
        a, b = self.coeffs, other.coeffs
        n = max(len(a), len(b))
        return Polynomial(
            [
                (a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0)
                for i in range(n)
            ]
        )

    def __sub__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self + (-other)

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs])

    def __mul__(self, other):
        if isinstance(other, Polynomial):
            self._check_mode(other)
            if self.is_zero or other.is_zero:
                return Polynomial([0])
            a, b = self.coeffs, other.coeffs
            out = [0] * (len(a) + len(b) - 1)
            for i, ca in enumerate(a):
                if is_exact_zero(ca):
                    continue
                for j, cb in enumerate(b):
                    out[i + j] += ca * cb
            return Polynomial(out)
        return self.scale(other)

    __rmul__ = __mul__

    def scale(self, s) -> "Polynomial":
        return Polynomial([c * s for c in self.coeffs])

    def __divmod__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        self._check_mode(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        a = list(self.coeffs)
        b = other.coeffs
        db = len(b) - 1
        inv = (
            Fraction(1, 1) / b[-1]
            if isinstance(b[-1], ExactTypes)
            else 1.0 / b[-1]
        )
        if len(a) - 1 < db:
            return Polynomial([0]), Polynomial(a)
        q = [0] * (len(a) - db)
        for k in range(len(a) - 1, db - 1, -1):
            coeff = a[k] * inv
            q[k - db] = coeff
            if not is_exact_zero(coeff):
                for j in range(db + 1):
                    a[k - db + j] -= coeff * b[j]
        return Polynomial(q), Polynomial(a[:db])

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: "Polynomial") -> "Polynomial":
        """Division known to be remainder-free (exact tier only)."""
        q, r = divmod(self, other)
        if not r.is_zero:
            raise ArithmeticError("division expected to be exact left a remainder")
        return q

    def derivative(self) -> "Polynomial":
        if self.degree < 1:
            return Polynomial([0])
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def __call__(self, x):
        """Horner evaluation; the arithmetic follows the argument's type."""
        acc = 0 * x + 0
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def monic(self) -> "Polynomial":
        if self.is_zero:
            raise ZeroDivisionError("zero polynomial has no monic form")
        lc = self.lc
        inv = Fraction(1, 1) / lc if isinstance(lc, ExactTypes) else 1.0 / lc
        return self.scale(inv)

    def gcd(self, other: "Polynomial") -> "Polynomial":
        """Monic gcd by the Euclidean algorithm (exact tier)."""
        if self.mode is not Precision.EXACT or other.mode is not Precision.EXACT:
            raise TypeError("gcd requires exact-tier polynomials")
        a, b = self, other
        while not b.is_zero:
            a, b = b, a % b
        if a.is_zero:
            return a
        return a.monic()

    @staticmethod
    def from_roots(roots, lc=1) -> "Polynomial":
        p = Polynomial([lc])
        for r in roots:
            p = p * Polynomial([-r, 1])
        return p

    @staticmethod
    def zero() -> "Polynomial":
        return Polynomial([0])


# --------------------------------------------------------------------------
# root finding (Aberth-Ehrlich with Newton corrections)
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class PolyRoots:
    """All roots of a polynomial plus their multiplicity clusters."""

    roots: tuple[complex, ...]
    clusters: tuple[RootCluster, ...]
    residuals: tuple[float, ...]
    iterations: int


def _horner_pair(coeffs, z):
    """Value and derivative at z in one pass."""
    p = coeffs[-1]
    dp = 0 * z
    for c in reversed(coeffs[:-1]):
        dp = dp * z + p
        p = p * z + c
    return p, dp


def _residual_scale(coeffs, z, absfn):
    return sum(absfn(c) * absfn(z) ** k for k, c in enumerate(coeffs))


def _aberth(coeffs, z, eps, absfn, maxiter=200):
    """Aberth-Ehrlich simultaneous iteration from the starting points z."""
    m = len(z)
    locked = [False] * m
    tol_factor = 16 * eps
    it = 0
    for it in range(1, maxiter + 1):
        moved = False
        for i in range(m):
            if locked[i]:
                continue
            p, dp = _horner_pair(coeffs, z[i])
            if absfn(p) <= tol_factor * _residual_scale(coeffs, z[i], absfn):
                locked[i] = True
                continue
            if absfn(dp) == 0:
                # nudge off a stationary point
                z[i] = z[i] + (0.5 + 0.5j) * (1 + absfn(z[i])) * eps ** 0.25
                moved = True
                continue
            newton = p / dp
            s = 0
            for j in range(m):
                if j != i:
                    d = z[i] - z[j]
                    if absfn(d) == 0:
                        d = eps * (1 + absfn(z[i]))
                    s = s + 1 / d
            denom = 1 - newton * s
            step = newton if absfn(denom) == 0 else newton / denom
            z[i] = z[i] - step
            moved = True
        if not moved:
            break
    return z, locked, it


def _initial_circle(coeffs):
    """Starting points on a circle sized from the coefficient magnitudes."""
    m = len(coeffs) - 1
    an = abs(coeffs[-1])
    a0 = abs(coeffs[0])
    r = (a0 / an) ** (1.0 / m) if a0 > 0 else 0.5
    r = min(max(r, 1e-3), 1 + max(abs(c) / an for c in coeffs[:-1]))
    return [
        r * cmath.exp(2j * math.pi * (k + 0.25) / m + 0.4j) for k in range(m)
    ]


def poly_roots(
    p: Polynomial,
    precision: Precision = Precision.DOUBLE,
    cluster_rtol: float = CLUSTER_RTOL,
) -> PolyRoots:
    """All complex roots of ``p`` with near-coincident roots clustered.

    Exact zero constant terms are deflated symbolically, the remaining roots
    come from Aberth-Ehrlich iteration (double precision start, optionally
    re-polished under mpmath for ``precision=EXTENDED``).  Raises
    ``ConvergenceError`` if some roots fail the residual test after the
    iteration cap; the unconverged subset is attached to the exception.
    """
    if p.degree < 1:
        raise ValueError("poly_roots requires degree >= 1")
    # deflate roots at the origin exactly (constant term identically zero)
    zero_mult = 0
    while zero_mult < p.degree and is_exact_zero(p.coeffs[zero_mult]):
        zero_mult += 1
    work = [complex(to_double(c)) for c in p.coeffs[zero_mult:]]

    roots: list[complex] = [0j] * zero_mult
    iters = 0
    if len(work) > 1:
        eps = float(np.finfo(float).eps)
        z = _initial_circle(work)
        z, locked, iters = _aberth(work, z, eps, abs)
        if not all(locked):
            # deterministic fallback: companion-matrix estimates, re-polished
            z = list(np.roots(list(reversed(work))).astype(complex))
            z, locked, extra = _aberth(work, z, eps, abs)
            iters += extra
        if not all(locked):
            bad = [zi for zi, ok in zip(z, locked) if not ok]
            raise ConvergenceError(
                f"{len(bad)} root(s) failed to converge", roots=z, unconverged=bad
            )
        roots.extend(z)

    if precision is Precision.EXTENDED and len(work) > 1:
        with mp.workdps(EXTENDED_DPS):
            cs = [to_extended(c) for c in p.coeffs[zero_mult:]]
            z = [mp.mpc(r) for r in roots[zero_mult:]]
            z, locked, extra = _aberth(cs, z, mp.eps, lambda t: float(abs(t)))
            iters += extra
            roots = [0j] * zero_mult + list(z)

    residuals = tuple(float(abs(p(complex(r)))) for r in roots)
    clusters = cluster_points([complex(r) for r in roots], rtol=cluster_rtol)
    roots_sorted = sorted(
        (complex(r) for r in roots), key=lambda v: (v.real, v.imag)
    )
    return PolyRoots(tuple(roots_sorted), clusters, residuals, iters)


# --------------------------------------------------------------------------
# resultants / discriminants
# --------------------------------------------------------------------------


def sylvester_matrix(p: Polynomial, q: Polynomial) -> list[list]:
    """Sylvester matrix in the convention Res(p,q) = lc(p)^deg(q) * prod q(alpha_i)."""
    n, m = p.degree, q.degree
    if n < 1 or m < 1:
        raise ValueError("resultant requires both degrees >= 1")
    size = n + m
    pm = list(reversed(p.coeffs))
    qm = list(reversed(q.coeffs))
    rows = []
    for i in range(m):
        rows.append([0] * i + pm + [0] * (size - n - 1 - i))
    for i in range(n):
        rows.append([0] * i + qm + [0] * (size - m - 1 - i))
    return rows


def _det_bareiss_fraction(rows: list[list[Fraction]]):
    """Fraction-free style elimination; exact for rational entries."""
    a = [[Fraction(x) if isinstance(x, int) else x for x in row] for row in rows]
    n = len(a)
    sign = 1
    prev = Fraction(1)
    for k in range(n - 1):
        if a[k][k] == 0:
            piv = next((i for i in range(k + 1, n) if a[i][k] != 0), None)
            if piv is None:
                return Fraction(0)
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
            a[i][k] = Fraction(0)
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def resultant(p: Polynomial, q: Polynomial):
    """Resultant of p and q: lc(p)^deg(q) * prod over roots alpha of p of q(alpha).

    Exact-tier inputs give an exact Fraction (zero iff a common root exists);
    floating inputs go through an LU determinant of the Sylvester matrix and
    are zero only up to rounding (compare against ``1e-10 * scale``).
    """
    if p.degree < 1 or q.degree < 1:
        raise ValueError("resultant requires both degrees >= 1 (nonzero lc)")
    rows = sylvester_matrix(p, q)
    if p.mode is Precision.EXACT and q.mode is Precision.EXACT:
        return _det_bareiss_fraction(rows)
    arr = np.array([[complex(to_double(x)) for x in row] for row in rows])
    det = complex(np.linalg.det(arr))
    if abs(det.imag) <= 1e-12 * (1 + abs(det.real)):
        return det.real
    return det


def discriminant(p: Polynomial):
    """Res(p, p') / lc(p)."""
    res = resultant(p, p.derivative())
    lc = p.lc
    if isinstance(lc, ExactTypes):
        return Fraction(res) / lc
    return res / lc


# --------------------------------------------------------------------------
# secular polynomials linear in one parameter
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class BivariateSecular:
    """P(E; p) = A(E) + p * B(E) with deg B < deg A.

    A is the characteristic polynomial at p = 0; the full family stays
    linear in the sweep parameter p.
    """

    A: Polynomial
    B: Polynomial
    parameter: str = "p"

    def __post_init__(self):
        if self.A.degree < 1:
            raise ValueError("A must have degree >= 1")
        if not self.B.is_zero and self.B.degree >= self.A.degree:
            raise ValueError("deg B must be < deg A")

    @property
    def degree(self) -> int:
        return self.A.degree

    def poly_at(self, p0) -> Polynomial:
        """Specialize the parameter; exact when p0 and the coefficients are."""
        if isinstance(p0, ExactTypes) and self.A.mode is Precision.EXACT:
            return self.A + self.B.scale(Fraction(p0))
        return self.A.to_double() + self.B.to_double().scale(to_double(p0))


def _det_bareiss_poly(rows: list[list[Polynomial]]) -> Polynomial:
    """Bareiss elimination over exact polynomial entries (exact division)."""
    a = [row[:] for row in rows]
    n = len(a)
    sign = 1
    prev = Polynomial([1])
    for k in range(n - 1):
        if a[k][k].is_zero:
            piv = next((i for i in range(k + 1, n) if not a[i][k].is_zero), None)
            if piv is None:
                return Polynomial.zero()
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num.exact_div(prev)
            a[i][k] = Polynomial.zero()
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign == 1 else -det


def discriminant_in_E(s: BivariateSecular) -> Polynomial:
    """Discriminant of A(E) + p*B(E) with respect to E, as a polynomial in p.

    Zeros of the returned polynomial are exactly the parameter values where
    the secular polynomial acquires a repeated E-root.  Normalized as
    Res_E(P, dP/dE) / lc_E(P); requires exact coefficients and a constant
    (parameter-independent) leading E-coefficient, which holds whenever
    deg B < deg A.
    """
    if s.A.mode is not Precision.EXACT or s.B.mode is not Precision.EXACT:
        raise TypeError("discriminant_in_E requires exact coefficients")
    n = s.A.degree
    # coefficient of E^k as a polynomial in p
    a = list(s.A.coeffs)
    b = list(s.B.coeffs) + [0] * (n + 1 - len(s.B.coeffs))
    ce = [Polynomial([Fraction(a[k]), Fraction(b[k])]) for k in range(n + 1)]
    de = [k * ce[k] for k in range(1, n + 1)]

    size = n + (n - 1)
    pm = list(reversed(ce))
    qm = list(reversed(de))
    zero = Polynomial.zero()
    rows = []
    for i in range(n - 1):
        rows.append([zero] * i + pm + [zero] * (size - n - 1 - i))
    for i in range(n):
        rows.append([zero] * i + qm + [zero] * (size - n - i))
    det = _det_bareiss_poly(rows)
    lc = Fraction(s.A.lc)
    return det.scale(1 / lc)
