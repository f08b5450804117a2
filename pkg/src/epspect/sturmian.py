"""Sturmian coupling function r(E) of the boundary-controlled family.

The determinant det(R - E) of the boundary-controlled matrix is bilinear in
the two corner couplings z and conj(z), hence linear in p = r^2 once
z = y + i*sqrt(1 - r^2).  Writing det = A(E) + p*B(E) inverts to the
two-branched coupling function r^2(E) = -A(E)/B(E): every spectral question
at fixed y becomes a question about one rational function of E.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .core import (
    BivariateSecular,
    Polynomial,
    as_fraction,
    charpoly_from_parts,
    eig_dense,
    poly_roots,
)
from .models import bc_matrix


@lru_cache(maxsize=None)
def bc_secular_parts(n: int) -> tuple[Polynomial, Polynomial, Polynomial, Polynomial]:
    """Exact decomposition det(R - E) = c0 + c1*z + c2*conj(z) + c3*z*conj(z).

    Obtained by evaluating the characteristic-polynomial recurrence at the
    four corner assignments (z, conj z) in {0,1}^2, which is exact because
    all remaining entries are integers.  By the reversal symmetry of the
    matrix c1 == c2.
    """
    if n < 2:
        raise ValueError("n must be >= 2")

    def corner_poly(u: int, v: int) -> Polynomial:
        diag = [Fraction(2)] * n
        diag[0] = Fraction(2 - u)
        diag[-1] = Fraction(2 - v)
        products = [Fraction(1)] * (n - 1)
        return charpoly_from_parts(diag, products)

    p00 = corner_poly(0, 0)
    p10 = corner_poly(1, 0)
    p01 = corner_poly(0, 1)
    p11 = corner_poly(1, 1)
    c0 = p00
    c1 = p10 - p00
    c2 = p01 - p00
    c3 = p11 - p10 - p01 + p00
    assert c1 == c2, "corner symmetry violated"
    return c0, c1, c2, c3


def secular_in_p_and_y(n: int, y, p) -> Polynomial:
    """Exact det(R - E) at rational shift y and rational p = r^2."""
    c0, c1, c2, c3 = bc_secular_parts(n)
    y = as_fraction(y)
    p = as_fraction(p)
    return c0 + (c1 + c2).scale(y) + c3.scale(y * y + 1 - p)


@dataclass(frozen=True)
class SturmianFunction:
    """r^2(E) = -A(E)/B(E) for the boundary-controlled family at shift y.

    A(E) + r^2 B(E) equals the characteristic polynomial of the assembled
    matrix on the model domain |r| <= 1; outside it the matrix conjugates a
    coupling that has become real, while A + p B continues analytically.
    """

    n: int
    y: Fraction
    A: Polynomial
    B: Polynomial

    @property
    def secular(self) -> BivariateSecular:
        return BivariateSecular(self.A, self.B, parameter="r^2")

    def poly_at(self, p) -> Polynomial:
        return self.secular.poly_at(p)

    def common_factor(self) -> Polynomial:
        """Exact gcd(A, B); nontrivial iff some E is an eigenvalue for every r."""
        return self.A.gcd(self.B)


def bivariate_secular(n: int, y) -> SturmianFunction:
    """Exact A, B with det(R(n, y + i*sqrt(1-r^2)) - E) = A(E) + r^2*B(E).

    y may be an int, Fraction or float (floats convert exactly).
    """
    c0, c1, c2, c3 = bc_secular_parts(n)
    y = as_fraction(y)
    a = c0 + (c1 + c2).scale(y) + c3.scale(y * y + 1)
    b = -c3
    return SturmianFunction(n, y, a, b)


# --------------------------------------------------------------------------
# pointwise evaluation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class R2Value:
    """Value of r^2 at one energy: finite, a pole, or indeterminate (0/0)."""

    kind: str  # "finite" | "pole" | "indeterminate"
    value: float | None
    exact: Fraction | None = None

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"


def sturmian_r2(s: SturmianFunction, energy) -> R2Value:
    """Evaluate r^2(E) = -A(E)/B(E), reporting poles and 0/0 explicitly.

    Evaluation is exact (the float input converts exactly to a rational), so
    a pole is B(E) == 0 identically, not a small-denominator accident.
    """
    e = as_fraction(energy)
    a = s.A(e)
    b = s.B(e)
    if b == 0:
        return R2Value("indeterminate" if a == 0 else "pole", None)
    val = -a / b
    return R2Value("finite", float(val), val)


# --------------------------------------------------------------------------
# branch tracing
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class TracePoint:
    energy: float
    r_plus: float
    r_minus: float
    in_model: bool
    refined: bool = False


@dataclass(frozen=True)
class BranchPoint:
    """A marked energy on the Sturmian plot."""

    energy: float
    kind: str  # "pole-of-r" | "indeterminate" | "zero-of-r" | "branch-merge"
    multiplicity: int


@dataclass(frozen=True)
class BranchTrace:
    points: tuple[TracePoint, ...]
    persistent_lines: tuple[float, ...]
    poles: tuple[BranchPoint, ...]
    merges: tuple[BranchPoint, ...]


def _real_roots(p: Polynomial, lo: float | None = None, hi: float | None = None):
    if p.degree < 1:
        return []
    out = []
    for c in poly_roots(p.to_double()).clusters:
        if abs(c.center.imag) <= 1e-8 * (1 + abs(c.center)):
            e = c.center.real
            if (lo is None or e >= lo) and (hi is None or e <= hi):
                out.append((e, c.multiplicity))
    return out


def sturmian_poles(s: SturmianFunction) -> tuple[BranchPoint, ...]:
    """Real zeros of the denominator B, classified pole vs indeterminate.

    An energy where A and B vanish together (detected by exact gcd) is an
    eigenvalue for every coupling, not a divergence of r(E).
    """
    g = s.common_factor()
    points = []
    for e, mult in _real_roots(s.B):
        kind = "pole-of-r"
        if g.degree >= 1 and abs(g(complex(e))) <= 1e-8 * (1 + abs(e)):
            kind = "indeterminate"
        points.append(BranchPoint(e, kind, mult))
    return tuple(sorted(points, key=lambda b: b.energy))


def branch_merges(s: SturmianFunction) -> tuple[BranchPoint, ...]:
    """Critical points of r^2(E): real zeros of A'B - AB' away from poles."""
    num = s.A.derivative() * s.B - s.A * s.B.derivative()
    bd = s.B.to_double()
    out = []
    for e, mult in _real_roots(num):
        if abs(bd(complex(e))) <= 1e-8 * (1 + abs(e)) ** s.B.degree:
            continue
        out.append(BranchPoint(e, "branch-merge", mult))
    return tuple(sorted(out, key=lambda b: b.energy))


def branch_trace(
    s: SturmianFunction,
    e_range: tuple[float, float],
    samples: int,
    refine_levels: int = 3,
    refine_factor: int = 10,
) -> BranchTrace:
    """Both coupling branches r = +-sqrt(r^2(E)) over an energy window.

    Energies with r^2 < 0 are omitted; r^2 > 1 is emitted but flagged
    outside the model.  The uniform grid is locally refined (3 levels,
    factor 10 each) around poles and branch merges; output is ordered by
    energy regardless of refinement.
    """
    lo, hi = float(e_range[0]), float(e_range[1])
    if samples < 2:
        raise ValueError("samples must be >= 2")
    if hi <= lo:
        raise ValueError("empty energy range")
    base = np.linspace(lo, hi, samples)
    h = (hi - lo) / (samples - 1)

    poles = sturmian_poles(s)
    merges = branch_merges(s)
    special = [b.energy for b in poles] + [b.energy for b in merges]

    energies = [(float(e), False) for e in base]
    for e0 in special:
        if not (lo <= e0 <= hi):
            continue
        window = h
        for _ in range(refine_levels):
            step = window / refine_factor
            k = np.arange(-refine_factor, refine_factor + 1)
            for e in e0 + k * step:
                if lo <= e <= hi:
                    energies.append((float(e), True))
            window = step

    energies.sort(key=lambda t: t[0])
    points = []
    seen = set()
    for e, refined in energies:
        key = round((e - lo) / (h * 1e-6))
        if key in seen:
            continue
        seen.add(key)
        val = sturmian_r2(s, e)
        if not val.is_finite or val.value < 0:
            continue
        r = math.sqrt(val.value)
        points.append(TracePoint(e, r, -r, val.value <= 1.0, refined))

    lines = []
    g = s.common_factor()
    if g.degree >= 1:
        lines = [e for e, _ in _real_roots(g, lo, hi)]
    return BranchTrace(tuple(points), tuple(sorted(lines)), poles, merges)


# --------------------------------------------------------------------------
# direct spectra
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class RealSpectrum:
    values: np.ndarray
    real_flags: np.ndarray
    in_model: bool


def real_spectrum_at(n: int, y: float, r: float) -> RealSpectrum:
    """Eigenvalues of the boundary-controlled matrix with per-value reality flags.

    |r| > 1 is allowed (the coupling becomes real and the matrix Hermitian)
    but flagged outside the model.  A value is 'real' when
    |Im| <= 1e-10 * max(1, spectral scale).
    """
    z = y + 1j * cmath.sqrt(1.0 - r * r)
    res = eig_dense(bc_matrix(n, z))
    scale = max(1.0, float(np.max(np.abs(res.values))))
    flags = np.abs(res.values.imag) <= 1e-10 * scale
    return RealSpectrum(res.values, flags, abs(r) <= 1.0)
