"""Constructors for the three matrix families and the coupling parameterizations.

* ``epn_matrix``      -- tridiagonal family whose whole spectrum coalesces at
  t = 0 into an exceptional point of maximal order (EPN);
* ``bc_matrix``       -- discrete Laplacian with boundary-controlled complex
  corner couplings z and conj(z);
* ``hermitian_demo``  -- seeded random Hermitian pencil A + t*B used to
  exhibit avoided crossings.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

import numpy as np

from .core import Tridiagonal, DenseMatrix, as_fraction


# --------------------------------------------------------------------------
# coupling parameterizations
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Robin:
    """z = 1/(1 - beta*h - i*alpha*h); h is an inessential real scale."""

    alpha: float
    beta: float
    h: float = 1.0


@dataclass(frozen=True)
class Circle:
    """z = i*sqrt(1 - r^2); |r| <= 1 keeps z on the unit half-circle."""

    r: float


@dataclass(frozen=True)
class ShiftedCircle:
    """z = y + i*sqrt(1 - r^2)."""

    y: float
    r: float


@dataclass(frozen=True)
class Explicit:
    z: complex


ZParam = Union[Robin, Circle, ShiftedCircle, Explicit]


def z_value(param: ZParam) -> complex:
    """Evaluate a coupling parameterization to a complex number.

    The square root is the principal complex branch, so |r| > 1 is allowed
    and yields a real-shifted coupling (a Hermitian matrix); the in-model
    region is |r| <= 1.
    """
    if isinstance(param, Robin):
        den = 1.0 - param.beta * param.h - 1j * param.alpha * param.h
        if den == 0:
            raise ValueError("Robin coupling undefined: 1 - beta*h - i*alpha*h = 0")
        return 1.0 / den
    if isinstance(param, Circle):
        return 1j * cmath.sqrt(1.0 - param.r * param.r)
    if isinstance(param, ShiftedCircle):
        return param.y + 1j * cmath.sqrt(1.0 - param.r * param.r)
    if isinstance(param, Explicit):
        return complex(param.z)
    raise TypeError(f"not a coupling parameterization: {param!r}")


def in_model(param: ZParam) -> bool:
    """True when the parameterization lies in its documented real-r domain."""
    if isinstance(param, (Circle, ShiftedCircle)):
        return abs(param.r) <= 1.0
    return True


# --------------------------------------------------------------------------
# matrix families
# --------------------------------------------------------------------------


def _epn_weight_sq(n: int, k: int) -> int:
    return (k + 1) * (n - k - 1)


def epn_matrix(n: int, t: float) -> Tridiagonal:
    """N-level family with a maximal-order exceptional point at t = 0.

    With tau = 1 - t and shift = 8*sqrt(1 - tau^2):
    diag_k = (2k - n + 1) + shift, sup_k = +sqrt((k+1)(n-k-1))*tau,
    sub_k = -sup_k.  The spectrum is (2k - n + 1 + 8)*sqrt(1 - tau^2): real
    and positive on t in (0, 1] for n <= 8, fully degenerate at t = 0, and
    purely non-real for t < 0 (the shift turns imaginary; the principal
    square root is used for t outside [0, 2]).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    tau = 1.0 - t
    inside = 1.0 - tau * tau
    if inside >= 0:
        shift = 8.0 * math.sqrt(inside)
        diag = tuple(float(2 * k - n + 1) + shift for k in range(n))
    else:
        shift = 8.0 * cmath.sqrt(inside)
        diag = tuple(complex(2 * k - n + 1) + shift for k in range(n))
    w = [math.sqrt(_epn_weight_sq(n, k)) for k in range(n - 1)]
    sup = tuple(wk * tau for wk in w)
    sub = tuple(-wk * tau for wk in w)
    return Tridiagonal(diag, sup, sub)


def epn_exact_parts(n: int, t) -> tuple[tuple | None, tuple]:
    """Exact diagonal and off-diagonal products for rational t.

    The products sup_k*sub_k = -(k+1)(n-k-1)*tau^2 are rational for every
    rational t and feed the exact characteristic-polynomial recurrence.
    The diagonal is only rational when 8*sqrt(1 - tau^2) is (t = 0 or 2
    give 0, t = 1 gives 8); otherwise None is returned for it.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    t = as_fraction(t)
    tau = 1 - t
    tau2 = tau * tau
    products = tuple(
        -Fraction(_epn_weight_sq(n, k)) * tau2 for k in range(n - 1)
    )
    inside = 1 - tau2
    diag = None
    if inside == 0:
        diag = tuple(Fraction(2 * k - n + 1) for k in range(n))
    else:
        root = _fraction_sqrt(inside)
        if root is not None:
            diag = tuple(Fraction(2 * k - n + 1) + 8 * root for k in range(n))
    return diag, products


def _fraction_sqrt(q: Fraction) -> Fraction | None:
    """Exact square root of a nonnegative rational, or None."""
    if q < 0:
        return None
    num = math.isqrt(q.numerator)
    den = math.isqrt(q.denominator)
    if num * num == q.numerator and den * den == q.denominator:
        return Fraction(num, den)
    return None


def bc_matrix(n: int, z: complex) -> Tridiagonal:
    """Discrete Laplacian with corner couplings 2-z and 2-conj(z).

    diag = (2-z, 2, ..., 2, 2-conj(z)), sup = sub = -1; Hermitian exactly
    when z is real.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    z = complex(z)
    diag = [2.0 + 0j] * n
    diag[0] = 2.0 - z
    diag[-1] = 2.0 - z.conjugate()
    ones = tuple(-1.0 + 0j for _ in range(n - 1))
    return Tridiagonal(tuple(diag), ones, ones)


def hermitian_demo(n: int, t: float, seed: int) -> DenseMatrix:
    """Random Hermitian pencil A + t*B, reproducible for a fixed seed.

    A and B are Hermitized standard complex Gaussians drawn in that order
    from ``numpy.random.default_rng(seed)``; exhibits avoided crossings of
    all eigenvalue curves as t sweeps an interval.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    a, b = hermitian_demo_pencil(n, seed)
    return DenseMatrix(a + t * b)


def hermitian_demo_pencil(n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """The (A, B) pair behind ``hermitian_demo``."""
    rng = np.random.default_rng(seed)
    g1 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    g2 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (g1 + g1.conj().T) / 2.0, (g2 + g2.conj().T) / 2.0


# --------------------------------------------------------------------------
# sweepable model specifications
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EpnModel:
    """EPN family swept over t."""

    n: int

    param = "t"

    def matrix(self, t: float) -> np.ndarray:
        return epn_matrix(self.n, t).to_array()

    def matrix_mp(self, t):
        """Entries built in mpmath arithmetic (for polishing near the EP)."""
        import mpmath as mp

        n = self.n
        tau = 1 - mp.mpf(t) if not isinstance(t, mp.mpc) else 1 - t
        shift = 8 * mp.sqrt(1 - tau * tau)
        m = mp.zeros(n)
        for k in range(n):
            m[k, k] = (2 * k - n + 1) + shift
        for k in range(n - 1):
            w = mp.sqrt((k + 1) * (n - k - 1))
            m[k, k + 1] = w * tau
            m[k + 1, k] = -w * tau
        return m

    def describe(self) -> dict:
        return {"model": "epn", "n": self.n, "param": "t"}


@dataclass(frozen=True)
class BcModel:
    """Boundary-controlled family at fixed shift y, swept over r."""

    n: int
    y: float = 0.0

    param = "r"

    def matrix(self, r: float) -> np.ndarray:
        z = z_value(ShiftedCircle(self.y, r))
        return bc_matrix(self.n, z).to_array()

    def matrix_mp(self, r):
        """Entries built in mpmath arithmetic (for polishing near an EP)."""
        import mpmath as mp

        n = self.n
        rr = mp.mpf(r) if not isinstance(r, mp.mpc) else r
        z = mp.mpf(self.y) + mp.mpc(0, 1) * mp.sqrt(1 - rr * rr)
        m = mp.zeros(n)
        for k in range(n):
            m[k, k] = 2
        m[0, 0] = 2 - z
        m[n - 1, n - 1] = 2 - mp.conj(z)
        for k in range(n - 1):
            m[k, k + 1] = -1
            m[k + 1, k] = -1
        return m

    def describe(self) -> dict:
        return {"model": "bc", "n": self.n, "y": self.y, "param": "r"}


@dataclass(frozen=True)
class HermitianDemoModel:
    """Seeded Hermitian pencil swept over t."""

    n: int
    seed: int = 42

    param = "t"

    def matrix(self, t: float) -> np.ndarray:
        return hermitian_demo(self.n, t, self.seed).a

    def describe(self) -> dict:
        return {"model": "hermitian-demo", "n": self.n, "seed": self.seed, "param": "t"}


ModelSpec = Union[EpnModel, BcModel, HermitianDemoModel]
