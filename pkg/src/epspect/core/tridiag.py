"""Tridiagonal and dense matrix containers plus characteristic polynomials.

The characteristic polynomial of a tridiagonal matrix only involves the
diagonal entries and the products sup[k]*sub[k], which lets the exact tier
handle matrices whose individual off-diagonal entries are irrational but
whose products are rational.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .poly import Polynomial
from .scalars import Precision, to_double


@dataclass(frozen=True)
class Tridiagonal:
    """Complex tridiagonal matrix stored as three bands.

    ``diag`` has n entries, ``sup``/``sub`` n-1 each (``sup[k]`` sits at
    position (k, k+1), ``sub[k]`` at (k+1, k)).
    """

    diag: tuple
    sup: tuple
    sub: tuple

    def __post_init__(self):
        object.__setattr__(self, "diag", tuple(self.diag))
        object.__setattr__(self, "sup", tuple(self.sup))
        object.__setattr__(self, "sub", tuple(self.sub))
        n = len(self.diag)
        if n < 1:
            raise ValueError("dimension must be >= 1")
        if len(self.sup) != n - 1 or len(self.sub) != n - 1:
            raise ValueError("off-diagonals must have length n-1")

    @property
    def n(self) -> int:
        return len(self.diag)

    def offdiag_products(self) -> tuple:
        """Products sup[k]*sub[k]; all the recurrence needs besides diag."""
        return tuple(s * t for s, t in zip(self.sup, self.sub))

    def is_hermitian(self, tol: float = 0.0) -> bool:
        """Diagonal real and sup[k] == conj(sub[k]) for all k (within tol)."""

        def imag_of(v):
            return getattr(v, "imag", 0)

        if any(abs(imag_of(d)) > tol for d in self.diag):
            return False
        for s, t in zip(self.sup, self.sub):
            delta = complex(to_double(s)) - complex(to_double(t)).conjugate()
            if abs(delta) > tol:
                return False
        return True

    def to_array(self) -> np.ndarray:
        a = np.zeros((self.n, self.n), dtype=complex)
        for k, d in enumerate(self.diag):
            a[k, k] = complex(to_double(d))
        for k in range(self.n - 1):
            a[k, k + 1] = complex(to_double(self.sup[k]))
            a[k + 1, k] = complex(to_double(self.sub[k]))
        return a


@dataclass(frozen=True)
class DenseMatrix:
    """Square complex matrix with finite entries."""

    a: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.a, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("matrix must be square")
        if not np.all(np.isfinite(arr.view(float))):
            raise ValueError("matrix entries must be finite")
        object.__setattr__(self, "a", arr)

    @property
    def n(self) -> int:
        return self.a.shape[0]

    def is_hermitian(self, tol: float = 0.0) -> bool:
        return bool(np.max(np.abs(self.a - self.a.conj().T)) <= tol)


def as_array(m) -> np.ndarray:
    """Accepts Tridiagonal, DenseMatrix or array-like; returns complex ndarray."""
    if isinstance(m, Tridiagonal):
        return m.to_array()
    if isinstance(m, DenseMatrix):
        return m.a
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise ValueError("matrix must be square")
    return arr


def charpoly_from_parts(diag, products) -> Polynomial:
    """det(T - E*I) from the diagonal and the off-diagonal products.

    Three-term minor recurrence D_k = (d_k - E) D_{k-1} - products[k-1] D_{k-2};
    exact when the inputs are exact.  Floating overflow surfaces as an
    ArithmeticError rather than propagating non-finite coefficients.
    """
    diag = list(diag)
    products = list(products)
    if len(products) != len(diag) - 1:
        raise ValueError("need exactly n-1 off-diagonal products")
    one = diag[0] * 0 + 1  # unit in the input arithmetic
    prev2 = Polynomial([one])  # D_0 bootstrap
    prev1 = Polynomial([one])
    cur = prev1
    for k, d in enumerate(diag):
        factor = Polynomial([d, -1])
        cur = factor * prev1
        if k > 0:
            cur = cur - Polynomial([products[k - 1]]) * prev2
        prev2, prev1 = prev1, cur
    if cur.mode is not Precision.EXACT:
        if not all(
            np.isfinite(complex(to_double(c))) for c in cur.coeffs
        ):
            raise ArithmeticError("floating overflow in characteristic polynomial")
    return cur


def charpoly_tridiag(t: Tridiagonal) -> Polynomial:
    """Characteristic polynomial det(T - E*I) of a tridiagonal matrix."""
    return charpoly_from_parts(t.diag, t.offdiag_products())


def exact_rank(rows: list[list]) -> int:
    """Rank over the rationals by exact Gaussian elimination."""
    a = [[Fraction(x) for x in row] for row in rows]
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    rank = 0
    row = 0
    for col in range(ncols):
        piv = next((i for i in range(row, nrows) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[row], a[piv] = a[piv], a[row]
        inv = 1 / a[row][col]
        a[row] = [x * inv for x in a[row]]
        for i in range(nrows):
            if i != row and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[row])]
        rank += 1
        row += 1
        if row == nrows:
            break
    return rank


def exact_matmul(a: list[list], b: list[list]) -> list[list]:
    """Exact matrix product for rational/integer entries."""
    n = len(a)
    m = len(b[0])
    k = len(b)
    return [
        [sum(a[i][t] * b[t][j] for t in range(k)) for j in range(m)]
        for i in range(n)
    ]
