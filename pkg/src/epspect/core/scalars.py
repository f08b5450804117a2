"""Arithmetic modes and scalar helpers.

Three tiers are used throughout the package:

* ``EXACT``    -- rational arithmetic (``int`` / ``fractions.Fraction``),
  used for every polynomial identity.  Values are kept in lowest terms by
  ``Fraction`` itself and can never overflow.
* ``DOUBLE``   -- IEEE double (``float`` / ``complex``), used for sweeps.
* ``EXTENDED`` -- mpmath multiprecision, used to polish results close to a
  spectral degeneracy where double arithmetic loses too many digits.

Conversions out of the exact tier are explicit (``to_double`` /
``to_extended``); nothing in the package silently promotes a float back to
a rational.
"""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass
from fractions import Fraction

import mpmath as mp

EXTENDED_DPS = 30

ExactTypes = (int, Fraction)
MpTypes = (mp.mpf, mp.mpc)


class Precision(enum.Enum):
    EXACT = "exact"
    DOUBLE = "double"
    EXTENDED = "extended"


def mode_of(value) -> Precision:
    """Arithmetic tier a scalar belongs to."""
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, ExactTypes):
        return Precision.EXACT
    if isinstance(value, MpTypes):
        return Precision.EXTENDED
    if isinstance(value, (float, complex)):
        return Precision.DOUBLE
    raise TypeError(f"unsupported scalar type {type(value)!r}")


def is_exact_zero(value) -> bool:
    """True only for a value that is exactly zero in its own arithmetic."""
    return value == 0


def to_double(value):
    """Explicit conversion to double arithmetic (complex preserved)."""
    if isinstance(value, Fraction):
        return float(value)
    if isinstance(value, int):
        return float(value)
    if isinstance(value, mp.mpc):
        return complex(value)
    if isinstance(value, mp.mpf):
        return float(value)
    return value


def to_extended(value):
    """Explicit conversion to mpmath arithmetic at the current precision."""
    if isinstance(value, Fraction):
        return mp.mpf(value.numerator) / mp.mpf(value.denominator)
    if isinstance(value, int):
        return mp.mpf(value)
    if isinstance(value, complex):
        return mp.mpc(value)
    if isinstance(value, float):
        return mp.mpf(value)
    return value


def as_fraction(value) -> Fraction:
    """Exact rational from an int/Fraction/float (floats convert exactly)."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(value)
    raise TypeError(f"cannot represent {type(value)!r} exactly")


def principal_sqrt(value):
    """Principal complex square root; real output for real non-negative input."""
    if isinstance(value, MpTypes):
        return mp.sqrt(value)
    if isinstance(value, complex) or value < 0:
        return cmath.sqrt(value)
    import math

    return math.sqrt(value)


# --------------------------------------------------------------------------
# root clustering
# --------------------------------------------------------------------------

CLUSTER_RTOL = 1e-7  # relative radius that merges near-coincident roots


@dataclass(frozen=True)
class RootCluster:
    """A group of numerically coincident values.

    ``multiplicity`` is the cluster size, ``radius`` the largest distance of
    a member from the centroid.
    """

    center: complex
    radius: float
    multiplicity: int
    members: tuple[complex, ...]


def cluster_points(values, rtol: float = CLUSTER_RTOL) -> tuple[RootCluster, ...]:
    """Single-linkage clustering of complex values.

    Two values join the same cluster when they lie within
    ``rtol * (1 + |midpoint|)`` of each other (directly or through a chain).
    Clusters are returned sorted by (Re, Im) of their centroid.
    """
    vals = [complex(v) for v in values]
    m = len(vals)
    parent = list(range(m))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(m):
        for j in range(i + 1, m):
            mid = abs(vals[i] + vals[j]) / 2
            if abs(vals[i] - vals[j]) <= rtol * (1 + mid):
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[ri] = rj

    groups: dict[int, list[complex]] = {}
    for i, v in enumerate(vals):
        groups.setdefault(find(i), []).append(v)

    clusters = []
    for members in groups.values():
        center = sum(members) / len(members)
        radius = max(abs(v - center) for v in members)
        clusters.append(
            RootCluster(center, radius, len(members), tuple(members))
        )
    clusters.sort(key=lambda c: (c.center.real, c.center.imag))
    return tuple(clusters)
