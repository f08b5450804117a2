"""Dense nonsymmetric eigensolver with left/right pairs and residual checks.

Double precision work is delegated to LAPACK through scipy; the extended
tier runs mpmath's QR eigensolver, which matters close to a degeneracy
where double-precision eigenvalues lose half their digits per coalescing
level.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath as mp
import numpy as np
import scipy.linalg as sla

from .scalars import CLUSTER_RTOL, EXTENDED_DPS, Precision, RootCluster, cluster_points
from .tridiag import as_array


@dataclass(frozen=True)
class EigResult:
    """Eigentriples of a dense matrix.

    ``right[:, i]`` satisfies M x = values[i] x, ``left[:, i]`` satisfies
    y^H M = values[i] y^H; columns are index-paired by eigenvalue.
    ``low_confidence[i]`` marks members of an eigenvalue cluster whose
    eigenvectors are not individually trustworthy.
    """

    values: np.ndarray
    right: np.ndarray
    left: np.ndarray
    residual_right: np.ndarray
    residual_left: np.ndarray
    low_confidence: np.ndarray
    clusters: tuple[RootCluster, ...]
    values_mp: tuple | None = None

    @property
    def n(self) -> int:
        return len(self.values)


def _sort_triples(values, right, left):
    order = np.lexsort((values.imag, values.real))
    return values[order], right[:, order], left[:, order]


def _eig_double(a: np.ndarray):
    values, vl, vr = sla.eig(a, left=True, right=True)
    return values, vr, vl


def _eig_extended(a: np.ndarray):
    n = a.shape[0]
    with mp.workdps(EXTENDED_DPS):
        m = mp.matrix(n)
        for i in range(n):
            for j in range(n):
                m[i, j] = mp.mpc(a[i, j])
        ev, el, er = mp.eig(m, left=True, right=True)
        values = np.array([complex(v) for v in ev])
        right = np.array(
            [[complex(er[i, j]) for j in range(n)] for i in range(n)]
        )
        # mpmath returns left eigenvectors as rows with EL*M = diag(E)*EL;
        # our convention stores y_i as a column with y^H M = lambda y^H.
        left = np.array(
            [[complex(el[j, i]).conjugate() for j in range(n)] for i in range(n)]
        )
        values_mp = tuple(ev)
    return values, right, left, values_mp


def eig_dense(
    m,
    precision: Precision = Precision.DOUBLE,
    cluster_rtol: float = CLUSTER_RTOL,
) -> EigResult:
    """Eigenvalues plus right and left eigenvectors of a dense matrix.

    Residuals are ||M x - lambda x||_2 (and the adjoint analogue) per
    column.  Members of any eigenvalue cluster tighter than
    ``cluster_rtol`` are flagged low-confidence instead of raising: their
    individual eigenvectors are ill-conditioned near a degeneracy.
    """
    a = as_array(m)
    values_mp = None
    if precision is Precision.EXTENDED:
        values, right, left, values_mp = _eig_extended(a)
    elif precision is Precision.DOUBLE:
        values, right, left = _eig_double(a)
    else:
        raise ValueError("eig_dense supports double or extended precision")

    values, right, left = _sort_triples(values, right, left)
    norm = np.linalg.norm(a, "fro")
    res_r = np.array(
        [np.linalg.norm(a @ right[:, i] - values[i] * right[:, i]) for i in range(len(values))]
    )
    res_l = np.array(
        [
            np.linalg.norm(left[:, i].conj() @ a - values[i] * left[:, i].conj())
            for i in range(len(values))
        ]
    )

    clusters = cluster_points(values, rtol=cluster_rtol)
    low = np.zeros(len(values), dtype=bool)
    for c in clusters:
        if c.multiplicity > 1:
            for i, v in enumerate(values):
                if abs(v - c.center) <= c.radius * (1 + 1e-12) + 1e-300:
                    low[i] = True

    if norm > 0:
        bad = (res_r > 1e-8 * norm) & ~low
        if np.any(bad):
            low = low | bad
    return EigResult(values, right, left, res_r, res_l, low, clusters, values_mp)
