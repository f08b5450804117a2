"""Location and classification of spectral degeneracies.

Detection runs in double precision; every candidate is re-polished under
mpmath and only accepted as an exceptional point if its eigenvalue cluster
shrinks by at least two orders of magnitude under polishing.  That chain is
what separates a true non-Hermitian degeneracy from the rounding fog that
surrounds one in double arithmetic.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath as mp
import numpy as np
from scipy.optimize import linear_sum_assignment, minimize_scalar

from .core import (
    CLUSTER_RTOL,
    Polynomial,
    Precision,
    Tridiagonal,
    as_array,
    as_fraction,
    charpoly_tridiag,
    cluster_points,
    discriminant,
    discriminant_in_E,
    eig_dense,
    exact_matmul,
    exact_rank,
    poly_roots,
)
from .models import BcModel, ShiftedCircle, bc_matrix, z_value
from .sturmian import SturmianFunction, bc_secular_parts, bivariate_secular

THREADS_ENV = "EPSPECT_THREADS"
REALITY_RTOL = 1e-10
POLISH_SHRINK = 100.0  # accepted EPs must tighten at least this much
POLISH_DPS = 40
PERTURB_DPS = 30


def reality_flags(values: np.ndarray, rtol: float = REALITY_RTOL) -> np.ndarray:
    scale = max(1.0, float(np.max(np.abs(values))) if len(values) else 1.0)
    return np.abs(np.asarray(values).imag) <= rtol * scale


# --------------------------------------------------------------------------
# parameter sweeps with eigenvalue-track continuation
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class SweepResult:
    """Eigenvalue tracks over a parameter grid.

    ``tracks[i, k]`` is track i at grid point k; tracks are continued by
    minimal-total-displacement assignment between consecutive points, with
    the ordering fixed by an ascending (Re, Im) sort at the first point.
    ``warnings[k]`` flags points where the pairing is ambiguous because two
    eigenvalues lie closer than the step displacement.
    """

    grid: np.ndarray
    tracks: np.ndarray
    real_flags: np.ndarray
    warnings: np.ndarray
    model_info: dict = field(default_factory=dict)

    @property
    def n_tracks(self) -> int:
        return self.tracks.shape[0]


def _thread_count(threads: int | None) -> int:
    if threads is not None:
        return max(1, int(threads))
    env = os.environ.get(THREADS_ENV, "")
    try:
        return max(1, int(env))
    except ValueError:
        return 1


def sweep(
    model,
    param_range: tuple[float, float],
    samples: int,
    *,
    reality_rtol: float = REALITY_RTOL,
    threads: int | None = None,
    precision: Precision = Precision.DOUBLE,
) -> SweepResult:
    """Continued eigenvalue tracks of ``model.matrix(p)`` over a grid.

    Grid points are independent; with ``threads`` > 1 (or the EPSPECT_THREADS
    environment variable) they are solved in a thread pool and reassembled by
    index, so the result does not depend on scheduling.
    """
    if samples < 2:
        raise ValueError("samples must be >= 2")
    grid = np.linspace(float(param_range[0]), float(param_range[1]), samples)

    def solve(p):
        return eig_dense(model.matrix(p), precision=precision).values

    nworkers = _thread_count(threads)
    if nworkers > 1:
        with ThreadPoolExecutor(max_workers=nworkers) as pool:
            spectra = list(pool.map(solve, grid))
    else:
        spectra = [solve(p) for p in grid]

    n = len(spectra[0])
    tracks = np.zeros((n, samples), dtype=complex)
    warnings = np.zeros(samples, dtype=bool)
    order = np.lexsort((spectra[0].imag, spectra[0].real))
    tracks[:, 0] = spectra[0][order]
    for k in range(1, samples):
        prev = tracks[:, k - 1]
        cur = spectra[k]
        cost = np.abs(cur[None, :] - prev[:, None])
        rows, cols = linear_sum_assignment(cost)
        assigned = cur[cols[np.argsort(rows)]]
        tracks[:, k] = assigned
        step = np.abs(assigned - prev)
        if n > 1:
            gap = min(
                abs(assigned[i] - assigned[j])
                for i in range(n)
                for j in range(i + 1, n)
            )
            if gap < 2.0 * float(np.max(step)):
                warnings[k] = True

    flags = np.zeros_like(tracks, dtype=bool)
    for k in range(samples):
        flags[:, k] = reality_flags(tracks[:, k], rtol=reality_rtol)
    info = model.describe() if hasattr(model, "describe") else {}
    return SweepResult(grid, tracks, flags, warnings, info)


# --------------------------------------------------------------------------
# degeneracy classification
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Classification:
    """Local multiplicity structure of one (matrix, energy) pair."""

    kind: str  # "simple" | "ep" | "diabolic" | "indeterminate"
    algebraic: int
    geometric: int
    energy: complex
    residuals: dict


@dataclass(frozen=True)
class CriticalPoint:
    """A located spectral singularity."""

    params: dict
    energy: complex
    kind: str  # "ep" | "diabolic" | "sturmian-pole" | "indeterminate"
    order: int
    residuals: dict


def classify_degeneracy(
    m,
    energy: complex,
    *,
    precision: Precision = Precision.DOUBLE,
    cluster_rtol: float = CLUSTER_RTOL,
    rank_rtol: float = 1e-8,
    band: float = 10.0,
) -> Classification:
    """Algebraic/geometric multiplicity at one energy plus the verdict.

    Algebraic multiplicity is the size of the eigenvalue cluster at
    ``energy``; geometric multiplicity is n - rank(M - E I) with the rank
    read off the singular values at threshold ``rank_rtol * ||M||``.  A
    singular value inside (threshold/band, threshold*band) makes the rank
    call ambiguous and the verdict "indeterminate" instead of a guess.
    """
    a = as_array(m)
    n = a.shape[0]
    res = eig_dense(a, precision=precision, cluster_rtol=cluster_rtol)
    # algebraic multiplicity from root clustering of the characteristic
    # polynomial; for tridiagonal input the minor recurrence is far more
    # backward-stable than the eigensolver near a high-order degeneracy
    if isinstance(m, Tridiagonal):
        char = charpoly_tridiag(m)
        if char.mode is not Precision.DOUBLE:
            char = char.to_double()
        # the recurrence often yields exact coefficients; re-polishing the
        # roots under mpmath then resolves a true multiple root far below
        # the clustering tolerance, which double evaluation noise cannot
        clusters = poly_roots(
            char, precision=Precision.EXTENDED, cluster_rtol=cluster_rtol
        ).clusters
    else:
        char = Polynomial([complex(c) for c in np.poly(a)[::-1]])
        clusters = res.clusters
    cluster = min(clusters, key=lambda c: abs(c.center - energy))
    tol = cluster_rtol * (1 + abs(energy))
    if abs(cluster.center - energy) > max(10 * tol, 2 * cluster.radius):
        raise ValueError(
            f"energy {energy} is not within cluster tolerance of the spectrum"
        )
    alg = cluster.multiplicity

    disc = discriminant(char) if char.degree >= 2 else None
    residuals = {
        "cluster_radius": cluster.radius,
        "discriminant": abs(disc) if disc is not None else float("nan"),
    }

    if alg == 1:
        return Classification("simple", 1, 1, cluster.center, residuals)

    sv = np.linalg.svd(a - cluster.center * np.eye(n), compute_uv=False)
    norm = max(float(sv[0]), 1e-300)
    thr = rank_rtol * max(float(np.linalg.norm(a, 2)), 1.0)
    in_band = [s for s in sv if thr / band < s < thr * band]
    rank = int(np.sum(sv > thr))
    geo = n - rank
    residuals["rank_defect"] = geo
    residuals["sigma_min"] = float(sv[-1])
    residuals["sigma_gap"] = float(sv[-1] / norm)

    # smallest angle between the eigenvectors paired with the cluster
    idx = sorted(
        range(len(res.values)), key=lambda i: abs(res.values[i] - cluster.center)
    )[:alg]
    angle = float("nan")
    if len(idx) >= 2:
        best = 0.0
        for ii in range(len(idx)):
            for jj in range(ii + 1, len(idx)):
                x = res.right[:, idx[ii]]
                y = res.right[:, idx[jj]]
                c = abs(np.vdot(x, y)) / (np.linalg.norm(x) * np.linalg.norm(y))
                best = max(best, min(1.0, c))
        angle = math.acos(best)
    residuals["coalescence_angle"] = angle

    if in_band:
        residuals["sigma_in_band"] = float(min(in_band))
        return Classification("indeterminate", alg, geo, cluster.center, residuals)
    kind = "ep" if geo == 1 else "diabolic"
    return Classification(kind, alg, geo, cluster.center, residuals)


# --------------------------------------------------------------------------
# one-parameter EP location
# --------------------------------------------------------------------------


def _min_pairwise(values) -> float:
    n = len(values)
    return min(
        abs(values[i] - values[j]) for i in range(n) for j in range(i + 1, n)
    )


def _merging_cluster(values, rtol0=CLUSTER_RTOL, rtol_max=5e-2):
    """Largest cluster under the tightest tolerance that produces one."""
    rtol = rtol0
    while rtol <= rtol_max:
        clusters = cluster_points(values, rtol=rtol)
        multi = [c for c in clusters if c.multiplicity > 1]
        if multi:
            return max(multi, key=lambda c: c.multiplicity), rtol
        rtol *= 10
    return None, rtol


def _merging_candidates(values, rtol0=CLUSTER_RTOL, rtol_max=5e-2):
    """Candidate merging clusters over the tolerance ladder.

    One candidate per distinct multiplicity, largest first: near a
    high-order degeneracy the rounding fog splits the coalescing set
    unevenly, so tight tolerances see spurious sub-pairs while the full
    multiplicity only appears at a looser one.  The polish shrink test
    downstream rejects the over-merged candidates.
    """
    levels = []
    rtol = rtol0
    while rtol < rtol_max:
        levels.append(rtol)
        rtol *= 10
    levels.append(rtol_max)
    seen = {}
    for rtol in levels:
        for c in cluster_points(values, rtol=rtol):
            if c.multiplicity > 1 and c.multiplicity not in seen:
                seen[c.multiplicity] = c
    return [seen[m] for m in sorted(seen, reverse=True)]


def _golden_min_mp(f, lo, hi, iters=80):
    phi = (mp.sqrt(5) - 1) / 2
    a, b = mp.mpf(lo), mp.mpf(hi)
    c = b - phi * (b - a)
    d = a + phi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(iters):
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - phi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + phi * (b - a)
            fd = f(d)
        if b - a <= mp.mpf(10) ** (-POLISH_DPS + 2) * (1 + abs(a)):
            break
    return (a + b) / 2


def _mp_eigvals(model, p):
    if hasattr(model, "matrix_mp"):
        m = model.matrix_mp(p)
    else:
        a = model.matrix(float(p))
        n = a.shape[0]
        m = mp.matrix(n)
        for i in range(n):
            for j in range(n):
                m[i, j] = mp.mpc(a[i, j])
    ev, _ = mp.eig(m)
    return ev


def ep_locate_1d(target, param_range: tuple[float, float], *, samples: int = 201):
    """All exceptional points of a one-parameter family inside a range.

    ``target`` is either a SturmianFunction (parameter r, handled exactly
    through the discriminant of the secular polynomial) or a swept model
    with a ``matrix(p)`` method (handled by gap minimization plus
    extended-precision polishing).

    The coupling enters only through p = r^2, so the two mirror locations
    +-r carry one critical point each way; the result keeps a single
    representative per discriminant zero (the nonnegative r when the range
    allows it).
    """
    if isinstance(target, SturmianFunction):
        return _ep_locate_sturmian(target, param_range)
    return _ep_locate_model(target, param_range, samples)


def _ep_locate_sturmian(s: SturmianFunction, r_range) -> list[CriticalPoint]:
    lo, hi = float(r_range[0]), float(r_range[1])
    if lo > hi:
        lo, hi = hi, lo
    p_lo = 0.0 if lo <= 0.0 <= hi else min(lo * lo, hi * hi)
    p_hi = max(lo * lo, hi * hi)

    d = discriminant_in_E(s.secular)
    if d.is_zero:
        raise ValueError("discriminant vanishes identically; family is degenerate")

    roots_p: list[Fraction | float] = []
    if d.coeffs[0] == 0 and p_lo <= 0.0 <= p_hi:
        roots_p.append(Fraction(0))
    dd = d
    while dd.coeffs[0] == 0 and dd.degree >= 1:
        dd = Polynomial(dd.coeffs[1:])
    if dd.degree >= 1:
        for c in poly_roots(dd.to_double()).clusters:
            if abs(c.center.imag) > 1e-8 * (1 + abs(c.center)):
                continue
            p0 = c.center.real
            if p_lo - 1e-12 <= p0 <= p_hi + 1e-12:
                roots_p.append(_newton_polish_real(dd, p0))

    points = []
    for p0 in roots_p:
        for energy, mult in _degenerate_energies(s, p0):
            r0 = math.sqrt(float(p0)) if float(p0) >= 0 else float("nan")
            if math.isnan(r0):
                continue
            r_here = r0 if lo <= r0 <= hi else (-r0 if lo <= -r0 <= hi else None)
            if r_here is None:
                continue
            z = z_value(ShiftedCircle(float(s.y), r_here))
            cls = classify_degeneracy(bc_matrix(s.n, z), energy)
            resid = dict(cls.residuals)
            resid["disc_residual"] = abs(d.to_double()(complex(p0)))
            points.append(
                CriticalPoint(
                    {"y": float(s.y), "r": r_here},
                    energy,
                    cls.kind,
                    cls.algebraic,
                    resid,
                )
            )
    return points


def _newton_polish_real(p: Polynomial, x0: float) -> float:
    """Polish a real root of an exact polynomial under mpmath."""
    dp = p.derivative()
    with mp.workdps(POLISH_DPS):
        x = mp.mpf(x0)
        for _ in range(60):
            fx = _eval_exact_mp(p, x)
            dfx = _eval_exact_mp(dp, x)
            if dfx == 0:
                break
            step = fx / dfx
            x = x - step
            if abs(step) <= mp.mpf(10) ** (-POLISH_DPS + 4) * (1 + abs(x)):
                break
        return float(x)


def _eval_exact_mp(p: Polynomial, x):
    acc = mp.mpf(0)
    for c in reversed(p.coeffs):
        cc = (
            mp.mpf(c.numerator) / c.denominator
            if isinstance(c, Fraction)
            else mp.mpf(c)
        )
        acc = acc * x + cc
    return acc


def _degenerate_energies(s: SturmianFunction, p0):
    """Repeated E-roots of the secular polynomial at one parameter value."""
    out = []
    if isinstance(p0, (int, Fraction)):
        poly = s.poly_at(Fraction(p0))
        g = poly.gcd(poly.derivative())
        if g.degree == 1:
            e = -Fraction(g.coeffs[0]) / Fraction(g.coeffs[1])
            out.append((complex(float(e)), None))
            return out
        if g.degree >= 2:
            for c in poly_roots(g.to_double()).clusters:
                out.append((c.center, c.multiplicity))
            return out
        return out
    poly = s.poly_at(float(p0))
    for c in poly_roots(poly, precision=Precision.EXTENDED).clusters:
        if c.multiplicity >= 2:
            out.append((c.center, c.multiplicity))
    return out


def _ep_locate_model(model, param_range, samples) -> list[CriticalPoint]:
    lo, hi = float(param_range[0]), float(param_range[1])
    grid = np.linspace(lo, hi, samples)
    spectra = [eig_dense(model.matrix(p)).values for p in grid]
    gaps = np.array([_min_pairwise(v) for v in spectra])
    scale = max(1.0, max(float(np.max(np.abs(v))) for v in spectra))

    points = []
    for k in range(1, samples - 1):
        if not (gaps[k] <= gaps[k - 1] and gaps[k] <= gaps[k + 1]):
            continue
        if gaps[k] > 0.25 * float(np.median(gaps)):
            continue
        bracket = (grid[k - 1], grid[k + 1])
        point = _polish_candidate(model, bracket, scale)
        if point is not None:
            points.append(point)
    return points


def _polish_candidate(model, bracket, scale) -> CriticalPoint | None:
    def gap_double(p):
        return _min_pairwise(eig_dense(model.matrix(p)).values)

    res = minimize_scalar(
        gap_double, bounds=bracket, method="bounded", options={"xatol": 1e-13}
    )
    p_dbl = float(res.x)
    vals = eig_dense(model.matrix(p_dbl)).values
    fallback = None
    for cluster in _merging_candidates(vals):
        radius_dbl = max(cluster.radius, 1e-300)
        with mp.workdps(POLISH_DPS):
            anchor = mp.mpc(cluster.center)

            def diameter_mp(p):
                ev = _mp_eigvals(model, p)
                members = sorted(ev, key=lambda v: abs(v - anchor))[
                    : cluster.multiplicity
                ]
                c2 = sum(members) / len(members)
                return max(abs(v - c2) for v in members)

            width = max(abs(bracket[1] - bracket[0]) * 0.05, 1e-6)
            p_mp = _golden_min_mp(diameter_mp, p_dbl - width, p_dbl + width)
            ev_star = _mp_eigvals(model, p_mp)
            members = sorted(ev_star, key=lambda v: abs(v - anchor))[
                : cluster.multiplicity
            ]
            center = complex(sum(members) / len(members))
            radius_mp = float(max(abs(v - center) for v in members))
            p_star = float(p_mp)

        shrink = radius_dbl / max(radius_mp, 1e-300)
        resid = {
            "cluster_radius_double": radius_dbl,
            "cluster_radius_polished": radius_mp,
            "polish_shrink": shrink,
            "bracket": (float(bracket[0]), float(bracket[1])),
        }
        if shrink < POLISH_SHRINK or radius_mp > 1e-4 * scale:
            if fallback is None and radius_dbl <= 1e-3 * scale:
                fallback = CriticalPoint(
                    {model.param: p_dbl}, cluster.center, "indeterminate", 0, resid
                )
            continue

        # the polished cluster fixes the algebraic multiplicity; the
        # geometric one comes from the singular values of M - E I, which
        # stay well conditioned at the degeneracy itself
        a = model.matrix(p_star)
        n = a.shape[0]
        sv = np.linalg.svd(a - center * np.eye(n), compute_uv=False)
        thr = 1e-8 * max(float(np.linalg.norm(a, 2)), 1.0)
        geo = n - int(np.sum(sv > thr))
        resid["sigma_min"] = float(sv[-1])
        resid["rank_defect"] = geo
        kind = "ep" if geo == 1 else "diabolic"
        return CriticalPoint(
            {model.param: p_star}, center, kind, cluster.multiplicity, resid
        )
    return fallback


# --------------------------------------------------------------------------
# two-parameter search for the boundary-controlled family
# --------------------------------------------------------------------------


def bc_reality_signature(
    n: int,
    y: float,
    r_samples: int = 161,
    *,
    reality_rtol: float = REALITY_RTOL,
) -> frozenset:
    """Which tracks lose reality somewhere on r in [0, 1].

    Track labels run 0..n-1 in descending eigenvalue order at the Hermitian
    endpoint r = 1 (label 0 is the topmost level) and are continued toward
    r = 0 by minimal-displacement matching.
    """
    model = BcModel(n, y)
    result = sweep(model, (1.0, 0.0), r_samples, reality_rtol=reality_rtol)
    nonreal = set()
    # sweep sorts ascending at the first grid point (r = 1): relabel descending
    for i in range(n):
        if not result.real_flags[i].all():
            nonreal.add(n - 1 - i)
    return frozenset(nonreal)


def _bisect_signature_change(n, y_lo, y_hi, sig_lo, sig_hi, r_samples, tol=1e-8):
    while y_hi - y_lo > tol:
        mid = 0.5 * (y_lo + y_hi)
        sig = bc_reality_signature(n, mid, r_samples)
        if sig == sig_lo:
            y_lo = mid
        else:
            y_hi = mid
            sig_hi = sig
    return y_lo, y_hi, sig_hi


def _exact_secular_in_y(n: int, p) -> list[Polynomial]:
    """E-coefficients of det(R - E) at fixed rational p, as polynomials in y."""
    c0, c1, c2, c3 = bc_secular_parts(n)
    p = as_fraction(p)
    deg = c0.degree
    coeffs_y = []
    for k in range(deg + 1):
        a0 = Fraction(c0.coeffs[k]) if k < len(c0.coeffs) else Fraction(0)
        a1 = Fraction(c1.coeffs[k]) if k < len(c1.coeffs) else Fraction(0)
        a2 = Fraction(c2.coeffs[k]) if k < len(c2.coeffs) else Fraction(0)
        a3 = Fraction(c3.coeffs[k]) if k < len(c3.coeffs) else Fraction(0)
        # coefficient of E^k: a0 + (a1+a2) y + a3 (y^2 + 1 - p)
        coeffs_y.append(Polynomial([a0 + a3 * (1 - p), a1 + a2, a3]))
    return coeffs_y


def _disc_in_y_at_p(n: int, p) -> Polynomial:
    """Discriminant in E of the secular polynomial, as an exact polynomial in y."""
    ce = _exact_secular_in_y(n, p)
    de = [k * ce[k] for k in range(1, len(ce))]
    det = _resultant_poly_entries(ce, de)
    lc = Fraction(ce[-1].coeffs[0])
    return det.scale(1 / lc)


def _resultant_poly_entries(pm_coeffs: list[Polynomial], qm_coeffs: list[Polynomial]) -> Polynomial:
    """Res_E of two E-polynomials whose coefficients are polynomials in y."""
    deg_p = len(pm_coeffs) - 1
    deg_q = len(qm_coeffs) - 1
    size = deg_p + deg_q
    zero = Polynomial.zero()
    pm = list(reversed(pm_coeffs))
    qm = list(reversed(qm_coeffs))
    rows = []
    for i in range(deg_q):
        rows.append([zero] * i + pm + [zero] * (size - deg_p - 1 - i))
    for i in range(deg_p):
        rows.append([zero] * i + qm + [zero] * (size - deg_q - 1 - i))
    from .core.poly import _det_bareiss_poly

    return _det_bareiss_poly(rows)


def _pole_collision_poly(n: int) -> Polynomial:
    """Res_E(A_y, B) as an exact polynomial in y.

    Zeros are the shifts where the numerator of r^2(E) shares a root with
    its denominator: the coupling function develops a persistent eigenvalue
    at a pole instead of a level merger.
    """
    ce = _exact_secular_in_y(n, 0)  # A_y = secular at p = 0
    _, _, _, c3 = bc_secular_parts(n)
    b = -c3
    qm = [Polynomial([Fraction(c)]) for c in b.coeffs]
    return _resultant_poly_entries(ce, qm)


def _fold_coeffs_in_E(n: int) -> list[Polynomial]:
    """E-coefficients of W = A_y' B - A_y B' (polynomials in y).

    Real double roots of W(., y) with coupling p = -A/B inside (0, 1] are
    folds of the exceptional-point curve: two level mergers collide at an
    interior r and the non-real interval between them closes.
    """
    ce = _exact_secular_in_y(n, 0)
    de = [k * ce[k] for k in range(1, len(ce))]
    _, _, _, c3 = bc_secular_parts(n)
    b = [Fraction(c) for c in (-c3).coeffs]
    db = [k * b[k] for k in range(1, len(b))]

    def mul_scalar(coeffs_poly, coeffs_scalar):
        out = [Polynomial.zero()] * (len(coeffs_poly) + len(coeffs_scalar) - 1)
        for i, cp in enumerate(coeffs_poly):
            if cp.is_zero:
                continue
            for j, cs in enumerate(coeffs_scalar):
                if cs == 0:
                    continue
                out[i + j] = out[i + j] + cp.scale(cs)
        return out

    term1 = mul_scalar(de, b)
    term2 = mul_scalar(ce, db)
    size = max(len(term1), len(term2))
    term1 += [Polynomial.zero()] * (size - len(term1))
    term2 += [Polynomial.zero()] * (size - len(term2))
    w = [t1 - t2 for t1, t2 in zip(term1, term2)]
    while len(w) > 1 and w[-1].is_zero:
        w.pop()
    return w


def _fold_event_poly(n: int) -> Polynomial:
    """Disc_E of W(E, y) as an exact polynomial in y (EP-curve folds)."""
    w = _fold_coeffs_in_E(n)
    dw = [k * w[k] for k in range(1, len(w))]
    det = _resultant_poly_entries(w, dw)
    lc = w[-1]
    try:
        return det.exact_div(lc)
    except ArithmeticError:
        return det


def ep_locate_2d_bc(
    n: int,
    y_range: tuple[float, float],
    *,
    y_samples: int = 21,
    r_samples: int = 161,
) -> list[CriticalPoint]:
    """Critical shifts y where the reality pattern of the spectrum changes.

    Outer scan/bisection over y watches which tracks are non-real somewhere
    on r in [-1, 1]; each change of that signature is polished against the
    exact algebra (discriminant root in y for level mergers, numerator/
    denominator resultant for pole events) and classified.
    """
    y_lo, y_hi = float(y_range[0]), float(y_range[1])
    if y_lo > y_hi:
        y_lo, y_hi = y_hi, y_lo
    ys = np.linspace(y_lo, y_hi, y_samples)
    sigs = [bc_reality_signature(n, y, r_samples) for y in ys]

    events = []
    for k in range(len(ys) - 1):
        if sigs[k] != sigs[k + 1]:
            events.append((ys[k], ys[k + 1], sigs[k], sigs[k + 1]))

    points = []
    for y_a, y_b, sig_a, sig_b in events:
        lo, hi, _ = _bisect_signature_change(n, y_a, y_b, sig_a, sig_b, r_samples)
        y_est = 0.5 * (lo + hi)
        # sig_a belongs to the more-negative side: walking y downward through
        # the event, new_desc labels lose reality and gone_desc regain it
        new_desc = sig_a - sig_b
        gone_desc = sig_b - sig_a
        labels = sorted(new_desc | gone_desc)
        # the event mechanism is decided by which exact polynomial in y owns
        # a root at the bisected location, not by the signature shape
        point = (
            _polish_merge_event(n, y_est, labels)
            or _polish_pole_event(n, y_est, sorted(new_desc), sorted(gone_desc))
            or _polish_fold_event(n, y_est, labels)
        )
        if point is None:
            point = CriticalPoint(
                {"y": y_est, "r": float("nan")},
                complex("nan"),
                "indeterminate",
                0,
                {"bracket": (lo, hi)},
            )
        points.append(point)
    return points


Y_EVENT_MATCH_TOL = 2e-3  # exact event root must sit this close to the bisection


def _real_poly_roots(p: Polynomial) -> list[float]:
    if p.degree < 1:
        return []
    return [
        c.center.real
        for c in poly_roots(p.to_double()).clusters
        if abs(c.center.imag) <= 1e-8 * (1 + abs(c.center))
    ]


def _polish_merge_event(n, y_est, labels) -> CriticalPoint | None:
    """A level merger at r = 0: polish y on the exact discriminant."""
    dpoly = _disc_in_y_at_p(n, 0)
    cands = _real_poly_roots(dpoly)
    if not cands:
        return None
    y0 = min(cands, key=lambda v: abs(v - y_est))
    if abs(y0 - y_est) > Y_EVENT_MATCH_TOL:
        return None
    y_star = _newton_polish_real(dpoly, y0)

    s = bivariate_secular(n, as_fraction(y_star))
    poly0 = s.poly_at(Fraction(0))
    # double-root location: the polished y is a float, so the exact pair is
    # split by ~sqrt(rounding); the extended pass resolves it below tolerance
    clusters = poly_roots(poly0, precision=Precision.EXTENDED).clusters
    merged = [c for c in clusters if c.multiplicity >= 2]
    if not merged:
        return None
    energy = merged[0].center

    z = z_value(ShiftedCircle(y_star, 0.0))
    cls = classify_degeneracy(bc_matrix(n, z), energy)
    resid = dict(cls.residuals)
    resid["tracks"] = tuple(labels)
    resid["disc_residual"] = abs(dpoly.to_double()(complex(y_star)))
    return CriticalPoint(
        {"y": y_star, "r": 0.0}, cls.energy, cls.kind, cls.algebraic, resid
    )


def _polish_pole_event(n, y_est, appearing, vanishing) -> CriticalPoint | None:
    """A reality exchange through a pole of the coupling function."""
    rpoly = _pole_collision_poly(n)
    cands = _real_poly_roots(rpoly)
    if not cands:
        return None
    y0 = min(cands, key=lambda v: abs(v - y_est))
    if abs(y0 - y_est) > Y_EVENT_MATCH_TOL:
        return None
    y_star = _newton_polish_real(rpoly, y0)

    s = bivariate_secular(n, as_fraction(y_star))
    poles = _real_poly_roots(s.B)
    a_dbl = s.A.to_double()
    energy = min(poles, key=lambda e: abs(a_dbl(complex(e)))) if poles else float("nan")

    # a pole event must NOT coincide with a level merger at the same energy;
    # probed a touch off y* because exactly there the persistent eigenvalue
    # line produces a spurious degenerate crossing of its own
    disc_clash = False
    for offset in (-1e-6, 1e-6):
        s_probe = bivariate_secular(n, as_fraction(y_star + offset))
        d = discriminant_in_E(s_probe.secular)
        for c in poly_roots(d.to_double()).clusters:
            if abs(c.center.imag) > 1e-8 * (1 + abs(c.center)):
                continue
            p0 = c.center.real
            if not -1e-9 <= p0 <= 1.0 + 1e-9:
                continue
            for e, _ in _degenerate_energies(s_probe, float(p0)):
                if abs(e - energy) <= 5e-3 * (1 + abs(energy)):
                    disc_clash = True
    kind = "indeterminate" if disc_clash else "sturmian-pole"
    resid = {
        "appearing": tuple(appearing),
        "vanishing": tuple(vanishing),
        "numerator_at_pole": abs(a_dbl(complex(energy))),
        "resultant_residual": abs(rpoly.to_double()(complex(y_star))),
    }
    return CriticalPoint({"y": y_star, "r": float("nan")}, complex(energy), kind, 1, resid)


def _polish_fold_event(n, y_est, labels) -> CriticalPoint | None:
    """Two interior-r level mergers colliding: a fold of the EP curve."""
    vpoly = _fold_event_poly(n)
    cands = _real_poly_roots(vpoly)
    if not cands:
        return None
    y0 = min(cands, key=lambda v: abs(v - y_est))
    if abs(y0 - y_est) > Y_EVENT_MATCH_TOL:
        return None
    y_star = _newton_polish_real(vpoly, y0)

    # the double E-root of W(., y*) pins the collision energy
    w_coeffs = _fold_coeffs_in_E(n)
    y_frac = as_fraction(y_star)
    w_at = Polynomial([c(y_frac) for c in w_coeffs])
    clusters = poly_roots(w_at, precision=Precision.EXTENDED).clusters
    merged = [
        c
        for c in clusters
        if c.multiplicity >= 2 and abs(c.center.imag) <= 1e-6 * (1 + abs(c.center))
    ]
    if not merged:
        return None
    s = bivariate_secular(n, y_frac)
    b_dbl = s.B.to_double()
    a_dbl = s.A.to_double()

    best = None
    for c in merged:
        e0 = complex(c.center)
        denom = b_dbl(e0)
        if abs(denom) < 1e-12:
            continue
        p0 = (-a_dbl(e0) / denom).real
        if not -1e-9 <= p0 <= 1.0 + 1e-9:
            continue
        best = (e0.real, max(p0, 0.0))
        break
    if best is None:
        return None
    energy, p0 = best
    r0 = math.sqrt(p0)
    z = z_value(ShiftedCircle(y_star, r0))
    # a fold joins two double roots, so up to three levels coalesce; in
    # double arithmetic that cluster spreads like eps^(1/3), beyond the
    # default tolerance
    try:
        cls = classify_degeneracy(bc_matrix(n, z), energy, cluster_rtol=1e-4)
    except ValueError:
        return None
    resid = dict(cls.residuals)
    resid["tracks"] = tuple(labels)
    resid["fold_residual"] = abs(vpoly.to_double()(complex(y_star)))
    return CriticalPoint(
        {"y": y_star, "r": r0}, cls.energy, cls.kind, cls.algebraic, resid
    )


# --------------------------------------------------------------------------
# maximal-order EP verification (exact)
# --------------------------------------------------------------------------


def epn_rank_chain(n: int) -> list[int]:
    """Exact ranks of M^k, k = 1..n, for the EPN family at t = 0.

    A diagonal similarity rationalizes the off-diagonals (sup -> sup*sub
    products, sub -> -1) without changing any rank, so the computation runs
    in integer arithmetic.  A maximal-order EP gives rank(M^k) = n - k.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    m = [[0] * n for _ in range(n)]
    for k in range(n):
        m[k][k] = 2 * k - n + 1
    for k in range(n - 1):
        m[k][k + 1] = (k + 1) * (n - k - 1)
        m[k + 1][k] = -1
    ranks = []
    power = [row[:] for row in m]
    ranks.append(exact_rank(power))
    for _ in range(n - 1):
        power = exact_matmul(power, m)
        ranks.append(exact_rank(power))
    return ranks


# --------------------------------------------------------------------------
# perturbation splitting exponent
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class ExponentFit:
    """Log-log fit of cluster splitting against perturbation size."""

    slope: float
    stderr: float
    r_squared: float
    eps: tuple[float, ...]
    mean_split: tuple[float, ...]
    ok: bool


def perturbation_exponent(
    m,
    order: int,
    eps_list,
    seed: int,
    *,
    at: complex | None = None,
    draws: int = 16,
    precision: Precision = Precision.EXTENDED,
) -> ExponentFit:
    """Fitted exponent of the eigenvalue splitting law near a degeneracy.

    Perturbs by eps*G with G a seeded unit-Frobenius-norm complex Gaussian,
    records the largest displacement inside the tracked cluster, averages
    the logs over ``draws`` directions, and fits a log-log slope.  An EP of
    order m splits like eps^(1/m); a simple eigenvalue like eps^1.  Fits
    with R^2 < 0.99 are flagged not ok.
    """
    eps = sorted(float(e) for e in eps_list)
    if len(eps) < 3 or eps[0] <= 0:
        raise ValueError("need at least 3 positive perturbation sizes")
    if eps[-1] / eps[0] < 1e4:
        raise ValueError("perturbation sizes must span at least 4 decades")

    a = as_array(m)
    n = a.shape[0]
    base = eig_dense(a)
    if at is not None:
        center = min((c.center for c in base.clusters), key=lambda v: abs(v - at))
    elif order > 1:
        cluster, _ = _merging_cluster(base.values)
        if cluster is None or cluster.multiplicity < order:
            raise ValueError(
                f"matrix does not show an eigenvalue cluster of size {order}"
            )
        center = cluster.center
    else:
        center = min(base.values, key=abs)

    rng = np.random.default_rng(seed)
    logs = np.zeros((draws, len(eps)))
    use_mp = precision is Precision.EXTENDED
    for d in range(draws):
        g = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        g /= np.linalg.norm(g)
        for j, e in enumerate(eps):
            pert = a + e * g
            if use_mp:
                with mp.workdps(PERTURB_DPS):
                    mm = mp.matrix(n)
                    for i in range(n):
                        for k in range(n):
                            mm[i, k] = mp.mpc(pert[i, k])
                    ev, _ = mp.eig(mm)
                    vals = [complex(v) for v in ev]
            else:
                vals = list(eig_dense(pert).values)
            members = sorted(vals, key=lambda v: abs(v - center))[:order]
            split = max(abs(v - center) for v in members)
            logs[d, j] = math.log(split)

    ys = logs.mean(axis=0)
    xs = np.log(np.array(eps))
    design = np.vstack([xs, np.ones_like(xs)]).T
    coef, res_ss, _, _ = np.linalg.lstsq(design, ys, rcond=None)
    slope = float(coef[0])
    fitted = design @ coef
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    ss_res = float(np.sum((ys - fitted) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    dof = max(len(eps) - 2, 1)
    sxx = float(np.sum((xs - xs.mean()) ** 2))
    stderr = math.sqrt(ss_res / dof / sxx) if sxx > 0 else float("nan")
    return ExponentFit(
        slope, stderr, r2, tuple(eps), tuple(np.exp(ys)), r2 >= 0.99
    )
