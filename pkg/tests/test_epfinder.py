"""Degeneracy location and classification."""

import math

import numpy as np
import pytest

from epspect.epfinder import (
    bc_reality_signature,
    classify_degeneracy,
    ep_locate_1d,
    ep_locate_2d_bc,
    epn_rank_chain,
    perturbation_exponent,
    sweep,
)
from epspect.models import EpnModel, HermitianDemoModel, bc_matrix, epn_matrix
from epspect.sturmian import bivariate_secular

EPS_LADDER = [1e-12, 1e-11, 1e-10, 1e-9, 1e-8, 1e-7, 1e-6]


# --------------------------------------------------------------------------
# sweeps
# --------------------------------------------------------------------------


def test_sweep_epn6_real_tracks_with_closed_form():
    res = sweep(EpnModel(6), (0.0, 1.0), 101)
    assert res.tracks.shape == (6, 101)
    # away from the degenerate endpoint every value is real and matches
    # the closed form (8 + 2k - 5) * sqrt(2t - t^2) as a set
    for k in range(1, 101):
        t = res.grid[k]
        want = np.sort(np.array([3, 5, 7, 9, 11, 13]) * math.sqrt(2 * t - t * t))
        got = np.sort(res.tracks[:, k].real)
        assert res.real_flags[:, k].all()
        assert np.allclose(got, want, atol=1e-8)


def test_sweep_hermitian_demo_avoided_crossings():
    res = sweep(HermitianDemoModel(4, 1), (-1.0, 1.0), 501)
    assert res.real_flags.all()
    gaps = np.diff(np.sort(res.tracks.real, axis=0), axis=0)
    assert gaps.min() > 0


def test_sweep_epn8_total_merger_at_origin():
    res = sweep(EpnModel(8), (-0.5, 0.5), 201)
    mid = 100
    assert abs(res.grid[mid]) < 1e-12
    spread_mid = np.max(np.abs(res.tracks[:, mid] - res.tracks[:, mid].mean()))
    spread_end = np.max(np.abs(res.tracks[:, -1] - res.tracks[:, -1].mean()))
    assert spread_mid < 0.3
    assert spread_end > 2.0


def test_sweep_track_continuity():
    res = sweep(EpnModel(6), (0.1, 1.0), 181)
    steps = np.abs(np.diff(res.tracks, axis=1))
    median_step = np.median(steps)
    for k in range(steps.shape[1]):
        if res.warnings[k + 1]:
            continue
        assert steps[:, k].max() < 10 * median_step


def test_sweep_requires_two_samples():
    with pytest.raises(ValueError):
        sweep(EpnModel(6), (0.0, 1.0), 1)


def test_sweep_threaded_assembly_is_deterministic(monkeypatch):
    serial = sweep(EpnModel(6), (0.1, 0.9), 40)
    threaded = sweep(EpnModel(6), (0.1, 0.9), 40, threads=4)
    assert np.array_equal(serial.tracks, threaded.tracks)
    monkeypatch.setenv("EPSPECT_THREADS", "3")
    via_env = sweep(EpnModel(6), (0.1, 0.9), 40)
    assert np.array_equal(serial.tracks, via_env.tracks)


# --------------------------------------------------------------------------
# classification
# --------------------------------------------------------------------------


def test_classify_bc6_center_is_ep2():
    cls = classify_degeneracy(bc_matrix(6, 1j), 2.0)
    assert cls.kind == "ep"
    assert cls.algebraic == 2
    assert cls.geometric == 1


def test_classify_epn6_origin_is_ep6():
    # double arithmetic spreads a maximal-order cluster like eps^(1/6),
    # so the tolerance must sit above ~1e-3; the exact rank chain below is
    # the independent oracle for the verdict
    cls = classify_degeneracy(epn_matrix(6, 0), 0.0, cluster_rtol=1e-2)
    assert cls.kind == "ep"
    assert cls.algebraic == 6
    assert cls.geometric == 1
    assert epn_rank_chain(6) == [5, 4, 3, 2, 1, 0]


def test_classify_planted_double_eigenvalue_is_diabolic():
    cls = classify_degeneracy(np.diag([1.0, 1.0, 2.0]), 1.0)
    assert cls.kind == "diabolic"
    assert cls.algebraic == 2
    assert cls.geometric == 2


def test_classify_simple_eigenvalue():
    cls = classify_degeneracy(np.diag([1.0, 2.0, 3.0]), 2.0)
    assert cls.kind == "simple"


def test_classify_rejects_energy_off_spectrum():
    with pytest.raises(ValueError):
        classify_degeneracy(np.diag([1.0, 2.0, 3.0]), 10.0)


def test_classify_ambiguous_rank_is_indeterminate():
    # a singular value sitting inside the threshold band must not be
    # silently rounded into a rank decision
    cls = classify_degeneracy(np.diag([1.0, 1.0 + 5e-9, 2.0]), 1.0)
    assert cls.kind == "indeterminate"
    assert "sigma_in_band" in cls.residuals


def test_classify_ep_has_small_coalescence_angle():
    cls = classify_degeneracy(bc_matrix(6, 1j), 2.0)
    assert cls.residuals["coalescence_angle"] < 1e-3
    dia = classify_degeneracy(np.diag([1.0, 1.0, 2.0]), 1.0)
    assert dia.residuals["coalescence_angle"] > 0.1


def test_epn_rank_chain_all_dimensions():
    for n in range(2, 9):
        assert epn_rank_chain(n) == list(range(n - 1, -1, -1))


# --------------------------------------------------------------------------
# one-parameter location
# --------------------------------------------------------------------------


def test_locate_bc6_finds_single_ep2_at_origin():
    pts = ep_locate_1d(bivariate_secular(6, 0), (-1, 1))
    assert len(pts) == 1
    (pt,) = pts
    assert pt.kind == "ep" and pt.order == 2
    assert abs(pt.params["r"]) <= 1e-8
    assert abs(pt.energy - 2.0) <= 1e-8


def test_locate_bc5_finds_nothing_at_zero_shift():
    assert ep_locate_1d(bivariate_secular(5, 0), (-1, 1)) == []


def test_located_zero_coincides_with_discriminant_sign_change():
    from fractions import Fraction

    from epspect.core import discriminant_in_E

    s = bivariate_secular(6, 0)
    d = discriminant_in_E(s.secular)
    (pt,) = ep_locate_1d(s, (-1, 1))
    p_star = pt.params["r"] ** 2
    eps = Fraction(1, 1000)
    lo = d(Fraction(p_star) - eps)
    hi = d(Fraction(p_star) + eps)
    assert (lo < 0 < hi) or (hi < 0 < lo)


def test_locate_epn6_finds_maximal_ep():
    pts = ep_locate_1d(EpnModel(6), (-0.5, 0.5))
    eps = [p for p in pts if p.kind == "ep"]
    assert len(eps) == 1
    (pt,) = eps
    assert pt.order == 6
    assert abs(pt.params["t"]) <= 1e-6
    assert abs(pt.energy) <= 1e-4
    assert pt.residuals["polish_shrink"] >= 100


def test_locate_hermitian_demo_finds_nothing():
    assert [
        p
        for p in ep_locate_1d(HermitianDemoModel(4, 1), (-1, 1), samples=101)
        if p.kind == "ep"
    ] == []


# --------------------------------------------------------------------------
# two-parameter search (boundary-controlled family)
# --------------------------------------------------------------------------


def test_scan_y_locates_first_complexification():
    pts = ep_locate_2d_bc(5, (-0.4, 0.0))
    eps = [p for p in pts if p.kind == "ep"]
    assert len(eps) == 1
    (pt,) = eps
    assert pt.params["y"] == pytest.approx(-0.196, abs=0.005)
    assert pt.params["r"] == pytest.approx(0.0, abs=1e-8)
    assert pt.order == 2
    assert tuple(pt.residuals["tracks"]) == (1, 2)


def test_scan_y_locates_pole_event():
    pts = ep_locate_2d_bc(5, (-0.75, -0.65))
    poles = [p for p in pts if p.kind == "sturmian-pole"]
    assert len(poles) == 1
    (pt,) = poles
    assert pt.params["y"] == pytest.approx(-0.7071, abs=0.002)
    assert pt.energy.real == pytest.approx(2 + math.sqrt(2), abs=1e-6)


def test_reality_signatures_either_side_of_pole_event():
    assert bc_reality_signature(5, -0.5) == frozenset({1, 2})
    assert 0 in bc_reality_signature(5, -0.8)


# --------------------------------------------------------------------------
# perturbation splitting exponents
# --------------------------------------------------------------------------


def test_perturbation_exponent_maximal_order():
    fit = perturbation_exponent(epn_matrix(6, 0), 6, EPS_LADDER, seed=42, draws=4)
    assert fit.ok
    assert fit.slope == pytest.approx(1 / 6, abs=0.02)


def test_perturbation_exponent_pairwise():
    fit = perturbation_exponent(
        bc_matrix(6, 1j), 2, EPS_LADDER, seed=42, at=2.0, draws=4
    )
    assert fit.ok
    assert fit.slope == pytest.approx(0.5, abs=0.02)


def test_perturbation_exponent_regular_case():
    fit = perturbation_exponent(
        np.diag([1.0, 2.0, 3.0]), 1, EPS_LADDER, seed=42, at=1.0, draws=4
    )
    assert fit.ok
    assert fit.slope == pytest.approx(1.0, abs=0.02)


def test_perturbation_exponent_needs_four_decades():
    with pytest.raises(ValueError):
        perturbation_exponent(epn_matrix(6, 0), 6, [1e-8, 1e-7, 1e-6], seed=1)
