import numpy as np
import pytest

from revtone import (
    InvalidParameterError,
    ResolutionError,
    ebk_residual,
    joint_slice,
    matrix_element_angular,
    matrix_element_radial,
    radial_modes,
    restricted_norm,
)

import oracles


def _recount_sign_changes(u):
    live = np.abs(u) > 1e-8 * np.max(np.abs(u))
    signs = np.sign(u[live])
    return int(np.sum(signs[:-1] * signs[1:] < 0))


# --- eigenvalues -----------------------------------------------------------

def test_sphere_zonal_ladder(sphere):
    modes = radial_modes(sphere, 0, 2, 4000)
    assert abs(modes[0].lam ** 2) <= 1e-6
    assert modes[1].lam ** 2 == pytest.approx(2.0, rel=1e-6)
    assert modes[2].lam ** 2 == pytest.approx(6.0, rel=1e-6)


def test_sphere_m2_ladder(sphere):
    modes = radial_modes(sphere, 2, 1, 4000)
    assert modes[0].lam ** 2 == pytest.approx(6.0, rel=1e-6)
    assert modes[1].lam ** 2 == pytest.approx(12.0, rel=1e-6)


def test_spectrum_symmetric_in_m(sphere):
    plus = radial_modes(sphere, 5, 3, 2000)
    minus = radial_modes(sphere, -5, 3, 2000)
    for mp, mm in zip(plus, minus):
        assert abs(mp.lam - mm.lam) <= 1e-12
        assert mm.m == -5 and mp.ell == mm.ell


def test_eigenvalues_increase_with_n(ell13):
    modes = radial_modes(ell13, 3, 6, 2000)
    lams = [mode.lam for mode in modes]
    assert all(b > a for a, b in zip(lams, lams[1:]))


def test_grid_convergence_order(sphere):
    # second-order scheme plus extrapolation: successive changes under
    # grid doubling must shrink at least quadratically
    lams = [radial_modes(sphere, 3, 7, g)[7].lam for g in (500, 1000, 2000)]
    d1 = abs(lams[0] - lams[1])
    d2 = abs(lams[1] - lams[2])
    order = np.log2(d1 / d2)
    assert order >= 1.8


def test_mode_invariants(sphere, ell13_slices):
    modes = list(radial_modes(sphere, 2, 5, 2000)) + list(ell13_slices[25].modes)
    for mode in modes:
        assert mode.lam >= 0.0
        assert mode.ell == abs(mode.m) + mode.n
        assert _recount_sign_changes(mode.u) == mode.n


def test_mode_normalization(sphere):
    for mode in radial_modes(sphere, 1, 3, 2000):
        h = mode.r[1] - mode.r[0]
        mass = np.trapezoid(np.sin(mode.r) * mode.u ** 2, dx=h)
        assert mass == pytest.approx(1.0, abs=1e-8)


def test_grid_size_validated(sphere):
    with pytest.raises(InvalidParameterError):
        radial_modes(sphere, 0, 2, 400)


def test_resolution_guard_fires(sphere):
    # lambda ~ 110 at grid 500 leaves fewer than 10 points per wavelength
    with pytest.raises(ResolutionError):
        radial_modes(sphere, 0, 110, 500)


# --- joint slices ----------------------------------------------------------

def test_sphere_ell1_multiplet(sphere, sphere_ev):
    sl = joint_slice(sphere, sphere_ev, 1, 2000)
    assert sl.ell == 1 and len(sl.modes) == 3
    assert sorted(mode.m for mode in sl.modes) == [-1, 0, 1]
    for mode in sl.modes:
        assert mode.lam ** 2 == pytest.approx(2.0, rel=1e-6)
        assert mode.n == 1 - abs(mode.m)
    assert sl.restricted_norms[0] <= 1e-12
    assert sl.restricted_norms[1] == pytest.approx(0.75, abs=1e-6)
    assert sl.restricted_norms[-1] == pytest.approx(0.75, abs=1e-6)


def test_sphere_ell10_degenerate(sphere, sphere_ev):
    sl = joint_slice(sphere, sphere_ev, 10, 4000)
    assert len(sl.modes) == 21
    for mode in sl.modes:
        assert mode.lam ** 2 == pytest.approx(110.0, rel=1e-6)


def test_ellipsoid_multiplet_splits(ell13_slices):
    sl = ell13_slices[25]
    lams = {mode.m: mode.lam for mode in sl.modes}
    assert len({round(v, 6) for v in lams.values()}) > 3
    for m in range(1, 26):
        assert abs(lams[m] - lams[-m]) <= 1e-12
        assert sl.restricted_norms[m] == sl.restricted_norms[-m]


def test_joint_slice_requires_positive_ell(sphere, sphere_ev):
    with pytest.raises(InvalidParameterError):
        joint_slice(sphere, sphere_ev, 0, 2000)


def test_joint_slice_deterministic(sphere, sphere_ev):
    a = joint_slice(sphere, sphere_ev, 6, 1000)
    b = joint_slice(sphere, sphere_ev, 6, 1000)
    for ma, mb in zip(a.modes, b.modes):
        assert ma.lam == mb.lam
        assert np.array_equal(ma.u, mb.u)
    assert a.restricted_norms == b.restricted_norms


# --- restricted norms and matrix elements ----------------------------------

def test_restricted_norm_closed_forms(sphere, sphere_ev):
    sl1 = joint_slice(sphere, sphere_ev, 1, 4000)
    sl2 = joint_slice(sphere, sphere_ev, 2, 4000)
    assert sl1.restricted_norms[0] == pytest.approx(
        oracles.EXACT_EQUATOR_NORMS[(1, 0)], abs=1e-8)
    assert sl1.restricted_norms[1] == pytest.approx(
        oracles.EXACT_EQUATOR_NORMS[(1, 1)], abs=1e-6)
    assert sl2.restricted_norms[0] == pytest.approx(
        oracles.EXACT_EQUATOR_NORMS[(2, 0)], abs=1e-6)
    assert sl2.restricted_norms[2] == pytest.approx(
        oracles.EXACT_EQUATOR_NORMS[(2, 2)], abs=1e-6)


def test_restricted_norm_parity_zeros(sphere, sphere_ev):
    # u is odd about the equator when ell - |m| is odd
    sl = joint_slice(sphere, sphere_ev, 7, 2000)
    for mode in sl.modes:
        if (sl.ell - abs(mode.m)) % 2 == 1:
            assert restricted_norm(mode, sphere) <= 1e-12


def test_weyl_mass_doubles(sphere, sphere_ev):
    mass = {}
    for ell in (50, 100):
        sl = joint_slice(sphere, sphere_ev, ell, 2000)
        mass[ell] = sum(sl.restricted_norms.values())
    assert mass[100] / mass[50] == pytest.approx(2.0, rel=0.10)


def test_matrix_element_radial_basics(sphere, sphere_ev):
    sl = joint_slice(sphere, sphere_ev, 1, 2000)
    zonal = next(mode for mode in sl.modes if mode.m == 0)
    assert matrix_element_radial(zonal, lambda r: np.ones_like(r), sphere) \
        == pytest.approx(1.0, abs=1e-8)
    # integrand odd about the equator
    assert abs(matrix_element_radial(zonal, np.cos, sphere)) <= 1e-8


def test_gaussian_beam_avoids_polar_bump(sphere, sphere_ev):
    # mass of the m = ell mode concentrates at the equator, so a bump
    # supported near the pole sees almost none of it
    sl = joint_slice(sphere, sphere_ev, 20, 2000)
    beam = next(mode for mode in sl.modes if mode.m == 20)

    def bump(r):
        return np.exp(-((r - np.pi / 8) / (np.pi / 16)) ** 2)

    assert matrix_element_radial(beam, bump, sphere) <= 1e-3


def test_matrix_element_angular_values(sphere, sphere_ev):
    sl = joint_slice(sphere, sphere_ev, 10, 4000)
    beam = next(mode for mode in sl.modes if mode.m == 10)
    zonal = next(mode for mode in sl.modes if mode.m == 0)
    assert matrix_element_angular(beam, lambda s: s) \
        == pytest.approx(10 / np.sqrt(110), abs=1e-5)
    assert matrix_element_angular(beam, lambda s: np.ones_like(np.asarray(s))) \
        == pytest.approx(1.0)
    assert matrix_element_angular(zonal, lambda s: s * s) == 0.0


# --- semiclassical residuals -----------------------------------------------

def test_ebk_residual_sphere(sphere, sphere_ev):
    modes10 = radial_modes(sphere, 0, 10, 4000)
    res10 = ebk_residual(modes10[10], sphere_ev)
    assert res10 == pytest.approx(np.sqrt(110.0) - 10.5, abs=1e-5)
    modes100 = radial_modes(sphere, 0, 100, 4000)
    res100 = ebk_residual(modes100[100], sphere_ev)
    assert res100 == pytest.approx(np.sqrt(10100.0) - 100.5, abs=1e-4)


def test_ebk_residual_shrinks_on_ellipsoid(ell13, ell13_ev):
    res = {}
    for ell in (10, 20, 40):
        mode = radial_modes(ell13, 0, ell, 4000)[ell]
        res[ell] = abs(ebk_residual(mode, ell13_ev))
    assert res[40] <= 0.05
    assert res[40] < res[20] < res[10]
