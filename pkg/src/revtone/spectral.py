"""Separated radial eigenproblems and equator data of joint eigenfunctions.

Joint eigenfunctions of the Laplacian and the rotation generator have
the form e^{i m theta} u(r) / sqrt(2 pi); u solves the radial problem

    -(1/a) (a u')' + (m^2 / a^2) u = lambda^2 u

with u -> 0 at the poles for m != 0 and zero flux for m = 0.  The
discretization is a flux-conservative second-order scheme on a uniform
grid pulled back from the poles by delta = L / (10 * grid_size), written
as a symmetric tridiagonal pencil with weight a(r) and solved by
bisection plus inverse iteration for selected indices.

Eigenvalues carry an O(h^2) bias with a smooth coefficient, so every
headline number (lambda^2 and the equator value u(r0)) is Richardson
extrapolated from the requested grid and its half.  Modes are labeled
ell = |m| + n with n the interior node count, checked by sign counting
on every solve.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh_tridiagonal

from . import actions as _actions
from .errors import InvalidParameterError, LabelingError, ResolutionError
from .surface import SurfaceProfile

MIN_GRID = 500
MIN_POINTS_PER_WAVELENGTH = 10.0
# grid entries below this fraction of the max are treated as pole
# underflow when counting sign changes
_NODE_FLOOR = 1e-8


@dataclass(frozen=True, eq=False)
class RadialMode:
    """One radial eigenfunction, normalized so that integral u^2 a dr = 1."""

    m: int
    n: int
    ell: int
    lam: float
    r: np.ndarray
    u: np.ndarray
    u_at_r0: float


@dataclass(frozen=True, eq=False)
class JointSlice:
    """All 2 ell + 1 joint modes with |m| <= ell and n = ell - |m|."""

    ell: int
    modes: list
    restricted_norms: dict
    profile: SurfaceProfile


def _grid(p: SurfaceProfile, m: int, grid_size: int):
    delta = p.L / (10.0 * grid_size)
    rs = np.linspace(delta, p.L - delta, grid_size)
    h = float(rs[1] - rs[0])
    r = rs[1:-1] if m != 0 else rs
    return r, h


def _tridiagonal(p: SurfaceProfile, m: int, r: np.ndarray, h: float):
    """Symmetric standard-form tridiagonal of the weighted pencil.

    Half-grid profile values are computed once and reused on both sides
    of each flux, so for m = 0 the constant vector is annihilated
    exactly and lambda^2 = 0 is represented to rounding.
    """
    ar = np.asarray(p.a(r), float)
    ah = np.asarray(p.a(0.5 * (r[:-1] + r[1:])), float)
    h2 = h * h
    diag = np.zeros_like(ar)
    diag[:-1] += ah / h2
    diag[1:] += ah / h2
    if m != 0:
        diag += (m * m) / ar
        diag[0] += float(p.a(r[0] - 0.5 * h)) / h2
        diag[-1] += float(p.a(r[-1] + 0.5 * h)) / h2
    off = -ah / h2
    sq = np.sqrt(ar)
    return diag / ar, off / (sq[:-1] * sq[1:]), ar, sq


def _count_nodes(u: np.ndarray) -> int:
    big = np.abs(u) > _NODE_FLOOR * np.max(np.abs(u))
    s = np.sign(u[big])
    return int(np.count_nonzero(s[1:] * s[:-1] < 0))


def _fix_sign(u: np.ndarray) -> np.ndarray:
    idx = int(np.argmax(np.abs(u) > 0.01 * np.max(np.abs(u))))
    return u if u[idx] > 0 else -u


def _solve_indices(p: SurfaceProfile, m: int, idx_lo: int, idx_hi: int, grid_size: int):
    """Eigenpairs idx_lo..idx_hi (ascending) on one grid; u normalized."""
    r, h = _grid(p, m, grid_size)
    diag, off, ar, sq = _tridiagonal(p, m, r, h)
    vals, vecs = eigh_tridiagonal(diag, off, select="i", select_range=(idx_lo, idx_hi))
    modes = []
    for k in range(vals.shape[0]):
        u = vecs[:, k] / sq
        u = _fix_sign(u / np.sqrt(np.trapezoid(ar * u * u, dx=h)))
        modes.append((float(vals[k]), u))
    return r, h, modes


def _interp_at(r: np.ndarray, u: np.ndarray, x: float) -> float:
    """Cubic Lagrange interpolation from the four nearest grid points."""
    i = int(np.searchsorted(r, x))
    i = max(2, min(len(r) - 2, i))
    rj = r[i - 2:i + 2]
    val = 0.0
    for j in range(4):
        lj = 1.0
        for k in range(4):
            if k != j:
                lj *= (x - rj[k]) / (rj[j] - rj[k])
        val += u[i - 2 + j] * lj
    return float(val)


def _check_resolution(lam_max: float, h: float):
    if lam_max > 0.0 and 2.0 * np.pi / (lam_max * h) < MIN_POINTS_PER_WAVELENGTH:
        raise ResolutionError(
            f"{2.0 * np.pi / (lam_max * h):.1f} points per wavelength at lambda = "
            f"{lam_max:.3g}; need {MIN_POINTS_PER_WAVELENGTH:g} (refine the grid)")


def _assemble(p: SurfaceProfile, m: int, n_lo: int, n_hi: int, grid_size: int):
    """Richardson-extrapolated modes for node counts n_lo..n_hi."""
    r_f, h_f, fine = _solve_indices(p, m, n_lo, n_hi, grid_size)
    r_c, h_c, coarse = _solve_indices(p, m, n_lo, n_hi, grid_size // 2)
    lam_max = np.sqrt(max(fine[-1][0], 0.0))
    _check_resolution(lam_max, h_f)
    out = []
    for k, ((l2_f, u_f), (l2_c, u_c)) in enumerate(zip(fine, coarse)):
        n = n_lo + k
        nodes = _count_nodes(u_f)
        if nodes != n:
            raise LabelingError(
                f"m = {m}, eigenindex {n}: counted {nodes} interior nodes "
                f"at grid {grid_size} (refine the grid)")
        l2 = (4.0 * l2_f - l2_c) / 3.0
        v0 = (4.0 * _interp_at(r_f, u_f, p.r0) - _interp_at(r_c, u_c, p.r0)) / 3.0
        lam = float(np.sqrt(max(l2, 0.0)))
        out.append(RadialMode(m=m, n=n, ell=abs(m) + n, lam=lam, r=r_f, u=u_f, u_at_r0=v0))
    return out


def radial_modes(p: SurfaceProfile, m: int, n_max: int, grid_size: int) -> list:
    """Lowest n_max + 1 radial modes for angular number m.

    Eigenvalues ascend with the node count n = 0..n_max; each mode's
    node count is verified by sign counting, and a mismatch raises
    rather than mislabeling.
    """
    if n_max < 0:
        raise InvalidParameterError(f"n_max must be >= 0, got {n_max}")
    if grid_size < MIN_GRID:
        raise InvalidParameterError(f"grid_size must be >= {MIN_GRID}, got {grid_size}")
    return _assemble(p, int(m), 0, n_max, grid_size)


def _mirror(mode: RadialMode, m: int) -> RadialMode:
    return RadialMode(m=m, n=mode.n, ell=mode.ell, lam=mode.lam, r=mode.r, u=mode.u,
                      u_at_r0=mode.u_at_r0)


def joint_slice(p: SurfaceProfile, ev: _actions.ActionEvaluator, ell: int,
                grid_size: int) -> JointSlice:
    """The full multiplet at label ell: modes with n = ell - |m|, |m| <= ell.

    The radial operator depends on m^2 only, so negative m reuses the
    positive-m solve.
    """
    if ell < 1:
        raise InvalidParameterError(f"ell must be >= 1, got {ell}")
    if grid_size < MIN_GRID:
        raise InvalidParameterError(f"grid_size must be >= {MIN_GRID}, got {grid_size}")
    by_m = {}
    for m in range(0, ell + 1):
        n = ell - m
        by_m[m] = _assemble(p, m, n, n, grid_size)[0]
    modes = []
    norms = {}
    for m in range(-ell, ell + 1):
        mode = by_m[abs(m)] if m >= 0 else _mirror(by_m[-m], m)
        modes.append(mode)
        norms[m] = restricted_norm(mode, p)
    return JointSlice(ell=ell, modes=modes, restricted_norms=norms, profile=p)


def restricted_norm(mode: RadialMode, p: SurfaceProfile) -> float:
    """Squared L^2 norm of the joint eigenfunction over the equator.

    With the 1/sqrt(2 pi) angular factor the theta integral collapses
    and the norm is a(r0) * u(r0)^2.
    """
    return p.a_r0 * mode.u_at_r0 * mode.u_at_r0


def matrix_element_radial(mode: RadialMode, b, p: SurfaceProfile) -> float:
    """Diagonal matrix element of multiplication by b(r)."""
    ar = np.asarray(p.a(mode.r), float)
    br = np.asarray(b(mode.r), float)
    return float(np.trapezoid(br * mode.u * mode.u * ar, mode.r))


def matrix_element_angular(mode: RadialMode, chi) -> float:
    """Diagonal matrix element of chi applied to the momentum ratio m/lambda."""
    if mode.lam <= 0.0:
        raise InvalidParameterError("angular matrix element needs lambda > 0")
    return float(chi(mode.m / mode.lam))


def ebk_residual(mode: RadialMode, ev: _actions.ActionEvaluator) -> float:
    """lambda minus the half-integer-shifted semiclassical prediction."""
    return mode.lam - _actions.energy_K(ev, float(mode.m), mode.ell + 0.5)
