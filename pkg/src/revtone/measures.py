"""Empirical equator measures, their limits, and convergence sweeps.

Each joint multiplet at label ell induces a probability measure on
[-1, 1]: an atom at c = m/ell with weight proportional to the equator
norm of the (m, ell) eigenfunction.  Replacing norms by diagonal matrix
elements of a symbol gives the nu variant.  Both converge weak-* to
explicit densities computed from the classical action data, and this
module measures that convergence in Kolmogorov-Smirnov and
1-Wasserstein distance.

W1 is treated as primary: it metrizes weak-* convergence on a compact
interval, while KS stalls against limits with endpoint blow-up.
"""
from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import actions as _actions
from . import spectral as _spectral
from .errors import (
    DegenerateMeasureError,
    InvalidParameterError,
    RevtoneError,
    SignedMeasureError,
    UnsupportedQuantizationError,
)
from .quadrature import gauss_legendre_rule
from .surface import SurfaceProfile

_CROSSING_BISECTIONS = 80
_SEGMENT_GL_NODES = 32


@dataclass(frozen=True, eq=False)
class EmpiricalMeasure:
    """Atomic measure on [-1, 1] with one atom per angular number.

    Weights are normalized to sum to 1 whenever the raw mass is
    nonzero; a negative raw mass (symbol negative on the allowed
    region) normalizes the same way.  `signed` is set only when the
    raw mass cancels to zero relative to the total variation, leaving
    nothing to normalize by; weights are then kept raw.  After
    normalization individual weights may still be negative and the
    cumulative function non-monotone, but CDF-based distances stay
    defined.
    """

    atoms: list
    total_mass_raw: float
    signed: bool = False

    @property
    def positions(self) -> np.ndarray:
        return np.array([c for c, _ in self.atoms])

    @property
    def weights(self) -> np.ndarray:
        return np.array([w for _, w in self.atoms])


@dataclass(frozen=True, eq=False)
class LimitMeasure:
    """Normalized limit density on (-1, 1) with its CDF and raw mass."""

    density: Callable
    cdf: Callable
    mass_constant: float


def _make_atoms(ms: np.ndarray, weights: np.ndarray, ell: int):
    order = np.argsort(ms / ell, kind="stable")
    return [(float(ms[i] / ell), float(weights[i])) for i in order]


def empirical_mu(slice_: _spectral.JointSlice) -> EmpiricalMeasure:
    """Equator-norm measure of a multiplet; raw mass is the norm sum."""
    ms = np.array(sorted(slice_.restricted_norms.keys()))
    w = np.array([slice_.restricted_norms[int(m)] for m in ms])
    total = float(np.sum(w))
    if total <= 0.0:
        raise DegenerateMeasureError(
            f"all {len(w)} equator norms vanish at ell = {slice_.ell}")
    return EmpiricalMeasure(atoms=_make_atoms(ms, w / total, slice_.ell),
                            total_mass_raw=total)


def empirical_nu(slice_: _spectral.JointSlice, sym: _actions.SymbolFn) -> EmpiricalMeasure:
    """Matrix-element measure of a multiplet for a radial or angular symbol."""
    if sym.kind == "phase_space":
        raise UnsupportedQuantizationError(
            "phase_space symbols have no matrix-element rule in the separated basis")
    weights = []
    ms = []
    for mode in slice_.modes:
        ms.append(mode.m)
        if sym.kind == "radial_mult":
            weights.append(_spectral.matrix_element_radial(mode, sym.radial_part, slice_.profile))
        else:
            weights.append(_spectral.matrix_element_angular(mode, sym.ratio_part))
    ms = np.array(ms)
    w = np.array(weights)
    total = float(np.sum(w))
    scale = float(np.sum(np.abs(w)))
    if abs(total) <= 1e-12 * max(scale, 1e-300):
        return EmpiricalMeasure(atoms=_make_atoms(ms, w, slice_.ell),
                                total_mass_raw=total, signed=True)
    return EmpiricalMeasure(atoms=_make_atoms(ms, w / total, slice_.ell),
                            total_mass_raw=total)


def limit_measure_mu(ev: _actions.ActionEvaluator) -> LimitMeasure:
    """Weak-* limit of the equator-norm measures."""
    M = _actions.normalization_M(ev)

    def density(c: float) -> float:
        return _actions.limit_density_unnorm(ev, c) / M

    def cdf(c: float) -> float:
        return _actions.limit_cdf(ev, c)

    return LimitMeasure(density=density, cdf=cdf, mass_constant=M)


def limit_measure_nu(ev: _actions.ActionEvaluator, sym: _actions.SymbolFn) -> LimitMeasure:
    """Weak-* limit of the matrix-element measures: normalized torus averages."""
    omega, cdf = _actions.nu_mass_and_cdf(ev, sym)

    def density(c: float) -> float:
        return _actions.torus_average(ev, sym, c) / omega

    return LimitMeasure(density=density, cdf=cdf, mass_constant=omega)


def _require_unsigned(emp: EmpiricalMeasure):
    if emp.signed:
        raise SignedMeasureError(
            "distances are undefined for signed measures; compare moments instead")


def ks_distance(emp: EmpiricalMeasure, lim: LimitMeasure) -> float:
    """Sup-distance between CDFs, checking both sides of every jump."""
    _require_unsigned(emp)
    worst = 0.0
    below = 0.0
    for c, w in emp.atoms:
        target = float(lim.cdf(c))
        worst = max(worst, abs(below - target), abs(below + w - target))
        below += w
    return worst


def _segment_mismatch(cdf, lo: float, hi: float, level: float) -> float:
    """Integral of |cdf - level| over [lo, hi].

    Splits at one bisected sign change when the endpoints disagree; a
    non-monotone cdf (sign-changing symbol) may hide an even number of
    extra crossings inside a piece, costing only local quadrature error.
    """
    if hi - lo <= 1e-300:
        return 0.0
    f_lo = float(cdf(lo)) - level
    f_hi = float(cdf(hi)) - level
    pieces = []
    if f_lo == 0.0 or f_hi == 0.0 or (f_lo < 0.0) == (f_hi < 0.0):
        pieces.append((lo, hi))
    else:
        a, b = lo, hi
        for _ in range(_CROSSING_BISECTIONS):
            mid = 0.5 * (a + b)
            if mid <= a or mid >= b:
                break
            if (float(cdf(mid)) - level < 0.0) == (f_lo < 0.0):
                a = mid
            else:
                b = mid
        cross = 0.5 * (a + b)
        pieces.append((lo, cross))
        pieces.append((cross, hi))
    x, w = gauss_legendre_rule(_SEGMENT_GL_NODES)
    total = 0.0
    for a, b in pieces:
        if b - a <= 1e-300:
            continue
        mid, half = 0.5 * (a + b), 0.5 * (b - a)
        vals = [abs(float(cdf(mid + half * xi)) - level) for xi in x]
        total += half * float(np.dot(w, vals))
    return total


def wasserstein1(emp: EmpiricalMeasure, lim: LimitMeasure) -> float:
    """L1 distance between CDFs over [-1, 1].

    The empirical CDF is constant between atoms, so the integral is a
    sum of segment integrals of |lim.cdf - level|, each split at its
    single crossing when one exists.
    """
    _require_unsigned(emp)
    bounds = [-1.0]
    levels = []
    below = 0.0
    for c, w in emp.atoms:
        if c > bounds[-1]:
            bounds.append(c)
            levels.append(below)
        below += w
    bounds.append(1.0)
    levels.append(below)
    total = 0.0
    for lo, hi, level in zip(bounds[:-1], bounds[1:], levels):
        total += _segment_mismatch(lim.cdf, lo, hi, level)
    return total


@dataclass(frozen=True, eq=False)
class ConvergenceReport:
    """Per-ell distances to the limit measures plus fitted W1 decay."""

    profile: str
    ells: list
    rows: list
    fit: dict
    fit_even: dict | None = None

    def as_dict(self) -> dict:
        out = {"profile": self.profile, "ells": list(self.ells), "rows": self.rows,
               "fit": self.fit}
        if self.fit_even is not None:
            out["fit_even"] = self.fit_even
        return out


def _fit_decay(ells, w1s) -> dict | None:
    pairs = [(l, w) for l, w in zip(ells, w1s) if w is not None and w > 0.0]
    if len(pairs) < 2:
        return None
    x = np.log([p[0] for p in pairs])
    y = np.log([p[1] for p in pairs])
    slope, intercept = np.polyfit(x, y, 1)
    pred = slope * x + intercept
    ss_res = float(np.sum((y - pred) ** 2))
    ss_tot = float(np.sum((y - np.mean(y)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return {"w1_exponent": float(slope), "w1_r2": r2}


def _sweep_row(p, ev, ell, sym, grid_size, lim_mu, lim_nu):
    slice_ = _spectral.joint_slice(p, ev, ell, grid_size)
    mu = empirical_mu(slice_)
    row = {
        "ell": ell,
        "M_ell": mu.total_mass_raw,
        "M_ell_over_ell": mu.total_mass_raw / ell,
        "ks_mu": ks_distance(mu, lim_mu),
        "w1_mu": wasserstein1(mu, lim_mu),
        "ks_nu": None,
        "w1_nu": None,
    }
    if sym is not None:
        nu = empirical_nu(slice_, sym)
        if nu.signed:
            row["ks_nu"] = row["w1_nu"] = None
        else:
            row["ks_nu"] = ks_distance(nu, lim_nu)
            row["w1_nu"] = wasserstein1(nu, lim_nu)
    return row


def convergence_sweep(p: SurfaceProfile, ev: _actions.ActionEvaluator, ells: list,
                      sym: _actions.SymbolFn | None = None,
                      grid_size: int = 4000) -> ConvergenceReport:
    """Distances of the empirical measures to their limits over ells.

    Rows for failing ells carry an `error` field and the sweep
    continues; fits use the surviving rows.  Work parallelizes across
    ells (REVTONE_THREADS caps the pool) and the output is independent
    of scheduling order.
    """
    ells = [int(l) for l in ells]
    if any(b <= a for a, b in zip(ells, ells[1:])):
        raise InvalidParameterError("ells must be strictly ascending")
    lim_mu = limit_measure_mu(ev)
    lim_nu = limit_measure_nu(ev, sym) if sym is not None else None

    def run(ell):
        try:
            return _sweep_row(p, ev, ell, sym, grid_size, lim_mu, lim_nu)
        except RevtoneError as exc:
            return {"ell": ell, "error": f"{type(exc).__name__}: {exc}"}

    env_cap = os.environ.get("REVTONE_THREADS")
    workers = max(1, min(len(ells), int(env_cap) if env_cap else (os.cpu_count() or 1)))
    if workers == 1:
        rows = [run(ell) for ell in ells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, ells))

    w1 = [row.get("w1_mu") for row in rows]
    fit = _fit_decay(ells, w1) or {"w1_exponent": float("nan"), "w1_r2": float("nan")}
    even = [(l, v) for l, v in zip(ells, w1) if l % 2 == 0]
    fit_even = _fit_decay([l for l, _ in even], [v for _, v in even]) if len(even) >= 2 else None
    return ConvergenceReport(profile=p.name, ells=ells, rows=rows, fit=fit,
                             fit_even=fit_even)
