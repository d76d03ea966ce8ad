"""Meridian profiles of convex surfaces of revolution.

A surface with metric dr^2 + a(r)^2 dtheta^2 on [0, L] is described by
its profile function a.  Admissible profiles vanish at both poles with
unit slope (+1 at r = 0, -1 at r = L), are positive in between, and have
a single nondegenerate maximum at r0; the circle r = r0 is the equator.

Profiles are immutable value objects: the callables a, a1, a2 must
accept scalars or ndarrays and be free of hidden state.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import ConfigError, InvalidParameterError, RejectedProfileError
from .quadrature import gauss_legendre_rule

SLOPE_TOL = 1e-10
ZERO_TOL_FACTOR = 1e-12
N_VALIDATION_SAMPLES = 10_001


@dataclass(frozen=True)
class SurfaceProfile:
    """Profile a(r) with its first two derivatives and equator data."""

    a: Callable
    a1: Callable
    a2: Callable
    L: float
    r0: float
    a_r0: float
    name: str = "custom"

    def equator_length(self) -> float:
        return 2.0 * np.pi * self.a_r0


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    residual: float
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    profile_name: str
    checks: Sequence[CheckResult] = field(default_factory=tuple)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_failure(self) -> CheckResult | None:
        for c in self.checks:
            if not c.passed:
                return c
        return None

    def as_dict(self) -> dict:
        return {
            "profile": self.profile_name,
            "passed": self.passed,
            "checks": [
                {"name": c.name, "passed": c.passed, "residual": c.residual, "detail": c.detail}
                for c in self.checks
            ],
        }


def _bisect(f, lo: float, hi: float) -> float:
    """Bisection to floating-point resolution; endpoints must straddle a sign change."""
    flo = f(lo)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _sign_changes(values: np.ndarray) -> list[int]:
    """Indices i where values[i] and values[i+1] have strictly opposite signs."""
    s = np.sign(values)
    nz = np.flatnonzero(s != 0)
    changes = []
    for j in range(len(nz) - 1):
        if s[nz[j]] != s[nz[j + 1]]:
            changes.append(nz[j])
    return changes


def validate_profile(p: SurfaceProfile, samples: int = N_VALIDATION_SAMPLES) -> ValidationReport:
    """Check the structural invariants of a convex profile.

    Runs sampled checks on a uniform grid of `samples` points plus exact
    checks at the poles and the recorded equator.  Each check reports the
    residual actually measured so failures are diagnosable.
    """
    L = p.L
    zero_tol = ZERO_TOL_FACTOR * L
    r_grid = np.linspace(0.0, L, samples)
    interior = r_grid[1:-1]
    a_int = np.asarray(p.a(interior), float)
    a1_grid = np.asarray(p.a1(r_grid), float)

    checks = []

    res = max(abs(float(p.a(0.0))), abs(float(p.a(L))))
    checks.append(CheckResult("endpoint_zero", res <= zero_tol, res,
                              f"|a| at poles vs tolerance {zero_tol:.3e}"))

    res = max(abs(float(p.a1(0.0)) - 1.0), abs(float(p.a1(L)) + 1.0))
    checks.append(CheckResult("pole_slope", res <= SLOPE_TOL, res,
                              "a'(0) = +1 and a'(L) = -1"))

    amin = float(np.min(a_int))
    checks.append(CheckResult("interior_positive", amin > 0.0, amin,
                              "min of a on interior sample grid"))

    changes = _sign_changes(a1_grid)
    ok = len(changes) == 1 and a1_grid[0] > 0.0
    checks.append(CheckResult("single_sign_change", ok, float(len(changes)),
                              "a' must change sign exactly once, + to -"))

    slope_res = abs(float(p.a1(p.r0)))
    curv = float(p.a2(p.r0))
    ok = slope_res <= SLOPE_TOL and curv < 0.0
    checks.append(CheckResult("critical_point", ok, slope_res,
                              f"a'(r0) = 0 and a''(r0) = {curv:.6g} < 0"))

    gap = float(np.max(a_int)) - p.a_r0
    checks.append(CheckResult("max_dominates", gap <= max(zero_tol, 1e-12 * p.a_r0), gap,
                              "sampled a never exceeds a(r0)"))

    return ValidationReport(p.name, tuple(checks))


def make_custom(a, a1, a2, L: float, name: str = "custom",
                r0: float | None = None, check: bool = True) -> SurfaceProfile:
    """Build a profile from explicit callables for a, a', a''.

    r0 is located by bisection on a' unless supplied.  With check=True
    (the default) the profile is validated and a RejectedProfileError
    names the first violated invariant.
    """
    if not (np.isfinite(L) and L > 0.0):
        raise InvalidParameterError(f"profile length must be positive, got {L}")
    if r0 is None:
        grid = np.linspace(0.0, L, 4097)[1:-1]
        a1_vals = np.asarray(a1(grid), float)
        changes = _sign_changes(a1_vals)
        if len(changes) != 1:
            raise RejectedProfileError(
                f"single_sign_change: a' changes sign {len(changes)} times on (0, L), need exactly 1")
        i = changes[0]
        r0 = _bisect(a1, float(grid[i]), float(grid[i + 1]))
    p = SurfaceProfile(a=a, a1=a1, a2=a2, L=float(L), r0=float(r0),
                       a_r0=float(a(r0)), name=name)
    if check:
        report = validate_profile(p)
        bad = report.first_failure()
        if bad is not None:
            raise RejectedProfileError(f"{bad.name}: {bad.detail} (residual {bad.residual:.3e})")
    return p


def make_round_sphere() -> SurfaceProfile:
    """Unit round sphere: a(r) = sin r on [0, pi]."""
    return SurfaceProfile(a=np.sin, a1=np.cos, a2=lambda r: -np.sin(np.asarray(r, float)),
                          L=float(np.pi), r0=float(np.pi / 2), a_r0=1.0, name="round_sphere")


class _EllipsoidMeridian:
    """Arclength reparametrization of the meridian of x^2 + y^2 + z^2/q^2 = 1.

    With the ellipse parameter t in [0, pi] the distance from the axis is
    sin t and the speed is s(t) = sqrt(cos^2 t + q^2 sin^2 t).  The map
    t -> r(t) = integral of s is inverted once on a Chebyshev-Lobatto
    grid in r and evaluated by barycentric interpolation; a, a', a'' then
    follow from closed forms in t.
    """

    def __init__(self, aspect: float, n_nodes: int = 513):
        self.q = float(aspect)
        gl_x, gl_w = gauss_legendre_rule(96)
        self._gl = (gl_x, gl_w)
        self.L = self._arclength(np.pi)
        self.r_equator = self._arclength(np.pi / 2)
        j = np.arange(n_nodes)
        self.r_nodes = 0.5 * self.L * (1.0 - np.cos(np.pi * j / (n_nodes - 1)))
        self.bary_w = np.where(j % 2 == 0, 1.0, -1.0)
        self.bary_w[0] *= 0.5
        self.bary_w[-1] *= 0.5
        self.t_nodes = self._invert_nodes()

    def speed(self, t):
        ct, st = np.cos(t), np.sin(t)
        return np.sqrt(ct * ct + self.q * self.q * st * st)

    def _arclength(self, t: float) -> float:
        x, w = self._gl
        half = 0.5 * t
        return half * float(np.dot(w, self.speed(half * (x + 1.0))))

    def _invert_nodes(self) -> np.ndarray:
        t_vals = np.empty_like(self.r_nodes)
        t = 0.0
        for i, r in enumerate(self.r_nodes):
            # warm-started Newton; r(t) is monotone with r' = speed >= min(1, q)
            for _ in range(60):
                step = (self._arclength(t) - r) / self.speed(t)
                t -= step
                t = min(max(t, 0.0), np.pi)
                if abs(step) < 1e-15 * np.pi:
                    break
            t_vals[i] = t
        t_vals[0] = 0.0
        t_vals[-1] = np.pi
        return t_vals

    def t_of_r(self, r):
        r = np.asarray(r, float)
        scalar = r.ndim == 0
        rq = np.atleast_1d(r)
        diff = rq[:, None] - self.r_nodes[None, :]
        exact = np.isclose(diff, 0.0, rtol=0.0, atol=1e-300)
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = self.bary_w / diff
            vals = (terms @ self.t_nodes) / np.sum(terms, axis=1)
        hit_rows = np.any(exact, axis=1)
        if np.any(hit_rows):
            idx = np.argmax(exact[hit_rows], axis=1)
            vals[hit_rows] = self.t_nodes[idx]
        vals = np.clip(vals, 0.0, np.pi)
        return float(vals[0]) if scalar else vals

    def a(self, r):
        return np.sin(self.t_of_r(r))

    def a1(self, r):
        t = self.t_of_r(r)
        return np.cos(t) / self.speed(t)

    def a2(self, r):
        t = self.t_of_r(r)
        return -self.q * self.q * np.sin(t) / self.speed(t) ** 4


def make_ellipsoid(aspect: float) -> SurfaceProfile:
    """Ellipsoid of revolution with unit equatorial radius and polar
    semi-axis `aspect`, parametrized by meridian arclength."""
    if not (np.isfinite(aspect) and aspect > 0.0):
        raise InvalidParameterError(f"aspect must be positive, got {aspect}")
    m = _EllipsoidMeridian(aspect)
    p = SurfaceProfile(a=m.a, a1=m.a1, a2=m.a2, L=m.L, r0=m.r_equator,
                       a_r0=float(m.a(m.r_equator)), name=f"ellipsoid_{aspect:g}")
    report = validate_profile(p)
    bad = report.first_failure()
    if bad is not None:
        raise RejectedProfileError(f"{bad.name}: {bad.detail} (residual {bad.residual:.3e})")
    return p


def load_profile_table(path: str, name: str | None = None, check: bool = True) -> SurfaceProfile:
    """Profile from a two-column text table of r and a(r).

    Rows must have strictly increasing r starting at 0; a cubic spline
    supplies the derivatives.  Structural problems raise ConfigError
    naming the offending row.
    """
    from scipy.interpolate import CubicSpline

    rows = []
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if not text:
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ConfigError(f"table row {lineno}: expected two columns, got {len(parts)}")
            try:
                rows.append((float(parts[0]), float(parts[1]), lineno))
            except ValueError:
                raise ConfigError(f"table row {lineno}: non-numeric entry {text!r}") from None
    if len(rows) < 8:
        raise ConfigError(f"profile table needs at least 8 rows, got {len(rows)}")
    r = np.array([x[0] for x in rows])
    vals = np.array([x[1] for x in rows])
    if abs(r[0]) > 1e-12 * max(r[-1], 1.0):
        raise ConfigError(f"table row {rows[0][2]}: first r must be 0, got {r[0]!r}")
    bad = np.flatnonzero(np.diff(r) <= 0.0)
    if bad.size:
        i = bad[0]
        raise ConfigError(
            f"table row {rows[i + 1][2]}: r = {r[i + 1]!r} does not increase past {r[i]!r}")
    spline = CubicSpline(r, vals)
    d1 = spline.derivative(1)
    d2 = spline.derivative(2)
    return make_custom(spline, d1, d2, float(r[-1]),
                       name=name or "custom_table", check=check)
