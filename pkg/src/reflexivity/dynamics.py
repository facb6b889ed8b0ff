"""Coupled-system engine: iteration of the pair y = f(x), x = phi(y),
composite maps, fixed-point location, and stability classification.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

from . import expr as _expr

log = logging.getLogger(__name__)

DIVERGENCE_CUTOFF = 1e12
CONVERGENCE_RTOL = 1e-13
CONVERGENCE_WINDOW = 3
STABILITY_BAND = 1e-6  # half-width of the "marginal" band around |multiplier| = 1
ROOT_TOL = 1e-12
DEDUP_RADIUS_FACTOR = 1e-9
DEFAULT_GRID = 4096
_VALIDATION_GRID = 1024


class DynamicsError(Exception):
    pass


class DomainValidationError(DynamicsError):
    """A declared domain is degenerate or a function is not finite on it."""


class OrbitNumericError(DynamicsError):
    """Numeric failure during iteration; carries the step index."""

    def __init__(self, message, step):
        super().__init__(f"{message} (step {step})")
        self.step = step


class PreconditionError(DynamicsError):
    pass


def _is_finite(v):
    return v == v and abs(v) != float("inf")


@dataclass(frozen=True)
class ReflexiveSystem:
    """The pair (f, phi) with their declared closed domains."""

    f: _expr.Expression
    phi: _expr.Expression
    x_domain: tuple
    y_domain: tuple

    def __post_init__(self):
        for name, (lo, hi) in (("x_domain", self.x_domain), ("y_domain", self.y_domain)):
            if not (lo < hi):
                raise DomainValidationError(f"{name} is degenerate: [{lo}, {hi}]")
        _check_finite_on(self.f, self.x_domain, "f")
        _check_finite_on(self.phi, self.y_domain, "phi")


def _check_finite_on(fn, domain, label):
    lo, hi = domain
    n = _VALIDATION_GRID
    for k in range(n):
        v = lo + (hi - lo) * k / (n - 1)
        try:
            out = _expr.evaluate(fn, v)
        except _expr.EvalDomainError as exc:
            raise DomainValidationError(f"{label} invalid at {v!r}: {exc}") from exc
        if not _is_finite(out):
            raise DomainValidationError(f"{label} not finite at {v!r}")


def make_system(f_source, phi_source, x_domain, y_domain):
    """Parse both function sources and build a validated system."""
    return ReflexiveSystem(
        _expr.parse(f_source), _expr.parse(phi_source),
        (float(x_domain[0]), float(x_domain[1])),
        (float(y_domain[0]), float(y_domain[1])),
    )


@dataclass(frozen=True)
class SystemState:
    x: float
    y: float
    index: int


@dataclass(frozen=True)
class Orbit:
    states: tuple
    terminated_by: str  # "step-budget" | "divergence" | "convergence"

    def xs(self):
        return [st.x for st in self.states]

    def ys(self):
        return [st.y for st in self.states]


@dataclass(frozen=True)
class FixedPoint:
    x_bar: float
    y_bar: float
    residual_f: float
    residual_phi: float
    multiplier: float
    stability: str  # "attracting" | "repelling" | "marginal"


@dataclass(frozen=True)
class Prop1Report:
    residual_gamma: float
    residual_phi_map: float


class ScalarMap:
    """A one-dimensional map with a pointwise derivative."""

    def __init__(self, value_fn, deriv_fn):
        self._value = value_fn
        self._deriv = deriv_fn

    def __call__(self, t):
        return self._value(t)

    def derivative(self, t):
        return self._deriv(t)

    def iterate(self, t, n):
        for _ in range(n):
            t = self._value(t)
        return t


def step(s, st):
    """Advance one full loop: x' = phi(f(x)), y' = f(x')."""
    if not _is_finite(st.x):
        raise OrbitNumericError(f"non-finite state x={st.x!r}", st.index)
    x_next = _expr.evaluate(s.phi, _expr.evaluate(s.f, st.x))
    y_next = _expr.evaluate(s.f, x_next)
    return SystemState(x_next, y_next, st.index + 1)


def orbit(s, x0, max_steps):
    """Iterate from (x0, f(x0)); stops early on divergence or convergence."""
    if max_steps < 1:
        raise ValueError("max_steps must be >= 1")
    try:
        y0 = _expr.evaluate(s.f, float(x0))
    except _expr.EvalDomainError as exc:
        raise OrbitNumericError(str(exc), 0) from exc
    states = [SystemState(float(x0), y0, 0)]
    tag = "step-budget"
    streak = 0
    for _ in range(max_steps):
        prev = states[-1]
        try:
            nxt = step(s, prev)
        except _expr.EvalDomainError as exc:
            raise OrbitNumericError(str(exc), prev.index + 1) from exc
        states.append(nxt)
        if not _is_finite(nxt.x) or abs(nxt.x) > DIVERGENCE_CUTOFF:
            tag = "divergence"
            break
        if abs(nxt.x - prev.x) < CONVERGENCE_RTOL * max(1.0, abs(prev.x)):
            streak += 1
            if streak >= CONVERGENCE_WINDOW:
                tag = "convergence"
                break
        else:
            streak = 0
    return Orbit(tuple(states), tag)


def compose_gamma(s):
    """The composite map x -> phi(f(x)) with chain-rule derivative."""
    f, phi = s.f, s.phi
    return ScalarMap(
        lambda x: _expr.evaluate(phi, _expr.evaluate(f, x)),
        lambda x: _expr.derivative(phi, _expr.evaluate(f, x)) * _expr.derivative(f, x),
    )


def compose_phi_map(s):
    """The composite map y -> f(phi(y)) with chain-rule derivative."""
    f, phi = s.f, s.phi
    return ScalarMap(
        lambda y: _expr.evaluate(f, _expr.evaluate(phi, y)),
        lambda y: _expr.derivative(f, _expr.evaluate(phi, y)) * _expr.derivative(phi, y),
    )


def find_map_fixed_points(fn, lo, hi, grid_n=DEFAULT_GRID, tol=ROOT_TOL):
    """Roots of fn(x) - x on [lo, hi] by uniform grid plus bisection.

    Returns (roots, skipped) where skipped counts grid points dropped for
    numeric domain errors.  Tangential roots are only caught when a grid
    point lands within tol of zero.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    vals = []
    skipped = 0
    for k in range(grid_n):
        x = lo + (hi - lo) * k / (grid_n - 1)
        try:
            vals.append((x, fn(x) - x))
        except _expr.EvalDomainError:
            vals.append(None)
            skipped += 1
    if skipped == grid_n:
        raise DomainValidationError("map invalid over the entire domain")
    if skipped:
        log.warning("fixed-point grid: skipped %d of %d points", skipped, grid_n)

    roots = []
    for entry in vals:
        if entry is not None and abs(entry[1]) < tol:
            roots.append(entry[0])
    for a, b in zip(vals, vals[1:]):
        if a is None or b is None:
            continue
        (xa, ga), (xb, gb) = a, b
        if abs(ga) < tol or abs(gb) < tol or ga * gb > 0:
            continue
        try:
            roots.append(_bisect_root(fn, xa, ga, xb, gb, tol))
        except _expr.EvalDomainError:
            skipped += 1
    roots.sort()
    merged = []
    radius = DEDUP_RADIUS_FACTOR * (hi - lo)
    for r in roots:
        if not merged or r - merged[-1] > radius:
            merged.append(r)
    return merged, skipped


def _bisect_root(fn, xa, ga, xb, gb, tol):
    for _ in range(200):
        mid = 0.5 * (xa + xb)
        gm = fn(mid) - mid
        if abs(gm) < tol:
            return mid
        if (gm > 0) == (ga > 0):
            xa, ga = mid, gm
        else:
            xb, gb = mid, gm
    return 0.5 * (xa + xb)


def find_fixed_points(s, grid_n=DEFAULT_GRID):
    """Locate and classify all fixed points of the system on x_domain."""
    gamma = compose_gamma(s)
    lo, hi = s.x_domain
    roots, _ = find_map_fixed_points(gamma, lo, hi, grid_n)
    out = []
    for x_bar in roots:
        y_bar = _expr.evaluate(s.f, x_bar)
        out.append(classify_stability(s, x_bar, y_bar))
    return out


def classify_stability(s, x_bar, y_bar):
    """Build a FixedPoint with multiplier f'(x_bar) * phi'(y_bar)."""
    residual_f = abs(_expr.evaluate(s.f, x_bar) - y_bar)
    residual_phi = abs(_expr.evaluate(s.phi, y_bar) - x_bar)
    multiplier = _expr.derivative(s.f, x_bar) * _expr.derivative(s.phi, y_bar)
    mag = abs(multiplier)
    if mag < 1.0 - STABILITY_BAND:
        stability = "attracting"
    elif mag > 1.0 + STABILITY_BAND:
        stability = "repelling"
    else:
        stability = "marginal"
    return FixedPoint(x_bar, y_bar, residual_f, residual_phi, multiplier, stability)


def check_proposition_1(s, fp, tol=1e-9):
    """Residuals of x_bar under phi(f(.)) and y_bar under f(phi(.))."""
    if abs(_expr.evaluate(s.f, fp.x_bar) - fp.y_bar) > tol:
        raise PreconditionError("fixed point violates y_bar = f(x_bar)")
    if abs(_expr.evaluate(s.phi, fp.y_bar) - fp.x_bar) > tol:
        raise PreconditionError("fixed point violates x_bar = phi(y_bar)")
    residual_gamma = abs(compose_gamma(s)(fp.x_bar) - fp.x_bar)
    residual_phi_map = abs(compose_phi_map(s)(fp.y_bar) - fp.y_bar)
    return Prop1Report(residual_gamma, residual_phi_map)
