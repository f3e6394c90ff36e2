"""Fixed-step time integration of reduced fields and drift diagnostics.

The single integrator is the classical fourth-order Runge-Kutta step on
the flat coordinates of a reduced point. :func:`run` drives it over a
uniform grid and records, for each supplied invariant, the relative
drift series (I(t) - I(0)) / max(1, |I(0)|); the max(1, .) floor keeps
the series meaningful when an invariant starts near zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

import numpy as np

from .poisson import (ReducedPoint, ReducedTangent, ScalarField,
                      casimir_fields, point_like)

Field = Callable[[ReducedPoint], ReducedTangent]
Invariant = Callable[[ReducedPoint], float]

BLOWUP_LIMIT = 1e12

# A grid t_i = i * dt built in float64 is uniform only to rounding: the
# ulp at t = 10 is already 1.78e-15, so uniformity is checked relative
# to the span of the grid.
UNIFORM_TOL = 1e-15


@dataclass(frozen=True)
class Trajectory:
    """Uniformly sampled integration output with drift diagnostics."""

    times: np.ndarray
    states: tuple
    drift: Mapping[str, np.ndarray]

    def __post_init__(self):
        object.__setattr__(self, "times",
                           np.asarray(self.times, dtype=float))
        object.__setattr__(self, "states", tuple(self.states))
        if self.times.ndim != 1 or self.times.size != len(self.states):
            raise ValueError("times and states must have equal length")
        if self.times.size >= 2:
            steps = np.diff(self.times)
            dt = steps[0]
            tol = UNIFORM_TOL * max(1.0, float(np.abs(self.times).max()))
            if np.max(np.abs(steps - dt)) > tol:
                raise ValueError("trajectory times are not uniformly spaced")
        for series in self.drift.values():
            if len(series) != self.times.size:
                raise ValueError("drift series length must match times")

    @property
    def dt(self) -> float:
        return float(self.times[1] - self.times[0])

    def max_drift(self, name: str) -> float:
        return float(np.max(np.abs(self.drift[name])))


def rk4_step(field: Field, p: ReducedPoint, dt: float) -> ReducedPoint:
    """One classical Runge-Kutta step of size dt (local error O(dt^5))."""
    if dt <= 0:
        raise ValueError("dt must be positive")
    x = p.flat()
    k1 = field(p).flat()
    k2 = field(point_like(p, x + 0.5 * dt * k1)).flat()
    k3 = field(point_like(p, x + 0.5 * dt * k2)).flat()
    k4 = field(point_like(p, x + dt * k3)).flat()
    y = x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    if not np.all(np.isfinite(y)):
        raise ValueError("integration step produced a non-finite state")
    return point_like(p, y)


def run(field: Field, p0: ReducedPoint, dt: float, t_final: float,
        invariants: Mapping[str, Invariant] | None = None) -> Trajectory:
    """Integrate p0 for t_final at fixed step dt and track invariants.

    dt must divide t_final to rounding. Raises if any state component
    exceeds ``BLOWUP_LIMIT`` in magnitude, reporting the failure time.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    n = int(round(t_final / dt))
    if n < 1 or abs(n * dt - t_final) > 1e-9 * max(1.0, abs(t_final)):
        raise ValueError(f"dt {dt} does not divide t_final {t_final}")
    invariants = dict(invariants or {})

    states = [p0]
    values = {name: [fn(p0)] for name, fn in invariants.items()}
    p = p0
    for i in range(n):
        p = rk4_step(field, p, dt)
        worst = float(np.max(np.abs(p.flat())))
        if worst > BLOWUP_LIMIT:
            raise ValueError(
                f"trajectory blew up at t = {(i + 1) * dt:.6g}: "
                f"max |component| = {worst:.3e}")
        states.append(p)
        for name, fn in invariants.items():
            values[name].append(fn(p))

    times = np.arange(n + 1) * dt
    drift = {}
    for name, series in values.items():
        series = np.asarray(series, dtype=float)
        drift[name] = (series - series[0]) / max(1.0, abs(series[0]))
    return Trajectory(times, states, drift)


def energy_invariant(h: ScalarField) -> Invariant:
    return h.eval


def standard_invariants(h: ScalarField, kind: str) -> dict:
    """Energy plus every Casimir of the algebra, keyed by name."""
    out = {"energy": energy_invariant(h)}
    for name, c in casimir_fields(kind):
        out[name] = c.eval
    return out
