"""Momentum maps, projection to body coordinates, and reconstruction.

The full phase space is modeled in left trivialization as tuples
(g, p, theta, l): a group element, a body momentum, and the rotor angle
and momentum vectors. The momentum map of the lifted left action sends
such a point to its spatial momentum Ad*_{g^-1} p; its level sets
project onto the reduced space by simply dropping g. Reconstruction
inverts that projection along a trajectory by integrating
g_dot = g hat(xi) with xi = dh/dnu evaluated on the reduced states.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import lie
from .controlled import RCHSystem, dynamical_field
from .lie import AlgebraVector, CoalgebraVector, GroupElement
from .poisson import (ReducedPoint, ReducedTangent, ScalarField, gradient,
                      hamiltonian_field, point_like)

MEMBERSHIP_TOL = 1e-8


@dataclass(frozen=True)
class PhasePoint:
    """Point of the full phase space in left trivialization."""

    g: GroupElement
    p: CoalgebraVector
    theta: np.ndarray
    l: np.ndarray

    def __post_init__(self):
        if self.g.kind != self.p.kind:
            raise ValueError("group element and momentum belong to "
                             "different groups")
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float)) \
            if np.size(self.theta) else np.zeros(0)
        momenta = np.atleast_1d(np.asarray(self.l, dtype=float)) \
            if np.size(self.l) else np.zeros(0)
        if theta.shape != momenta.shape:
            raise ValueError("rotor angles and momenta must pair up")
        if not (np.all(np.isfinite(theta)) and np.all(np.isfinite(momenta))):
            raise ValueError("rotor components must be finite")
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "l", momenta)

    @property
    def kind(self) -> str:
        return self.g.kind


@dataclass(frozen=True)
class FullTangent:
    """Velocity of a PhasePoint: body velocity of g plus the tangent of
    the remaining coordinates."""

    xi: AlgebraVector
    body: ReducedTangent


def phase_point(g: GroupElement, p: CoalgebraVector, theta=(),
                l=()) -> PhasePoint:
    return PhasePoint(g, p, theta, l)


def momentum_map(pt: PhasePoint) -> CoalgebraVector:
    """Spatial momentum Ad*_{g^-1} p of the lifted left action."""
    return lie.Ad_star(pt.g, pt.p)


def momentum_fiber_point(g: GroupElement, mu: CoalgebraVector, theta=(),
                         l=()) -> PhasePoint:
    """The point over g on the level set momentum_map = mu."""
    return PhasePoint(g, lie.Ad_star(lie.inverse(g), mu), theta, l)


def _membership_defect(pt: PhasePoint, mu: CoalgebraVector) -> float:
    return float(np.linalg.norm(momentum_map(pt).flat() - mu.flat()))


def _require_member(pt: PhasePoint, mu: CoalgebraVector):
    defect = _membership_defect(pt, mu)
    if defect > MEMBERSHIP_TOL:
        raise ValueError("point is not on the requested momentum level "
                         f"set (defect {defect:.3e})")


def project_reduced(pt: PhasePoint, mu: CoalgebraVector) -> ReducedPoint:
    """Drop g: the reduced coordinates of a level-set point are its body
    momentum together with the rotor pair."""
    _require_member(pt, mu)
    return ReducedPoint(pt.p, pt.theta.copy(), pt.l.copy())


def as_reduced(pt: PhasePoint) -> ReducedPoint:
    """Body coordinates of pt, with no level-set check."""
    return ReducedPoint(pt.p, pt.theta.copy(), pt.l.copy())


def reduced_hamiltonian_check(h_full: Callable[[PhasePoint], float],
                              h_red: ScalarField,
                              samples: Sequence[PhasePoint]) -> float:
    """Max over samples of |h_full(pt) - h_red(projection of pt)|.

    Each sample is projected on its own momentum level, so membership
    holds by construction and the defect isolates the two Hamiltonians.
    """
    worst = 0.0
    for pt in samples:
        q = project_reduced(pt, momentum_map(pt))
        worst = max(worst, abs(h_full(pt) - h_red.eval(q)))
    return worst


def body_velocity(h: ScalarField, q: ReducedPoint) -> AlgebraVector:
    """dh/dnu at q, the algebra element that drives g along the flow."""
    grad = gradient(h, q)
    if q.kind == lie.SO3:
        return AlgebraVector(lie.SO3, grad.d_pi)
    return AlgebraVector(lie.SE3, grad.d_pi, grad.d_gamma)


def full_dynamical_field(sys: RCHSystem, pt: PhasePoint) -> FullTangent:
    """Field on the full space: the reduced field plus the group
    velocity that reconstruction integrates.

    Forces and controls are vertical, so they may move momenta but never
    the rotor angles; a fiber map that does is rejected here because the
    angle velocity on the full space is pinned to dh/dl.
    """
    q = as_reduced(pt)
    body = dynamical_field(sys, q)
    shift = body + (-hamiltonian_field(sys.hamiltonian, q))
    if shift.d_theta.size and np.any(shift.d_theta != 0.0):
        raise ValueError("force/control must be vertical: it cannot move "
                         "the rotor angles")
    return FullTangent(body_velocity(sys.hamiltonian, q), body)


def commutation_residual(sys: RCHSystem, pt: PhasePoint,
                         mu: CoalgebraVector,
                         reduced_field_fn=None) -> float:
    """Norm of (reduced field at the projection) minus (projection of
    the full field), a two-path consistency check of the reduction."""
    _require_member(pt, mu)
    q = project_reduced(pt, mu)
    fn = reduced_field_fn or (lambda state: dynamical_field(sys, state))
    a = fn(q).flat()
    b = full_dynamical_field(sys, pt).body.flat()
    return float(np.linalg.norm(a - b))


# ---------------------------------------------------------------------------
# reconstruction
# ---------------------------------------------------------------------------

def _dexpinv(kind: str, sigma: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Inverse differential of exp for the body-velocity equation
    g_dot = g hat(xi): the exponential coordinate obeys
    sigma_dot = xi + [sigma, xi]/2 + [sigma, [sigma, xi]]/12 + ...,
    truncated at the double bracket, which is exact enough for
    fourth-order steps where sigma is O(dt)."""
    def br(a, b):
        return lie.bracket(lie.algebra_from_flat(kind, a),
                           lie.algebra_from_flat(kind, b)).flat()

    c1 = br(sigma, xi)
    return xi + 0.5 * c1 + br(sigma, c1) / 12.0


def reconstruct(states: Sequence[ReducedPoint], g0: GroupElement,
                dt: float, h: ScalarField, order: int = 1,
                field=None) -> tuple:
    """Recover the group trajectory over a reduced trajectory.

    order=1 steps g_{n+1} = g_n exp(dt xi_n) with xi_n = dh/dnu at
    states[n]. order=4 integrates the exponential coordinate jointly
    with the reduced state by a classical fourth-order step, which keeps
    the recovered momentum map constant to integrator accuracy; it needs
    ``field`` to evaluate the reduced flow between samples.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if not states:
        raise ValueError("states must be non-empty")
    if order not in (1, 4):
        raise ValueError(f"order must be 1 or 4, got {order}")
    if order == 4 and field is None:
        raise ValueError("order=4 reconstruction needs the reduced field")
    kind = g0.kind
    groups = [g0]
    g = g0
    for n in range(len(states) - 1):
        q = states[n]
        if order == 1:
            sigma = dt * body_velocity(h, q).flat()
        else:
            sigma = _rkmk_sigma(kind, q, dt, h, field)
        g = lie.compose(g, lie.exp_group(lie.algebra_from_flat(kind, sigma)))
        groups.append(g)
    return tuple(groups)


def _rkmk_sigma(kind: str, q: ReducedPoint, dt: float, h: ScalarField,
                field) -> np.ndarray:
    """One fourth-order step of sigma_dot = dexpinv(sigma, xi(y)),
    y_dot = field(y) from sigma = 0, y = q; returns the step's sigma."""
    def xi_at(y: ReducedPoint) -> np.ndarray:
        return body_velocity(h, y).flat()

    def advance(y: ReducedPoint, v: ReducedTangent, a: float) -> ReducedPoint:
        return point_like(y, y.flat() + a * v.flat())

    f1 = field(q)
    k1 = xi_at(q)
    y2 = advance(q, f1, 0.5 * dt)
    f2 = field(y2)
    k2 = _dexpinv(kind, 0.5 * dt * k1, xi_at(y2))
    y3 = advance(q, f2, 0.5 * dt)
    f3 = field(y3)
    k3 = _dexpinv(kind, 0.5 * dt * k2, xi_at(y3))
    y4 = advance(q, f3, dt)
    k4 = _dexpinv(kind, dt * k3, xi_at(y4))
    return (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def momentum_drift(states: Sequence[ReducedPoint], groups: Sequence[GroupElement]) -> float:
    """Max deviation of the recovered spatial momentum from its initial
    value along a reconstructed trajectory."""
    if len(states) != len(groups):
        raise ValueError("states and groups must have equal length")
    j0 = None
    worst = 0.0
    for q, g in zip(states, groups):
        j = lie.Ad_star(g, q.nu).flat()
        if j0 is None:
            j0 = j
        else:
            worst = max(worst, float(np.linalg.norm(j - j0)))
    return worst
