"""Controlled Hamiltonian systems on reduced phase spaces.

A controlled system couples a Hamiltonian with an external force and a
feedback control. Both enter the dynamics through vertical lifts: on a
vector-bundle fiber, the lift of a fiber displacement is the tangent
vector with those fiber components and no base motion. The reduced
spaces here have a trivial base (the group part has been quotiented
away, and rotor angles and momenta are themselves fiber coordinates),
so every reduced tangent is vertical; :data:`VerticalVector` is an
alias that marks intent at call sites.

Forces and controls come in two interchangeable forms:

* a fiber map ``p -> ReducedPoint`` returning the displaced point,
  with the identity map meaning "no force", or
* a vertical field ``p -> ReducedTangent`` giving the lift directly,
  which is the form :func:`matching_control` produces.

Admissibility of controls is not constrained here: any vertical field
is accepted.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .lie import SE3, SO3
from .poisson import (ReducedPoint, ReducedTangent, ScalarField,
                      hamiltonian_field, tangent_like)

# On the reduced space the bundle base is a single point, so a vertical
# vector is an ordinary reduced tangent.
VerticalVector = ReducedTangent

FiberMap = Callable[[ReducedPoint], ReducedPoint]
VerticalField = Callable[[ReducedPoint], ReducedTangent]


@dataclass(frozen=True)
class RCHSystem:
    """Hamiltonian plus optional force and control on a reduced space.

    ``force`` and ``control`` accept either force form described in the
    module docstring; ``None`` means absent. ``rotor_count`` fixes the
    size of the rotor momentum slot that points of this system carry.
    """

    hamiltonian: ScalarField
    kind: str
    rotor_count: int
    force: FiberMap | VerticalField | None = None
    control: FiberMap | VerticalField | None = None

    def __post_init__(self):
        if self.kind not in (SO3, SE3):
            raise ValueError(f"unknown algebra kind {self.kind!r}")
        if self.rotor_count < 0:
            raise ValueError("rotor_count must be nonnegative")


def _check_point(sys: RCHSystem, p: ReducedPoint):
    if p.kind != sys.kind:
        raise ValueError(f"point kind {p.kind} does not match system "
                         f"kind {sys.kind}")
    if p.n_l != sys.rotor_count or p.n_theta not in (0, sys.rotor_count):
        raise ValueError(
            f"point rotor slots (theta {p.n_theta}, l {p.n_l}) do not "
            f"match system rotor_count {sys.rotor_count}")


def _check_same_fiber(q: ReducedPoint, p: ReducedPoint):
    if q.kind != p.kind or q.n_theta != p.n_theta or q.n_l != p.n_l:
        raise ValueError(
            "fiber map is not fiber-preserving: it changed the point "
            f"layout from ({p.kind}, theta {p.n_theta}, l {p.n_l}) to "
            f"({q.kind}, theta {q.n_theta}, l {q.n_l})")


def fiber_displacement(q: ReducedPoint, p: ReducedPoint) -> VerticalVector:
    """Vertical vector from p toward q = fmap(p): the velocity of the
    straight fiber line s -> p + s (q - p) at s = 0. Zero when q == p,
    so an identity fiber map contributes nothing to the dynamics."""
    _check_same_fiber(q, p)
    return tangent_like(p, q.flat() - p.flat())


def vlift_fiber_map(fmap: FiberMap, vec: ReducedTangent,
                    p: ReducedPoint) -> VerticalVector:
    """Carry ``vec``, a tangent at fmap(p), back to p along the straight
    fiber line and return its vertical part.

    The reduced base is a point, so the vertical part is the whole
    vector, and straight-line transport on a vector fiber leaves the
    components unchanged; what this adds over a copy is the
    fiber-preservation check on ``fmap``. With the identity map the
    result is ``vec`` itself.
    """
    q = fmap(p)
    _check_same_fiber(q, p)
    if vec.flat().size != p.flat().size:
        raise ValueError("tangent size does not match the point")
    return tangent_like(p, vec.flat())


def _as_vertical(fmap, p: ReducedPoint) -> VerticalVector:
    val = fmap(p)
    if isinstance(val, ReducedPoint):
        return fiber_displacement(val, p)
    if isinstance(val, ReducedTangent):
        if val.flat().size != p.flat().size:
            raise ValueError("vertical field output does not match the "
                             "point layout")
        return val
    raise TypeError("force/control must return a ReducedPoint (fiber "
                    "map) or a ReducedTangent (vertical field), got "
                    f"{type(val).__name__}")


def dynamical_field(sys: RCHSystem, p: ReducedPoint) -> ReducedTangent:
    """The full vector field of the controlled system at p: Hamiltonian
    part plus the vertical lifts of force and control. With both absent
    (or the identity map) this is exactly the Hamiltonian field."""
    _check_point(sys, p)
    out = hamiltonian_field(sys.hamiltonian, p)
    for fmap in (sys.force, sys.control):
        if fmap is not None:
            out = out + _as_vertical(fmap, p)
    return out


INVERSE_TOL = 1e-9


def matching_control(sys_a: RCHSystem, sys_b: RCHSystem,
                     pullback: Callable[[ReducedPoint], ReducedPoint],
                     push_tangent: Callable[[ReducedTangent], ReducedTangent],
                     pullback_inverse: Callable[[ReducedPoint], ReducedPoint],
                     ) -> VerticalField:
    """Control law under which system A shadows system B through a
    diffeomorphism of their reduced spaces.

    ``pullback`` maps B-points to A-points, ``pullback_inverse`` undoes
    it, and ``push_tangent`` carries tangents at a B-point to tangents
    at its image. The returned vertical field is

        v(p) = -X_{h_A}(p) + push(X_B(pullback_inverse(p)))

    where X_B is B's full dynamical field (its Hamiltonian field when B
    carries no force or control of its own). Installing v as the
    control of a force-free A makes A's dynamical field agree with the
    transported B-field at every point; a force on A stays in the
    controlled field on top of that. Each evaluation round-trips the
    point through both maps and raises if they fail to invert each
    other there.
    """

    def control(p: ReducedPoint) -> VerticalVector:
        _check_point(sys_a, p)
        q = pullback_inverse(p)
        _check_point(sys_b, q)
        defect = float(np.max(np.abs(pullback(q).flat() - p.flat())))
        if defect > INVERSE_TOL:
            raise ValueError("pullback is not invertible at this point "
                             f"(round-trip defect {defect:.3e})")
        transported = push_tangent(dynamical_field(sys_b, q))
        return transported + (-hamiltonian_field(sys_a.hamiltonian, p))

    return control
