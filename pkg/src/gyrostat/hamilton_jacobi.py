"""One-form sections of the phase bundle and Hamilton-Jacobi residuals.

A section assigns momenta to configurations: value(q) is a full phase
point over q. Everything differential here is computed in the
left-trivialized frame: a base direction is an (algebra vector, angle
velocity) pair, a base move follows (g exp(t xi), theta + t dtheta), and
component derivatives are central finite differences of the section's
body components. Closedness, the canonical two-form, and the residuals
are all stated in that trivialization, so a section with constant body
components is closed for these evaluators by construction.

Three residual notions are provided, each in a full-space and a reduced
flavor (pass ``mu`` for the reduced one):

* ``x_gamma``: the base projection of the dynamical field along the
  section, the vector field a solution would steer the base by.
* ``relatedness_residual``: how far the section fails to intertwine the
  base field with the phase-space field.
* ``hj_residual``: the Hamilton-Jacobi left-hand side itself; reduced,
  it is the norm of the controlled reduced field at the section's
  image, matching the componentwise equation assemblies in
  :mod:`gyrostat.systems` up to their inertia row scales.

``theorem_equivalence_probe`` evaluates the latter two side by side:
they must vanish together or stay apart together, never disagree.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import lie
from .controlled import RCHSystem, dynamical_field
from .lie import AlgebraVector, GroupElement
from .poisson import hamiltonian_field
from .reduction import (MEMBERSHIP_TOL, PhasePoint, as_reduced,
                        full_dynamical_field, momentum_map)

FD_STEP = 1e-6
GATE_TOL = 1e-5
FAMILIES = ("exact_dW", "constant_body", "custom")


class GateRejection(ValueError):
    """A section failed the closedness prerequisite of a probe."""


class MembershipError(ValueError):
    """A section image left the momentum level set it was declared on."""


@dataclass(frozen=True)
class Configuration:
    """Base point: group element plus rotor angles."""

    g: GroupElement
    theta: np.ndarray

    def __post_init__(self):
        theta = np.atleast_1d(np.asarray(self.theta, dtype=float)) \
            if np.size(self.theta) else np.zeros(0)
        if not np.all(np.isfinite(theta)):
            raise ValueError("rotor angles must be finite")
        object.__setattr__(self, "theta", theta)

    @property
    def kind(self) -> str:
        return self.g.kind

    @property
    def n_theta(self) -> int:
        return self.theta.size


def configuration(g: GroupElement, theta=()) -> Configuration:
    return Configuration(g, theta)


def random_configuration(rng: np.random.Generator, kind: str,
                         n_theta: int = 0,
                         scale: float = 1.0) -> Configuration:
    return Configuration(lie.random_group(rng, kind, scale),
                         scale * rng.standard_normal(n_theta))


def isotropy_configurations(rng: np.random.Generator, mu, n: int,
                            rotor_count: int,
                            theta_scale: float = 1.0) -> list:
    """Configurations whose group part fixes the spatial momentum mu
    under the coadjoint action, so constant-body sections at mu sit
    exactly on the mu level set there.

    Supports any so(3)* value and the aligned se(3)* values (pi parallel
    to gamma, including pi = 0); a generic se(3)* momentum has a
    stabilizer this sampler does not parameterize.
    """
    out = []
    if mu.kind == lie.SO3:
        norm = float(np.linalg.norm(mu.pi))
        for _ in range(n):
            if norm == 0.0:
                g = lie.random_group(rng, lie.SO3)
            else:
                angle = rng.uniform(-np.pi, np.pi)
                g = lie.exp_group(lie.algebra(lie.SO3,
                                              angle * mu.pi / norm))
            out.append(Configuration(g, theta_scale
                                     * rng.standard_normal(rotor_count)))
        return out
    norm = float(np.linalg.norm(mu.gamma))
    if norm == 0.0 or np.linalg.norm(np.cross(mu.pi, mu.gamma)) > 1e-12 * max(1.0, norm):
        raise ValueError("isotropy sampling needs pi parallel to gamma "
                         "(or pi = 0) with gamma nonzero")
    axis = mu.gamma / norm
    for _ in range(n):
        angle = rng.uniform(-np.pi, np.pi)
        slide = rng.standard_normal()
        g = lie.compose(
            lie.exp_group(lie.algebra(lie.SE3, angle * axis, (0, 0, 0))),
            lie.exp_group(lie.algebra(lie.SE3, (0, 0, 0), slide * axis)))
        out.append(Configuration(g, theta_scale
                                 * rng.standard_normal(rotor_count)))
    return out


@dataclass(frozen=True)
class BaseTangent:
    """Tangent to the configuration space in the body frame."""

    xi: AlgebraVector
    d_theta: np.ndarray

    def flat(self) -> np.ndarray:
        return np.concatenate([self.xi.flat(), self.d_theta])

    def norm(self) -> float:
        return float(np.linalg.norm(self.flat()))


def base_tangent_from_flat(kind: str, n_theta: int, arr) -> BaseTangent:
    arr = np.asarray(arr, dtype=float)
    d = lie.algebra_dim(kind)
    if arr.shape != (d + n_theta,):
        raise ValueError(f"expected a {d + n_theta}-component base tangent")
    return BaseTangent(lie.algebra_from_flat(kind, arr[:d]),
                       arr[d:].copy())


def base_frame(kind: str, n_theta: int) -> list:
    dim = lie.algebra_dim(kind) + n_theta
    return [base_tangent_from_flat(kind, n_theta, row)
            for row in np.eye(dim)]


def move(q: Configuration, v: BaseTangent, t: float) -> Configuration:
    """Flow q for time t along the frozen-body-components direction v."""
    xi = lie.algebra_from_flat(q.kind, t * v.xi.flat())
    return Configuration(lie.compose(q.g, lie.exp_group(xi)),
                         q.theta + t * v.d_theta)


@dataclass(frozen=True)
class OneFormSection:
    """Assignment of momenta over configurations.

    value(q) must cover q exactly (same group element and angles).
    jacobian, when given, maps (q, base tangent) to the derivative of
    the stacked fiber components (momentum flat followed by l) along
    that direction and replaces finite differences.
    """

    value: Callable[[Configuration], PhasePoint]
    kind: str
    rotor_count: int
    jacobian: Callable | None = None
    family: str = "custom"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown section family {self.family!r}")
        if self.kind not in (lie.SO3, lie.SE3):
            raise ValueError(f"unknown group kind {self.kind!r}")
        if self.rotor_count < 0:
            raise ValueError("rotor_count must be non-negative")


def section_point(gamma: OneFormSection, q: Configuration) -> PhasePoint:
    pt = gamma.value(q)
    if pt.kind != q.kind or not (np.array_equal(pt.g.rot, q.g.rot)
                                 and (q.kind == lie.SO3
                                      or np.array_equal(pt.g.trans,
                                                        q.g.trans))
                                 and np.array_equal(pt.theta, q.theta)):
        raise ValueError("section value does not cover its configuration")
    return pt


def fiber_flat(gamma: OneFormSection, q: Configuration) -> np.ndarray:
    pt = section_point(gamma, q)
    return np.concatenate([pt.p.flat(), pt.l])


def fiber_derivative(gamma: OneFormSection, q: Configuration,
                     v: BaseTangent, step: float = FD_STEP) -> np.ndarray:
    """Derivative of the stacked fiber components along v."""
    if gamma.jacobian is not None:
        return np.asarray(gamma.jacobian(q, v), dtype=float)
    speed = v.norm()
    if speed == 0.0:
        return np.zeros(lie.algebra_dim(gamma.kind) + gamma.rotor_count)
    unit = base_tangent_from_flat(gamma.kind, v.d_theta.size,
                                  v.flat() / speed)
    plus = fiber_flat(gamma, move(q, unit, step))
    minus = fiber_flat(gamma, move(q, unit, -step))
    return speed * (plus - minus) / (2.0 * step)


# ---------------------------------------------------------------------------
# section families
# ---------------------------------------------------------------------------

def constant_body_section(nu0, l0=()) -> OneFormSection:
    """Section with fixed body momentum nu0 and rotor momenta l0."""
    l0 = np.atleast_1d(np.asarray(l0, dtype=float)) if np.size(l0) \
        else np.zeros(0)
    dim = lie.algebra_dim(nu0.kind) + l0.size

    def value(q: Configuration) -> PhasePoint:
        return PhasePoint(q.g, nu0, q.theta, l0.copy())

    return OneFormSection(value, nu0.kind, l0.size,
                          jacobian=lambda q, v: np.zeros(dim),
                          family="constant_body")


def zero_section(kind: str, rotor_count: int = 0) -> OneFormSection:
    if kind == lie.SO3:
        nu0 = lie.coalgebra(lie.SO3, np.zeros(3))
    else:
        nu0 = lie.coalgebra(lie.SE3, np.zeros(3), np.zeros(3))
    return constant_body_section(nu0, np.zeros(rotor_count))


def exact_section(kind: str, rotor_count: int,
                  grad_w: Callable[[Configuration], np.ndarray],
                  jacobian: Callable | None = None) -> OneFormSection:
    """Differential of a scalar on the base: grad_w(q) returns the
    stacked frame components (body derivatives, then angle partials)."""
    d = lie.algebra_dim(kind)

    def value(q: Configuration) -> PhasePoint:
        comp = np.asarray(grad_w(q), dtype=float)
        if comp.shape != (d + rotor_count,):
            raise ValueError("grad_w returned the wrong number of "
                             "components")
        return PhasePoint(q.g, lie.coalgebra_from_flat(kind, comp[:d]),
                          q.theta, comp[d:])

    return OneFormSection(value, kind, rotor_count, jacobian=jacobian,
                          family="exact_dW")


def rotor_quadratic_section(kind: str = lie.SO3,
                            offset=(3.0, 0.0, 0.0)) -> OneFormSection:
    """Exact section of the scalar |theta|^2 / 2 + offset . theta: zero
    body momentum and l = theta + offset."""
    offset = np.asarray(offset, dtype=float)
    k = offset.size
    d = lie.algebra_dim(kind)

    def grad_w(q: Configuration) -> np.ndarray:
        return np.concatenate([np.zeros(d), q.theta + offset])

    def jacobian(q: Configuration, v: BaseTangent) -> np.ndarray:
        return np.concatenate([np.zeros(d), v.d_theta])

    return exact_section(kind, k, grad_w, jacobian=jacobian)


def affine_rotor_section(nu0, l0, coupling) -> OneFormSection:
    """Constant body momentum with rotor momenta affine in the angles:
    l(theta) = l0 + C theta.

    In the trivialized frame the only nonzero derivative block is C, so
    the section is closed exactly when C is symmetric; an asymmetric C
    plants a known closedness defect of max |C - C^T|.
    """
    l0 = np.atleast_1d(np.asarray(l0, dtype=float)) if np.size(l0) \
        else np.zeros(0)
    k = l0.size
    coupling = np.asarray(coupling, dtype=float).reshape(k, k)
    d = lie.algebra_dim(nu0.kind)

    def value(q: Configuration) -> PhasePoint:
        return PhasePoint(q.g, nu0, q.theta, l0 + coupling @ q.theta)

    def jacobian(q: Configuration, v: BaseTangent) -> np.ndarray:
        return np.concatenate([np.zeros(d), coupling @ v.d_theta])

    return OneFormSection(value, nu0.kind, k, jacobian=jacobian,
                          family="custom")


def shear_section(kind: str, rotor_count: int) -> OneFormSection:
    """Deliberately non-closed section: l_2 = theta_1, so its exterior
    derivative carries a unit d theta_1 ^ d theta_2 coefficient. A
    negative control for the closedness test."""
    if rotor_count < 2:
        raise ValueError("shear_section needs at least two rotor slots")
    d = lie.algebra_dim(kind)

    def value(q: Configuration) -> PhasePoint:
        l = np.zeros(rotor_count)
        l[1] = q.theta[0]
        return PhasePoint(q.g, lie.coalgebra_from_flat(kind, np.zeros(d)),
                          q.theta, l)

    return OneFormSection(value, kind, rotor_count, family="custom")


def spatial_section(mu, rotor_count: int = 0, l0=()) -> OneFormSection:
    """Section with constant spatial momentum mu; its body components
    rotate with the configuration, so it is not closed in the body
    frame and probe gates reject it for nonzero mu."""
    l0 = np.atleast_1d(np.asarray(l0, dtype=float)) if np.size(l0) \
        else np.zeros(rotor_count)

    def value(q: Configuration) -> PhasePoint:
        return PhasePoint(q.g, lie.Ad_star(lie.inverse(q.g), mu), q.theta,
                          l0.copy())

    return OneFormSection(value, mu.kind, rotor_count, family="custom")


# ---------------------------------------------------------------------------
# closedness and the pullback identity
# ---------------------------------------------------------------------------

def _default_samples(gamma: OneFormSection, n_samples: int,
                     seed: int) -> list:
    rng = np.random.default_rng(seed)
    return [random_configuration(rng, gamma.kind, gamma.rotor_count)
            for _ in range(n_samples)]


def _frame_partials(gamma: OneFormSection, q: Configuration) -> np.ndarray:
    """Matrix D with D[i] = derivative of the fiber components along
    frame direction i."""
    frame = base_frame(gamma.kind, gamma.rotor_count)
    return np.stack([fiber_derivative(gamma, q, e) for e in frame])


def exterior_derivative_matrix(gamma: OneFormSection,
                               q: Configuration) -> np.ndarray:
    """Antisymmetric matrix of d gamma on frame pairs at q, computed
    from central differences of the frame components."""
    partials = _frame_partials(gamma, q)
    return partials - partials.T


def closedness_defect(gamma: OneFormSection, n_samples: int = 20,
                      seed: int = 0, samples=None) -> float:
    """Max |d gamma(e_i, e_j)| over sampled configurations and frame
    pairs. Exact sections stay at finite-difference noise; the shear
    section reports its unit coefficient."""
    configs = samples if samples is not None else \
        _default_samples(gamma, n_samples, seed)
    worst = 0.0
    for q in configs:
        worst = max(worst, float(np.max(np.abs(
            exterior_derivative_matrix(gamma, q)))))
    return worst


def _two_form(dp_v, dp_w, v: BaseTangent, w: BaseTangent,
              dl_v, dl_w) -> float:
    """Canonical two-form of the trivialization on the pushed pair."""
    term = float(dp_w @ v.xi.flat()) - float(dp_v @ w.xi.flat())
    return term + float(dl_w @ v.d_theta) - float(dl_v @ w.d_theta)


def pullback_identity_defect(gamma: OneFormSection, n_samples: int = 20,
                             seed: int = 0, samples=None) -> float:
    """Max defect of (pullback of the canonical two-form) = -(d gamma)
    on random unit tangent pairs.

    The left side pushes the pair through the section's tangent map and
    evaluates the two-form; the right side expands d gamma bilinearly
    from frame partials. The two sides difference the section at
    different points, so their agreement is a genuine two-path check.
    """
    configs = samples if samples is not None else \
        _default_samples(gamma, n_samples, seed)
    rng = np.random.default_rng(seed + 1)
    d = lie.algebra_dim(gamma.kind)
    dim = d + gamma.rotor_count
    worst = 0.0
    for q in configs:
        raw = rng.standard_normal((2, dim))
        v = base_tangent_from_flat(gamma.kind, gamma.rotor_count,
                                   raw[0] / np.linalg.norm(raw[0]))
        w = base_tangent_from_flat(gamma.kind, gamma.rotor_count,
                                   raw[1] / np.linalg.norm(raw[1]))
        dv = fiber_derivative(gamma, q, v)
        dw = fiber_derivative(gamma, q, w)
        lhs = _two_form(dv[:d], dw[:d], v, w, dv[d:], dw[d:])
        dmat = exterior_derivative_matrix(gamma, q)
        rhs = -float(v.flat() @ dmat @ w.flat())
        worst = max(worst, abs(lhs - rhs))
    return worst


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

def x_gamma(sys: RCHSystem, gamma: OneFormSection,
            q: Configuration) -> BaseTangent:
    """Base projection of the dynamical field evaluated on the section."""
    full = full_dynamical_field(sys, section_point(gamma, q))
    return BaseTangent(full.xi, full.body.d_theta)


def _require_membership(gamma: OneFormSection, q: Configuration, mu):
    j = momentum_map(section_point(gamma, q))
    defect = float(np.linalg.norm(j.flat() - mu.flat()))
    if defect > MEMBERSHIP_TOL:
        raise MembershipError("section image is off the momentum level set "
                              f"(defect {defect:.3e})")


def relatedness_residual(sys: RCHSystem, gamma: OneFormSection,
                         q: Configuration, mu=None) -> float:
    """How far the section fails to intertwine its base field with the
    phase-space field: full-space flavor when mu is None, reduced-space
    flavor (with level-set membership enforced) otherwise."""
    pt = section_point(gamma, q)
    x = x_gamma(sys, gamma, q)
    d_fiber = fiber_derivative(gamma, q, x)
    dim = lie.algebra_dim(gamma.kind)
    if mu is None:
        body = full_dynamical_field(sys, pt).body
        field_fiber = np.concatenate([
            body.d_pi if gamma.kind == lie.SO3
            else np.concatenate([body.d_pi, body.d_gamma]), body.d_l])
        return float(np.linalg.norm(d_fiber - field_fiber))
    _require_membership(gamma, q, mu)
    red = as_reduced(pt)
    field = dynamical_field(sys, red)
    pushed = np.concatenate([d_fiber[:dim], x.d_theta, d_fiber[dim:]])
    return float(np.linalg.norm(pushed - field.flat()))


def hj_residual_components(sys: RCHSystem, gamma: OneFormSection,
                           q: Configuration, mu=None) -> np.ndarray:
    """Componentwise Hamilton-Jacobi left-hand side at the section.

    Reduced flavor: the controlled reduced field at the section's image;
    its entries match the explicit equation assemblies of
    :mod:`gyrostat.systems` up to their constant row scales. Full
    flavor: minus the base differential of (hamiltonian restricted to
    the section) plus the fiber components of force and control.
    """
    pt = section_point(gamma, q)
    if mu is not None:
        _require_membership(gamma, q, mu)
        return dynamical_field(sys, as_reduced(pt)).flat()
    red = as_reduced(pt)
    shift = dynamical_field(sys, red) + (-hamiltonian_field(
        sys.hamiltonian, red))
    fiber_shift = np.concatenate([
        shift.d_pi if gamma.kind == lie.SO3
        else np.concatenate([shift.d_pi, shift.d_gamma]), shift.d_l])

    def restricted(cfg: Configuration) -> float:
        return sys.hamiltonian.eval(as_reduced(section_point(gamma, cfg)))

    frame = base_frame(gamma.kind, gamma.rotor_count)
    d_h = np.array([
        (restricted(move(q, e, FD_STEP)) - restricted(move(q, e, -FD_STEP)))
        / (2.0 * FD_STEP) for e in frame])
    return -d_h + fiber_shift


def hj_residual(sys: RCHSystem, gamma: OneFormSection, q: Configuration,
                mu=None) -> float:
    return float(np.linalg.norm(hj_residual_components(sys, gamma, q, mu)))


# ---------------------------------------------------------------------------
# the equivalence probe and reporting
# ---------------------------------------------------------------------------

PASS_TOL = 1e-6
FAIL_FLOOR = 1e-3


@dataclass(frozen=True)
class ProbeSample:
    relatedness: float
    hj: float
    x_norm: float
    label: str


@dataclass(frozen=True)
class ProbeResult:
    samples: tuple
    gate_defect: float

    @property
    def verdict(self) -> str:
        labels = {s.label for s in self.samples}
        if labels == {"PASS"}:
            return "PASS"
        if labels == {"FAIL"}:
            return "FAIL"
        if "INCONSISTENT" in labels:
            return "INCONSISTENT"
        return "MIXED"


def _classify(relatedness: float, hj: float) -> str:
    if relatedness <= PASS_TOL and hj <= PASS_TOL:
        return "PASS"
    if relatedness >= FAIL_FLOOR and hj >= FAIL_FLOOR:
        return "FAIL"
    return "INCONSISTENT"


def theorem_equivalence_probe(sys: RCHSystem, gamma: OneFormSection,
                              samples: Sequence[Configuration],
                              mu=None) -> ProbeResult:
    """Evaluate the two residuals side by side on each sample.

    The two residual notions are equivalent in exact arithmetic, so
    every sample must land PASS (both below 1e-6) or FAIL (both above
    1e-3); a sample with one small and one large residual is reported
    INCONSISTENT. Sections failing the closedness prerequisite are
    rejected with :class:`GateRejection`.
    """
    if not samples:
        raise ValueError("probe needs at least one sample configuration")
    gate = closedness_defect(gamma, samples=samples)
    if gate > GATE_TOL:
        raise GateRejection("section fails the closedness gate "
                            f"(defect {gate:.3e} > {GATE_TOL:g})")
    rows = []
    for q in samples:
        r = relatedness_residual(sys, gamma, q, mu)
        h = hj_residual(sys, gamma, q, mu)
        rows.append(ProbeSample(r, h, x_gamma(sys, gamma, q).norm(),
                                _classify(r, h)))
    return ProbeResult(tuple(rows), gate)


@dataclass(frozen=True)
class ResidualReport:
    """Aggregate of the three defect measures over a sample set."""

    closedness_defect: float
    relatedness_residual: float
    hj_residual: float
    sample_count: int
    worst_relatedness_index: int
    worst_hj_index: int

    def __post_init__(self):
        values = (self.closedness_defect, self.relatedness_residual,
                  self.hj_residual)
        if not all(np.isfinite(v) and v >= 0 for v in values):
            raise ValueError("residuals must be non-negative and finite")
        if self.sample_count < 1:
            raise ValueError("report needs at least one sample")


def residual_report(sys: RCHSystem, gamma: OneFormSection,
                    samples: Sequence[Configuration],
                    mu=None) -> ResidualReport:
    rel = [relatedness_residual(sys, gamma, q, mu) for q in samples]
    hj = [hj_residual(sys, gamma, q, mu) for q in samples]
    return ResidualReport(closedness_defect(gamma, samples=samples),
                          max(rel), max(hj), len(samples),
                          int(np.argmax(rel)), int(np.argmax(hj)))
