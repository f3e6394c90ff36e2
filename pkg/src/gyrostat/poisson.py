"""Poisson brackets and Hamiltonian vector fields on reduced spaces.

The reduced phase spaces handled here are products of a dual Lie algebra
(so(3)* or se(3)*, carrying the Lie-Poisson structure) with a canonical
rotor factor V x V* of angle/momentum pairs. Points are
:class:`ReducedPoint`; scalar observables are :class:`ScalarField`
values whose gradients are either supplied analytically or taken by
central finite differences.

The minus bracket is the default everywhere because it is the one under
which the body-frame equations take their usual form
(pi_dot = pi x grad_pi h and, on se(3)*, the advected vector equation
gamma_dot = gamma x grad_pi h). The plus sign is available throughout
and in the orbit two-form evaluator :func:`kks_form`.

A reduced point may also carry rotor momenta without conjugate angles
(``theta`` empty while ``l`` is not). In that case the rotor factor is
Poisson-trivial: the canonical part of the bracket is empty and the
momenta are constants of motion of every Hamiltonian flow.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from . import lie
from .lie import SE3, SO3, AlgebraVector, CoalgebraVector

FD_STEP = 1e-6


def _vec(x, name: str) -> np.ndarray:
    a = np.atleast_1d(np.asarray(x, dtype=float))
    if a.ndim != 1:
        raise ValueError(f"{name} must be a 1-d array, got shape {a.shape}")
    return a


@dataclass(frozen=True)
class ReducedPoint:
    """Point (nu, theta, l) of O_mu x V x V* in body coordinates."""

    nu: CoalgebraVector
    theta: np.ndarray
    l: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "theta", _vec(self.theta, "theta"))
        object.__setattr__(self, "l", _vec(self.l, "l"))
        if not (np.all(np.isfinite(self.nu.flat()))
                and np.all(np.isfinite(self.theta))
                and np.all(np.isfinite(self.l))):
            raise ValueError("reduced point has non-finite components")

    @property
    def kind(self) -> str:
        return self.nu.kind

    @property
    def n_theta(self) -> int:
        return self.theta.size

    @property
    def n_l(self) -> int:
        return self.l.size

    def flat(self) -> np.ndarray:
        """Layout: pi(3) [, gamma(3)], theta, l."""
        return np.concatenate([self.nu.flat(), self.theta, self.l])


def reduced_point(kind: str, pi, gamma=None, theta=(), l=()) -> ReducedPoint:
    return ReducedPoint(lie.coalgebra(kind, pi, gamma), np.asarray(theta, float),
                        np.asarray(l, float))


def point_like(p: ReducedPoint, arr) -> ReducedPoint:
    """Rebuild a point with p's kind and slot sizes from a flat array."""
    arr = np.asarray(arr, dtype=float)
    nc = 3 if p.kind == SO3 else 6
    nu = lie.coalgebra_from_flat(p.kind, arr[:nc])
    return ReducedPoint(nu, arr[nc:nc + p.n_theta], arr[nc + p.n_theta:])


@dataclass(frozen=True)
class ReducedTangent:
    """Tangent (or, via the dot pairing, gradient) components at a
    reduced point: the layout mirrors :class:`ReducedPoint`."""

    d_pi: np.ndarray
    d_gamma: np.ndarray | None
    d_theta: np.ndarray
    d_l: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "d_pi", _vec(self.d_pi, "d_pi"))
        if self.d_gamma is not None:
            object.__setattr__(self, "d_gamma", _vec(self.d_gamma, "d_gamma"))
        object.__setattr__(self, "d_theta", _vec(self.d_theta, "d_theta"))
        object.__setattr__(self, "d_l", _vec(self.d_l, "d_l"))

    def flat(self) -> np.ndarray:
        parts = [self.d_pi]
        if self.d_gamma is not None:
            parts.append(self.d_gamma)
        parts.extend([self.d_theta, self.d_l])
        return np.concatenate(parts)

    def norm(self) -> float:
        return float(np.linalg.norm(self.flat()))

    def __add__(self, other: "ReducedTangent") -> "ReducedTangent":
        dg = None if self.d_gamma is None else self.d_gamma + other.d_gamma
        return ReducedTangent(self.d_pi + other.d_pi, dg,
                              self.d_theta + other.d_theta, self.d_l + other.d_l)

    def __neg__(self) -> "ReducedTangent":
        return self.scale(-1.0)

    def scale(self, s: float) -> "ReducedTangent":
        dg = None if self.d_gamma is None else s * self.d_gamma
        return ReducedTangent(s * self.d_pi, dg, s * self.d_theta, s * self.d_l)


def tangent_like(p: ReducedPoint, arr) -> ReducedTangent:
    arr = np.asarray(arr, dtype=float)
    if p.kind == SO3:
        nc, dg = 3, None
    else:
        nc, dg = 6, arr[3:6]
    return ReducedTangent(arr[:3], dg, arr[nc:nc + p.n_theta], arr[nc + p.n_theta:])


def zero_tangent(p: ReducedPoint) -> ReducedTangent:
    return tangent_like(p, np.zeros(p.flat().size))


@dataclass(frozen=True)
class ScalarField:
    """Observable on reduced points.

    eval maps a ReducedPoint to a float. grad, when given, returns the
    gradient in tangent layout and must agree with central finite
    differences to 1e-5 relative (see :func:`validate_gradient`).
    eval_batch, when given, evaluates a (n, dim) array of flat states in
    one call and must match eval row by row; it exists purely to make
    finite differencing cheap.
    """

    eval: Callable[[ReducedPoint], float]
    grad: Callable[[ReducedPoint], ReducedTangent] | None = None
    eval_batch: Callable[[np.ndarray], np.ndarray] | None = None


def without_gradient(field: ScalarField) -> ScalarField:
    """Copy of a field with the analytic gradient dropped, so that all
    derivative evaluations go through finite differences."""
    return replace(field, grad=None)


def fd_gradient(field: ScalarField, p: ReducedPoint,
                step: float = FD_STEP) -> ReducedTangent:
    """Central finite-difference gradient, step ``step * max(1, |x_i|)``
    per coordinate (default step 1e-6)."""
    x = p.flat()
    n = x.size
    h = step * np.maximum(1.0, np.abs(x))
    if field.eval_batch is not None:
        pts = np.repeat(x[None, :], 2 * n, axis=0)
        idx = np.arange(n)
        pts[2 * idx, idx] += h
        pts[2 * idx + 1, idx] -= h
        vals = np.asarray(field.eval_batch(pts), dtype=float)
        g = (vals[0::2] - vals[1::2]) / (2.0 * h)
    else:
        g = np.empty(n)
        for i in range(n):
            xp = x.copy()
            xm = x.copy()
            xp[i] += h[i]
            xm[i] -= h[i]
            g[i] = (field.eval(point_like(p, xp))
                    - field.eval(point_like(p, xm))) / (2.0 * h[i])
    return tangent_like(p, g)


def gradient(field: ScalarField, p: ReducedPoint) -> ReducedTangent:
    if field.grad is not None:
        return field.grad(p)
    return fd_gradient(field, p)


def validate_gradient(field: ScalarField, p: ReducedPoint) -> float:
    """Relative deviation between the supplied gradient and finite
    differences (0 when no analytic gradient is present)."""
    if field.grad is None:
        return 0.0
    ana = field.grad(p).flat()
    num = fd_gradient(field, p).flat()
    scale = max(1.0, float(np.max(np.abs(ana))), float(np.max(np.abs(num))))
    return float(np.max(np.abs(ana - num))) / scale


_SIGNS = {"+": 1.0, "-": -1.0, 1: 1.0, -1: -1.0, 1.0: 1.0, -1.0: -1.0}


def _sign_value(sign) -> float:
    try:
        return _SIGNS[sign]
    except (KeyError, TypeError):
        raise ValueError(f"sign must be '+' or '-', got {sign!r}") from None


def _algebra_part(p: ReducedPoint, g: ReducedTangent) -> AlgebraVector:
    if p.kind == SO3:
        return AlgebraVector(SO3, g.d_pi)
    return AlgebraVector(SE3, g.d_pi, g.d_gamma)


def _require_finite(g: ReducedTangent):
    if not np.all(np.isfinite(g.flat())):
        raise ValueError("non-finite gradient")


def _lp_term(nu: CoalgebraVector, df: AlgebraVector, dk: AlgebraVector,
             sign: float) -> float:
    return sign * lie.pairing(nu, lie.bracket(df, dk))


def lie_poisson_bracket(f: ScalarField, k: ScalarField, nu: CoalgebraVector,
                        sign="-") -> float:
    """(+/-)-Lie-Poisson bracket: +/- < nu, [df/dnu, dk/dnu] >."""
    s = _sign_value(sign)
    p = ReducedPoint(nu, np.zeros(0), np.zeros(0))
    gf, gk = gradient(f, p), gradient(k, p)
    _require_finite(gf)
    _require_finite(gk)
    return _lp_term(nu, _algebra_part(p, gf), _algebra_part(p, gk), s)


def product_bracket(f: ScalarField, k: ScalarField, p: ReducedPoint,
                    sign="-") -> float:
    """Bracket on g* x V x V*: the Lie-Poisson part plus the canonical
    rotor part sum_i (dF/dtheta_i dK/dl_i - dK/dtheta_i dF/dl_i).

    The canonical part requires theta and l slots of equal size; with an
    empty theta slot the rotor momenta sit in a Poisson-trivial factor
    and only the Lie-Poisson part remains.
    """
    s = _sign_value(sign)
    gf, gk = gradient(f, p), gradient(k, p)
    _require_finite(gf)
    _require_finite(gk)
    out = _lp_term(p.nu, _algebra_part(p, gf), _algebra_part(p, gk), s)
    if p.n_theta == p.n_l and p.n_theta > 0:
        out += float(gf.d_theta @ gk.d_l - gk.d_theta @ gf.d_l)
    return out


def bracket_field(f: ScalarField, k: ScalarField, sign="-") -> ScalarField:
    """The bracket {f, k} as a scalar field (for nested evaluations)."""
    return ScalarField(lambda p: product_bracket(f, k, p, sign))


def hamiltonian_field(h: ScalarField, p: ReducedPoint) -> ReducedTangent:
    """Minus-bracket Hamiltonian vector field in closed form.

    so(3)*:  pi_dot = pi x grad_pi h
    se(3)*:  pi_dot = pi x grad_pi h + gamma x grad_gamma h,
             gamma_dot = gamma x grad_pi h
    rotors:  theta_dot = grad_l h, l_dot = -grad_theta h (canonical
             pairs only; an unpaired momentum slot is constant)

    Every component equals the minus bracket of its coordinate function
    with h, which the tests verify against :func:`product_bracket`.
    """
    g = gradient(h, p)
    _require_finite(g)
    if p.kind == SO3:
        d_pi = np.cross(p.nu.pi, g.d_pi)
        d_gamma = None
    else:
        d_pi = np.cross(p.nu.pi, g.d_pi) + np.cross(p.nu.gamma, g.d_gamma)
        d_gamma = np.cross(p.nu.gamma, g.d_pi)
    if p.n_theta == p.n_l and p.n_theta > 0:
        d_theta = g.d_l.copy()
        d_l = -g.d_theta
    else:
        d_theta = np.zeros(p.n_theta)
        d_l = np.zeros(p.n_l)
    return ReducedTangent(d_pi, d_gamma, d_theta, d_l)


def kks_form(nu: CoalgebraVector, xi: AlgebraVector, eta: AlgebraVector,
             sign="-") -> float:
    """Orbit symplectic form +/- < nu, [xi, eta] > evaluated on the
    orbit tangent pair (ad*_xi nu, ad*_eta nu)."""
    s = _sign_value(sign)
    if xi.kind != eta.kind or xi.kind != nu.kind:
        raise ValueError("kind mismatch in kks_form")
    return s * lie.pairing(nu, lie.bracket(xi, eta))


def casimirs(p: ReducedPoint) -> list[tuple[str, float]]:
    """Casimir values of the Lie-Poisson factor at p.

    so(3)*: |pi|^2. se(3)*: pi . gamma and |gamma|^2. Each returned
    function Poisson-commutes with every observable.
    """
    return [(name, f.eval(p)) for name, f in casimir_fields(p.kind)]


def casimir_fields(kind: str) -> list[tuple[str, ScalarField]]:
    """Casimirs as scalar fields with analytic gradients."""
    if kind == SO3:
        def pi_sq(p):
            return float(p.nu.pi @ p.nu.pi)

        def pi_sq_grad(p):
            return ReducedTangent(2.0 * p.nu.pi, None,
                                  np.zeros(p.n_theta), np.zeros(p.n_l))

        return [("pi_sq", ScalarField(pi_sq, pi_sq_grad))]

    def pi_dot_gamma(p):
        return float(p.nu.pi @ p.nu.gamma)

    def pi_dot_gamma_grad(p):
        return ReducedTangent(p.nu.gamma.copy(), p.nu.pi.copy(),
                              np.zeros(p.n_theta), np.zeros(p.n_l))

    def gamma_sq(p):
        return float(p.nu.gamma @ p.nu.gamma)

    def gamma_sq_grad(p):
        return ReducedTangent(np.zeros(3), 2.0 * p.nu.gamma,
                              np.zeros(p.n_theta), np.zeros(p.n_l))

    return [("pi_dot_gamma", ScalarField(pi_dot_gamma, pi_dot_gamma_grad)),
            ("gamma_sq", ScalarField(gamma_sq, gamma_sq_grad))]


# ---------------------------------------------------------------------------
# polynomial test fields and the bracket axiom suite
# ---------------------------------------------------------------------------

def polynomial_field(c0: float, a: np.ndarray, b: np.ndarray,
                     cubic_idx: np.ndarray | None = None,
                     cubic_coef: np.ndarray | None = None) -> ScalarField:
    """c0 + a.x + x.B.x/2 plus optional sparse cubic terms, on the flat
    coordinate layout, with analytic gradient and batched evaluation."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    b = 0.5 * (b + b.T)
    idx = None if cubic_idx is None else np.asarray(cubic_idx, dtype=int)
    coef = None if cubic_coef is None else np.asarray(cubic_coef, dtype=float)

    def ev_flat(x):
        v = c0 + a @ x + 0.5 * (x @ b @ x)
        if idx is not None:
            v += float(coef @ (x[idx[:, 0]] * x[idx[:, 1]] * x[idx[:, 2]]))
        return float(v)

    def ev(p):
        return ev_flat(p.flat())

    def ev_batch(pts):
        v = c0 + pts @ a + 0.5 * np.einsum("ni,ij,nj->n", pts, b, pts)
        if idx is not None:
            v = v + (pts[:, idx[:, 0]] * pts[:, idx[:, 1]]
                     * pts[:, idx[:, 2]]) @ coef
        return v

    def gr(p):
        x = p.flat()
        g = a + b @ x
        if idx is not None:
            for (i, j, k), t in zip(idx, coef):
                g[i] += t * x[j] * x[k]
                g[j] += t * x[i] * x[k]
                g[k] += t * x[i] * x[j]
        return tangent_like(p, g)

    return ScalarField(ev, gr, ev_batch)


def random_polynomial_field(rng: np.random.Generator, dim: int,
                            cubic_terms: int = 2) -> ScalarField:
    """Random cubic polynomial with coefficients scaled so field values
    stay O(1) on standard-normal points. Keeping products of two such
    fields at O(1) keeps the rounding floor of their finite-difference
    gradients (roughly eps * |f| / step) below the Leibniz tolerance."""
    idx = rng.integers(0, dim, size=(cubic_terms, 3)) if cubic_terms else None
    coef = 0.1 * rng.standard_normal(cubic_terms) if cubic_terms else None
    return polynomial_field(0.3 * float(rng.standard_normal()),
                            (0.4 / np.sqrt(dim)) * rng.standard_normal(dim),
                            (0.6 / dim) * rng.standard_normal((dim, dim)),
                            idx, coef)


def field_product(f: ScalarField, g: ScalarField) -> ScalarField:
    """Pointwise product f*g (no analytic gradient, so bracketing the
    product exercises the finite-difference path)."""
    batch = None
    if f.eval_batch is not None and g.eval_batch is not None:
        def batch(pts):  # noqa: E731 - simple closure
            return np.asarray(f.eval_batch(pts)) * np.asarray(g.eval_batch(pts))
    return ScalarField(lambda p: f.eval(p) * g.eval(p), None, batch)


BRACKET_SPACES = {
    # bracket name -> (kind, n_theta, n_l)
    "so3_lie_poisson": (SO3, 0, 0),
    "so3_product": (SO3, 3, 3),
    "se3_product": (SE3, 2, 2),
}

# Step used when differentiating a bracket whose own evaluation already
# goes through finite differences. Such values carry ~1e-10 of rounding
# jitter, so the usual 1e-6 step would amplify that to ~1e-4; a step
# near the cube root of the jitter balances noise against truncation.
NESTED_FD_STEP = 5e-4


def _random_point(rng, kind: str, n_theta: int, n_l: int) -> ReducedPoint:
    return ReducedPoint(lie.random_coalgebra(rng, kind),
                        rng.standard_normal(n_theta), rng.standard_normal(n_l))


def _flat_machinery(name: str, inject_error: bool):
    """Vectorized minus-bracket evaluator and batched FD gradients on the
    flat coordinate layout of one named bracket space. Used by the axiom
    suite, where the nested differencing of the Jacobi sweep would be far
    too slow one point at a time."""
    kind, n_theta, n_l = BRACKET_SPACES[name]
    nc = 3 if kind == SO3 else 6
    paired = n_theta == n_l and n_l > 0

    def alg_br(w1, w2):
        om = np.cross(w1[:, :3], w2[:, :3])
        if inject_error:
            # antisymmetric corruption of the structure constants: it
            # breaks the Jacobi identity (and Casimir commutation) while
            # leaving antisymmetry intact, so a healthy implementation of
            # the suite must flag it (mutation check hook)
            om[:, 0] += 0.5 * (w1[:, 0] * w2[:, 1] - w1[:, 1] * w2[:, 0])
        if nc == 3:
            return om
        vel = np.cross(w1[:, :3], w2[:, 3:]) - np.cross(w2[:, :3], w1[:, 3:])
        return np.concatenate([om, vel], axis=1)

    def bk_vals(gf, gk, pts):
        val = -np.einsum("mi,mi->m", pts[:, :nc],
                         alg_br(gf[:, :nc], gk[:, :nc]))
        if paired:
            tf, lf = gf[:, nc:nc + n_theta], gf[:, nc + n_theta:]
            tk, lk = gk[:, nc:nc + n_theta], gk[:, nc + n_theta:]
            val = val + (np.einsum("mi,mi->m", tf, lk)
                         - np.einsum("mi,mi->m", tk, lf))
        return val

    def grads(eval_batch, pts, step):
        m, d = pts.shape
        h = step * np.maximum(1.0, np.abs(pts))
        per = np.repeat(pts[:, None, :], 2 * d, axis=1)
        i = np.arange(d)
        per[:, 2 * i, i] += h
        per[:, 2 * i + 1, i] -= h
        v = np.asarray(eval_batch(per.reshape(-1, d)),
                       dtype=float).reshape(m, 2 * d)
        return (v[:, 0::2] - v[:, 1::2]) / (2.0 * h)

    return bk_vals, grads


def bracket_axiom_suite(name: str, n_instances: int = 1000, seed: int = 0,
                        inject_error: bool = False) -> dict:
    """Seeded property sweep for one bracket: antisymmetry with analytic
    gradients, Leibniz and Jacobi with finite-difference gradients, and
    Casimir commutation. Returns max defects plus the worst sample index
    per axiom. ``inject_error`` corrupts the structure constants so that
    the Jacobi sweep must fail (mutation check hook).
    """
    kind, n_theta, n_l = BRACKET_SPACES[name]
    nc = 3 if kind == SO3 else 6
    dim = nc + n_theta + n_l
    rng = np.random.default_rng(seed)
    bk_vals, grads = _flat_machinery(name, inject_error)

    def leibniz_defect(f, g, k, x):
        x1 = x[None, :]
        gfg = grads(lambda pts: (np.asarray(f.eval_batch(pts))
                                 * np.asarray(g.eval_batch(pts))), x1, FD_STEP)
        gf = grads(f.eval_batch, x1, FD_STEP)
        gg = grads(g.eval_batch, x1, FD_STEP)
        gk = grads(k.eval_batch, x1, FD_STEP)
        lhs = bk_vals(gfg, gk, x1)[0]
        rhs = (f.eval_batch(x1)[0] * bk_vals(gg, gk, x1)[0]
               + g.eval_batch(x1)[0] * bk_vals(gf, gk, x1)[0])
        return abs(lhs - rhs)

    def jacobi_defect(f, g, k, x):
        x1 = x[None, :]
        d = x.size
        total = 0.0
        for a, b, c in ((f, g, k), (g, k, f), (k, f, g)):
            # outer differencing of the FD-evaluated bracket {A, B} uses
            # the wider NESTED_FD_STEP; see the note on that constant
            h = NESTED_FD_STEP * np.maximum(1.0, np.abs(x))
            per = np.repeat(x1, 2 * d, axis=0)
            i = np.arange(d)
            per[2 * i, i] += h
            per[2 * i + 1, i] -= h
            vals = bk_vals(grads(a.eval_batch, per, FD_STEP),
                           grads(b.eval_batch, per, FD_STEP), per)
            gab = (vals[0::2] - vals[1::2]) / (2.0 * h)
            gc = grads(c.eval_batch, x1, FD_STEP)
            total += bk_vals(gab[None, :], gc, x1)[0]
        return abs(total)

    worst = {"antisymmetry": (0.0, -1), "leibniz": (0.0, -1),
             "jacobi": (0.0, -1), "casimir": (0.0, -1)}

    def track(key, value, i):
        if value > worst[key][0]:
            worst[key] = (value, i)

    cas = casimir_fields(kind)
    for i in range(n_instances):
        p = _random_point(rng, kind, n_theta, n_l)
        f = random_polynomial_field(rng, dim)
        g = random_polynomial_field(rng, dim)
        k = random_polynomial_field(rng, dim)
        x = p.flat()
        x1 = x[None, :]

        # antisymmetry and Casimir commutation use the analytic gradients
        gf = f.grad(p).flat()[None, :]
        gk = k.grad(p).flat()[None, :]
        track("antisymmetry",
              abs(bk_vals(gf, gk, x1)[0] + bk_vals(gk, gf, x1)[0]), i)
        track("leibniz", leibniz_defect(f, g, k, x), i)
        track("jacobi", jacobi_defect(f, g, k, x), i)
        for _, c in cas:
            gc = c.grad(p).flat()[None, :]
            track("casimir", abs(bk_vals(gc, gk, x1)[0]), i)

    return {
        "bracket": name,
        "instances": n_instances,
        "seed": seed,
        "max_antisymmetry": worst["antisymmetry"][0],
        "max_leibniz": worst["leibniz"][0],
        "max_jacobi": worst["jacobi"][0],
        "max_casimir": worst["casimir"][0],
        "worst_antisymmetry_sample": worst["antisymmetry"][1],
        "worst_leibniz_sample": worst["leibniz"][1],
        "worst_jacobi_sample": worst["jacobi"][1],
        "worst_casimir_sample": worst["casimir"][1],
    }


AXIOM_BOUNDS = {"max_antisymmetry": 1e-12, "max_leibniz": 1e-8,
                "max_jacobi": 2e-5, "max_casimir": 1e-8}


def axiom_suite_passes(report: dict) -> bool:
    return all(report[key] <= bound for key, bound in AXIOM_BOUNDS.items())
