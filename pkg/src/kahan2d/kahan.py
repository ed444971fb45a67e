"""Kahan's linearly-implicit discretization of planar quadratic fields.

For a quadratic field f the update p -> p' is defined by the polarized
relation

    (p' - p)/h = Qbar(p, p') + (1/2) B (p + p') + c,

where Qbar is the symmetric bilinear form of the quadratic part.  Because
the relation is linear in p', the step has the closed form

    p' = p + h (I - (h/2) J_f(p))^{-1} f(p),

computed here by an explicit 2x2 Cramer solve.  The map is birational and
time symmetric: the inverse step is the step with h negated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import (
    EvaluationOverflow,
    NoConvergence,
    PoleOfModifiedHamiltonian,
    SingularJacobian,
    SingularStep,
)
from .systems import SystemSpec
from .vectorfield import Mat2, Point2, QuadraticField2


@dataclass(frozen=True, slots=True)
class StepConfig:
    """Step size and the singularity threshold for the 2x2 solve."""

    h: float
    det_tol: float = 1e-12

    def __post_init__(self) -> None:
        object.__setattr__(self, "h", float(self.h))
        object.__setattr__(self, "det_tol", float(self.det_tol))
        if not math.isfinite(self.h):
            raise ValueError(f"step size must be finite, got {self.h}")
        if not (self.det_tol > 0.0):
            raise ValueError(f"det_tol must be positive, got {self.det_tol}")


@dataclass(frozen=True, slots=True)
class TrajectoryRecord:
    """One orbit sample: step index, time, state, and optional invariants."""

    n: int
    t: float
    p: Point2
    H: float | None = None
    Htilde: float | None = None


@dataclass(frozen=True)
class Trajectory:
    """An orbit of the discrete map, possibly truncated at a singularity."""

    records: tuple[TrajectoryRecord, ...]
    terminated_early: bool = False
    termination_reason: str | None = None

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self):
        return iter(self.records)

    @property
    def endpoint(self) -> Point2:
        return self.records[-1].p


def _update_matrix(field: QuadraticField2, h: float, p: Point2) -> Mat2:
    """The matrix I - (h/2) J_f(p) of the linearly-implicit solve."""
    j = field.jacobian(p)
    return Mat2(
        1.0 - 0.5 * h * j.m11,
        -0.5 * h * j.m12,
        -0.5 * h * j.m21,
        1.0 - 0.5 * h * j.m22,
    )


def step(field: QuadraticField2, cfg: StepConfig, p: Point2) -> Point2:
    """One Kahan step from p.

    Raises:
        SingularStep: |det(I - (h/2) J_f(p))| < cfg.det_tol; the map has a
            pole at p for this step size.
        EvaluationOverflow: the update produced non-finite coordinates.
    """
    m = _update_matrix(field, cfg.h, p)
    det = m.det()
    if abs(det) < cfg.det_tol:
        raise SingularStep(
            f"update determinant {det} below tolerance {cfg.det_tol} "
            f"at ({p.x}, {p.y}) with h={cfg.h}"
        )
    fx, fy = field.eval(p)
    sx = (m.m22 * fx - m.m12 * fy) / det
    sy = (-m.m21 * fx + m.m11 * fy) / det
    return Point2(p.x + cfg.h * sx, p.y + cfg.h * sy)


def inverse_step(field: QuadraticField2, cfg: StepConfig, p: Point2) -> Point2:
    """The inverse map: identical to :func:`step` with h negated."""
    return step(field, replace(cfg, h=-cfg.h), p)


def step_jacobian(field: QuadraticField2, cfg: StepConfig, p: Point2) -> Mat2:
    """Derivative of the step map at p.

    Differentiating the implicit update relation gives

        DPhi(p) = (I - (h/2) J_f(p))^{-1} (I + (h/2) J_f(p')),

    so det DPhi = det(I + (h/2) J_f(p')) / det(I - (h/2) J_f(p)).

    Raises:
        SingularStep: propagated from the underlying step.
        SingularJacobian: |det(I + (h/2) J_f(p'))| < cfg.det_tol, i.e. the
            map derivative is numerically singular (the inverse map has a
            pole at the step target p').
    """
    p_next = step(field, cfg, p)
    h = cfg.h
    jn = field.jacobian(p_next)
    plus = Mat2(
        1.0 + 0.5 * h * jn.m11,
        0.5 * h * jn.m12,
        0.5 * h * jn.m21,
        1.0 + 0.5 * h * jn.m22,
    )
    if abs(plus.det()) < cfg.det_tol:
        raise SingularJacobian(
            f"map Jacobian determinant factor {plus.det()} below tolerance "
            f"{cfg.det_tol} at step target ({p_next.x}, {p_next.y})"
        )
    minus = _update_matrix(field, h, p)
    return minus.inverse(cfg.det_tol) @ plus


def step_jacobian_det(field: QuadraticField2, cfg: StepConfig, p: Point2) -> float:
    """det DPhi(p), computed canonically as the two-determinant ratio.

    Same value as ``step_jacobian(...).det()`` up to a few ulp of
    summation-order noise; this route is the one the measure-preservation
    check uses.
    """
    p_next = step(field, cfg, p)
    h = cfg.h
    jn = field.jacobian(p_next)
    plus = Mat2(
        1.0 + 0.5 * h * jn.m11,
        0.5 * h * jn.m12,
        0.5 * h * jn.m21,
        1.0 + 0.5 * h * jn.m22,
    )
    if abs(plus.det()) < cfg.det_tol:
        raise SingularJacobian(
            f"map Jacobian determinant factor {plus.det()} below tolerance "
            f"{cfg.det_tol} at step target ({p_next.x}, {p_next.y})"
        )
    return plus.det() / _update_matrix(field, h, p).det()


def orbit(
    field: QuadraticField2,
    cfg: StepConfig,
    p0: Point2,
    n_steps: int,
    system: SystemSpec | None = None,
    pole_tol: float = 1e-12,
) -> Trajectory:
    """Iterate the step map, recording (n, t, state) and optional invariants.

    When a system is supplied, the H and Htilde columns are filled from its
    Hamiltonian and modified Hamiltonian (nan where an evaluation hits a pole
    or overflows).  A singular step or overflow truncates the orbit and sets
    ``terminated_early`` with the reason; no exception escapes.
    """
    if n_steps < 0:
        raise ValueError(f"n_steps must be >= 0, got {n_steps}")

    def invariants(p: Point2) -> tuple[float | None, float | None]:
        if system is None:
            return (None, None)
        try:
            hval = system.hamiltonian(p)
        except EvaluationOverflow:
            hval = math.nan
        try:
            htval = system.modified_hamiltonian(cfg.h, p, pole_tol=pole_tol)
        except (PoleOfModifiedHamiltonian, EvaluationOverflow):
            htval = math.nan
        return (hval, htval)

    records = []
    p = p0
    records.append(TrajectoryRecord(0, 0.0, p, *invariants(p)))
    for n in range(1, n_steps + 1):
        try:
            p = step(field, cfg, p)
        except SingularStep as err:
            return Trajectory(
                tuple(records), True, f"singular step at n={n}: {err}"
            )
        except EvaluationOverflow as err:
            return Trajectory(tuple(records), True, f"overflow at n={n}: {err}")
        records.append(TrajectoryRecord(n, n * cfg.h, p, *invariants(p)))
    return Trajectory(tuple(records))


def _rk4(field: QuadraticField2, p0: Point2, t: float, n_steps: int) -> Point2:
    h = t / n_steps
    x, y = p0.x, p0.y
    for _ in range(n_steps):
        k1 = field.eval(Point2(x, y))
        k2 = field.eval(Point2(x + 0.5 * h * k1[0], y + 0.5 * h * k1[1]))
        k3 = field.eval(Point2(x + 0.5 * h * k2[0], y + 0.5 * h * k2[1]))
        k4 = field.eval(Point2(x + h * k3[0], y + h * k3[1]))
        x += h * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]) / 6.0
        y += h * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]) / 6.0
    return Point2(x, y)


def reference_flow(
    field: QuadraticField2, p0: Point2, t: float, tol: float
) -> Point2:
    """High-accuracy flow of the continuous system, for convergence oracles.

    Classical fourth-order one-step integration with step halving: the step
    count doubles until two successive answers differ by less than tol, and
    the finer answer is returned.

    Raises:
        NoConvergence: 20 halvings did not reach tol.
        EvaluationOverflow: the trajectory blew up.
    """
    if not (tol > 0.0):
        raise ValueError(f"tol must be positive, got {tol}")
    if t == 0.0:
        return p0
    n = max(2, math.ceil(abs(t) / 0.1))
    prev = _rk4(field, p0, t, n)
    for _ in range(20):
        n *= 2
        cur = _rk4(field, p0, t, n)
        if cur.dist(prev) < tol:
            return cur
        prev = cur
    raise NoConvergence(
        f"reference flow did not reach tol={tol} within 20 halvings (n={n})"
    )
