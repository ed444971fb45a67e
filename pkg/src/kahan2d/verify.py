"""Machine-checked verification of the map's structural claims.

Each report samples a rectangle deterministically, rejects points that sit
on (or numerically too close to) the singular structure, and measures a
violation that an exactly-preserved quantity must keep at the roundoff
floor:

* conservation: relative change of the modified Hamiltonian across a step;
* measure: |rho(p') |det DPhi(p)| / rho(p) - 1|;
* reversibility: distance back to the start after a forward+backward step;
* order: fitted convergence order against a high-accuracy reference flow;
* drift scan: per-step conservation violation as a function of h, to
  discriminate an exact invariant (flat roundoff floor) from an O(h^k)
  impostor.

Reports are bit-deterministic for a fixed :class:`SampleSpec` seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    EvaluationOverflow,
    InsufficientSamples,
    MeasureSingularity,
    OrbitTerminated,
    PoleOfModifiedHamiltonian,
    SingularJacobian,
    SingularStep,
)
from .kahan import (
    StepConfig,
    inverse_step,
    reference_flow,
    step,
    step_jacobian_det,
)
from .systems import InvariantConstants, LinearForm, SystemSpec
from .vectorfield import Point2, QuadraticField2

# Rejection reasons recorded by the sampling loops.
REASON_SINGULAR_STEP = "singular_step"
REASON_HTILDE_POLE = "htilde_pole"
REASON_MEASURE_SINGULARITY = "measure_singularity"
REASON_OVERFLOW = "overflow"
REASON_NEAR_SINGULAR_LINE = "near_singular_line"

# Default relative-violation threshold for exactness suites: loose enough for
# ~1e3 ulp of accumulation through the rational evaluations, strict enough to
# reject O(h^2) drift at any practical step size.
EXACTNESS_THRESHOLD = 1e-9


@dataclass(frozen=True, slots=True)
class SampleSpec:
    """Deterministic sampling plan for a verification run.

    Args:
        region: rectangle (x_min, x_max, y_min, y_max) to draw from.
        count: number of accepted samples required.
        seed: RNG seed; identical specs yield bit-identical reports.
        exclusion_radius: reject draws closer than this to any of the
            system's singular lines (Euclidean distance).
        pole_tol: tolerance forwarded to modified-Hamiltonian and measure
            evaluations.
        min_step_det: conditioning guard; step solves with |det| below this
            are rejected as (numerically) singular rather than trusted.
    """

    region: tuple[float, float, float, float] = (0.2, 2.0, -2.0, 2.0)
    count: int = 1000
    seed: int = 0
    exclusion_radius: float = 0.0
    pole_tol: float = 1e-12
    min_step_det: float = 1e-6

    def __post_init__(self) -> None:
        x0, x1, y0, y1 = self.region
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"degenerate sample region {self.region}")
        if self.count <= 0:
            raise ValueError(f"sample count must be positive, got {self.count}")

    def draws(self):
        """Yield up to 10*count uniform points from the region."""
        rng = np.random.default_rng(self.seed)
        x0, x1, y0, y1 = self.region
        for _ in range(10 * self.count):
            yield Point2(rng.uniform(x0, x1), rng.uniform(y0, y1))


@dataclass(frozen=True)
class VerificationReport:
    """Summary statistics of one verification suite."""

    suite: str
    samples_attempted: int
    samples_used: int
    max_violation: float
    mean_violation: float
    threshold: float
    passed: bool
    notes: str = ""
    rejections: dict[str, int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        assert self.passed == (self.max_violation <= self.threshold)
        assert self.samples_used <= self.samples_attempted

    def summary(self) -> str:
        lines = [
            f"suite:             {self.suite}",
            f"samples attempted: {self.samples_attempted}",
            f"samples used:      {self.samples_used}",
            f"max violation:     {self.max_violation:.6e}",
            f"mean violation:    {self.mean_violation:.6e}",
            f"threshold:         {self.threshold:.6e}",
            f"result:            {'PASS' if self.passed else 'FAIL'}",
        ]
        if self.rejections:
            rej = ", ".join(f"{k}={v}" for k, v in sorted(self.rejections.items()))
            lines.append(f"rejections:        {rej}")
        if self.notes:
            lines.append(f"notes:             {self.notes}")
        return "\n".join(lines)


def _make_report(
    suite: str,
    attempted: int,
    violations: list[float],
    threshold: float,
    notes: str,
    rejections: dict[str, int],
) -> VerificationReport:
    used = len(violations)
    max_v = max(violations) if violations else 0.0
    mean_v = sum(violations) / used if used else 0.0
    return VerificationReport(
        suite=suite,
        samples_attempted=attempted,
        samples_used=used,
        max_violation=max_v,
        mean_violation=mean_v,
        threshold=threshold,
        passed=max_v <= threshold,
        notes=notes,
        rejections=rejections,
    )


class _Rejector:
    """Shared rejection bookkeeping for the sampling loops."""

    def __init__(self, samples: SampleSpec, lines: tuple[LinearForm, ...]):
        self.samples = samples
        self.lines = lines
        self.counts: dict[str, int] = {}

    def reject(self, reason: str) -> None:
        self.counts[reason] = self.counts.get(reason, 0) + 1

    def too_close_to_line(self, p: Point2) -> bool:
        r = self.samples.exclusion_radius
        if r <= 0.0 or not self.lines:
            return False
        if any(line.distance(p) < r for line in self.lines):
            self.reject(REASON_NEAR_SINGULAR_LINE)
            return True
        return False


def _require_quota(suite: str, attempted: int, used: int, count: int) -> None:
    if used < count:
        raise InsufficientSamples(
            f"{suite}: only {used} of {attempted} attempted samples accepted "
            f"(need {count}; acceptance below 10%)"
        )


def conservation_report(
    sys: SystemSpec,
    h: float,
    samples: SampleSpec,
    threshold: float = EXACTNESS_THRESHOLD,
    constants: InvariantConstants | None = None,
) -> VerificationReport:
    """Per-step relative violation of the modified Hamiltonian.

    For each accepted sample p the violation is
    |Htilde(p') - Htilde(p)| / max(1, |Htilde(p)|) with p' the step target.
    Passing ``constants`` substitutes (possibly corrupted) invariant
    constants, which is how negative controls establish that the check can
    fail.

    Raises:
        ValueError: h is zero (the map degenerates to the identity).
        InsufficientSamples: fewer than 10% of draws were accepted.
    """
    if h == 0.0:
        raise ValueError("conservation_report requires h != 0")
    cfg = StepConfig(h, det_tol=samples.min_step_det)
    rej = _Rejector(samples, sys.singular_forms())
    violations: list[float] = []
    attempted = 0
    for p in samples.draws():
        if len(violations) >= samples.count:
            break
        attempted += 1
        if rej.too_close_to_line(p):
            continue
        try:
            p_next = step(sys.field, cfg, p)
        except SingularStep:
            rej.reject(REASON_SINGULAR_STEP)
            continue
        except EvaluationOverflow:
            rej.reject(REASON_OVERFLOW)
            continue
        try:
            before = sys.modified_hamiltonian(
                h, p, pole_tol=samples.pole_tol, constants=constants
            )
            after = sys.modified_hamiltonian(
                h, p_next, pole_tol=samples.pole_tol, constants=constants
            )
        except PoleOfModifiedHamiltonian:
            rej.reject(REASON_HTILDE_POLE)
            continue
        except EvaluationOverflow:
            rej.reject(REASON_OVERFLOW)
            continue
        violations.append(abs(after - before) / max(1.0, abs(before)))
    _require_quota("conservation", attempted, len(violations), samples.count)
    return _make_report(
        "conservation", attempted, violations, threshold,
        f"family={sys.family}; h={h!r}", rej.counts,
    )


def measure_report(
    sys: SystemSpec,
    h: float,
    samples: SampleSpec,
    threshold: float = EXACTNESS_THRESHOLD,
    use_jacobian_factor: bool = True,
) -> VerificationReport:
    """Violation of measure preservation: |rho(p') |det DPhi(p)| / rho(p) - 1|.

    ``use_jacobian_factor=False`` drops |det DPhi| from the product; it is a
    negative control that must make the suite fail.

    Raises:
        ValueError: h is zero.
        InsufficientSamples: fewer than 10% of draws were accepted.
    """
    if h == 0.0:
        raise ValueError("measure_report requires h != 0")
    cfg = StepConfig(h, det_tol=samples.min_step_det)
    rej = _Rejector(samples, sys.singular_forms())
    violations: list[float] = []
    attempted = 0
    for p in samples.draws():
        if len(violations) >= samples.count:
            break
        attempted += 1
        if rej.too_close_to_line(p):
            continue
        try:
            p_next = step(sys.field, cfg, p)
            det_dphi = step_jacobian_det(sys.field, cfg, p)
        except (SingularStep, SingularJacobian):
            rej.reject(REASON_SINGULAR_STEP)
            continue
        except EvaluationOverflow:
            rej.reject(REASON_OVERFLOW)
            continue
        try:
            rho_before = sys.measure_density(p, tol=samples.pole_tol)
            rho_after = sys.measure_density(p_next, tol=samples.pole_tol)
        except MeasureSingularity:
            rej.reject(REASON_MEASURE_SINGULARITY)
            continue
        except EvaluationOverflow:
            rej.reject(REASON_OVERFLOW)
            continue
        transported = rho_after / rho_before
        if use_jacobian_factor:
            transported *= abs(det_dphi)
        violations.append(abs(transported - 1.0))
    _require_quota("measure", attempted, len(violations), samples.count)
    return _make_report(
        "measure", attempted, violations, threshold,
        f"family={sys.family}; h={h!r}", rej.counts,
    )


def reversibility_report(
    field: QuadraticField2,
    h: float,
    samples: SampleSpec,
    threshold: float = 1e-10,
    exclude: tuple[LinearForm, ...] = (),
) -> VerificationReport:
    """Distance ||backward(forward(p)) - p|| per accepted sample.

    Raises:
        ValueError: h is zero.
        InsufficientSamples: fewer than 10% of draws were accepted.
    """
    if h == 0.0:
        raise ValueError("reversibility_report requires h != 0")
    cfg = StepConfig(h, det_tol=samples.min_step_det)
    rej = _Rejector(samples, exclude)
    violations: list[float] = []
    attempted = 0
    for p in samples.draws():
        if len(violations) >= samples.count:
            break
        attempted += 1
        if rej.too_close_to_line(p):
            continue
        try:
            p_next = step(field, cfg, p)
            p_back = inverse_step(field, cfg, p_next)
        except SingularStep:
            rej.reject(REASON_SINGULAR_STEP)
            continue
        except EvaluationOverflow:
            rej.reject(REASON_OVERFLOW)
            continue
        violations.append(p_back.dist(p))
    _require_quota("reversibility", attempted, len(violations), samples.count)
    return _make_report(
        "reversibility", attempted, violations, threshold,
        f"h={h!r}", rej.counts,
    )


def _check_halving(h_list: tuple[float, ...] | list[float]) -> None:
    if len(h_list) < 3:
        raise ValueError(
            f"need at least 3 step sizes in halving progression, got {len(h_list)}"
        )
    for bigger, smaller in zip(h_list, h_list[1:]):
        if not math.isclose(smaller, bigger / 2.0, rel_tol=1e-9):
            raise ValueError(
                f"step sizes must halve: {smaller} is not {bigger}/2"
            )


def order_report(
    sys: SystemSpec,
    p0: Point2,
    T: float,
    h_list: tuple[float, ...] | list[float],
    reference_tol: float = 1e-12,
    order_window: tuple[float, float] = (1.8, 2.2),
) -> VerificationReport:
    """Observed convergence order of the map against the reference flow.

    Runs the map to horizon T for each step size, measures endpoint errors
    against :func:`kahan2d.kahan.reference_flow`, and fits the slope of
    log(error) vs log(h).  Passes iff the fitted order lies in
    ``order_window``.

    Raises:
        ValueError: fewer than 3 step sizes, or they do not halve, or some
            T/h is not a whole number of steps.
        NoConvergence: the reference flow failed to converge.
        OrbitTerminated: a map orbit hit a singularity before T.
    """
    _check_halving(h_list)
    ref = reference_flow(sys.field, p0, T, reference_tol)
    errors: list[float] = []
    for h in h_list:
        n_float = T / h
        n = round(n_float)
        if not math.isclose(n_float, n, rel_tol=1e-9):
            raise ValueError(f"horizon {T} is not a whole number of steps of {h}")
        cfg = StepConfig(h)
        p = p0
        try:
            for k in range(n):
                p = step(sys.field, cfg, p)
        except (SingularStep, EvaluationOverflow) as err:
            raise OrbitTerminated(
                f"orbit at h={h} terminated at step {k}: {err}"
            ) from err
        errors.append(p.dist(ref))
    slope = float(
        np.polyfit(np.log(np.asarray(h_list)), np.log(np.asarray(errors)), 1)[0]
    )
    center = 0.5 * (order_window[0] + order_window[1])
    halfwidth = 0.5 * (order_window[1] - order_window[0])
    err_strs = ", ".join(f"{e:.3e}" for e in errors)
    return _make_report(
        "order",
        len(h_list),
        [abs(slope - center)] * len(h_list),
        halfwidth,
        f"fitted_order={slope!r}; errors=[{err_strs}]; horizon={T!r}",
        {},
    )


def h_drift_scan(
    sys: SystemSpec,
    p0: Point2,
    n_steps: int,
    h_list: tuple[float, ...] | list[float],
    threshold: float = EXACTNESS_THRESHOLD,
    htilde_fn=None,
) -> VerificationReport:
    """Conservation violation as a function of step size.

    For each h, steps an orbit from p0. The per-h violation is the maximum
    per-step relative change of the (candidate) modified Hamiltonian along
    the orbit.  The notes record a fitted scaling exponent of violation vs
    h: an exact invariant sits on a flat roundoff floor (exponent near 0 and
    magnitude below the threshold), while a wrong candidate drifts as h^k
    with k >= 2.

    Args:
        htilde_fn: optional substitute ``f(h, p) -> float`` for the modified
            Hamiltonian, used by negative controls; defaults to the system's.

    Orbits that terminate early are recorded in the notes; the violations
    they accumulated before termination still count.
    """
    if htilde_fn is None:
        htilde_fn = lambda h, p: sys.modified_hamiltonian(h, p)
    per_h: list[float] = []
    completed = 0
    notes: list[str] = []
    for h in h_list:
        cfg = StepConfig(h)
        worst = 0.0
        p = p0
        try:
            before = htilde_fn(h, p)
            for _ in range(n_steps):
                p = step(sys.field, cfg, p)
                after = htilde_fn(h, p)
                worst = max(worst, abs(after - before) / max(1.0, abs(before)))
                before = after
        except (SingularStep, EvaluationOverflow, PoleOfModifiedHamiltonian) as err:
            notes.append(f"h={h!r}: orbit terminated ({type(err).__name__})")
        else:
            completed += 1
        per_h.append(worst)
    positive = [(h, v) for h, v in zip(h_list, per_h) if v > 0.0]
    if len(positive) >= 2:
        hs, vs = zip(*positive)
        exponent = float(np.polyfit(np.log(np.asarray(hs)), np.log(np.asarray(vs)), 1)[0])
    else:
        exponent = 0.0
    vals = ", ".join(f"{v:.3e}" for v in per_h)
    notes.insert(0, f"scaling_exponent={exponent!r}; per_h=[{vals}]")
    max_v = max(per_h) if per_h else 0.0
    mean_v = sum(per_h) / len(per_h) if per_h else 0.0
    return VerificationReport(
        suite="drift-scan",
        samples_attempted=len(h_list),
        samples_used=completed,
        max_violation=max_v,
        mean_violation=mean_v,
        threshold=threshold,
        passed=max_v <= threshold,
        notes="; ".join(notes),
    )
