"""The two built-in integrable families of planar Hamiltonian systems.

Both families have a homogeneous Hamiltonian that is a product of powers of
forms, and a flow of the shape

    dX/dt = phi(X) K grad H(X),      K = [[0, 1], [-1, 0]],

whose right-hand side collapses to a polynomial quadratic field once phi
cancels against the gradient's common factor:

* quartic family:  H = L^2 Q with L = a x + b y, Q = c x^2 + 2 d x y + e y^2,
  phi = 1/L, field = K (2 Q grad L + L grad Q);
* sextic family:   H = l1 l2^2 l3^3 with l_i linear forms, phi = 1/(l2 l3^2),
  field = K (l2 l3 grad l1 + 2 l1 l3 grad l2 + 3 l1 l2 grad l3).

The discrete map produced by the Kahan update exactly conserves a modified
Hamiltonian (a rational deformation of H, see :meth:`SystemSpec.modified_hamiltonian`)
and preserves an invariant measure whose density is the reciprocal of the
product of the factors appearing in phi and H (see :meth:`SystemSpec.measure_density`).
Storing the cancelled polynomial field means stepping never divides by L or
l2 l3^2, so orbits cross the singular lines of phi without incident.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Literal, Union

from .errors import (
    DegenerateFamilyWarning,
    DegenerateParams,
    EvaluationOverflow,
    MeasureSingularity,
    PoleOfModifiedHamiltonian,
)
from .vectorfield import Mat2, Point2, QuadraticField2, Vec2

FamilyTag = Literal["quartic", "sextic"]


@dataclass(frozen=True, slots=True)
class LinearForm:
    """The linear form u*x + v*y; (u, v) must be nonzero and finite."""

    u: float
    v: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "u", float(self.u))
        object.__setattr__(self, "v", float(self.v))
        if not (math.isfinite(self.u) and math.isfinite(self.v)):
            raise DegenerateParams(f"non-finite linear form ({self.u}, {self.v})")
        if self.u == 0.0 and self.v == 0.0:
            raise DegenerateParams("linear form must not be identically zero")

    def __call__(self, p: Point2) -> float:
        return self.u * p.x + self.v * p.y

    def grad(self) -> Vec2:
        return (self.u, self.v)

    def distance(self, p: Point2) -> float:
        """Euclidean distance from p to the zero line of the form."""
        return abs(self(p)) / math.hypot(self.u, self.v)


@dataclass(frozen=True, slots=True)
class QuarticParams:
    """Parameters (a, b, c, d, e) of H = (a x + b y)^2 (c x^2 + 2 d x y + e y^2)."""

    a: float
    b: float
    c: float
    d: float
    e: float

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d", "e"):
            object.__setattr__(self, name, float(getattr(self, name)))
        vals = (self.a, self.b, self.c, self.d, self.e)
        if not all(math.isfinite(v) for v in vals):
            raise DegenerateParams(f"non-finite quartic parameters {vals}")
        if self.a == 0.0 and self.b == 0.0:
            raise DegenerateParams("quartic parameters require (a, b) != (0, 0)")
        if self.c == 0.0 and self.d == 0.0 and self.e == 0.0:
            raise DegenerateParams("quartic parameters require (c, d, e) != (0, 0, 0)")

    def linear_form(self) -> LinearForm:
        return LinearForm(self.a, self.b)

    def quadratic_form(self, p: Point2) -> float:
        return self.c * p.x * p.x + 2.0 * self.d * p.x * p.y + self.e * p.y * p.y


@dataclass(frozen=True, slots=True)
class SexticParams:
    """Parameters (a..f) of H = (a x + b y)(c x + d y)^2 (e x + f y)^3."""

    a: float
    b: float
    c: float
    d: float
    e: float
    f: float

    def __post_init__(self) -> None:
        for name in ("a", "b", "c", "d", "e", "f"):
            object.__setattr__(self, name, float(getattr(self, name)))
        vals = (self.a, self.b, self.c, self.d, self.e, self.f)
        if not all(math.isfinite(v) for v in vals):
            raise DegenerateParams(f"non-finite sextic parameters {vals}")
        for name, (u, v) in {
            "(a, b)": (self.a, self.b),
            "(c, d)": (self.c, self.d),
            "(e, f)": (self.e, self.f),
        }.items():
            if u == 0.0 and v == 0.0:
                raise DegenerateParams(f"sextic parameters require {name} != (0, 0)")

    def forms(self) -> tuple[LinearForm, LinearForm, LinearForm]:
        return (
            LinearForm(self.a, self.b),
            LinearForm(self.c, self.d),
            LinearForm(self.e, self.f),
        )

    def cross_determinants(self) -> tuple[float, float, float]:
        """(ad - bc, cf - ed, eb - fa): proportionality tests for the form pairs."""
        return (
            self.a * self.d - self.b * self.c,
            self.c * self.f - self.e * self.d,
            self.e * self.b - self.f * self.a,
        )

    @property
    def is_degenerate(self) -> bool:
        """True when two of the three linear forms are proportional."""
        return any(v == 0.0 for v in self.cross_determinants())


@dataclass(frozen=True, slots=True)
class QuarticConstants:
    """Constants of the quartic modified Hamiltonian (step-size independent)."""

    D: float  # ce - d^2
    E: float  # 2abd - a^2 e - b^2 c


@dataclass(frozen=True, slots=True)
class SexticConstants:
    """Constants of the sextic modified Hamiltonian at a fixed step size.

    The d-values scale linearly with h; a3..a7 are the fixed quadratic
    combinations produced by :meth:`from_cross_terms`.
    """

    d12: float
    d23: float
    d31: float
    a3: float
    a4: float
    a5: float
    a6: float
    a7: float

    @classmethod
    def from_cross_terms(cls, d12: float, d23: float, d31: float) -> "SexticConstants":
        return cls(
            d12=d12,
            d23=d23,
            d31=d31,
            a3=-2.25 * d23 * d23,
            a4=-0.25 * d12 * d12,
            a5=-2.25 * d31 * d31,
            a6=-4.0 * d12 * d12,
            a7=1.5 * d12 * d23,
        )


InvariantConstants = Union[QuarticConstants, SexticConstants]


def _finite(value: float, what: str) -> float:
    if not math.isfinite(value):
        raise EvaluationOverflow(f"non-finite {what}: {value}")
    return value


@dataclass(frozen=True)
class SystemSpec:
    """A family instance: parameters, the cancelled polynomial field, evaluators.

    Instances are immutable and every method is a pure function, so specs can
    be shared between threads and reused across verification runs.
    """

    family: FamilyTag
    params: QuarticParams | SexticParams
    field: QuadraticField2

    def hamiltonian(self, p: Point2) -> float:
        """H(p); quartic L^2 Q, sextic l1 l2^2 l3^3."""
        if self.family == "quartic":
            q: QuarticParams = self.params
            lv = q.linear_form()(p)
            return _finite(lv * lv * q.quadratic_form(p), "Hamiltonian")
        s: SexticParams = self.params
        l1, l2, l3 = (f(p) for f in s.forms())
        return _finite(l1 * l2 * l2 * l3 * l3 * l3, "Hamiltonian")

    def grad_hamiltonian(self, p: Point2) -> Vec2:
        """Exact analytic gradient of H via the product rule on the factors."""
        if self.family == "quartic":
            q = self.params
            lv = q.linear_form()(p)
            qv = q.quadratic_form(p)
            qx = 2.0 * q.c * p.x + 2.0 * q.d * p.y
            qy = 2.0 * q.d * p.x + 2.0 * q.e * p.y
            gx = 2.0 * lv * q.a * qv + lv * lv * qx
            gy = 2.0 * lv * q.b * qv + lv * lv * qy
        else:
            s = self.params
            f1, f2, f3 = s.forms()
            l1, l2, l3 = f1(p), f2(p), f3(p)
            gx = (
                s.a * l2 * l2 * l3 ** 3
                + 2.0 * l1 * l2 * s.c * l3 ** 3
                + 3.0 * l1 * l2 * l2 * l3 * l3 * s.e
            )
            gy = (
                s.b * l2 * l2 * l3 ** 3
                + 2.0 * l1 * l2 * s.d * l3 ** 3
                + 3.0 * l1 * l2 * l2 * l3 * l3 * s.f
            )
        if not (math.isfinite(gx) and math.isfinite(gy)):
            raise EvaluationOverflow(f"non-finite Hamiltonian gradient ({gx}, {gy})")
        return (gx, gy)

    def invariant_constants(self, h: float) -> InvariantConstants:
        """Constants of the modified Hamiltonian for step size h."""
        if not math.isfinite(h):
            raise ValueError(f"step size must be finite, got {h}")
        if self.family == "quartic":
            q = self.params
            return QuarticConstants(
                D=q.c * q.e - q.d * q.d,
                E=2.0 * q.a * q.b * q.d - q.a * q.a * q.e - q.b * q.b * q.c,
            )
        s = self.params
        ad_bc, cf_ed, eb_fa = s.cross_determinants()
        return SexticConstants.from_cross_terms(h * ad_bc, h * cf_ed, h * eb_fa)

    def modified_hamiltonian(
        self,
        h: float,
        p: Point2,
        *,
        pole_tol: float = 1e-12,
        constants: InvariantConstants | None = None,
    ) -> float:
        """The rational deformation of H conserved exactly by the discrete map.

        Quartic:  H / (P1 P2) with
            P1 = 1 + h^2 D L^2 + h^2 E Q,
            P2 = 1 + 9 h^2 D L^2 + h^2 E Q.
        Sextic:   H / (F1 F2 F3) with
            F1 = 1 + a5 l2^2,
            F2 = 1 + a3 l1^2 + a4 l3^2 + a7 l1 l3,
            F3 = 1 + a5 l2^2 + a6 l3^2.

        Every correction term carries h^2 (the sextic a-constants are
        quadratic in the h-scaled cross terms), so the value reduces to H(p)
        exactly at h = 0.

        Args:
            h: step size of the map whose invariant is evaluated.
            p: evaluation point.
            pole_tol: raise :class:`PoleOfModifiedHamiltonian` when any
                denominator factor has magnitude below this.
            constants: override the invariant constants (used by negative
                controls in verification); defaults to the exact ones.

        Raises:
            PoleOfModifiedHamiltonian: a denominator factor is below pole_tol.
            EvaluationOverflow: the value is non-finite.
        """
        cc = constants if constants is not None else self.invariant_constants(h)
        if self.family == "quartic":
            q = self.params
            lv = q.linear_form()(p)
            qv = q.quadratic_form(p)
            h2 = h * h
            factors = (
                1.0 + h2 * cc.D * lv * lv + h2 * cc.E * qv,
                1.0 + 9.0 * h2 * cc.D * lv * lv + h2 * cc.E * qv,
            )
            num = lv * lv * qv
        else:
            s = self.params
            l1, l2, l3 = (f(p) for f in s.forms())
            factors = (
                1.0 + cc.a5 * l2 * l2,
                1.0 + cc.a3 * l1 * l1 + cc.a4 * l3 * l3 + cc.a7 * l1 * l3,
                1.0 + cc.a5 * l2 * l2 + cc.a6 * l3 * l3,
            )
            num = l1 * l2 * l2 * l3 * l3 * l3
        for f in factors:
            if abs(f) < pole_tol:
                raise PoleOfModifiedHamiltonian(
                    f"denominator factor {f} below tolerance {pole_tol} at ({p.x}, {p.y})"
                )
        den = math.prod(factors)
        return _finite(num / den, "modified Hamiltonian")

    def measure_density(self, p: Point2, *, tol: float = 1e-12) -> float:
        """Density of the invariant measure: 1/(L Q) quartic, 1/(l1 l2 l3) sextic.

        Raises:
            MeasureSingularity: a denominator factor has magnitude below tol.
        """
        if self.family == "quartic":
            q = self.params
            factors = (q.linear_form()(p), q.quadratic_form(p))
        else:
            factors = tuple(f(p) for f in self.params.forms())
        for f in factors:
            if abs(f) < tol:
                raise MeasureSingularity(
                    f"measure denominator factor {f} below tolerance {tol} at ({p.x}, {p.y})"
                )
        return _finite(1.0 / math.prod(factors), "measure density")

    def singular_forms(self) -> tuple[LinearForm, ...]:
        """The linear forms whose zero lines carry the measure/phi singularities."""
        if self.family == "quartic":
            return (self.params.linear_form(),)
        return self.params.forms()


def build_quartic(params: QuarticParams) -> SystemSpec:
    """Construct the quartic family member for the given parameters.

    The field is the exact polynomial cancellation of phi K grad H:
    K (2 Q grad L + L grad Q), valid everywhere including the line L = 0.
    """
    a, b, c, d, e = params.a, params.b, params.c, params.d, params.e
    # Expanded coefficients of w = 2 Q grad L + L grad Q; field = (w2, -w1).
    a1 = Mat2(
        2.0 * a * d + 2.0 * b * c,
        a * e + 3.0 * b * d,
        a * e + 3.0 * b * d,
        4.0 * b * e,
    )
    a2 = Mat2(
        -4.0 * a * c,
        -(3.0 * a * d + b * c),
        -(3.0 * a * d + b * c),
        -2.0 * (a * e + b * d),
    )
    return SystemSpec("quartic", params, QuadraticField2.homogeneous(a1, a2))


def build_sextic(params: SexticParams) -> SystemSpec:
    """Construct the sextic family member for the given parameters.

    The field is the exact polynomial cancellation of phi K grad H:
    K (l2 l3 grad l1 + 2 l1 l3 grad l2 + 3 l1 l2 grad l3).  Proportional form
    pairs are permitted but flagged with :class:`DegenerateFamilyWarning`.
    """
    if params.is_degenerate:
        warnings.warn(
            f"degenerate sextic family: cross determinants {params.cross_determinants()} "
            "contain a zero (two linear forms are proportional)",
            DegenerateFamilyWarning,
            stacklevel=2,
        )
    a, b, c, d, e, f = params.a, params.b, params.c, params.d, params.e, params.f
    # Expanded coefficients of w = l2 l3 grad l1 + 2 l1 l3 grad l2 + 3 l1 l2 grad l3.
    w1_xx = 6.0 * a * c * e
    w1_xy = 3.0 * a * c * f + 4.0 * a * d * e + 5.0 * b * c * e
    w1_yy = a * d * f + 2.0 * b * c * f + 3.0 * b * d * e
    w2_xx = b * c * e + 2.0 * a * d * e + 3.0 * a * c * f
    w2_xy = 4.0 * b * c * f + 3.0 * b * d * e + 5.0 * a * d * f
    w2_yy = 6.0 * b * d * f
    a1 = Mat2(w2_xx, 0.5 * w2_xy, 0.5 * w2_xy, w2_yy)
    a2 = Mat2(-w1_xx, -0.5 * w1_xy, -0.5 * w1_xy, -w1_yy)
    return SystemSpec("sextic", params, QuadraticField2.homogeneous(a1, a2))
