"""Planar quadratic vector fields: exact evaluation, polarization, Jacobians.

A field f : R^2 -> R^2 is stored componentwise as

    f_i(p) = p^T A_i p  +  (B p)_i  +  c_i,        i = 1, 2

with the coefficient matrices ``A_i`` kept exactly symmetric.  Everything
here is immutable and pure, so values can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import EvaluationOverflow, SingularMatrix

Vec2 = tuple[float, float]


@dataclass(frozen=True, slots=True)
class Point2:
    """A state (x, y) in the plane. Coordinates must be finite."""

    x: float
    y: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", float(self.x))
        object.__setattr__(self, "y", float(self.y))
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise EvaluationOverflow(
                f"non-finite point coordinates ({self.x}, {self.y})"
            )

    def as_tuple(self) -> Vec2:
        return (self.x, self.y)

    def __iter__(self):
        yield self.x
        yield self.y

    def dist(self, other: "Point2") -> float:
        """Euclidean distance to another point."""
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True, slots=True)
class Mat2:
    """A real 2x2 matrix in row-major order."""

    m11: float
    m12: float
    m21: float
    m22: float

    def __post_init__(self) -> None:
        for name in ("m11", "m12", "m21", "m22"):
            object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def identity(cls) -> "Mat2":
        return cls(1.0, 0.0, 0.0, 1.0)

    @classmethod
    def zero(cls) -> "Mat2":
        return cls(0.0, 0.0, 0.0, 0.0)

    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21

    def transpose(self) -> "Mat2":
        return Mat2(self.m11, self.m21, self.m12, self.m22)

    def symmetric_part(self) -> "Mat2":
        off = 0.5 * (self.m12 + self.m21)
        return Mat2(self.m11, off, off, self.m22)

    def mv(self, v: Vec2) -> Vec2:
        """Matrix-vector product."""
        return (self.m11 * v[0] + self.m12 * v[1], self.m21 * v[0] + self.m22 * v[1])

    def __matmul__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.m11 * other.m11 + self.m12 * other.m21,
            self.m11 * other.m12 + self.m12 * other.m22,
            self.m21 * other.m11 + self.m22 * other.m21,
            self.m21 * other.m12 + self.m22 * other.m22,
        )

    def __add__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.m11 + other.m11,
            self.m12 + other.m12,
            self.m21 + other.m21,
            self.m22 + other.m22,
        )

    def __sub__(self, other: "Mat2") -> "Mat2":
        return Mat2(
            self.m11 - other.m11,
            self.m12 - other.m12,
            self.m21 - other.m21,
            self.m22 - other.m22,
        )

    def __rmul__(self, s: float) -> "Mat2":
        return Mat2(s * self.m11, s * self.m12, s * self.m21, s * self.m22)

    def inverse(self, det_tol: float = 1e-12) -> "Mat2":
        """Inverse matrix; raises :class:`SingularMatrix` if |det| < det_tol."""
        d = self.det()
        if abs(d) < det_tol:
            raise SingularMatrix(f"2x2 determinant {d} below tolerance {det_tol}")
        return Mat2(self.m22 / d, -self.m12 / d, -self.m21 / d, self.m11 / d)

    def solve(self, rhs: Vec2, det_tol: float = 1e-12) -> Vec2:
        """Solve ``self @ v = rhs`` by Cramer's rule."""
        d = self.det()
        if abs(d) < det_tol:
            raise SingularMatrix(f"2x2 determinant {d} below tolerance {det_tol}")
        return (
            (self.m22 * rhs[0] - self.m12 * rhs[1]) / d,
            (-self.m21 * rhs[0] + self.m11 * rhs[1]) / d,
        )

    def max_abs(self) -> float:
        return max(abs(self.m11), abs(self.m12), abs(self.m21), abs(self.m22))

    def is_finite(self) -> bool:
        return all(
            math.isfinite(v) for v in (self.m11, self.m12, self.m21, self.m22)
        )

    def entries(self) -> tuple[float, float, float, float]:
        return (self.m11, self.m12, self.m21, self.m22)


@dataclass(frozen=True, slots=True)
class FieldDiagnostics:
    """Result of :meth:`QuadraticField2.validate`."""

    asymmetry: float
    all_finite: bool
    homogeneous: bool


def _finite2(v: Vec2, what: str) -> Vec2:
    if not (math.isfinite(v[0]) and math.isfinite(v[1])):
        raise EvaluationOverflow(f"non-finite {what} ({v[0]}, {v[1]})")
    return v


@dataclass(frozen=True)
class QuadraticField2:
    """A planar vector field with quadratic, linear and constant parts.

    Args:
        quad: per-component coefficient matrices (A1, A2).  Asymmetric input
            is symmetrized as (A + A^T)/2 at construction; polarization and
            the Kahan update both rely on exact symmetry of the stored
            matrices.
        lin: the linear part B.
        const: the constant part c.
    """

    quad: tuple[Mat2, Mat2]
    lin: Mat2 = Mat2.zero()
    const: Vec2 = (0.0, 0.0)

    def __post_init__(self) -> None:
        a1, a2 = self.quad
        object.__setattr__(self, "quad", (a1.symmetric_part(), a2.symmetric_part()))

    def eval(self, p: Point2) -> Vec2:
        """Field value at p: (p^T A_i p + (B p)_i + c_i)."""
        x, y = p.x, p.y
        a1, a2 = self.quad
        b = self.lin
        v1 = a1.m11 * x * x + 2.0 * a1.m12 * x * y + a1.m22 * y * y
        v2 = a2.m11 * x * x + 2.0 * a2.m12 * x * y + a2.m22 * y * y
        out = (
            v1 + b.m11 * x + b.m12 * y + self.const[0],
            v2 + b.m21 * x + b.m22 * y + self.const[1],
        )
        return _finite2(out, "field value")

    def __call__(self, p: Point2) -> Vec2:
        return self.eval(p)

    def polarize(self, p: Point2, q: Point2) -> Vec2:
        """Symmetric bilinear form of the quadratic part: component i is p^T A_i q.

        Grouped so that swapping p and q is bit-exact, not merely close.
        """
        a1, a2 = self.quad
        xx = p.x * q.x
        yy = p.y * q.y
        cross = p.x * q.y + p.y * q.x
        out = (
            a1.m11 * xx + a1.m12 * cross + a1.m22 * yy,
            a2.m11 * xx + a2.m12 * cross + a2.m22 * yy,
        )
        return _finite2(out, "polarization value")

    def jacobian(self, p: Point2) -> Mat2:
        """Exact derivative of :meth:`eval` at p; row i is 2 (A_i p)^T + B_i."""
        a1, a2 = self.quad
        b = self.lin
        v = p.as_tuple()
        r1 = a1.mv(v)
        r2 = a2.mv(v)
        out = Mat2(
            2.0 * r1[0] + b.m11,
            2.0 * r1[1] + b.m12,
            2.0 * r2[0] + b.m21,
            2.0 * r2[1] + b.m22,
        )
        if not out.is_finite():
            raise EvaluationOverflow(f"non-finite Jacobian at ({p.x}, {p.y})")
        return out

    def validate(self) -> FieldDiagnostics:
        """Diagnostics: stored asymmetry (0 by construction), finiteness, homogeneity."""
        asym = max(
            abs(self.quad[0].m12 - self.quad[0].m21),
            abs(self.quad[1].m12 - self.quad[1].m21),
        )
        finite = (
            self.quad[0].is_finite()
            and self.quad[1].is_finite()
            and self.lin.is_finite()
            and math.isfinite(self.const[0])
            and math.isfinite(self.const[1])
        )
        homogeneous = self.lin == Mat2.zero() and self.const == (0.0, 0.0)
        return FieldDiagnostics(asym, finite, homogeneous)

    @classmethod
    def homogeneous(cls, a1: Mat2, a2: Mat2) -> "QuadraticField2":
        """A purely quadratic field (B = 0, c = 0)."""
        return cls(quad=(a1, a2))
