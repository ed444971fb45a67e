"""Exception types shared across the package."""

from __future__ import annotations


class Kahan2dError(Exception):
    """Base class for all errors raised by this package."""


class EvaluationOverflow(Kahan2dError):
    """An evaluation produced a non-finite (inf or nan) value."""


class SingularMatrix(Kahan2dError):
    """A 2x2 determinant is below the singularity tolerance."""


class SingularStep(Kahan2dError):
    """The update matrix I - (h/2) J_f(p) is numerically singular.

    The discrete map has a pole at p for this step size: no finite update
    exists within the configured determinant tolerance.
    """


class SingularJacobian(Kahan2dError):
    """The map Jacobian is numerically singular at this point.

    Equivalently the inverse map has a pole at the step target, so the
    measure-transport factor |det DPhi| collapses to zero.
    """


class DegenerateParams(Kahan2dError, ValueError):
    """Family parameters violate a constructor invariant."""


class PoleOfModifiedHamiltonian(Kahan2dError):
    """A denominator factor of the modified Hamiltonian is below tolerance."""


class MeasureSingularity(Kahan2dError):
    """A factor of the measure denominator is below tolerance.

    The point lies on (or numerically on) a singular line of the density.
    """


class NoConvergence(Kahan2dError):
    """Reference integration failed to converge within the halving budget."""


class InsufficientSamples(Kahan2dError):
    """Fewer than 10% of attempted samples were accepted by a verification run."""


class OrbitTerminated(Kahan2dError):
    """An orbit hit a singularity or overflow before reaching the requested horizon."""


class DegenerateFamilyWarning(UserWarning):
    """Two of a family's linear forms are proportional.

    The construction is still valid, but the family degenerates (a cross
    determinant vanishes) and some invariant constants collapse to zero.
    """
