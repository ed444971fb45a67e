"""Kahan discretization of planar quadratic vector fields.

A small numerical library around one linearly-implicit map: the Kahan update
for quadratic ODEs in the plane.  It ships two built-in families of systems
whose discrete maps conserve a modified Hamiltonian and preserve an
invariant measure exactly (up to roundoff), and a verification harness that
certifies those properties numerically.
"""

from .errors import (
    DegenerateFamilyWarning,
    DegenerateParams,
    EvaluationOverflow,
    InsufficientSamples,
    Kahan2dError,
    MeasureSingularity,
    NoConvergence,
    OrbitTerminated,
    PoleOfModifiedHamiltonian,
    SingularJacobian,
    SingularMatrix,
    SingularStep,
)
from .kahan import (
    StepConfig,
    Trajectory,
    TrajectoryRecord,
    inverse_step,
    orbit,
    reference_flow,
    step,
    step_jacobian,
    step_jacobian_det,
)
from .systems import (
    InvariantConstants,
    LinearForm,
    QuarticConstants,
    QuarticParams,
    SexticConstants,
    SexticParams,
    SystemSpec,
    build_quartic,
    build_sextic,
)
from .vectorfield import FieldDiagnostics, Mat2, Point2, QuadraticField2
from .verify import (
    SampleSpec,
    VerificationReport,
    conservation_report,
    h_drift_scan,
    measure_report,
    order_report,
    reversibility_report,
)

__version__ = "0.1.0"

__all__ = [
    "DegenerateFamilyWarning",
    "DegenerateParams",
    "EvaluationOverflow",
    "FieldDiagnostics",
    "InsufficientSamples",
    "InvariantConstants",
    "Kahan2dError",
    "LinearForm",
    "Mat2",
    "MeasureSingularity",
    "NoConvergence",
    "OrbitTerminated",
    "Point2",
    "PoleOfModifiedHamiltonian",
    "QuadraticField2",
    "QuarticConstants",
    "QuarticParams",
    "SampleSpec",
    "SexticConstants",
    "SexticParams",
    "SingularJacobian",
    "SingularMatrix",
    "SingularStep",
    "StepConfig",
    "SystemSpec",
    "Trajectory",
    "TrajectoryRecord",
    "VerificationReport",
    "build_quartic",
    "build_sextic",
    "conservation_report",
    "h_drift_scan",
    "inverse_step",
    "measure_report",
    "orbit",
    "order_report",
    "reference_flow",
    "reversibility_report",
    "step",
    "step_jacobian",
    "step_jacobian_det",
]
