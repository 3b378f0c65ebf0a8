"""Exception hierarchy.

Every error carries the name of the module that raised it so the CLI can
print module-tagged diagnostics.
"""


class SiegelCurvError(Exception):
    module = "siegelcurv"

    def __str__(self):
        return f"[{self.module}] {super().__str__()}"


class CurveError(SiegelCurvError):
    module = "curves"


class RepeatedRoot(CurveError):
    pass


class SingularPlaneCurve(CurveError):
    pass


class UnsupportedDegree(CurveError):
    pass


class BasisVerificationFailed(CurveError):
    pass


class ChartInvalid(CurveError):
    pass


class KernelError(SiegelCurvError):
    module = "kernel"


class NoConvergence(KernelError):
    pass


class SingularityTooStrong(KernelError):
    pass


class AmbiguousRank(KernelError):
    def __init__(self, message, decision=None):
        super().__init__(message)
        self.decision = decision


class NotPositiveDefinite(KernelError):
    pass


class QuadricError(SiegelCurvError):
    module = "quadrics"


class TooFewPoints(QuadricError):
    pass


class CurvatureError(SiegelCurvError):
    module = "curvature"


class OffDiagonalUnsupported(CurvatureError):
    pass


class ZeroDirection(CurvatureError):
    pass


class SecondKindError(SiegelCurvError):
    module = "second_kind"


class WeierstrassPoleUnsupported(SecondKindError):
    pass


class PVNoConvergence(SecondKindError):
    pass
