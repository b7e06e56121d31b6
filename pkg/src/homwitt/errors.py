"""Exception types shared across the package."""


class HomwittError(Exception):
    """Base class for all package errors."""


class UnsupportedRing(HomwittError):
    """Requested a ring in which 2 is not invertible, or an unknown kind."""


class ZeroElement(HomwittError):
    """An operation that needs a nonzero element received zero."""


class ShapeMismatch(HomwittError):
    """Matrix or complex shapes are incompatible."""


class NotAComplex(HomwittError):
    """Some consecutive differentials do not compose to zero."""


class IllFormedMorphism(HomwittError):
    """A matrix does not send relations into relations."""


class TargetMismatch(HomwittError):
    """Two morphisms expected to share a target do not."""


class NotFiniteLength(HomwittError):
    """A finite-length module was required but the module has free rank."""


class HomologyNotInA(HomwittError):
    """Some homology module fails the duality-category membership test."""

    def __init__(self, degree, reason=""):
        self.degree = degree
        super().__init__(f"homology in degree {degree} is not in the duality category"
                         + (f": {reason}" if reason else ""))


class NotALagrangian(HomwittError):
    """A claimed neutrality witness fails its exactness checks."""


class WindowAlreadyMinimal(HomwittError):
    """Support reduction was requested on a form already concentrated in one degree."""


class NotQuasiIso(HomwittError):
    """A quasi-isomorphism was required but homology is not preserved."""


class IncompatibleAugmentations(HomwittError):
    """Resolution data does not match the morphism it should resolve."""


class ReductionStepFailed(HomwittError):
    """A sublagrangian reduction step could not complete.

    Carries the step description and the unsolved system so the instance can
    be replayed and inspected.
    """

    def __init__(self, step, detail=""):
        self.step = step
        self.detail = detail
        super().__init__(f"reduction step failed at {step}" + (f": {detail}" if detail else ""))


class UnknownKind(HomwittError):
    """Unknown instance kind or suite name."""
