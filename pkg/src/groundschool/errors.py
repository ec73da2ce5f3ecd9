"""Exception types shared across the package."""


class GroundschoolError(Exception):
    """Base class for all package-specific errors."""


class MalformedTrace(GroundschoolError):
    """An episodic trace violates its structural invariants."""


class DuplicateConcept(GroundschoolError):
    """A word is already bound to a concept."""


class UnknownContext(GroundschoolError):
    """No generalization context exists for the requested concept."""


class NoProjection(GroundschoolError):
    """Projection produced no usable next-state facts."""


class UnparseableUtterance(GroundschoolError):
    """No grammar template matches the utterance."""


class SignalMismatch(GroundschoolError):
    """Lesson content is incompatible with its teaching signal."""


class ComprehensionError(GroundschoolError):
    """Internal comprehension failure that is not part of normal data flow."""


class PreconditionViolated(GroundschoolError):
    """A primitive action was applied in a state that forbids it."""


class Unsatisfiable(GroundschoolError):
    """Constraint-region sampling exhausted its draw budget."""


class Indeterminate(GroundschoolError):
    """A qualitative relation is undefined for the given geometry."""


class PlanningFailure(GroundschoolError):
    """No primitive action sequence reaches the goal within the depth cap."""


class InvalidCommand(GroundschoolError):
    """A memory command envelope is structurally invalid."""


class ConfigError(GroundschoolError):
    """An experiment configuration is internally inconsistent."""
