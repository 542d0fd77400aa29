"""Exception types shared across the package."""


class ModelError(Exception):
    """Base class for model-level errors."""


class NotOnContact(ModelError):
    """The configuration does not place the rod endpoint on the line."""


class NotTangent(ModelError):
    """The contact-point velocity is not tangent to the line."""


class OutsideChart(ModelError):
    """theta outside (0, pi): the contact description is not defined there."""


class NotAnImpact(ModelError):
    """An impulsive law was invoked on a state that does not impact."""


class LawRejected(ModelError):
    """A constitutive law produced a non-outgoing velocity (law bug)."""


class ZeroSlip(ModelError):
    """Dynamic friction requested at zero slip; the static case is set-valued."""


class InvalidGrid(ModelError):
    """A scan grid is empty or out of the admissible range."""


class ParadoxEncountered(ModelError):
    """The Coulomb-contact problem has no solution or several."""

    def __init__(self, message, b=None, c=None):
        super().__init__(message)
        self.b = b
        self.c = c


class NonConvergence(ModelError):
    """Event localization failed or events accumulated below resolvable spacing."""
