"""Exception types shared across the package."""


class RisboundError(Exception):
    """Base class for every error raised by this package."""


class InvariantError(RisboundError):
    """A scenario, profile, or configuration violates a documented invariant."""


class DegenerateGeometry(InvariantError):
    """Node placement makes the geometry ill-defined (coincident nodes,
    inverse-trig arguments outside [-1, 1] beyond rounding tolerance)."""


class SingularJacobian(RisboundError):
    """A denominator of the position-domain Jacobian is numerically zero."""


class ConfigError(RisboundError):
    """Radio / precoder configuration is inconsistent."""


class SchemaError(RisboundError):
    """A scenario file does not match the documented JSON schema.

    The message carries the dotted path of the offending field.
    """


class SingularFim(RisboundError):
    """The position-domain Fisher information matrix is numerically singular
    (non-positive eigenvalue or condition number above 1e12)."""


class AllSingular(RisboundError):
    """Every particle of an optimization run evaluated to a singular FIM."""
