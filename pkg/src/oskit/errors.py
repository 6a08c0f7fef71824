"""Exception hierarchy shared by every oskit module."""


class OskitError(Exception):
    """Base class for oskit failures."""


class InputError(OskitError, ValueError):
    """Malformed or inconsistent input (bad shapes, non-finite entries, ...)."""


class NotQuasiMultiplierError(InputError):
    """The candidate z does not satisfy X z X within X ("not closed")."""


class NotContractiveError(InputError):
    """The candidate z has operator norm above 1 ("not contractive")."""


class NotTROError(InputError):
    """A ternary ring of operators was required but the space is not closed."""


class NotExtremeError(InputError):
    """The supplied element is not an extreme point of the unit ball."""


class DegenerateSpectrumError(OskitError):
    """Random spectral splitting kept hitting eigenvalue collisions."""

    def __init__(self, message, seeds=()):
        super().__init__(message)
        self.seeds = list(seeds)


class InternalConsistencyError(OskitError):
    """Two independently computed sides of a biconditional disagree."""
