class PovmCoherenceError(Exception):
    """Base class for every error raised by the povm_coherence package."""


class ValidationError(PovmCoherenceError, ValueError):
    """Input is malformed or violates a tolerance-checked invariant."""


class ExtensionError(PovmCoherenceError):
    """A Naimark extension could not be constructed."""


class SolverError(PovmCoherenceError):
    """The SDP backend failed or received an ill-posed problem."""


class ConfigurationError(PovmCoherenceError, ValueError):
    """Bad configuration file, environment variable or command-line flag."""
