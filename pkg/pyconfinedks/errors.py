class ConfinedKSError(RuntimeError):
    """Base class for numerical failures raised while solving a confined atom."""


class CollocationError(ConfinedKSError):
    pass


class EigensolverError(ConfinedKSError):
    pass


class DegenerateDensityError(ConfinedKSError):
    pass


class SCFConvergenceError(ConfinedKSError):
    def __init__(self, message: str, history: tuple = ()):
        super().__init__(message)
        self.history = tuple(history)


class SCFOscillationError(SCFConvergenceError):
    def __init__(self, message: str, history: tuple = (), mixing: float | None = None):
        super().__init__(message, history)
        self.mixing = mixing
