"""Exception types shared across the simulation and training modules."""


class SimulationError(RuntimeError):
    """Base class for time-domain simulation failures."""


class DivergenceError(SimulationError):
    """State recursion produced a non-finite or exploding state.

    ``index`` is the first offending time step.
    """

    def __init__(self, index, message=None):
        self.index = int(index)
        super().__init__(message or f"state diverged at sample {index}")


class NewtonConvergenceError(SimulationError):
    """Implicit integration step failed to converge.

    ``index`` is the time step whose Newton iteration stalled.
    """

    def __init__(self, index, message=None):
        self.index = int(index)
        super().__init__(message or f"Newton iteration failed at step {index}")


class OrderTooHighError(ValueError):
    """Requested model order exceeds the rank supported by the data."""
