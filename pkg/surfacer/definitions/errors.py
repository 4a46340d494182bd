"""Exception types raised throughout the surfacer package."""
import typing


class SurfacerError(Exception):
    """Base class for all errors raised deliberately by surfacer."""


class InvalidInputError(SurfacerError, ValueError):
    """Raised when an operation receives arguments that violate its contract."""


class GridBoundaryError(SurfacerError, ValueError):
    """Raised when a grid query needs support voxels that do not exist."""


class NonFiniteError(SurfacerError, ArithmeticError):
    """
    Raised when a loss component or gradient is not finite.

    The component attribute names the offending term so the diagnostic can
    point directly at the gradient code that produced it.
    """

    def __init__(self, component: str, value: typing.Any = None):
        """Create an error naming the non-finite component."""
        self.component = component
        self.value = value
        super().__init__(f'Non-finite value "{value}" in component "{component}".')


class EmptyGaussianSetError(SurfacerError, RuntimeError):
    """Raised when an operation leaves the optimized Gaussian set empty."""


class CommandUsageError(SurfacerError, ValueError):
    """Raised when a command rejects the arguments it was invoked with."""

    def __init__(self, action: str, arguments: typing.List[str]):
        """Create an error naming the command and its rejected arguments."""
        self.action = action
        self.arguments = arguments
        super().__init__(f'Invalid arguments for "{action}": {arguments}')
