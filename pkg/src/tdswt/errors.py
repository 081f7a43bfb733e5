"""Exception and warning types raised across the package."""


class DegeneracyError(ValueError):
    """A generator equation hits a vanishing energy denominator."""

    def __init__(self, message: str, pair: tuple[int, int]):
        super().__init__(message)
        self.pair = pair


class OutOfDomainError(ValueError):
    """Flux outside the branch on which the transmon model is defined."""


class ResonanceError(ValueError):
    """A qubit-cavity detuning is too small for the dispersive treatment."""


class TangentPoleError(ValueError):
    """Tangential pulse argument reaches the pole of tan at pi/2."""


class QuadratureError(ValueError):
    """Sample grid unusable for composite Simpson quadrature."""


class DispersiveValidityWarning(UserWarning):
    """Dispersive or dispersive-adiabaticity parameter is not small."""


class ConvergenceWarning(UserWarning):
    """Time stepping did not reach the requested self-convergence."""
