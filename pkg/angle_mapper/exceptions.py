from mean_field.exceptions import EmulationError


class NotRepresentableError(EmulationError, ValueError):
    """Populations that single-qubit rotations of |00> cannot produce (p00·p11 != p01·p10)."""
    exit_code = 3


class RefinementFailedError(EmulationError):
    exit_code = 3

    def __init__(self, message, best_distance, angles=None):
        super().__init__(message)
        self.best_distance = best_distance
        self.angles = angles


class CertificationError(EmulationError):
    """A temperature whose written state cannot be brought below the distance threshold."""
    exit_code = 3

    def __init__(self, message, temperature, best_distance):
        super().__init__(message)
        self.temperature = temperature
        self.best_distance = best_distance
