from mean_field.exceptions import EmulationError


class RoundTripError(EmulationError):
    """The magnetization read back from the written state disagrees with the mean-field one."""
    exit_code = 3

    def __init__(self, message, temperature, discrepancy):
        super().__init__(message)
        self.temperature = temperature
        self.discrepancy = discrepancy
