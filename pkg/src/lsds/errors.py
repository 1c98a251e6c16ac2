"""Exception types raised by the simulator."""


class LsdsError(Exception):
    """Base class for all simulator errors."""


class InvalidArgumentError(LsdsError, ValueError):
    pass


class InfeasibleScenarioError(LsdsError):
    """No attacker location satisfies the falsehood-radius constraint."""


class DegenerateDetectorError(LsdsError, ValueError):
    """The hypotheses are indistinguishable, so rates are undefined in closed form."""


class NumericalError(LsdsError, ArithmeticError):
    pass


class ConfigError(LsdsError):
    def __init__(self, message: str, line: int | None = None, key: str | None = None):
        self.line = line
        self.key = key
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
