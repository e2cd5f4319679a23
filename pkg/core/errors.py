"""
Error taxonomy shared by the model, the experiments and the command line.

    ModelError
    ├── ModelDomainError   state outside the model's domain (e.g. U > L)
    ├── CalibrationError   no candidate in the search bounds gave a valid run
    └── InputError         caller broke an operation's contract
        └── ConfigError    malformed configuration document (line-numbered)
"""

from typing import Optional


class ModelError(Exception):
    """Base class for every error raised by the engine."""


class ModelDomainError(ModelError):
    """A state or input left the region where the equations are defined."""

    def __init__(self, message: str, t: Optional[float] = None):
        self.t = t
        self.detail = message
        super().__init__(self._format())

    def _format(self) -> str:
        if self.t is None:
            return self.detail
        return f"t={self.t!r}: {self.detail}"

    def at(self, t: float) -> "ModelDomainError":
        """Copy of this error with the simulation time attached."""
        return ModelDomainError(self.detail, t=t)


class InputError(ModelError):
    """Invalid arguments to an operation."""


class ConfigError(InputError):
    """A configuration document could not be parsed or validated."""

    def __init__(self, message: str, line: Optional[int] = None,
                 section: Optional[str] = None):
        self.line = line
        self.section = section
        self.detail = message

        where = []
        if line is not None:
            where.append(f"line {line}")
        if section is not None:
            where.append(f"[{section}]")
        prefix = " ".join(where)
        super().__init__(f"{prefix}: {message}" if prefix else message)


class CalibrationError(ModelError):
    """Calibration found no valid candidate."""
