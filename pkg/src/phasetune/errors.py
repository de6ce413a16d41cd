"""Shared exception types."""


class PhasetuneError(Exception):
    pass


class ConfigurationError(PhasetuneError):
    """Invalid parameter set, config file, or design-space membership."""


class TraceParseError(PhasetuneError):
    """Malformed trace input; carries the offending line number."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class TuningError(PhasetuneError):
    """Characterization aborted; carries phase id and config."""

    def __init__(self, message: str, phase_id=None, config=None):
        super().__init__(message)
        self.phase_id = phase_id
        self.config = config
