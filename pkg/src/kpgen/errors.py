"""Exception hierarchy; the CLI maps these onto exit codes."""


class KpgenError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(KpgenError):
    """Invalid configuration value, detected before any work starts."""


class DataError(KpgenError):
    """Malformed input data (bad record, bad file, version mismatch)."""


class TrainingError(KpgenError):
    """Training diverged or was fed an unusable batch."""
