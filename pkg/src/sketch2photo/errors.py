"""Exception types shared across the package."""


class Sketch2PhotoError(Exception):
    """Base class for package errors."""


class ConfigurationError(Sketch2PhotoError):
    """Invalid or missing configuration (paths, option values, weights)."""


class DataError(Sketch2PhotoError):
    """A dataset item or data file could not be used."""


class CheckpointError(Sketch2PhotoError):
    """Base class for checkpoint problems."""


class CheckpointIntegrityError(CheckpointError):
    """Checkpoint file is corrupt or truncated (checksum/layout mismatch)."""


class UnsupportedVersionError(CheckpointError):
    """Checkpoint or archive was written by an unknown format version."""


class TrainingDivergedError(Sketch2PhotoError):
    """A loss became non-finite; a diagnostic snapshot was written if possible."""


class ServiceError(Sketch2PhotoError):
    """The inference service was unreachable or answered with an error."""
