"""Exception classes shared across the package."""


class DimensionError(ValueError):
    """Empty, too small or mismatching image dimensions."""


class ConfigurationError(ValueError):
    """Invalid parameters (degenerate range, single-date stack ...)."""


class FormatError(ValueError):
    """Base class for malformed raster, model or manifest files."""


class BadMagicError(FormatError):
    pass


class UnsupportedVersionError(FormatError):
    pass


class TruncatedError(FormatError):
    """Payload shorter or longer than declared by the header."""


class DimensionOverflowError(FormatError):
    """Header dimensions too large to address."""


class ManifestError(FormatError):
    pass


class DuplicateDateError(ManifestError):
    pass


class MissingFileError(ManifestError, FileNotFoundError):
    pass
