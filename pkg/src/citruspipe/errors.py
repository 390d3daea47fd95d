"""Exception hierarchy.

Everything raised deliberately by the package derives from ``CitrusError``.
The CLI maps ``ConfigError`` to exit code 2 and ``DataError``/``ModelError``
to exit code 3.
"""


class CitrusError(Exception):
    pass


class ConfigError(CitrusError):
    pass


class InvalidHyperparameter(ConfigError, ValueError):
    pass


class DataError(CitrusError):
    pass


class PathNotFound(DataError, FileNotFoundError):
    pass


class EmptyClass(DataError):
    pass


class DecodeError(DataError):
    pass


class DegenerateSplit(DataError):
    pass


class DegenerateInput(DataError, ValueError):
    pass


class ShapeMismatch(DataError, ValueError):
    pass


class InvalidLabel(DataError, ValueError):
    pass


class MissingClass(DataError, ValueError):
    pass


class FormatError(DataError):
    pass


class ModelError(CitrusError):
    pass


class ModelLoadError(ModelError):
    pass


class TrainingDiverged(ModelError):
    pass
