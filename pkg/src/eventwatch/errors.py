"""Error taxonomy shared by the library, CLI, and service.

ConfigError: bad parameters or config files (CLI exit 1, HTTP 400/422).
DataError: unusable input data (CLI exit 2, HTTP 400/422).
FitError: a model fit failed; the detector catches it and falls back.
"""


class ConfigError(ValueError):
    pass


class DataError(ValueError):
    pass


class FitError(RuntimeError):
    pass
