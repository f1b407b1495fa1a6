"""Exception hierarchy shared by the library and the command line."""


class RoadsenseError(Exception):
    """Base class. ``exit_code`` and ``code`` drive the CLI error line."""

    exit_code = 1
    code = "error"


class ConfigError(RoadsenseError, ValueError):
    exit_code = 2
    code = "config"


class DataError(RoadsenseError, ValueError):
    exit_code = 3
    code = "data"


class ModelError(RoadsenseError, ValueError):
    exit_code = 4
    code = "model"


class NoRuleFiredError(RoadsenseError):
    """Raised by fuzzy inference when every output activation is zero."""

    exit_code = 3
    code = "fuzzy"


class TrainingDiverged(ModelError):
    def __init__(self, epoch, batch, value):
        super().__init__(f"loss became {value} at epoch {epoch}, batch {batch}")
        self.epoch = epoch
        self.batch = batch
