"""Exception types shared across the package."""


class StepscoreError(Exception):
    """Base class for all package-specific errors."""


class InconsistentTrajectory(StepscoreError):
    """Trajectory fields disagree (e.g. format flag vs. step count)."""


class LabelKindMismatch(StepscoreError):
    """A step label names a verdict the step's kind cannot carry."""


class EmptyGoldenList(StepscoreError):
    """Exact-match scoring needs at least one golden answer."""


class BoundsViolation(StepscoreError):
    """A reward input is outside its documented range."""


class MissingLabels(StepscoreError):
    """A parsed trajectory needs step labels before it can be scored."""


class FormatNotOk(StepscoreError):
    """An operation that requires a parsed trajectory got a sentinel."""


class BackendUnavailable(StepscoreError):
    """An external backend could not be reached or kept failing."""


class DuplicateId(StepscoreError):
    """Two corpus documents or input records share an id."""


class GeneratorStalled(StepscoreError):
    """The generator emitted no stop marker within the character cap."""


class NoMutationSite(StepscoreError):
    """The requested mutation has no applicable site in the text."""


class ConfigError(StepscoreError):
    """A run config file is missing, malformed, or out of bounds."""
