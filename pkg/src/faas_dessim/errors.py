"""Exception hierarchy shared by every module of the package."""


class FaasSimError(Exception):
    """Base class for all errors raised by faas_dessim."""


class ConfigurationError(FaasSimError, ValueError):
    """A simulation or CLI configuration is unusable."""


class ParameterError(FaasSimError, ValueError):
    """A numeric parameter is outside its allowed range."""


class InputError(FaasSimError, ValueError):
    """Input data (schedule, sample, run set) violates a precondition."""


class FormatError(InputError):
    """A file does not follow its documented grammar."""


class DegenerateSampleError(InputError):
    """Shape statistics requested for a zero-variance sample."""
