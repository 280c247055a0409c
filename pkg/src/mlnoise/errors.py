"""Exception hierarchy shared by all mlnoise modules."""


class MLNoiseError(Exception):
    """Base class for every error raised by mlnoise."""


class DomainError(MLNoiseError, ValueError):
    """An argument lies outside the domain of the requested operation."""


class ConvergenceError(MLNoiseError, ArithmeticError):
    """A numerical scheme could not reach its accuracy target."""


class NoValidLength(MLNoiseError, RuntimeError):
    """No candidate length up to the ladder cap yields a non-negative circulant spectrum."""


class InputFormatError(MLNoiseError, ValueError):
    """A noise file could not be parsed."""
