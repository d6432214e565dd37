class ChernoffInfoError(Exception):
    """Base class for every error raised by chernoff_info."""


class ConstructionError(ChernoffInfoError, ValueError):
    pass


class DomainError(ChernoffInfoError, ValueError):
    pass


class DimensionError(ChernoffInfoError, ValueError):
    pass


class RangeError(ChernoffInfoError, ValueError):
    pass


class UnsupportedError(ChernoffInfoError, ValueError):
    pass


class ConsistencyError(ChernoffInfoError, ArithmeticError):
    pass


class NonConvergenceError(ChernoffInfoError, RuntimeError):
    def __init__(self, message, alpha=None, gap=None, iterations=None):
        """
        Raised when the geodesic bisection runs out of iterations.

        :param alpha: Exponent of the best iterate seen (smallest absolute gap).
        :param gap: Bregman bisector gap at that iterate.
        :param iterations: Number of iterations performed.
        """
        super(NonConvergenceError, self).__init__(message)
        self.alpha = alpha
        self.gap = gap
        self.iterations = iterations


class ProblemFileError(ChernoffInfoError, ValueError):
    def __init__(self, message, path=None, line=None):
        """An unusable problem file; line is the 1-based line the diagnostic points at."""
        super(ProblemFileError, self).__init__(message)
        self.path = path
        self.line = line

    def diagnostic(self):
        return "%s:%d: %s" % (self.path, self.line or 1, self.args[0])
