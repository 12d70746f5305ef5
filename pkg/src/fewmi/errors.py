"""Exception types shared across the package."""


class FewmiError(Exception):
    """Base class for all package errors."""


class DimensionError(FewmiError, ValueError):
    """Tensor shapes are incompatible for the requested operation."""


class NumericalError(FewmiError, ValueError):
    """Non-finite values detected in a tensor."""


class UsageError(FewmiError, RuntimeError):
    """API called out of order or with inconsistent arguments."""


class ConfigError(FewmiError, ValueError):
    """Invalid configuration. ``problems`` lists every violation found."""

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))


class ParseError(FewmiError, ValueError):
    """Malformed manifest or trial file. Message names file and line."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        loc = ""
        if path is not None:
            loc = f"{path}: " if line is None else f"{path}:{line}: "
        super().__init__(f"{loc}{message}")


class SamplingError(FewmiError, ValueError):
    """Episode sampling or support/query splitting cannot be satisfied."""


class TrainingDivergence(FewmiError, RuntimeError):
    """Training loss became non-finite."""

    def __init__(self, iteration, lr, loss):
        self.iteration = iteration
        self.lr = lr
        self.loss = loss
        super().__init__(
            f"training diverged at iteration {iteration} (lr={lr:.6g}, loss={loss})"
        )
