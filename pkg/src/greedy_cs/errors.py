"""Exception types raised across the package."""


class GreedyCSError(Exception):
    """Base class for all package errors."""


class DimensionMismatch(GreedyCSError, ValueError):
    pass


class NonFinite(GreedyCSError, ValueError):
    pass


class ZeroColumn(GreedyCSError, ValueError):
    def __init__(self, index):
        self.index = index
        super().__init__(f"column {index} has (near) zero norm")


class NormViolation(GreedyCSError, ValueError):
    def __init__(self, index, norm):
        self.index = index
        self.norm = norm
        super().__init__(f"column {index} has norm {norm!r}, expected 1")


class InvalidSparseVector(GreedyCSError, ValueError):
    pass


class InvalidSparsity(GreedyCSError, ValueError):
    pass


class RankDeficient(GreedyCSError, ArithmeticError):
    def __init__(self, support, sigma_min=None):
        self.support = tuple(support)
        self.sigma_min = sigma_min
        super().__init__(
            f"subdictionary on {list(self.support)} is rank deficient "
            f"(sigma_min={sigma_min!r})")


class OrderOutOfRange(GreedyCSError, ValueError):
    pass


class BudgetExceeded(GreedyCSError, RuntimeError):
    def __init__(self, count, budget):
        self.count = count
        self.budget = budget
        super().__init__(
            f"enumeration needs {count} evaluations, budget is {budget}")


class EigenFailure(GreedyCSError, ArithmeticError):
    pass


class HypothesisViolated(GreedyCSError, ValueError):
    def __init__(self, index, value):
        self.index = index
        self.value = value
        super().__init__(
            f"<Phi a, phi_{index}> = {value!r} but atom lies outside Omega")


class NotApplicable(GreedyCSError, ValueError):
    pass


class DegenerateDelta(GreedyCSError, ValueError):
    pass


class ParseError(GreedyCSError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f"line {line}"
            if column is not None:
                loc += f", column {column}"
            loc += ": "
        super().__init__(loc + message)


class ConfigError(GreedyCSError, ValueError):
    pass


class EmptyInput(GreedyCSError, ValueError):
    pass
