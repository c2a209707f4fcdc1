"""Exception types shared across the package."""


class MonoforgeError(Exception):
    """Base class for all package errors."""


class MissingVariable(MonoforgeError):
    pass


class TermBudgetExceeded(MonoforgeError):
    def __init__(self, cap):
        super().__init__(f"term budget {cap} exceeded during expansion")
        self.cap = cap


class NotMonotone(MonoforgeError):
    pass


class NotADivisor(MonoforgeError):
    pass


class EnumerationTooLarge(MonoforgeError):
    pass


class VariableUniverseMismatch(MonoforgeError):
    pass


class DivisionByZero(MonoforgeError):
    pass


class NotRegular(MonoforgeError):
    pass


class GraphExhausted(MonoforgeError):
    def __init__(self, stage):
        super().__init__(f"no edges left before matching edge {stage + 1} was chosen")
        self.stage = stage


class NotInducedMatching(MonoforgeError):
    pass


class WeightExceedsLength(MonoforgeError):
    pass


class SparsityExceedsRows(MonoforgeError):
    pass


class ParameterDegeneration(MonoforgeError):
    pass


class SunflowerNotFound(MonoforgeError):
    def __init__(self, size, detail=""):
        msg = f"no acceptable sunflower found in the size-{size} slice"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)
        self.size = size


class PreconditionViolated(MonoforgeError):
    pass
