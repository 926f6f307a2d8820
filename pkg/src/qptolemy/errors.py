"""Exception hierarchy shared by every module."""


class PtolemyError(Exception):
    """Base class for all engine errors."""


class InvalidTriangulation(PtolemyError, ValueError):
    def __init__(self, message, triangle=None):
        if triangle is not None:
            message = f"triangle {triangle}: {message}"
        super().__init__(message)
        self.triangle = triangle


class UnknownArc(PtolemyError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown arc"


class FlipOnSelfFoldedArc(PtolemyError, ValueError):
    pass


class PermutationOutOfRange(PtolemyError, ValueError):
    pass


class DegenerateQuadrilateral(PtolemyError, ValueError):
    pass


class DimensionMismatch(PtolemyError, ValueError):
    pass


class WordNotApplicable(PtolemyError, ValueError):
    def __init__(self, step, reason):
        super().__init__(f"generator {step}: {reason}")
        self.step = step
        self.reason = reason


class NonComposable(PtolemyError, ValueError):
    pass


class RuleNotApplicable(PtolemyError, ValueError):
    def __init__(self, position, reason):
        super().__init__(f"position {position}: {reason}")
        self.position = position
        self.reason = reason


class PatternMismatch(RuleNotApplicable):
    pass


class ScriptStepFailed(PtolemyError, ValueError):
    def __init__(self, index, rule, reason):
        super().__init__(f"step {index} ({rule}): {reason}")
        self.index = index
        self.rule = rule
        self.reason = reason


class FinalWordMismatch(PtolemyError, ValueError):
    pass


class BudgetExhausted(PtolemyError, RuntimeError):
    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best


class NotARelator(PtolemyError, ValueError):
    pass


class NotTwoArcConfiguration(PtolemyError, ValueError):
    pass


class UnknownTwist(PtolemyError, KeyError):
    def __str__(self):
        return str(self.args[0]) if self.args else "unknown twist"


class InconsistentSystem(PtolemyError, ValueError):
    pass


class NonIntegralCoefficient(PtolemyError, ValueError):
    pass


class FormatError(PtolemyError, ValueError):
    pass
