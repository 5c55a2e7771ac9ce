"""Exception hierarchy. CLI exit codes key off the two base classes."""


class ModelValidationError(ValueError):
    """Inputs outside the model's admissible domain (CLI exit code 2)."""


class NumericalFailure(ArithmeticError):
    """A computation that should succeed for valid inputs broke down (exit code 3)."""


class RankDeficientCorrelation(ModelValidationError):
    pass


class CholeskyFailure(NumericalFailure):
    pass


class AsymptoteUndefined(ModelValidationError):
    pass


class NonStationary(ModelValidationError):
    pass


class ZeroVolPortfolio(ModelValidationError):
    pass


class UnattainableFactor(ModelValidationError):
    pass
