"""Exception hierarchy. The CLI maps each family onto a stable exit code."""


class ZDError(Exception):
    exit_code = 1


class InputError(ZDError, ValueError):
    """Malformed input: wrong arity, invalid probability, bad schema."""

    exit_code = 2


class InfeasibleError(ZDError, ValueError):
    exit_code = 3
    label = "infeasible"


class NotControllableError(InfeasibleError):
    label = "not controllable"


class TargetInfeasibleError(InfeasibleError):
    label = "target infeasible"


class BInfeasibleError(InfeasibleError):
    label = "b infeasible"


class DegenerateError(ZDError, ArithmeticError):
    """Numerical degeneracy: singular determinant, theta outside (0, 1), K = 0."""

    exit_code = 4
