"""Exception hierarchy shared by all modules.

Each exception carries a short ``code`` used by the CLI when mapping errors
to structured payloads.
"""


class LoadoutError(Exception):
    code = "error"


class InvalidParams(LoadoutError, ValueError):
    code = "invalid_params"


class DimensionMismatch(LoadoutError, ValueError):
    code = "dimension_mismatch"


class SingularMatrix(LoadoutError, ArithmeticError):
    code = "singular_matrix"


class IndeterminateSign(LoadoutError, ArithmeticError):
    """An interval enclosure still contains zero at the precision cap."""

    code = "indeterminate_sign"

    def __init__(self, message, bits=None):
        super().__init__(message)
        self.bits = bits


class EnumerationTooLarge(LoadoutError):
    code = "enumeration_too_large"


class SignLemmaViolation(LoadoutError, AssertionError):
    code = "sign_lemma_violation"


class OracleDisagreement(LoadoutError, AssertionError):
    """The cell route and the simplex route disagree on a subset."""

    code = "oracle_disagreement"


class SolverIterationLimit(LoadoutError, RuntimeError):
    code = "iteration_limit"


class BoundViolation(LoadoutError, AssertionError):
    code = "bound_violation"


class DesignInvalid(LoadoutError, ValueError):
    code = "design_invalid"
