"""Exception hierarchy. The CLI maps the three families to exit codes 2 and 3."""


class LtxError(Exception):
    pass


class InputError(LtxError, ValueError):
    """Invalid user input (exit code 2)."""


class BudgetError(LtxError):
    """Ran out of precision or field degree (exit code 3)."""


class CheckFailure(LtxError):
    """A verification found a genuine mismatch."""


# padic_core
class InvalidPrime(InputError):
    pass


class InvalidDegree(InputError):
    pass


class PrecisionExhausted(BudgetError):
    pass


# plinalg
class NonUnitDeterminant(LtxError, ArithmeticError):
    pass


class NotInvertibleModP(LtxError, ArithmeticError):
    pass


class InfiniteModule(LtxError, ArithmeticError):
    pass


class DimensionMismatch(InputError):
    pass


# powerseries
class ConstantTermNonzero(LtxError, ArithmeticError):
    pass


class SingularLinearPart(LtxError, ArithmeticError):
    pass


class ConvergenceViolation(LtxError, ArithmeticError):
    pass


class TailTooWeak(BudgetError):
    pass


# lubin_tate
class NonInvertibleU(InputError):
    pass


class IntegralityFailure(CheckFailure):
    pass


class ThresholdViolation(LtxError, ArithmeticError):
    pass


# galois_rep
class DegreeBudgetExceeded(BudgetError):
    pass


class RandomnessExhausted(BudgetError):
    pass


# cohomology / epsilon_elements
class HypothesisFViolated(LtxError, ArithmeticError):
    pass


class HypothesisViolated(LtxError, ArithmeticError):
    pass


class TraceNotOne(CheckFailure):
    pass


class ConjugatorNotRational(CheckFailure):
    pass


# characters
class InconsistentConductorData(CheckFailure):
    pass


class IncompatibleResidueDegree(InputError):
    pass


class MissingGaussSum(InputError):
    pass
