"""Exception hierarchy.

Every error carries a module-qualified ``code`` (e.g. ``"ec_fp.AmbiguousOrder"``)
so the CLI can surface where a failure originated.
"""


class MWFError(Exception):
    module = "mwf"

    @property
    def code(self) -> str:
        return f"{self.module}.{type(self).__name__}"


# fp_core
class FpError(MWFError):
    module = "fp_core"


class ZeroInverse(FpError, ZeroDivisionError):
    pass


class NonResidue(FpError, ValueError):
    pass


class RangeTooLarge(FpError, ValueError):
    pass


class NotPrime(FpError, ValueError):
    pass


# ec_fp
class EcFpError(MWFError):
    module = "ec_fp"


class CurveMismatch(EcFpError, ValueError):
    pass


class SingularCurve(EcFpError, ValueError):
    pass


class NotOnCurve(EcFpError, ValueError):
    pass


class AmbiguousOrder(EcFpError, ArithmeticError):
    pass


class BadFactorization(EcFpError, ValueError):
    pass


class ClosureBudgetExceeded(EcFpError, RuntimeError):
    pass


class SamplingExhausted(EcFpError, RuntimeError):
    pass


# ec_q
class EcQError(MWFError):
    module = "ec_q"


class BadPrime(EcQError, ValueError):
    pass


class PrecisionNotReached(EcQError, ArithmeticError):
    def __init__(self, msg, result=None):
        super().__init__(msg)
        self.result = result


class IndeterminateRank(EcQError, ArithmeticError):
    pass


# isogeny
class IsogenyError(MWFError):
    module = "isogeny"


class NotTwoTorsion(IsogenyError, ValueError):
    pass


class NotOddTorsion(IsogenyError, ValueError):
    pass


class DomainMismatch(IsogenyError, ValueError):
    pass


class NoIsomorphismFound(IsogenyError, ArithmeticError):
    pass


# fingerprint
class FingerprintError(MWFError):
    module = "fingerprint"


class EmptyOverlap(FingerprintError, ValueError):
    pass


class EmptyWindow(FingerprintError, ValueError):
    pass


class EllDividesDegree(FingerprintError, ValueError):
    pass


class IndexNotComputable(FingerprintError, ArithmeticError):
    pass


# cli
class CliError(MWFError):
    module = "cli"


class ParseError(CliError, ValueError):
    def __init__(self, msg, line=None, field=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{', '.join(where)}: {msg}" if where else msg)
        self.line = line
        self.field = field


class PointNotOnCurve(CliError, ValueError):
    def __init__(self, msg, residual=None):
        super().__init__(msg)
        self.residual = residual
