"""Exception hierarchy.

Every error carries a stable ``code`` string; the CLI emits it verbatim in
its machine-readable error object.
"""

from __future__ import annotations


class TuranError(ValueError):
    code = "TuranError"

    def to_json(self) -> dict:
        return {"error": self.code, "message": str(self)}


class EmptySizes(TuranError):
    code = "EmptySizes"


class NonPositiveSize(TuranError):
    code = "NonPositiveSize"


class TooFewClasses(TuranError):
    code = "TooFewClasses"


class InvalidArity(TuranError):
    code = "InvalidArity"


class InvalidPartition(TuranError):
    code = "InvalidPartition"


class InvalidGraph(TuranError):
    code = "InvalidGraph"


class InfeasibleDominators(TuranError):
    code = "InfeasibleDominators"


class PreconditionViolated(TuranError):
    code = "PreconditionViolated"


class NumericRange(TuranError):
    code = "NumericRange"


class SizeLimit(TuranError):
    code = "SizeLimit"


class NotIndependent(TuranError):
    code = "NotIndependent"


class ClassClash(TuranError):
    code = "ClassClash"


class Overlap(TuranError):
    code = "Overlap"


class EmptySet(TuranError):
    code = "EmptySet"


class ShapeMismatch(TuranError):
    code = "ShapeMismatch"


class CountTooLarge(TuranError):
    code = "CountTooLarge"


class InvalidWitness(TuranError):
    code = "InvalidWitness"


class NotKtFree(TuranError):
    code = "NotKtFree"


class PeelOverflow(TuranError):
    code = "PeelOverflow"


class BudgetExceeded(TuranError):
    code = "BudgetExceeded"
