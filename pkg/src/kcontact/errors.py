"""Exception hierarchy shared by every module.

Each error may carry ``rule``: a short statement of the mathematical
condition being enforced, surfaced verbatim in CLI error reports.
"""

from __future__ import annotations


class KContactError(ValueError):
    rule: str | None = None

    def __init__(self, message: str, *, rule: str | None = None, field: str | None = None):
        super().__init__(message)
        if rule is not None:
            self.rule = rule
        self.field = field

    def to_dict(self) -> dict:
        out = {"type": type(self).__name__, "message": str(self)}
        if self.rule:
            out["rule"] = self.rule
        if self.field:
            out["field"] = self.field
        return out


class NonCoprimeModuli(KContactError):
    rule = "CRT moduli must be pairwise coprime"


class SingularSystem(KContactError):
    pass


class InvalidChain(KContactError):
    rule = "chain coefficients b_i >= 2 (self-intersections -b_i <= -2)"


class DegenerateConfiguration(KContactError):
    rule = "b*d1*d2 - a1*d2 - a2*d1 > 0 for valid chain data"


class IncompatibleMultiplicities(KContactError):
    rule = "surfaces through a common point need pairwise coprime multiplicities"


class BasisNotIntegral(KContactError):
    rule = "generators of H^2(X,Z) must have integral coordinates and pairings"


class H1NotZero(KContactError):
    rule = "H_1(M,Z)=0 iff H_1(X)=0, H^2(X,Z) -> sum H^2(D_i,Z_mi) onto, and c1(M/Z_mu) primitive"


class MissingW2Data(KContactError):
    rule = "spin check needs w2 of the base (w2_zero flag or a canonical class)"


class NotRealizable(KContactError):
    rule = "torsion of H_2 of a Smale-Barden manifold pairs as (sum Z_k)^2 apart from the X_j summand"


class NotNegativeDefinite(KContactError):
    rule = "a contractible configuration has negative definite intersection matrix"


class EffectivityViolation(KContactError):
    rule = "m1 < chi1 for the positive curve (K + D2 effective)"


class InvalidParams(KContactError):
    pass


class IncompleteLedger(KContactError):
    pass


class ParseError(KContactError):
    pass


class SchemaError(KContactError):
    pass


class InvariantViolation(KContactError):
    pass
