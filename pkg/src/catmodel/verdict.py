"""Three-valued outcomes for bounded searches.

FALSE is only produced together with a certificate by callers; bound
exhaustion without a refutation must surface as INCONCLUSIVE.
"""

from __future__ import annotations

import enum


class Verdict(enum.Enum):
    TRUE = "true"
    FALSE = "false"
    INCONCLUSIVE = "inconclusive"

    def __bool__(self):
        return self is Verdict.TRUE

    @property
    def decided(self) -> bool:
        return self is not Verdict.INCONCLUSIVE

    @staticmethod
    def of(flag: bool) -> "Verdict":
        return Verdict.TRUE if flag else Verdict.FALSE

    def both_and(self, other: "Verdict") -> "Verdict":
        if self is Verdict.FALSE or other is Verdict.FALSE:
            return Verdict.FALSE
        if self is Verdict.INCONCLUSIVE or other is Verdict.INCONCLUSIVE:
            return Verdict.INCONCLUSIVE
        return Verdict.TRUE
