"""Exception hierarchy shared by all modules.

Every error carries a short machine-readable ``code`` used by the CLI error
object.
"""

from __future__ import annotations


class GermError(Exception):
    code = "germ_error"

    def to_json(self) -> dict:
        return {"code": self.code, "message": str(self)}


class OrderMismatch(GermError):
    code = "order_mismatch"


class NotInvertible(GermError):
    code = "not_invertible"


class ResonantMultiplier(GermError):
    code = "resonant_multiplier"

    def __init__(self, n: int, divisor: complex):
        super().__init__(f"resonant multiplier: |lambda^{n} - lambda| = {abs(divisor):.3e}")
        self.n = n
        self.divisor = divisor

    def to_json(self) -> dict:
        return {**super().to_json(), "n": self.n}


class ZeroMultiplier(GermError):
    code = "zero_multiplier"


class NotParabolic(GermError):
    code = "not_parabolic"


class DegenerateParabolic(GermError):
    code = "degenerate_parabolic"


class InsufficientOrder(GermError):
    code = "insufficient_order"

    def __init__(self, message: str, required: int):
        super().__init__(message)
        self.required = required

    def to_json(self) -> dict:
        return {**super().to_json(), "required_order": self.required}


class DomainViolation(GermError):
    code = "domain_violation"

    def __init__(self, message: str, point: complex | None = None):
        super().__init__(message)
        self.point = point

    def to_json(self) -> dict:
        out = super().to_json()
        if self.point is not None:
            out["point"] = [self.point.real, self.point.imag]
        return out


class BranchError(GermError):
    code = "branch_error"


class DepthExceeded(GermError):
    code = "depth_exceeded"


class CertificationFailure(GermError):
    code = "certification_failure"
