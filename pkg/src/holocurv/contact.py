"""Contact types and the derivative-vanishing ladder shared by curves and surfaces."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

TOL_REL = 1e-8


@dataclass
class ContactClass:
    """Detected singularity of a contact function.

    ``kind`` is ``"A"`` (with ``k``; ``k == 0`` means the function is not
    critical) or ``"Degenerate"`` (with ``reason``).  ``residuals[j]`` is the
    j-th Taylor coefficient relative to its majorant scale.
    """

    kind: str
    k: int | None = None
    residuals: list = field(default_factory=list)
    branch_invariant: bool = True
    reason: str = ""
    checks: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    @property
    def label(self) -> str:
        return f"A{self.k}" if self.kind == "A" else "Degenerate"

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "kind": self.kind,
            "k": self.k,
            "residuals": [float(r) for r in self.residuals],
            "branch_invariant": self.branch_invariant,
            "reason": self.reason,
            "checks": self.checks,
            "warnings": list(self.warnings),
        }


def ladder(coeffs, scales, tol: float = TOL_REL, start: int = 0):
    """Index of the first Taylor coefficient that does not vanish.

    Coefficient j vanishes when ``|coeffs[j]| <= tol * scales[j]``; ``scales``
    are coefficients of a majorant (the same computation done on absolute
    values), so rounding in a cancelling sum is measured against the size of
    the terms that cancelled.  Returns (index or None, residual list).
    """
    c = np.abs(np.asarray(coeffs))
    s = np.abs(np.asarray(scales))
    # coefficients far below the whole jet's size count as zero (guards underflow)
    floor = max(1e-300, 1e-30 * float(s.max(initial=0.0)))
    residuals = []
    for j in range(start, len(c)):
        sc = max(float(s[j]), floor)
        residuals.append(float(c[j]) / sc)
        if c[j] > tol * sc:
            return j, residuals
    return None, residuals


def ladder_margin(residuals, tol: float = TOL_REL, band: float = 1e3) -> bool:
    """True when some tested coefficient sits within ``band`` of the threshold."""
    return any(tol / band < r < tol * band for r in residuals)


def classify_series(coeffs, scales, tol: float = TOL_REL) -> ContactClass:
    """A_k from a 1-variable Taylor series: coefficients 1..k vanish, k+1 does not."""
    idx, res = ladder(coeffs, scales, tol, start=1)
    if idx is None:
        out = ContactClass("Degenerate", None, res, reason="order exceeds jet depth")
    else:
        out = ContactClass("A", idx - 1, res)
    if ladder_margin(res, tol):
        out.warnings.append("a tested coefficient is within 1e3 of the vanishing tolerance")
    return out
