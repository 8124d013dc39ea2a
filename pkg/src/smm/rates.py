"""Closed-form rate and capacity calculators, and the sweep tables that
compare them.

The one-sided capacity is exactly (N-l)/N.  For the fully-secure scheme
two numbers are reported side by side: the closed form built on the
rounded-up split count r = ceil(sqrt(N)) - l, and the rate of the plan
that is actually executable, r = floor(sqrt(N)) - l.  The two differ
exactly when N is not a perfect square, because the rounded-up choice
then needs (r+l)^2 > N answers; the table flags those rows instead of
silently picking a side.

All stored rates are exact rationals; floats appear only in the CSV
display columns.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import FeasibilityError
from .schemes import r_ceil, r_floor


def one_sided_capacity(n: int, ell: int) -> Fraction:
    """(N-l)/N, the exact capacity of the one-sided model."""
    if n < 1:
        raise ValueError("need at least one server")
    if ell < 0 or ell >= n:
        raise ValueError(f"collusion bound must satisfy 0 <= l < N, got l={ell}")
    return Fraction(n - ell, n)


def _ceil_sqrt(n: int) -> int:
    s = math.isqrt(n)
    return s if s * s == n else s + 1


def fully_secure_rate(n: int, ell: int) -> tuple[Fraction, Optional[Fraction], bool]:
    """(closed-form rate, executable-plan rate or None, divergence flag).

    The closed form uses r = ceil(sqrt(N)) - l.  The executable rate uses
    the largest r with (r+l)^2 <= N and is None when even r=1 does not
    fit.  The flag is raised exactly when N < (ceil(sqrt(N))-l+l)^2,
    i.e. when the closed-form choice would need more than N answers.
    """
    if n < 1:
        raise ValueError("need at least one server")
    if ell < 0 or ell >= n:
        raise ValueError(f"collusion bound must satisfy 0 <= l < N, got l={ell}")
    rp = r_ceil(n, ell)
    if rp < 1:
        raise FeasibilityError(
            f"no fully-secure scheme: N={n} gives split count {rp} < 1 for l={ell}"
        )
    paper = Fraction(rp * rp, (rp + ell) ** 2)
    rf = r_floor(n, ell)
    feasible = Fraction(rf * rf, (rf + ell) ** 2) if rf >= 1 else None
    diverges = n < (rp + ell) ** 2
    return paper, feasible, diverges


@dataclass(frozen=True)
class RatePoint:
    """One row of a rate comparison table."""

    n: int
    ell: int
    one_sided: Fraction
    fully_paper: Optional[Fraction]
    fully_feasible: Optional[Fraction]
    diverges: bool


def rate_point(n: int, ell: int) -> RatePoint:
    one = one_sided_capacity(n, ell)
    try:
        paper, feasible, diverges = fully_secure_rate(n, ell)
    except FeasibilityError:
        paper, feasible, diverges = None, None, False
    return RatePoint(n, ell, one, paper, feasible, diverges)


FIX_ELL = "fix-l-vary-N"
FIX_N = "fix-N-vary-l"


def sweep_table(mode: str, fixed: int, lo: int, hi: int) -> list[RatePoint]:
    """Ordered rate points: either l fixed with N in [lo, hi], or N fixed
    with l in [lo, hi]."""
    if lo > hi:
        raise ValueError(f"empty range [{lo}, {hi}]")
    if mode == FIX_ELL:
        return [rate_point(n, fixed) for n in range(lo, hi + 1) if fixed < n]
    if mode == FIX_N:
        return [rate_point(fixed, ell) for ell in range(lo, hi + 1) if ell < fixed]
    raise ValueError(f"unknown sweep mode {mode!r}")


def _frac_str(f: Optional[Fraction]) -> str:
    if f is None:
        return ""
    return f"{f.numerator}/{f.denominator}"


def _float_str(f: Optional[Fraction]) -> str:
    return "" if f is None else f"{float(f):.6f}"


CSV_HEADER = (
    "N,ell,one_sided,fully_paper,fully_feasible,diverges,"
    "one_sided_float,fully_paper_float,fully_feasible_float"
)


def to_csv(points: list[RatePoint]) -> str:
    """CSV table: rationals as p/q plus 6-decimal float display columns."""
    lines = [CSV_HEADER]
    for p in points:
        lines.append(
            f"{p.n},{p.ell},{_frac_str(p.one_sided)},{_frac_str(p.fully_paper)},"
            f"{_frac_str(p.fully_feasible)},{int(p.diverges)},"
            f"{_float_str(p.one_sided)},{_float_str(p.fully_paper)},"
            f"{_float_str(p.fully_feasible)}"
        )
    return "\n".join(lines) + "\n"
