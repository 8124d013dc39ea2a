"""Recovering coefficients of matrix-valued polynomials from point
evaluations — the decoder every scheme shares.

An answer polynomial h(x) = sum_k C_k x^k with matrix coefficients is
known only through values Z_i = h(x_i) at distinct nonzero points.  The
Vandermonde system tying answers to coefficients is invertible whenever
the points are distinct; instead of inverting it we expand the Lagrange
basis polynomials once and read each coefficient as a weighted sum of
the answer matrices (O(N^2) scalar work per matrix entry).
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Sequence

from .errors import DimensionError
from .field import PrimeField
from .linalg import FieldMatrix, scalar_axpy


@dataclass(frozen=True)
class EvaluationSet:
    """Distinct nonzero points x_i with the matrix values h(x_i)."""

    field: PrimeField
    points: tuple[int, ...]
    values: tuple[FieldMatrix, ...] = dc_field(default=())

    def __init__(self, field: PrimeField, points: Sequence[int],
                 values: Sequence[FieldMatrix]):
        q = field.modulus
        pts = tuple(int(p) % q for p in points)
        vals = tuple(values)
        if len(pts) != len(vals):
            raise ValueError(f"{len(pts)} points but {len(vals)} values")
        if not pts:
            raise ValueError("need at least one evaluation")
        if any(p == 0 for p in pts):
            raise ValueError("evaluation points must be nonzero")
        if len(set(pts)) != len(pts):
            raise ValueError("evaluation points must be distinct")
        shape = vals[0].shape
        for v in vals:
            if v.field != field:
                raise ValueError("value matrix from a different field")
            if v.shape != shape:
                raise DimensionError("value matrices must share one shape")
        object.__setattr__(self, "field", field)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)


def lagrange_coefficient_rows(field: PrimeField, points: Sequence[int]) -> list[list[int]]:
    """Coefficient vectors (ascending degree) of the Lagrange basis polys.

    Row i holds the coefficients of L_i(x), the unique degree-(N-1)
    polynomial with L_i(x_i) = 1 and L_i(x_j) = 0 for j != i.
    """
    q = field.modulus
    pts = [p % q for p in points]
    n = len(pts)
    # master(x) = prod_i (x - x_i), ascending coefficients
    master = [1]
    for p in pts:
        master = [0] + master
        neg = (-p) % q
        for k in range(len(master) - 1):
            master[k] = (master[k] + neg * master[k + 1]) % q
    rows = []
    for i, p in enumerate(pts):
        # synthetic division of master by (x - x_i)
        quot = [0] * n
        quot[n - 1] = master[n]
        for k in range(n - 1, 0, -1):
            quot[k - 1] = (master[k] + p * quot[k]) % q
        rem = (master[0] + p * quot[0]) % q
        assert rem == 0, "x_i is a root of the master polynomial"
        denom = 0
        for k in range(n - 1, -1, -1):
            denom = (denom * p + quot[k]) % q
        # distinct points guarantee denom != 0 (no zero pivot)
        assert denom != 0, "distinct points give a nonzero denominator"
        scale = field.inv(denom)
        rows.append([c * scale % q for c in quot])
    return rows


def interpolate_all(ev: EvaluationSet) -> list[FieldMatrix]:
    """All coefficient matrices C_0..C_{N-1} of the degree-(N-1) polynomial
    through the N evaluations."""
    basis = lagrange_coefficient_rows(ev.field, ev.points)
    n = len(ev.points)
    shape = ev.values[0].shape
    coeffs = []
    for k in range(n):
        acc = FieldMatrix.zeros(ev.field, *shape)
        for i in range(n):
            w = basis[i][k]
            if w:
                acc = scalar_axpy(acc, w, ev.values[i])
        coeffs.append(acc)
    return coeffs


def interpolate_subset(ev: EvaluationSet, wanted_degrees: Sequence[int]) -> list[FieldMatrix]:
    """Only the requested coefficient matrices, in the order given.

    Same Lagrange solve as interpolate_all, restricted to the wanted
    degrees; each must lie in [0, N-1].
    """
    n = len(ev.points)
    for d in wanted_degrees:
        if not 0 <= d < n:
            raise ValueError(f"degree {d} outside [0, {n - 1}]")
    basis = lagrange_coefficient_rows(ev.field, ev.points)
    shape = ev.values[0].shape
    out = []
    for d in wanted_degrees:
        acc = FieldMatrix.zeros(ev.field, *shape)
        for i in range(n):
            w = basis[i][d]
            if w:
                acc = scalar_axpy(acc, w, ev.values[i])
        out.append(acc)
    return out


def evaluate_poly(coeffs: Sequence[FieldMatrix], x: int) -> FieldMatrix:
    """h(x) for a matrix-coefficient polynomial, by Horner's rule."""
    if not coeffs:
        raise ValueError("empty polynomial")
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = scalar_axpy(c, x, acc)
    return acc
