"""Truncated power series with 2x2 complex matrix coefficients.

Arithmetic is exact modulo z^(N+1): every output coefficient n depends only
on input coefficients 0..n, so computing at a higher order and truncating
agrees coefficientwise with computing at the lower order.

The Cayley transforms between moment (Herglotz) series and contractive
(Schur) series live here; the coefficient-stripping engine built on top of
them is in ``matrix_opuc``.
"""

from __future__ import annotations

import numpy as np

from .errors import ShiftResidual, SingularConstantTerm

EYE2 = np.eye(2, dtype=complex)

SHIFT_TOL = 1e-10
COND_LIMIT = 1e12


class TruncSeries:
    """A series sum_n A_n z^n truncated at order N, A_n 2x2 complex."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        coeffs = np.asarray(coeffs, dtype=complex)
        if coeffs.ndim != 3 or coeffs.shape[1:] != (2, 2):
            raise ValueError("coefficients must have shape (N+1, 2, 2)")
        object.__setattr__(self, "coeffs", coeffs)
        coeffs.setflags(write=False)

    def __setattr__(self, name, value):
        raise AttributeError("TruncSeries is immutable")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @classmethod
    def constant(cls, M, order: int) -> "TruncSeries":
        c = np.zeros((order + 1, 2, 2), dtype=complex)
        c[0] = M
        return cls(c)

    @classmethod
    def identity(cls, order: int) -> "TruncSeries":
        return cls.constant(EYE2, order)

    def truncate(self, order: int) -> "TruncSeries":
        if order > self.order:
            raise ValueError("cannot extend a truncated series")
        return TruncSeries(self.coeffs[: order + 1].copy())

    def shift_up(self) -> "TruncSeries":
        """Multiply by z; all coefficients are known, order grows by one."""
        c = np.zeros((len(self.coeffs) + 1, 2, 2), dtype=complex)
        c[1:] = self.coeffs
        return TruncSeries(c)

    def shift_down(self, tol: float = SHIFT_TOL) -> "TruncSeries":
        """Divide by z exactly; the constant coefficient must vanish."""
        residual = float(np.max(np.abs(self.coeffs[0])))
        if residual > tol:
            raise ShiftResidual(
                f"degree-0 coefficient {residual:.3e} exceeds {tol:.1e}")
        return TruncSeries(self.coeffs[1:].copy())

    def __add__(self, other: "TruncSeries") -> "TruncSeries":
        n = min(self.order, other.order)
        return TruncSeries(self.coeffs[: n + 1] + other.coeffs[: n + 1])

    def __sub__(self, other: "TruncSeries") -> "TruncSeries":
        n = min(self.order, other.order)
        return TruncSeries(self.coeffs[: n + 1] - other.coeffs[: n + 1])

    def __neg__(self) -> "TruncSeries":
        return TruncSeries(-self.coeffs)

    def __mul__(self, other: "TruncSeries") -> "TruncSeries":
        n = min(self.order, other.order)
        a, b = self.coeffs, other.coeffs
        out = np.empty((n + 1, 2, 2), dtype=complex)
        for m in range(n + 1):
            out[m] = np.einsum("kij,kjl->il", a[: m + 1], b[m::-1])
        return TruncSeries(out)

    def __repr__(self):
        return f"TruncSeries(order={self.order})"


def series_add(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    return a + b


def series_mul(a: TruncSeries, b: TruncSeries) -> TruncSeries:
    return a * b


def series_inv(a: TruncSeries) -> TruncSeries:
    """Two-sided inverse modulo z^(N+1).

    Requires an invertible constant coefficient (condition number below
    1e12); triangular recursion b_n = -a_0^{-1} sum_{k>=1} a_k b_{n-k}.
    """
    a0 = a.coeffs[0]
    if np.linalg.cond(a0) > COND_LIMIT:
        raise SingularConstantTerm(
            "constant coefficient is singular or too ill-conditioned to invert")
    n = a.order
    inv0 = np.linalg.inv(a0)
    out = np.empty((n + 1, 2, 2), dtype=complex)
    out[0] = inv0
    for m in range(1, n + 1):
        acc = np.einsum("kij,kjl->il", a.coeffs[1: m + 1], out[m - 1:: -1])
        out[m] = -inv0 @ acc
    return TruncSeries(out)


def herglotz_from_moments(C, N: int) -> TruncSeries:
    """F = I + 2 sum_{n=1..N} C_n z^n from moment matrices C_1..C_N."""
    C = list(C)
    if len(C) < N:
        raise ValueError(f"need {N} moment matrices, got {len(C)}")
    coeffs = np.zeros((N + 1, 2, 2), dtype=complex)
    coeffs[0] = EYE2
    for n in range(1, N + 1):
        coeffs[n] = 2.0 * np.asarray(C[n - 1], dtype=complex)
    return TruncSeries(coeffs)


def schur_from_herglotz(F: TruncSeries) -> TruncSeries:
    """Invert the Cayley transform: F = (I + zf)(I - zf)^{-1}.

    Computed as z f = (F - I)(F + I)^{-1} followed by an exact shift down
    one degree; the degree-0 coefficient of the product is zero by
    construction and is asserted (ShiftResidual on malformed input).
    """
    if np.max(np.abs(F.coeffs[0] - EYE2)) > 1e-9:
        raise ValueError("Herglotz series must have F(0) = I")
    order = F.order
    eye = TruncSeries.identity(order)
    zf = (F - eye) * series_inv(F + eye)
    return zf.shift_down()


def herglotz_from_schur(f: TruncSeries, cross_check: bool = False):
    """F = (I + zf) (I - zf)^{-1}; output order is one above the input.

    With ``cross_check`` the geometric form I + 2 sum_(n>=1) (zf)^n is also
    evaluated and the maximum coefficient discrepancy returned alongside.
    """
    zf = f.shift_up()
    order = zf.order
    eye = TruncSeries.identity(order)
    F = (eye + zf) * series_inv(eye - zf)
    if not cross_check:
        return F
    acc = TruncSeries.identity(order)
    power = TruncSeries.identity(order)
    for _ in range(order):
        power = power * zf
        acc = acc + TruncSeries(2.0 * power.coeffs)
    disagreement = float(np.max(np.abs(F.coeffs - acc.coeffs)))
    return F, disagreement
