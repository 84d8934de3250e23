"""The 2x2 matrix engine: defect matrices, coefficient stripping, the
triangular Schur-coefficient recursion, the moments <-> Verblunsky maps,
and the matrix Szego recurrences for embedding-image coefficients.

Conventions (fixed across the library):
  * moments enter through F = I + 2 sum_{n>=1} C_n z^n;
  * stripping is f_{n+1} = z^{-1} (rho_n^R)^{-1} (f_n - alpha_n)
    (I - alpha_n^* f_n)^{-1} rho_n^L, the z^{-1} realised as an exact
    coefficient shift;
  * the coefficient recursion is
    s_k(f_n) = rho_n^R s_{k-1}(f_{n+1}) rho_n^L
               - sum_{l=1..k-1} rho_n^R s_{k-l-1}(f_{n+1}) (rho_n^L)^{-1}
                 alpha_n^* s_l(f_n),
    with base s_0(f_n) = alpha_n.
These three are mutually inverse/consistent; the round trip is tested to
machine precision.
"""

from __future__ import annotations

import numpy as np

from .errors import ConstantMismatch, NotChiImage, NotContraction
from .quaternions import chi_image_residual
from .series import EYE2, TruncSeries, herglotz_from_moments, herglotz_from_schur, \
    schur_from_herglotz, series_inv

CONTRACTION_MARGIN = 1e-12
CONSTANT_TOL = 1e-10
SQRT_CHECK_TOL = 1e-13


def operator_norm2(A: np.ndarray) -> float:
    """Largest singular value of a 2x2 matrix."""
    return float(np.linalg.norm(np.asarray(A, dtype=complex), 2))


def sqrtm_herm2(H: np.ndarray) -> np.ndarray:
    """Principal square root of a 2x2 Hermitian PSD matrix, closed form.

    With t = tr H and d = det H >= 0: sqrt(H) = (H + sqrt(d) I) / sqrt(t + 2 sqrt(d)).
    """
    H = np.asarray(H, dtype=complex)
    t = float(np.trace(H).real)
    d = float(np.linalg.det(H).real)
    if d < 0.0:
        d = 0.0
    s = np.sqrt(d)
    denom = t + 2.0 * s
    if denom <= 0.0:
        raise ValueError("matrix is not positive semidefinite")
    R = (H + s * EYE2) / np.sqrt(denom)
    if np.max(np.abs(R @ R - H)) > SQRT_CHECK_TOL * max(1.0, t):
        raise ValueError("square-root residual beyond tolerance")
    return R


class MatVerblunskySeq:
    """A finite sequence of strictly contractive 2x2 matrices."""

    __slots__ = ("alphas",)

    def __init__(self, alphas):
        alphas = [np.asarray(a, dtype=complex) for a in alphas]
        for n, a in enumerate(alphas):
            _require_contraction(a, n)
        object.__setattr__(self, "alphas", tuple(a.copy() for a in alphas))

    def __setattr__(self, name, value):
        raise AttributeError("MatVerblunskySeq is immutable")

    def __len__(self):
        return len(self.alphas)

    def __getitem__(self, n):
        return self.alphas[n]

    def __iter__(self):
        return iter(self.alphas)


class DefectPair:
    """rhoL = (I - a* a)^(1/2) and rhoR = (I - a a*)^(1/2), both Hermitian PD."""

    __slots__ = ("rhoL", "rhoR")

    def __init__(self, rhoL, rhoR):
        object.__setattr__(self, "rhoL", np.asarray(rhoL, dtype=complex))
        object.__setattr__(self, "rhoR", np.asarray(rhoR, dtype=complex))

    def __setattr__(self, name, value):
        raise AttributeError("DefectPair is immutable")


def _require_contraction(alpha: np.ndarray, index=None):
    if operator_norm2(alpha) >= 1.0 - CONTRACTION_MARGIN:
        raise NotContraction(
            f"coefficient{'' if index is None else ' ' + str(index)} has norm "
            f">= 1 - 1e-12; not a strict contraction", index=index)


def defects(alpha: np.ndarray) -> DefectPair:
    """Principal square roots of I - a*a and I - aa* via the 2x2 closed form."""
    alpha = np.asarray(alpha, dtype=complex)
    _require_contraction(alpha)
    aH = alpha.conj().T
    return DefectPair(sqrtm_herm2(EYE2 - aH @ alpha), sqrtm_herm2(EYE2 - alpha @ aH))


def schur_step(f_n: TruncSeries, alpha_n: np.ndarray) -> TruncSeries:
    """One stripping step; the output carries one fewer valid order."""
    alpha_n = np.asarray(alpha_n, dtype=complex)
    if np.max(np.abs(f_n.coeffs[0] - alpha_n)) > CONSTANT_TOL:
        raise ConstantMismatch("f_n(0) differs from alpha_n beyond 1e-10")
    d = defects(alpha_n)
    order = f_n.order
    num = TruncSeries(f_n.coeffs - TruncSeries.constant(alpha_n, order).coeffs)
    den = TruncSeries.identity(order) - TruncSeries.constant(alpha_n.conj().T, order) * f_n
    core = num * series_inv(den)
    shifted = core.shift_down()
    rhoRi = np.linalg.inv(d.rhoR)
    return TruncSeries(np.einsum("ij,njk,kl->nil", rhoRi, shifted.coeffs, d.rhoL))


def inverse_schur_step(f_next: TruncSeries, alpha_n: np.ndarray) -> TruncSeries:
    """Rebuild f_n from (alpha_n, f_{n+1}); exact inverse of schur_step.

    With W = rho_n^R (z f_{n+1}) (rho_n^L)^{-1}:
    f_n = (I + W alpha_n^*)^{-1} (W + alpha_n).
    """
    alpha_n = np.asarray(alpha_n, dtype=complex)
    d = defects(alpha_n)
    z_next = f_next.shift_up()
    rhoLi = np.linalg.inv(d.rhoL)
    W = TruncSeries(np.einsum("ij,njk,kl->nil", d.rhoR, z_next.coeffs, rhoLi))
    order = W.order
    lhs = TruncSeries.identity(order) + W * TruncSeries.constant(alpha_n.conj().T, order)
    return series_inv(lhs) * (W + TruncSeries.constant(alpha_n, order))


def schur_algorithm(f: TruncSeries, N: int) -> MatVerblunskySeq:
    """Strip N coefficients alpha_0..alpha_{N-1} from a Schur-class truncation.

    Needs order(f) >= N - 1 (the last coefficient is read without a further
    stripping step).  NotContraction propagates when the input is not a
    Schur-class truncation, i.e. the underlying moment data is not positive
    definite.
    """
    if f.order < N - 1:
        raise ValueError(f"series order {f.order} too small for {N} coefficients")
    alphas = []
    current = f
    for n in range(N):
        alpha = np.array(current.coeffs[0])
        try:
            _require_contraction(alpha, n)
        except NotContraction as exc:
            raise NotContraction(str(exc), index=n) from None
        alphas.append(alpha)
        if n < N - 1:
            current = schur_step(current, alpha)
    return MatVerblunskySeq(alphas)


def schur_coeffs_forward(alphas: MatVerblunskySeq, K: int) -> list[np.ndarray]:
    """Schur-function coefficients s_0(f)..s_K(f) by the triangular recursion.

    The leading structure is s_k(f) = rho_0^R..rho_{k-1}^R alpha_k
    rho_{k-1}^L..rho_0^L plus contributions from lower-index coefficients.
    """
    if len(alphas) < K + 1:
        raise ValueError(f"need at least {K + 1} coefficients, got {len(alphas)}")
    dpairs = [defects(alphas[n]) for n in range(K + 1)]
    rhoLi = [np.linalg.inv(d.rhoL) for d in dpairs]
    table: dict[tuple[int, int], np.ndarray] = {}
    for n in range(K, -1, -1):
        table[(n, 0)] = np.asarray(alphas[n], dtype=complex)
        for k in range(1, K - n + 1):
            val = dpairs[n].rhoR @ table[(n + 1, k - 1)] @ dpairs[n].rhoL
            aH = np.asarray(alphas[n]).conj().T
            for l in range(1, k):
                val = val - (dpairs[n].rhoR @ table[(n + 1, k - l - 1)]
                             @ rhoLi[n] @ aH @ table[(n, l)])
            table[(n, k)] = val
    return [table[(0, k)] for k in range(K + 1)]


def schur_series_from_alphas(alphas: MatVerblunskySeq, order: int) -> TruncSeries:
    return TruncSeries(np.array(schur_coeffs_forward(alphas, order)))


def moments_from_alphas(alphas: MatVerblunskySeq, N: int) -> list[np.ndarray]:
    """Moment matrices C_1..C_N, via C_n = sum_{k=1..n} s_{n-k}(f^k).

    Realised through the Herglotz series of the rebuilt Schur function,
    whose coefficient of z^n is exactly 2 C_n.
    """
    if len(alphas) < N:
        raise ValueError(f"need at least {N} coefficients, got {len(alphas)}")
    f = schur_series_from_alphas(alphas, N - 1)
    F = herglotz_from_schur(f)
    return [np.array(F.coeffs[n]) / 2.0 for n in range(1, N + 1)]


def alphas_from_moments(C, N: int) -> MatVerblunskySeq:
    """Exact inverse of moments_from_alphas on positive-definite data.

    Composition: herglotz_from_moments -> schur_from_herglotz ->
    schur_algorithm.  NotContraction signals non-positive-definite moments.
    """
    F = herglotz_from_moments(C, N)
    f = schur_from_herglotz(F)
    return schur_algorithm(f, N)


def require_chi_image(alpha: np.ndarray, tol: float = 1e-10) -> None:
    residual = chi_image_residual(np.asarray(alpha, dtype=complex))
    if residual > tol:
        raise NotChiImage(
            f"coefficient is not in the embedding image (residual {residual:.3e})")


def scalar_defect(alpha: np.ndarray) -> float:
    """r = sqrt(1 - |gamma|^2) for an embedding-image contraction."""
    det = float(np.linalg.det(np.asarray(alpha, dtype=complex)).real)
    return float(np.sqrt(1.0 - det))


class MatrixSzegoFamily:
    """Orthonormal matrix polynomial families phi^L, phi^R and their reverses.

    Polynomials are (deg+1, 2, 2) coefficient arrays, degree index first.
    """

    __slots__ = ("left", "right", "left_rev", "right_rev")

    def __init__(self, left, right, left_rev, right_rev):
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "left_rev", left_rev)
        object.__setattr__(self, "right_rev", right_rev)

    def __setattr__(self, name, value):
        raise AttributeError("MatrixSzegoFamily is immutable")


def matrix_szego_polys(alphas: MatVerblunskySeq, N: int,
                       tol_image: float = 1e-10) -> MatrixSzegoFamily:
    """Run the matrix Szego recurrences for embedding-image coefficients.

    For such coefficients alpha is normal and both defects coincide with
    r_n I where r_n = sqrt(1 - |gamma_n|^2) = sqrt(1 - det alpha_n), so the
    recurrences take the paired form

        phi_{n+1}^L     = r^{-1} (z phi_n^L - alpha_n phi_n^{R,#})
        phi_{n+1}^R     = r^{-1} (z phi_n^R - phi_n^{L,#} alpha_n)
        phi_{n+1}^{L,#} = r^{-1} (phi_n^{L,#} - z phi_n^R alpha_n^*)
        phi_{n+1}^{R,#} = r^{-1} (phi_n^{R,#} - z alpha_n^* phi_n^L)

    with phi_0 = I everywhere.  (The conjugation placement follows the
    moment convention F = I + 2 sum C_n z^n used throughout; see tests for
    the Gram-matrix verification.)
    """
    if len(alphas) < N:
        raise ValueError(f"need at least {N} coefficients, got {len(alphas)}")
    left = [np.array([EYE2])]
    right = [np.array([EYE2])]
    left_rev = [np.array([EYE2])]
    right_rev = [np.array([EYE2])]
    zero = np.zeros((1, 2, 2), dtype=complex)
    for n in range(N):
        a = np.asarray(alphas[n], dtype=complex)
        require_chi_image(a, tol_image)
        aH = a.conj().T
        r = scalar_defect(a)
        zL = np.concatenate([zero, left[n]])
        zR = np.concatenate([zero, right[n]])
        pad = np.concatenate([left_rev[n], zero])
        pad_r = np.concatenate([right_rev[n], zero])
        left.append((zL - np.einsum("ij,njk->nik", a, pad_r)) / r)
        right.append((zR - np.einsum("nij,jk->nik", pad, a)) / r)
        left_rev.append((pad - np.einsum("nij,jk->nik", zR, aH)) / r)
        right_rev.append((pad_r - np.einsum("ij,njk->nik", aH, zL)) / r)
    return MatrixSzegoFamily(left, right, left_rev, right_rev)


def reverse_matrix_poly(P: np.ndarray, degree: int) -> np.ndarray:
    """P^#(z) = z^degree P(1/conj z)^*: coefficient k becomes P_{degree-k}^*."""
    P = np.asarray(P, dtype=complex)
    if degree < len(P) - 1:
        raise ValueError("reversal degree below polynomial degree")
    out = np.zeros((degree + 1, 2, 2), dtype=complex)
    for k in range(degree + 1):
        src = degree - k
        if src < len(P):
            out[k] = P[src].conj().T
    return out
