"""Companion matrices, determinantal zero sets, and root finding.

Two independent routes to the slice zero set of a quaternionic polynomial
are kept deliberately: Aberth-Ehrlich on the determinant of the embedded
coefficient polynomial, and LAPACK eigenvalues of the embedded companion
matrix.  Their agreement is asserted on every call; it is the computable
content of the zero-set theorems.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NoConvergence, NotMonic, RouteMismatch
from .polynomials import QPolyL, QPolyR, phi_L, phi_R
from .quaternions import Quaternion, SliceFrame, qmat_from_quaternions, right_eigen_slice

ROOT_RESIDUAL_TOL = 1e-10
MAX_ABERTH_ITER = 500
ROUTE_TOL = 1e-8


def multiset_distance(a, b) -> float:
    """Greedy matching distance between two complex multisets of equal size."""
    a = list(np.asarray(a, dtype=complex))
    b = list(np.asarray(b, dtype=complex))
    if len(a) != len(b):
        return float("inf")
    worst = 0.0
    for x in sorted(a, key=abs, reverse=True):
        dists = [abs(x - y) for y in b]
        k = int(np.argmin(dists))
        worst = max(worst, dists[k])
        b.pop(k)
    return worst


def polyval_ascending(coeffs: np.ndarray, z: complex) -> complex:
    acc = 0.0 + 0.0j
    for c in coeffs[::-1]:
        acc = acc * z + c
    return acc


def roots(coeffs, max_iter: int = MAX_ABERTH_ITER,
          residual_tol: float = ROOT_RESIDUAL_TOL) -> np.ndarray:
    """All roots of a complex polynomial by Aberth-Ehrlich iteration.

    ``coeffs`` are ascending (constant first); leading coefficient must be
    nonzero.  Exact zeros at the origin are deflated first, then the
    simultaneous iteration runs from a deterministic circular start.  The
    residual |p(root)| / |p'(root)| (the Newton-step length, a root-distance
    estimate) must fall below 1e-10, else NoConvergence.
    """
    coeffs = np.asarray(coeffs, dtype=complex)
    if len(coeffs) < 2:
        raise ValueError("degree must be at least 1")
    if coeffs[-1] == 0:
        raise ValueError("leading coefficient must be nonzero")
    scale = np.max(np.abs(coeffs))
    # deflate exact (or numerically negligible) roots at the origin
    n_zero = 0
    while n_zero < len(coeffs) - 1 and abs(coeffs[n_zero]) <= 1e-300 * scale:
        n_zero += 1
    work = coeffs[n_zero:]
    deg = len(work) - 1
    if deg == 0:
        return np.zeros(n_zero, dtype=complex)
    monic = work / work[-1]
    deriv = monic[1:] * np.arange(1, deg + 1)

    # deterministic circular initialisation: Cauchy-style radius estimate
    radius = 1.0 + np.max(np.abs(monic[:-1]))
    radius = min(radius, max(np.abs(monic[:-1]) ** (1.0 / np.arange(deg, 0, -1))) * 2.0 + 0.5)
    angles = 2.0 * np.pi * np.arange(deg) / deg + 0.4
    z = radius * np.exp(1j * angles)

    for _ in range(max_iter):
        p = np.array([polyval_ascending(monic, zk) for zk in z])
        dp = np.array([polyval_ascending(deriv, zk) for zk in z])
        newton = np.where(dp != 0, p / np.where(dp == 0, 1.0, dp), 0.0)
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, np.inf)
        sums = np.sum(1.0 / diff, axis=1)
        denom = 1.0 - newton * sums
        step = newton / np.where(denom == 0, 1.0, denom)
        z = z - step
        if np.max(np.abs(step)) < 1e-14 * np.maximum(1.0, np.max(np.abs(z))):
            break
    p = np.array([polyval_ascending(monic, zk) for zk in z])
    dp = np.array([polyval_ascending(deriv, zk) for zk in z])
    residual = np.abs(p) / np.maximum(np.abs(dp), 1e-300)
    # multiple roots: |p| collapses into evaluation roundoff while |p'| stays
    # small; accept when the value is roundoff-indistinguishable from zero
    absmon = np.abs(monic)
    noise = np.array([np.sum(absmon * np.abs(zk) ** np.arange(deg + 1)) for zk in z])
    at_noise_floor = np.abs(p) <= 4.0 * np.finfo(float).eps * noise
    if np.max(np.where(at_noise_floor, 0.0, residual)) > residual_tol:
        worst = float(np.max(np.where(at_noise_floor, 0.0, residual)))
        raise NoConvergence(f"root refinement stalled (max residual {worst:.3e})")
    return np.concatenate([np.zeros(n_zero, dtype=complex), z])


def det_poly(P: np.ndarray) -> np.ndarray:
    """Determinant of a 2x2 matrix polynomial, by coefficient convolution."""
    P = np.asarray(P, dtype=complex)
    a, b = P[:, 0, 0], P[:, 0, 1]
    c, d = P[:, 1, 0], P[:, 1, 1]
    return np.convolve(a, d) - np.convolve(b, c)


def companion_left(psi: QPolyL) -> np.ndarray:
    """Companion matrix (subdiagonal ones, last column -coefficients).

    The polynomial must be monic: callers pre-divide on the zero-preserving
    side (see monic_left).
    """
    n = psi.degree
    if n < 1:
        raise NotMonic("degree must be at least 1")
    if psi.coeffs[n] != 1:
        raise NotMonic("leading coefficient must be exactly 1")
    zero = Quaternion()
    rows = []
    for r in range(n):
        row = [Quaternion(1.0) if r >= 1 and c == r - 1 else zero for c in range(n - 1)]
        row.append(-psi.coeffs[r])
        rows.append(row)
    return qmat_from_quaternions(rows)


def companion_right(psi: QPolyR) -> np.ndarray:
    """Mirror form: superdiagonal ones, bottom row -coefficients."""
    n = psi.degree
    if n < 1:
        raise NotMonic("degree must be at least 1")
    if psi.coeffs[n] != 1:
        raise NotMonic("leading coefficient must be exactly 1")
    zero = Quaternion()
    rows = []
    for r in range(n - 1):
        rows.append([Quaternion(1.0) if c == r + 1 else zero for c in range(n)])
    rows.append([-psi.coeffs[c] for c in range(n)])
    return qmat_from_quaternions(rows)


def monic_left(psi: QPolyL) -> QPolyL:
    """Divide out the leading coefficient on the zero-preserving side.

    For coefficients sitting right of the powers, right-multiplying every
    coefficient by the inverse leading coefficient multiplies all values on
    the right and so fixes the zero set.
    """
    lead = psi.coeffs[psi.degree]
    inv = lead.inverse()
    coeffs = [c * inv for c in psi.coeffs[:-1]]
    return QPolyL(coeffs + [Quaternion(1.0)])


def monic_right(psi: QPolyR) -> QPolyR:
    lead = psi.coeffs[psi.degree]
    inv = lead.inverse()
    coeffs = [inv * c for c in psi.coeffs[:-1]]
    return QPolyR(coeffs + [Quaternion(1.0)])


@dataclass(frozen=True)
class ZeroReport:
    """Slice zero set reduced to closed-upper-half-plane representatives."""

    slice_roots: tuple
    moduli: tuple
    all_inside_ball: bool
    all_outside_closed_ball: bool

    def to_json(self):
        return {
            "slice_roots": [[z.real, z.imag] for z in self.slice_roots],
            "moduli": list(self.moduli),
            "all_inside_ball": self.all_inside_ball,
            "all_outside_closed_ball": self.all_outside_closed_ball,
        }


def _reduce_conjugate_pairs(vals: np.ndarray) -> list[complex]:
    """Pick one representative with Im >= 0 from each conjugate pair."""
    remaining = list(vals)
    reps: list[complex] = []
    while remaining:
        z = remaining.pop(0)
        target = np.conj(z)
        dists = [abs(y - target) for y in remaining]
        k = int(np.argmin(dists)) if dists else None
        if k is not None:
            partner = remaining.pop(k)
            rep = z if z.imag >= 0 else partner
        else:  # odd leftover: force into the closed upper half plane
            rep = z if z.imag >= 0 else np.conj(z)
        reps.append(complex(rep.real, abs(rep.imag)) if abs(rep.imag) < 1e-12 * max(1.0, abs(rep)) else complex(rep))
    return reps


NUMERIC_DEGREE_TOL = 1e-12


def _numeric_trim(psi, rel_tol: float = NUMERIC_DEGREE_TOL):
    """Drop leading coefficients that are roundoff relative to the largest.

    A polynomial whose true degree dropped (e.g. the reverse of a family
    member with a vanishing constant term) would otherwise be normalised by
    a roundoff-sized leading coefficient, manufacturing spurious roots near
    infinity.  Dropped directions lie far outside the closed ball, so the
    location flags are unaffected.
    """
    mags = [abs(c) for c in psi.coeffs]
    scale = max(mags)
    if scale == 0.0:
        raise ValueError("zero polynomial has no zero-set report")
    deg = max(k for k, m in enumerate(mags) if m > rel_tol * scale)
    return type(psi)(psi.coeffs[: deg + 1])


def zero_slice(psi, frame: SliceFrame, route_tol: float = ROUTE_TOL) -> ZeroReport:
    """Slice zero set of a quaternionic polynomial, two routes cross-checked.

    Route 1: Aberth roots of det(Phi-image of the monic-normalised input).
    Route 2: spectrum of the embedded companion matrix.
    """
    if not isinstance(psi, (QPolyL, QPolyR)):
        raise TypeError("expected QPolyL or QPolyR")
    left_space = isinstance(psi, QPolyL)
    psi = _numeric_trim(psi)
    monic = monic_left(psi) if left_space else monic_right(psi)
    if monic.degree < 1:
        # nonzero constants have empty zero sets; both location flags are
        # vacuously true
        return ZeroReport(slice_roots=(), moduli=(), all_inside_ball=True,
                          all_outside_closed_ball=True)
    if left_space:
        image = phi_L(monic, frame)
        comp = companion_left(monic)
    else:
        image = phi_R(monic, frame)
        comp = companion_right(monic)
    det = det_poly(image)
    route1 = roots(det)
    route2 = right_eigen_slice(comp, frame)
    dist = multiset_distance(route1, route2)
    if dist > route_tol:
        raise RouteMismatch(
            f"determinant roots and companion spectrum disagree ({dist:.3e})",
            residual=dist)
    reps = _reduce_conjugate_pairs(route1)
    reps.sort(key=lambda z: (abs(z), z.real, z.imag))
    moduli = tuple(float(abs(z)) for z in reps)
    return ZeroReport(
        slice_roots=tuple(reps),
        moduli=moduli,
        all_inside_ball=bool(all(m < 1.0 for m in moduli)),
        all_outside_closed_ball=bool(all(m > 1.0 for m in moduli)),
    )


def zeros_theorem_check(c, N: int, frame: SliceFrame | None = None,
                        route_tol: float = ROUTE_TOL) -> list[dict]:
    """Per-degree zero-location checks for the orthonormal families.

    For each degree n <= N: all slice roots of the orthonormal polynomials
    lie strictly inside the ball, all roots of their reverses strictly
    outside the closed ball, and the left/right slice zero multisets agree.
    """
    from .polynomials import orthonormal_polys, reverse_L, reverse_R

    frame = frame or SliceFrame.standard()
    fam = orthonormal_polys(c, N)
    results = []
    for n in range(1, N + 1):
        right_poly = fam.right[n]        # in H[p]^L
        left_poly = fam.left[n]          # in H[p]^R
        rep_r = zero_slice(right_poly, frame, route_tol)
        rep_l = zero_slice(left_poly, frame, route_tol)
        rev_r = zero_slice(reverse_L(right_poly, n), frame, route_tol)
        rev_l = zero_slice(reverse_R(left_poly, n), frame, route_tol)
        lr_dist = multiset_distance(rep_r.slice_roots, rep_l.slice_roots)
        results.append({
            "degree": n,
            "max_root_modulus": max(rep_r.moduli + rep_l.moduli),
            "min_reverse_modulus": min(rev_r.moduli + rev_l.moduli,
                                       default=float("inf")),
            "all_inside_ball": rep_r.all_inside_ball and rep_l.all_inside_ball,
            "reverses_outside": rev_r.all_outside_closed_ball and rev_l.all_outside_closed_ball,
            "left_right_distance": float(lr_dist),
        })
    return results
