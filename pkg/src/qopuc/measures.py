"""Moment sequences, quaternionic Toeplitz forms, and computable measures.

Measures appear only through computable surrogates: finite moment horizons,
finitely supported Fourier densities, and finite atom lists.  A density d
carries two coefficient maps (w1 for the real-valued part, w2 for the
j-component); its 2x2 matrix form

    W(theta) = [[w1(theta),        w2(theta)],
                [conj(w2(theta)),  w1(-theta)]]

is Hermitian and must be positive semidefinite on the scan grid.  Moments
follow the convention c_n = integral of e^{i n theta} d mu(theta), which for
trigonometric densities reads off as c_n = w1_{-n} + w2_{-n} j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import HorizonExceeded, NotPositiveDefinite
from .quaternions import Quaternion, SliceFrame, chi, chi_mat

PSD_GRID = 2048
QUAD_GRID = 4096
PSD_FLOOR = -1e-10
PIVOT_TOL = 1e-12


class MomentSequence:
    """Hermitian-symmetric quaternion moments c_{-N}..c_N with c_0 = 1.

    Only the nonnegative half is stored; negative indices are synthesised
    through c_{-n} = conj(c_n).
    """

    __slots__ = ("_c", "_table")

    def __init__(self, nonneg):
        c = tuple(q if isinstance(q, Quaternion) else Quaternion(q) for q in nonneg)
        if not c:
            raise ValueError("need at least c_0")
        if abs(c[0] - Quaternion(1.0)) > 1e-9:
            raise ValueError("c_0 must be 1 (probability normalisation)")
        object.__setattr__(self, "_c", c)
        object.__setattr__(self, "_table", None)

    def __setattr__(self, name, value):
        raise AttributeError("MomentSequence is immutable")

    def moment_table(self, n: int) -> np.ndarray:
        """Cached (n+1, n+1, 4) array with entry (k, l) = c_{k-l}."""
        if abs(n) > self.horizon:
            raise HorizonExceeded(f"order {n} beyond horizon {self.horizon}")
        if self._table is None or self._table.shape[0] < n + 1:
            h = self.horizon
            full = np.empty((h + 1, h + 1, 4))
            for k in range(h + 1):
                for l in range(h + 1):
                    full[k, l] = self[k - l].to_array()
            full.setflags(write=False)
            object.__setattr__(self, "_table", full)
        return self._table[: n + 1, : n + 1]

    @classmethod
    def from_map(cls, entries: dict[int, Quaternion]) -> "MomentSequence":
        horizon = max(abs(n) for n in entries)
        nonneg = [entries.get(n, Quaternion()) for n in range(horizon + 1)]
        seq = cls(nonneg)
        for n, q in entries.items():
            if n < 0 and abs(q - seq[n]) > 1e-12 * max(1.0, abs(q)):
                raise ValueError(f"Hermitian symmetry violated at n={n}")
        return seq

    @property
    def horizon(self) -> int:
        return len(self._c) - 1

    def __getitem__(self, n: int) -> Quaternion:
        if abs(n) > self.horizon:
            raise HorizonExceeded(f"moment {n} beyond horizon {self.horizon}")
        return self._c[n] if n >= 0 else self._c[-n].conjugate()

    def to_json(self):
        return [[n, self._c[n].to_json()] for n in range(self.horizon + 1)]

    @classmethod
    def from_json(cls, obj) -> "MomentSequence":
        return cls.from_map({int(n): Quaternion.from_array(v) for n, v in obj})

    def __repr__(self):
        return f"MomentSequence(horizon={self.horizon})"


def toeplitz(c: MomentSequence, n: int) -> np.ndarray:
    """T_n(c) as an (n+1, n+1, 4) array; entry (k, j) is c_{j-k}."""
    if n > c.horizon:
        raise HorizonExceeded(f"order {n} beyond horizon {c.horizon}")
    T = np.empty((n + 1, n + 1, 4))
    for k in range(n + 1):
        for j in range(n + 1):
            T[k, j] = c[j - k].to_array()
    return T


@dataclass(frozen=True)
class NontrivialityReport:
    ok: bool
    min_pivot: float
    min_eigenvalue: float


def is_nontrivial(c: MomentSequence, n: int,
                  frame: SliceFrame | None = None,
                  pivot_tol: float = PIVOT_TOL) -> NontrivialityReport:
    """Positive definiteness of T_n(c) through the complex embedding.

    True iff the embedded 2(n+1) x 2(n+1) Hermitian matrix admits a Cholesky
    factorisation with all pivots above the tolerance.
    """
    frame = frame or SliceFrame.standard()
    M = chi_mat(toeplitz(c, n), frame)
    M = 0.5 * (M + M.conj().T)
    eigs = np.linalg.eigvalsh(M)
    min_eig = float(eigs[0])
    try:
        L = np.linalg.cholesky(M)
        min_pivot = float(np.min(np.abs(np.diag(L)) ** 2))
    except np.linalg.LinAlgError:
        min_pivot = min(min_eig, 0.0)
    return NontrivialityReport(ok=min_pivot > pivot_tol,
                               min_pivot=min_pivot,
                               min_eigenvalue=min_eig)


def _pd_pivots_ok(c: MomentSequence, n: int, frame: SliceFrame,
                  pivot_tol: float = PIVOT_TOL) -> bool:
    M = chi_mat(toeplitz(c, n), frame)
    M = 0.5 * (M + M.conj().T)
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        return False
    return float(np.min(np.abs(np.diag(L)) ** 2)) > pivot_tol


def require_nontrivial(c: MomentSequence, n: int,
                       frame: SliceFrame | None = None) -> None:
    """Raise NotPositiveDefinite naming the first failing order.

    Positivity at order n implies it at all lower orders, so the common
    case costs one factorisation; the ascending scan runs only on failure.
    """
    frame = frame or SliceFrame.standard()
    if _pd_pivots_ok(c, n, frame):
        return
    for m in range(n + 1):
        if not _pd_pivots_ok(c, m, frame):
            raise NotPositiveDefinite(
                f"Toeplitz form not positive definite at order {m}", order=m)


def _eval_fourier(coeffs: dict[int, complex], thetas: np.ndarray) -> np.ndarray:
    out = np.zeros_like(thetas, dtype=complex)
    for n, a in coeffs.items():
        out = out + a * np.exp(1j * n * thetas)
    return out


class QPositiveDensity:
    """A finitely supported Fourier density of a q-positive measure.

    Invariants checked at construction: w1 real-valued on the circle
    (w1_{-n} = conj(w1_n)), the j-part symmetry w2_{-n} = -w2_n, and positive
    semidefiniteness of the matrix form on a 2048-point grid.
    """

    __slots__ = ("frame", "w1", "w2")

    def __init__(self, frame: SliceFrame, w1: dict[int, complex],
                 w2: dict[int, complex] | None = None, grid: int = PSD_GRID):
        w1 = {int(n): complex(a) for n, a in (w1 or {}).items() if a != 0}
        w2 = {int(n): complex(a) for n, a in (w2 or {}).items() if a != 0}
        for n, a in w1.items():
            if abs(w1.get(-n, 0j) - a.conjugate()) > 1e-12 * max(1.0, abs(a)):
                raise ValueError(f"w1 is not real-valued on the circle (n={n})")
        for n, a in w2.items():
            if abs(w2.get(-n, 0j) + a) > 1e-12 * max(1.0, abs(a)):
                raise ValueError(f"w2 symmetry w2_(-n) = -w2_n violated (n={n})")
        object.__setattr__(self, "frame", frame)
        object.__setattr__(self, "w1", w1)
        object.__setattr__(self, "w2", w2)
        min_eig = self.min_eigenvalue_on_grid(grid)
        if min_eig < PSD_FLOOR:
            raise ValueError(
                f"matrix density not PSD on the grid (min eigenvalue {min_eig:.3e})")

    def __setattr__(self, name, value):
        raise AttributeError("QPositiveDensity is immutable")

    @property
    def degree(self) -> int:
        support = [abs(n) for n in self.w1] + [abs(n) for n in self.w2]
        return max(support) if support else 0

    def w1_values(self, thetas: np.ndarray) -> np.ndarray:
        return _eval_fourier(self.w1, np.asarray(thetas, dtype=float))

    def w2_values(self, thetas: np.ndarray) -> np.ndarray:
        return _eval_fourier(self.w2, np.asarray(thetas, dtype=float))

    def matrix_values(self, thetas: np.ndarray) -> np.ndarray:
        """The Hermitian matrix density W(theta), shape (len(thetas), 2, 2)."""
        thetas = np.asarray(thetas, dtype=float)
        a = self.w1_values(thetas)
        b = self.w2_values(thetas)
        d = self.w1_values(-thetas)
        W = np.empty((len(thetas), 2, 2), dtype=complex)
        W[:, 0, 0] = a
        W[:, 0, 1] = b
        W[:, 1, 0] = np.conj(b)
        W[:, 1, 1] = d
        return W

    def min_eigenvalue_on_grid(self, grid: int = PSD_GRID) -> float:
        thetas = 2.0 * np.pi * np.arange(grid) / grid
        W = self.matrix_values(thetas)
        W = 0.5 * (W + np.conj(np.swapaxes(W, 1, 2)))
        return float(np.min(np.linalg.eigvalsh(W)))

    def value(self, theta: float) -> Quaternion:
        """The quaternionic density w1(theta) + w2(theta) j in the frame."""
        z1 = complex(self.w1_values(np.array([theta]))[0])
        z2 = complex(self.w2_values(np.array([theta]))[0])
        return self.frame.from_split(z1, z2)

    def to_json(self):
        return {
            "frame": self.frame.to_json(),
            "w1": [[n, a.real, a.imag] for n, a in sorted(self.w1.items())],
            "w2": [[n, a.real, a.imag] for n, a in sorted(self.w2.items())],
        }

    @classmethod
    def from_json(cls, obj) -> "QPositiveDensity":
        frame = SliceFrame.from_json(obj["frame"])
        w1 = {int(n): complex(re, im) for n, re, im in obj.get("w1", [])}
        w2 = {int(n): complex(re, im) for n, re, im in obj.get("w2", [])}
        return cls(frame, w1, w2)


def moments_from_density(d: QPositiveDensity, N: int) -> MomentSequence:
    """Exact coefficient read-off: c_n = w1_{-n} + w2_{-n} j in the frame."""
    nonneg = []
    for n in range(N + 1):
        z1 = d.w1.get(-n, 0j)
        z2 = d.w2.get(-n, 0j)
        nonneg.append(d.frame.from_split(z1, z2))
    return MomentSequence(nonneg)


def moments_from_density_quadrature(d: QPositiveDensity, N: int,
                                    grid: int = QUAD_GRID):
    """Trapezoid-rule moments with a doubling error report.

    Returns (MomentSequence, error_estimate); the estimate compares the
    requested grid against half of it.
    """
    from .quaternions import qarr_mul

    def compute(g):
        thetas = 2.0 * np.pi * np.arange(g) / g
        vals = np.array([d.frame.from_split(z1, z2).to_array()
                         for z1, z2 in zip(d.w1_values(thetas), d.w2_values(thetas))])
        one = np.array([1.0, 0.0, 0.0, 0.0])
        i_arr = d.frame.i.to_array()
        out = []
        for n in range(N + 1):
            kernel = (np.outer(np.cos(n * thetas), one)
                      + np.outer(np.sin(n * thetas), i_arr))
            prod = qarr_mul(kernel, vals)
            out.append(Quaternion.from_array(prod.mean(axis=0)))
        return out

    fine = compute(grid)
    coarse = compute(grid // 2)
    err = max(abs(a - b) for a, b in zip(fine, coarse))
    return MomentSequence(fine), float(err)


@dataclass(frozen=True)
class AtomicQMeasure:
    """A finite atom list (theta_m, weight_m); degenerate test fixtures."""

    atoms: tuple

    def __post_init__(self):
        total = Quaternion()
        for theta, w in self.atoms:
            total = total + w
        if abs(total - Quaternion(1.0)) > 1e-9:
            raise ValueError("atom weights must sum to 1 (c_0 normalisation)")


def moments_from_atoms(a: AtomicQMeasure, N: int,
                       frame: SliceFrame | None = None) -> MomentSequence:
    """c_n = sum_m e^{i n theta_m} weight_m, the exponential in the frame."""
    frame = frame or SliceFrame.standard()
    nonneg = []
    for n in range(N + 1):
        acc = Quaternion()
        for theta, w in a.atoms:
            phase = frame.slice_point(complex(np.cos(n * theta), np.sin(n * theta)))
            acc = acc + phase * w
        nonneg.append(acc)
    return MomentSequence(nonneg)


def matrix_moments(c: MomentSequence, frame: SliceFrame | None = None,
                   N: int | None = None) -> list[np.ndarray]:
    """C_0..C_N with C_n = chi(c_n)."""
    frame = frame or SliceFrame.standard()
    N = c.horizon if N is None else N
    if N > c.horizon:
        raise HorizonExceeded(f"order {N} beyond horizon {c.horizon}")
    return [chi(c[n], frame) for n in range(N + 1)]


def density_in_frame(d: QPositiveDensity, frame: SliceFrame) -> QPositiveDensity:
    """Re-express a density in another slice frame.

    The quaternionic Fourier coefficients are the global object; splitting
    them in the new frame gives the new (w1, w2) pair.  The required
    symmetries transfer automatically.
    """
    support = sorted(set(d.w1) | set(d.w2))
    w1: dict[int, complex] = {}
    w2: dict[int, complex] = {}
    for m in support:
        q = d.frame.from_split(d.w1.get(m, 0j), d.w2.get(m, 0j))
        z1, z2 = frame.split(q)
        w1[m] = z1
        w2[m] = z2
    return QPositiveDensity(frame, w1, w2)


def wiener_coefficient_norm(d: QPositiveDensity) -> float:
    """Sum over n of |w1_n + w2_n j| (quaternionic modulus per coefficient)."""
    support = set(d.w1) | set(d.w2)
    return float(sum(
        np.hypot(abs(d.w1.get(n, 0j)), abs(d.w2.get(n, 0j))) for n in support))
