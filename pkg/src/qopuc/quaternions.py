"""Quaternion arithmetic, slice frames, and the 2x2 complex embedding.

A slice frame is an ordered orthogonal pair (i, j) of imaginary units; it
fixes a complex plane C_i inside the quaternions and the embedding ``chi``
of quaternions into 2x2 complex matrices.  Once a frame is chosen, elements
of C_i are handled as ordinary Python complex numbers, which keeps all
matrix code frame-agnostic.

Quaternion matrices are plain float arrays of shape (n, n, 4) with the last
axis holding coordinates in the basis (1, i, j, k); helpers here give the
Hamilton product, the entrywise embedding ``chi_mat`` and the block
permutation unitaries relating it to the blockwise embedding.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import NoConvergence, NotInImage

# structural tolerance for membership in the embedding image
TAU_IMG = 1e-10
FRAME_TOL = 1e-12

# Hamilton structure tensor: e_a e_b = sum_c HAMILTON[a, b, c] e_c,
# basis order (1, i, j, k).
HAMILTON = np.zeros((4, 4, 4))
for _a, _b, _c, _s in [
    (0, 0, 0, 1), (0, 1, 1, 1), (0, 2, 2, 1), (0, 3, 3, 1),
    (1, 0, 1, 1), (1, 1, 0, -1), (1, 2, 3, 1), (1, 3, 2, -1),
    (2, 0, 2, 1), (2, 1, 3, -1), (2, 2, 0, -1), (2, 3, 1, 1),
    (3, 0, 3, 1), (3, 1, 2, 1), (3, 2, 1, -1), (3, 3, 0, -1),
]:
    HAMILTON[_a, _b, _c] = _s


class Quaternion:
    """Immutable quaternion w + x i + y j + z k."""

    __slots__ = ("w", "x", "y", "z")

    def __init__(self, w=0.0, x=0.0, y=0.0, z=0.0):
        object.__setattr__(self, "w", float(w))
        object.__setattr__(self, "x", float(x))
        object.__setattr__(self, "y", float(y))
        object.__setattr__(self, "z", float(z))

    def __setattr__(self, name, value):
        raise AttributeError("Quaternion is immutable")

    # -- constructors -------------------------------------------------
    @classmethod
    def from_array(cls, a) -> "Quaternion":
        return cls(a[0], a[1], a[2], a[3])

    # -- structure ----------------------------------------------------
    def to_array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    @property
    def real(self) -> float:
        return self.w

    @property
    def imag(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def conjugate(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm_sq(self) -> float:
        return self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z

    def __abs__(self) -> float:
        return math.sqrt(self.norm_sq())

    def inverse(self) -> "Quaternion":
        n = self.norm_sq()
        if n == 0.0:
            raise ZeroDivisionError("zero quaternion has no inverse")
        return Quaternion(self.w / n, -self.x / n, -self.y / n, -self.z / n)

    # -- arithmetic ---------------------------------------------------
    def __add__(self, other):
        other = _coerce(other)
        return Quaternion(self.w + other.w, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        return Quaternion(self.w - other.w, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __rsub__(self, other):
        return _coerce(other).__sub__(self)

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other,
                              self.y * other, self.z * other)
        a, b = self, other
        return Quaternion(
            a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
        )

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return self.__mul__(other)
        return _coerce(other).__mul__(self)

    def __truediv__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.w / other, self.x / other,
                              self.y / other, self.z / other)
        return self * _coerce(other).inverse()

    def __eq__(self, other):
        if isinstance(other, (int, float)):
            other = Quaternion(other)
        if not isinstance(other, Quaternion):
            return NotImplemented
        return (self.w, self.x, self.y, self.z) == (other.w, other.x, other.y, other.z)

    def __hash__(self):
        return hash((self.w, self.x, self.y, self.z))

    def __repr__(self):
        return f"Quaternion({self.w!r}, {self.x!r}, {self.y!r}, {self.z!r})"

    def to_json(self):
        return [self.w, self.x, self.y, self.z]


def _coerce(value) -> Quaternion:
    if isinstance(value, Quaternion):
        return value
    if isinstance(value, (int, float)):
        return Quaternion(value)
    raise TypeError(f"cannot interpret {value!r} as a quaternion")


ONE = Quaternion(1.0)
QI = Quaternion(0.0, 1.0)
QJ = Quaternion(0.0, 0.0, 1.0)
QK = Quaternion(0.0, 0.0, 0.0, 1.0)


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product."""
    return _coerce(a) * _coerce(b)


class SliceFrame:
    """An orthogonal pair (i, j) of imaginary units, with k = i j.

    Validated at construction: both generators purely imaginary, unit norm,
    and orthogonal in the coordinate sense, each to 1e-12.
    """

    __slots__ = ("i", "j", "k")

    def __init__(self, i: Quaternion, j: Quaternion):
        i, j = _coerce(i), _coerce(j)
        for name, u in (("i", i), ("j", j)):
            if abs(u.real) > FRAME_TOL:
                raise ValueError(f"frame generator {name} is not purely imaginary")
            if abs(u.norm_sq() - 1.0) > FRAME_TOL:
                raise ValueError(f"frame generator {name} is not a unit quaternion")
        if abs(float(np.dot(i.imag, j.imag))) > FRAME_TOL:
            raise ValueError("frame generators are not orthogonal")
        object.__setattr__(self, "i", i)
        object.__setattr__(self, "j", j)
        object.__setattr__(self, "k", i * j)

    def __setattr__(self, name, value):
        raise AttributeError("SliceFrame is immutable")

    @classmethod
    def standard(cls) -> "SliceFrame":
        return cls(QI, QJ)

    @classmethod
    def random(cls, rng: np.random.Generator) -> "SliceFrame":
        """Draw a uniformly random frame (Gram-Schmidt on Gaussian vectors)."""
        while True:
            v1 = rng.normal(size=3)
            v2 = rng.normal(size=3)
            n1 = np.linalg.norm(v1)
            if n1 < 1e-6:
                continue
            v1 = v1 / n1
            v2 = v2 - np.dot(v1, v2) * v1
            n2 = np.linalg.norm(v2)
            if n2 < 1e-6:
                continue
            v2 = v2 / n2
            return cls(Quaternion(0.0, *v1), Quaternion(0.0, *v2))

    # -- slice coordinates ---------------------------------------------
    def split(self, p: Quaternion) -> tuple[complex, complex]:
        """Coordinates (z1, z2) of p = z1 + z2 j in the frame basis."""
        p = _coerce(p)
        im = p.imag
        return (
            complex(p.w, float(np.dot(im, self.i.imag))),
            complex(float(np.dot(im, self.j.imag)), float(np.dot(im, self.k.imag))),
        )

    def from_split(self, z1: complex, z2: complex) -> Quaternion:
        return (Quaternion(z1.real) + self.i * z1.imag
                + self.j * z2.real + self.k * z2.imag)

    def slice_point(self, z: complex) -> Quaternion:
        """The point of C_i with coordinates z."""
        return Quaternion(z.real) + self.i * z.imag

    def __eq__(self, other):
        if not isinstance(other, SliceFrame):
            return NotImplemented
        return self.i == other.i and self.j == other.j

    def __hash__(self):
        return hash((self.i, self.j))

    def __repr__(self):
        return f"SliceFrame(i={self.i!r}, j={self.j!r})"

    def to_json(self):
        return {"i": self.i.to_json(), "j": self.j.to_json()}

    @classmethod
    def from_json(cls, obj) -> "SliceFrame":
        return cls(Quaternion.from_array(obj["i"]), Quaternion.from_array(obj["j"]))


def split(p: Quaternion, frame: SliceFrame) -> tuple[complex, complex]:
    return frame.split(p)


def chi(p: Quaternion, frame: SliceFrame) -> np.ndarray:
    """The 2x2 complex image [[z1, z2], [-conj z2, conj z1]] of p."""
    z1, z2 = frame.split(p)
    return np.array([[z1, z2], [-z2.conjugate(), z1.conjugate()]])


def chi_inv(M: np.ndarray, frame: SliceFrame, tol: float = TAU_IMG) -> Quaternion:
    """Invert the embedding; raises NotInImage when the structure fails.

    The structural residual is the worst absolute defect in the identities
    M[1,1] = conj(M[0,0]) and M[1,0] = -conj(M[0,1]).
    """
    M = np.asarray(M, dtype=complex)
    residual = chi_image_residual(M)
    if residual > tol:
        raise NotInImage(f"matrix is not in the embedding image "
                         f"(structural residual {residual:.3e} > {tol:.1e})")
    return frame.from_split(complex(M[0, 0]), complex(M[0, 1]))


def chi_image_residual(M: np.ndarray) -> float:
    return max(abs(M[1, 1] - np.conj(M[0, 0])), abs(M[1, 0] + np.conj(M[0, 1])))


# ---------------------------------------------------------------------
# quaternion arrays: shape (..., 4), basis (1, i, j, k)
# ---------------------------------------------------------------------

def qarr_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Elementwise Hamilton product of (..., 4) arrays."""
    return np.einsum("...a,...b,abc->...c", a, b, HAMILTON)


def qarr_conj(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float, copy=True)
    out[..., 1:] *= -1.0
    return out


def qarr_abs(a: np.ndarray) -> np.ndarray:
    return np.sqrt(np.sum(np.asarray(a) ** 2, axis=-1))


def qmat_mul(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """Product of quaternion matrices stored as (n, m, 4) arrays."""
    return np.einsum("nka,kmb,abc->nmc", A, B, HAMILTON)


def qmat_vec(A: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.einsum("nka,kb,abc->nc", A, v, HAMILTON)


def qmat_conj_T(A: np.ndarray) -> np.ndarray:
    return qarr_conj(np.swapaxes(A, 0, 1))


def qmat_from_quaternions(rows) -> np.ndarray:
    return np.array([[q.to_array() for q in row] for row in rows])


def _frame_coords(A: np.ndarray, frame: SliceFrame):
    """Split an (..., 4) array into the two complex coordinate arrays."""
    A = np.asarray(A, dtype=float)
    im = A[..., 1:]
    A1 = A[..., 0] + 1j * (im @ frame.i.imag)
    A2 = (im @ frame.j.imag) + 1j * (im @ frame.k.imag)
    return A1, A2


def chi_mat(A: np.ndarray, frame: SliceFrame) -> np.ndarray:
    """Entrywise-split embedding of an (n, n, 4) quaternion matrix.

    Returns the 2n x 2n complex matrix [[A1, A2], [-conj A2, conj A1]].
    """
    A1, A2 = _frame_coords(A, frame)
    top = np.concatenate([A1, A2], axis=1)
    bot = np.concatenate([-np.conj(A2), np.conj(A1)], axis=1)
    return np.concatenate([top, bot], axis=0)


def block_permutation(n: int) -> np.ndarray:
    """The permutation U_n with chi_mat(A) = U_n [chi(a_kl)]_blocks U_n^*.

    Row m has its 1 in column 2m-1 and row n+m in column 2m (1-based).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    U = np.zeros((2 * n, 2 * n), dtype=int)
    for m in range(n):
        U[m, 2 * m] = 1
        U[n + m, 2 * m + 1] = 1
    return U


def blockwise_chi(A: np.ndarray, frame: SliceFrame) -> np.ndarray:
    """The n x n block matrix [chi(a_kl)] as a 2n x 2n complex matrix."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    A1, A2 = _frame_coords(A, frame)
    out[0::2, 0::2] = A1
    out[0::2, 1::2] = A2
    out[1::2, 0::2] = -np.conj(A2)
    out[1::2, 1::2] = np.conj(A1)
    return out


def right_eigen_slice(A: np.ndarray, frame: SliceFrame) -> np.ndarray:
    """Spectrum of the embedded matrix = the C_i slice of the right spectrum.

    Closed under complex conjugation; returned in no particular order.
    """
    M = chi_mat(A, frame)
    try:
        return np.linalg.eigvals(M)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NoConvergence(f"eigenvalue iteration failed: {exc}") from exc
