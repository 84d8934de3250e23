from __future__ import annotations

import numpy as np
import pytest

from qopuc.matrix_opuc import sqrtm_herm2
from qopuc.quaternions import Quaternion, SliceFrame, chi


def random_quaternion(rng, scale=1.0):
    return Quaternion(*(scale * rng.normal(size=4)))


def random_unit_ball_quaternion(rng, rmax=0.8, rmin=0.0):
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    r = rng.uniform(rmin, rmax)
    return Quaternion(*(r * v))


def random_contraction(rng, rmax=0.8):
    """Random 2x2 strict contraction with operator norm <= rmax."""
    A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    return A * (rmax * rng.uniform(0.2, 1.0) / np.linalg.norm(A, 2))

def random_chi_contraction(rng, frame=None, rmax=0.8):
    frame = frame or SliceFrame.standard()
    return chi(random_unit_ball_quaternion(rng, rmax=rmax), frame)


def random_qmatrix(rng, n, scale=1.0):
    return scale * rng.normal(size=(n, n, 4))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture
def frame():
    return SliceFrame.standard()


# ---- chi-embedded matrix Gram-Schmidt: the independent oracle for the
# quaternionic orthonormal families ----

EYE2 = np.eye(2, dtype=complex)


def matrix_gram_schmidt(C, N):
    """Independent chi-embedded oracle for the orthonormal families."""
    def Cm(n):
        if n == 0:
            return EYE2
        return C[n] if n > 0 else C[-n].conj().T

    def inner_r(f, g):
        out = np.zeros((2, 2), dtype=complex)
        for l in range(len(g)):
            for k in range(len(f)):
                out += g[l].conj().T @ Cm(k - l) @ f[k]
        return out

    def inner_l(f, g):
        out = np.zeros((2, 2), dtype=complex)
        for k in range(len(f)):
            for l in range(len(g)):
                out += f[k] @ Cm(k - l) @ g[l].conj().T
        return out

    right, left = [], []
    for n in range(N + 1):
        v = [np.zeros((2, 2), complex) for _ in range(n + 1)]
        v[n] = EYE2.copy()
        for _ in range(2):
            for q in right:
                coef = inner_r(v, q)
                for k in range(len(q)):
                    v[k] = v[k] - q[k] @ coef
        H = inner_r(v, v)
        Hi = np.linalg.inv(sqrtm_herm2(H))
        right.append([vk @ Hi for vk in v])

        w = [np.zeros((2, 2), complex) for _ in range(n + 1)]
        w[n] = EYE2.copy()
        for _ in range(2):
            for q in left:
                coef = inner_l(w, q)
                for k in range(len(q)):
                    w[k] = w[k] - coef @ q[k]
        H = inner_l(w, w)
        Hi = np.linalg.inv(sqrtm_herm2(H))
        left.append([Hi @ wk for wk in w])
    return right, left


