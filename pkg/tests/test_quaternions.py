from __future__ import annotations

import numpy as np
import pytest

from qopuc.errors import NotInImage
from qopuc.quaternions import (
    ONE, QI, QJ, QK, Quaternion, SliceFrame, block_permutation, blockwise_chi,
    chi, chi_inv, chi_mat, qarr_abs, qarr_mul, qmat_from_quaternions, qmat_mul,
    qmul, right_eigen_slice, split,
)
from conftest import random_qmatrix, random_quaternion


def test_defining_relations():
    assert qmul(QI, QJ) == QK
    assert qmul(QI, QI) == Quaternion(-1)
    assert qmul(QJ, QJ) == Quaternion(-1)
    assert qmul(QK, QK) == Quaternion(-1)
    p = Quaternion(1.5, -2.0, 0.25, 3.0)
    assert qmul(ONE, p) == p
    assert qmul(p, ONE) == p


def test_mul_bilinear_associative(rng):
    for _ in range(50):
        a, b, c = (random_quaternion(rng) for _ in range(3))
        lhs = (a * b) * c
        rhs = a * (b * c)
        assert abs(lhs - rhs) < 1e-12 * max(1.0, abs(a) * abs(b) * abs(c))
        s = 0.7
        assert abs((a * s) * b - (a * b) * s) < 1e-12


def test_norm_multiplicative_and_conj(rng):
    for _ in range(100):
        p = random_quaternion(rng)
        q = random_quaternion(rng)
        assert abs(abs(p * q) - abs(p) * abs(q)) < 1e-11 * max(1.0, abs(p) * abs(q))
        cp = p.conjugate() * p
        assert abs(cp - Quaternion(p.norm_sq())) < 1e-12 * max(1.0, p.norm_sq())


def test_split_standard_frame(frame):
    z1, z2 = split(Quaternion(1, 2, 3, 4), frame)
    assert z1 == 1 + 2j and z2 == 3 + 4j
    z1, z2 = split(Quaternion(5), frame)
    assert z1 == 5 + 0j and z2 == 0j


def test_split_reassembly_random_frames(rng):
    for _ in range(50):
        fr = SliceFrame.random(rng)
        p = random_quaternion(rng)
        z1, z2 = fr.split(p)
        back = fr.from_split(z1, z2)
        assert abs(back - p) < 4 * np.finfo(float).eps * max(1.0, abs(p))


def test_frame_validation():
    with pytest.raises(ValueError):
        SliceFrame(Quaternion(0.1, 1, 0, 0), QJ)
    with pytest.raises(ValueError):
        SliceFrame(QI, Quaternion(0, 0, 2, 0))
    with pytest.raises(ValueError):
        SliceFrame(QI, QI)
    fr = SliceFrame(QI, QJ)
    assert fr.k == QK
    assert abs(fr.k * fr.k + ONE) == 0


def test_chi_basics(frame):
    assert np.allclose(chi(ONE, frame), np.eye(2))
    assert np.allclose(chi(QJ, frame), np.array([[0, 1], [-1, 0]]))


def test_chi_homomorphism_isometry(rng):
    for _ in range(100):
        fr = SliceFrame.random(rng)
        p = random_quaternion(rng)
        q = random_quaternion(rng)
        Mp, Mq = chi(p, fr), chi(q, fr)
        scale = max(1.0, abs(p) * abs(q))
        assert np.max(np.abs(chi(p * q, fr) - Mp @ Mq)) < 1e-12 * scale
        assert np.max(np.abs(chi(p.conjugate(), fr) - Mp.conj().T)) < 1e-14 * max(1.0, abs(p))
        assert abs(np.linalg.norm(Mp, 2) - abs(p)) < 1e-12 * max(1.0, abs(p))


def test_chi_inv_round_trip(rng):
    for _ in range(50):
        fr = SliceFrame.random(rng)
        p = random_quaternion(rng)
        assert abs(chi_inv(chi(p, fr), fr) - p) < 1e-12 * max(1.0, abs(p))
    assert chi_inv(np.eye(2), SliceFrame.standard()) == ONE


def test_chi_inv_rejects_structure_violations(frame):
    with pytest.raises(NotInImage):
        chi_inv(np.diag([1.0, 2.0]), frame)


def test_chi_mat_scalar_case(frame):
    A = qmat_from_quaternions([[ONE]])
    assert np.array_equal(chi_mat(A, frame), np.eye(2, dtype=complex))


def test_chi_mat_multiplicative(rng):
    for _ in range(20):
        fr = SliceFrame.random(rng)
        A = random_qmatrix(rng, 3)
        B = random_qmatrix(rng, 3)
        lhs = chi_mat(qmat_mul(A, B), fr)
        rhs = chi_mat(A, fr) @ chi_mat(B, fr)
        assert np.max(np.abs(lhs - rhs)) < 1e-12 * max(1.0, np.max(np.abs(rhs)))


def test_chi_mat_positivity(rng, frame):
    # Hermitian PD quaternionic matrix -> Hermitian PD complex matrix
    for _ in range(10):
        B = random_qmatrix(rng, 3)
        from qopuc.quaternions import qmat_conj_T
        A = qmat_mul(B, qmat_conj_T(B))
        A[np.arange(3), np.arange(3), 0] += 0.5  # push eigenvalues off zero
        M = chi_mat(A, frame)
        assert np.max(np.abs(M - M.conj().T)) < 1e-12
        np.linalg.cholesky(M)  # raises if not PD


def test_block_permutation_printed_matrices():
    assert np.array_equal(block_permutation(1), np.eye(2, dtype=int))
    U2 = np.array([
        [1, 0, 0, 0],
        [0, 0, 1, 0],
        [0, 1, 0, 0],
        [0, 0, 0, 1],
    ])
    assert np.array_equal(block_permutation(2), U2)
    U3 = np.array([
        [1, 0, 0, 0, 0, 0],
        [0, 0, 1, 0, 0, 0],
        [0, 0, 0, 0, 1, 0],
        [0, 1, 0, 0, 0, 0],
        [0, 0, 0, 1, 0, 0],
        [0, 0, 0, 0, 0, 1],
    ])
    assert np.array_equal(block_permutation(3), U3)


def test_block_permutation_conjugation_exact(rng):
    for n in range(1, 7):
        fr = SliceFrame.random(rng)
        A = random_qmatrix(rng, n)
        U = block_permutation(n)
        lhs = chi_mat(A, fr)
        rhs = U @ blockwise_chi(A, fr) @ U.T
        assert np.array_equal(lhs, rhs)  # a permutation of entries: bitwise equal


def test_right_eigen_slice_small_cases(frame):
    A = qmat_from_quaternions([[Quaternion(2.5)]])
    vals = sorted(right_eigen_slice(A, frame).real)
    assert np.allclose(vals, [2.5, 2.5])
    A = qmat_from_quaternions([[QI]])
    vals = sorted(right_eigen_slice(A, frame), key=lambda z: z.imag)
    assert np.allclose(vals, [-1j, 1j])


def test_right_eigen_slice_conjugation_symmetry(rng):
    from qopuc.zeros import multiset_distance
    for _ in range(10):
        fr = SliceFrame.random(rng)
        A = random_qmatrix(rng, 3)
        vals = right_eigen_slice(A, fr)
        assert multiset_distance(vals, np.conj(vals)) < 1e-9


def test_right_eigen_slice_hermitian(rng, frame):
    from qopuc.quaternions import qmat_conj_T
    for _ in range(5):
        B = random_qmatrix(rng, 3)
        A = 0.5 * (B + qmat_conj_T(B))
        vals = right_eigen_slice(A, frame)
        assert np.max(np.abs(vals.imag)) < 1e-9
        re = np.sort(vals.real)
        # conjugate-coincident pairs
        assert np.max(np.abs(re[0::2] - re[1::2])) < 1e-9
        # characteristic polynomial oracle
        M = chi_mat(A, frame)
        for lam in vals:
            cofactor = np.linalg.svd(M - lam * np.eye(6), compute_uv=False)
            assert cofactor[-1] < 1e-9 * max(1.0, cofactor[0])


def test_qarr_helpers(rng):
    a = rng.normal(size=(5, 4))
    b = rng.normal(size=(5, 4))
    prod = qarr_mul(a, b)
    for i in range(5):
        expected = Quaternion.from_array(a[i]) * Quaternion.from_array(b[i])
        assert np.allclose(prod[i], expected.to_array())
    assert np.allclose(qarr_abs(a), [abs(Quaternion.from_array(r)) for r in a])
