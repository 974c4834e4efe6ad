import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from qkalman.errors import ImaginaryResidue
from qkalman.linalg import (Tolerance, as_tol, block_sympJ, doubled_up, flat_adjoint,
                            is_blockwise_symplectic, is_bogoliubov, is_doubled_up,
                            is_hamiltonian_matrix, is_orthogonal, is_symplectic, make_J,
                            make_sympJ, make_V, maxabs, numerical_rank, realify)

finite = st.floats(-1, 1, allow_nan=False)


def orth_symplectic(U):
    X, Y = U.real, U.imag
    return np.block([[X, -Y], [Y, X]])


def random_unitary(k, rng):
    Z = rng.normal(size=(k, k)) + 1j * rng.normal(size=(k, k))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def test_basic_matrices():
    assert np.array_equal(make_J(2), np.diag([1, 1, -1, -1]))
    S = make_sympJ(1)
    assert np.array_equal(S, [[0, 1], [-1, 0]])
    V = make_V(3)
    assert np.allclose(V @ V.conj().T, np.eye(6))
    # V maps (a, a#) to (q, p)
    a = np.array([0.3 + 0.4j])
    x = make_V(1) @ np.concatenate([a, a.conj()])
    assert np.allclose(x, [np.sqrt(2) * 0.3, np.sqrt(2) * 0.4])


def test_constructors_are_read_only():
    J = make_J(1)
    with pytest.raises(ValueError):
        J[0, 0] = 5


def test_zero_dimension():
    assert make_J(0).shape == (0, 0)
    assert make_V(0).shape == (0, 0)
    assert block_sympJ([0, 0]).shape == (0, 0)


def test_block_sympJ():
    B = block_sympJ([1, 2])
    assert B.shape == (6, 6)
    assert np.array_equal(B[:2, :2], make_sympJ(1).real)
    assert np.array_equal(B[2:, 2:], make_sympJ(2).real)


@given(arrays(np.float64, (2, 3), elements=finite), arrays(np.float64, (2, 3), elements=finite))
def test_doubled_up_structure(U, V):
    D = doubled_up(U + 1j * V, V - 1j * U)
    assert is_doubled_up(D)
    assert np.allclose(flat_adjoint(flat_adjoint(D)), D)


def test_doubled_up_layout():
    D = doubled_up([[1j]], [[2]])
    assert np.array_equal(D, [[1j, 2], [2, -1j]])
    assert not is_doubled_up(np.array([[1j, 2], [-1j, 2]]))


def test_bogoliubov_from_unitary(rng):
    U = random_unitary(3, rng)
    T = doubled_up(U, np.zeros((3, 3)))
    assert is_bogoliubov(T)
    assert not is_bogoliubov(2 * T)


def test_orthogonal_symplectic(rng):
    P = orth_symplectic(random_unitary(3, rng))
    assert is_symplectic(P)
    assert is_orthogonal(P)
    assert not is_symplectic(np.diag([2.0, 1, 1, 0.5, 1, 1]) @ np.eye(6)[[1, 0, 2, 3, 4, 5]])


def test_blockwise_symplectic():
    # swap two modes: sends (q1, q2, p1, p2) to (q2, p2, q1, p1) blocks of one mode each
    P = np.eye(4)[[1, 3, 0, 2]]
    assert is_blockwise_symplectic(P, [1, 1])
    # identity regrouped as (q1, q2, p1, p2) is symplectic for [2] but not blockwise for [1, 1]
    assert is_blockwise_symplectic(np.eye(4), [2])
    assert not is_blockwise_symplectic(np.eye(4), [1, 1])
    assert not is_blockwise_symplectic(2 * np.eye(4), [2])


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_hamiltonian_matrix_property(seed, k):
    rng = np.random.default_rng(seed)
    H = rng.normal(size=(2 * k, 2 * k))
    H = H + H.T
    N = make_sympJ(k).real @ H
    assert is_hamiltonian_matrix(N)
    e = np.linalg.eigvals(N)
    # closed under negation
    assert max(np.min(np.abs(e + z)) for z in e) < 1e-8


def test_hamiltonian_matrix_rejects_complex():
    with pytest.raises(ValueError):
        is_hamiltonian_matrix(1j * make_sympJ(1))


def test_realify_guard():
    assert realify(np.array([1 + 1e-14j])).dtype == float
    with pytest.raises(ImaginaryResidue):
        realify(np.array([1 + 1e-3j]), "X")


def test_numerical_rank():
    M = np.diag([1.0, 1e-3, 1e-14])
    r, thr = numerical_rank(M)
    assert r == 2
    assert thr == pytest.approx(3e-10)
    assert numerical_rank(np.zeros((0, 3)))[0] == 0


def test_tolerance():
    t = as_tol(1e-6)
    assert t.abs == t.rel == 1e-6
    assert as_tol(None) == Tolerance()
    assert t.accepts(1e-6, 0.0)
    assert not t.accepts(1e-5, 1.0)
    assert maxabs(np.zeros((0, 2))) == 0.0
