"""Structured matrices used throughout: J, the symplectic form, V, the flat adjoint,
and predicates for doubled-up, Bogoliubov, symplectic and Hamiltonian matrices.

All constructors accept ``k = 0`` and return empty arrays; all predicates are
vacuously true on empty input.
"""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .errors import ShapeError, ImaginaryResidue

__all__ = [
    "Tolerance", "DEFAULT_TOL", "Check", "as_tol",
    "make_J", "make_sympJ", "make_V", "block_sympJ", "doubled_up",
    "flat_adjoint", "is_doubled_up", "is_bogoliubov", "is_symplectic",
    "is_blockwise_symplectic", "is_hamiltonian_matrix", "is_orthogonal",
    "maxabs", "close", "realify", "numerical_rank", "RANK_RTOL",
]

RANK_RTOL = 1e-10


@dataclass(frozen=True)
class Tolerance:
    """Equality policy: x ~ y iff |x - y| <= abs + rel * max(|x|, |y|)."""

    abs: float = 1e-10
    rel: float = 1e-10

    def __post_init__(self):
        if not (self.abs >= 0 and self.rel >= 0):
            raise ValueError("tolerances must be nonnegative")

    def bound(self, scale=0.0):
        return self.abs + self.rel * float(scale)

    def accepts(self, residual, scale=0.0):
        return float(residual) <= self.bound(scale)


DEFAULT_TOL = Tolerance()


def as_tol(tol):
    if tol is None:
        return DEFAULT_TOL
    if isinstance(tol, Tolerance):
        return tol
    return Tolerance(float(tol), float(tol))


@dataclass(frozen=True)
class Check:
    """Outcome of a structural predicate; truthy iff ``ok``."""

    ok: bool
    residual: float

    def __bool__(self):
        return bool(self.ok)


def maxabs(X):
    X = np.asarray(X)
    return float(np.max(np.abs(X))) if X.size else 0.0


def close(X, Y, tol=None):
    """Matrix-wise comparison under the tolerance policy, returned as a Check."""
    tol = as_tol(tol)
    X = np.asarray(X)
    Y = np.asarray(Y)
    if X.shape != Y.shape:
        raise ShapeError(f"shape mismatch {X.shape} vs {Y.shape}")
    r = maxabs(X - Y)
    return Check(tol.accepts(r, max(maxabs(X), maxabs(Y))), r)


def _frozen(a):
    a.setflags(write=False)
    return a


def make_J(k):
    """diag(I_k, -I_k)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    return _frozen(np.diag(np.concatenate([np.ones(k), -np.ones(k)])).astype(complex))


def make_sympJ(k):
    """The 2k x 2k symplectic form [[0, I], [-I, 0]]."""
    if k < 0:
        raise ValueError("k must be >= 0")
    Z = np.zeros((2 * k, 2 * k), dtype=complex)
    Z[:k, k:] = np.eye(k)
    Z[k:, :k] = -np.eye(k)
    return _frozen(Z)


def make_V(k):
    """Unitary V_k = (1/sqrt 2) [[I, I], [-iI, iI]] mapping (a, a#) to (q, p)."""
    if k < 0:
        raise ValueError("k must be >= 0")
    I = np.eye(k)
    V = np.block([[I, I], [-1j * I, 1j * I]]) / np.sqrt(2.0)
    return _frozen(V.astype(complex))


def block_sympJ(dims):
    """diag(sympJ(d1), sympJ(d2), ...) as a real array."""
    blocks = [make_sympJ(d).real for d in dims]
    if not blocks:
        return np.zeros((0, 0))
    return block_diag(*blocks)


def doubled_up(U, V):
    """Delta(U, V) = [[U, V], [V#, U#]]."""
    U = np.atleast_2d(np.asarray(U, dtype=complex))
    V = np.atleast_2d(np.asarray(V, dtype=complex))
    if U.shape != V.shape:
        raise ShapeError("U and V must have the same shape")
    return np.block([[U, V], [V.conj(), U.conj()]])


def _halves(X, name="X"):
    X = np.asarray(X)
    if X.ndim != 2 or X.shape[0] % 2 or X.shape[1] % 2:
        raise ShapeError(f"{name} must be a 2-D array with even dimensions, got {X.shape}")
    return X.shape[0] // 2, X.shape[1] // 2


def flat_adjoint(X):
    """X^flat = J_r X^dagger J_k for X of shape 2k x 2r."""
    X = np.asarray(X)
    k, r = _halves(X)
    return make_J(r) @ X.conj().T @ make_J(k)


def is_doubled_up(X, tol=None):
    tol = as_tol(tol)
    X = np.asarray(X)
    k, r = _halves(X)
    U, V = X[:k, :r], X[:k, r:]
    res = max(maxabs(X[k:, :r] - V.conj()), maxabs(X[k:, r:] - U.conj()))
    return Check(tol.accepts(res, maxabs(X)), res)


def _square_even(X, name):
    X = np.asarray(X)
    k, r = _halves(X, name)
    if k != r:
        raise ShapeError(f"{name} must be square, got {X.shape}")
    return k


def is_bogoliubov(T, tol=None):
    tol = as_tol(tol)
    T = np.asarray(T)
    k = _square_even(T, "T")
    du = is_doubled_up(T, tol)
    Tf = flat_adjoint(T)
    I = np.eye(2 * k)
    res = max(du.residual, maxabs(T @ Tf - I), maxabs(Tf @ T - I))
    scale = max(1.0, maxabs(T) ** 2)
    return Check(du.ok and tol.accepts(res, scale), res)


def is_symplectic(S, tol=None):
    tol = as_tol(tol)
    S = np.asarray(S)
    k = _square_even(S, "S")
    Jk = make_sympJ(k)
    Sd = S.conj().T
    res = max(maxabs(S @ Jk @ Sd - Jk), maxabs(Sd @ Jk @ S - Jk))
    return Check(tol.accepts(res, max(1.0, maxabs(S) ** 2)), res)


def is_orthogonal(P, tol=None):
    tol = as_tol(tol)
    P = np.asarray(P)
    if P.ndim != 2 or P.shape[0] != P.shape[1]:
        raise ShapeError("P must be square")
    res = maxabs(P @ P.T - np.eye(P.shape[0]))
    return Check(tol.accepts(res, 1.0), res)


def is_blockwise_symplectic(P, target_dims, source_dims=None, tol=None, require_orthogonal=True):
    """Check P diag(sympJ(source)) P^T = diag(sympJ(target)).

    ``source_dims`` defaults to a single block of size n (half the size of P).
    With ``require_orthogonal`` the check also demands P P^T = I.
    """
    tol = as_tol(tol)
    P = np.asarray(P)
    n = _square_even(P, "P")
    target_dims = [int(d) for d in target_dims]
    source_dims = [n] if source_dims is None else [int(d) for d in source_dims]
    if sum(target_dims) != n or sum(source_dims) != n or min(target_dims + source_dims, default=0) < 0:
        raise ShapeError(f"block dims {source_dims}->{target_dims} do not split {n} modes")
    res = maxabs(P @ block_sympJ(source_dims) @ P.T - block_sympJ(target_dims))
    if require_orthogonal:
        res = max(res, is_orthogonal(P, tol).residual)
    return Check(tol.accepts(res, max(1.0, maxabs(P) ** 2)), res)


def is_hamiltonian_matrix(N, tol=None):
    """True iff sympJ(d) @ N is symmetric; N must be real of even size 2d."""
    tol = as_tol(tol)
    N = np.asarray(N)
    d = _square_even(N, "N")
    if np.iscomplexobj(N):
        if maxabs(N.imag) > 0:
            raise ValueError("Hamiltonian-matrix test requires a real matrix")
        N = N.real
    M = make_sympJ(d).real @ N
    res = maxabs(M - M.T)
    return Check(tol.accepts(res, maxabs(M)), res)


def realify(X, name="matrix", guard=1e-10):
    """Drop imaginary parts no larger than ``guard``; raise ImaginaryResidue otherwise."""
    X = np.asarray(X)
    if not np.iscomplexobj(X):
        return X.astype(float)
    im = maxabs(X.imag)
    if im > guard:
        raise ImaginaryResidue(name, im)
    return np.ascontiguousarray(X.real)


def numerical_rank(M):
    """Rank with the shared threshold: sigma_k counts iff sigma_k > max(rows, cols) * sigma_1 * 1e-10.

    Returns ``(rank, threshold)``.
    """
    M = np.asarray(M)
    if M.size == 0:
        return 0, 0.0
    s = np.linalg.svd(M, compute_uv=False)
    thr = max(M.shape) * s[0] * RANK_RTOL
    return int(np.sum(s > thr)), float(thr)
