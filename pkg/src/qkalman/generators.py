"""Seeded random instances for property tests and demos."""
import numpy as np
from scipy.linalg import block_diag

from .model import AnnihilationForm, BlockDims, HGammaParams

__all__ = ["random_annihilation", "random_dims", "random_hgamma", "planted_decomposition",
           "stacked_conjugate"]


def _u(rng, *shape):
    return rng.uniform(-1.0, 1.0, size=shape)


def _cu(rng, *shape):
    return _u(rng, *shape) + 1j * _u(rng, *shape)


def _sym(rng, k):
    X = _u(rng, k, k)
    return (X + X.T) / 2


def stacked_conjugate(top):
    """[T; conj(T)]: the doubled coupling for the top rows ``top``."""
    top = np.atleast_2d(np.asarray(top, dtype=complex))
    return np.vstack([top, top.conj()])


def random_annihilation(n, m, rng, passive=False, decoupled_mode=False):
    """Physically realizable annihilation-form system with entries in [-1, 1].

    ``passive`` zeroes Omega_plus and C_plus. ``decoupled_mode`` makes mode 0
    a free oscillator with no field coupling and no interaction with the rest.
    """
    rng = np.random.default_rng(rng)
    Om = _cu(rng, n, n)
    Om = (Om + Om.conj().T) / 2
    Op = _cu(rng, n, n)
    Op = (Op + Op.T) / 2
    Cm = _cu(rng, m, n)
    Cp = _cu(rng, m, n)
    if passive:
        Op = np.zeros((n, n))
        Cp = np.zeros((m, n))
    if decoupled_mode and n:
        for X in (Om, Op):
            d0 = X[0, 0]
            X[0, :] = 0
            X[:, 0] = 0
            X[0, 0] = d0.real if X is Om else d0
        Cm[:, 0] = 0
        Cp[:, 0] = 0
    return AnnihilationForm.from_physical(Om, Op, Cm, Cp)


def random_dims(rng, max_n=4, max_m=3):
    rng = np.random.default_rng(rng)
    while True:
        n1, n2, n3 = (int(v) for v in rng.integers(0, max_n + 1, size=3))
        if 1 <= n1 + n2 + n3 <= max_n:
            break
    na = int(rng.integers(0, n3 + 1))
    return BlockDims(n1=n1, n2=n2, na=na, nb=n3 - na, m=int(rng.integers(1, max_m + 1)))


def random_hgamma(dims, rng, bae=None, unobservable_co=False, zero_coupling=False):
    """Random (H, Gamma) blocks for ``dims``.

    bae: None, "pq", "qp" or "both" plants the matching BAE structure in the co
    block (H_co p-p block zero and the real, imaginary or whole p-part of the
    co coupling zero). ``unobservable_co`` detaches co mode 0 from everything.
    ``zero_coupling`` drops all field coupling.
    """
    rng = np.random.default_rng(rng)
    d = dims
    n1, n2, n3, m = d.n1, d.n2, d.n3, d.m
    H_co = _sym(rng, 2 * n1)
    Gh_top = _cu(rng, m, n3)
    Gc_top = _cu(rng, m, 2 * n1)
    H_12 = _u(rng, n3, 2 * n1)
    if bae is not None:
        H_co[n1:, n1:] = 0
        if bae == "pq":
            Gc_top[:, n1:] = 1j * Gc_top[:, n1:].imag
        elif bae == "qp":
            Gc_top[:, n1:] = Gc_top[:, n1:].real
        elif bae == "both":
            Gc_top[:, n1:] = 0
        else:
            raise ValueError(f"bae must be None, 'pq', 'qp' or 'both', got {bae!r}")
    if unobservable_co and n1:
        for i in (0, n1):
            H_co[i, :] = 0
            H_co[:, i] = 0
            H_12[:, i] = 0
            Gc_top[:, i] = 0
    if zero_coupling:
        Gh_top[:] = 0
        Gc_top[:] = 0
    return HGammaParams(
        d,
        H_h12=_u(rng, n3, n3), H_h22=_sym(rng, n3),
        H_12=H_12, H_13=_u(rng, n3, 2 * n2),
        H_co=H_co, H_cbo=_sym(rng, 2 * n2),
        Gamma_h=stacked_conjugate(Gh_top), Gamma_co=stacked_conjugate(Gc_top),
    )


def _mode_perm(k, rng):
    """Random mode permutation acting on (q; p) coordinates, as a matrix."""
    perm = rng.permutation(k)
    R = np.eye(k)[perm]
    return block_diag(R, R), perm


def planted_decomposition(rng, n_co=2, n_cbo=1):
    """Co block made of n_co decoupled single-mode subsystems, each on its own
    channel, plus a cbo block of n_cbo free modes; then modes are shuffled.

    Returns (params, co_perm, cbo_perm) where the permutations map new mode
    positions to the planted ones.
    """
    rng = np.random.default_rng(rng)
    m = n_co
    H_co = np.zeros((2 * n_co, 2 * n_co))
    Gc_top = np.zeros((m, 2 * n_co), dtype=complex)
    for i in range(n_co):
        h = _sym(rng, 2)
        H_co[np.ix_([i, n_co + i], [i, n_co + i])] = h
        Gc_top[i, [i, n_co + i]] = _cu(rng, 2)
    H_cbo = np.diag(np.tile(_u(rng, n_cbo), 2)) if n_cbo else np.zeros((0, 0))
    Pc, pc = _mode_perm(n_co, rng)
    Pb, pb = _mode_perm(n_cbo, rng)
    params = HGammaParams(BlockDims(n1=n_co, n2=n_cbo, m=m),
                          H_co=Pc @ H_co @ Pc.T, H_cbo=Pb @ H_cbo @ Pb.T,
                          Gamma_co=stacked_conjugate(Gc_top @ Pc.T))
    return params, pc, pb
