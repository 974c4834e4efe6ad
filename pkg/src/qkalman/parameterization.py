"""Between (H, Gamma) parameters and Kalman-form system matrices.

``build_from_hgamma`` evaluates the blockwise formulas; ``hamiltonian_realization``
is the generic (non-blockwise) map from a full Hamiltonian matrix and coupling to
a quadrature system and serves as its independent cross-check.
"""
from dataclasses import dataclass

import numpy as np

from .errors import AsymmetryError, RealizabilityError, StructureError
from .linalg import as_tol, make_J, make_V, make_sympJ, maxabs, realify
from .model import HGammaParams, KalmanForm, QuadratureSystem
from .realizability import check_pr_blockwise
from .structure import h_pair, is_observable

__all__ = ["IMAG_GUARD", "build_from_hgamma", "extract_hgamma", "split_gamma_co",
           "hamiltonian_realization", "TheoremCoCheck", "check_theorem_co"]

IMAG_GUARD = 1e-10


def build_from_hgamma(p, guard=IMAG_GUARD):
    """Kalman blocks generated by the Hamiltonian and coupling blocks of ``p``.

    Complex intermediate products are realified at the end; an imaginary part
    above ``guard`` raises ImaginaryResidue (the Gamma rows are then not
    stacked conjugates).
    """
    d = p.dims
    J1 = make_sympJ(d.n1)
    J2 = make_sympJ(d.n2)
    Jm_sym = make_sympJ(d.m)
    Jm = make_J(d.m)
    Vm = make_V(d.m)
    Gh, Gc = p.Gamma_h, p.Gamma_co
    Ghd, Gcd = Gh.conj().T, Gc.conj().T
    blocks = {
        "A_h11": p.H_h12.T,
        "A_h12": p.H_h22 - 0.5j * Ghd @ Jm @ Gh,
        "A_h22": -p.H_h12,
        "A_12": p.H_12 - 0.5j * Ghd @ Jm @ Gc,
        "A_13": p.H_13,
        "A_co": J1 @ p.H_co - 0.5j * J1 @ Gcd @ Jm @ Gc,
        "A_cbo": J2 @ p.H_cbo,
        "A_21": J1 @ p.H_12.T - 0.5j * J1 @ Gcd @ Jm @ Gh,
        "A_31": J2 @ p.H_13.T,
        "B_h": Ghd @ Vm.conj().T @ Jm_sym,
        "B_co": J1 @ Gcd @ Vm.conj().T @ Jm_sym,
        "C_h": Vm @ Gh,
        "C_co": Vm @ Gc,
    }
    return KalmanForm(d, **{k: realify(v, k, guard) for k, v in blocks.items()})


def hamiltonian_realization(H, Gamma, sympJ, guard=IMAG_GUARD):
    """Quadrature system generated by x^T H x / 2 and coupling rows Gamma.

    ``Gamma`` is the 2m x 2n doubled coupling and ``sympJ`` the commutation
    matrix of the state. A = sympJ H - (i/2) sympJ Gamma^dag J_m Gamma,
    B = sympJ Gamma^dag V_m^dag sympJ_m, C = V_m Gamma.
    """
    H = np.asarray(H, dtype=float)
    G = np.asarray(Gamma, dtype=complex)
    S = np.asarray(sympJ, dtype=float)
    m = G.shape[0] // 2
    n2 = H.shape[0]
    Vm = make_V(m)
    A = S @ H - 0.5j * S @ G.conj().T @ make_J(m) @ G
    B = S @ G.conj().T @ Vm.conj().T @ make_sympJ(m)
    C = Vm @ G
    return QuadratureSystem(n2 // 2, m, realify(A, "A", guard), realify(B, "B", guard),
                            realify(C, "C", guard))


def extract_hgamma(k, tol=None):
    """Recover (H, Gamma) blocks from a realizable Kalman-form system.

    The recovered H blocks are checked for symmetry, never symmetrized.
    """
    tol = as_tol(tol)
    rep = check_pr_blockwise(k, tol)
    if not rep.passed:
        raise RealizabilityError("Kalman form is not physically realizable", rep)
    d = k.dims
    J1 = make_sympJ(d.n1).real
    J2 = make_sympJ(d.n2).real
    Jm = make_sympJ(d.m).real
    Vmd = make_V(d.m).conj().T
    H = {
        "H_h12": -k.A_h22,
        "H_h22": k.A_h12 - k.B_h @ Jm @ k.B_h.T / 2,
        "H_12": k.A_12 - k.B_h @ Jm @ k.B_co.T @ J1 / 2,
        "H_13": k.A_13,
        "H_co": -J1 @ k.A_co + J1 @ k.B_co @ Jm @ k.B_co.T @ J1 / 2,
        "H_cbo": -J2 @ k.A_cbo,
    }
    for name in ("H_h22", "H_co", "H_cbo"):
        X = H[name]
        r = maxabs(X - X.T)
        if not tol.accepts(r, maxabs(X)):
            raise AsymmetryError(name, r)
    return HGammaParams(d, Gamma_h=Vmd @ k.C_h, Gamma_co=Vmd @ k.C_co, **H)


def split_gamma_co(Gamma_co, tol=None):
    """Top-half blocks (Gamma_co_q, Gamma_co_p) of a stacked-conjugate Gamma_co."""
    tol = as_tol(tol)
    G = np.atleast_2d(np.asarray(Gamma_co, dtype=complex))
    if G.shape[0] % 2 or G.shape[1] % 2:
        raise StructureError("Gamma_co", 0.0, f"even shape required, got {G.shape}")
    m, n1 = G.shape[0] // 2, G.shape[1] // 2
    r = maxabs(G[m:] - G[:m].conj())
    if not tol.accepts(r, maxabs(G)):
        raise StructureError("Gamma_co", r, "lower rows must be conjugates of upper rows")
    return G[:m, :n1].copy(), G[:m, n1:].copy()


@dataclass(frozen=True)
class TheoremCoCheck:
    symmetric_ok: bool
    observability_ok: bool
    obsv_rank: int
    state_dim: int
    asymmetry: float

    def __bool__(self):
        return self.symmetric_ok and self.observability_ok

    def as_dict(self):
        return {"symmetric_ok": self.symmetric_ok, "observability_ok": self.observability_ok,
                "obsv_rank": self.obsv_rank, "state_dim": self.state_dim,
                "asymmetry": self.asymmetry}


def check_theorem_co(p, tol=None):
    """Sufficient conditions for (H, Gamma) to generate a genuine Kalman canonical form.

    (i) H_h22, H_co, H_cbo symmetric; (ii) the coupled co/h pair
    ([[J H_co, J H_12^T], [0, -H_h12]], [Gamma_co, Gamma_h]) is observable.
    """
    tol = as_tol(tol)
    asym = 0.0
    sym_ok = True
    for name in ("H_h22", "H_co", "H_cbo"):
        X = getattr(p, name)
        r = maxabs(X - X.T)
        asym = max(asym, r)
        sym_ok = sym_ok and tol.accepts(r, maxabs(X))
    A, C = h_pair(p)
    obs = is_observable(A, C, tol)
    return TheoremCoCheck(bool(sym_ok), bool(obs.ok), obs.rank, obs.dim, asym)
