"""Spectra, controllability/observability rank tests and the structural theorems
built on them (Hurwitz implies c&o, passivity, equivalence of the h/co rank tests).

Rank policy (shared by every rank decision in the package): a singular value
sigma_k counts iff sigma_k > max(rows, cols) * sigma_1 * 1e-10.
"""
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import RealizabilityError
from .linalg import as_tol, make_sympJ, maxabs, numerical_rank
from .realizability import check_pr_quadrature, recover_omega

__all__ = [
    "EIG_MATCH_TOL", "spectrum", "check_quadruple_symmetry", "SymmetryCheck", "SpectrumReport",
    "spectrum_report", "h_subsystem_poles", "ctrb_matrix", "obsv_matrix", "RankReport",
    "is_controllable", "is_observable", "COReport", "co_report", "HurwitzVerdict",
    "is_hurwitz", "check_hurwitz_theorem", "is_passive", "LemmaReport",
    "verify_equivalence_lemmas",
]

EIG_MATCH_TOL = 1e-8


def spectrum(A):
    """Eigenvalues with multiplicity (LAPACK geev, which balances first)."""
    A = np.asarray(A)
    if A.size == 0:
        return np.zeros(0, dtype=complex)
    return np.linalg.eigvals(A).astype(complex)


def _match(x, y):
    """Optimal one-to-one matching of x onto y; returns (perm, max distance)."""
    if len(x) == 0:
        return np.zeros(0, dtype=int), 0.0
    cost = np.abs(x[:, None] - y[None, :])
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(len(x), dtype=int)
    perm[rows] = cols
    return perm, float(cost[rows, cols].max())


@dataclass(frozen=True)
class SymmetryCheck:
    ok: bool
    residual: float
    pairing: tuple

    def __bool__(self):
        return bool(self.ok)


def check_quadruple_symmetry(eigs, tol=EIG_MATCH_TOL):
    """Is the multiset closed under lambda -> -lambda and lambda -> conj(lambda)?

    Each image multiset is matched to the original by minimum-cost assignment;
    the check passes iff every matched pair lies within ``tol`` (absolute).
    ``pairing`` groups eigenvalues into their {l, -l, l*, -l*} orbits.
    """
    e = np.asarray(eigs, dtype=complex).ravel()
    neg, r1 = _match(e, -e)
    conj, r2 = _match(e, e.conj())
    # orbits: connected components of i ~ neg[i] ~ conj[i]
    parent = list(range(len(e)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(len(e)):
        for j in (neg[i], conj[i]):
            a, b = find(i), find(int(j))
            if a != b:
                parent[max(a, b)] = min(a, b)
    groups = {}
    for i in range(len(e)):
        groups.setdefault(find(i), []).append(complex(e[i]))
    pairing = tuple(tuple(g) for _, g in sorted(groups.items()))
    res = max(r1, r2)
    return SymmetryCheck(res <= tol, res, pairing)


def is_hurwitz(eigs, tol=None):
    tol = as_tol(tol)
    e = np.asarray(eigs)
    return bool(np.all(e.real < -tol.abs))


@dataclass(frozen=True)
class SpectrumReport:
    eigenvalues: tuple
    quadruple_symmetric: bool
    hurwitz: bool
    pairing: tuple
    symmetry_residual: float

    def as_dict(self):
        return {
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "quadruple_symmetric": bool(self.quadruple_symmetric),
            "hurwitz": bool(self.hurwitz),
            "symmetry_residual": float(self.symmetry_residual),
        }


def _sorted_eigs(e):
    return tuple(complex(z) for z in sorted(np.asarray(e, dtype=complex), key=lambda z: (round(z.real, 9), round(z.imag, 9))))


def spectrum_report(A, tol=None, match_tol=EIG_MATCH_TOL):
    e = spectrum(A)
    sym = check_quadruple_symmetry(e, match_tol)
    return SpectrumReport(_sorted_eigs(e), sym.ok, is_hurwitz(e, tol), sym.pairing, sym.residual)


def h_subsystem_poles(A_h11):
    """Poles of the h subsystem: sigma(A_h11) together with sigma(-A_h11)."""
    e = spectrum(A_h11)
    return np.concatenate([e, -e])


def _power_scale(A):
    a = np.linalg.norm(A, 2) if A.size else 0.0
    return max(1.0, a)


def ctrb_matrix(A, B):
    """[B, A'B, ..., A'^(d-1) B] with A' = A / max(1, ||A||_2).

    Dividing A by its norm rescales the k-th block by a positive constant,
    which leaves the rank unchanged and keeps high powers representable.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    d = A.shape[0]
    if B.ndim != 2 or B.shape[0] != d:
        raise ValueError(f"B must have {d} rows")
    if d == 0 or B.shape[1] == 0:
        return np.zeros((d, 0), dtype=np.result_type(A, B))
    As = A / _power_scale(A)
    blocks = [B]
    for _ in range(d - 1):
        blocks.append(As @ blocks[-1])
    return np.hstack(blocks)


def obsv_matrix(A, C):
    return ctrb_matrix(np.asarray(A).T, np.asarray(C).T).T


@dataclass(frozen=True)
class RankReport:
    ok: bool
    rank: int
    dim: int
    sigma_min_used: float

    def __bool__(self):
        return bool(self.ok)


def _pbh(A, B):
    d = A.shape[0]
    worst_rank, thr_used = d, 0.0
    for lam in spectrum(A):
        M = np.hstack([A - lam * np.eye(d), B])
        r, thr = numerical_rank(M)
        if r < worst_rank:
            worst_rank = r
        thr_used = max(thr_used, thr)
    return worst_rank, thr_used


def is_controllable(A, B, tol=None, method="kalman"):
    """Rank test of (A, B); ``method`` is "kalman" (default) or "pbh".

    ``tol`` is accepted for interface symmetry; rank decisions use the fixed
    singular-value policy documented in the module docstring.
    """
    A = np.asarray(A)
    B = np.asarray(B)
    d = A.shape[0]
    if d == 0:
        return RankReport(True, 0, 0, 0.0)
    if B.size == 0:
        return RankReport(False, 0, d, 0.0)
    if method == "kalman":
        r, thr = numerical_rank(ctrb_matrix(A, B))
    elif method == "pbh":
        r, thr = _pbh(A, B)
    else:
        raise ValueError(f"unknown rank method {method!r}")
    return RankReport(r == d, r, d, thr)


def is_observable(A, C, tol=None, method="kalman"):
    return is_controllable(np.asarray(A).T, np.asarray(C).T, tol, method)


@dataclass(frozen=True)
class COReport:
    controllable: bool
    observable: bool
    ctrb_rank: int
    obsv_rank: int
    sigma_min_used: float

    def as_dict(self):
        return {"controllable": bool(self.controllable), "observable": bool(self.observable),
                "ctrb_rank": int(self.ctrb_rank), "obsv_rank": int(self.obsv_rank),
                "sigma_min_used": float(self.sigma_min_used)}


def co_report(A, B, C, tol=None, method="kalman"):
    c = is_controllable(A, B, tol, method)
    o = is_observable(A, C, tol, method)
    return COReport(c.ok, o.ok, c.rank, o.rank, max(c.sigma_min_used, o.sigma_min_used))


@dataclass(frozen=True)
class HurwitzVerdict:
    hurwitz: bool
    controllable: bool
    observable: bool
    theorem_respected: bool
    max_real_part: float

    def as_dict(self):
        return {"hurwitz": self.hurwitz, "controllable": self.controllable,
                "observable": self.observable, "theorem_respected": self.theorem_respected,
                "max_real_part": self.max_real_part}


def check_hurwitz_theorem(q, dims, tol=None):
    """Hurwitz stability must imply controllability and observability for a realizable system."""
    tol = as_tol(tol)
    rep = check_pr_quadrature(q, dims, tol)
    if not rep.passed:
        raise RealizabilityError("system is not physically realizable", rep)
    e = spectrum(q.Abar)
    hw = is_hurwitz(e, tol)
    co = co_report(q.Abar, q.Bbar, q.Cbar, tol)
    mx = float(e.real.max()) if e.size else float("-inf")
    return HurwitzVerdict(hw, co.controllable, co.observable,
                          (not hw) or (co.controllable and co.observable), mx)


def is_passive(s, tol=None):
    """C_+ = 0 and Omega_+ = 0 (upper-right blocks of the coupling and Hamiltonian matrices)."""
    tol = as_tol(tol)
    Omega = recover_omega(s, tol)
    n = s.n
    Cp = s.C[: s.m, n:]
    Op = Omega[:n, n:]
    scale = max(maxabs(s.C), maxabs(Omega))
    return tol.accepts(max(maxabs(Cp), maxabs(Op)), scale)


@dataclass(frozen=True)
class LemmaReport:
    lemma5_ok: bool
    lemma6_ok: bool
    lemma7_ok: bool
    flags: dict = field(default_factory=dict)

    def __bool__(self):
        return self.lemma5_ok and self.lemma6_ok and self.lemma7_ok

    def as_dict(self):
        return {"lemma5_ok": self.lemma5_ok, "lemma6_ok": self.lemma6_ok,
                "lemma7_ok": self.lemma7_ok, "flags": dict(self.flags)}


def h_pair(p):
    """(A, C) of the observability pair of the h/co interaction."""
    d = p.dims
    J1 = make_sympJ(d.n1).real
    A = np.block([[J1 @ p.H_co, J1 @ p.H_12.T],
                  [np.zeros((d.n3, 2 * d.n1)), -p.H_h12]])
    C = np.hstack([p.Gamma_co, p.Gamma_h])
    return A, C


def dual_h_pair(p):
    """(A, B) of the controllability pair dual to ``h_pair``."""
    d = p.dims
    J1 = make_sympJ(d.n1).real
    A = np.block([[J1 @ p.H_co, np.zeros((2 * d.n1, d.n3))],
                  [p.H_12, p.H_h12.T]])
    B = np.vstack([J1 @ p.Gamma_co.conj().T, p.Gamma_h.conj().T])
    return A, B


def verify_equivalence_lemmas(p, tol=None, method="kalman"):
    """Check that the rank tests which must agree for a Kalman-form system do agree.

    Groups: (ctrb(A_h11, B_h), obsv(A_h22, C_h), obsv(H_h12, Gamma_h));
    (ctrb(A_co, B_co), obsv(A_co, C_co), obsv(J H_co, Gamma_co)); and the
    controllability/observability pair coupling h and co.
    """
    from .parameterization import build_from_hgamma

    k = build_from_hgamma(p)
    J1 = make_sympJ(p.dims.n1).real
    f = {
        "ctrb(A_h11,B_h)": is_controllable(k.A_h11, k.B_h, tol, method).ok,
        "obsv(A_h22,C_h)": is_observable(k.A_h22, k.C_h, tol, method).ok,
        "obsv(H_h12,Gamma_h)": is_observable(p.H_h12, p.Gamma_h, tol, method).ok,
        "ctrb(A_co,B_co)": is_controllable(k.A_co, k.B_co, tol, method).ok,
        "obsv(A_co,C_co)": is_observable(k.A_co, k.C_co, tol, method).ok,
        "obsv(JH_co,Gamma_co)": is_observable(J1 @ p.H_co, p.Gamma_co, tol, method).ok,
    }
    Ad, Bd = dual_h_pair(p)
    Ao, Co = h_pair(p)
    f["ctrb(coupled)"] = is_controllable(Ad, Bd, tol, method).ok
    f["obsv(coupled)"] = is_observable(Ao, Co, tol, method).ok
    g5 = [f["ctrb(A_h11,B_h)"], f["obsv(A_h22,C_h)"], f["obsv(H_h12,Gamma_h)"]]
    g6 = [f["ctrb(A_co,B_co)"], f["obsv(A_co,C_co)"], f["obsv(JH_co,Gamma_co)"]]
    return LemmaReport(len(set(g5)) == 1, len(set(g6)) == 1,
                       f["ctrb(coupled)"] == f["obsv(coupled)"], f)
