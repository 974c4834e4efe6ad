"""Back-action-evading (BAE) measurement tests on the co subsystem.

A BAE measurement of q_out with respect to p_in ("pq") means the transfer
function p_in -> q_out vanishes identically; "qp" is the mirror statement.
Identically-zero transfer functions are decided through Markov parameters
C A^k B, k < state dimension, which is exact by Cayley-Hamilton.
"""
from dataclasses import dataclass

import numpy as np

from .errors import NearSingularResolvent, VerdictDisagreement
from .linalg import as_tol, make_sympJ, maxabs, numerical_rank
from .parameterization import build_from_hgamma, split_gamma_co

__all__ = ["COND_LIMIT", "split_co_io", "transfer_eval", "MarkovResult", "markov_zero_test",
           "jh_form", "BAEReport", "theorem_bae_check", "corollary_bae_check",
           "rational_sample_oracle", "realized_pair"]

COND_LIMIT = 1e12


def split_co_io(k):
    """(B_co_q, B_co_p, C_co_q, C_co_p): input columns and output rows split into q and p halves."""
    m = k.dims.m
    return k.B_co[:, :m], k.B_co[:, m:], k.C_co[:m], k.C_co[m:]


def transfer_eval(A, B, C, s):
    """C (sI - A)^-1 B; raises NearSingularResolvent if cond(sI - A) > 1e12."""
    A = np.asarray(A)
    B = np.asarray(B)
    C = np.asarray(C)
    d = A.shape[0]
    if d == 0:
        return np.zeros((C.shape[0], B.shape[1]), dtype=complex)
    M = s * np.eye(d) - A
    cond = np.linalg.cond(M)
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise NearSingularResolvent(s, cond)
    return C @ np.linalg.solve(M, B.astype(complex))


@dataclass(frozen=True)
class MarkovResult:
    ok: bool
    residual: float
    residuals: tuple
    threshold: float

    def __bool__(self):
        return bool(self.ok)


def markov_zero_test(A, B, C, horizon=None, tol=None):
    """Is C A^k B = 0 for k = 0 .. horizon-1?  ``horizon`` defaults to dim(A).

    A is divided by max(1, ||A||_2) before taking powers; this rescales the
    k-th Markov parameter by a positive factor and so does not change which
    parameters vanish. Residuals are max-abs entries of the rescaled products.
    """
    tol = as_tol(tol)
    A = np.asarray(A, dtype=float) if not np.iscomplexobj(A) else np.asarray(A)
    B = np.asarray(B)
    C = np.asarray(C)
    d = A.shape[0]
    horizon = d if horizon is None else int(horizon)
    scale = (np.linalg.norm(C, 2) if C.size else 0.0) * (np.linalg.norm(B, 2) if B.size else 0.0)
    thr = tol.bound(scale)
    if d == 0 or B.size == 0 or C.size == 0:
        return MarkovResult(True, 0.0, tuple(0.0 for _ in range(horizon)), thr)
    As = A / max(1.0, np.linalg.norm(A, 2))
    X = B
    res = []
    for _ in range(horizon):
        res.append(maxabs(C @ X))
        X = As @ X
    r = max(res) if res else 0.0
    return MarkovResult(r <= thr, r, tuple(res), thr)


def jh_form(p, direction):
    """(J H_co, B, C) whose transfer function vanishes iff the ``direction`` BAE holds.

    pq: C = [Re G_q, Re G_p], B = [Re G_p^T; -Re G_q^T]; qp uses imaginary parts.
    """
    Gq, Gp = split_gamma_co(p.Gamma_co)
    part = {"pq": np.real, "qp": np.imag}[direction]
    Rq, Rp = part(Gq), part(Gp)
    J1 = make_sympJ(p.dims.n1).real
    return J1 @ p.H_co, np.vstack([Rp.T, -Rq.T]), np.hstack([Rq, Rp])


def realized_pair(k, direction):
    """(A_co, B, C) of the realized transfer function for ``direction``."""
    Bq, Bp, Cq, Cp = split_co_io(k)
    if direction == "pq":
        return k.A_co, Bp, Cq
    if direction == "qp":
        return k.A_co, Bq, Cp
    raise ValueError(f"direction must be 'pq' or 'qp', got {direction!r}")


@dataclass(frozen=True)
class BAEReport:
    pin_to_qout_zero: bool
    qin_to_pout_zero: bool
    max_markov_residual_pq: float
    max_markov_residual_qp: float
    method: str
    ignored_blocks: tuple = ()

    def as_dict(self):
        return {"pin_to_qout_zero": self.pin_to_qout_zero,
                "qin_to_pout_zero": self.qin_to_pout_zero,
                "max_markov_residual_pq": self.max_markov_residual_pq,
                "max_markov_residual_qp": self.max_markov_residual_qp,
                "method": self.method,
                "ignored_blocks": list(self.ignored_blocks)}


def _ignored(d):
    out = []
    if d.n3:
        out.append("h")
    if d.n2:
        out.append("cbo")
    return tuple(out)


def theorem_bae_check(p, which="both", tol=None, cross_check=True, method="markov_on_JH"):
    """BAE verdicts from the (H, Gamma) test on J H_co, cross-checked on the realized co block.

    ``which`` is "pq", "qp" or "both"; directions not requested are reported
    as None. ``method`` selects the primary test: "markov_on_JH" (default) or
    "markov_on_A" (realized matrices). With ``cross_check`` the other test is
    also run and disagreement raises VerdictDisagreement.
    Only the co block matters; h and cbo blocks are listed in ``ignored_blocks``.
    """
    tol = as_tol(tol)
    if which not in ("pq", "qp", "both"):
        raise ValueError(f"which must be 'pq', 'qp' or 'both', got {which!r}")
    if method not in ("markov_on_JH", "markov_on_A"):
        raise ValueError(f"unknown method {method!r}")
    dirs = ("pq", "qp") if which == "both" else (which,)
    k = build_from_hgamma(p)
    horizon = 2 * p.dims.n1
    out = {"pq": (None, None), "qp": (None, None)}
    for dr in dirs:
        jh = markov_zero_test(*jh_form(p, dr), horizon=horizon, tol=tol)
        ra = markov_zero_test(*realized_pair(k, dr), horizon=horizon, tol=tol)
        if cross_check and jh.ok != ra.ok:
            raise VerdictDisagreement(
                f"{dr}: J H_co test says {jh.ok} (residual {jh.residual:.3e}) but realized "
                f"co block says {ra.ok} (residual {ra.residual:.3e})")
        primary = jh if method == "markov_on_JH" else ra
        out[dr] = (bool(primary.ok), float(primary.residual))
    return BAEReport(out["pq"][0], out["qp"][0], out["pq"][1], out["qp"][1], method, _ignored(p.dims))


def corollary_bae_check(Gamma_q, Gamma_p, n, tol=None):
    """Closed-form BAE test when the co Hamiltonian is [[0, I_n], [I_n, 0]].

    re_orth: Re(G_q) Re(G_p)^T = 0; im_orth: the same for imaginary parts;
    rank_ok: rank([G; G J_n]) = 2n with G = [Gamma; Gamma#] the doubled coupling.
    Returns a dict with pq_bae_and_co / qp_bae_and_co and the three ingredients.
    """
    tol = as_tol(tol)
    Gq = np.atleast_2d(np.asarray(Gamma_q, dtype=complex))
    Gp = np.atleast_2d(np.asarray(Gamma_p, dtype=complex))
    if Gq.shape != Gp.shape or Gq.shape[1] != n:
        raise ValueError(f"Gamma_q and Gamma_p must both be m x {n}")
    re = Gq.real @ Gp.real.T
    im = Gq.imag @ Gp.imag.T
    scale_re = maxabs(Gq.real) * maxabs(Gp.real) * max(n, 1)
    scale_im = maxabs(Gq.imag) * maxabs(Gp.imag) * max(n, 1)
    re_res = max(maxabs(re - re.T), maxabs(re + re.T)) / 2
    im_res = max(maxabs(im - im.T), maxabs(im + im.T)) / 2
    re_orth = tol.accepts(re_res, scale_re)
    im_orth = tol.accepts(im_res, scale_im)
    G = np.hstack([Gq, Gp])
    Gb = np.vstack([G, G.conj()])
    Jn = np.diag(np.concatenate([np.ones(n), -np.ones(n)]))
    rank, _ = numerical_rank(np.vstack([Gb, Gb @ Jn]))
    rank_ok = rank == 2 * n
    return {"pq_bae_and_co": bool(re_orth and rank_ok), "qp_bae_and_co": bool(im_orth and rank_ok),
            "rank_ok": bool(rank_ok), "re_orth": bool(re_orth), "im_orth": bool(im_orth),
            "rank": int(rank), "re_residual": float(re_res), "im_residual": float(im_res)}


def rational_sample_oracle(A, B, C, n_samples=8, seed=0, tol=None):
    """Test oracle: declare the transfer function zero iff it is tiny at random points.

    Points lie on the circle |s| = 2 (1 + spectral radius of A), away from every
    eigenvalue. Not a proof of identical vanishing; used to cross-check
    markov_zero_test.
    """
    tol = as_tol(tol)
    A = np.asarray(A)
    B = np.asarray(B)
    C = np.asarray(C)
    if A.shape[0] == 0 or B.size == 0 or C.size == 0:
        return True
    rho = float(np.max(np.abs(np.linalg.eigvals(A))))
    radius = 2.0 * (1.0 + rho)
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 2.0 * np.pi, size=n_samples)
    scale = np.linalg.norm(C, 2) * np.linalg.norm(B, 2) / (radius - rho)
    bound = tol.bound(scale)
    for t in theta:
        G = transfer_eval(A, B, C, radius * np.exp(1j * t))
        if maxabs(G) > bound:
            return False
    return True
