"""Physical-realizability checks in annihilation, quadrature and Kalman-block form."""
from dataclasses import dataclass, field

from .errors import RealizabilityError
from .linalg import as_tol, make_J, make_sympJ, flat_adjoint, maxabs

__all__ = ["PRReport", "check_pr_annihilation", "recover_omega", "check_pr_quadrature",
           "check_pr_blockwise", "BLOCKWISE_CONDITIONS"]


@dataclass(frozen=True)
class PRReport:
    passed: bool
    residual_constraint1: float
    residual_constraint2: float
    threshold: float
    blocks: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.passed)

    def as_dict(self):
        d = {"passed": bool(self.passed),
             "residual_constraint1": float(self.residual_constraint1),
             "residual_constraint2": float(self.residual_constraint2),
             "threshold": float(self.threshold)}
        if self.blocks:
            d["blocks"] = {k: float(v) for k, v in self.blocks.items()}
        return d


def _report(r1, r2, scale, tol, blocks=None):
    thr = tol.bound(max(1.0, scale))
    return PRReport(bool(r1 <= thr and r2 <= thr), float(r1), float(r2), thr, dict(blocks or {}))


def check_pr_annihilation(s, tol=None):
    """Residuals of A + A^flat + B B^flat = 0 and B = -C^flat."""
    tol = as_tol(tol)
    Bf = flat_adjoint(s.B)
    r1 = maxabs(s.A + flat_adjoint(s.A) + s.B @ Bf)
    r2 = maxabs(s.B + flat_adjoint(s.C))
    scale = max(maxabs(s.A), maxabs(s.B) ** 2, maxabs(s.C) ** 2)
    return _report(r1, r2, scale, tol)


def recover_omega(s, tol=None):
    """Hamiltonian matrix Omega = (i/2)(J A - A^dagger J) of a realizable system."""
    rep = check_pr_annihilation(s, tol)
    if not rep.passed:
        raise RealizabilityError("system is not physically realizable", rep)
    J = make_J(s.n)
    return 0.5j * (J @ s.A - s.A.conj().T @ J)


def check_pr_quadrature(q, dims, tol=None):
    """Residuals of A Jb + Jb A^T + B Jm B^T = 0 and B = Jb C^T Jm, with Jb = diag(J_n3, J_n1, J_n2)."""
    tol = as_tol(tol)
    if dims.n != q.n or dims.m != q.m:
        raise ValueError(f"dims (n={dims.n}, m={dims.m}) do not match system (n={q.n}, m={q.m})")
    Jb = dims.sympJ_bar()
    Jm = make_sympJ(q.m).real
    A, B, C = q.Abar, q.Bbar, q.Cbar
    r1 = maxabs(A @ Jb + Jb @ A.T + B @ Jm @ B.T)
    r2 = maxabs(B - Jb @ C.T @ Jm)
    scale = max(maxabs(A), maxabs(B) ** 2, maxabs(C) ** 2)
    return _report(r1, r2, scale, tol)


BLOCKWISE_CONDITIONS = ("A_h22T+A_h11", "A_h12", "A_12", "A_13", "A_co", "A_cbo", "B_h", "B_co")


def blockwise_residuals(k):
    d = k.dims
    J1 = make_sympJ(d.n1).real
    J2 = make_sympJ(d.n2).real
    Jm = make_sympJ(d.m).real
    r = {
        "A_h22T+A_h11": maxabs(k.A_h22.T + k.A_h11),
        "A_h12": maxabs(-k.A_h12 + k.A_h12.T + k.B_h @ Jm @ k.B_h.T),
        "A_12": maxabs(-k.A_12 + k.A_21.T @ J1 + k.B_h @ Jm @ k.B_co.T @ J1),
        "A_13": maxabs(k.A_31.T @ J2 - k.A_13),
        "A_co": maxabs(J1 @ k.A_co + k.A_co.T @ J1 - J1 @ k.B_co @ Jm @ k.B_co.T @ J1),
        "A_cbo": maxabs(J2 @ k.A_cbo + k.A_cbo.T @ J2),
        "B_h": maxabs(k.B_h - k.C_h.T @ Jm),
        "B_co": maxabs(k.B_co - J1 @ k.C_co.T @ Jm),
    }
    return r


def check_pr_blockwise(k, tol=None):
    """One residual per block condition of a Kalman-form system (see BLOCKWISE_CONDITIONS)."""
    tol = as_tol(tol)
    r = blockwise_residuals(k)
    b = k.blocks()
    a_scale = max(maxabs(b[x]) for x in b if x.startswith("A"))
    io_scale = max(maxabs(b[x]) for x in ("B_h", "B_co", "C_h", "C_co")) ** 2
    r1 = max(r[x] for x in BLOCKWISE_CONDITIONS[:6])
    r2 = max(r["B_h"], r["B_co"])
    return _report(r1, r2, max(a_scale, io_scale), tol, r)
