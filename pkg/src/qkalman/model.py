"""System representations: annihilation form, Kalman block form, (H, Gamma) parameters
and plain quadrature state space, plus assembly and disassembly of Kalman blocks.

State ordering in Kalman coordinates is (q_h, p_h, x_co, x_cbo); quadrature
inputs/outputs are ordered (q_1..q_m, p_1..p_m).
"""
from dataclasses import dataclass, fields

import numpy as np

from .errors import ShapeError, ZeroPatternViolation, AsymmetryError, StructureError
from .linalg import (as_tol, make_J, make_V, block_sympJ, doubled_up,
                     flat_adjoint, is_doubled_up, maxabs, realify)


def _readonly(a):
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


def _as_block(value, shape, name, real=True):
    if value is None:
        return _readonly(np.zeros(shape, dtype=float if real else complex))
    a = np.asarray(value)
    if a.size == 0 and 0 in shape:
        a = a.reshape(shape)
    if a.ndim == 1 and len(shape) == 2 and a.size == shape[0] * shape[1]:
        a = a.reshape(shape)
    if a.shape != tuple(shape):
        raise ShapeError(f"{name}: expected shape {tuple(shape)}, got {a.shape}")
    if real:
        a = realify(a, name)
        a = a.astype(float)
    else:
        a = a.astype(complex)
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name}: non-finite entries")
    return _readonly(a)


@dataclass(frozen=True)
class BlockDims:
    """Kalman block sizes; n3 = na + nb is the number of "h" modes."""

    n1: int = 0
    n2: int = 0
    na: int = 0
    nb: int = 0
    m: int = 0

    def __post_init__(self):
        for f in fields(self):
            v = getattr(self, f.name)
            if int(v) != v or v < 0:
                raise ValueError(f"{f.name} must be a nonnegative integer, got {v!r}")
            object.__setattr__(self, f.name, int(v))

    @classmethod
    def make(cls, n1=0, n2=0, n3=0, m=0):
        return cls(n1=n1, n2=n2, na=n3, nb=0, m=m)

    @property
    def n3(self):
        return self.na + self.nb

    @property
    def n(self):
        return self.n1 + self.n2 + self.n3

    def slices(self):
        """Row/column slices of (q_h, p_h, x_co, x_cbo) in a 2n state vector."""
        n3, n1, n2 = self.n3, self.n1, self.n2
        q = slice(0, n3)
        p = slice(n3, 2 * n3)
        co = slice(2 * n3, 2 * n3 + 2 * n1)
        cbo = slice(2 * n3 + 2 * n1, 2 * n3 + 2 * n1 + 2 * n2)
        return q, p, co, cbo

    def sympJ_bar(self):
        """diag(sympJ(n3), sympJ(n1), sympJ(n2))."""
        return block_sympJ([self.n3, self.n1, self.n2])

    def as_dict(self):
        return {"n1": self.n1, "n2": self.n2, "na": self.na, "nb": self.nb, "m": self.m}


@dataclass(frozen=True)
class AnnihilationForm:
    """(A, B, C) acting on the doubled-up vector (a, a#) with inputs (b, b#)."""

    n: int
    m: int
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    def __post_init__(self):
        n, m = int(self.n), int(self.m)
        object.__setattr__(self, "A", _as_block(self.A, (2 * n, 2 * n), "A", real=False))
        object.__setattr__(self, "B", _as_block(self.B, (2 * n, 2 * m), "B", real=False))
        object.__setattr__(self, "C", _as_block(self.C, (2 * m, 2 * n), "C", real=False))

    @classmethod
    def from_physical(cls, Omega_minus, Omega_plus, C_minus, C_plus):
        """Build (A, B, C) from a Hamiltonian matrix Delta(Omega-, Omega+) and coupling Delta(C-, C+)."""
        Om = np.atleast_2d(np.asarray(Omega_minus, dtype=complex))
        Op = np.atleast_2d(np.asarray(Omega_plus, dtype=complex))
        Cm = np.atleast_2d(np.asarray(C_minus, dtype=complex))
        Cp = np.atleast_2d(np.asarray(C_plus, dtype=complex))
        n = Om.shape[0]
        m = Cm.shape[0]
        if Om.shape != (n, n) or Op.shape != (n, n) or Cm.shape != (m, n) or Cp.shape != (m, n):
            raise ShapeError("inconsistent Omega/C block shapes")
        Omega = doubled_up(Om, Op)
        C = doubled_up(Cm, Cp)
        Cf = flat_adjoint(C)
        A = -1j * make_J(n) @ Omega - 0.5 * Cf @ C
        return cls(n, m, A, -Cf, C)

    def validate(self, tol=None):
        for name in ("A", "B", "C"):
            chk = is_doubled_up(getattr(self, name), tol)
            if not chk:
                raise StructureError(name, chk.residual, "not doubled-up")
        return self


@dataclass(frozen=True)
class QuadratureSystem:
    """Real state space (Abar, Bbar, Cbar) in quadrature coordinates."""

    n: int
    m: int
    Abar: np.ndarray
    Bbar: np.ndarray
    Cbar: np.ndarray

    def __post_init__(self):
        n, m = int(self.n), int(self.m)
        object.__setattr__(self, "Abar", _as_block(self.Abar, (2 * n, 2 * n), "Abar"))
        object.__setattr__(self, "Bbar", _as_block(self.Bbar, (2 * n, 2 * m), "Bbar"))
        object.__setattr__(self, "Cbar", _as_block(self.Cbar, (2 * m, 2 * n), "Cbar"))


KALMAN_BLOCKS = ("A_h11", "A_h12", "A_h22", "A_12", "A_13", "A_21", "A_31",
                 "A_co", "A_cbo", "B_h", "B_co", "C_h", "C_co")


def kalman_shapes(d):
    n1, n2, n3, m = d.n1, d.n2, d.n3, d.m
    return {
        "A_h11": (n3, n3), "A_h12": (n3, n3), "A_h22": (n3, n3),
        "A_12": (n3, 2 * n1), "A_13": (n3, 2 * n2),
        "A_21": (2 * n1, n3), "A_31": (2 * n2, n3),
        "A_co": (2 * n1, 2 * n1), "A_cbo": (2 * n2, 2 * n2),
        "B_h": (n3, 2 * m), "B_co": (2 * n1, 2 * m),
        "C_h": (2 * m, n3), "C_co": (2 * m, 2 * n1),
    }


@dataclass(frozen=True)
class KalmanForm:
    """The thirteen real blocks of a system in Kalman canonical coordinates.

    Omitted blocks default to zero.
    """

    dims: BlockDims
    A_h11: np.ndarray = None
    A_h12: np.ndarray = None
    A_h22: np.ndarray = None
    A_12: np.ndarray = None
    A_13: np.ndarray = None
    A_21: np.ndarray = None
    A_31: np.ndarray = None
    A_co: np.ndarray = None
    A_cbo: np.ndarray = None
    B_h: np.ndarray = None
    B_co: np.ndarray = None
    C_h: np.ndarray = None
    C_co: np.ndarray = None

    def __post_init__(self):
        for name, shape in kalman_shapes(self.dims).items():
            object.__setattr__(self, name, _as_block(getattr(self, name), shape, name))

    def blocks(self):
        return {name: getattr(self, name) for name in KALMAN_BLOCKS}


HGAMMA_BLOCKS = ("H_h12", "H_h22", "H_12", "H_13", "H_co", "H_cbo", "Gamma_h", "Gamma_co")


def hgamma_shapes(d):
    n1, n2, n3, m = d.n1, d.n2, d.n3, d.m
    return {
        "H_h12": (n3, n3), "H_h22": (n3, n3), "H_12": (n3, 2 * n1), "H_13": (n3, 2 * n2),
        "H_co": (2 * n1, 2 * n1), "H_cbo": (2 * n2, 2 * n2),
        "Gamma_h": (2 * m, n3), "Gamma_co": (2 * m, 2 * n1),
    }


@dataclass(frozen=True)
class HGammaParams:
    """Hamiltonian blocks and coupling blocks generating a Kalman-form system.

    ``Gamma_h`` and ``Gamma_co`` are the 2m-row doubled couplings (top m rows
    for the fields, bottom m rows their conjugates).
    """

    dims: BlockDims
    H_h12: np.ndarray = None
    H_h22: np.ndarray = None
    H_12: np.ndarray = None
    H_13: np.ndarray = None
    H_co: np.ndarray = None
    H_cbo: np.ndarray = None
    Gamma_h: np.ndarray = None
    Gamma_co: np.ndarray = None

    def __post_init__(self):
        for name, shape in hgamma_shapes(self.dims).items():
            real = not name.startswith("Gamma")
            object.__setattr__(self, name, _as_block(getattr(self, name), shape, name, real=real))

    def blocks(self):
        return {name: getattr(self, name) for name in HGAMMA_BLOCKS}

    def replace(self, **changes):
        kw = self.blocks()
        kw.update(changes)
        return HGammaParams(self.dims, **kw)

    def validate(self, tol=None):
        """Raise on asymmetric H blocks or Gamma rows that are not stacked conjugates."""
        tol = as_tol(tol)
        for name in ("H_h22", "H_co", "H_cbo"):
            X = getattr(self, name)
            r = maxabs(X - X.T)
            if not tol.accepts(r, maxabs(X)):
                raise AsymmetryError(name, r)
        m = self.dims.m
        for name in ("Gamma_h", "Gamma_co"):
            G = getattr(self, name)
            r = maxabs(G[m:] - G[:m].conj())
            if not tol.accepts(r, maxabs(G)):
                raise StructureError(name, r, "lower rows must be conjugates of upper rows")
        return self

    def full_H(self):
        """The 2n x 2n symmetric Hamiltonian matrix in (q_h, p_h, x_co, x_cbo) order."""
        d = self.dims
        q, p, co, cbo = d.slices()
        H = np.zeros((2 * d.n, 2 * d.n))
        H[q, p] = self.H_h12
        H[p, q] = self.H_h12.T
        H[p, p] = self.H_h22
        H[p, co] = self.H_12
        H[co, p] = self.H_12.T
        H[p, cbo] = self.H_13
        H[cbo, p] = self.H_13.T
        H[co, co] = self.H_co
        H[cbo, cbo] = self.H_cbo
        return H

    def full_Gamma(self):
        """The 2m x 2n coupling [0, Gamma_h, Gamma_co, 0]."""
        d = self.dims
        _, p, co, _ = d.slices()
        G = np.zeros((2 * d.m, 2 * d.n), dtype=complex)
        G[:, p] = self.Gamma_h
        G[:, co] = self.Gamma_co
        return G


def assemble(k):
    """Stack Kalman blocks into (Abar, Bbar, Cbar) with the canonical zero pattern."""
    d = k.dims
    q, p, co, cbo = d.slices()
    N = 2 * d.n
    A = np.zeros((N, N))
    B = np.zeros((N, 2 * d.m))
    C = np.zeros((2 * d.m, N))
    A[q, q] = k.A_h11
    A[q, p] = k.A_h12
    A[q, co] = k.A_12
    A[q, cbo] = k.A_13
    A[p, p] = k.A_h22
    A[co, p] = k.A_21
    A[co, co] = k.A_co
    A[cbo, p] = k.A_31
    A[cbo, cbo] = k.A_cbo
    B[q] = k.B_h
    B[co] = k.B_co
    C[:, p] = k.C_h
    C[:, co] = k.C_co
    return QuadratureSystem(d.n, d.m, A, B, C)


_ZERO_A = [
    ("p_h,q_h", "p", "q"), ("p_h,x_co", "p", "co"), ("p_h,x_cbo", "p", "cbo"),
    ("x_co,q_h", "co", "q"), ("x_co,x_cbo", "co", "cbo"),
    ("x_cbo,q_h", "cbo", "q"), ("x_cbo,x_co", "cbo", "co"),
]


def disassemble(q, dims, tol=None):
    """Split a quadrature system into Kalman blocks.

    Raises ZeroPatternViolation if an entry that must vanish in Kalman
    coordinates does not; the position names the offending block.
    """
    tol = as_tol(tol)
    if q.n != dims.n or q.m != dims.m:
        raise ShapeError(f"system has n={q.n}, m={q.m} but dims give n={dims.n}, m={dims.m}")
    sl = dict(zip(("q", "p", "co", "cbo"), dims.slices()))
    A, B, C = q.Abar, q.Bbar, q.Cbar
    scale = max(maxabs(A), maxabs(B), maxabs(C))
    checks = [(f"A[{label}]", A[sl[r], sl[c]]) for label, r, c in _ZERO_A]
    checks += [("B[p_h]", B[sl["p"]]), ("B[x_cbo]", B[sl["cbo"]]),
               ("C[q_h]", C[:, sl["q"]]), ("C[x_cbo]", C[:, sl["cbo"]])]
    for position, block in checks:
        v = maxabs(block)
        if not tol.accepts(v, scale):
            raise ZeroPatternViolation(position, v)
    s = sl
    return KalmanForm(
        dims,
        A_h11=A[s["q"], s["q"]], A_h12=A[s["q"], s["p"]], A_h22=A[s["p"], s["p"]],
        A_12=A[s["q"], s["co"]], A_13=A[s["q"], s["cbo"]],
        A_21=A[s["co"], s["p"]], A_31=A[s["cbo"], s["p"]],
        A_co=A[s["co"], s["co"]], A_cbo=A[s["cbo"], s["cbo"]],
        B_h=B[s["q"]], B_co=B[s["co"]], C_h=C[:, s["p"]], C_co=C[:, s["co"]],
    )


def to_quadrature(s, guard=1e-10):
    """Annihilation form to quadrature form via x = V_n a, u = V_m b."""
    Vn, Vm = make_V(s.n), make_V(s.m)
    A = Vn @ s.A @ Vn.conj().T
    B = Vn @ s.B @ Vm.conj().T
    C = Vm @ s.C @ Vn.conj().T
    return QuadratureSystem(s.n, s.m, realify(A, "Abar", guard), realify(B, "Bbar", guard),
                            realify(C, "Cbar", guard))


def from_quadrature(q):
    """Inverse of to_quadrature."""
    Vn, Vm = make_V(q.n), make_V(q.m)
    A = Vn.conj().T @ q.Abar @ Vn
    B = Vn.conj().T @ q.Bbar @ Vm
    C = Vm.conj().T @ q.Cbar @ Vn
    return AnnihilationForm(q.n, q.m, A, B, C)
