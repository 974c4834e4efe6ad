"""Refinement of the Kalman form into decoupled subsystems.

Given orthogonal, blockwise symplectic transforms of the cbo, co and h
coordinates, check that they split off

* a noiseless subsystem of the cbo block (no field coupling at all),
* an invariant co subsystem driven by its own field channels,
* an invariant h subsystem driven by its own field channels,

with the remainder G_m itself in Kalman form. Every subsystem is returned as
an HGammaParams/KalmanForm pair so it can be analysed like any other system.

Transforms map old coordinates to new ones (x' = P x). In new coordinates the
retained part comes first and the extracted part (n4, n5 or n6 modes) last;
for the h block the order is (q_h1, p_h1, q_h2, p_h2).
"""
from dataclasses import dataclass, field
from itertools import combinations, product

import numpy as np
from scipy.linalg import block_diag

from .errors import (BlockCouplingResidual, ConditionViolation, OddRowSet, SearchCapExceeded,
                     ShapeError)
from .linalg import as_tol, is_blockwise_symplectic, maxabs
from .model import BlockDims, HGammaParams, QuadratureSystem, assemble
from .parameterization import build_from_hgamma

__all__ = ["ROW_THRESHOLD", "Subsystem", "DecompositionCertificate", "verify_noiseless",
           "verify_co_invariant", "verify_h_invariant", "assemble_concatenation",
           "reassemble", "search_transforms", "mode_split_transform"]

ROW_THRESHOLD = 1e-10


@dataclass(frozen=True)
class Subsystem:
    """One decoupled piece: its kind ("cbo", "co", "h" or "m"), parameters,
    Kalman blocks, positions in the transformed state, and field channels (0-based)."""

    kind: str
    params: HGammaParams
    state_index: tuple
    channels: tuple

    @property
    def kalman(self):
        return build_from_hgamma(self.params)

    @property
    def system(self):
        return assemble(self.kalman)

    @property
    def n_modes(self):
        return self.params.dims.n

    def as_dict(self):
        d = self.params.dims
        return {"kind": self.kind, "modes": d.n, "n1": d.n1, "n2": d.n2, "n3": d.n3,
                "channels": list(self.channels)}


# -- helpers ---------------------------------------------------------------


def _check_transform(P, k, extract, label, tol):
    if P is None:
        P = np.eye(2 * k)
    P = np.asarray(P, dtype=float)
    if P.shape != (2 * k, 2 * k):
        raise ShapeError(f"{label} transform must be {2 * k}x{2 * k}, got {P.shape}")
    if not 0 <= extract <= k:
        raise ShapeError(f"{label}: cannot extract {extract} of {k} modes")
    chk = is_blockwise_symplectic(P, [k - extract, extract], tol=tol)
    if not chk:
        raise ConditionViolation(label, chk.residual, "transform is not orthogonal and blockwise symplectic")
    return P


def _zero(name, X, scale, tol, cls=BlockCouplingResidual):
    v = maxabs(X)
    if not tol.accepts(v, scale):
        raise cls(name, v)


def _row_support(X, thr):
    if X.shape[1] == 0:
        return np.zeros(X.shape[0], dtype=bool)
    return np.max(np.abs(X), axis=1) > thr


def _row_threshold(p):
    return ROW_THRESHOLD * maxabs(p.full_Gamma())


def _disjoint_rows(name, groups, thr):
    """Each row may be nonzero in at most one of ``groups``."""
    sup = np.array([_row_support(g, thr) for g in groups])
    if sup.size == 0:
        return sup
    bad = np.flatnonzero(sup.sum(axis=0) > 1)
    if bad.size:
        i = int(bad[0])
        v = min(maxabs(g[i]) for g, s in zip(groups, sup) if s[i])
        raise ConditionViolation(name, v, f"row {i} couples to more than one block")
    return sup


def _channels(rows, m):
    rows = np.flatnonzero(rows)
    top = set(int(r) for r in rows if r < m)
    bottom = set(int(r) - m for r in rows if r >= m)
    if top != bottom:
        raise OddRowSet(rows)
    return tuple(sorted(top))


def _row_index(channels, m):
    return list(channels) + [c + m for c in channels]


def _split_slices(k, e):
    """Slices of retained and extracted blocks in a transformed 2k vector."""
    r = k - e
    return slice(0, 2 * r), slice(2 * r, 2 * k)


# -- the three lemmas --------------------------------------------------------


@dataclass(frozen=True)
class _Split:
    P: np.ndarray
    extract: int
    pieces: dict
    subsystem: Subsystem = None


def _split_cbo(p, P, n4, tol):
    d = p.dims
    P = _check_transform(P, d.n2, n4, "A1", tol)
    s1, s2 = _split_slices(d.n2, n4)
    Hc = P @ p.H_cbo @ P.T
    scale = max(1.0, maxabs(p.H_cbo))
    _zero("H_cbo block-diagonal", Hc[s1, s2], scale, tol)
    H13 = p.H_13 @ P.T
    _zero("H_13 P^T = [H_131, 0]", H13[:, s2], max(1.0, maxabs(p.H_13)), tol)
    sub = None
    if n4:
        params = HGammaParams(BlockDims(n2=n4, m=0), H_cbo=Hc[s2, s2])
        sub = Subsystem("cbo", params, (), ())
    return _Split(P, n4, {"H_cbo1": Hc[s1, s1], "H_13": H13[:, s1]}, sub)


def verify_noiseless(p, P_cbo=None, n4=1, tol=None):
    """Noiseless subsystem of the cbo block: returns a Subsystem with generator
    sympJ(n4) H_cbo2, or None when n4 == 0. Raises the violated condition otherwise."""
    tol = as_tol(tol)
    if p.dims.n2 == 0:
        return None
    return _split_cbo(p, P_cbo, n4, tol).subsystem


def _split_co(p, P, n5, tol):
    d = p.dims
    P = _check_transform(P, d.n1, n5, "B1", tol)
    s1, s2 = _split_slices(d.n1, n5)
    Hc = P @ p.H_co @ P.T
    _zero("H_co block-diagonal", Hc[s1, s2], max(1.0, maxabs(p.H_co)), tol)
    H12 = p.H_12 @ P.T
    _zero("H_12 P^T = [H_121, 0]", H12[:, s2], max(1.0, maxabs(p.H_12)), tol)
    G = p.Gamma_co @ P.T
    G1, G2 = G[:, s1], G[:, s2]
    thr = _row_threshold(p)
    sup = _disjoint_rows("B2", [np.hstack([p.Gamma_h, G1]), G2], thr)
    sub = None
    channels = ()
    if n5:
        channels = _channels(sup[1], d.m)
        rows = _row_index(channels, d.m)
        params = HGammaParams(BlockDims(n1=n5, m=len(channels)), H_co=Hc[s2, s2], Gamma_co=G2[rows])
        sub = Subsystem("co", params, (), channels)
    return _Split(P, n5, {"H_co1": Hc[s1, s1], "H_12": H12[:, s1], "Gamma_co1": G1,
                          "Gamma_co2": G2}, sub)


def verify_co_invariant(p, P_co=None, n5=1, tol=None):
    """Invariant co subsystem on the last n5 transformed co modes and its own channels."""
    tol = as_tol(tol)
    if p.dims.n1 == 0:
        return None
    return _split_co(p, P_co, n5, tol).subsystem


def _h_hamiltonian(p):
    n3 = p.dims.n3
    return np.block([[np.zeros((n3, n3)), p.H_h12], [p.H_h12.T, p.H_h22]])


def _h_slices(n3, n6):
    r = n3 - n6
    return {"q1": slice(0, r), "p1": slice(r, 2 * r),
            "q2": slice(2 * r, 2 * r + n6), "p2": slice(2 * r + n6, 2 * n3)}


def _split_h(p, P, n6, tol):
    d = p.dims
    n3 = d.n3
    P = _check_transform(P, n3, n6, "C1", tol)
    s = _h_slices(n3, n6)
    Hh = P @ _h_hamiltonian(p) @ P.T
    scale = max(1.0, maxabs(Hh))
    for a, b in (("q1", "q1"), ("q2", "q2"), ("q1", "q2"), ("q1", "p2"), ("p1", "q2"), ("p1", "p2")):
        _zero(f"h Hamiltonian block ({a},{b})", Hh[s[a], s[b]], scale, tol)
    lift = np.vstack([np.zeros((n3, 2 * d.n1)), p.H_12])
    H12 = P @ lift
    lift13 = np.vstack([np.zeros((n3, 2 * d.n2)), p.H_13])
    H13 = P @ lift13
    for name, X, ref in (("P_h [0; H_12]", H12, p.H_12), ("P_h [0; H_13]", H13, p.H_13)):
        for part in ("q1", "q2", "p2"):
            _zero(f"{name} rows {part}", X[s[part]], max(1.0, maxabs(ref)), tol)
    Gfull = np.hstack([np.zeros((2 * d.m, n3)), p.Gamma_h]) @ P.T
    gs = max(1.0, maxabs(p.Gamma_h))
    _zero("Gamma_h q-columns", np.hstack([Gfull[:, s["q1"]], Gfull[:, s["q2"]]]), gs, tol)
    G1, G2 = Gfull[:, s["p1"]], Gfull[:, s["p2"]]
    thr = _row_threshold(p)
    sup = _disjoint_rows("C2", [np.hstack([G1, p.Gamma_co]), G2], thr)
    sub = None
    if n6:
        channels = _channels(sup[1], d.m)
        rows = _row_index(channels, d.m)
        params = HGammaParams(BlockDims.make(n3=n6, m=len(channels)),
                              H_h12=Hh[s["q2"], s["p2"]], H_h22=Hh[s["p2"], s["p2"]],
                              Gamma_h=G2[rows])
        sub = Subsystem("h", params, (), channels)
    pieces = {"H_h12": Hh[s["q1"], s["p1"]], "H_h22": Hh[s["p1"], s["p1"]],
              "P_lift12": H12, "P_lift13": H13, "Gamma_h1": G1, "Gamma_h2": G2}
    return _Split(P, n6, pieces, sub)


def verify_h_invariant(p, P_h=None, n6=1, tol=None):
    """Invariant h subsystem on the last n6 transformed h modes (q_h2, p_h2)."""
    tol = as_tol(tol)
    if p.dims.n3 == 0:
        return None
    return _split_h(p, P_h, n6, tol).subsystem


# -- the concatenation -------------------------------------------------------


@dataclass(frozen=True)
class DecompositionCertificate:
    """Verified split G = G_cbo [+] G_co [+] G_h [+] G_m with transforms and row sets.

    ``transform`` is diag(P_h, P_co, P_cbo) acting on the full Kalman state;
    ``shape`` lists the kinds of the non-empty subsystems in that order.
    Row sets index the 2m doubled coupling rows (0-based).
    """

    P_cbo: np.ndarray
    P_co: np.ndarray
    P_h: np.ndarray
    n4: int
    n5: int
    n6: int
    rows_co: tuple
    rows_h: tuple
    rows_m: tuple
    subsystems: tuple
    original: HGammaParams = field(repr=False, default=None)

    @property
    def shape(self):
        return tuple(s.kind for s in self.subsystems)

    @property
    def transform(self):
        return block_diag(self.P_h, self.P_co, self.P_cbo)

    @property
    def nontrivial(self):
        return len(self.subsystems) >= 2

    def as_dict(self):
        return {"shape": list(self.shape), "n4": self.n4, "n5": self.n5, "n6": self.n6,
                "rows_co": list(self.rows_co), "rows_h": list(self.rows_h),
                "rows_m": list(self.rows_m),
                "subsystems": [s.as_dict() for s in self.subsystems],
                "P_cbo": self.P_cbo.tolist(), "P_co": self.P_co.tolist(), "P_h": self.P_h.tolist()}


def _m_kind(d, has_coupling):
    kinds = [k for k, v in (("h", d.n3), ("co", d.n1), ("cbo", d.n2)) if v]
    if len(kinds) == 1 and not (kinds[0] == "cbo" and has_coupling):
        return kinds[0]
    return "m"


def assemble_concatenation(p, P_cbo=None, n4=0, P_co=None, n5=0, P_h=None, n6=0, tol=None):
    """Verify all split conditions jointly and return the certificate.

    Absent transforms default to the identity; n4/n5/n6 = 0 extracts nothing
    from that block. The remainder G_m collects every retained mode and every
    channel not claimed by G_co or G_h; if it holds modes of a single kind it
    is labelled by that kind.
    """
    tol = as_tol(tol)
    d = p.dims
    cbo = _split_cbo(p, P_cbo, n4, tol)
    co = _split_co(p, P_co, n5, tol)
    h = _split_h(p, P_h, n6, tol)
    s = _h_slices(d.n3, n6)
    c1, _ = _split_slices(d.n1, n5)
    b1, _ = _split_slices(d.n2, n4)

    Hm12 = h.pieces["P_lift12"] @ co.P.T
    mask = np.ones(Hm12.shape, dtype=bool)
    mask[s["p1"], c1] = False
    _zero("P_h [0; H_12] P_co^T pattern", Hm12[mask], max(1.0, maxabs(p.H_12)), tol)
    Hm13 = h.pieces["P_lift13"] @ cbo.P.T
    mask = np.ones(Hm13.shape, dtype=bool)
    mask[s["p1"], b1] = False
    _zero("P_h [0; H_13] P_cbo^T pattern", Hm13[mask], max(1.0, maxabs(p.H_13)), tol)

    thr = _row_threshold(p)
    G_h1, G_h2 = h.pieces["Gamma_h1"], h.pieces["Gamma_h2"]
    G_c1, G_c2 = co.pieces["Gamma_co1"], co.pieces["Gamma_co2"]
    sup = _disjoint_rows("rows", [np.hstack([G_h1, G_c1]), G_h2, G_c2], thr)
    ch_co = _channels(sup[2], d.m) if n5 else ()
    ch_h = _channels(sup[1], d.m) if n6 else ()
    if not n5 and np.any(sup[2]):
        raise ConditionViolation("rows", maxabs(G_c2), "co2 coupling present with nothing extracted")
    if not n6 and np.any(sup[1]):
        raise ConditionViolation("rows", maxabs(G_h2), "h2 coupling present with nothing extracted")
    _channels(sup[0], d.m)  # conjugate-closed check for the remainder
    used = set(ch_co) | set(ch_h)
    ch_m = tuple(c for c in range(d.m) if c not in used)
    rows_m = _row_index(ch_m, d.m)

    dm = BlockDims(n1=d.n1 - n5, n2=d.n2 - n4, na=d.n3 - n6, m=len(ch_m))
    pm = HGammaParams(
        dm,
        H_h12=h.pieces["H_h12"], H_h22=h.pieces["H_h22"],
        H_12=Hm12[s["p1"], c1], H_13=Hm13[s["p1"], b1],
        H_co=co.pieces["H_co1"], H_cbo=cbo.pieces["H_cbo1"],
        Gamma_h=G_h1[rows_m], Gamma_co=G_c1[rows_m],
    )

    # positions in the transformed state diag(P_h, P_co, P_cbo) x
    n3, n1, n2 = d.n3, d.n1, d.n2
    r3 = n3 - n6
    oc, ob = 2 * n3, 2 * n3 + 2 * n1
    idx_m = (list(range(0, 2 * r3)) + list(range(oc, oc + 2 * (n1 - n5)))
             + list(range(ob, ob + 2 * (n2 - n4))))
    idx_h = list(range(2 * r3, 2 * n3))
    idx_co = list(range(oc + 2 * (n1 - n5), oc + 2 * n1))
    idx_cbo = list(range(ob + 2 * (n2 - n4), ob + 2 * n2))

    subs = []
    if cbo.subsystem is not None:
        subs.append(Subsystem("cbo", cbo.subsystem.params, tuple(idx_cbo), ()))
    if co.subsystem is not None:
        subs.append(Subsystem("co", co.subsystem.params, tuple(idx_co), ch_co))
    if h.subsystem is not None:
        subs.append(Subsystem("h", h.subsystem.params, tuple(idx_h), ch_h))
    if dm.n > 0:
        has_coupling = maxabs(pm.full_Gamma()) > thr
        subs.append(Subsystem(_m_kind(dm, has_coupling), pm, tuple(idx_m), ch_m))
    return DecompositionCertificate(
        cbo.P, co.P, h.P, int(n4), int(n5), int(n6),
        tuple(_row_index(ch_co, d.m)), tuple(_row_index(ch_h, d.m)), tuple(rows_m),
        tuple(subs), p)


def reassemble(cert):
    """Put the subsystems back together and undo the transforms.

    The result should reproduce assemble(build_from_hgamma(original)).
    """
    d = cert.original.dims
    N, M = 2 * d.n, 2 * d.m
    A = np.zeros((N, N))
    B = np.zeros((N, M))
    C = np.zeros((M, N))
    for sub in cert.subsystems:
        q = sub.system
        idx = np.asarray(sub.state_index, dtype=int)
        io = np.asarray(_row_index(sub.channels, d.m), dtype=int)
        A[np.ix_(idx, idx)] = q.Abar
        if io.size:
            B[np.ix_(idx, io)] = q.Bbar
            C[np.ix_(io, idx)] = q.Cbar
    T = cert.transform
    return QuadratureSystem(d.n, d.m, T.T @ A @ T, T.T @ B, C @ T)


# -- heuristic search ------------------------------------------------------


def mode_split_transform(R, extract):
    """P = Pi diag(R, R): rotate modes by orthogonal R, then move the modes in
    ``extract`` to the end, grouping (q kept, p kept, q extracted, p extracted)."""
    R = np.asarray(R, dtype=float)
    k = R.shape[0]
    ext = sorted(extract)
    keep = [i for i in range(k) if i not in ext]
    order = keep + [k + i for i in keep] + ext + [k + i for i in ext]
    return block_diag(R, R)[order]


def _rotation(k, i, j, c, s):
    R = np.eye(k)
    R[i, i], R[i, j], R[j, i], R[j, j] = c, s, -s, c
    return R


def _pair_angles(vectors, i, j, tol):
    out = []
    for v in vectors:
        a, b = complex(v[i]), complex(v[j])
        rho = np.hypot(abs(a), abs(b))
        if rho <= tol:
            continue
        # a common phase must make both entries real
        ph = a if abs(a) > abs(b) else b
        ph = ph / abs(ph)
        ra, rb = a / ph, b / ph
        if abs(ra.imag) > 1e-9 * rho or abs(rb.imag) > 1e-9 * rho:
            continue
        out.append((ra.real / rho, rb.real / rho))
    return out


def _sym_angles(S, i, j):
    th = 0.5 * np.arctan2(2 * S[i, j], S[i, i] - S[j, j])
    return [(np.cos(th), np.sin(th))]


def _candidate_rotations(k, sym_blocks, vectors, tol=1e-12):
    if k == 0:
        return [np.eye(0)]
    cands = [np.eye(k)]
    for i, j in combinations(range(k), 2):
        pairs = []
        for S in sym_blocks:
            if abs(S[i, j]) > tol:
                pairs += _sym_angles(S, i, j)
        pairs += _pair_angles(vectors, i, j, tol)
        cands += [_rotation(k, i, j, c, s) for c, s in pairs]
    for S in sym_blocks:
        _, V = np.linalg.eigh(S)
        cands.append(V.T)
    seen, out = set(), []
    for R in cands:
        key = np.round(R, 9).tobytes()
        if key not in seen:
            seen.add(key)
            out.append(R)
    return out


def _part_candidates(k, sym_blocks, vectors, check):
    """Transforms for one block that pass its own lemma; always includes (I, 0)."""
    found = [(np.eye(2 * k), 0)]
    if k == 0:
        return found
    seen = {np.eye(2 * k).tobytes() + b"0"}
    for R in _candidate_rotations(k, sym_blocks, vectors):
        for e in range(1, k + 1):
            for ext in combinations(range(k), e):
                P = mode_split_transform(R, ext)
                key = np.round(P, 9).tobytes() + bytes([e])
                if key in seen:
                    continue
                seen.add(key)
                try:
                    check(P, e)
                except (ConditionViolation, ShapeError):
                    continue
                found.append((P, e))
    return found


def _vectors_qp(X, k):
    """Rows of X split into their q and p halves (each a length-k vector)."""
    out = []
    for row in np.atleast_2d(X):
        out.append(row[:k])
        out.append(row[k:])
    return out


def search_transforms(p, cap=4, tol=None, max_combinations=20000):
    """Best-effort search for decomposition certificates (heuristic).

    Candidates are mode-subset splits composed with real rotations built from
    2x2 sub-blocks of H, from coupling rows, and from eigenvector bases of the
    q-q and p-p blocks. Only certificates with at least two subsystems are
    returned, ordered deterministically. An empty result does not prove that
    no decomposition exists.
    """
    tol = as_tol(tol)
    d = p.dims
    for name, v in (("n1", d.n1), ("n2", d.n2), ("n3", d.n3)):
        if v > cap:
            raise SearchCapExceeded(f"{name}={v} exceeds search cap {cap}")
    n1, n2, n3 = d.n1, d.n2, d.n3

    cbo_c = _part_candidates(
        n2, [p.H_cbo[:n2, :n2], p.H_cbo[n2:, n2:]],
        _vectors_qp(p.H_13, n2),
        lambda P, e: _split_cbo(p, P, e, tol))
    co_c = _part_candidates(
        n1, [p.H_co[:n1, :n1], p.H_co[n1:, n1:]],
        _vectors_qp(p.Gamma_co, n1) + _vectors_qp(p.H_12, n1),
        lambda P, e: _split_co(p, P, e, tol))
    h_c = _part_candidates(
        n3, [p.H_h22, 0.5 * (p.H_h12 + p.H_h12.T)],
        list(p.Gamma_h) + list(p.H_12.T) + list(p.H_13.T),
        lambda P, e: _split_h(p, P, e, tol))

    certs = {}
    for count, ((Pb, e4), (Pc, e5), (Ph, e6)) in enumerate(product(cbo_c, co_c, h_c)):
        if count >= max_combinations:
            break
        if e4 == e5 == e6 == 0:
            continue
        try:
            cert = assemble_concatenation(p, Pb, e4, Pc, e5, Ph, e6, tol)
        except (ConditionViolation, ShapeError):
            continue
        if not cert.nontrivial:
            continue
        key = (cert.shape, np.round(cert.transform, 9).tobytes(), e4, e5, e6)
        certs.setdefault(key, cert)
    return [certs[k] for k in sorted(certs, key=lambda k: (k[0], k[2:], k[1]))]
