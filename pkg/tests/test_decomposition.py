import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qkalman.decomposition import (assemble_concatenation, mode_split_transform, reassemble,
                                   search_transforms, verify_co_invariant, verify_h_invariant,
                                   verify_noiseless)
from qkalman.errors import (BlockCouplingResidual, ConditionViolation, OddRowSet,
                            SearchCapExceeded)
from qkalman.generators import planted_decomposition, random_dims, random_hgamma
from qkalman.linalg import is_hamiltonian_matrix, maxabs
from qkalman.model import BlockDims, HGammaParams, assemble
from qkalman.parameterization import build_from_hgamma
from qkalman.realizability import check_pr_blockwise

S2 = 1 / np.sqrt(2)
P_PAPER = S2 * np.array([[1, 1, 0, 0], [0, 0, 1, 1], [1, -1, 0, 0], [0, 0, 1, -1]])


def michelson(mass=1.0, omega=1.0, lam=1.0):
    top = np.sqrt(lam / 2) * np.array([[1j, 1j, 0, 0], [1j, -1j, 0, 0]])
    return HGammaParams(BlockDims(n1=2, m=2),
                        H_co=np.diag([mass * omega**2, mass * omega**2, 1 / mass, 1 / mass]),
                        Gamma_co=np.vstack([top, top.conj()]))


def assert_round_trip(p, cert, tol=1e-9):
    q0 = assemble(build_from_hgamma(p))
    r = reassemble(cert)
    assert maxabs(q0.Abar - r.Abar) < tol
    assert maxabs(q0.Bbar - r.Bbar) < tol
    assert maxabs(q0.Cbar - r.Cbar) < tol


def test_mode_split_transform():
    P = mode_split_transform(np.eye(2), [0])
    # (q1, q2, p1, p2) -> (q2, p2 | q1, p1)
    assert np.array_equal(P @ np.arange(4), [1, 3, 0, 2])


# -- noiseless subsystem ----------------------------------------------------

def test_noiseless_split_of_two_free_modes():
    p = HGammaParams(BlockDims(n2=2), H_cbo=np.diag([1.0, 2.0, 1.0, 2.0]))
    sub = verify_noiseless(p, mode_split_transform(np.eye(2), [1]), 1)
    assert sub.kind == "cbo" and sub.n_modes == 1
    A = sub.kalman.A_cbo
    assert is_hamiltonian_matrix(A)
    assert np.array_equal(A, [[0, 2], [-2, 0]])


def test_noiseless_fails_on_h13_coupling():
    d = BlockDims(n2=2, na=1)
    p = HGammaParams(d, H_cbo=np.diag([1.0, 2.0, 1.0, 2.0]), H_13=[[1.0, 1.0, 1.0, 1.0]])
    with pytest.raises(BlockCouplingResidual) as e:
        verify_noiseless(p, mode_split_transform(np.eye(2), [1]), 1)
    assert "H_13" in e.value.condition


def test_noiseless_fails_on_mixing_hamiltonian():
    H = np.eye(4)
    H[0, 1] = H[1, 0] = 0.5
    p = HGammaParams(BlockDims(n2=2), H_cbo=H)
    with pytest.raises(BlockCouplingResidual):
        verify_noiseless(p, mode_split_transform(np.eye(2), [1]), 1)


def test_noiseless_vacuous():
    assert verify_noiseless(HGammaParams(BlockDims(n1=1, m=1)), None, 0) is None


def test_non_symplectic_transform_fails_A1():
    p = HGammaParams(BlockDims(n2=2), H_cbo=np.eye(4))
    with pytest.raises(ConditionViolation) as e:
        verify_noiseless(p, np.eye(4), 1)
    assert e.value.condition == "A1"


# -- invariant co subsystem ---------------------------------------------------

def test_michelson_co_split():
    p = michelson()
    a = verify_co_invariant(p, P_PAPER, 1)
    b = verify_co_invariant(p, np.vstack([P_PAPER[2:], P_PAPER[:2]]), 1)
    assert a.channels == (1,) and b.channels == (0,)
    for sub in (a, b):
        assert sub.n_modes == 1
        assert check_pr_blockwise(sub.kalman).passed


def test_identity_split_takes_whole_co_system():
    p = HGammaParams(BlockDims(n1=1, m=1), H_co=[[0, 1], [1, 0]], Gamma_co=[[1j, -1j], [-1j, 1j]])
    sub = verify_co_invariant(p, None, 1)
    assert sub.params.dims.n1 == 1 and sub.channels == (0,)
    assert np.allclose(sub.params.Gamma_co, p.Gamma_co)


def test_row_mixing_both_blocks_fails_B2():
    top = np.array([[1j, 1.0, 0, 0]])
    p = HGammaParams(BlockDims(n1=2, m=1), H_co=np.eye(4), Gamma_co=np.vstack([top, top.conj()]))
    with pytest.raises(ConditionViolation) as e:
        verify_co_invariant(p, mode_split_transform(np.eye(2), [1]), 1)
    assert e.value.condition == "B2"


def test_unpaired_rows():
    G = np.array([[0, 1j, 0, 0], [0, 0, 0, 0]])
    p = HGammaParams(BlockDims(n1=2, m=1), H_co=np.eye(4), Gamma_co=G)
    with pytest.raises(OddRowSet):
        verify_co_invariant(p, mode_split_transform(np.eye(2), [1]), 1)


# -- invariant h subsystem ----------------------------------------------------

def two_h_modes():
    d = BlockDims(na=2, m=2)
    Gh_top = np.array([[0.5 + 1j, 0], [0, 2.0 - 0.3j]])
    H_12 = np.zeros((2, 0))
    return HGammaParams(d, H_h12=np.diag([1.0, -2.0]), H_h22=np.diag([0.3, 0.7]),
                        H_12=H_12, Gamma_h=np.vstack([Gh_top, Gh_top.conj()]))


def test_h_split_of_two_modes():
    p = two_h_modes()
    sub = verify_h_invariant(p, mode_split_transform(np.eye(2), [1]), 1)
    assert sub.kind == "h" and sub.channels == (1,)
    assert sub.params.H_h12[0, 0] == -2.0 and sub.params.H_h22[0, 0] == 0.7
    assert check_pr_blockwise(sub.kalman).passed


def test_h12_coupling_both_h_blocks_fails():
    d = BlockDims(n1=1, na=2, m=0)
    p = HGammaParams(d, H_h12=np.eye(2), H_12=np.ones((2, 2)), H_co=np.eye(2))
    with pytest.raises(BlockCouplingResidual) as e:
        verify_h_invariant(p, mode_split_transform(np.eye(2), [1]), 1)
    assert "H_12" in e.value.condition


def test_h_vacuous():
    assert verify_h_invariant(HGammaParams(BlockDims(n1=1, m=1)), None, 0) is None


# -- concatenation -------------------------------------------------------------

def test_michelson_concatenation():
    p = michelson(0.5, 2.0, 2.0)
    cert = assemble_concatenation(p, P_co=P_PAPER, n5=1)
    assert cert.shape == ("co", "co") and cert.nontrivial
    assert cert.rows_co == (1, 3) and cert.rows_m == (0, 2)
    assert_round_trip(p, cert)


def test_phase_shift_concatenation():
    g = np.sqrt(0.5) * np.array([[1, 1j], [1, -1j]])
    p = HGammaParams(BlockDims(n1=1, n2=1, na=1, m=1), H_12=[[0.7, 0]],
                     H_co=np.diag([1.3, -1.3]), Gamma_co=g)
    cert = assemble_concatenation(p, n4=1)
    assert cert.shape == ("cbo", "m") and cert.n4 == 1
    assert_round_trip(p, cert)


def test_generic_system_is_a_single_remainder():
    rng = np.random.default_rng(3)
    p = random_hgamma(BlockDims(n1=2, n2=1, na=1, m=2), rng)
    cert = assemble_concatenation(p)
    assert cert.shape == ("m",) and not cert.nontrivial
    assert_round_trip(p, cert)


def test_h_and_co_split_together():
    # co mode on channel 0, two h modes on channels 1 and 2, no cross terms
    top = np.zeros((3, 2), dtype=complex)
    top[0] = [1.0, 1j]
    Gh = np.zeros((3, 2), dtype=complex)
    Gh[1, 0] = 0.4 + 1j
    Gh[2, 1] = 1.2
    p = HGammaParams(BlockDims(n1=1, na=2, m=3), H_h12=np.diag([1.0, 2.0]),
                     H_co=np.diag([1.0, 2.0]), Gamma_co=np.vstack([top, top.conj()]),
                     Gamma_h=np.vstack([Gh, Gh.conj()]))
    cert = assemble_concatenation(p, P_h=mode_split_transform(np.eye(2), [1]), n6=1)
    assert cert.shape == ("h", "m")
    assert [s.channels for s in cert.subsystems] == [(2,), (0, 1)]
    assert_round_trip(p, cert)
    found = search_transforms(p)
    assert any(c.shape.count("h") == 2 for c in found)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3), st.integers(0, 2))
def test_planted_decomposition_is_found(seed, n_co, n_cbo):
    p, _, _ = planted_decomposition(seed, n_co=n_co, n_cbo=n_cbo)
    certs = search_transforms(p)
    if n_co + n_cbo >= 2:
        assert certs
        full = max(certs, key=lambda c: len(c.subsystems))
        # one extracted piece per block plus the remainder
        assert len(full.subsystems) == min(n_co + n_cbo, (n_co > 0) + (n_cbo > 0) + 1)
        assert_round_trip(p, full)
        modes = sum(s.n_modes for s in full.subsystems)
        channels = sum(len(s.channels) for s in full.subsystems)
        assert (modes, channels) == (p.dims.n, p.dims.m)
        for s in full.subsystems:
            assert check_pr_blockwise(s.kalman).passed


def test_search_finds_paper_transform():
    certs = search_transforms(michelson())
    assert certs and all(c.shape == ("co", "co") for c in certs)
    # some certificate uses the printed transform up to row signs and block order
    def matches(P):
        used = set()
        for row in P:
            j = next((j for j in range(4) if j not in used
                      and min(maxabs(row - P_PAPER[j]), maxabs(row + P_PAPER[j])) < 1e-9), None)
            if j is None:
                return False
            used.add(j)
        return True

    assert any(matches(c.P_co) for c in certs)


def test_search_on_coupled_system_is_empty():
    rng = np.random.default_rng(7)
    p = random_hgamma(BlockDims(n1=2, na=1, m=1), rng)
    assert search_transforms(p) == []


def test_search_cap():
    p = HGammaParams(BlockDims(n1=5, m=0), H_co=np.eye(10))
    with pytest.raises(SearchCapExceeded):
        search_transforms(p)


def test_search_is_deterministic():
    p = michelson(2.0, 0.5, 1.0)
    a = [c.as_dict() for c in search_transforms(p)]
    b = [c.as_dict() for c in search_transforms(p)]
    assert a == b


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_round_trip_of_any_certificate(seed):
    rng = np.random.default_rng(seed)
    p = random_hgamma(random_dims(rng, max_n=3, max_m=2), rng)
    for cert in search_transforms(p)[:3] or [assemble_concatenation(p)]:
        assert_round_trip(p, cert)
