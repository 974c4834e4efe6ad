import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qkalman.errors import RealizabilityError
from qkalman.generators import random_annihilation, random_dims, random_hgamma
from qkalman.linalg import make_sympJ
from qkalman.model import BlockDims, HGammaParams, QuadratureSystem, to_quadrature
from qkalman.parameterization import build_from_hgamma
from qkalman.structure import (check_hurwitz_theorem, check_quadruple_symmetry, co_report,
                               h_subsystem_poles, is_controllable, is_hurwitz, is_observable,
                               is_passive, spectrum, spectrum_report, verify_equivalence_lemmas)

seeds = st.integers(0, 2**32 - 1)


def test_quadruple_symmetry():
    assert check_quadruple_symmetry([1 + 2j, 1 - 2j, -1 + 2j, -1 - 2j]).ok
    assert check_quadruple_symmetry([3j, -3j]).ok
    assert not check_quadruple_symmetry([0.5, -1.5]).ok
    assert check_quadruple_symmetry([]).ok


def test_hurwitz():
    assert is_hurwitz([-1, -2 + 1j])
    assert not is_hurwitz([-1, 0])


def test_spectrum_report_is_sorted():
    r = spectrum_report(np.diag([1.0, -1.0]))
    assert r.eigenvalues == (-1 + 0j, 1 + 0j)
    assert r.quadruple_symmetric and not r.hurwitz


def test_controllability_basics():
    A = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert is_controllable(A, [[0.0], [1.0]])
    assert not is_controllable(A, [[1.0], [0.0]])
    assert is_observable(A, [[1.0, 0.0]])
    assert is_controllable(np.zeros((0, 0)), np.zeros((0, 1)))
    assert not is_controllable(np.eye(2), np.zeros((2, 0)))


@settings(max_examples=60)
@given(seeds, st.integers(1, 4))
def test_kalman_and_pbh_agree(seed, k):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(k, k))
    B = rng.normal(size=(k, 1))
    if seed % 3 == 0:
        # make the last state unreachable
        A[-1, :-1] = 0
        B[-1] = 0
    assert is_controllable(A, B).ok == is_controllable(A, B, method="pbh").ok


def test_example1_co_not_hurwitz():
    q = QuadratureSystem(1, 1, np.diag([1.0, -1.0]), [[1, 0], [2, 0]], [[0, 0], [2, -1]])
    co = co_report(q.Abar, q.Bbar, q.Cbar)
    assert co.controllable and co.observable
    v = check_hurwitz_theorem(q, BlockDims(n1=1, m=1))
    assert not v.hurwitz and v.theorem_respected


def test_hurwitz_theorem_requires_realizability():
    q = QuadratureSystem(1, 1, -np.eye(2), np.eye(2), np.eye(2))
    with pytest.raises(RealizabilityError):
        check_hurwitz_theorem(q, BlockDims(n1=1, m=1))


@settings(max_examples=60)
@given(seeds, st.integers(1, 4), st.integers(1, 3), st.booleans())
def test_passive_hurwitz_iff_co(seed, n, m, decouple):
    s = random_annihilation(n, m, seed, passive=True, decoupled_mode=decouple)
    assert is_passive(s)
    v = check_hurwitz_theorem(to_quadrature(s), BlockDims(n1=n, m=m))
    assert v.hurwitz == v.controllable == v.observable
    if decouple:
        assert not v.hurwitz


def test_active_system_is_not_passive():
    s = random_annihilation(2, 1, 0)
    assert not is_passive(s)


@settings(max_examples=40)
@given(seeds)
def test_hamiltonian_generated_spectra_are_symmetric(seed):
    rng = np.random.default_rng(seed)
    d = random_dims(rng)
    p = random_hgamma(d, rng)
    k = build_from_hgamma(p)
    if d.n2:
        assert check_quadruple_symmetry(spectrum(k.A_cbo)).ok
    if d.n1:
        assert check_quadruple_symmetry(spectrum(make_sympJ(d.n1).real @ p.H_co)).ok
    if d.n3:
        assert check_quadruple_symmetry(h_subsystem_poles(k.A_h11)).ok


@settings(max_examples=60)
@given(seeds, st.sampled_from([None, "pq", "qp", "both"]), st.booleans())
def test_equivalent_rank_tests_agree(seed, bae, unobs):
    rng = np.random.default_rng(seed)
    d = random_dims(rng)
    p = random_hgamma(d, rng, bae=bae if d.n1 else None, unobservable_co=unobs,
                      zero_coupling=(seed % 11 == 0))
    rep = verify_equivalence_lemmas(p)
    assert rep, rep.flags


def test_lemma_flags_without_h_coupling():
    d = BlockDims(n1=1, na=2, m=1)
    p = HGammaParams(d, H_h12=[[0, -1], [1, 0]], H_12=2 * np.sqrt(2) * np.array([[0, 0], [1, 0]]),
                     Gamma_co=np.sqrt(0.5) * np.array([[1, 1j], [1, -1j]]))
    rep = verify_equivalence_lemmas(p)
    assert rep
    assert not rep.flags["obsv(H_h12,Gamma_h)"]
    assert rep.flags["obsv(coupled)"]
