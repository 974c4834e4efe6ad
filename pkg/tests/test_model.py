import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qkalman.errors import ShapeError, StructureError, AsymmetryError, ZeroPatternViolation
from qkalman.generators import random_annihilation, random_dims, random_hgamma
from qkalman.model import (AnnihilationForm, BlockDims, HGammaParams, KalmanForm, QuadratureSystem,
                           assemble, disassemble, from_quadrature, to_quadrature)
from qkalman.parameterization import build_from_hgamma

seeds = st.integers(0, 2**32 - 1)


def test_block_dims():
    d = BlockDims.make(n1=1, n2=2, n3=3, m=1)
    assert (d.n3, d.n) == (3, 6)
    assert BlockDims(na=1, nb=2).n3 == 3
    with pytest.raises(ValueError):
        BlockDims(n1=-1)


def test_assemble_example3():
    r2 = np.sqrt(2)
    k = KalmanForm(BlockDims(n1=1, m=1), A_co=np.diag([1.0, -1]),
                   B_co=r2 * np.array([[1, 0], [1, 0]]), C_co=r2 * np.array([[0, 0], [1, -1]]))
    q = assemble(k)
    assert np.array_equal(q.Abar, np.diag([1.0, -1]))
    assert q.Bbar.shape == (2, 2)


def test_assemble_empty():
    q = assemble(KalmanForm(BlockDims()))
    assert q.Abar.shape == (0, 0) and q.Bbar.shape == (0, 0)


def test_assemble_h_only_pattern():
    k = KalmanForm(BlockDims.make(n3=1), A_h11=[[1.0]], A_h12=[[2.0]], A_h22=[[3.0]])
    assert np.array_equal(assemble(k).Abar, [[1, 2], [0, 3]])


@settings(max_examples=60)
@given(seeds)
def test_zero_pattern_and_round_trip(seed):
    rng = np.random.default_rng(seed)
    d = random_dims(rng)
    k = build_from_hgamma(random_hgamma(d, rng))
    q = assemble(k)
    sl = d.slices()  # q_h, p_h, co, cbo
    A = q.Abar
    for r, c in ((1, 0), (1, 2), (1, 3), (2, 0), (2, 3), (3, 0), (3, 2)):
        assert not np.any(A[sl[r], sl[c]])
    k2 = disassemble(q, d)
    for name, X in k.blocks().items():
        assert np.array_equal(X, getattr(k2, name))


def test_disassemble_rejects_non_kalman_coordinates():
    q = QuadratureSystem(1, 1, np.diag([1.0, -1.0]), [[1, 0], [2, 0]], [[0, 0], [2, -1]])
    with pytest.raises(ZeroPatternViolation) as e:
        disassemble(q, BlockDims.make(n3=1, m=1))
    assert e.value.position.startswith("B")
    disassemble(q, BlockDims(n1=1, m=1))


def test_shape_checks():
    with pytest.raises(ShapeError):
        QuadratureSystem(1, 1, np.eye(3), np.eye(2), np.eye(2))
    with pytest.raises(ShapeError):
        KalmanForm(BlockDims(n1=1), A_co=np.eye(3))


def test_hgamma_validation():
    d = BlockDims(n1=1, m=1)
    with pytest.raises(AsymmetryError):
        HGammaParams(d, H_co=[[0, 1], [2, 0]]).validate()
    with pytest.raises(StructureError):
        HGammaParams(d, Gamma_co=[[1, 0], [1j, 0]]).validate()
    HGammaParams(d, H_co=[[0, 1], [1, 0]], Gamma_co=[[1j, 0], [-1j, 0]]).validate()


def test_blocks_are_frozen():
    p = HGammaParams(BlockDims(n1=1, m=1))
    with pytest.raises(ValueError):
        p.H_co[0, 0] = 1.0


@settings(max_examples=30)
@given(seeds, st.integers(1, 3), st.integers(1, 3))
def test_quadrature_annihilation_round_trip(seed, n, m):
    s = random_annihilation(n, m, seed)
    s2 = from_quadrature(to_quadrature(s))
    assert np.allclose(s.A, s2.A) and np.allclose(s.B, s2.B) and np.allclose(s.C, s2.C)


def test_annihilation_doubled_up():
    s = AnnihilationForm.from_physical([[0]], [[1]], [[1]], [[0]])
    s.validate()
    with pytest.raises(StructureError):
        AnnihilationForm(1, 1, [[1, 0], [0, 2]], np.eye(2), np.eye(2)).validate()
