import numpy as np

from qkalman.generators import (planted_decomposition, random_annihilation, random_dims,
                                random_hgamma)
from qkalman.realizability import check_pr_annihilation


def test_seeded_generators_are_reproducible():
    a = random_annihilation(3, 2, 5)
    b = random_annihilation(3, 2, 5)
    assert np.array_equal(a.A, b.A)
    d = random_dims(1)
    assert random_dims(1) == d
    assert np.array_equal(random_hgamma(d, 2).H_co, random_hgamma(d, 2).H_co)


def test_random_dims_bounds():
    for s in range(200):
        d = random_dims(s, max_n=4, max_m=3)
        assert 1 <= d.n <= 4 and 1 <= d.m <= 3


def test_annihilation_options():
    s = random_annihilation(3, 2, 0, passive=True, decoupled_mode=True)
    assert check_pr_annihilation(s)
    n = 3
    assert not np.any(s.C[:, [0, n]])


def test_planted_structure():
    p, pc, pb = planted_decomposition(0, n_co=3, n_cbo=2)
    assert sorted(pc) == [0, 1, 2] and sorted(pb) == [0, 1]
    # each channel touches a single co mode
    G = np.abs(p.Gamma_co[:3, :3]) + np.abs(p.Gamma_co[:3, 3:])
    assert np.all((G > 0).sum(axis=1) == 1)
