"""Realizability, spectra and stability.

For realizable systems Hurwitz stability forces controllability and
observability, but not the other way around. Passive systems close the gap.
"""
import numpy as np

from qkalman.corpus import load_example
from qkalman.generators import random_annihilation
from qkalman.model import BlockDims, QuadratureSystem, to_quadrature
from qkalman.realizability import check_pr_quadrature
from qkalman.structure import check_hurwitz_theorem, co_report, spectrum_report

# %% Controllable and observable, yet unstable
q = QuadratureSystem(1, 1, np.diag([1.0, -1.0]), [[1, 0], [2, 0]], [[0, 0], [2, -1]])
print(check_pr_quadrature(q, BlockDims(n1=1, m=1)).as_dict())
print(co_report(q.Abar, q.Bbar, q.Cbar).as_dict())
print(spectrum_report(q.Abar).as_dict())

# %% Poles need not pair up as +/- for a general co system
s = load_example("co-asymmetric-poles").model
print("poles:", np.linalg.eigvals(to_quadrature(s).Abar))

# %% Random realizable systems: count how the verdicts line up
rng = np.random.default_rng(0)
for passive in (False, True):
    tally = {}
    for _ in range(300):
        n, m = rng.integers(1, 4), rng.integers(1, 3)
        sys_ = random_annihilation(n, m, rng, passive=passive, decoupled_mode=rng.random() < 0.2)
        v = check_hurwitz_theorem(to_quadrature(sys_), BlockDims(n1=n, m=m))
        key = (v.hurwitz, v.controllable and v.observable)
        tally[key] = tally.get(key, 0) + 1
    print("passive" if passive else "active ", "(hurwitz, c&o) counts:", dict(sorted(tally.items())))
