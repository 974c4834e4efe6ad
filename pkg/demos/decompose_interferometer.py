"""Splitting systems into decoupled pieces.

The interferometer's two mirrors are coupled to the same pair of fields, yet a
mode rotation (sum and difference modes) separates it into two independent
single-mode systems, each driven by its own field channel.
"""
import numpy as np

from qkalman.corpus import load_example
from qkalman.decomposition import assemble_concatenation, reassemble, search_transforms
from qkalman.generators import planted_decomposition
from qkalman.linalg import maxabs
from qkalman.model import assemble, disassemble
from qkalman.parameterization import build_from_hgamma, extract_hgamma

doc = load_example("michelson")
p = extract_hgamma(disassemble(doc.model, doc.block_dims))
print("H_co =\n", p.H_co)
print("Gamma_co =\n", np.round(p.Gamma_co, 3))

# %% Sum/difference transform
P, split = doc.transforms["P_co"]
cert = assemble_concatenation(p, P_co=P, n5=split)
print("shape:", cert.shape)
for sub in cert.subsystems:
    print(f"  {sub.kind}: modes={sub.n_modes} channels={sub.channels}")
    print("  A =", sub.system.Abar.tolist())

q0 = assemble(build_from_hgamma(p))
r = reassemble(cert)
print("round trip error:", max(maxabs(q0.Abar - r.Abar), maxabs(q0.Bbar - r.Bbar), maxabs(q0.Cbar - r.Cbar)))

# %% Let the search find it
for c in search_transforms(p)[:2]:
    print(c.shape, "\n", np.round(c.P_co, 3))

# %% Phase-shift regime of the opto-mechanical system: a free mode splits off
ps = load_example("optomech-phase-shift")
cert = assemble_concatenation(ps.model, P_cbo=np.eye(2), n4=1)
print("phase-shift shape:", cert.shape)

# %% A shuffled, block-diagonal instance
pp, co_perm, cbo_perm = planted_decomposition(4, n_co=3, n_cbo=0)
print("planted co permutation:", co_perm)
best = max(search_transforms(pp), key=lambda c: len(c.subsystems))
print("found:", best.shape, "channels", [s.channels for s in best.subsystems])
