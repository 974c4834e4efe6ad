"""Back-action-evading measurements: which output quadrature is free of back-action?

Walks through a single cavity mode with H = [[0, 1], [1, 0]] and the
two-mirror interferometer, comparing the structural test with direct
evaluation of the transfer functions.
"""
import numpy as np

from qkalman.bae import corollary_bae_check, realized_pair, theorem_bae_check, transfer_eval
from qkalman.corpus import load_example
from qkalman.model import BlockDims, HGammaParams
from qkalman.parameterization import build_from_hgamma, split_gamma_co

# %% A single co mode with an imaginary coupling
p = HGammaParams(BlockDims(n1=1, m=1), H_co=[[0, 1], [1, 0]], Gamma_co=[[1j, -1j], [-1j, 1j]])
k = build_from_hgamma(p)
print("A_co =\n", k.A_co)
print("B_co =\n", k.B_co)
print("C_co =\n", k.C_co)

rep = theorem_bae_check(p)
print("p_in -> q_out vanishes:", rep.pin_to_qout_zero)
print("q_in -> p_out vanishes:", rep.qin_to_pout_zero)

# the nonzero direction is 2/(s-1) - 2/(s+1)
A, B, C = realized_pair(k, "qp")
for s in (2.0, 3.0, 1j):
    print(f"Xi_qp({s}) = {transfer_eval(A, B, C, s)[0, 0]:.6f}  closed form {2 / (s - 1) - 2 / (s + 1):.6f}")

# closed-form test for this Hamiltonian
Gq, Gp = split_gamma_co(p.Gamma_co)
print(corollary_bae_check(Gq, Gp, 1))

# %% Interferometer with two mirrors
for mass, omega, lam in [(1, 1, 1), (0.5, 2, 2)]:
    doc = load_example("michelson", {"mass": mass, "omega_m": omega, "lam": lam})
    q = doc.model
    m = q.m
    Xi = transfer_eval(q.Abar, q.Bbar[:, :m], q.Cbar[m:], 1.0)
    print(f"mass={mass} omega={omega} lam={lam}: Xi_qp(1) diag = {np.diag(Xi)}, "
          f"2 lam/(mass(1+omega^2)) = {2 * lam / (mass * (1 + omega**2))}")

# %% Opto-mechanical BAE scheme: both directions vanish
p2 = load_example("optomech-bae").model
print(theorem_bae_check(p2).as_dict())
