"""Structural analysis of quantum linear systems in Kalman canonical form."""

__version__ = "0.1.0"

from .linalg import Tolerance, DEFAULT_TOL
from .model import (AnnihilationForm, BlockDims, HGammaParams, KalmanForm, QuadratureSystem,
                    assemble, disassemble, to_quadrature, from_quadrature)
from .realizability import check_pr_annihilation, check_pr_quadrature, check_pr_blockwise
from .parameterization import build_from_hgamma, extract_hgamma, check_theorem_co
from .structure import (spectrum_report, is_controllable, is_observable, check_hurwitz_theorem,
                        verify_equivalence_lemmas)
from .bae import theorem_bae_check, corollary_bae_check, markov_zero_test, transfer_eval
from .decomposition import (assemble_concatenation, verify_co_invariant, verify_h_invariant,
                            verify_noiseless, search_transforms, reassemble)
from .io import load_model, save_model, read_document
from .corpus import list_examples, run_example
