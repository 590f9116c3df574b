"""Noncommutative central moments, spectral geometry and randomised verification."""
from ._accel import NUMBA_ENABLED, backend
from .dilations import (DilationPair, Doubling, embed_density, halmos_dilation,
                        normal_doubling, unitary_mean)
from .ensembles import EnsembleSpec, draw, generate, stream
from .geometry import (ChebyshevResult, Circle, SpreadResult, chebyshev_radius,
                       jung_check, smallest_enclosing_circle, spread)
from .harness import (VerificationReport, lemma1_bruteforce, run_examples,
                      verify_suite, verify_theorem)
from .linalg import (DEFAULT_TOL, ConvergenceError, Density, MatrixError,
                     RankOneProjection, ToleranceConfig, abs_power, eig_general,
                     eig_hermitian, is_partial_isometry, operator_norm, polar,
                     schatten_norm, svd)
from .matrixio import MatrixParseError, read_matrix
from .moments import (BernoulliConstant, MomentValue, bernoulli_b, central_moment,
                      moment_report, tracial_central_moment)
from .pinching import (Partition, conditional_expectation, diagonal_moment,
                       pinching_contractivity_check)
from .states import (MuResult, ReductionError, Spectrahedron, mu_p,
                     rank_reduce, reduce_to_projection)

__version__ = "0.1.0"
