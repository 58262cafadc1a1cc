"""Block-diagonal Lyapunov and H-infinity certificates via positive comparison systems."""

__version__ = "0.1.0"

from .exceptions import (BlockCertError, CertificateError, ComparisonUnstableError,
                         DeltaTooSmallError, NotHurwitzError, PartitionError, RiccatiError)
from .linalg import (eigenvalues, hinf_norm, is_hurwitz, log_norm_mu2, max_singular_value,
                     simulate_lti, solve_lyapunov, solve_riccati, spectral_abscissa, static_gain)
from .partition import (Partition, PartitionedSystem, block_row_without_diagonal, extract_block,
                        validate)
from .positive import (PositiveSystem, ScalingVectors, diagonal_riccati_certificate, is_metzler,
                       lyapunov_diag_from_vectors, metzler_stability_certificate,
                       positive_hinf_norm, solve_scaling_lp)
from .comparison import (ComparisonVariant, comparison_matrix, comparison_system_hard,
                         comparison_system_simple)
from .certify import (BlockDiagonalCertificate, MultiplierMatrices, MultiplierScalars,
                      assemble_blockdiag, block_riccati_solutions, certify_hinf, certify_lyapunov,
                      lift_multipliers, multipliers_from_scalings, verify_lyapunov_lmi,
                      verify_multiplier_lmis, verify_riccati_lmi)
from .stability_tests import TestReport, generalized_test, run_all_tests, test_one
from .flow import BoundedTrajectoryReport, comparison_trajectory_bound, separable_lyapunov_values
from .network import (NetworkModel, assemble, local_dissipativity_check, network_comparison_decoupled,
                      network_comparison_system, network_hinf_certificate, network_mixed_gain)
