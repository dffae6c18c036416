"""Exact tail behaviour of the Gaussian trace estimator.

The estimator (1/m) sum_j z_j^T A z_j of tr(A) is distributed as a weighted
sum of Gamma variables. This package evaluates those sums, builds the
worst-case spectra under effective-rank and stable-rank constraints,
compares the exact worst-case tails with a standard concentration bound,
and checks the majorization-based dominance results numerically.
"""
from .bounds import (BoundQuery, CompareRow, SampleSize, ck_abs_bound, ck_rel_bound, compare_report,
                     extremal_abs_tail, extremal_rel_tail, region_status, rows_to_csv, sample_size)
from .errors import (DegenerateDistributionError, NumericalError, PoleError, PreconditionError,
                     RegionRefusal)
from .extremal import (AbsFamily, RegionSet, RelFamily, TailRegion, abs_tail_region, abs_witness,
                       effective_rank, extremal_abs_law, extremal_rel_law, in_qabs, in_qrel,
                       matrix_tail_epsilons, rel_tail_region, rel_witness, stable_rank, worst_abs_spectrum,
                       worst_rel_spectrum)
from .gamma_core import (GammaParams, gamma_cdf, gamma_inflection_points, gamma_mean_var, gamma_mode,
                         gamma_pdf, gamma_pdf_derivative, gamma_sample, gamma_scale, gamma_sf)
from .gamma_mix import (GammaMix, GeneralGammaSum, divide, effective_shape, mix_cdf, mix_cf, mix_mean,
                        mix_pdf, mix_sample, mix_scale, mix_variance, trace_estimator_law)
from .majorization import (MajorizationChain, Spectrum, chain_classical, chain_frobenius, f_majorizes,
                           leading_slack_index, majorizes, step_form, weakly_majorizes)
from .trace_estimator import EstimatorRun, TailFrequency, dense_estimate, empirical_tail, estimate_trace
from .verify import (DominancePath, DominanceReport, conjecture_probe, dominance_check, dominance_suite,
                     inflection_sup, interpolate, mode_of, monotonicity_check, perturbed_density)

__version__ = "0.1.0"
