"""Zero-truncated Wilcoxon and Kruskal-Wallis tests for zero-inflated data.

Groups are passed as lists (or any sequence) of non-negative floats.
"""

from ._core import (
    ZeroRankError,
    are_k_sample,
    are_two_sample,
    bh_fdr,
    delta_beta,
    delta_fg_mc,
    delta_matrix_beta,
    estimate_var_u,
    permutation_test,
    ranksum_moments_exact,
    sample_two_part,
    test,
)

__all__ = [
    "ZeroRankError",
    "are_k_sample",
    "are_two_sample",
    "bh_fdr",
    "delta_beta",
    "delta_fg_mc",
    "delta_matrix_beta",
    "estimate_var_u",
    "permutation_test",
    "ranksum_moments_exact",
    "sample_two_part",
    "test",
]
