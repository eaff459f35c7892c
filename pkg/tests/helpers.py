"""Shared numerical helpers for the test suite."""

import numpy as np


def ks_statistic_mixed(draws, cdf, left_eps=1e-9):
    """One-sample KS statistic valid for CDFs with jumps.

    sup_z |ECDF(z) - F(z)| for a right-continuous F is attained either at a
    sample point (compare i/n against F(z_i)) or just before one (compare
    (i-1)/n against the left limit F(z_i-)). scipy's kstest uses only the
    left-limit-free form and reports statistic 1.0 for point masses.
    """
    z, counts = np.unique(np.asarray(draws, dtype=float), return_counts=True)
    n = counts.sum()
    cum = np.cumsum(counts)
    ecdf_hi = cum / n
    ecdf_lo = (cum - counts) / n
    f_right = np.asarray(cdf(z), dtype=float)
    f_left = np.asarray(cdf(z - left_eps), dtype=float)
    return float(max(np.abs(ecdf_hi - f_right).max(), np.abs(ecdf_lo - f_left).max()))


def ks_critical(n, level=0.01):
    """Asymptotic two-sided KS critical value at the given level."""
    from scipy import stats

    return float(stats.kstwobign.ppf(1.0 - level) / np.sqrt(n))
