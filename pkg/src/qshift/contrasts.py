"""Quantile-level interaction and main-effect tests for the 2x2 design.

For each quantile q the four cell quantiles theta_jk are estimated and a
linear contrast is bootstrapped: the interaction contrast is
(theta_11 - theta_12) - (theta_21 - theta_22); main effects compare the
per-level means of the cell quantiles, so the reported difference stays
on the data scale.  One set of bootstrap cell resamples is shared by
every quantile tested.
"""

import warnings

import numpy as np

from .bootstrap import BootstrapConfig, _cell_resample_matrices, percentile_ci, signed_pvalue
from .design import CONTRASTS, INTERACTION, MAIN_A, MAIN_B, QuantileTestRow
from .multcomp import adjust_pvalues
from .quantiles import _from_sorted_rows, estimate_quantiles

__all__ = ["contrast_value", "decinter", "contrast_pvalues"]

# extreme quantiles need larger cells before their bootstrap is trustworthy
_EXTREME_MIN_N = 30


def contrast_value(thetas, kind: str):
    """Level summaries and contrast for four cell statistics.

    ``thetas`` holds (theta_11, theta_12, theta_21, theta_22), scalars or
    same-shape arrays.  Returns (lev1, lev2, psi) where psi equals
    lev1 - lev2:

    - interaction: lev1 = theta_11 - theta_12, lev2 = theta_21 - theta_22
    - main_a: lev1 = (theta_11 + theta_12)/2, lev2 = (theta_21 + theta_22)/2
    - main_b: lev1 = (theta_11 + theta_21)/2, lev2 = (theta_12 + theta_22)/2
    """
    t11, t12, t21, t22 = thetas
    if kind == INTERACTION:
        lev1 = t11 - t12
        lev2 = t21 - t22
        # grouping by design diagonal keeps the value bit-identical under
        # row/column interchange (addition commutes; subtraction order fixed)
        return lev1, lev2, (t11 + t22) - (t12 + t21)
    if kind == MAIN_A:
        lev1 = (t11 + t12) / 2.0
        lev2 = (t21 + t22) / 2.0
    elif kind == MAIN_B:
        lev1 = (t11 + t21) / 2.0
        lev2 = (t12 + t22) / 2.0
    else:
        raise ValueError(f"unknown contrast {kind!r}; expected one of {CONTRASTS}")
    return lev1, lev2, lev1 - lev2


def _warn_extreme_quantiles(data, quantiles) -> None:
    if data.min_n() < _EXTREME_MIN_N and any(q < 0.1 or q > 0.9 for q in quantiles):
        warnings.warn(
            f"quantiles outside [0.1, 0.9] requested with smallest cell "
            f"n={data.min_n()} < {_EXTREME_MIN_N}; estimates will be unstable",
            UserWarning,
            stacklevel=3,
        )


def _bootstrap_thetas(data, config: BootstrapConfig) -> list:
    """Per-cell (n_boot, n_quantiles) bootstrap quantile estimates."""
    mats = _cell_resample_matrices(data.flat_cells(), config)
    for m in mats:
        m.sort(axis=1)
    return [_from_sorted_rows(m, config.quantiles, config.estimator) for m in mats]


def _psi_star(data, kind: str, config: BootstrapConfig) -> np.ndarray:
    _, _, psi = contrast_value(_bootstrap_thetas(data, config), kind)
    return psi


def contrast_pvalues(data, kind: str, config: BootstrapConfig) -> np.ndarray:
    """Unadjusted signed-count p-values, one per configured quantile."""
    psi = _psi_star(data, kind, config)
    return np.array([signed_pvalue(psi[:, i]) for i in range(psi.shape[1])])


def decinter(data, kind: str = INTERACTION, config: BootstrapConfig | None = None,
             correction: str = "bh") -> list:
    """Quantile-by-quantile contrast test for a 2x2 factorial sample.

    Parameters
    ----------
    data : FactorialSample
    kind : 'interaction', 'main_a' or 'main_b'
    config : BootstrapConfig, optional
        Defaults test the deciles .1 ... .9 with the Harrell-Davis
        estimator and 2000 bootstrap replicates.
    correction : 'bh', 'hochberg' or 'none'
        Multiplicity correction used for the adjusted p-value column.

    Returns
    -------
    list of QuantileTestRow, one per quantile in order.
    """
    config = config if config is not None else BootstrapConfig()
    _warn_extreme_quantiles(data, config.quantiles)
    estimates = [estimate_quantiles(c, config.quantiles, config.estimator)
                 for c in data.flat_cells()]
    lev1, lev2, dif = contrast_value(estimates, kind)
    psi = _psi_star(data, kind, config)
    pvals = np.array([signed_pvalue(psi[:, i]) for i in range(psi.shape[1])])
    adjusted = adjust_pvalues(pvals, correction)
    rows = []
    for i, q in enumerate(config.quantiles):
        lo, hi = percentile_ci(psi[:, i], config.alpha)
        rows.append(QuantileTestRow(
            q=q,
            est_lev1=float(lev1[i]),
            est_lev2=float(lev2[i]),
            dif=float(dif[i]),
            ci_low=lo,
            ci_high=hi,
            p_value=float(pvals[i]),
            p_adjusted=float(adjusted[i]),
        ))
    return rows
