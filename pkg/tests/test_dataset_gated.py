"""Reproduction checks that need the perceived-health dataset.

These activate automatically when the Well Elderly 2 perceived-health
extract is available, either at the path in the QSHIFT_PERCEIVED_HEALTH_CSV
environment variable or at data/perceived_health.csv.  The file must be a
long-format CSV with columns ``a`` (education: level ``a1`` = did not
complete high school, ``a2`` = some college or technical training),
``b`` (depressive symptoms: ``b1`` = CESD <= 15, ``b2`` = CESD > 15) and
``y`` (perceived health score).  Without the file every test here skips.
"""

import os
from pathlib import Path

import numpy as np
import pytest

from qshift import BootstrapConfig, IBAND_QUANTILES, INTERACTION, decinter, iband, median_diff_test
from qshift.data import read_long_csv

_ENV = "QSHIFT_PERCEIVED_HEALTH_CSV"
_DEFAULT = Path(__file__).resolve().parent.parent / "data" / "perceived_health.csv"


def _dataset_path():
    path = os.environ.get(_ENV) or (_DEFAULT if _DEFAULT.exists() else None)
    return str(path) if path else None

pytestmark = pytest.mark.skipif(
    _dataset_path() is None,
    reason=f"perceived-health dataset not supplied (set {_ENV} or add data/perceived_health.csv)",
)

# reference results for this dataset (Monte Carlo tolerance .02)
DECINTER_P = [0.389, 0.039, 0.010, 0.008, 0.009, 0.036, 0.348, 0.775, 0.362]
DECINTER_DIF = [-3.158, -6.757, -8.820, -10.029, -10.625, -10.189, -4.551, 2.163, 3.794]
IBAND_P = [0.607, 0.165, 0.058, 0.013, 0.039]
IBAND_DIF = [-1.151, -4.174, -6.260, -7.294, -4.931]


@pytest.fixture(scope="module")
def sample():
    data, _ = read_long_csv(_dataset_path(), "a", "b", "y")
    return data


def test_decinter_interaction_matches_reference_run(sample):
    rows = decinter(sample, INTERACTION, BootstrapConfig(n_boot=2000, seed=1), "hochberg")
    np.testing.assert_allclose([r.dif for r in rows], DECINTER_DIF, atol=1e-3)
    np.testing.assert_allclose([r.p_value for r in rows], DECINTER_P, atol=0.02)


def test_iband_interaction_matches_reference_run(sample):
    config = BootstrapConfig(n_boot=2000, seed=1, quantiles=IBAND_QUANTILES)
    rows = iband(sample, config, "hochberg")
    np.testing.assert_allclose([r.dif for r in rows], IBAND_DIF, atol=1e-3)
    np.testing.assert_allclose([r.p_value for r in rows], IBAND_P, atol=0.02)


def test_median_difference_higher_education_group(sample):
    result = median_diff_test(
        sample.cell(2, 1), sample.cell(2, 2), BootstrapConfig(n_boot=2000, seed=1)
    )
    assert result.estimate == pytest.approx(10.5, abs=0.1)
    assert result.ci_low == pytest.approx(4.2, abs=1.0)
    assert result.ci_high == pytest.approx(14.7, abs=1.0)
