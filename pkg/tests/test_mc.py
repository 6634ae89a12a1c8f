import json

import numpy as np
import pytest

from karma.mc import McConfig, run_study, summarize, karma22_config, karma11_config
from karma.model import KarmaSpec, ParamVector


def test_summarize_excludes_failures():
    est = np.array([[1.0, 2.0], [3.0, 4.0], [100.0, 100.0]])
    out = summarize(est, np.array([True, True, False]), np.array([2.0, 2.0]))
    assert np.allclose(out["mean"], [2.0, 3.0])
    assert np.allclose(out["rb_percent"], [0.0, 50.0])
    assert np.allclose(out["mse"], [1.0, 2.0])
    assert out["used"] == 2


def test_config_validation():
    with pytest.raises(ValueError):
        karma11_config(replications=0)
    with pytest.raises(ValueError):
        McConfig(KarmaSpec(p=2, q=2), ParamVector(0.5, [], [0.5, -0.3], [0.4, 0.15], 15.0),
                 sample_sizes=(7,))
    assert karma22_config().spec.n_params == 6


@pytest.fixture(scope="module")
def small_study():
    return run_study(karma11_config(replications=12, sample_sizes=(60, 90)))


def test_study_is_reproducible_and_order_independent(small_study):
    again = run_study(karma11_config(replications=12, sample_sizes=(90, 60)))
    for n in (60, 90):
        a, b = small_study.replicates[n], again.replicates[n]
        assert np.array_equal(a.estimates, b.estimates, equal_nan=True)


def test_parallel_matches_serial(small_study):
    par = run_study(karma11_config(replications=12, sample_sizes=(60, 90)), n_jobs=2)
    for n in (60, 90):
        assert np.array_equal(par.replicates[n].estimates, small_study.replicates[n].estimates,
                              equal_nan=True)


def test_report_formats(small_study):
    rows = small_study.to_rows()
    assert len(rows) == 2 * 4
    assert small_study.to_csv().splitlines()[0].startswith("n,parameter,truth,mean")
    md = small_study.to_markdown()
    assert "RB (%)" in md and "**n = 60**" in md
    js = json.loads(small_study.to_json())
    assert js["names"] == ["alpha", "phi1", "theta1", "precision"]
    assert sum(small_study.failures.values()) == sum(
        int((~r.converged).sum()) for r in small_study.replicates.values())
