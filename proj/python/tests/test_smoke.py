import math

import pytest

import composite_risk as cr


def test_oracle_normal_default_scale():
    v = cr.oracle()
    assert v["theta0"] == pytest.approx(15.516306, abs=1e-5)
    assert v["u_star"] == pytest.approx(14.504761, abs=1e-5)
    assert v["stddev"] == pytest.approx(math.sqrt(3.0), rel=1e-6)


def test_oracle_point_mass():
    v = cr.oracle(dist="point", mean=2.5)
    assert v["theta0"] == pytest.approx(2.5, abs=1e-8)


def test_plugin_matches_direct_formula():
    data = [1.0, 2.0, 3.0, 4.0, 10.0]
    e = cr.estimate_risk(data)
    # u + 20 * sqrt(mean((x - u)_+^2)) at the reported minimizer
    direct = e["u_star"] + 20.0 * math.sqrt(sum(max(0.0, x - e["u_star"]) ** 2 for x in data) / len(data))
    assert e["theta"] == pytest.approx(direct, abs=1e-9)
    assert e["bandwidth"] is None


def test_smoothed_estimators_dominate_plugin():
    data = cr.sample("normal", 100, seed=7)
    plug = cr.estimate_risk(data)["theta"]
    for est in ["uniform", "epanechnikov", "gaussian", "wavelet:linear", "wavelet:quadratic"]:
        assert cr.estimate_risk(data, estimator=est)["theta"] >= plug - 1e-6


def test_densities_integrate_to_one():
    data = cr.sample("normal", 200, seed=3)
    lo, hi, n = min(data) - 8.0, max(data) + 8.0, 4001
    step = (hi - lo) / (n - 1)
    grid = [lo + i * step for i in range(n)]
    for values in (cr.kernel_density(data, grid, "epanechnikov"), cr.wavelet_density(data, grid, "quadratic")):
        assert min(values) >= 0.0
        assert sum(values) * step == pytest.approx(1.0, abs=1e-3)


def test_rules():
    assert cr.resolution_rule(500) == 1
    assert cr.bandwidth_rule([1.0, 2.0, 3.0, 4.0]) > 0.0


def test_bias_study_roundtrip():
    report = cr.bias_study(
        {
            "dist": {"family": "normal", "mean": 10.0, "scale": math.sqrt(3.0)},
            "sample_sizes": [50],
            "replications": 8,
            "estimators": ["plugin", "uniform"],
            "risk": "hor:q=2,alpha=0.05",
            "master_seed": 11,
        }
    )
    assert len(report["rows"]) == 2
    assert report["theta0"] == pytest.approx(15.516306, abs=1e-5)


def test_errors_carry_kind():
    with pytest.raises(cr.CriskError) as info:
        cr.estimate_risk([1.0, 2.0], estimator="triangle")
    assert info.value.args[0] == "BackendUnavailable"
