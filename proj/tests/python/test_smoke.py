import numpy as np
import pytest

import gtransnet


def test_problem_names():
    names = gtransnet.problem_names()
    assert "s1-poisson2d" in names
    assert "allen-cahn" in names


def test_sampling_inside_domain():
    pts = gtransnet.sample_interior("unit-square", 200, seed=3)
    assert pts.shape == (200, 2)
    assert all(gtransnet.contains("unit-square", pts))


def test_network_shapes_and_determinism():
    kw = dict(dim=2, widths=[40, 30], gamma=2.0, center=np.array([0.5, 0.5]), radius=0.8, seed=7)
    a = gtransnet.build_network(**kw)
    b = gtransnet.build_network(**kw)
    x = np.random.default_rng(0).uniform(size=(25, 2))
    ea, eb = a.evaluate(x), b.evaluate(x)
    assert ea["values"].shape == (25, 30)
    assert len(ea["jacobian"]) == 2
    assert ea["laplacian"].shape == (25, 30)
    np.testing.assert_array_equal(ea["values"], eb["values"])


def test_network_json_round_trip():
    net = gtransnet.build_network(dim=1, widths=[20], center=np.array([0.0]), radius=1.1, offsets="half-uniform")
    back = gtransnet.FeatureNetwork.from_json(net.to_json())
    x = np.linspace(-1, 1, 11).reshape(-1, 1)
    np.testing.assert_array_equal(net.evaluate(x)["values"], back.evaluate(x)["values"])


def test_least_squares_matches_numpy():
    rng = np.random.default_rng(1)
    a = rng.standard_normal((60, 12))
    b = rng.standard_normal(60)
    ref = np.linalg.lstsq(a, b, rcond=None)[0]
    for method in ("qr", "svd"):
        x, diag = gtransnet.solve_least_squares(a, b, method=method)
        np.testing.assert_allclose(x, ref, rtol=1e-10, atol=1e-12)
        assert diag["rank_estimate"] == 12


def test_invalid_argument_maps_to_value_error():
    with pytest.raises(ValueError):
        gtransnet.sample_interior("no-such-domain", 10)


def test_fit_sine_small():
    out = gtransnet.fit_sine(width=200, gamma=4.0, frequency=2.0, points=400)
    assert out["relative_l2"] < 1e-6


def test_run_experiment_small_s1():
    report = gtransnet.run_experiment(
        {
            "problem": "s1-poisson2d",
            "network": {"layers": 2, "widths": [300, 200], "gamma": 2.0},
            "collocation": {"interior": 400, "boundary": 120, "test": 300},
            "repeats": 1,
        }
    )
    cell = report["cells"][0]
    assert cell["repeats"][0]["status"] == "ok"
    assert cell["repeats"][0]["relative_l2"] < 1e-2
