import numpy as np
import pytest

from anisopush.exceptions import RankDeficientFitError
from anisopush.analysis.push_law import (fourier_design, fit_fourier, fit_push_law, predict_histogram,
                                         angular_coverage_order, fit_cycle_map)
from conftest import make_records

GRID = np.arange(0.0, 360.0, 10.0)


def test_design_columns():
    design = fourier_design([0.0, 90.0], 2)
    np.testing.assert_allclose(design, [[1, 1, 0, 1, 0], [1, 0, 1, -1, 0]], atol=1e-15)


def test_recovers_synthetic_sine():
    values = 5.0 + 3.0 * np.sin(np.deg2rad(GRID))
    for order in (1, 2, 3):
        series, rmse = fit_fourier(GRID, values, order)
        expected = np.zeros(2 * order + 1)
        expected[0], expected[2] = 5.0, 3.0
        np.testing.assert_allclose(series.coefficients, expected, atol=1e-9)
        assert rmse < 1e-9


def test_series_is_periodic():
    series, _ = fit_fourier(GRID, np.cos(np.deg2rad(GRID)) ** 3, 3)
    np.testing.assert_allclose(series(GRID), series(GRID + 360.0), atol=1e-12)
    assert isinstance(series(45.0), float)


def test_constant_data():
    law = fit_push_law(make_records(GRID, 4.0, dx=0.01, dy=-0.002), order=2)
    np.testing.assert_allclose(law.dtheta(GRID), 4.0, atol=1e-12)
    np.testing.assert_allclose(law.dx(GRID), 0.01, atol=1e-12)
    assert law.residual_rmse['dtheta_deg'] < 1e-12
    assert law.order == 2
    assert list(law.to_frame()['term']) == ['a0', 'a1', 'b1', 'a2', 'b2']


def test_insufficient_coverage_is_rank_deficient():
    with pytest.raises(RankDeficientFitError):
        fit_fourier([10.0, 20.0, 30.0], [1.0, 2.0, 3.0], 2)
    with pytest.raises(RankDeficientFitError):
        fit_fourier([10.0] * 20, np.arange(20.0), 1)


def test_residual_does_not_increase_with_order():
    rng = np.random.default_rng(0)
    theta = rng.uniform(0, 360, size=200)
    values = np.sin(np.deg2rad(3 * theta)) + 0.3 * rng.normal(size=200)
    residuals = [fit_fourier(theta, values, order)[1] for order in range(0, 9)]
    assert np.all(np.diff(residuals) <= 1e-12)


def test_predicted_histogram_of_single_angle():
    law = fit_push_law(make_records(GRID, 2.0 + np.sin(np.deg2rad(GRID))), order=1)
    hist = predict_histogram(law, [90.0] * 25, 1.0)
    assert hist.counts.sum() == 25
    assert np.count_nonzero(hist.counts) == 1
    occupied = int(np.argmax(hist.counts))
    assert hist.edges[occupied] <= law.dtheta(90.0) < hist.edges[occupied + 1]
    assert law.dtheta(90.0) == pytest.approx(3.0)


def test_predicted_histogram_of_constant_law():
    law = fit_push_law(make_records(GRID, 7.5), order=1)
    samples = np.linspace(0, 359, 40)
    hist = predict_histogram(law, samples, 1.0, (0.0, 20.0))
    assert hist.counts[7] == 40
    assert hist.total == len(samples)
    with pytest.raises(ValueError):
        predict_histogram(law, [], 1.0)


def test_predicted_histogram_in_millimetres():
    law = fit_push_law(make_records(GRID, 0.0, dx=0.0125), order=1)
    hist = predict_histogram(law, GRID, 1.0, (0.0, 20.0), component='dx', scale=1000.0)
    assert hist.counts[12] == len(GRID)


def test_curve_frame_covers_circle():
    law = fit_push_law(make_records(GRID, 1.0), order=1)
    curve = law.curve_frame(5.0)
    assert len(curve) == 72
    assert list(curve.columns) == ['theta0_deg', 'dx', 'dy', 'dtheta_deg']


def test_coverage_order():
    assert angular_coverage_order(np.arange(0.0, 360.0, 1.0), 8) == 8
    assert angular_coverage_order([0.0, 10.0, 20.0], 8) == 0
    # three sectors of 120 degrees are occupied, five of 72 are not
    assert angular_coverage_order([10.0, 130.0, 250.0, 370.0], 8) == 1


def test_cycle_map_from_constant_advance():
    cycle_map = fit_cycle_map(make_records(GRID, 3.0, increment_deg=10.0), order=4)
    sampled = cycle_map.sample(1.0)
    np.testing.assert_allclose(sampled['next_theta0_deg'] - sampled['theta0_deg'], 10.0, atol=1e-9)
    assert cycle_map.n_samples == len(GRID)
    assert cycle_map.order == 4


def test_cycle_map_order_follows_coverage():
    theta = np.array([0.0, 100.0, 200.0, 300.0])
    cycle_map = fit_cycle_map(make_records(theta, 0.0, increment_deg=5.0), order=8)
    assert cycle_map.order == 1


def test_cycle_map_ignores_whole_turns():
    # the same -8 degree advance, some cycles winding a full turn on the way
    increment = np.where(np.arange(GRID.size) % 3 == 0, 352.0, -8.0)
    cycle_map = fit_cycle_map(make_records(GRID, 0.0, increment_deg=increment), order=2)
    assert cycle_map.residual_rmse < 1e-9
    np.testing.assert_allclose(cycle_map.increment(GRID), -8.0, atol=1e-9)
