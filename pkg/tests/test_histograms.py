import numpy as np
import pytest

from anisopush.analysis.histograms import (Histogram, histogram, angle_histogram, bin_range, total_variation,
                                           histogram_peaks, top_bin_fraction)


def test_half_open_bins():
    hist = histogram([0.0, 0.0, 1.0], 1.0, (0.0, 2.0))
    np.testing.assert_array_equal(hist.counts, [2, 1])
    np.testing.assert_array_equal(hist.edges, [0.0, 1.0, 2.0])
    assert hist.overflow == 0


def test_empty_input():
    hist = histogram([], 1.0, (0.0, 2.0))
    np.testing.assert_array_equal(hist.counts, [0, 0])
    assert hist.total == 0


def test_uniform_angle_grid():
    hist = angle_histogram(np.arange(0.0, 360.0, 1.0), 4.0)
    assert len(hist.counts) == 90
    assert np.all(hist.counts == 4)


def test_out_of_range_values_overflow():
    hist = histogram([-0.5, 0.5, 2.0, 7.0], 1.0, (0.0, 2.0))
    np.testing.assert_array_equal(hist.counts, [1, 0])
    assert hist.overflow == 3
    assert hist.total == 4


def test_partial_last_bin():
    hist = histogram([0.5, 2.2, 2.4, 2.5, 2.7], 1.0, (0.0, 2.5))
    np.testing.assert_allclose(hist.edges, [0.0, 1.0, 2.0, 2.5])
    np.testing.assert_array_equal(hist.counts, [1, 0, 2])
    assert hist.overflow == 2
    hist = angle_histogram([1.0, 357.0, 359.9], 7.0)
    assert len(hist.counts) == 52
    assert hist.edges[-1] == 360.0
    assert hist.counts[-1] == 2
    assert hist.overflow == 0


def test_range_fitted_around_data():
    assert bin_range([1.5, 3.2], 1.0) == (1.0, 4.0)
    hist = histogram([1.5, 3.2, 3.9], 1.0)
    np.testing.assert_array_equal(hist.counts, [1, 0, 2])


def test_angles_are_reduced_before_binning():
    hist = angle_histogram([-2.0, 358.0, 722.0], 4.0)
    assert hist.counts[89] == 2
    assert hist.counts[0] == 1


def test_rejects_bad_width():
    with pytest.raises(ValueError):
        histogram([1.0], 0.0)


def test_frame():
    hist = histogram([0.0, 0.0, 1.0, 5.0], 1.0, (0.0, 2.0))
    assert hist.total == 4
    table = hist.to_frame()
    assert list(table.columns) == ['left', 'right', 'center', 'count']
    np.testing.assert_allclose(table['center'], [0.5, 1.5])


def test_edges_must_increase():
    with pytest.raises(ValueError):
        Histogram(np.array([0.0, 0.0, 1.0]), np.array([1, 1]))


def test_total_variation():
    a = histogram([0.5, 1.5], 1.0, (0.0, 2.0))
    b = histogram([0.5, 0.5], 1.0, (0.0, 2.0))
    assert total_variation(a, a) == 0.0
    assert total_variation(a, b) == pytest.approx(0.5)
    c = histogram([1.5, 1.5], 1.0, (0.0, 2.0))
    assert total_variation(b, c) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        total_variation(a, histogram([0.5], 1.0, (0.0, 3.0)))


def test_peaks_and_top_bin():
    values = [10.0] * 30 + [100.0] * 20 + list(np.arange(0.0, 360.0, 8.0))
    hist = angle_histogram(values, 4.0)
    peaks = histogram_peaks(hist, min_fraction=0.1, periodic=True)
    assert peaks == [10.0, 102.0]
    assert top_bin_fraction(hist) == pytest.approx(31 / len(values))


def test_periodic_peak_wraps_around():
    hist = angle_histogram([358.0] * 5 + [1.0] * 3, 4.0)
    assert histogram_peaks(hist, periodic=True) == [358.0]
    assert histogram_peaks(hist, periodic=False) == [2.0, 358.0]
