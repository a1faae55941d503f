"""Window / pattern containers and the pattern file format."""

import numpy as np
import pytest

from pointspectra.patterns import PointPattern, Window, read_pattern, write_pattern


class TestWindow:
    def test_volume(self):
        assert Window((10.0, 10.0)).volume == 400.0
        assert Window((1.0, 2.0, 3.0)).volume == 48.0

    def test_square_constructor(self):
        w = Window.square(5.0, 3)
        assert w.half_widths == (5.0, 5.0, 5.0)

    def test_contains(self):
        w = Window((2.0, 1.0))
        mask = w.contains([[0.0, 0.0], [1.5, 0.5], [1.5, 1.5]])
        assert mask.tolist() == [True, True, False]

    def test_rejects_bad_half_widths(self):
        with pytest.raises(ValueError):
            Window((1.0, -2.0))
        with pytest.raises(ValueError):
            Window(())


class TestPointPattern:
    def test_basic(self):
        p = PointPattern([[0.5, 0.5], [-1.0, 2.0]], Window((2.0, 3.0)))
        assert p.n == 2
        assert p.d == 2
        assert not p.points.flags.writeable

    def test_empty(self):
        p = PointPattern(np.empty((0, 2)), Window.square(1.0))
        assert p.n == 0
        assert p.intensity_estimate() == 0.0

    def test_rejects_outside_points(self):
        with pytest.raises(ValueError):
            PointPattern([[5.0, 0.0]], Window.square(1.0))

    def test_intensity_estimate(self):
        p = PointPattern([[0.0, 0.0]] * 8, Window.square(1.0))
        assert p.intensity_estimate() == pytest.approx(2.0)


class TestPatternFile:
    def test_round_trip(self, tmp_path):
        pts = np.array([[0.123456789012345, -3.9], [2.0, 1.0 / 3.0]])
        p = PointPattern(pts, Window.square(5.0))
        path = tmp_path / "pat.csv"
        write_pattern(path, p)
        q = read_pattern(path)
        assert q.window == p.window
        np.testing.assert_array_equal(q.points, p.points)

    def test_round_trip_empty(self, tmp_path):
        p = PointPattern(np.empty((0, 2)), Window((1.5, 2.5)))
        path = tmp_path / "empty.csv"
        write_pattern(path, p)
        q = read_pattern(path)
        assert q.n == 0
        assert q.window.half_widths == (1.5, 2.5)

    def test_header_format(self, tmp_path):
        p = PointPattern([[1.0, -1.0]], Window.square(10.0))
        path = tmp_path / "pat.csv"
        write_pattern(path, p)
        first = path.read_text().splitlines()[0]
        assert first == "# window 10.0 10.0"

    def test_missing_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1.0,2.0\n")
        with pytest.raises(ValueError):
            read_pattern(path)
