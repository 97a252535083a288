"""Grid, field container, interpolation, and file round trips."""

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from seglab import Grid2D, ScalarField, bilinear, dump_field, load_field, write_pgm
from seglab.grid import constant_field


class TestGrid2D:
    def test_cell_centers(self, grid16):
        assert grid16.h == pytest.approx(1.0 / 16)
        assert grid16.center_of((0, 0)) == pytest.approx((0.03125, 0.03125))
        assert grid16.center_of((15, 8)) == pytest.approx((0.96875, 0.53125))

    def test_center_cell_round_trip(self, grid16):
        for i in range(16):
            for j in range(16):
                assert grid16.cell_of(*grid16.center_of((i, j))) == (i, j)

    def test_cell_of_clips_outside_points(self, grid16):
        assert grid16.cell_of(-0.2, 0.5) == (0, 8)
        assert grid16.cell_of(1.7, 1.7) == (15, 15)

    def test_rejects_tiny_and_non_integer_m(self):
        with pytest.raises(ValueError):
            Grid2D(4)
        with pytest.raises(ValueError):
            Grid2D(16.0)

    def test_center_of_rejects_off_grid(self, grid16):
        with pytest.raises(ValueError):
            grid16.center_of((16, 0))

    def test_meshgrid_indexing(self, grid16):
        X, Y = grid16.meshgrid()
        # X varies along axis 0 (i), Y along axis 1 (j)
        assert X[3, 0] == pytest.approx(grid16.center_of((3, 0))[0])
        assert Y[0, 3] == pytest.approx(grid16.center_of((0, 3))[1])


class TestScalarField:
    def test_shape_validation(self, grid16):
        with pytest.raises(ValueError):
            ScalarField(grid16, np.zeros((16, 8)))

    def test_nan_rejected(self, grid16):
        bad = np.zeros((16, 16))
        bad[3, 3] = np.nan
        with pytest.raises(ValueError):
            ScalarField(grid16, bad)

    def test_copy_is_deep(self, grid16):
        f = constant_field(grid16, 2.0)
        g = f.copy()
        g.values[0, 0] = -1.0
        assert f.values[0, 0] == 2.0


class TestBilinear:
    def test_exact_at_cell_centers(self, grid16, rng):
        vals = rng.normal(size=(16, 16))
        for _ in range(50):
            i, j = rng.integers(16, size=2)
            x, y = grid16.center_of((int(i), int(j)))
            assert bilinear(vals, grid16, x, y) == pytest.approx(vals[i, j])

    @settings(max_examples=200, deadline=None)
    @given(
        a=st.floats(-3, 3), b=st.floats(-3, 3), c=st.floats(-3, 3),
        x=st.floats(0.04, 0.96), y=st.floats(0.04, 0.96),
    )
    def test_reproduces_affine_functions(self, a, b, c, x, y):
        # interpolation of a plane is the plane (inside the center hull)
        grid = Grid2D(16)
        X, Y = grid.meshgrid()
        vals = a * X + b * Y + c
        expected = a * x + b * y + c
        assert bilinear(vals, grid, x, y) == pytest.approx(expected, abs=1e-9)

    def test_clamps_beyond_center_hull(self, grid16):
        vals = np.arange(256, dtype=float).reshape(16, 16)
        assert bilinear(vals, grid16, -5.0, -5.0) == pytest.approx(vals[0, 0])
        assert bilinear(vals, grid16, 5.0, 5.0) == pytest.approx(vals[15, 15])

    def test_array_broadcast(self, grid16):
        vals = np.ones((16, 16))
        out = bilinear(vals, grid16, np.linspace(0, 1, 7), np.linspace(0, 1, 7))
        assert out.shape == (7,)
        assert np.allclose(out, 1.0)


class TestFieldIO:
    def test_round_trip_bits(self, tmp_path, grid16, rng):
        f = ScalarField(grid16, rng.normal(size=(16, 16)))
        dump_field(f, tmp_path / "field", "demo", extra={"tag": 7})
        g, meta = load_field(tmp_path / "field")
        assert np.array_equal(g.values, f.values)
        assert meta["m"] == 16 and meta["name"] == "demo" and meta["tag"] == 7

    def test_sidecar_is_plain_json(self, tmp_path, grid16):
        dump_field(constant_field(grid16, 0.0), tmp_path / "f", "zeros")
        meta = json.loads((tmp_path / "f.json").read_text())
        assert meta["h"] == pytest.approx(1.0 / 16)

    def test_truncated_payload_rejected(self, tmp_path, grid16):
        dump_field(constant_field(grid16, 1.0), tmp_path / "f", "ones")
        raw = (tmp_path / "f.f64").read_bytes()
        (tmp_path / "f.f64").write_bytes(raw[:-16])
        with pytest.raises(ValueError):
            load_field(tmp_path / "f")

    def test_dump_is_row_major_i_outer(self, tmp_path, grid16):
        vals = np.zeros((16, 16))
        vals[1, 0] = 5.0  # second row, first column in (i, j) order
        dump_field(ScalarField(grid16, vals), tmp_path / "f", "probe")
        raw = np.fromfile(tmp_path / "f.f64", dtype="<f8")
        assert raw[16] == 5.0


class TestPgm:
    def test_header_and_size(self, tmp_path, grid16):
        write_pgm(np.zeros((16, 16)), tmp_path / "img.pgm")
        data = (tmp_path / "img.pgm").read_bytes()
        assert data.startswith(b"P5\n16 16\n255\n")
        assert len(data) == len(b"P5\n16 16\n255\n") + 256

    def test_sign_mode_centers_on_128(self, tmp_path, grid16):
        vals = np.zeros((16, 16))
        vals[0, 0] = -1.0
        vals[15, 15] = 1.0
        write_pgm(vals, tmp_path / "img.pgm", mode="sign")
        body = (tmp_path / "img.pgm").read_bytes()[len(b"P5\n16 16\n255\n"):]
        img = np.frombuffer(body, dtype=np.uint8).reshape(16, 16)
        # rows are written top = largest j; cell (0,0) lands bottom-left
        assert img[15, 0] == 1
        assert img[0, 15] == 255
        assert img[8, 8] == 128

    def test_unknown_mode_rejected(self, tmp_path):
        with pytest.raises(ValueError):
            write_pgm(np.zeros((16, 16)), tmp_path / "img.pgm", mode="rainbow")

    def test_byte_identical_reruns(self, tmp_path, rng):
        vals = rng.normal(size=(16, 16))
        write_pgm(vals, tmp_path / "a.pgm")
        write_pgm(vals, tmp_path / "b.pgm")
        assert (tmp_path / "a.pgm").read_bytes() == (tmp_path / "b.pgm").read_bytes()
