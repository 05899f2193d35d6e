from __future__ import annotations

import numpy as np

from cubicslice.dynamics import BOUNDED
from cubicslice.imageio import escape_shades, julia_rgb, read_ppm, write_codes_csv, write_ppm


def test_ppm_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    rgb = rng.integers(0, 256, size=(7, 11, 3), dtype=np.uint8)
    path = tmp_path / "x.ppm"
    write_ppm(path, rgb)
    assert path.read_bytes().startswith(b"P6\n11 7\n255\n")
    assert np.array_equal(read_ppm(path), rgb)


def test_palette():
    codes = np.array([[BOUNDED, 0, 1000]])
    rgb = julia_rgb(codes, 1000)
    assert tuple(rgb[0, 0]) == (0, 0, 0)
    assert tuple(rgb[0, 1]) == (127, 127, 255)
    assert tuple(rgb[0, 2]) == (0, 0, 128)
    shades = escape_shades(np.arange(50).reshape(5, 10), 50)[..., 2]
    assert (np.diff(shades.ravel().astype(int)) <= 0).all()


def test_codes_csv(tmp_path):
    codes = np.array([[1, -1], [3, 0]])
    path = tmp_path / "c.csv"
    write_codes_csv(path, codes)
    assert path.read_text().splitlines() == ["1,-1", "3,0"]
