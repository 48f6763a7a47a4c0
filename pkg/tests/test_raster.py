import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays
from PIL import Image

from seamcarve import raster
from seamcarve.bench import make_test_image
from seamcarve.errors import CorruptImage, UnsupportedFormat

pixel_grids = st.tuples(st.integers(1, 9), st.integers(1, 9)).flatmap(
    lambda hw: arrays(np.uint8, (hw[0], hw[1], 3))
)


def test_load_single_white_png(tmp_path):
    path = tmp_path / "white.png"
    Image.new("RGB", (1, 1), (255, 255, 255)).save(path)
    grid = raster.load_image(path)
    assert grid.shape == (1, 1, 3)
    assert grid[0, 0].tolist() == [255, 255, 255]


def test_load_hand_written_ppm(tmp_path):
    pixels = [(1, 2, 3), (4, 5, 6), (7, 8, 9), (10, 11, 12), (13, 14, 15), (200, 100, 50)]
    path = tmp_path / "six.ppm"
    path.write_bytes(b"P6\n3 2\n255\n" + bytes(c for px in pixels for c in px))
    grid = raster.load_image(path)
    assert grid.shape == (2, 3, 3)
    for idx, px in enumerate(pixels):
        assert tuple(grid[idx // 3, idx % 3]) == px


def test_alpha_is_dropped(tmp_path):
    path = tmp_path / "rgba.png"
    Image.new("RGBA", (2, 1), (10, 20, 30, 0)).save(path)
    grid = raster.load_image(path)
    assert grid.shape == (1, 2, 3)
    assert grid[0, 1].tolist() == [10, 20, 30]


def test_truncated_png_is_corrupt(tmp_path):
    good = tmp_path / "good.png"
    raster.save_image(make_test_image(40), good)
    bad = tmp_path / "bad.png"
    bad.write_bytes(good.read_bytes()[:200])
    with pytest.raises(CorruptImage):
        raster.load_image(bad)


def test_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        raster.load_image(tmp_path / "nope.png")


def test_jpeg_is_unsupported(tmp_path):
    path = tmp_path / "photo.jpg"
    Image.new("RGB", (4, 4)).save(path, format="JPEG")
    with pytest.raises(UnsupportedFormat):
        raster.load_image(path)


def test_round_trip_single_pixel(tmp_path):
    grid = np.array([[[12, 34, 56]]], dtype=np.uint8)
    raster.save_image(grid, tmp_path / "one.png")
    assert np.array_equal(raster.load_image(tmp_path / "one.png"), grid)


@pytest.mark.parametrize("suffix", [".png", ".ppm"])
def test_round_trip_bench_image(tmp_path, suffix):
    grid = make_test_image(180)
    path = tmp_path / f"bench{suffix}"
    raster.save_image(grid, path)
    assert np.array_equal(raster.load_image(path), grid)


def test_shipped_fixture_matches_generator(fixture_image):
    assert np.array_equal(fixture_image, make_test_image(180))


def test_save_into_missing_directory(tmp_path):
    with pytest.raises(OSError):
        raster.save_image(np.zeros((1, 1, 3), np.uint8), tmp_path / "missing" / "x.png")


@settings(max_examples=50, deadline=None)
@given(pixel_grids)
def test_png_round_trip_property(tmp_path_factory, grid):
    path = tmp_path_factory.mktemp("rt") / "g.png"
    raster.save_image(grid, path)
    assert np.array_equal(raster.load_image(path), grid)


def test_grayscale_values():
    assert np.all(raster.to_grayscale(np.zeros((2, 2, 3), np.uint8)) == 0.0)
    assert raster.to_grayscale(np.full((1, 1, 3), 255, np.uint8))[0, 0] == 255.0
    assert raster.to_grayscale(np.array([[[100, 150, 200]]], np.uint8))[0, 0] == 140.75


@given(pixel_grids)
def test_grayscale_range(grid):
    g = raster.to_grayscale(grid)
    assert g.shape == grid.shape[:2]
    assert g.min() >= 0.0 and g.max() <= 255.0


def test_transpose_cells():
    grid = np.arange(18, dtype=np.uint8).reshape(2, 3, 3)
    t = raster.transpose(grid)
    assert t.shape == (3, 2, 3)
    for i in range(3):
        for j in range(2):
            assert np.array_equal(t[i, j], grid[j, i])
    one = np.array([[[1, 2, 3]]], np.uint8)
    assert np.array_equal(raster.transpose(one), one)


@given(pixel_grids)
def test_transpose_involution(grid):
    assert np.array_equal(raster.transpose(raster.transpose(grid)), grid)
