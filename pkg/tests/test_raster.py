import json

import numpy as np
import pytest

from panqa.errors import InputError
from panqa.raster import MultibandImage, load_image, save_image


def write_pair(tmp_path, name, header, payload, dtype):
    (tmp_path / f"{name}.json").write_text(json.dumps(header))
    np.asarray(payload, dtype=dtype).tofile(tmp_path / f"{name}.raw")
    return tmp_path / f"{name}.json"


def test_load_identity_calibration(tmp_path):
    hdr = {"width": 2, "height": 2, "bands": 1, "dtype": "u8",
           "gain": [1.0], "offset": [0.0], "nodata": None,
           "band_names": None}
    path = write_pair(tmp_path, "a", hdr, [0, 255, 10, 20], "<u1")
    img = load_image(path)
    assert img.samples[:, :, 0].ravel().tolist() == [0, 255, 10, 20]


def test_load_gain_offset(tmp_path):
    hdr = {"width": 1, "height": 1, "bands": 2, "dtype": "u16",
           "gain": [0.01, 0.01], "offset": [0.0, 0.0], "nodata": None,
           "band_names": None}
    path = write_pair(tmp_path, "b", hdr, [100, 200], "<u2")
    img = load_image(path)
    assert img.samples[0, 0, 0] == pytest.approx(1.0)
    assert img.samples[0, 0, 1] == pytest.approx(2.0)


def test_load_length_mismatch(tmp_path):
    hdr = {"width": 2, "height": 2, "bands": 1, "dtype": "u8",
           "gain": [1.0], "offset": [0.0], "nodata": None,
           "band_names": None}
    path = write_pair(tmp_path, "c", hdr, [1, 2, 3], "<u1")
    with pytest.raises(InputError, match="length mismatch"):
        load_image(path)


def test_load_rejects_nodata(tmp_path):
    hdr = {"width": 2, "height": 1, "bands": 1, "dtype": "u8",
           "gain": [1.0], "offset": [0.0], "nodata": 7,
           "band_names": None}
    path = write_pair(tmp_path, "d", hdr, [7, 3], "<u1")
    with pytest.raises(InputError, match="nodata"):
        load_image(path)


def test_f32_round_trip(tmp_path, rng):
    samples = rng.random((4, 4, 3)).astype(np.float32).astype(np.float64)
    img = MultibandImage(samples, band_names=["r", "g", "b"])
    save_image(img, tmp_path / "rt", sample_type="f32")
    back = load_image(tmp_path / "rt")
    assert np.array_equal(back.samples, img.samples)
    assert back.band_names == ["r", "g", "b"]
    assert (back.height, back.width, back.bands) == (4, 4, 3)


def test_u8_out_of_range(tmp_path):
    img = MultibandImage(np.array([[[-0.1]]]))
    with pytest.raises(InputError, match="out of range"):
        save_image(img, tmp_path / "neg", sample_type="u8")


def test_calibration_is_affine(tmp_path, rng):
    dn = rng.integers(0, 255, size=(3, 5, 2))
    hdr_raw = {"width": 5, "height": 3, "bands": 2, "dtype": "u8",
               "gain": [1.0, 1.0], "offset": [0.0, 0.0], "nodata": None,
               "band_names": None}
    hdr_cal = dict(hdr_raw, gain=[0.5, 2.0], offset=[1.0, -3.0])
    flat = np.moveaxis(dn, 2, 0).ravel()
    p_raw = write_pair(tmp_path, "raw", hdr_raw, flat, "<u1")
    p_cal = write_pair(tmp_path, "cal", hdr_cal, flat, "<u1")
    raw = load_image(p_raw).samples
    cal = load_image(p_cal).samples
    expected = raw * np.array([0.5, 2.0]) + np.array([1.0, -3.0])
    assert np.array_equal(cal, expected)


def test_band_views_and_range():
    data = np.arange(8, dtype=np.float64).reshape(2, 2, 2)
    img = MultibandImage(data)
    assert np.array_equal(img.band(0), data[:, :, 0])
    assert np.array_equal(img.band(1), data[:, :, 1])
    with pytest.raises(InputError):
        img.band(2)


def test_non_finite_rejected():
    with pytest.raises(InputError, match="non-finite"):
        MultibandImage(np.array([[[np.nan]]]))


def test_unknown_sample_type(tmp_path):
    hdr = {"width": 1, "height": 1, "bands": 1, "dtype": "f64",
           "gain": [1.0], "offset": [0.0], "nodata": None,
           "band_names": None}
    path = write_pair(tmp_path, "e", hdr, [1.0], "<f8")
    with pytest.raises(InputError):
        load_image(path)
