from itertools import permutations

import numpy as np
import pytest

from panqa.errors import DegeneracyError, InputError
from panqa.fusion import (FusionConfig, pansharpen, pansharpen_atwt,
                          pansharpen_cn, pansharpen_pca)
from panqa.raster import MultibandImage
from panqa.resample import upsample
from panqa.spectral import sam_mean


def make_pair(rng, h=8, w=8, bands=4, ratio=2):
    ms = MultibandImage(rng.uniform(0.1, 0.9, (h, w, bands)))
    pan = rng.uniform(0.1, 0.9, (h * ratio, w * ratio))
    return ms, pan


def first_pc(up):
    x = up.samples.reshape(-1, up.bands)
    mean = x.mean(axis=0)
    cov = np.cov(x - mean, rowvar=False, bias=True)
    evals, evecs = np.linalg.eigh(cov)
    order = np.argsort(evals)[::-1]
    evecs = evecs[:, order]
    evecs *= np.where(evecs.sum(axis=0) < 0, -1.0, 1.0)
    return ((x - mean) @ evecs)[:, 0].reshape(up.height, up.width)


def test_pca_identical_component_substitution(rng):
    ms, _ = make_pair(rng)
    cfg = FusionConfig(method="pca", resampler="bilinear")
    up = upsample(ms, 2, "bilinear")
    pan = first_pc(up)
    fused = pansharpen_pca(ms, pan, cfg)
    assert np.allclose(fused.samples, up.samples, atol=1e-9)


def test_pca_shape_and_mean_preservation(rng):
    ms, pan = make_pair(rng, ratio=4)
    cfg = FusionConfig(method="pca", resampler="bicubic")
    fused = pansharpen_pca(ms, pan, cfg)
    assert fused.samples.shape == (32, 32, 4)
    up = upsample(ms, 4, "bicubic")
    for b in range(4):
        ref = up.band(b).mean()
        assert abs(fused.band(b).mean() - ref) / abs(ref) < 1e-6


def test_pca_rank_deficient(rng):
    ms = MultibandImage(np.full((4, 4, 3), 0.5))
    pan = rng.random((8, 8))
    with pytest.raises(DegeneracyError, match="rank-deficient"):
        pansharpen_pca(ms, pan, FusionConfig(method="pca"))


def test_cn_identity_when_pan_equals_intensity(rng):
    ms, _ = make_pair(rng)
    cfg = FusionConfig(method="cn", resampler="bilinear")
    up = upsample(ms, 2, "bilinear")
    pan = up.samples.mean(axis=2)
    fused = pansharpen_cn(ms, pan, cfg)
    assert np.allclose(fused.samples, up.samples, atol=1e-12)


def test_cn_preserves_band_ratios(rng):
    ms, pan = make_pair(rng)
    cfg = FusionConfig(method="cn", resampler="bilinear")
    fused = pansharpen_cn(ms, pan, cfg)
    up = upsample(ms, 2, "bilinear")
    r_up = up.band(0) / up.band(1)
    r_fused = fused.band(0) / fused.band(1)
    assert np.allclose(r_fused, r_up, atol=1e-9)


def test_cn_zero_sam_against_upsampled(rng):
    ms, pan = make_pair(rng)
    cfg = FusionConfig(method="cn", resampler="bicubic")
    fused = pansharpen_cn(ms, pan, cfg)
    up = upsample(ms, 2, "bicubic")
    # negative matched-pan pixels flip the spectral vector; keep the check
    # on pixels with a positive scale factor
    intensity = up.samples.mean(axis=2)
    matched = ((pan - pan.mean()) * intensity.std() / pan.std()
               + intensity.mean())
    pos = matched > 0
    masked_up = MultibandImage(np.where(pos[:, :, None], up.samples, 1.0))
    masked_fused = MultibandImage(
        np.where(pos[:, :, None], fused.samples, 1.0))
    mean_deg, _ = sam_mean(masked_up, masked_fused)
    assert mean_deg < 1e-6


def test_atwt_constant_pan_is_identity(rng):
    ms, _ = make_pair(rng)
    cfg = FusionConfig(method="atwt", resampler="nearest", wavelet_levels=2)
    pan = np.full((16, 16), 0.4)
    fused = pansharpen_atwt(ms, pan, cfg)
    up = upsample(ms, 2, "nearest")
    assert np.allclose(fused.samples, up.samples, atol=1e-12)


def test_atwt_same_detail_all_bands(rng):
    ms, pan = make_pair(rng)
    cfg = FusionConfig(method="atwt", resampler="bilinear", wavelet_levels=2)
    fused = pansharpen_atwt(ms, pan, cfg)
    up = upsample(ms, 2, "bilinear")
    delta = fused.samples - up.samples
    for b in range(1, 4):
        assert np.allclose(delta[:, :, b], delta[:, :, 0], atol=1e-12)


def test_all_fusers_deterministic_and_shaped(rng):
    ms, pan = make_pair(rng)
    for method in ("pca", "cn", "atwt"):
        cfg = FusionConfig(method=method)
        a, meta = pansharpen(ms, pan, cfg)
        b, _ = pansharpen(ms, pan, cfg)
        assert a.samples.shape == (16, 16, 4)
        assert np.array_equal(a.samples, b.samples)
        assert meta["n_free_parameters"] >= 1
        assert meta["wall_seconds"] >= 0


@pytest.mark.parametrize("method", ["pca", "cn", "atwt"])
def test_band_permutation_equivariance(rng, method):
    ms, pan = make_pair(rng)
    cfg = FusionConfig(method=method)
    base = pansharpen(ms, pan, cfg)[0]
    for perm in list(permutations(range(4)))[:6]:
        permuted = MultibandImage(ms.samples[:, :, list(perm)])
        out = pansharpen(permuted, pan, cfg)[0]
        assert np.allclose(out.samples, base.samples[:, :, list(perm)],
                           atol=1e-6)


def test_config_validation():
    with pytest.raises(InputError):
        FusionConfig(method="gram-schmidt")
    with pytest.raises(InputError):
        FusionConfig(method="atwt", wavelet_levels=0)


def test_atwt_levels_capped(rng):
    ms, pan = make_pair(rng, ratio=2)
    cfg = FusionConfig(method="atwt", wavelet_levels=5)
    with pytest.raises(InputError, match="wavelet_levels"):
        pansharpen_atwt(ms, pan, cfg)
