"""Shared fixtures: synthetic images and an independent clustering oracle."""

import numpy as np
import pytest

from fcmseg import FcmConfig, GrayImage


def make_mixture_image(n_pixels, n_groups, seed, width=None):
    """Integer-intensity image drawn from well-separated intensity groups."""
    rng = np.random.default_rng(seed)
    levels = np.linspace(25, 230, n_groups)
    base = rng.choice(levels, size=n_pixels)
    noise = rng.integers(-10, 11, size=n_pixels)
    values = np.clip(np.rint(base + noise), 0.0, 255.0)
    if width is None:
        width = n_pixels
        height = 1
    else:
        assert n_pixels % width == 0
        height = n_pixels // width
    return GrayImage(width, height, values.astype(np.float64))


def make_phantom(width, height, seed=5):
    """Blobby four-region image resembling a tissue phantom slice."""
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:height, 0:width]
    cy, cx = height / 2.0, width / 2.0
    r = np.hypot((yy - cy) / height, (xx - cx) / width)
    values = np.full((height, width), 15.0)
    values[r < 0.45] = 70.0
    values[r < 0.32] = 140.0
    values[r < 0.18] = 215.0
    values += rng.integers(-6, 7, size=(height, width))
    values = np.clip(np.rint(values), 0, 255)
    return GrayImage(width, height, values.reshape(-1).astype(np.float64))


def standard_fixtures():
    """Twenty deterministic (image, config) pairs spanning the test grid."""
    sizes = [
        16, 32, 64, 96, 128, 192, 256, 384, 512, 768,
        1024, 1536, 2048, 4096, 6144, 8192, 16384, 24576, 32768, 65536,
    ]
    cs = [2, 3, 4]
    ms = [1.5, 2.0, 3.0]
    fixtures = []
    for idx, n in enumerate(sizes):
        c = cs[idx % len(cs)]
        m = ms[idx % len(ms)]
        img = make_mixture_image(n, c, seed=100 + idx)
        cfg = FcmConfig(c=c, m=m, seed=1000 + idx)
        fixtures.append((img, cfg))
    return fixtures


def small_fixtures(count=10):
    """Smaller deterministic fixtures for the pricier bitwise checks."""
    fixtures = []
    for idx in range(count):
        n = 64 * (idx + 1)
        c = 2 + idx % 3
        img = make_mixture_image(n, c, seed=300 + idx)
        cfg = FcmConfig(c=c, m=(1.5, 2.0, 3.0)[idx % 3], seed=50 + idx)
        fixtures.append((img, cfg))
    return fixtures


def oracle_fcm(x, c, m, epsilon, u0=None, seed=0, max_iters=100000):
    """Independent dense-numpy fuzzy c-means used to cross-check results.

    Deliberately uses a different formulation (inverse-power distances
    normalized per row) and numpy's own summation so it shares no code
    path with the package.
    """
    x = np.asarray(x, dtype=np.float64)
    n = x.shape[0]
    if u0 is None:
        rng = np.random.default_rng(seed)
        u = rng.random((n, c))
        u /= u.sum(axis=1, keepdims=True)
    else:
        u = np.array(u0, dtype=np.float64).reshape(n, c)
    iterations = 0
    for _ in range(max_iters):
        w = u**m
        v = (w * x[:, None]).sum(axis=0) / w.sum(axis=0)
        d = np.abs(x[:, None] - v[None, :])
        zero = d == 0.0
        singular = zero.any(axis=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = d ** (-2.0 / (m - 1.0))
            u_new = inv / inv.sum(axis=1, keepdims=True)
        if singular.any():
            rows = zero[singular]
            u_new[singular] = rows / rows.sum(axis=1, keepdims=True)
        delta = np.abs(u_new - u).max()
        u = u_new
        iterations += 1
        if delta < epsilon:
            break
    return v, u, u.argmax(axis=1), iterations


@pytest.fixture
def phantom_image():
    return make_phantom(160, 128)


@pytest.fixture
def mixture_image():
    return make_mixture_image(600, 3, seed=77, width=30)
