"""Domain types shared by the clustering engines."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError

ROW_SUM_TOL = 1e-9


def _as_float_buffer(values, name: str) -> np.ndarray:
    arr = np.ascontiguousarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {arr.shape}")
    return arr


@dataclass(frozen=True)
class GrayImage:
    """Flat row-major grayscale raster; the feature space of clustering."""

    width: int
    height: int
    pixels: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be at least 1x1")
        pixels = _as_float_buffer(self.pixels, "pixels")
        if pixels.shape[0] != self.width * self.height:
            raise ValueError(
                f"pixel buffer has {pixels.shape[0]} entries, "
                f"expected {self.width}x{self.height}={self.width * self.height}"
            )
        if not np.all(np.isfinite(pixels)):
            raise ValueError("pixel intensities must be finite")
        if np.any(pixels < 0.0):
            raise ValueError("pixel intensities must be non-negative")
        object.__setattr__(self, "pixels", pixels)

    @classmethod
    def from_array(cls, array) -> "GrayImage":
        """Build from a 2-D (height, width) array."""
        arr = np.asarray(array, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("expected a 2-D array")
        return cls(arr.shape[1], arr.shape[0], arr.reshape(-1))

    def to_array(self) -> np.ndarray:
        return self.pixels.reshape(self.height, self.width)

    @property
    def pixel_count(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class MembershipMatrix:
    """Row-stochastic per-pixel, per-cluster weights, stored flat.

    Entry (i, j) lives at ``u[i * c + j]``; every row sums to 1 within
    ROW_SUM_TOL and every entry lies in [0, 1].
    """

    n: int
    c: int
    u: np.ndarray

    def __post_init__(self):
        if self.n < 1 or self.c < 1:
            raise ValueError("membership dimensions must be positive")
        u = _as_float_buffer(self.u, "u")
        if u.shape[0] != self.n * self.c:
            raise ValueError(
                f"membership buffer has {u.shape[0]} entries, expected {self.n * self.c}"
            )
        if np.any(u < 0.0) or np.any(u > 1.0):
            raise ValueError("membership values must lie in [0, 1]")
        rows = u.reshape(self.n, self.c).sum(axis=1)
        worst = np.abs(rows - 1.0).max()
        if worst > ROW_SUM_TOL:
            raise ValueError(f"membership rows must sum to 1 (worst deviation {worst:g})")
        object.__setattr__(self, "u", u)

    def as_rows(self) -> np.ndarray:
        return self.u.reshape(self.n, self.c)


@dataclass(frozen=True)
class ClusterCenters:
    """Scalar intensity centroid per cluster."""

    v: np.ndarray

    def __post_init__(self):
        v = _as_float_buffer(self.v, "v")
        if v.shape[0] < 1:
            raise ValueError("at least one center is required")
        if not np.all(np.isfinite(v)):
            raise ValueError("centers must be finite")
        object.__setattr__(self, "v", v)

    @property
    def c(self) -> int:
        return self.v.shape[0]


@dataclass(frozen=True)
class FcmConfig:
    """Clustering parameters.

    c: number of clusters (at least 2)
    m: fuzzifier, strictly greater than 1
    epsilon: convergence threshold on the membership max-abs delta
    max_iters: iteration cap guarding against non-convergence
    seed: membership-initialization seed (taken modulo 2**64)
    block_size: lanes per reduction block; a power of two, at least 2
    """

    c: int
    m: float = 2.0
    epsilon: float = 0.005
    max_iters: int = 500
    seed: int = 0
    block_size: int = 128

    def __post_init__(self):
        if not isinstance(self.c, int) or self.c < 2:
            raise InvalidConfigError(f"cluster count must be an integer >= 2, got {self.c!r}")
        m = float(self.m)
        if not np.isfinite(m) or m <= 1.0:
            raise InvalidConfigError(f"fuzzifier must be a finite real > 1, got {self.m!r}")
        eps = float(self.epsilon)
        if not (0.0 < eps < 1.0):
            raise InvalidConfigError(f"epsilon must lie in (0, 1), got {self.epsilon!r}")
        if not isinstance(self.max_iters, int) or self.max_iters < 1:
            raise InvalidConfigError(f"max_iters must be an integer >= 1, got {self.max_iters!r}")
        if not isinstance(self.seed, int):
            raise InvalidConfigError(f"seed must be an integer, got {self.seed!r}")
        bs = self.block_size
        if not isinstance(bs, int) or bs < 2 or (bs & (bs - 1)) != 0:
            raise InvalidConfigError(f"block_size must be a power of two >= 2, got {bs!r}")
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "epsilon", eps)

    @property
    def seed64(self) -> int:
        return self.seed & 0xFFFFFFFFFFFFFFFF


@dataclass(frozen=True)
class LabelMap:
    """Defuzzified per-pixel cluster assignments."""

    width: int
    height: int
    labels: np.ndarray
    c: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("label map dimensions must be at least 1x1")
        if self.c < 1:
            raise ValueError("cluster count must be positive")
        labels = np.ascontiguousarray(self.labels, dtype=np.int32)
        if labels.ndim != 1 or labels.shape[0] != self.width * self.height:
            raise ValueError("label buffer length must equal width*height")
        if labels.shape[0] and (labels.min() < 0 or labels.max() >= self.c):
            raise ValueError(f"labels must lie in [0, {self.c})")
        object.__setattr__(self, "labels", labels)

    def to_array(self) -> np.ndarray:
        return self.labels.reshape(self.height, self.width)


@dataclass(frozen=True)
class FcmResult:
    """Everything a clustering run produces."""

    centers: ClusterCenters
    membership: MembershipMatrix
    labels: LabelMap
    iterations: int
    objective_trace: tuple
    converged: bool

    def __post_init__(self):
        if self.iterations != len(self.objective_trace):
            raise ValueError("objective trace must record one value per iteration")
