"""Sequential fuzzy c-means: elementary operations and the reference engine.

Everything here is single-threaded by contract and serves as the
correctness baseline for the block-parallel engine. Center sums are
accumulated in pixel-index order, so results are fully deterministic.
"""

from __future__ import annotations

import numpy as np

from . import backend
from .errors import DegenerateClusterError, DimensionMismatchError, FcmError, InvalidConfigError
from .types import ClusterCenters, FcmConfig, FcmResult, GrayImage, LabelMap, MembershipMatrix


def _require_fuzzifier(m: float) -> float:
    m = float(m)
    if not np.isfinite(m) or m <= 1.0:
        raise InvalidConfigError(f"fuzzifier must be a finite real > 1, got {m!r}")
    return m


def init_membership(n: int, cfg: FcmConfig) -> MembershipMatrix:
    """Seeded random row-stochastic initialization of the n x c matrix.

    Deterministic for a fixed seed; the generator is SplitMix64, so two
    runs with the same configuration are bit-identical.
    """
    if not isinstance(n, int) or n < 1:
        raise InvalidConfigError(f"pixel count must be an integer >= 1, got {n!r}")
    u = np.empty(n * cfg.c, dtype=np.float64)
    backend.active().fill_membership_random(u, n, cfg.c, cfg.seed64)
    matrix = MembershipMatrix(n, cfg.c, u)
    if n > cfg.c:
        cols = matrix.as_rows().sum(axis=0)
        if np.any(cols <= 0.0) or np.any(cols >= n):
            raise FcmError("randomized initialization produced an empty or saturated cluster")
    return matrix


def update_centers(img: GrayImage, u: MembershipMatrix, m: float) -> ClusterCenters:
    """Membership-weighted mean intensity per cluster.

    Raises DegenerateClusterError if a cluster's weight sum is exactly
    zero, which signals a hand-built membership with an empty column.
    """
    m = _require_fuzzifier(m)
    if u.n != img.pixel_count:
        raise DimensionMismatchError(
            f"membership covers {u.n} pixels but the image has {img.pixel_count}"
        )
    v = np.empty(u.c, dtype=np.float64)
    dead = backend.active().update_centers_linear(img.pixels, u.u, v, u.n, u.c, m)
    if dead >= 0:
        raise DegenerateClusterError(dead)
    return ClusterCenters(v)


def update_membership(img: GrayImage, v: ClusterCenters, m: float) -> MembershipMatrix:
    """Recompute memberships from centers; rows sum to 1 within 1e-9.

    Pixels that coincide exactly with one or more centers split their
    membership equally over those zero-distance clusters.
    """
    m = _require_fuzzifier(m)
    n = img.pixel_count
    u = np.empty(n * v.c, dtype=np.float64)
    backend.active().update_membership_range(img.pixels, v.v, u, v.c, m, 0, n)
    return MembershipMatrix(n, v.c, u)


def objective(img: GrayImage, u: MembershipMatrix, v: ClusterCenters, m: float) -> float:
    """Weighted sum of squared pixel-to-center distances."""
    m = _require_fuzzifier(m)
    if u.n != img.pixel_count:
        raise DimensionMismatchError(
            f"membership covers {u.n} pixels but the image has {img.pixel_count}"
        )
    if u.c != v.c:
        raise DimensionMismatchError(f"membership has {u.c} clusters but centers have {v.c}")
    return backend.active().objective_linear(img.pixels, u.u, v.v, u.n, u.c, m)


def membership_delta(u_new: MembershipMatrix, u_old: MembershipMatrix) -> float:
    """Max absolute elementwise difference between two memberships."""
    if (u_new.n, u_new.c) != (u_old.n, u_old.c):
        raise DimensionMismatchError(
            f"memberships are {u_new.n}x{u_new.c} and {u_old.n}x{u_old.c}"
        )
    return backend.active().max_abs_diff(u_new.u, u_old.u, 0, u_new.n * u_new.c)


def defuzzify(u: MembershipMatrix, width: int, height: int) -> LabelMap:
    """Assign each pixel its maximal-membership cluster (ties: lowest index)."""
    if u.n != width * height:
        raise DimensionMismatchError(
            f"membership covers {u.n} pixels but the map is {width}x{height}"
        )
    labels = np.empty(u.n, dtype=np.intc)
    backend.active().argmax_rows(u.u, labels, u.n, u.c)
    return LabelMap(width, height, labels, u.c)


def _iterate(x: np.ndarray, u: np.ndarray, cfg: FcmConfig):
    """Run the center/membership loop on raw buffers until convergence.

    This is the region the benchmark harness times: initialization and
    defuzzification live outside. ``u`` is consumed as scratch space.
    Returns (v, u_final, iterations, objective_trace, converged).
    """
    kern = backend.active()
    n = x.shape[0]
    c, m = cfg.c, cfg.m
    u_next = np.empty_like(u)
    v = np.empty(c, dtype=np.float64)
    trace = []
    converged = False
    iterations = 0
    for _ in range(cfg.max_iters):
        dead = kern.update_centers_linear(x, u, v, n, c, m)
        if dead >= 0:
            raise DegenerateClusterError(dead)
        kern.update_membership_range(x, v, u_next, c, m, 0, n)
        delta = kern.max_abs_diff(u, u_next, 0, n * c)
        trace.append(kern.objective_linear(x, u_next, v, n, c, m))
        u, u_next = u_next, u
        iterations += 1
        if delta < cfg.epsilon:
            converged = True
            break
    return v, u, iterations, trace, converged


def _initial_buffer(img: GrayImage, cfg: FcmConfig, initial: MembershipMatrix | None) -> np.ndarray:
    if initial is None:
        return init_membership(img.pixel_count, cfg).u.copy()
    if initial.n != img.pixel_count or initial.c != cfg.c:
        raise DimensionMismatchError(
            f"initial membership is {initial.n}x{initial.c}, "
            f"expected {img.pixel_count}x{cfg.c}"
        )
    return initial.u.copy()


def run_fcm_sequential(
    img: GrayImage, cfg: FcmConfig, initial_membership: MembershipMatrix | None = None
) -> FcmResult:
    """Cluster an image with the sequential engine.

    Initializes memberships from the seed (unless an explicit start is
    given), alternates center and membership updates until the membership
    delta drops below epsilon or the iteration cap is hit, then
    defuzzifies. Non-convergence is reported via the result flag, not an
    error.
    """
    n = img.pixel_count
    if n < cfg.c:
        raise InvalidConfigError(f"need at least {cfg.c} pixels for {cfg.c} clusters, got {n}")
    u0 = _initial_buffer(img, cfg, initial_membership)
    v, u, iterations, trace, converged = _iterate(img.pixels, u0, cfg)
    membership = MembershipMatrix(n, cfg.c, u)
    labels = defuzzify(membership, img.width, img.height)
    return FcmResult(
        centers=ClusterCenters(v),
        membership=membership,
        labels=labels,
        iterations=iterations,
        objective_trace=tuple(trace),
        converged=converged,
    )
