"""Spatial model of the network.

Multi-tier Poisson deployments on a disk, biased nearest-BS association with
its induced cell-load statistics, void-cell identification, and the
scaled-plane sampler for the ordered distances of the K scheduled users.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.spatial import cKDTree

__all__ = [
    "TierParams",
    "NetworkConfig",
    "DerivedTierStats",
    "Deployment",
    "AssociationMap",
    "derived_stats",
    "user_count_pmf",
    "sample_deployment",
    "associate",
    "sample_scheduled_distances",
]

# Shape parameter of the gamma approximation to the Poisson-Voronoi cell-size
# distribution. Fixed by the model, never refitted.
_LOAD_SHAPE = 3.5

# Above this many pairwise user/BS distances the association switches from the
# exact (tie-break-deterministic) dense path to per-tier KD-trees.
_DENSE_ASSOC_LIMIT = 2_000_000

# Resource guard for deployment sampling.
_MAX_EXPECTED_POINTS = 1e8


@dataclass(frozen=True)
class TierParams:
    """One tier of base stations: transmit power (W), spatial intensity
    (BSs per m^2) and association bias (dimensionless)."""

    power: float
    intensity: float
    bias: float = 1.0

    def __post_init__(self) -> None:
        if not (self.power > 0 and self.intensity > 0 and self.bias > 0):
            raise ValueError(
                "tier power, intensity and bias must all be strictly positive"
            )


@dataclass(frozen=True)
class NetworkConfig:
    """Full network description.

    tiers: per-tier parameters, at least one tier.
    user_intensity: users per m^2, strictly positive.
    alpha: pathloss exponent, strictly greater than 2 (finite interference).
    group_size: number K of NOMA users a BS schedules per resource block.
    sir_threshold: linear SIR decoding threshold theta.
    """

    tiers: tuple[TierParams, ...]
    user_intensity: float
    alpha: float
    group_size: int
    sir_threshold: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "tiers", tuple(self.tiers))
        if len(self.tiers) < 1:
            raise ValueError("at least one tier is required")
        if not self.alpha > 2:
            raise ValueError("pathloss exponent must exceed 2 for finite interference")
        if not self.user_intensity > 0:
            raise ValueError("user intensity must be strictly positive")
        if int(self.group_size) != self.group_size or self.group_size < 1:
            raise ValueError("group size must be an integer >= 1")
        object.__setattr__(self, "group_size", int(self.group_size))
        if not self.sir_threshold > 0:
            raise ValueError("SIR threshold must be strictly positive")

    @property
    def num_tiers(self) -> int:
        return len(self.tiers)


@dataclass(frozen=True)
class DerivedTierStats:
    """Association-induced per-tier statistics.

    cell_load: mean number of users per BS of each tier.
    nonvoid_prob: probability a BS of each tier has at least one user.
    assoc_prob: probability a user associates with each tier; sums to one.
    scaled_total_intensity: sum over tiers of bias^(2/alpha) * intensity,
        the intensity of the bias-scaled superposed process.
    """

    cell_load: tuple[float, ...]
    nonvoid_prob: tuple[float, ...]
    assoc_prob: tuple[float, ...]
    scaled_total_intensity: float


@lru_cache(maxsize=512)
def derived_stats(config: NetworkConfig) -> DerivedTierStats:
    """Cell load, non-void probability and association probability per tier."""
    exp = 2.0 / config.alpha
    scaled = np.array([t.bias**exp * t.intensity for t in config.tiers])
    total = float(scaled.sum())
    phi = scaled / total
    xi = np.array([config.user_intensity * t.bias**exp / total for t in config.tiers])
    nonvoid = -np.expm1(-_LOAD_SHAPE * np.log1p(xi / _LOAD_SHAPE))
    return DerivedTierStats(
        cell_load=tuple(float(v) for v in xi),
        nonvoid_prob=tuple(float(v) for v in nonvoid),
        assoc_prob=tuple(float(v) for v in phi),
        scaled_total_intensity=total,
    )


def user_count_pmf(config: NetworkConfig, tier: int, n: int) -> float:
    """Probability that a BS of the given tier serves exactly n users.

    Negative-binomial-type mass with shape 7/2, evaluated in log space so
    large n does not overflow the gamma functions.
    """
    if n < 0:
        raise ValueError("user count must be non-negative")
    xi = derived_stats(config).cell_load[tier]
    if xi == 0.0:
        return 1.0 if n == 0 else 0.0
    r = xi / _LOAD_SHAPE  # 2*xi/7
    log_p = (
        math.lgamma(n + _LOAD_SHAPE)
        - math.lgamma(n + 1.0)
        - math.lgamma(_LOAD_SHAPE)
        + n * math.log(r)
        - (n + _LOAD_SHAPE) * math.log1p(r)
    )
    return math.exp(log_p)


@dataclass(frozen=True)
class Deployment:
    """One realization of the network layout on a disk around the origin."""

    window_radius: float
    bs_points: tuple[np.ndarray, ...]  # per tier, shape (n_m, 2)
    user_points: np.ndarray  # shape (n_users, 2)


def _uniform_disk(n: int, radius: float, rng: np.random.Generator) -> np.ndarray:
    # r = R*sqrt(U) gives uniform area density.
    r = radius * np.sqrt(rng.random(n))
    ang = rng.random(n) * (2.0 * np.pi)
    return np.column_stack((r * np.cos(ang), r * np.sin(ang)))


def sample_deployment(
    config: NetworkConfig, window_radius: float, rng: np.random.Generator
) -> Deployment:
    """Draw one Poisson realization of all tiers plus the user process.

    Counts are Poisson(intensity * disk area), positions i.i.d. uniform on the
    disk. Rejects windows whose expected point count exceeds the resource guard.
    """
    if window_radius <= 0:
        raise ValueError("window radius must be positive")
    area = math.pi * window_radius**2
    expected = [t.intensity * area for t in config.tiers]
    expected.append(config.user_intensity * area)
    if max(expected) > _MAX_EXPECTED_POINTS:
        raise ValueError(
            f"expected point count {max(expected):.3g} exceeds the "
            f"{_MAX_EXPECTED_POINTS:.0e} resource guard; shrink the window"
        )
    bs = tuple(
        _uniform_disk(rng.poisson(t.intensity * area), window_radius, rng)
        for t in config.tiers
    )
    users = _uniform_disk(rng.poisson(config.user_intensity * area), window_radius, rng)
    return Deployment(window_radius=window_radius, bs_points=bs, user_points=users)


@dataclass(frozen=True)
class AssociationMap:
    """Outcome of biased nearest-BS association for one deployment.

    user_tier / user_index: per-user assigned BS, parallel arrays.
    members: per tier, per BS, array of associated user indices.
    nonvoid: per tier, boolean array; True iff the BS serves at least one user.
    """

    user_tier: np.ndarray
    user_index: np.ndarray
    members: tuple[tuple[np.ndarray, ...], ...]
    nonvoid: tuple[np.ndarray, ...]


def associate(deployment: Deployment, config: NetworkConfig) -> AssociationMap:
    """Assign every user to the BS maximizing bias * distance^(-alpha).

    Equivalent to minimizing distance / bias^(1/alpha). Ties (probability zero
    under the continuous model, reachable with synthetic inputs) go to the
    lowest (tier, index) pair; the dense small-problem path guarantees this
    exactly, the KD-tree path guarantees it across tiers only.
    """
    n_bs = [len(p) for p in deployment.bs_points]
    if sum(n_bs) == 0:
        raise ValueError("association requires at least one base station")
    users = np.asarray(deployment.user_points, dtype=float).reshape(-1, 2)
    n_users = len(users)
    inv_bias = [t.bias ** (-1.0 / config.alpha) for t in config.tiers]

    if n_users == 0:
        tier_pick = np.empty(0, dtype=np.int64)
        index_pick = np.empty(0, dtype=np.int64)
    elif n_users * sum(n_bs) <= _DENSE_ASSOC_LIMIT:
        # Columns laid out in (tier, index) order; argmin takes the first
        # minimum, which realizes the tie-break.
        cols = np.concatenate(
            [
                np.linalg.norm(users[:, None, :] - pts[None, :, :], axis=2) * inv_bias[l]
                for l, pts in enumerate(deployment.bs_points)
                if len(pts)
            ],
            axis=1,
        )
        flat = np.argmin(cols, axis=1)
        col_tier = np.concatenate(
            [np.full(nb, l, dtype=np.int64) for l, nb in enumerate(n_bs) if nb]
        )
        col_index = np.concatenate(
            [np.arange(nb, dtype=np.int64) for nb in n_bs if nb]
        )
        tier_pick = col_tier[flat]
        index_pick = col_index[flat]
    else:
        best = np.full((config.num_tiers, n_users), np.inf)
        idx = np.zeros((config.num_tiers, n_users), dtype=np.int64)
        for l, pts in enumerate(deployment.bs_points):
            if len(pts) == 0:
                continue
            d, i = cKDTree(pts).query(users)
            best[l] = d * inv_bias[l]
            idx[l] = i
        tier_pick = np.argmin(best, axis=0)
        index_pick = idx[tier_pick, np.arange(n_users)]

    members: list[tuple[np.ndarray, ...]] = []
    nonvoid: list[np.ndarray] = []
    for l, nb in enumerate(n_bs):
        if nb == 0:
            members.append(())
            nonvoid.append(np.zeros(0, dtype=bool))
            continue
        sel = np.flatnonzero(tier_pick == l)
        order = sel[np.argsort(index_pick[sel], kind="stable")]
        counts = np.bincount(index_pick[sel], minlength=nb)
        members.append(tuple(np.split(order, np.cumsum(counts)[:-1])))
        nonvoid.append(counts > 0)
    return AssociationMap(
        user_tier=tier_pick,
        user_index=index_pick,
        members=tuple(members),
        nonvoid=tuple(nonvoid),
    )


def sample_scheduled_distances(
    K: int,
    scaled_total_intensity: float,
    rng: np.random.Generator,
    size: int | None = None,
):
    """Squared bias-scaled distances of the K scheduled users, ordered.

    The k-th value is a cumulative sum of independent exponentials with rates
    (K - j) * pi * scaled_total_intensity for j = 0..k-1, which reproduces the
    joint law of the K nearest points of the scaled superposed process.

    Returns shape (K,) by default or (size, K) when size is given.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    if not scaled_total_intensity > 0:
        raise ValueError("scaled total intensity must be positive")
    rates = np.arange(K, 0, -1) * (math.pi * scaled_total_intensity)
    if size is None:
        return np.cumsum(rng.exponential(1.0 / rates))
    gaps = rng.exponential(1.0 / rates, size=(size, K))
    return np.cumsum(gaps, axis=1)
