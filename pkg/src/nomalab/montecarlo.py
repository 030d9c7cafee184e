"""Monte Carlo SIR simulator and estimators.

Two fidelity modes. FastPath mirrors the independence structure of the
analytics: scheduled-user distances from the ordered-distance law, interferers
and void boosters as independently thinned Poisson fields on the bias-scaled
plane outside the association exclusion ball. FullNetwork deploys the whole
network, runs biased association, and measures the typical BS's cell with
endogenous voids.

Randomness is counter-based (one Philox substream per trial block keyed on the
master seed and the block index), so results do not depend on worker count or
scheduling order, and merging partial runs by block id is associative.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from nomalab.analytics import MetricResult, PowerAllocation, Scheme, KIND_SIMULATED, theta_eff
from nomalab.errors import RetryBudgetError
from nomalab.geometry import (
    NetworkConfig,
    associate,
    derived_stats,
    sample_deployment,
    sample_scheduled_distances,
)

__all__ = [
    "SimMode",
    "SirSampleBatch",
    "simulate_sir_samples",
    "estimate_coverage",
    "estimate_throughput",
    "default_window_radius",
]

_BLOCK = 8192
_Z95 = 1.959963984540054
# Window radius factor: radius = 15 / sqrt(pi * intensity) keeps the truncated
# far-field interference negligible for any pathloss exponent above 2.
_WINDOW_FACTOR = 15.0


class SimMode(enum.Enum):
    FAST_PATH = "fast_path"
    FULL_NETWORK = "full_network"


@dataclass(frozen=True)
class SirSampleBatch:
    """Per-trial, per-user SIR records for one tier and scheme.

    desired_sir, fading, interference and scaled_sq_distance all have shape
    (trials, K). boost_ratio is the void-BS signal boost over interference,
    present only for the coordinated JT scheme. Within a trial, user k's
    decode conditions all share the same fading draw and interference value.
    The SIR threshold the batch was generated under rides along so the
    throughput estimator can reproduce the right conditioning events.
    """

    tier: int
    scheme: Scheme
    mode: SimMode
    theta: float
    trials: int
    seed: int
    desired_sir: np.ndarray
    fading: np.ndarray
    interference: np.ndarray
    scaled_sq_distance: np.ndarray
    boost_ratio: np.ndarray | None = None

    def __post_init__(self) -> None:
        for name in ("desired_sir", "fading", "interference", "scaled_sq_distance"):
            arr = getattr(self, name)
            if not np.all(np.isfinite(arr)) or np.any(arr < 0):
                raise ValueError(f"{name} must be non-negative and finite")
        if self.boost_ratio is not None:
            if not np.all(np.isfinite(self.boost_ratio)) or np.any(self.boost_ratio < 0):
                raise ValueError("boost_ratio must be non-negative and finite")


def _block_rng(seed: int, block: int) -> np.random.Generator:
    key = np.array([seed & 0xFFFFFFFFFFFFFFFF, block], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _annulus_power_sum(
    rng: np.random.Generator,
    intensity: float,
    r2_lo: np.ndarray,
    r2_hi: np.ndarray,
    alpha: float,
) -> np.ndarray:
    """Sum of fading-weighted pathloss marks of a Poisson field on the annulus
    (sqrt(r2_lo), sqrt(r2_hi)), one value per trial. Unit transmit power."""
    n = len(r2_lo)
    if intensity <= 0.0:
        return np.zeros(n)
    counts = rng.poisson(intensity * np.pi * (r2_hi - r2_lo))
    total = int(counts.sum())
    if total == 0:
        return np.zeros(n)
    owner = np.repeat(np.arange(n), counts)
    # Squared radii are uniform on the annulus under area measure.
    r2 = r2_lo[owner] + rng.random(total) * (r2_hi[owner] - r2_lo[owner])
    marks = rng.exponential(1.0, total) * r2 ** (-alpha / 2.0)
    return np.bincount(owner, weights=marks, minlength=n)


def _simulate_fast_block(
    config: NetworkConfig,
    alloc: PowerAllocation,
    m: int,
    scheme: Scheme,
    rng: np.random.Generator,
    n: int,
):
    stats = derived_stats(config)
    lam_total = stats.scaled_total_intensity
    alpha = config.alpha
    K = config.group_size
    jt = scheme is Scheme.COORDINATED_JT
    serving = config.tiers[m]
    base_r2 = _WINDOW_FACTOR**2 / (math.pi * lam_total)

    u2 = sample_scheduled_distances(K, lam_total, rng, size=n)
    fading = rng.exponential(1.0, (n, K))
    gamma = np.empty((n, K))
    interf = np.empty((n, K))
    boost = np.empty((n, K)) if jt else None

    for k in range(K):
        r2_lo = u2[:, k]
        r2_hi = np.maximum(base_r2, 2.0 * r2_lo)
        total_i = np.zeros(n)
        total_s = np.zeros(n)
        for l, tier in enumerate(config.tiers):
            lam_scaled = tier.bias ** (2.0 / alpha) * tier.intensity
            mark_power = tier.power / tier.bias
            nu_l = stats.nonvoid_prob[l]
            total_i += mark_power * _annulus_power_sum(
                rng, nu_l * lam_scaled, r2_lo, r2_hi, alpha
            )
            if jt and nu_l < 1.0:
                # Void BSs also lie outside the association ball: any BS with
                # a smaller scaled distance would have been the serving BS.
                total_s += mark_power * _annulus_power_sum(
                    rng, (1.0 - nu_l) * lam_scaled, r2_lo, r2_hi, alpha
                )
        if np.any(total_i == 0.0):
            raise ValueError(
                "sampled interference is zero; the non-void intensities are too "
                "small for a meaningful SIR simulation"
            )
        gamma[:, k] = (
            alloc.betas[k]
            * (serving.power / serving.bias)
            * fading[:, k]
            * r2_lo ** (-alpha / 2.0)
            / total_i
        )
        interf[:, k] = total_i
        if jt:
            boost[:, k] = total_s / total_i
    return u2, fading, gamma, interf, boost


def default_window_radius(config: NetworkConfig) -> float:
    """Deployment window for full-network simulation: sized on the sparsest
    tier so truncation bias at the origin is O(R^(2-alpha))."""
    lam_min = min(t.intensity for t in config.tiers)
    return _WINDOW_FACTOR / math.sqrt(math.pi * lam_min)


def _simulate_full(
    config: NetworkConfig,
    alloc: PowerAllocation,
    m: int,
    scheme: Scheme,
    trials: int,
    seed: int,
    window_radius: float | None,
    retry_budget: int,
):
    alpha = config.alpha
    K = config.group_size
    jt = scheme is Scheme.COORDINATED_JT
    radius = default_window_radius(config) if window_radius is None else window_radius

    u2 = np.empty((trials, K))
    fading = np.empty((trials, K))
    gamma = np.empty((trials, K))
    interf = np.empty((trials, K))
    boost = np.empty((trials, K)) if jt else None
    inv_bias_sq = config.tiers[m].bias ** (-2.0 / alpha)

    budget = retry_budget
    draw = 0
    done = 0
    while done < trials:
        rng = _block_rng(seed, draw)
        draw += 1
        dep = sample_deployment(config, radius, rng)
        # Typical tier-m BS at the origin (its presence does not disturb the
        # law of the rest of the network).
        bs_points = list(dep.bs_points)
        bs_points[m] = np.vstack([np.zeros((1, 2)), bs_points[m]])
        dep = type(dep)(radius, tuple(bs_points), dep.user_points)
        amap = associate(dep, config)
        mine = amap.members[m][0]
        if len(mine) < K:
            budget -= 1
            if budget <= 0:
                raise RetryBudgetError(
                    f"typical cell failed to collect {K} users within "
                    f"{retry_budget} redraws"
                )
            continue
        picked = rng.choice(mine, size=K, replace=False)
        pts = dep.user_points[picked]
        dist = np.hypot(pts[:, 0], pts[:, 1])
        order = np.argsort(dist)
        pts, dist = pts[order], dist[order]

        own_fade = rng.exponential(1.0, K)
        total_i = np.zeros(K)
        total_s = np.zeros(K)
        for l, tier in enumerate(config.tiers):
            bpts = dep.bs_points[l]
            if len(bpts) == 0:
                continue
            d = np.linalg.norm(pts[:, None, :] - bpts[None, :, :], axis=2)
            h = rng.exponential(1.0, d.shape)
            marks = tier.power * h * d ** (-alpha)
            busy = amap.nonvoid[l].astype(float)
            if l == m:
                busy = busy.copy()
                busy[0] = 0.0  # the serving BS never interferes with its own users
            total_i += marks @ busy
            if jt:
                idle = 1.0 - amap.nonvoid[l].astype(float)
                if l == m:
                    idle[0] = 0.0
                total_s += marks @ idle
        if np.any(total_i == 0.0):
            budget -= 1
            if budget <= 0:
                raise RetryBudgetError(
                    "no interferers landed in the window within the retry budget"
                )
            continue

        t = done
        u2[t] = dist**2 * inv_bias_sq
        fading[t] = own_fade
        gamma[t] = (
            np.asarray(alloc.betas)
            * config.tiers[m].power
            * own_fade
            * dist ** (-alpha)
            / total_i
        )
        interf[t] = total_i
        if jt:
            boost[t] = total_s / total_i
        done += 1
    return u2, fading, gamma, interf, boost


def simulate_sir_samples(
    config: NetworkConfig,
    alloc: PowerAllocation,
    m: int,
    scheme: Scheme,
    mode: SimMode,
    trials: int,
    seed: int,
    window_radius: float | None = None,
    retry_budget: int = 10_000,
) -> SirSampleBatch:
    """Draw per-trial desired-SIR records for the K scheduled users of a
    tier-m BS. Deterministic given the seed, independent of how the work is
    scheduled."""
    if trials < 1:
        raise ValueError("at least one trial is required")
    if alloc.num_users != config.group_size:
        raise ValueError("allocation length must match the configured group size")
    if not 0 <= m < config.num_tiers:
        raise IndexError(f"tier index {m} out of range")

    K = config.group_size
    jt = scheme is Scheme.COORDINATED_JT
    if mode is SimMode.FULL_NETWORK:
        u2, fading, gamma, interf, boost = _simulate_full(
            config, alloc, m, scheme, trials, seed, window_radius, retry_budget
        )
    else:
        u2 = np.empty((trials, K))
        fading = np.empty((trials, K))
        gamma = np.empty((trials, K))
        interf = np.empty((trials, K))
        boost = np.empty((trials, K)) if jt else None
        for block in range(0, trials, _BLOCK):
            n = min(_BLOCK, trials - block)
            rng = _block_rng(seed, block // _BLOCK)
            bu2, bf, bg, bi, bs = _simulate_fast_block(config, alloc, m, scheme, rng, n)
            sl = slice(block, block + n)
            u2[sl], fading[sl], gamma[sl], interf[sl] = bu2, bf, bg, bi
            if jt:
                boost[sl] = bs

    return SirSampleBatch(
        tier=m,
        scheme=scheme,
        mode=mode,
        theta=config.sir_threshold,
        trials=trials,
        seed=seed,
        desired_sir=gamma,
        fading=fading,
        interference=interf,
        scaled_sq_distance=u2,
        boost_ratio=boost,
    )


# ---------------------------------------------------------------------------
# estimators


def _wilson_halfwidth(successes: int, n: int) -> float:
    z2 = _Z95 * _Z95
    p = successes / n
    denom = 1.0 + z2 / n
    return _Z95 * math.sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom


def _decode_ok(
    batch: SirSampleBatch, alloc: PowerAllocation, theta: float, scheme: Scheme, k: int
) -> np.ndarray:
    """Trial mask: user k decodes signals k..K (boosted K-th signal under JT)."""
    betas = alloc.betas
    K = len(betas)
    g = batch.desired_sir[:, k - 1]
    bk = betas[k - 1]
    ok = np.ones(batch.trials, dtype=bool)
    jt = scheme is Scheme.COORDINATED_JT
    for l in range(k, K + 1):
        below = sum(betas[: l - 1])
        if jt and l == K:
            s = batch.boost_ratio[:, k - 1]
            ok &= betas[-1] * g / bk + s >= theta * (below * g / bk + 1.0)
        else:
            ok &= betas[l - 1] * g >= theta * (below * g + bk)
    return ok


def estimate_coverage(
    batch: SirSampleBatch, alloc: PowerAllocation, theta: float, scheme: Scheme
) -> MetricResult:
    """Empirical coverage of each user at the given threshold, with 95%
    Wilson intervals."""
    if scheme is Scheme.COORDINATED_JT and batch.boost_ratio is None:
        raise ValueError("batch carries no boost record; simulate with the JT scheme")
    if theta <= 0:
        raise ValueError("SIR threshold must be positive")
    K = alloc.num_users
    n = batch.trials
    values, hws = [], []
    for k in range(1, K + 1):
        hits = int(_decode_ok(batch, alloc, theta, scheme, k).sum())
        values.append(hits / n)
        hws.append(_wilson_halfwidth(hits, n))
    return MetricResult(
        per_user=tuple(values),
        kind=KIND_SIMULATED,
        ci_halfwidth=tuple(hws),
        n_samples=(n,) * K,
    )


def _conditional_mean(rate: np.ndarray, cond: np.ndarray):
    n = int(cond.sum())
    if n == 0:
        return math.nan, math.nan, 0
    vals = rate[cond]
    mean = float(vals.mean())
    if n == 1:
        return mean, math.nan, 1
    hw = _Z95 * float(vals.std(ddof=1)) / math.sqrt(n)
    return mean, hw, n


def estimate_throughput(
    batch: SirSampleBatch, alloc: PowerAllocation, scheme: Scheme
) -> MetricResult:
    """Per-user link throughput estimates (nats/Hz).

    Users that must perform SIC are averaged over the trials where their
    cancellation event holds (the conditioning threshold comes from the batch);
    a user whose conditioning event never occurs gets a NaN value with zero
    samples. The farthest user is averaged unconditionally.
    """
    if scheme is Scheme.COORDINATED_JT and batch.boost_ratio is None:
        raise ValueError("batch carries no boost record; simulate with the JT scheme")
    theta = batch.theta
    betas = alloc.betas
    K = alloc.num_users
    jt = scheme is Scheme.COORDINATED_JT
    all_trials = np.ones(batch.trials, dtype=bool)

    values, hws, counts = [], [], []
    for k in range(1, K + 1):
        g = batch.desired_sir[:, k - 1]
        bk = betas[k - 1]
        below = sum(betas[: k - 1])
        own_rate = np.log1p(g / (below * g / bk + 1.0))

        if K == 1:
            rate = np.log1p(g + batch.boost_ratio[:, 0]) if jt else np.log1p(g)
            cond = all_trials
        elif not jt:
            if k < K:
                th = theta_eff(alloc, theta, k + 1, K)
                cond = g >= bk * th if math.isfinite(th) else np.zeros_like(all_trials)
                rate = own_rate
            else:
                cond, rate = all_trials, own_rate
        else:
            if k <= K - 2:
                th = theta_eff(alloc, theta, k + 1, K - 1)
                cond = g >= bk * th if math.isfinite(th) else np.zeros_like(all_trials)
                rate = own_rate
            elif k == K - 1:
                # Boost-dependent cancellation threshold, written multiplied
                # out so a non-positive decode margin needs no special case.
                s = batch.boost_ratio[:, k - 1]
                margin = betas[-1] - theta * (1.0 - betas[-1])
                cond = g * margin >= bk * theta - s
                rate = own_rate
            else:
                s = batch.boost_ratio[:, k - 1]
                rate = np.log1p((g + s) / (below * g / bk + 1.0))
                cond = all_trials

        mean, hw, nn = _conditional_mean(rate, cond)
        values.append(mean)
        hws.append(hw)
        counts.append(nn)
    return MetricResult(
        per_user=tuple(values),
        kind=KIND_SIMULATED,
        ci_halfwidth=tuple(hws),
        n_samples=tuple(counts),
    )
