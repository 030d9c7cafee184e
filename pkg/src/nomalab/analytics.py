"""Closed-form coverage and link-throughput analytics.

Everything here is a deterministic function of a NetworkConfig and a
PowerAllocation: the two interference functionals (the busy-BS weight and the
void-BS correction), the SIC effective threshold, SIR CCDF bounds, per-user
coverage and throughput for the non-coordinated and coordinated
joint-transmission schemes, and the per-tier cell-level objectives.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from nomalab.errors import IntegrationError
from nomalab.geometry import NetworkConfig, derived_stats
from nomalab.quadrature import integrate, integrate_semi_infinite

__all__ = [
    "PowerAllocation",
    "Scheme",
    "MetricResult",
    "ell",
    "ell_tilde",
    "theta_eff",
    "ccdf_desired_sir",
    "coverage_noncoord",
    "coverage_jt",
    "throughput_noncoord",
    "throughput_jt",
    "single_user_throughput",
    "cell_coverage",
    "cell_throughput",
    "KIND_ANALYTIC_BOUND",
    "KIND_ANALYTIC_APPROX",
    "KIND_ANALYTIC_LIMIT",
    "KIND_SIMULATED",
]

KIND_ANALYTIC_BOUND = "analytic_bound"
KIND_ANALYTIC_APPROX = "analytic_approx"
KIND_ANALYTIC_LIMIT = "analytic_limit"
KIND_SIMULATED = "simulated"
_KINDS = (
    KIND_ANALYTIC_BOUND,
    KIND_ANALYTIC_APPROX,
    KIND_ANALYTIC_LIMIT,
    KIND_SIMULATED,
)

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class PowerAllocation:
    """Power fractions of the K scheduled users, nearest first.

    Fractions are non-decreasing (farther users get at least as much power),
    each in (0, 1], and sum to one. Whether an allocation additionally
    satisfies the scheme-specific decoding constraints is a feasibility
    question answered by `poweropt.feasible`, not a type invariant: boundary
    allocations such as [0.5, 0.5] are representable precisely so the model
    can evaluate to zero coverage there.
    """

    betas: tuple[float, ...]

    def __post_init__(self) -> None:
        betas = tuple(float(b) for b in self.betas)
        object.__setattr__(self, "betas", betas)
        if len(betas) < 1:
            raise ValueError("at least one power fraction is required")
        for b in betas:
            if not (0.0 < b <= 1.0):
                raise ValueError("each power fraction must lie in (0, 1]")
        for a, b in zip(betas, betas[1:]):
            if b < a:
                raise ValueError("power fractions must be non-decreasing")
        if abs(sum(betas) - 1.0) > _SUM_TOL:
            raise ValueError("power fractions must sum to one")

    @property
    def num_users(self) -> int:
        return len(self.betas)


class Scheme(enum.Enum):
    NON_COORDINATED = "non_coordinated"
    COORDINATED_JT = "coordinated_jt"


@dataclass(frozen=True)
class MetricResult:
    """Per-user metric values with provenance.

    kind tags whether the values come from a closed-form lower bound, an
    approximation, a dense-user limit, or a Monte Carlo estimate. Simulated
    results carry a CI half-width and the number of contributing samples;
    a NaN value with zero samples marks an undefined conditional estimate.
    """

    per_user: tuple[float, ...]
    kind: str
    ci_halfwidth: tuple[float, ...] | None = None
    n_samples: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "per_user", tuple(float(v) for v in self.per_user))
        if self.kind not in _KINDS:
            raise ValueError(f"unknown result kind {self.kind!r}")
        for v in self.per_user:
            if not math.isnan(v) and v < 0.0:
                raise ValueError("metric values must be non-negative")
        if self.ci_halfwidth is not None:
            object.__setattr__(
                self, "ci_halfwidth", tuple(float(v) for v in self.ci_halfwidth)
            )
        if self.n_samples is not None:
            object.__setattr__(
                self, "n_samples", tuple(int(v) for v in self.n_samples)
            )


# ---------------------------------------------------------------------------
# interference functionals


def _pair_ratio(config: NetworkConfig, m: int, l: int, x: float):
    """Scaled power/bias ratio r = (x w_m P_l / (w_l P_m))^(2/alpha) and the
    inner integration limit t0 = 1/r."""
    tm, tl = config.tiers[m], config.tiers[l]
    base = x * tm.bias * tl.power / (tl.bias * tm.power)
    r = base ** (2.0 / config.alpha)
    return r, 1.0 / r


# The inner 1D integrals below are cheap and smooth, and the reduction and
# limit identities built on them are checked at 1e-12; run them well past the
# package-wide 1e-8 budget so those identities are not quadrature-limited.
_INNER_REL = 1e-11
_INNER_ABS = 1e-14


def _tail_reciprocal_pathloss(t0: float, alpha: float) -> float:
    # integral of dt/(1 + t^(alpha/2)) over (t0, inf)
    if alpha == 4.0:
        return math.pi / 2.0 - math.atan(t0)
    p = alpha / 2.0
    c = 1.0 / (p - 1.0)
    q = p * c
    # Substituting t -> 1/u and then u -> s^(1/(p-1)) removes both the
    # infinite range and the u^(p-2) endpoint behavior; what remains is
    # smooth on a finite interval.
    if t0 >= 1.0:
        return c * integrate(
            lambda s: 1.0 / (1.0 + s**q), 0.0, t0 ** (1.0 - p), _INNER_REL, _INNER_ABS
        )
    head = integrate(lambda t: 1.0 / (1.0 + t**p), t0, 1.0, _INNER_REL, _INNER_ABS)
    return head + c * integrate(
        lambda s: 1.0 / (1.0 + s**q), 0.0, 1.0, _INNER_REL, _INNER_ABS
    )


def _fading_excess_tail(t0: float, alpha: float) -> float:
    # integral of E[1 - exp(t^(-alpha/2) H)] = -1/(t^(alpha/2) - 1) over
    # (t0, inf); finite and negative for t0 > 1.
    if alpha == 4.0:
        return 0.5 * math.log((t0 - 1.0) / (t0 + 1.0))
    p = alpha / 2.0
    c = 1.0 / (p - 1.0)
    q = p * c
    ub = t0 ** (1.0 - p)  # < 1; the integrand pole sits at s = 1
    return -c * integrate(lambda s: 1.0 / (1.0 - s**q), 0.0, ub, _INNER_REL, _INNER_ABS)


def _fading_excess_tail_pv(t0: float, alpha: float) -> float:
    """Principal-value continuation of `_fading_excess_tail` across the t = 1
    pole, for 0 < t0 < 1. Diverges logarithmically (to -inf) as t0 -> 1."""
    if alpha == 4.0:
        return 0.5 * math.log(abs(t0 - 1.0) / (t0 + 1.0))
    p = alpha / 2.0
    limit0 = (p - 1.0) / p  # value of the paired integrand at the pole

    def paired(s: float) -> float:
        # g(1-s) + g(1+s) with g(t) = -1/(t^p - 1); the 1/s singularities
        # cancel, leaving a smooth even function.
        if s < 1e-6:
            return limit0
        return -1.0 / ((1.0 - s) ** p - 1.0) - 1.0 / ((1.0 + s) ** p - 1.0)

    head = integrate(paired, 0.0, 1.0 - t0, _INNER_REL, _INNER_ABS)
    return head + _fading_excess_tail(2.0 - t0, alpha)


def ell(config: NetworkConfig, m: int, l: int, x: float) -> float:
    """Interference weight of busy tier-l BSs seen by a user served by tier m.

    Strictly increasing in x, vanishing as x -> 0+. The alpha = 4 case uses
    the arctan closed form; other exponents go through adaptive quadrature.
    """
    if x <= 0:
        raise ValueError("the interference weight is defined for x > 0 only")
    phi = derived_stats(config).assoc_prob[l]
    r, t0 = _pair_ratio(config, m, l, x)
    return phi * r * _tail_reciprocal_pathloss(t0, config.alpha)


def ell_tilde(config: NetworkConfig, m: int, l: int, x: float) -> float:
    """Void-BS correction weight: the reduction in outage pressure due to
    tier-l void BSs jointly transmitting the far user's signal.

    Non-positive. Finite only while the inner limit t0 exceeds one; beyond
    that the underlying fading expectation diverges and the function returns
    -inf as a sentinel (callers clamp).
    """
    if x <= 0:
        raise ValueError("the void correction weight is defined for x > 0 only")
    phi = derived_stats(config).assoc_prob[l]
    r, t0 = _pair_ratio(config, m, l, x)
    if t0 <= 1.0:
        return -math.inf
    return phi * r * _fading_excess_tail(t0, config.alpha)


def _ell_tilde_pv(config: NetworkConfig, m: int, l: int, x: float) -> float:
    # Principal-value continuation of ell_tilde across t0 <= 1, used by the
    # far-user JT kernels where the as-written expectation diverges for every
    # admissible argument. Bounded except at the t0 = 1 pole itself.
    phi = derived_stats(config).assoc_prob[l]
    r, t0 = _pair_ratio(config, m, l, x)
    if t0 == 1.0:
        return -math.inf
    if t0 > 1.0:
        return phi * r * _fading_excess_tail(t0, config.alpha)
    return phi * r * _fading_excess_tail_pv(t0, config.alpha)


# ---------------------------------------------------------------------------
# SIC effective threshold and CCDF


def theta_eff(
    alloc: PowerAllocation, theta: float, k: int, J: int | None = None
) -> float:
    """Effective SIR threshold for user k decoding the signals of users
    k..J under SIC: the binding threshold over that decode chain.

    Returns +inf when some link in the chain is undecodable regardless of
    SIR (its power margin over the accumulated NOMA interference is gone).
    """
    if theta <= 0:
        raise ValueError("SIR threshold must be positive")
    K = alloc.num_users
    if J is None:
        J = K
    if not (1 <= k <= J <= K):
        raise IndexError(f"need 1 <= k <= J <= K, got k={k}, J={J}, K={K}")
    betas = alloc.betas
    prefix = sum(betas[: k - 1])
    worst = 0.0
    for idx in range(k, J + 1):
        margin = betas[idx - 1] - theta * prefix
        if margin <= 0.0:
            return math.inf
        worst = max(worst, theta / margin)
        prefix += betas[idx - 1]
    return worst


def _check_args(config: NetworkConfig, alloc: PowerAllocation, m: int, k: int) -> None:
    if alloc.num_users != config.group_size:
        raise ValueError(
            f"allocation has {alloc.num_users} fractions, config schedules "
            f"{config.group_size} users"
        )
    if not 0 <= m < config.num_tiers:
        raise IndexError(f"tier index {m} out of range")
    if not 1 <= k <= config.group_size:
        raise IndexError(f"user index {k} out of range 1..{config.group_size}")


def _nu_values(config: NetworkConfig, void_aware: bool) -> tuple[float, ...]:
    if void_aware:
        return derived_stats(config).nonvoid_prob
    return (1.0,) * config.num_tiers


def _interference_mass(
    config: NetworkConfig, m: int, x: float, nu: tuple[float, ...]
) -> float:
    return sum(nu[l] * ell(config, m, l, x) for l in range(config.num_tiers))


def _chain_product(K: int, k: int, mass: float) -> float:
    out = 1.0
    for j in range(k):
        out *= (K - j) / ((K - j) + mass)
    return out


def ccdf_desired_sir(
    config: NetworkConfig,
    alloc: PowerAllocation,
    m: int,
    k: int,
    x: float,
    void_aware: bool = True,
) -> float:
    """Lower bound on P[desired SIR of the k-th user >= x].

    void_aware=False substitutes non-void probability one for every tier,
    the dense-user limit of the bound.
    """
    _check_args(config, alloc, m, k)
    if x <= 0:
        raise ValueError("the CCDF argument must be positive")
    nu = _nu_values(config, void_aware)
    mass = _interference_mass(config, m, x / alloc.betas[k - 1], nu)
    return _chain_product(config.group_size, k, mass)


# ---------------------------------------------------------------------------
# coverage


def coverage_noncoord(
    config: NetworkConfig,
    alloc: PowerAllocation,
    m: int,
    k: int,
    void_aware: bool = True,
) -> float:
    """Coverage of the k-th nearest scheduled user, non-coordinated scheme."""
    _check_args(config, alloc, m, k)
    th = theta_eff(alloc, config.sir_threshold, k, config.group_size)
    if math.isinf(th):
        return 0.0
    nu = _nu_values(config, void_aware)
    mass = _interference_mass(config, m, th, nu)
    return _chain_product(config.group_size, k, mass)


def _jt_far_user_coverage(
    config: NetworkConfig,
    alloc: PowerAllocation,
    m: int,
    nu: tuple[float, ...],
    threshold: float,
) -> float:
    """Far-user coverage under joint transmission, evaluated at an arbitrary
    SIR threshold. Shared by the JT coverage and the far-user throughput
    integrand (which integrates this expression over its threshold)."""
    K = alloc.num_users
    beta_far = alloc.betas[-1]
    margin = beta_far - threshold * (1.0 - beta_far)
    if margin <= 0.0:
        return 0.0
    th_eff = threshold / margin
    mass = _interference_mass(config, m, th_eff, nu)
    for l in range(config.num_tiers):
        coeff = 1.0 - nu[l]
        # Skip fully loaded tiers: no void BSs, and 0 * (-inf) must not occur.
        if coeff > 0.0:
            mass += coeff * _ell_tilde_pv(config, m, l, 1.0 / margin)
    bracket = max(mass, 0.0)
    return _chain_product(K, K, bracket)


def coverage_jt(
    config: NetworkConfig,
    alloc: PowerAllocation,
    m: int,
    k: int,
    void_aware: bool = True,
) -> float:
    """Coverage of the k-th user under coordinated joint transmission.

    Users below the K-th enjoy a shortened decode chain (the far user's
    signal is reinforced by every void BS, so its decodability no longer
    binds); the K-th user gets the void-correction bracket. With a single
    scheduled user the void correction sits exactly on its pole for every
    admissible allocation, so the sole-user (non-coordinated) expression is
    returned instead.
    """
    _check_args(config, alloc, m, k)
    K = config.group_size
    if K == 1:
        return coverage_noncoord(config, alloc, m, k, void_aware)
    nu = _nu_values(config, void_aware)
    if k < K:
        th = theta_eff(alloc, config.sir_threshold, k, K - 1)
        if math.isinf(th):
            return 0.0
        mass = _interference_mass(config, m, th, nu)
        return _chain_product(K, k, mass)
    return _jt_far_user_coverage(config, alloc, m, nu, config.sir_threshold)


# ---------------------------------------------------------------------------
# throughput


def _sic_user_throughput(
    config: NetworkConfig,
    alloc: PowerAllocation,
    m: int,
    k: int,
    depth: int,
    th_next: float,
    nu: tuple[float, ...],
) -> float:
    # Conditional throughput of a user that must first cancel the farther
    # signals: closed-form floor plus the integral of the conditional CCDF,
    # with `depth` chain factors (depth - j).
    betas = alloc.betas
    beta_k = betas[k - 1]
    sum_thru_k = sum(betas[:k])
    sum_below_k = sum(betas[: k - 1])
    mass_at_cond = _interference_mass(config, m, th_next, nu)

    numerator = 1.0
    for j in range(k):
        numerator *= (depth - j) + mass_at_cond

    def integrand(y: float) -> float:
        mass_y = _interference_mass(config, m, y, nu)
        den = 1.0
        for j in range(k):
            den *= (depth - j) + mass_y
        frac = beta_k / ((1.0 + y * sum_thru_k) * (1.0 + y * sum_below_k))
        return (numerator / den) * frac

    tail = integrate_semi_infinite(integrand, th_next)
    floor = math.log1p(beta_k * th_next / (th_next * sum_below_k + 1.0))
    return tail + floor


def _tail_user_throughput(
    config: NetworkConfig,
    m: int,
    nu: tuple[float, ...],
    depth: int,
    beta_top: float,
) -> float:
    # Unconditional throughput of the last user of a `depth`-user chain whose
    # own power fraction is beta_top. No SIC floor: the rate can be
    # arbitrarily small.
    scale = 1.0 / (1.0 - beta_top)

    def integrand(y: float) -> float:
        mass_y = _interference_mass(config, m, y, nu)
        mass_s = _interference_mass(config, m, y * scale, nu)
        cov = 1.0
        inner = 1.0
        for j in range(depth):
            cov *= (depth - j) / ((depth - j) + mass_y)
            inner *= ((depth - j) + mass_y) / ((depth - j) + mass_s)
        return cov * (1.0 - inner) / (1.0 + y)

    return integrate_semi_infinite(integrand, 0.0)


def throughput_noncoord(
    config: NetworkConfig, alloc: PowerAllocation, m: int, k: int
) -> float:
    """Link throughput (nats/Hz) of the k-th user, non-coordinated scheme.

    Zero when the user's own decode chain is infeasible at the configured
    threshold: a user that cannot complete SIC never transmits usefully.
    """
    _check_args(config, alloc, m, k)
    K = config.group_size
    theta = config.sir_threshold
    if K == 1:
        return single_user_throughput(config, m)
    if math.isinf(theta_eff(alloc, theta, k, K)):
        return 0.0
    nu = derived_stats(config).nonvoid_prob
    if k < K:
        th_next = theta_eff(alloc, theta, k + 1, K)
        return _sic_user_throughput(config, alloc, m, k, K, th_next, nu)
    return _tail_user_throughput(config, m, nu, K, alloc.betas[-1])


def throughput_jt(
    config: NetworkConfig, alloc: PowerAllocation, m: int, k: int
) -> float:
    """Link throughput (nats/Hz) of the k-th user under coordinated joint
    transmission. The (K-1)-th user's chain shortens to depth K-1; the K-th
    user's throughput integrates its jointly-reinforced coverage over the
    threshold up to the point where its power margin closes."""
    _check_args(config, alloc, m, k)
    K = config.group_size
    theta = config.sir_threshold
    if K == 1:
        return single_user_throughput(config, m)
    nu = derived_stats(config).nonvoid_prob
    if k < K:
        if math.isinf(theta_eff(alloc, theta, k, K - 1)):
            return 0.0
        if k <= K - 2:
            th_next = theta_eff(alloc, theta, k + 1, K - 1)
            return _sic_user_throughput(config, alloc, m, k, K - 1, th_next, nu)
        return _tail_user_throughput(config, m, nu, K - 1, alloc.betas[K - 2])

    beta_far = alloc.betas[-1]
    upper = beta_far / (1.0 - beta_far)

    def integrand(y: float) -> float:
        return _jt_far_user_coverage(config, alloc, m, nu, y) / (1.0 + y)

    return integrate(integrand, 0.0, upper)


def single_user_throughput(config: NetworkConfig, m: int) -> float:
    """Throughput of a BS serving one user with full power (the OMA baseline)."""
    if not 0 <= m < config.num_tiers:
        raise IndexError(f"tier index {m} out of range")
    nu = derived_stats(config).nonvoid_prob
    if max(nu) <= 1e-100:
        # Interference-free network: the rate integral grows without bound.
        raise IntegrationError(
            "sole-user throughput diverges: every tier's non-void probability "
            "is numerically zero"
        )

    def integrand(y: float) -> float:
        return 1.0 / ((1.0 + y) * (1.0 + _interference_mass(config, m, y, nu)))

    return integrate_semi_infinite(integrand, 0.0)


# ---------------------------------------------------------------------------
# cell-level objectives


def cell_coverage(
    config: NetworkConfig, alloc: PowerAllocation, m: int, scheme: Scheme
) -> float:
    """Average per-user coverage in a tier-m cell."""
    cov = coverage_noncoord if scheme is Scheme.NON_COORDINATED else coverage_jt
    K = config.group_size
    return sum(cov(config, alloc, m, k) for k in range(1, K + 1)) / K


def cell_throughput(
    config: NetworkConfig, alloc: PowerAllocation, m: int, scheme: Scheme
) -> float:
    """Effective cell throughput of a tier-m BS (nats/Hz).

    Sums the per-user link throughputs, with each SIC-conditioned user's
    conditional rate weighted by the probability that its cancellation event
    actually occurs. An unweighted sum would reward pushing the allocation
    toward the feasibility boundary, where the conditional rate grows without
    bound while the event it is conditioned on becomes vanishingly rare; the
    weighted objective vanishes there instead, which is what makes the
    interior maximum over the power split meaningful.
    """
    thr = throughput_noncoord if scheme is Scheme.NON_COORDINATED else throughput_jt
    K = config.group_size
    theta = config.sir_threshold
    nu = derived_stats(config).nonvoid_prob
    # Users below `depth` decode conditionally; the rest are unconditional.
    depth = K if scheme is Scheme.NON_COORDINATED else max(K - 1, 1)
    total = 0.0
    for k in range(1, K + 1):
        c = thr(config, alloc, m, k)
        if c == 0.0:
            continue
        weight = 1.0
        if k < depth:
            th_next = theta_eff(alloc, theta, k + 1, depth)
            if math.isinf(th_next):
                continue
            mass = _interference_mass(config, m, th_next, nu)
            weight = _chain_product(depth, k, mass)
        total += weight * c
    return total
