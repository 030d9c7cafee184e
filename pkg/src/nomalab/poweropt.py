"""Power allocation feasibility and search.

The decode chains impose strict margins on the split: under non-coordinated
operation every user l must receive enough of the budget to survive the
accumulated intra-cell interference of the weaker-indexed signals, and under
coordinated JT the farthest user's share must additionally dominate each
near user's own share plus the residual chain. The feasible region is an open
polytope in the simplex; optimization walks a simplex lattice and optionally
refines with a sum-preserving pattern search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from nomalab.analytics import (
    PowerAllocation,
    Scheme,
    cell_coverage,
    cell_throughput,
)
from nomalab.errors import SpecError
from nomalab.geometry import NetworkConfig

__all__ = [
    "Feasibility",
    "FeasibleRegion",
    "OptResult",
    "feasible",
    "feasible_region",
    "optimize_cell_coverage",
    "optimize_cell_throughput",
]

_DEFAULT_STEPS = {1: 1.0, 2: 0.01, 3: 0.02}
_COARSE_STEP = 0.05
_PATTERN_STOP = 1e-5
_GRID_MARGIN = 1e-9


@dataclass(frozen=True)
class Feasibility:
    """Outcome of a feasibility check; falsy when infeasible, with the first
    violated constraint spelled out."""

    ok: bool
    violation: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def _betas_of(alloc) -> tuple[float, ...]:
    if isinstance(alloc, PowerAllocation):
        return alloc.betas
    return tuple(float(b) for b in alloc)


def _margins(betas: Sequence[float], theta: float, scheme: Scheme):
    """Yield (slack, description) for every strict constraint of the scheme.

    Slack is the amount by which the constraint holds; feasibility requires
    every slack to be strictly positive.
    """
    K = len(betas)
    if scheme is Scheme.NON_COORDINATED:
        for l in range(1, K + 1):
            below = sum(betas[: l - 1])
            yield (
                betas[l - 1] - theta * below,
                f"user {l} decode margin: beta[{l}] > theta * sum(beta[1..{l - 1}])",
            )
    else:
        for l in range(1, K):
            chain = sum(betas[l - 1 : K - 1])
            yield (
                betas[K - 1] - betas[l - 1] - theta * chain,
                f"JT margin at user {l}: beta[{K}] > beta[{l}] "
                f"+ theta * sum(beta[{l}..{K - 1}])",
            )
        yield (
            betas[K - 1] - theta * sum(betas[: K - 1]),
            f"far-user decode margin: beta[{K}] > theta * sum(beta[1..{K - 1}])",
        )


def feasible(alloc, theta: float, scheme: Scheme | str) -> Feasibility:
    """Check the strict decode-margin constraints of a power split."""
    if theta <= 0:
        raise ValueError("SIR threshold must be positive")
    scheme = Scheme(scheme)
    betas = _betas_of(alloc)
    for slack, desc in _margins(betas, theta, scheme):
        if slack <= 0.0:
            return Feasibility(False, f"{desc} (slack {slack:.6g})")
    return Feasibility(True)


@dataclass(frozen=True)
class FeasibleRegion:
    """The open polytope of workable splits for a group size, threshold and
    scheme. constraints lists the strict inequalities in readable form."""

    scheme: Scheme
    theta: float
    group_size: int
    constraints: tuple[str, ...] = field(default=())

    def contains(self, betas: Sequence[float], margin: float = 0.0) -> bool:
        b = tuple(float(v) for v in betas)
        if len(b) != self.group_size:
            raise ValueError("allocation length must match the region's group size")
        return all(slack > margin for slack, _ in _margins(b, self.theta, self.scheme))


def feasible_region(group_size: int, theta: float, scheme: Scheme | str) -> FeasibleRegion:
    if group_size < 1:
        raise ValueError("group size must be at least 1")
    if theta <= 0:
        raise ValueError("SIR threshold must be positive")
    scheme = Scheme(scheme)
    probe = [1.0 / group_size] * group_size
    descs = tuple(desc for _, desc in _margins(probe, theta, scheme))
    return FeasibleRegion(scheme, theta, group_size, descs)


@dataclass(frozen=True)
class OptResult:
    best_alloc: PowerAllocation
    best_value: float
    evaluations: int
    method: str


def _lattice_points(K: int, cells: int):
    """Non-decreasing positive integer K-tuples summing to `cells`, emitted
    in lexicographic order so ties resolve to the smallest vector."""
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], remaining: int, minimum: int, slots: int) -> None:
        if slots == 1:
            if remaining >= minimum:
                out.append(tuple(prefix + [remaining]))
            return
        p = minimum
        while p * slots <= remaining:
            rec(prefix + [p], remaining - p, p, slots - 1)
            p += 1

    rec([], cells, 1, K)
    return out


def _ordered_positive(betas: np.ndarray) -> bool:
    if np.any(betas <= 0.0):
        return False
    return bool(np.all(np.diff(betas) >= 0.0))


def _search(
    config: NetworkConfig,
    m: int,
    scheme: Scheme,
    method: str,
    resolution: float | None,
    objective: Callable[[PowerAllocation], float],
) -> OptResult:
    if method not in ("grid", "pattern"):
        raise ValueError(f"unknown optimization method {method!r}")
    K = config.group_size
    theta = config.sir_threshold
    region = feasible_region(K, theta, scheme)

    if K == 1:
        alloc = PowerAllocation((1.0,))
        return OptResult(alloc, objective(alloc), 1, method)

    step = resolution if resolution is not None else _DEFAULT_STEPS.get(K, _COARSE_STEP)
    if not 0.0 < step < 1.0:
        raise ValueError("resolution must lie in (0, 1)")
    cells = max(K, round(1.0 / step))

    evaluations = 0
    best_val = -math.inf
    best_beta: np.ndarray | None = None
    for point in _lattice_points(K, cells):
        betas = np.asarray(point, dtype=float) / cells
        if not region.contains(betas, margin=_GRID_MARGIN):
            continue
        val = objective(PowerAllocation(betas))
        evaluations += 1
        if val > best_val:
            best_val, best_beta = val, betas
    if best_beta is None:
        raise SpecError(
            f"no feasible power split on the step-{1.0 / cells:.4g} lattice for "
            f"theta={theta:.6g}, K={K}, scheme={scheme.value}; the threshold is "
            "too demanding for this group size"
        )

    if method == "pattern":
        # Sum-preserving moves: shift mass between a pair of users.
        pairs = [(i, j) for i in range(K) for j in range(K) if i != j]
        span = 1.0 / cells
        while span >= _PATTERN_STOP:
            improved = False
            for i, j in pairs:
                cand = best_beta.copy()
                cand[i] += span
                cand[j] -= span
                if not _ordered_positive(cand):
                    continue
                if not region.contains(cand, margin=_GRID_MARGIN):
                    continue
                val = objective(PowerAllocation(cand))
                evaluations += 1
                if val > best_val:
                    best_val, best_beta = val, cand
                    improved = True
            if not improved:
                span /= 2.0

    return OptResult(PowerAllocation(best_beta), best_val, evaluations, method)


def optimize_cell_coverage(
    config: NetworkConfig,
    m: int,
    scheme: Scheme | str,
    method: str = "pattern",
    resolution: float | None = None,
) -> OptResult:
    """Maximize the mean per-user coverage probability of a tier-m cell over
    the feasible power splits."""
    scheme = Scheme(scheme)
    return _search(
        config,
        m,
        scheme,
        method,
        resolution,
        lambda alloc: cell_coverage(config, alloc, m, scheme),
    )


def optimize_cell_throughput(
    config: NetworkConfig,
    m: int,
    scheme: Scheme | str,
    method: str = "pattern",
    resolution: float | None = None,
) -> OptResult:
    """Maximize the summed link throughput of a tier-m cell over the feasible
    power splits."""
    scheme = Scheme(scheme)
    return _search(
        config,
        m,
        scheme,
        method,
        resolution,
        lambda alloc: cell_throughput(config, alloc, m, scheme),
    )
