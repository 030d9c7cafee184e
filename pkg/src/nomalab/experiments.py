"""Declarative experiment runner: sweeps, built-in recipes, tabular output.

An ExperimentSpec pins a network, an allocation policy, the schemes and
metric sources to evaluate, and exactly one swept variable. run_experiment
evaluates every sweep point (optionally in parallel), collects one row per
(sweep value, tier, user, scheme, source) and serializes plot-ready CSV or
JSON plus a JSON sidecar carrying the resolved spec, feasibility warnings
and any optimizer results.

Identical spec + seed gives byte-identical data files regardless of the
worker count: per-point random streams are derived from the root seed and
the point index alone, and rows are sorted before writing. The timestamp
lives only in the sidecar.
"""

from __future__ import annotations

import csv
import dataclasses
import hashlib
import io
import json
import math
import os
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from nomalab import __version__
from nomalab.analytics import (
    PowerAllocation,
    Scheme,
    cell_coverage,
    cell_throughput,
    coverage_jt,
    coverage_noncoord,
    single_user_throughput,
    throughput_jt,
    throughput_noncoord,
)
from nomalab.errors import SpecError
from nomalab.geometry import NetworkConfig, TierParams
from nomalab.montecarlo import (
    SimMode,
    estimate_coverage,
    estimate_throughput,
    simulate_sir_samples,
)
from nomalab.poweropt import (
    feasible,
    optimize_cell_coverage,
    optimize_cell_throughput,
)

__all__ = [
    "COLUMNS",
    "JOBS_ENV_VAR",
    "ExperimentSpec",
    "ResultTable",
    "RunResult",
    "SweepSpec",
    "describe_spec",
    "load_spec",
    "recipe_names",
    "recipe_spec",
    "run_experiment",
    "spec_from_dict",
]

JOBS_ENV_VAR = "NOMALAB_JOBS"

# user == 0 marks a cell-level aggregate row; real users are 1-based.
CELL_AGGREGATE_USER = 0
SCHEME_SINGLE_USER = "single_user"

COLUMNS = (
    "sweep_variable",
    "sweep_value",
    "tier",
    "user",
    "scheme",
    "source",
    "coverage_prob",
    "coverage_ci95_halfwidth",
    "throughput_nats_per_hz",
    "throughput_ci95_halfwidth",
    "trials",
    "seed",
    "config_hash",
    "tool_version",
)

_INT_COLUMNS = frozenset({"tier", "user", "trials", "seed"})
_FLOAT_COLUMNS = frozenset(
    {
        "sweep_value",
        "coverage_prob",
        "coverage_ci95_halfwidth",
        "throughput_nats_per_hz",
        "throughput_ci95_halfwidth",
    }
)

_SOURCES = ("analytic", "simulated")
_OBJECTIVES = ("cell_coverage", "cell_throughput")
_SWEEP_RE = re.compile(r"(lambda|beta)_([1-9]\d*)\Z")


def _parse_sweep_variable(name: str) -> tuple[str, int]:
    match = _SWEEP_RE.match(name)
    if match is None:
        raise SpecError(
            f"unknown sweep variable {name!r}; expected 'lambda_<tier>' "
            "(tier BS intensity) or 'beta_<K>' (top power fraction)"
        )
    return match.group(1), int(match.group(2))


@dataclass(frozen=True)
class SweepSpec:
    """Exactly one swept variable and its sorted grid of values.

    variable: 'lambda_<m>' sweeps the tier-m BS intensity (1-based tier);
    'beta_<K>' sweeps the top power fraction of a two-user split, with the
    remainder going to the near user.
    """

    variable: str
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        kind, _ = _parse_sweep_variable(self.variable)
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        if not values:
            raise SpecError("sweep grid must be non-empty")
        if any(not math.isfinite(v) for v in values):
            raise SpecError("sweep values must be finite")
        if any(b <= a for a, b in zip(values, values[1:])):
            raise SpecError("sweep grid must be strictly increasing")
        if kind == "lambda" and values[0] <= 0.0:
            raise SpecError("swept intensities must be strictly positive")
        if kind == "beta" and not (0.0 < values[0] and values[-1] < 1.0):
            raise SpecError("swept power fractions must lie in (0, 1)")


@dataclass(frozen=True)
class ExperimentSpec:
    """One declarative experiment: a network, an allocation policy, schemes,
    metric sources and a single sweep.

    alloc is either a fixed PowerAllocation or the string "optimize", in
    which case the allocation is re-optimized per sweep point, tier and
    scheme against `objective`. A beta sweep defines the allocation at each
    point, so alloc must then be None.
    """

    name: str
    network: NetworkConfig
    sweep: SweepSpec
    alloc: PowerAllocation | str | None
    schemes: tuple[Scheme, ...]
    sources: tuple[str, ...] = ("analytic",)
    mode: SimMode = SimMode.FAST_PATH
    trials: int = 0
    seed: int = 0
    objective: str = "cell_coverage"
    include_single_user: bool = False
    include_cell_metrics: bool = False

    def __post_init__(self) -> None:
        if not re.match(r"[A-Za-z0-9][A-Za-z0-9._-]*\Z", self.name):
            raise SpecError(f"experiment name {self.name!r} is not filename-safe")
        kind, index = _parse_sweep_variable(self.sweep.variable)
        if kind == "lambda":
            if not 1 <= index <= self.network.num_tiers:
                raise SpecError(
                    f"sweep tier {index} out of range 1..{self.network.num_tiers}"
                )
            if self.alloc is None:
                raise SpecError("an intensity sweep needs an allocation policy")
        else:
            if self.network.group_size != 2 or index != 2:
                raise SpecError(
                    "a power-fraction sweep is only defined for the top user "
                    "of a two-user group (variable 'beta_2')"
                )
            if self.alloc is not None:
                raise SpecError("a beta sweep defines the allocation at each point")
        if isinstance(self.alloc, str) and self.alloc != "optimize":
            raise SpecError(f"alloc must be a power split or 'optimize', got {self.alloc!r}")
        if isinstance(self.alloc, PowerAllocation):
            if self.alloc.num_users != self.network.group_size:
                raise SpecError("allocation length must match the group size")
        schemes = tuple(Scheme(s) for s in self.schemes)
        object.__setattr__(self, "schemes", schemes)
        if not schemes or len(set(schemes)) != len(schemes):
            raise SpecError("schemes must be non-empty and unique")
        sources = tuple(self.sources)
        object.__setattr__(self, "sources", sources)
        if not sources or len(set(sources)) != len(sources):
            raise SpecError("sources must be non-empty and unique")
        for src in sources:
            if src not in _SOURCES:
                raise SpecError(f"unknown source {src!r}; expected one of {_SOURCES}")
        object.__setattr__(self, "mode", SimMode(self.mode))
        if "simulated" in sources and self.trials < 1:
            raise SpecError("simulated sources need trials >= 1")
        if self.trials < 0:
            raise SpecError("trials must be non-negative")
        if self.seed < 0:
            raise SpecError("seed must be non-negative")
        if self.objective not in _OBJECTIVES:
            raise SpecError(
                f"unknown objective {self.objective!r}; expected one of {_OBJECTIVES}"
            )


# ---------------------------------------------------------------------------
# result table


def _serialize_cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _parse_cell(column: str, cell: str) -> Any:
    if cell == "":
        return None
    if column in _INT_COLUMNS:
        return int(cell)
    if column in _FLOAT_COLUMNS:
        return float(cell)
    return cell


@dataclass(frozen=True)
class ResultTable:
    """Plot-ready tabular results: one row per
    (sweep value, tier, user, scheme, source) key.

    Cells are Python scalars or None for absent values (analytic rows have
    no CI; undefined conditional estimates have no throughput). Row order is
    deterministic: sorted by the key.
    """

    columns: tuple[str, ...]
    rows: tuple[tuple[Any, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "columns", tuple(self.columns))
        object.__setattr__(self, "rows", tuple(tuple(r) for r in self.rows))
        if self.columns != COLUMNS:
            raise SpecError("unexpected result-table columns")
        for row in self.rows:
            if len(row) != len(self.columns):
                raise SpecError("row width does not match the header")
        keys = [row[:6] for row in self.rows]
        if len(set(keys)) != len(keys):
            raise SpecError("duplicate (sweep value, tier, user, scheme, source) key")

    def to_dicts(self) -> list[dict[str, Any]]:
        return [dict(zip(self.columns, row)) for row in self.rows]

    def column(self, name: str) -> list[Any]:
        idx = self.columns.index(name)
        return [row[idx] for row in self.rows]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([_serialize_cell(v) for v in row])
        return buf.getvalue()

    def to_json_obj(self) -> dict[str, Any]:
        return {"columns": list(self.columns), "rows": [list(r) for r in self.rows]}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_csv(cls, text: str) -> "ResultTable":
        reader = csv.reader(io.StringIO(text))
        try:
            header = tuple(next(reader))
        except StopIteration:
            raise SpecError("empty results file") from None
        rows = tuple(
            tuple(_parse_cell(col, cell) for col, cell in zip(header, row))
            for row in reader
        )
        return cls(header, rows)

    @classmethod
    def from_json_obj(cls, obj: dict[str, Any]) -> "ResultTable":
        return cls(tuple(obj["columns"]), tuple(tuple(r) for r in obj["rows"]))

    @classmethod
    def load(cls, path: str | Path) -> "ResultTable":
        path = Path(path)
        text = path.read_text(encoding="utf-8")
        if path.suffix == ".json":
            return cls.from_json_obj(json.loads(text))
        return cls.from_csv(text)


# ---------------------------------------------------------------------------
# per-point evaluation


def _point_seed(seed: int, point_index: int) -> int:
    """Stream seed for one sweep point: a function of the root seed and the
    point index alone, so results do not depend on worker scheduling."""
    seq = np.random.SeedSequence(entropy=seed, spawn_key=(point_index,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def _point_network(spec: ExperimentSpec, value: float) -> NetworkConfig:
    kind, index = _parse_sweep_variable(spec.sweep.variable)
    if kind != "lambda":
        return spec.network
    tiers = list(spec.network.tiers)
    tiers[index - 1] = dataclasses.replace(tiers[index - 1], intensity=value)
    return dataclasses.replace(spec.network, tiers=tuple(tiers))


def _point_alloc(spec: ExperimentSpec, value: float) -> PowerAllocation | None:
    kind, _ = _parse_sweep_variable(spec.sweep.variable)
    if kind == "beta":
        return PowerAllocation((1.0 - value, value))
    if isinstance(spec.alloc, PowerAllocation):
        return spec.alloc
    return None  # alloc == "optimize"


def _network_dict(net: NetworkConfig) -> dict[str, Any]:
    return {
        "tiers": [
            {"power": t.power, "intensity": t.intensity, "bias": t.bias}
            for t in net.tiers
        ],
        "user_intensity": net.user_intensity,
        "alpha": net.alpha,
        "group_size": net.group_size,
        "sir_threshold": net.sir_threshold,
    }


def _config_hash(net: NetworkConfig, alloc: PowerAllocation | None) -> str:
    payload = json.dumps(
        {
            "network": _network_dict(net),
            "alloc": None if alloc is None else list(alloc.betas),
        },
        sort_keys=True,
        separators=(",", ":"),
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


def _clean(value: Any) -> float | None:
    if value is None:
        return None
    value = float(value)
    return None if math.isnan(value) else value


def _evaluate_point(
    spec: ExperimentSpec, point_index: int
) -> tuple[list[dict[str, Any]], list[str], list[dict[str, Any]]]:
    value = spec.sweep.values[point_index]
    net = _point_network(spec, value)
    theta = net.sir_threshold
    K = net.group_size
    fixed_alloc = _point_alloc(spec, value)
    seed = _point_seed(spec.seed, point_index)

    rows: list[dict[str, Any]] = []
    warnings: list[str] = []
    optima: list[dict[str, Any]] = []

    def add(tier, user, scheme, source, cov, cov_hw, thr, thr_hw, trials, chash):
        rows.append(
            {
                "sweep_variable": spec.sweep.variable,
                "sweep_value": float(value),
                "tier": tier,
                "user": user,
                "scheme": scheme,
                "source": source,
                "coverage_prob": _clean(cov),
                "coverage_ci95_halfwidth": _clean(cov_hw),
                "throughput_nats_per_hz": _clean(thr),
                "throughput_ci95_halfwidth": _clean(thr_hw),
                "trials": trials,
                "seed": spec.seed,
                "config_hash": chash,
                "tool_version": __version__,
            }
        )

    if fixed_alloc is not None:
        for scheme in spec.schemes:
            verdict = feasible(fixed_alloc, theta, scheme)
            if not verdict:
                warnings.append(
                    f"{spec.sweep.variable}={value!r}: scheme {scheme.value}: "
                    f"{verdict.violation}"
                )

    for m in range(net.num_tiers):
        for scheme in spec.schemes:
            alloc = fixed_alloc
            if alloc is None:
                optimizer = (
                    optimize_cell_coverage
                    if spec.objective == "cell_coverage"
                    else optimize_cell_throughput
                )
                opt = optimizer(net, m, scheme)
                alloc = opt.best_alloc
                optima.append(
                    {
                        "sweep_value": float(value),
                        "tier": m + 1,
                        "scheme": scheme.value,
                        "objective": spec.objective,
                        "betas": list(alloc.betas),
                        "best_value": opt.best_value,
                        "evaluations": opt.evaluations,
                        "method": opt.method,
                    }
                )
            chash = _config_hash(net, alloc)
            if "analytic" in spec.sources:
                cov_fn = (
                    coverage_noncoord
                    if scheme is Scheme.NON_COORDINATED
                    else coverage_jt
                )
                thr_fn = (
                    throughput_noncoord
                    if scheme is Scheme.NON_COORDINATED
                    else throughput_jt
                )
                for k in range(1, K + 1):
                    add(
                        m + 1, k, scheme.value, "analytic",
                        cov_fn(net, alloc, m, k), None,
                        thr_fn(net, alloc, m, k), None,
                        None, chash,
                    )
                if spec.include_cell_metrics:
                    add(
                        m + 1, CELL_AGGREGATE_USER, scheme.value, "analytic",
                        cell_coverage(net, alloc, m, scheme), None,
                        cell_throughput(net, alloc, m, scheme), None,
                        None, chash,
                    )
            if "simulated" in spec.sources:
                batch = simulate_sir_samples(
                    net, alloc, m, scheme, spec.mode, spec.trials, seed
                )
                cov = estimate_coverage(batch, alloc, theta, scheme)
                thr = estimate_throughput(batch, alloc, scheme)
                for k in range(1, K + 1):
                    add(
                        m + 1, k, scheme.value, "simulated",
                        cov.per_user[k - 1], cov.ci_halfwidth[k - 1],
                        thr.per_user[k - 1], thr.ci_halfwidth[k - 1],
                        spec.trials, chash,
                    )
        if spec.include_single_user:
            # The sole-user baseline does not depend on the power split.
            add(
                m + 1, 1, SCHEME_SINGLE_USER, "analytic",
                None, None,
                single_user_throughput(net, m), None,
                None, _config_hash(net, None),
            )
    return rows, warnings, optima


def _row_sort_key(row: dict[str, Any]) -> tuple:
    return (
        row["sweep_value"],
        row["tier"],
        row["user"],
        row["scheme"],
        row["source"],
    )


# ---------------------------------------------------------------------------
# running


@dataclass(frozen=True)
class RunResult:
    table: ResultTable
    warnings: tuple[str, ...]
    optima: tuple[dict[str, Any], ...]
    sidecar: dict[str, Any]
    data_path: Path | None = None
    sidecar_path: Path | None = None


def resolve_jobs(jobs: int | None) -> int:
    """Explicit value, else the NOMALAB_JOBS environment variable, else 1."""
    if jobs is None:
        raw = os.environ.get(JOBS_ENV_VAR)
        if raw is None:
            return 1
        try:
            jobs = int(raw)
        except ValueError:
            raise SpecError(f"{JOBS_ENV_VAR} must be an integer, got {raw!r}") from None
    if jobs < 1:
        raise SpecError("job count must be >= 1")
    return jobs


def describe_spec(spec: ExperimentSpec) -> dict[str, Any]:
    """Fully resolved, JSON-ready view of an experiment spec."""
    return {
        "name": spec.name,
        "network": _network_dict(spec.network),
        "sweep": {"variable": spec.sweep.variable, "values": list(spec.sweep.values)},
        "alloc": (
            list(spec.alloc.betas)
            if isinstance(spec.alloc, PowerAllocation)
            else spec.alloc
        ),
        "objective": spec.objective if spec.alloc == "optimize" else None,
        "schemes": [s.value for s in spec.schemes],
        "sources": list(spec.sources),
        "mode": spec.mode.value,
        "trials": spec.trials,
        "seed": spec.seed,
        "include_single_user": spec.include_single_user,
        "include_cell_metrics": spec.include_cell_metrics,
    }


def _sidecar(spec: ExperimentSpec, warnings, optima) -> dict[str, Any]:
    sidecar = describe_spec(spec)
    sidecar.update(
        {
            "created_utc": datetime.now(timezone.utc).isoformat(),
            "tool_version": __version__,
            "point_seed_rule": "SeedSequence(entropy=seed, spawn_key=(point_index,))",
            "warnings": list(warnings),
            "optima": list(optima),
        }
    )
    return sidecar


def run_experiment(
    spec: ExperimentSpec,
    out_dir: str | Path | None = None,
    fmt: str = "csv",
    jobs: int | None = None,
) -> RunResult:
    """Evaluate every sweep point and assemble the sorted ResultTable.

    With out_dir set, writes <name>.<fmt> (the data) and <name>.meta.json
    (the sidecar: resolved spec, warnings, optimizer results, timestamp).
    """
    if fmt not in ("csv", "json"):
        raise SpecError(f"unknown output format {fmt!r}; expected 'csv' or 'json'")
    jobs = resolve_jobs(jobs)
    indices = range(len(spec.sweep.values))
    if jobs == 1:
        evaluated = [_evaluate_point(spec, i) for i in indices]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            evaluated = list(pool.map(lambda i: _evaluate_point(spec, i), indices))

    rows = [row for point_rows, _, _ in evaluated for row in point_rows]
    rows.sort(key=_row_sort_key)
    warnings: list[str] = []
    for _, point_warnings, _ in evaluated:
        for w in point_warnings:
            if w not in warnings:
                warnings.append(w)
    optima = [o for _, _, point_optima in evaluated for o in point_optima]

    table = ResultTable(
        COLUMNS, tuple(tuple(row[c] for c in COLUMNS) for row in rows)
    )
    sidecar = _sidecar(spec, warnings, optima)

    data_path = sidecar_path = None
    if out_dir is not None:
        out_dir = Path(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        data_path = out_dir / f"{spec.name}.{fmt}"
        payload = table.to_csv() if fmt == "csv" else table.to_json()
        data_path.write_text(payload, encoding="utf-8")
        sidecar_path = out_dir / f"{spec.name}.meta.json"
        sidecar_path.write_text(
            json.dumps(sidecar, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
    return RunResult(
        table=table,
        warnings=tuple(warnings),
        optima=tuple(optima),
        sidecar=sidecar,
        data_path=data_path,
        sidecar_path=sidecar_path,
    )


# ---------------------------------------------------------------------------
# spec files


def spec_from_dict(data: dict[str, Any]) -> ExperimentSpec:
    """Build an ExperimentSpec from a parsed config mapping."""
    if not isinstance(data, dict):
        raise SpecError("experiment spec must be a mapping")
    known = {
        "name", "network", "sweep", "alloc", "schemes", "sources", "mode",
        "trials", "seed", "objective", "include_single_user",
        "include_cell_metrics",
    }
    unknown = set(data) - known
    if unknown:
        raise SpecError(f"unknown spec fields: {sorted(unknown)}")
    try:
        net_data = data["network"]
        tiers = tuple(
            TierParams(
                power=float(t["power"]),
                intensity=float(t["intensity"]),
                bias=float(t.get("bias", 1.0)),
            )
            for t in net_data["tiers"]
        )
        network = NetworkConfig(
            tiers=tiers,
            user_intensity=float(net_data["user_intensity"]),
            alpha=float(net_data["alpha"]),
            group_size=int(net_data["group_size"]),
            sir_threshold=float(net_data["sir_threshold"]),
        )
        sweep_data = data["sweep"]
        if "values" in sweep_data:
            values = tuple(float(v) for v in sweep_data["values"])
        else:
            values = tuple(
                np.linspace(
                    float(sweep_data["start"]),
                    float(sweep_data["stop"]),
                    int(sweep_data["points"]),
                )
            )
        sweep = SweepSpec(variable=str(sweep_data["variable"]), values=values)
    except (KeyError, TypeError) as exc:
        raise SpecError(f"malformed experiment spec: {exc!r}") from exc

    alloc_data = data.get("alloc")
    if alloc_data is None:
        alloc: PowerAllocation | str | None = None
    elif isinstance(alloc_data, str):
        alloc = alloc_data
    else:
        alloc = PowerAllocation(tuple(float(b) for b in alloc_data))

    schemes_data = data.get("schemes", ["non_coordinated"])
    if isinstance(schemes_data, str):
        schemes_data = [schemes_data]
    try:
        schemes = tuple(Scheme(s) for s in schemes_data)
        mode = SimMode(data.get("mode", "fast_path"))
    except ValueError as exc:
        raise SpecError(str(exc)) from exc

    sources = tuple(data.get("sources", ["analytic"]))
    default_trials = 100_000 if "simulated" in sources else 0
    return ExperimentSpec(
        name=str(data.get("name", "experiment")),
        network=network,
        sweep=sweep,
        alloc=alloc,
        schemes=schemes,
        sources=sources,
        mode=mode,
        trials=int(data.get("trials", default_trials)),
        seed=int(data.get("seed", 0)),
        objective=str(data.get("objective", "cell_coverage")),
        include_single_user=bool(data.get("include_single_user", False)),
        include_cell_metrics=bool(data.get("include_cell_metrics", False)),
    )


def load_spec(path: str | Path) -> ExperimentSpec:
    """Parse a YAML experiment file into a validated ExperimentSpec."""
    try:
        data = yaml.safe_load(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise SpecError(f"cannot read spec file: {exc}") from exc
    except yaml.YAMLError as exc:
        raise SpecError(f"spec file is not valid YAML: {exc}") from exc
    return spec_from_dict(data)


# ---------------------------------------------------------------------------
# built-in recipes

_REF_USER_INTENSITY = 5e-4


def _reference_network(pico_intensity: float) -> NetworkConfig:
    """Two-tier macro/pico reference setup used by the built-in recipes:
    P = (20, 5) W, macro intensity 1e-6 per m^2, unbiased association,
    alpha = 4, theta = 1, two scheduled users."""
    return NetworkConfig(
        tiers=(
            TierParams(power=20.0, intensity=1e-6, bias=1.0),
            TierParams(power=5.0, intensity=pico_intensity, bias=1.0),
        ),
        user_intensity=_REF_USER_INTENSITY,
        alpha=4.0,
        group_size=2,
        sir_threshold=1.0,
    )


def _pico_sweep() -> SweepSpec:
    mu = _REF_USER_INTENSITY
    return SweepSpec("lambda_2", tuple(np.linspace(mu / 3.0, 2.0 * mu, 8)))


def _beta_sweep() -> SweepSpec:
    # 50 points spanning (0.5, 1) exclusive at 0.01 spacing.
    return SweepSpec("beta_2", tuple(np.linspace(0.505, 0.995, 50)))


def _fig1(trials: int | None, seed: int | None) -> ExperimentSpec:
    """Per-user coverage and throughput vs pico-tier density, fixed
    [1/4, 3/4] split, non-coordinated scheme, analytic + simulated."""
    return ExperimentSpec(
        name="fig1",
        network=_reference_network(_REF_USER_INTENSITY),
        sweep=_pico_sweep(),
        alloc=PowerAllocation((0.25, 0.75)),
        schemes=(Scheme.NON_COORDINATED,),
        sources=("analytic", "simulated"),
        mode=SimMode.FAST_PATH,
        trials=100_000 if trials is None else trials,
        seed=7 if seed is None else seed,
    )


def _fig2(trials: int | None, seed: int | None) -> ExperimentSpec:
    """Same sweep with the coordinated-JT scheme alongside the
    non-coordinated baseline, so the coordination uplift is readable from
    one table."""
    spec = _fig1(trials, seed)
    return dataclasses.replace(
        spec, name="fig2", schemes=(Scheme.NON_COORDINATED, Scheme.COORDINATED_JT)
    )


def _fig3(trials: int | None, seed: int | None) -> ExperimentSpec:
    """Cell coverage/throughput vs the top power fraction at matched user
    and pico densities, non-coordinated, with the sole-user baseline."""
    return ExperimentSpec(
        name="fig3",
        network=_reference_network(_REF_USER_INTENSITY),
        sweep=_beta_sweep(),
        alloc=None,
        schemes=(Scheme.NON_COORDINATED,),
        sources=("analytic",),
        trials=0 if trials is None else trials,
        seed=7 if seed is None else seed,
        include_single_user=True,
        include_cell_metrics=True,
    )


def _fig4(trials: int | None, seed: int | None) -> ExperimentSpec:
    """Coordinated-JT version of the power-fraction sweep."""
    spec = _fig3(trials, seed)
    return dataclasses.replace(spec, name="fig4", schemes=(Scheme.COORDINATED_JT,))


_RECIPES = {"fig1": _fig1, "fig2": _fig2, "fig3": _fig3, "fig4": _fig4}


def recipe_names() -> tuple[str, ...]:
    return tuple(_RECIPES)


def recipe_spec(
    name: str, trials: int | None = None, seed: int | None = None
) -> ExperimentSpec:
    """Instantiate a built-in recipe, optionally overriding trials/seed."""
    try:
        builder = _RECIPES[name]
    except KeyError:
        raise SpecError(
            f"unknown recipe {name!r}; available: {', '.join(_RECIPES)}"
        ) from None
    return builder(trials, seed)
