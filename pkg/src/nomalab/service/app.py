"""FastAPI application exposing the laboratory's core operations.

Every endpoint is a pure function of its payload: analytics, feasibility,
optimization, simulation and experiment runs. Domain validation errors map
to 400 with error_type "spec"; numerical failures (quadrature, retry
budget) map to 500 with error_type "numeric". The CLI is a thin client of
this app; tests and remote deployments share the same contract.
"""

from __future__ import annotations

import math

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse

from nomalab import __version__
from nomalab.analytics import (
    Scheme,
    cell_coverage,
    cell_throughput,
    coverage_jt,
    coverage_noncoord,
    single_user_throughput,
    throughput_jt,
    throughput_noncoord,
)
from nomalab.errors import IntegrationError, RetryBudgetError, SpecError
from nomalab.experiments import (
    describe_spec,
    recipe_names,
    recipe_spec,
    run_experiment,
    spec_from_dict,
)
from nomalab.geometry import derived_stats
from nomalab.montecarlo import (
    SimMode,
    estimate_coverage,
    estimate_throughput,
    simulate_sir_samples,
)
from nomalab.poweropt import feasible, optimize_cell_coverage, optimize_cell_throughput
from nomalab.service.schemas import (
    ExperimentRequest,
    FeasibilityRequest,
    MetricsRequest,
    NetworkRequest,
    OptimizeRequest,
    SimulateRequest,
    to_alloc,
)


def _nan_to_none(values) -> list[float | None]:
    return [None if math.isnan(v) else float(v) for v in values]


def _check_tier(tier: int, num_tiers: int) -> int:
    if tier > num_tiers:
        raise SpecError(f"tier {tier} out of range 1..{num_tiers}")
    return tier - 1


def create_app() -> FastAPI:
    app = FastAPI(title="nomalab", version=__version__)

    @app.exception_handler(SpecError)
    @app.exception_handler(ValueError)
    @app.exception_handler(IndexError)
    async def _spec_error(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(
            status_code=400, content={"detail": str(exc), "error_type": "spec"}
        )

    @app.exception_handler(IntegrationError)
    @app.exception_handler(RetryBudgetError)
    async def _numeric_error(request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(
            status_code=500, content={"detail": str(exc), "error_type": "numeric"}
        )

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/recipes")
    def recipes() -> dict:
        return {"recipes": list(recipe_names())}

    @app.get("/recipes/{name}")
    def recipe_detail(name: str):
        if name not in recipe_names():
            return JSONResponse(
                status_code=404,
                content={
                    "detail": f"unknown recipe {name!r}",
                    "error_type": "spec",
                },
            )
        return describe_spec(recipe_spec(name))

    @app.post("/network/derived-stats")
    def network_derived_stats(req: NetworkRequest) -> dict:
        stats = derived_stats(req.network.to_domain())
        return {
            "cell_load": list(stats.cell_load),
            "nonvoid_prob": list(stats.nonvoid_prob),
            "assoc_prob": list(stats.assoc_prob),
            "scaled_total_intensity": stats.scaled_total_intensity,
        }

    @app.post("/analytics/coverage")
    def analytics_coverage(req: MetricsRequest) -> dict:
        net = req.network.to_domain()
        m = _check_tier(req.tier, net.num_tiers)
        alloc = to_alloc(req.alloc)
        scheme = Scheme(req.scheme)
        fn = coverage_noncoord if scheme is Scheme.NON_COORDINATED else coverage_jt
        return {
            "per_user": [fn(net, alloc, m, k) for k in range(1, net.group_size + 1)],
            "cell": cell_coverage(net, alloc, m, scheme),
        }

    @app.post("/analytics/throughput")
    def analytics_throughput(req: MetricsRequest) -> dict:
        net = req.network.to_domain()
        m = _check_tier(req.tier, net.num_tiers)
        alloc = to_alloc(req.alloc)
        scheme = Scheme(req.scheme)
        fn = (
            throughput_noncoord
            if scheme is Scheme.NON_COORDINATED
            else throughput_jt
        )
        return {
            "per_user": [fn(net, alloc, m, k) for k in range(1, net.group_size + 1)],
            "cell": cell_throughput(net, alloc, m, scheme),
            "single_user": single_user_throughput(net, m),
        }

    @app.post("/analytics/cell-metrics")
    def analytics_cell_metrics(req: MetricsRequest) -> dict:
        net = req.network.to_domain()
        m = _check_tier(req.tier, net.num_tiers)
        alloc = to_alloc(req.alloc)
        scheme = Scheme(req.scheme)
        return {
            "cell_coverage": cell_coverage(net, alloc, m, scheme),
            "cell_throughput": cell_throughput(net, alloc, m, scheme),
            "single_user_throughput": single_user_throughput(net, m),
        }

    @app.post("/allocations/feasibility")
    def allocations_feasibility(req: FeasibilityRequest) -> dict:
        verdict = feasible(to_alloc(req.alloc), req.theta, Scheme(req.scheme))
        return {"feasible": bool(verdict), "violation": verdict.violation}

    @app.post("/optimize")
    def optimize(req: OptimizeRequest) -> dict:
        net = req.network.to_domain()
        m = _check_tier(req.tier, net.num_tiers)
        optimizer = (
            optimize_cell_coverage
            if req.objective == "cell_coverage"
            else optimize_cell_throughput
        )
        result = optimizer(net, m, Scheme(req.scheme), req.method, req.resolution)
        return {
            "best_alloc": list(result.best_alloc.betas),
            "best_value": result.best_value,
            "evaluations": result.evaluations,
            "method": result.method,
        }

    @app.post("/simulate")
    def simulate(req: SimulateRequest) -> dict:
        net = req.network.to_domain()
        m = _check_tier(req.tier, net.num_tiers)
        alloc = to_alloc(req.alloc)
        scheme = Scheme(req.scheme)
        batch = simulate_sir_samples(
            net,
            alloc,
            m,
            scheme,
            SimMode(req.mode),
            req.trials,
            req.seed,
            window_radius=req.window_radius,
            retry_budget=req.retry_budget,
        )
        cov = estimate_coverage(batch, alloc, net.sir_threshold, scheme)
        thr = estimate_throughput(batch, alloc, scheme)
        return {
            "trials": req.trials,
            "seed": req.seed,
            "mode": req.mode,
            "scheme": req.scheme,
            "coverage": {
                "per_user": _nan_to_none(cov.per_user),
                "ci95_halfwidth": _nan_to_none(cov.ci_halfwidth),
                "n_samples": list(cov.n_samples),
            },
            "throughput": {
                "per_user": _nan_to_none(thr.per_user),
                "ci95_halfwidth": _nan_to_none(thr.ci_halfwidth),
                "n_samples": list(thr.n_samples),
            },
        }

    @app.post("/experiments/run")
    def experiments_run(req: ExperimentRequest) -> dict:
        if (req.recipe is None) == (req.spec is None):
            raise SpecError("provide exactly one of 'recipe' or 'spec'")
        if req.recipe is not None:
            spec = recipe_spec(req.recipe, trials=req.trials, seed=req.seed)
        else:
            data = dict(req.spec)
            if req.trials is not None:
                data["trials"] = req.trials
            if req.seed is not None:
                data["seed"] = req.seed
            spec = spec_from_dict(data)
        result = run_experiment(spec, jobs=req.jobs)
        payload = result.table.to_json_obj()
        payload.update(
            {
                "name": spec.name,
                "warnings": list(result.warnings),
                "optima": list(result.optima),
                "sidecar": result.sidecar,
            }
        )
        return payload

    return app
