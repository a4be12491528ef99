"""Read-only HTTP inference service over a model bundle.

Every response carries the bundle's config hash so clients can detect
model changes. Requests never mutate the model; sync endpoints run on
the thread pool, so one slow query never blocks the others. Impossible
evidence returns a 409 with the greedy one-out culprit diagnostic.
"""

from __future__ import annotations

from fastapi import FastAPI, Query
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .bundle import ModelBundle
from .errors import ContractError, ImpossibleEvidenceError, StructuralError
from .infer import evidence_scan, mpe, scenario
from .sensitivity import tornado


class QueryRequest(BaseModel):
    target: str
    evidence: dict[str, str] = Field(default_factory=dict)


class MpeRequest(BaseModel):
    evidence: dict[str, str] = Field(default_factory=dict)


class ScenarioRequest(BaseModel):
    label: str = ""
    target: str
    evidence: dict[str, str] = Field(default_factory=dict)


class TornadoRequest(BaseModel):
    target: str
    state: str
    evidence: dict[str, str] = Field(default_factory=dict)
    window: float = 0.10
    top_k: int = 10


def create_app(bundle: ModelBundle, ui_dir: str | None = None) -> FastAPI:
    net = bundle.to_network()
    config_hash = bundle.config_hash
    app = FastAPI(title="bnkit inference service", version="1")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )

    @app.exception_handler(ImpossibleEvidenceError)
    async def impossible_handler(request, exc: ImpossibleEvidenceError):
        return JSONResponse(
            status_code=409,
            content={
                "error": "impossible_evidence",
                "message": str(exc),
                "culprits": exc.culprits,
                "config_hash": config_hash,
            },
        )

    @app.exception_handler(ContractError)
    async def contract_handler(request, exc: ContractError):
        return JSONResponse(
            status_code=400,
            content={
                "error": "invalid_request",
                "message": str(exc),
                "config_hash": config_hash,
            },
        )

    @app.exception_handler(StructuralError)
    async def structural_handler(request, exc: StructuralError):
        return JSONResponse(
            status_code=400,
            content={
                "error": "invalid_request",
                "message": str(exc),
                "config_hash": config_hash,
            },
        )

    @app.get("/health")
    def health():
        return {"status": "ok", "config_hash": config_hash}

    @app.get("/model")
    def model():
        arcs = []
        for parent, child in sorted(bundle.arcs):
            row = {"parent": parent, "child": child}
            strength = bundle.arc_strength(parent, child)
            if strength is not None:
                row["strength"] = strength
            arcs.append(row)
        return {
            "config_hash": config_hash,
            "target": bundle.target,
            "variables": [
                {"name": name, "states": list(states), "group": group}
                for name, states, group in bundle.variables
            ],
            "arcs": arcs,
        }

    @app.post("/query")
    def query(req: QueryRequest):
        result = scenario(net, req.target, req.evidence, label="query")
        post = result.posterior
        return {
            "config_hash": config_hash,
            "target": post.target,
            "states": list(post.states),
            "probabilities": list(post.probabilities),
            "p_evidence": post.p_evidence,
        }

    @app.post("/mpe")
    def mpe_endpoint(req: MpeRequest):
        assignment, probability = mpe(net, req.evidence)
        return {
            "config_hash": config_hash,
            "assignment": {name: assignment[name] for name in net.node_names},
            "probability": probability,
        }

    @app.post("/scenario")
    def scenario_endpoint(req: ScenarioRequest):
        result = scenario(net, req.target, req.evidence, label=req.label)
        post = result.posterior
        return {
            "config_hash": config_hash,
            "label": req.label,
            "target": post.target,
            "states": list(post.states),
            "probabilities": list(post.probabilities),
            "p_evidence": post.p_evidence,
        }

    @app.get("/scan")
    def scan(target: str, top: int = Query(default=10, ge=0)):
        result = evidence_scan(net, target)
        entries = result.entries if top == 0 else result.entries[:top]
        return {
            "config_hash": config_hash,
            "target": target,
            "states": list(result.marginal.states),
            "marginal": list(result.marginal.probabilities),
            "entries": [
                {
                    "variable": e.variable,
                    "state": e.state,
                    "divergence": e.divergence,
                    "probabilities": list(e.posterior.probabilities),
                }
                for e in entries
            ],
            "impossible": [list(pair) for pair in result.impossible],
        }

    @app.post("/tornado")
    def tornado_endpoint(req: TornadoRequest):
        report = tornado(
            net, (req.target, req.state), req.evidence, top_k=req.top_k, window=req.window
        )
        return {
            "config_hash": config_hash,
            "target": req.target,
            "state": req.state,
            "entries": [
                {
                    "parameter": e.subject,
                    "node": e.extra["node"],
                    "row": e.extra["row"],
                    "col": e.extra["col"],
                    "width": e.score,
                    "low": e.extra["low"],
                    "high": e.extra["high"],
                    "baseline": e.extra["baseline"],
                    "theta0": e.extra["theta0"],
                }
                for e in report.entries
            ],
        }

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        # mounted last so the API routes above keep precedence
        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
