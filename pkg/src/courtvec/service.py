"""Read-only HTTP/JSON inference service.

Exposes prediction, series simulation, 5th-man optimization and
registry/embedding queries over one immutable model. Seeds travel in
request bodies; the server keeps no RNG state, so identical requests
return identical bodies.

Error envelope: {"code": ..., "message": ..., "detail": ...} with
400 malformed body / 404 unknown player / 422 constraint violations.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__ as package_version
from .analysis import nearest_neighbors
from .checkpoint import checkpoint_sha256
from .errors import (
    ArgumentError,
    CourtVecError,
    DataError,
    DegenerateModelError,
    LineupError,
    RegistryError,
    RuntimeFailure,
)
from .fifth_man import FifthManQuery, rank_fifth_man
from .network import EmbeddingModel, forward
from .outcomes import N_OUTCOMES, OUTCOME_LABELS, OUTCOME_POINTS
from .registry import PlayerRegistry
from .simulation import simulate_series

API_PREFIX = "/api/v1"


class PredictRequest(BaseModel):
    offense: list[int]
    defense: list[int]


class SimulateRequest(BaseModel):
    lineup_a: list[int]
    lineup_b: list[int]
    sims: int = 1000
    possessions: int = 100
    seed: int = 0


class OptimizeRequest(BaseModel):
    fixed_four: list[int]
    opponent: list[int]
    candidates: list[int]
    sims: int = 1000
    possessions: int = 100
    seed: int = 0


def _error_body(code: str, message: str, detail=None):
    return {"code": code, "message": message, "detail": detail}


def _check_known_ids(ids, n_players):
    for pid in ids:
        if not 0 <= int(pid) < n_players:
            raise RegistryError(f"unknown player id {int(pid)} (registry size {n_players})")


def _check_five(ids, side):
    if len(ids) != 5:
        raise LineupError(f"{side}: expected 5 players, got {len(ids)}")


def create_app(
    model: EmbeddingModel,
    registry: PlayerRegistry,
    version: str | None = None,
    checkpoint_hash: str | None = None,
) -> FastAPI:
    """Build the service over an immutable model + registry pair."""
    if len(registry) != model.config.n_players:
        raise ArgumentError(
            f"registry has {len(registry)} players but the model expects "
            f"{model.config.n_players}"
        )
    n_players = model.config.n_players
    app = FastAPI(title="courtvec", version=version or package_version)
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    sha = checkpoint_hash or checkpoint_sha256(model)
    class_table = [
        {"index": k, "label": OUTCOME_LABELS[k], "points": OUTCOME_POINTS[k]}
        for k in range(N_OUTCOMES)
    ]

    @app.exception_handler(RequestValidationError)
    async def malformed_body(request: Request, exc: RequestValidationError):
        return JSONResponse(
            status_code=400,
            content=_error_body("bad_request", "malformed request body", exc.errors()),
        )

    @app.exception_handler(CourtVecError)
    async def domain_error(request: Request, exc: CourtVecError):
        if isinstance(exc, RegistryError):
            status, code = 404, "unknown_player"
        elif isinstance(exc, DegenerateModelError):
            status, code = 422, "degenerate_model"
        elif isinstance(exc, (LineupError, ArgumentError, DataError, RuntimeFailure)):
            status, code = 422, "invalid_request"
        else:
            status, code = 422, "invalid_request"
        return JSONResponse(status_code=status, content=_error_body(code, str(exc)))

    @app.post(API_PREFIX + "/predict")
    def predict(body: PredictRequest):
        _check_five(body.offense, "offense")
        _check_five(body.defense, "defense")
        _check_known_ids(body.offense + body.defense, n_players)
        probs = forward(model, body.offense, body.defense)
        return {
            "offense": sorted(body.offense),
            "defense": sorted(body.defense),
            "probabilities": [float(p) for p in probs],
            "classes": class_table,
        }

    @app.post(API_PREFIX + "/simulate/series")
    def simulate(body: SimulateRequest):
        _check_five(body.lineup_a, "lineup_a")
        _check_five(body.lineup_b, "lineup_b")
        _check_known_ids(body.lineup_a + body.lineup_b, n_players)
        result = simulate_series(
            model, body.lineup_a, body.lineup_b,
            sims=body.sims, possessions=body.possessions, seed=body.seed,
        )
        return {"seed": body.seed, **result.to_dict()}

    @app.post(API_PREFIX + "/optimize/fifth")
    def optimize(body: OptimizeRequest):
        _check_known_ids(body.fixed_four + body.opponent + body.candidates, n_players)
        query = FifthManQuery(
            fixed_four=tuple(body.fixed_four),
            opponent=tuple(body.opponent),
            candidates=tuple(body.candidates),
            sims=body.sims,
            possessions=body.possessions,
            seed=body.seed,
        )
        rows = rank_fifth_man(model, query)
        return {
            "seed": body.seed,
            "rows": [
                {**row.to_dict(), "name": registry.get(row.candidate).name}
                for row in rows
            ],
        }

    @app.get(API_PREFIX + "/players")
    def players():
        return {
            "count": len(registry),
            "players": [
                {
                    "player_id": r.player_id,
                    "name": r.name,
                    "position": r.position,
                    "minutes": r.minutes,
                    "fg_made": r.fg_made,
                    "threes_made": r.threes_made,
                    "assists": r.assists,
                    "rebounds": r.rebounds,
                    "plus_minus": r.plus_minus,
                }
                for r in registry
            ],
        }

    @app.get(API_PREFIX + "/players/{player_id}/neighbors")
    def neighbors(player_id: int, count: int = 5):
        record = registry.get(player_id)  # 404 on unknown id
        ids = nearest_neighbors(model.embeddings, player_id, count)
        anchor = model.embeddings[player_id]
        return {
            "player_id": record.player_id,
            "name": record.name,
            "neighbors": [
                {
                    "player_id": int(pid),
                    "name": registry.get(int(pid)).name,
                    "position": registry.get(int(pid)).position,
                    "distance": float(np.linalg.norm(model.embeddings[int(pid)] - anchor)),
                }
                for pid in ids
            ],
        }

    @app.get(API_PREFIX + "/meta")
    def meta():
        c = model.config
        return {
            "version": version or package_version,
            "checkpoint_sha256": sha,
            "model": {
                "n_players": c.n_players,
                "embedding_dim": c.embedding_dim,
                "hidden_dim": c.hidden_dim,
                "players_per_side": c.players_per_side,
                "n_outcomes": c.n_outcomes,
            },
            "classes": class_table,
        }

    return app
