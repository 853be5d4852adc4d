"""HTTP layer: preprocessed data, generation, and model introspection.

The service is a thin shell over the same generate() call the CLI uses,
so equal queries with equal rng seeds give identical results on both
paths. All loaded state (checkpoint, temperature vectors) is immutable;
every endpoint is a pure read.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Optional, Union

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .climate import (
    TemperatureVectors,
    build_temperature_vectors,
    parse_climate_csv_file,
    read_temperatures_json,
)
from .errors import ClimatuneError, DataError
from .generation import GenerationQuery, generate
from .notes import DurationToken, PitchToken
from .training import Checkpoint, checkpoint_sha256, load_checkpoint

import hashlib


class ApiQuery(BaseModel):
    """JSON mirror of a generation query.

    The seed is two parallel arrays, pitches and quarter lengths, like
    the CLI's two-list literal. The window length sql is never
    client-settable: it is fixed by the loaded checkpoint.
    """

    model_config = {"extra": "forbid"}

    year: int
    seed_pitches: list[str] = Field(default=["A4"])
    seed_durations: list[Union[float, str]] = Field(default=["1"])
    mxx: int = 8
    mxl: int = 16
    rng_seed: Optional[int] = None
    pitch_temperature: Optional[float] = None
    duration_temperature: Optional[float] = None


class ServiceState:
    """Everything loaded at startup; immutable afterwards."""

    def __init__(self, checkpoint_path: Optional[Path], data_dir: Path):
        self.checkpoint: Optional[Checkpoint] = None
        self.checkpoint_hash = ""
        self.vectors: Optional[TemperatureVectors] = None
        self.snapshot_hash = ""
        self.history_summary: Optional[dict] = None

        if checkpoint_path and Path(checkpoint_path).exists():
            self.checkpoint = load_checkpoint(checkpoint_path)
            self.checkpoint_hash = checkpoint_sha256(checkpoint_path)
            history = Path(checkpoint_path).parent / "history.json"
            if history.exists():
                payload = json.loads(history.read_text(encoding="utf-8"))
                self.history_summary = {
                    "best_epoch": payload["best_epoch"],
                    "stopped_epoch": payload["stopped_epoch"],
                    "epochs": len(payload["val_loss"]),
                    "best_val_loss": (min(payload["val_loss"]) if payload["val_loss"] else None),
                }

        temps = data_dir / "temperatures.json"
        csv = data_dir / "tokyo_tmax_monthly.csv"
        if temps.exists():
            self.vectors = read_temperatures_json(temps)
            self.snapshot_hash = hashlib.sha256(temps.read_bytes()).hexdigest()
        elif csv.exists():
            self.vectors = build_temperature_vectors(parse_climate_csv_file(csv))
            self.snapshot_hash = hashlib.sha256(csv.read_bytes()).hexdigest()


def _error(status: int, message: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": message})


def _parse_seed(query: ApiQuery):
    if len(query.seed_pitches) != len(query.seed_durations):
        raise DataError(
            f"seed arrays differ in length: {len(query.seed_pitches)} pitches "
            f"vs {len(query.seed_durations)} durations"
        )
    return tuple(
        (PitchToken.parse(p), DurationToken.parse(str(d)))
        for p, d in zip(query.seed_pitches, query.seed_durations)
    )


def _midi_url(query: GenerationQuery) -> str:
    from urllib.parse import urlencode

    params = {
        "year": query.year,
        "pitches": ",".join(str(p) for p, _ in query.seed),
        "durations": ",".join(str(d) for _, d in query.seed),
        "mxx": query.mxx,
        "mxl": query.mxl,
        "rng_seed": query.rng_seed,
    }
    if query.pitch_temperature is not None:
        params["pitch_temperature"] = query.pitch_temperature
    if query.duration_temperature is not None:
        params["duration_temperature"] = query.duration_temperature
    return "/api/midi?" + urlencode(params)


def create_app(
    checkpoint_path: Optional[str | Path] = None,
    data_dir: str | Path = "data",
    frontend_dir: Optional[str | Path] = None,
) -> FastAPI:
    state = ServiceState(
        Path(checkpoint_path) if checkpoint_path else None, Path(data_dir)
    )
    app = FastAPI(title="climatune", version="0.1.0")
    app.state.climatune = state
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )

    @app.exception_handler(RequestValidationError)
    async def invalid_request(request: Request, exc: RequestValidationError):
        return _error(400, json.loads(json.dumps(exc.errors(), default=str)))

    @app.get("/api/years")
    def years():
        if state.vectors is None:
            return _error(503, "temperature data not loaded; run preprocess")
        return [
            {
                "year": year,
                "pitch_temperature": round(state.vectors.pitch_temp[year], 6),
                "duration_temperature": round(state.vectors.duration_temp[year], 6),
            }
            for year in state.vectors.years
        ]

    def _build_query(query: ApiQuery, rng_seed: int) -> GenerationQuery:
        return GenerationQuery(
            year=query.year,
            seed=_parse_seed(query),
            mxx=query.mxx,
            mxl=query.mxl,
            sql=state.checkpoint.config.sql,
            rng_seed=rng_seed,
            pitch_temperature=query.pitch_temperature,
            duration_temperature=query.duration_temperature,
        )

    def _run_generation(query: GenerationQuery):
        result = generate(query, state.checkpoint, state.vectors)
        vocab = state.checkpoint.vocab
        t_pitch, t_dur = result.temperatures
        return {
            "year": query.year,
            "rng_seed": query.rng_seed,
            "sql": query.sql,
            "seed_length": result.seed_length,
            "temperatures": {"pitch": t_pitch, "duration": t_dur},
            "melody": [[str(p), str(d)] for p, d in result.melody.events],
            "attention": [list(map(float, row)) for row in result.attention],
            "pitch_candidates": {
                "tokens": list(vocab.pitch_tokens),
                "rows": [list(map(float, row)) for row in result.pitch_candidates],
            },
            "duration_candidates": {
                "tokens": list(vocab.duration_tokens),
                "rows": [list(map(float, row)) for row in result.duration_candidates],
            },
            "midi_url": _midi_url(query),
        }

    def _ready() -> Optional[JSONResponse]:
        if state.checkpoint is None:
            return _error(503, "model not loaded; train a checkpoint first")
        if state.vectors is None:
            return _error(503, "temperature data not loaded; run preprocess")
        return None

    @app.post("/api/generate")
    def api_generate(query: ApiQuery):
        not_ready = _ready()
        if not_ready is not None:
            return not_ready
        if query.year not in state.vectors and (
            query.pitch_temperature is None or query.duration_temperature is None
        ):
            years = state.vectors.years
            return _error(404, f"unknown year {query.year}; valid range {years[0]}..{years[-1]}")
        rng_seed = query.rng_seed
        if rng_seed is None:
            import secrets

            rng_seed = secrets.randbelow(2**31)
        try:
            return _run_generation(_build_query(query, rng_seed))
        except ClimatuneError as exc:
            return _error(400, str(exc))

    @app.get("/api/midi")
    def api_midi(
        year: int,
        pitches: str = "",
        durations: str = "",
        mxx: int = 8,
        mxl: int = 16,
        rng_seed: int = 0,
        pitch_temperature: Optional[float] = None,
        duration_temperature: Optional[float] = None,
        tempo: float = 90.0,
    ):
        from .export import to_midi

        not_ready = _ready()
        if not_ready is not None:
            return not_ready
        p_list = [p for p in pitches.split(",") if p]
        d_list = [d for d in durations.split(",") if d]
        api_query = ApiQuery(
            year=year,
            seed_pitches=p_list,
            seed_durations=d_list,
            mxx=mxx,
            mxl=mxl,
            rng_seed=rng_seed,
            pitch_temperature=pitch_temperature,
            duration_temperature=duration_temperature,
        )
        if year not in state.vectors and (
            pitch_temperature is None or duration_temperature is None
        ):
            years = state.vectors.years
            return _error(404, f"unknown year {year}; valid range {years[0]}..{years[-1]}")
        try:
            query = _build_query(api_query, rng_seed)
            result = generate(query, state.checkpoint, state.vectors)
        except ClimatuneError as exc:
            return _error(400, str(exc))
        stem = f"{year}_{rng_seed}"
        return Response(
            content=to_midi(result.melody, tempo),
            media_type="audio/midi",
            headers={"Content-Disposition": f'attachment; filename="{stem}.mid"'},
        )

    @app.get("/api/model")
    def api_model():
        if state.checkpoint is None:
            return _error(503, "model not loaded; train a checkpoint first")
        ckpt = state.checkpoint
        return {
            "hidden": ckpt.config.hidden,
            "sql": ckpt.config.sql,
            "d_pitch": ckpt.config.d_pitch,
            "d_duration": ckpt.config.d_duration,
            "optimizer": ckpt.config.optimizer,
            "pitch_vocab_size": ckpt.vocab.pitch_size,
            "duration_vocab_size": ckpt.vocab.duration_size,
            "pitch_vocab_hash": ckpt.vocab.pitch_hash(),
            "duration_vocab_hash": ckpt.vocab.duration_hash(),
            "checkpoint_sha256": state.checkpoint_hash,
            "snapshot_sha256": state.snapshot_hash,
            "history": state.history_summary,
        }

    if frontend_dir and Path(frontend_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(frontend_dir), html=True), name="ui")

    return app
