"""FastAPI compute service exposing the six pipeline commands.

Each endpoint accepts the corresponding config model and returns a
CommandResponse with the result document and the CSV plot tables.  Invalid
documents are rejected with 422 by validation; precondition violations raised
by the numerical core map to 400.
"""

from __future__ import annotations

from fastapi import FastAPI, HTTPException

from . import __version__, pipeline, schemas

app = FastAPI(title="spheremag", version=__version__)


def _run(command: str, cfg) -> schemas.CommandResponse:
    try:
        result, tables = pipeline.COMMANDS[command][1](cfg)
    except ValueError as exc:
        raise HTTPException(status_code=400, detail=str(exc)) from exc
    return schemas.CommandResponse(schema_version=1, command=command,
                                   result=result, tables=tables)


@app.get("/v1/health")
def health():
    return {"status": "ok", "version": __version__}


@app.post("/v1/synth", response_model=schemas.CommandResponse)
def synth(cfg: schemas.SynthConfig):
    return _run("synth", cfg)


@app.post("/v1/forward", response_model=schemas.CommandResponse)
def forward(cfg: schemas.ForwardConfig):
    return _run("forward", cfg)


@app.post("/v1/decompose", response_model=schemas.CommandResponse)
def decompose(cfg: schemas.DecomposeConfig):
    return _run("decompose", cfg)


@app.post("/v1/reconstruct", response_model=schemas.CommandResponse)
def reconstruct(cfg: schemas.ReconstructRequest):
    return _run("reconstruct", cfg)


@app.post("/v1/silent", response_model=schemas.CommandResponse)
def silent(cfg: schemas.SilentConfig):
    return _run("silent", cfg)


@app.post("/v1/existence", response_model=schemas.CommandResponse)
def existence(cfg: schemas.ExistenceConfig):
    return _run("existence", cfg)
