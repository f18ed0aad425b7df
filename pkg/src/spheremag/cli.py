"""Thin command-line client for the spheremag service.

Commands read a JSON config, send it to the compute service (in-process by
default, or a remote instance via --server), and write the returned result
document plus CSV tables into the output directory.  Exit code 2 signals an
I/O or config/precondition failure; solver diagnostics live inside the result
document and never change the exit code.
"""

from __future__ import annotations

import asyncio
import json
import sys
from pathlib import Path

import click
import httpx
import pydantic

from . import schemas
from .documents import canonical_json


async def _post_inprocess(command: str, payload: dict) -> httpx.Response:
    from .service import app

    transport = httpx.ASGITransport(app=app)
    async with httpx.AsyncClient(transport=transport,
                                 base_url="http://spheremag") as client:
        return await client.post(f"/v1/{command}", json=payload, timeout=None)


def _fail(message: str):
    click.echo(f"error: {message}", err=True)
    sys.exit(2)


def _load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        _fail(f"cannot read config {path}: {exc}")


def _post(command: str, payload: dict, server: str | None) -> dict:
    if server:
        try:
            resp = httpx.post(f"{server.rstrip('/')}/v1/{command}", json=payload,
                              timeout=None)
        except httpx.HTTPError as exc:
            _fail(f"cannot reach server: {exc}")
    else:
        resp = asyncio.run(_post_inprocess(command, payload))
    if resp.status_code != 200:
        _fail(f"{command} rejected ({resp.status_code}): {resp.text}")
    return resp.json()


def _write_outputs(response: dict, out_dir: str):
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        tables = response.pop("tables", {})
        with open(out / "result.json", "w", encoding="utf-8", newline="\n") as fh:
            fh.write(canonical_json(response))
        for name, text in sorted(tables.items()):
            with open(out / f"{name}.csv", "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
    except OSError as exc:
        _fail(f"cannot write outputs: {exc}")
    click.echo(f"wrote {out / 'result.json'}")


def _validate(model, raw: dict):
    try:
        return model.model_validate(raw)
    except pydantic.ValidationError as exc:
        _fail(f"invalid config: {exc}")


def _run_simple(command: str, model, config: str, out: str, server: str | None):
    cfg = _validate(model, _load_json(config))
    response = _post(command, cfg.model_dump(), server)
    _write_outputs(response, out)


@click.group()
def main():
    """Spherical magnetization decomposition and reconstruction toolkit."""


def _common(fn):
    fn = click.option("--server", default=None, help="URL of a running service; "
                      "default runs in-process")(fn)
    fn = click.option("--out", default=".", help="output directory")(fn)
    fn = click.option("--config", required=True, type=click.Path(), help="JSON config")(fn)
    return fn


@main.command()
@_common
def synth(config, out, server):
    """Generate synthetic potential data for one of the built-in examples."""
    _run_simple("synth", schemas.SynthConfig, config, out, server)


@main.command()
@_common
def forward(config, out, server):
    """Evaluate the forward potential of an example magnetization on a sphere."""
    _run_simple("forward", schemas.ForwardConfig, config, out, server)


@main.command()
@_common
def decompose(config, out, server):
    """Decompose a field into its three spherical parts and report energies."""
    _run_simple("decompose", schemas.DecomposeConfig, config, out, server)


@main.command()
@_common
def reconstruct(config, out, server):
    """Penalized least-squares susceptibility reconstruction from synth data."""
    raw = _load_json(config)
    cfg = _validate(schemas.ReconstructConfig, raw)
    data_doc = _load_json(cfg.data_path)
    data = data_doc.get("result", {}).get("data")
    if data is None:
        _fail(f"{cfg.data_path} is not a synth result document (missing result.data)")
    request = {**cfg.model_dump(exclude={"data_path"}), "data": data}
    response = _post("reconstruct", request, server)
    _write_outputs(response, out)


@main.command()
@_common
def silent(config, out, server):
    """Construct silent magnetizations and report their silence scores."""
    _run_simple("silent", schemas.SilentConfig, config, out, server)


@main.command()
@_common
def existence(config, out, server):
    """Solve for an induced magnetization equivalent from outside to a target."""
    _run_simple("existence", schemas.ExistenceConfig, config, out, server)


@main.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve(host, port):
    """Run the compute service."""
    import uvicorn

    uvicorn.run("spheremag.service:app", host=host, port=port)


if __name__ == "__main__":
    main()
