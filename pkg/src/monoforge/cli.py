"""Command-line front end.

The CLI is a thin client of the FastAPI service: it reads input files,
posts a request (in-process by default, or to a running server with
--server), writes the deterministic JSON report, and exits 0 when every
check passed, 1 when a check failed, 2 on usage or input errors.
--threads is accepted for interface compatibility but the lab is
single-threaded, so reports are byte-identical for any thread count by
construction.
"""

from __future__ import annotations

import json
import sys
import time
from pathlib import Path

import click

from .report import canonical_json


def _client(server):
    if server:
        import httpx

        return httpx.Client(base_url=server, timeout=600.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

        from .service import app

    return TestClient(app)


def io_options(f):
    f = click.option("--server", "server_", default=None,
                     help="Base URL of a running service; in-process if omitted.")(f)
    f = click.option("--out", "out_", default=None, type=click.Path(),
                     help="Write the JSON report here instead of stdout.")(f)
    return f


def _post(ctx, path, payload, out_=None, server_=None):
    started = time.monotonic()
    server = server_ or ctx.obj.get("server")
    out = out_ or ctx.obj.get("out")
    try:
        client = _client(server)
        resp = client.post(path, json=payload)
    except Exception as exc:  # connection/usage problems are exit-2 territory
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)
    if resp.status_code >= 400:
        try:
            detail = resp.json().get("detail", resp.text)
        except Exception:
            detail = resp.text
        click.echo(f"error ({resp.status_code}): {detail}", err=True)
        sys.exit(2)
    report = resp.json()
    text = canonical_json(report)
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)
    click.echo(f"wall time: {time.monotonic() - started:.3f}s", err=True)
    if not report.get("ok", False):
        click.echo("failed checks: " + ", ".join(report.get("failed", [])), err=True)
        sys.exit(1)
    sys.exit(0)


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(2)


def parse_dist(spec):
    """Parse a distribution spec string into a DistModel payload.

    Forms: uniform:N | weight:N:W | explicit:FILE.json |
    d0f2:L,N,M | d0real:MATRIX_FILE
    """
    kind, _, rest = spec.partition(":")
    if kind == "uniform":
        return {"kind": "uniform", "n": int(rest)}
    if kind == "weight":
        n, w = rest.split(":")
        return {"kind": "weightW", "n": int(n), "weight": int(w)}
    if kind == "explicit":
        obj = json.loads(_read(rest))
        return {"kind": "explicit", "n": obj["n"], "support": obj["support"]}
    if kind == "d0f2":
        l, n, m = (int(x) for x in rest.split(","))
        return {"kind": "d0f2", "code": {"l": l, "n": n, "m": m}}
    if kind == "d0real":
        return {"kind": "d0real", "matrix_text": _read(rest)}
    click.echo(f"error: unknown distribution spec {spec!r}", err=True)
    sys.exit(2)


def _need_seed(mode, seed):
    if mode == "mc" and seed is None:
        click.echo("error: --seed is required for mc mode", err=True)
        sys.exit(2)


@click.group()
@click.option("--server", default=None, help="Base URL of a running service; in-process if omitted.")
@click.option("--out", default=None, type=click.Path(), help="Write the JSON report here instead of stdout.")
@click.option("--threads", default=1, type=int, help="Accepted for compatibility; affects speed only.")
@click.pass_context
def main(ctx, server, out, threads):
    """Desk-scale lab for monotone-circuit separation constructions."""
    ctx.obj = {"server": server, "out": out, "threads": threads}


# -- poly --------------------------------------------------------------------


@main.group()
def poly():
    """Graph polynomials and their depth-3 circuits."""


@poly.command("build")
@click.option("--graph", required=True, type=click.Path(exists=True))
@click.option("--k", required=True, type=int)
@io_options
@click.pass_context
def poly_build(ctx, graph, k, out_, server_):
    _post(ctx, "/poly/build", {"graph_text": _read(graph), "k": k}, out_, server_)


@poly.command("sps")
@click.option("--graph", required=True, type=click.Path(exists=True))
@click.option("--k", required=True, type=int)
@io_options
@click.pass_context
def poly_sps(ctx, graph, k, out_, server_):
    _post(ctx, "/poly/sps", {"graph_text": _read(graph), "k": k}, out_, server_)


@poly.command("check-identity")
@click.option("--graph", required=True, type=click.Path(exists=True))
@click.option("--k", required=True, type=int)
@click.option("--mode", type=click.Choice(["exact", "mc"]), default="exact")
@click.option("--trials", default=50, type=int)
@click.option("--seed", default=None, type=int)
@io_options
@click.pass_context
def poly_check_identity(ctx, graph, k, mode, trials, seed, out_, server_):
    _need_seed(mode, seed)
    _post(ctx, "/poly/check-identity",
          {"graph_text": _read(graph), "k": k, "mode": mode,
           "trials": trials, "seed": seed}, out_, server_)


# -- code --------------------------------------------------------------------


def _code_opts(f):
    f = click.option("--points", default=None,
                     help="Comma-separated evaluation points (bit-encoded).")(f)
    f = click.option("--m", required=True, type=int)(f)
    f = click.option("--n", required=True, type=int)(f)
    f = click.option("--l", required=True, type=int)(f)
    return f


def _code_payload(l, n, m, points):
    payload = {"l": l, "n": n, "m": m}
    if points:
        payload["points"] = [int(x) for x in points.split(",")]
    return payload


@main.group()
def code():
    """Reed-Solomon codes and binary expansions."""


@code.command("rs")
@_code_opts
@io_options
@click.pass_context
def code_rs(ctx, l, n, m, points, out_, server_):
    _post(ctx, "/code/rs", _code_payload(l, n, m, points), out_, server_)


@code.command("expand")
@_code_opts
@io_options
@click.pass_context
def code_expand(ctx, l, n, m, points, out_, server_):
    _post(ctx, "/code/expand", _code_payload(l, n, m, points), out_, server_)


@code.command("stats")
@_code_opts
@io_options
@click.pass_context
def code_stats(ctx, l, n, m, points, out_, server_):
    _post(ctx, "/code/stats", _code_payload(l, n, m, points), out_, server_)


@code.command("independence")
@_code_opts
@click.option("--t", default=None, type=int)
@io_options
@click.pass_context
def code_independence(ctx, l, n, m, points, t, out_, server_):
    payload = _code_payload(l, n, m, points)
    if t is not None:
        payload["t"] = t
    _post(ctx, "/code/independence", payload, out_, server_)


# -- dist --------------------------------------------------------------------


@main.group()
def dist():
    """Hard input distributions."""


@dist.command("sample")
@click.option("--kind", type=click.Choice(["d1", "d0f2", "d0real"]), required=True)
@click.option("--seed", required=True, type=int)
@click.option("--trials", default=100, type=int)
@click.option("--m", default=None, type=int, help="Length (d1 kind).")
@click.option("--weight", default=None, type=int, help="Hamming weight (d1 kind).")
@click.option("--l", default=None, type=int, help="Field degree (d0f2 kind).")
@click.option("--n", default=None, type=int, help="Code dimension (d0f2 kind).")
@click.option("--code-m", default=None, type=int, help="Code length (d0f2 kind).")
@click.option("--matrix", default=None, type=click.Path(exists=True),
              help="q01 matrix file (d0real kind).")
@io_options
@click.pass_context
def dist_sample(ctx, kind, seed, trials, m, weight, l, n, code_m, matrix,
                out_, server_):
    payload = {"kind": kind, "seed": seed, "trials": trials}
    if kind == "d1":
        payload.update({"m": m, "weight": weight})
    elif kind == "d0f2":
        payload["code"] = {"l": l, "n": n, "m": code_m}
    else:
        payload["matrix_text"] = _read(matrix)
    _post(ctx, "/dist/sample", payload, out_, server_)


@dist.command("spread")
@click.option("--m", required=True, type=int)
@click.option("--w", "weight", required=True, type=int)
@click.option("--kmax", required=True, type=int)
@io_options
@click.pass_context
def dist_spread(ctx, m, weight, kmax, out_, server_):
    _post(ctx, "/dist/spread", {"m": m, "weight": weight, "kmax": kmax},
          out_, server_)


# -- matrix ------------------------------------------------------------------


@main.group()
def matrix():
    """Sparse 0/1 matrices over the rationals."""


@matrix.command("sample")
@click.option("--n", required=True, type=int)
@click.option("--m", default=None, type=int)
@click.option("--s", "s_override", default=None, type=int)
@click.option("--seed", required=True, type=int)
@io_options
@click.pass_context
def matrix_sample(ctx, n, m, s_override, seed, out_, server_):
    _post(ctx, "/matrix/sample",
          {"n": n, "m": m, "s_override": s_override, "seed": seed},
          out_, server_)


@matrix.command("well-behaved")
@click.option("--matrix", "matrix_path", required=True, type=click.Path(exists=True))
@click.option("--k", default=None, type=int)
@click.option("--t-max", default=6, type=int)
@click.option("--trials", default=200, type=int)
@click.option("--seed", default=0, type=int)
@click.option("--d1-weight", default=None, type=int)
@io_options
@click.pass_context
def matrix_well_behaved(ctx, matrix_path, k, t_max, trials, seed, d1_weight,
                        out_, server_):
    _post(ctx, "/matrix/well-behaved",
          {"matrix_text": _read(matrix_path), "k": k, "t_max": t_max,
           "trials": trials, "seed": seed, "d1_weight_override": d1_weight},
          out_, server_)


# -- rank / cb ---------------------------------------------------------------


@main.group()
def rank():
    """The rank function f_M."""


@rank.command("eval")
@click.option("--matrix", "matrix_path", required=True, type=click.Path(exists=True))
@click.option("--x", required=True, help="Bit string selecting columns.")
@io_options
@click.pass_context
def rank_eval(ctx, matrix_path, x, out_, server_):
    _post(ctx, "/rank/eval", {"matrix_text": _read(matrix_path), "x": x},
          out_, server_)


@main.group()
def cb():
    """Cauchy-Binet identity checks."""


@cb.command("verify")
@click.option("--matrix", "matrix_path", default=None, type=click.Path(exists=True))
@click.option("--n", default=None, type=int)
@click.option("--m", default=None, type=int)
@click.option("--count", default=1, type=int)
@click.option("--seed", default=0, type=int)
@io_options
@click.pass_context
def cb_verify(ctx, matrix_path, n, m, count, seed, out_, server_):
    payload = {"n": n, "m": m, "count": count, "seed": seed}
    if matrix_path:
        payload["matrix_text"] = _read(matrix_path)
    _post(ctx, "/cb/verify", payload, out_, server_)


# -- approx ------------------------------------------------------------------


@main.group()
def approx():
    """DNF approximation: sunflowers, plucking, gate-by-gate runs."""


@approx.command("pluck")
@click.option("--family", required=True, type=click.Path(exists=True),
              help="SetFamily JSON file.")
@click.option("--dist", "dist_spec", required=True,
              help="uniform:N | weight:N:W | explicit:FILE | d0f2:L,N,M | d0real:FILE")
@click.option("--eps", required=True)
@click.option("--r", required=True)
@click.option("--w", required=True, type=int)
@click.option("--mode", type=click.Choice(["exact", "mc"]), default="exact")
@click.option("--trials", default=4000, type=int)
@click.option("--seed", default=None, type=int)
@io_options
@click.pass_context
def approx_pluck(ctx, family, dist_spec, eps, r, w, mode, trials, seed,
                 out_, server_):
    _need_seed(mode, seed)
    _post(ctx, "/approx/pluck",
          {"family": json.loads(_read(family)), "dist": parse_dist(dist_spec),
           "eps": eps, "r": r, "w": w, "mode": mode, "trials": trials,
           "seed": seed}, out_, server_)


@approx.command("sunflower")
@click.option("--family", required=True, type=click.Path(exists=True))
@click.option("--members", required=True, help="Comma-separated member indices.")
@click.option("--dist", "dist_spec", required=True)
@click.option("--eps", required=True)
@click.option("--mode", type=click.Choice(["exact", "mc"]), default="exact")
@click.option("--trials", default=4000, type=int)
@click.option("--seed", default=None, type=int)
@io_options
@click.pass_context
def approx_sunflower(ctx, family, members, dist_spec, eps, mode, trials, seed,
                     out_, server_):
    _need_seed(mode, seed)
    _post(ctx, "/approx/sunflower",
          {"family": json.loads(_read(family)),
           "members": [int(x) for x in members.split(",")],
           "dist": parse_dist(dist_spec), "eps": eps, "mode": mode,
           "trials": trials, "seed": seed}, out_, server_)


@approx.command("run")
@click.option("--circuit", required=True, type=click.Path(exists=True),
              help="BoolCircuit JSON file.")
@click.option("--d0", "d0_spec", required=True)
@click.option("--d1", "d1_spec", required=True)
@click.option("--w", required=True, type=int)
@click.option("--r", required=True)
@click.option("--eps", required=True)
@click.option("--mode", type=click.Choice(["exact", "mc"]), default="exact")
@click.option("--trials", default=4000, type=int)
@click.option("--seed", default=None, type=int)
@io_options
@click.pass_context
def approx_run(ctx, circuit, d0_spec, d1_spec, w, r, eps, mode, trials, seed,
               out_, server_):
    _need_seed(mode, seed)
    _post(ctx, "/approx/run",
          {"circuit": json.loads(_read(circuit)), "d0": parse_dist(d0_spec),
           "d1": parse_dist(d1_spec), "w": w, "r": r, "eps": eps,
           "mode": mode, "trials": trials, "seed": seed}, out_, server_)


# -- experiments / serving ---------------------------------------------------


@main.command("experiment")
@click.argument("preset")
@click.option("--seed", required=True, type=int)
@click.option("--scale", multiple=True,
              help="Scale override key=value (repeatable).")
@io_options
@click.pass_context
def experiment(ctx, preset, seed, scale, out_, server_):
    opts = {}
    for item in scale:
        key, _, value = item.partition("=")
        try:
            opts[key] = int(value)
        except ValueError:
            opts[key] = value
    _post(ctx, f"/experiment/{preset}", {"seed": seed, "scale": opts},
          out_, server_)


@main.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8123, type=int)
def serve(host, port):
    """Run the lab as an HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
