"""Command line front end: a thin client over the service handlers.

Each subcommand assembles the same request payload the HTTP endpoints take,
runs it in process (or POSTs it to --server when given), prints the report as
JSON on stdout with a human summary on stderr, and exits 0 on pass, 1 on a
mathematical failure or obstruction, 2 on malformed input.
"""

import json
import sys

import click

from .documents import InputError


def _load(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError("cannot read %s: %s" % (path, exc))


def _element_arg(text):
    text = text.strip()
    if text.startswith("{"):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise InputError("malformed element %r: %s" % (text, exc))
    return text


def _emit(report, quiet):
    click.echo(json.dumps(report, indent=2, sort_keys=True, default=str))
    if not quiet:
        from .service import RunReport

        if isinstance(report, dict):
            rep = RunReport.model_validate(report)
        else:
            rep = report
        click.echo(rep.summary(), err=True)
    verdict = report["verdict"] if isinstance(report, dict) else report.verdict
    if verdict == "pass":
        sys.exit(0)
    if verdict in ("fail", "obstruction"):
        sys.exit(1)
    sys.exit(2)


def _run(ctx, command, build_payload):
    quiet = ctx.obj.get("quiet", False)
    server = ctx.obj.get("server")
    try:
        payload = build_payload() if callable(build_payload) else build_payload
        if server:
            import httpx

            resp = httpx.post("%s/v1/%s" % (server.rstrip("/"), command),
                              json=payload, timeout=600.0)
            body = resp.json()
            if resp.status_code != 200:
                click.echo(json.dumps(body, indent=2), err=True)
                sys.exit(2)
            _emit(body, quiet)
        else:
            from .service import execute

            report = execute(command, payload)
            _emit(json.loads(report.model_dump_json(exclude_none=True)), quiet)
    except InputError as exc:
        click.echo(json.dumps({"verdict": "error", "detail": str(exc)}, indent=2))
        click.echo("input error: %s" % exc, err=True)
        sys.exit(2)


@click.group()
@click.option("--server", default=None, help="Base URL of a running service; default runs in process.")
@click.option("--quiet", is_flag=True, help="Suppress the human summary on stderr.")
@click.pass_context
def main(ctx, server, quiet):
    """Exact homotopy transfer and torsor lift verdicts."""
    ctx.ensure_object(dict)
    ctx.obj["server"] = server
    ctx.obj["quiet"] = quiet


@main.command("check-lie")
@click.option("--lie", "lie_path", required=True, type=click.Path(exists=True))
@click.pass_context
def check_lie(ctx, lie_path):
    """Validate the Lie axioms and nilpotency class of an algebra file."""
    _run(ctx, "check-lie", lambda: {"lie": _load(lie_path)})


@main.command("check-extension")
@click.option("--extension", "ext_path", required=True, type=click.Path(exists=True))
@click.pass_context
def check_extension(ctx, ext_path):
    """Validate splitting data of an extension and its assembled algebra."""
    _run(ctx, "check-extension", lambda: {"extension": _load(ext_path)})


@main.command("bch")
@click.option("--lie", "lie_path", required=True, type=click.Path(exists=True))
@click.option("--a", "a_text", required=True, help="Basis name or JSON element.")
@click.option("--b", "b_text", required=True, help="Basis name or JSON element.")
@click.pass_context
def bch(ctx, lie_path, a_text, b_text):
    """Exact group product in logarithmic coordinates."""
    _run(ctx, "bch", lambda: {"lie": _load(lie_path), "a": _element_arg(a_text), "b": _element_arg(b_text)})


@main.command("dupont-selftest")
@click.argument("n", type=click.IntRange(1, 3))
@click.option("--probe-degree", default=3, type=click.IntRange(1, 4))
@click.pass_context
def dupont_selftest(ctx, n, probe_degree):
    """Verify the five retraction identities of the simplex contraction."""
    _run(ctx, "dupont-selftest", lambda: {"n": n, "probe_degree": probe_degree})


@main.command("transfer")
@click.option("--lie", "lie_path", required=True, type=click.Path(exists=True))
@click.option("--simplex", default=1, type=click.IntRange(1, 3))
@click.option("--arity", default=3, type=click.IntRange(1, 4))
@click.pass_context
def transfer(ctx, lie_path, simplex, arity):
    """Induce the cochain structure on a simplex and check its identities."""
    _run(ctx, "transfer", lambda: {"lie": _load(lie_path), "simplex": simplex, "arity": arity})


@main.command("kuranishi")
@click.option("--lie", "lie_path", required=True, type=click.Path(exists=True))
@click.option("--simplex", default=1, type=click.IntRange(1, 2))
@click.option("--samples", default=5, type=click.IntRange(1, 50))
@click.pass_context
def kuranishi(ctx, lie_path, simplex, samples):
    """Round-trip the formal inverse on sampled Maurer-Cartan elements."""
    _run(ctx, "kuranishi", lambda: {"lie": _load(lie_path), "simplex": simplex, "samples": samples})


@main.command("cech")
@click.option("--cover", "cover_path", required=True, type=click.Path(exists=True))
@click.option("--lie", "lie_path", required=True, type=click.Path(exists=True))
@click.option("--jacobi-arity", default=3, type=click.IntRange(1, 4))
@click.pass_context
def cech(ctx, cover_path, lie_path, jacobi_arity):
    """Build the cover complex structure and check its identities."""
    _run(ctx, "cech", lambda: {"cover": _load(cover_path), "lie": _load(lie_path),
                       "jacobi_arity": jacobi_arity})


@main.command("cocycle-verify")
@click.option("--cover", "cover_path", required=True, type=click.Path(exists=True))
@click.option("--lie", "lie_path", required=True, type=click.Path(exists=True))
@click.option("--cocycle", "cocycle_path", required=True, type=click.Path(exists=True))
@click.pass_context
def cocycle_verify(ctx, cover_path, lie_path, cocycle_path):
    """Check the group cocycle condition on every triangle."""
    _run(ctx, "cocycle-verify", lambda: {"cover": _load(cover_path), "lie": _load(lie_path),
                                 "cocycle": _load(cocycle_path)})


@main.command("mc-check")
@click.option("--cover", "cover_path", required=True, type=click.Path(exists=True))
@click.option("--lie", "lie_path", required=True, type=click.Path(exists=True))
@click.option("--cocycle", "cocycle_path", required=True, type=click.Path(exists=True))
@click.pass_context
def mc_check(ctx, cover_path, lie_path, cocycle_path):
    """Check the Maurer-Cartan equation of the cover structure."""
    _run(ctx, "mc-check", lambda: {"cover": _load(cover_path), "lie": _load(lie_path),
                           "cocycle": _load(cocycle_path)})


@main.command("trivialize")
@click.option("--cover", "cover_path", required=True, type=click.Path(exists=True))
@click.option("--lie", "lie_path", required=True, type=click.Path(exists=True))
@click.option("--cocycle", "cocycle_path", required=True, type=click.Path(exists=True))
@click.option("--trivialization", "sigma_path", required=True, type=click.Path(exists=True))
@click.pass_context
def trivialize(ctx, cover_path, lie_path, cocycle_path, sigma_path):
    """Apply a change of trivialization to a certified cocycle."""
    _run(ctx, "trivialize", lambda: {"cover": _load(cover_path), "lie": _load(lie_path),
                             "cocycle": _load(cocycle_path),
                             "trivialization": _load(sigma_path)})


@main.command("lift-solve")
@click.option("--cover", "cover_path", required=True, type=click.Path(exists=True))
@click.option("--extension", "ext_path", required=True, type=click.Path(exists=True))
@click.option("--cocycle", "cocycle_path", required=True, type=click.Path(exists=True))
@click.pass_context
def lift_solve(ctx, cover_path, ext_path, cocycle_path):
    """Solve for a lift across the extension, or report the obstruction."""
    _run(ctx, "lift-solve", lambda: {"cover": _load(cover_path), "extension": _load(ext_path),
                             "cocycle": _load(cocycle_path)})


@main.command("lift-verify")
@click.option("--cover", "cover_path", required=True, type=click.Path(exists=True))
@click.option("--extension", "ext_path", required=True, type=click.Path(exists=True))
@click.option("--cocycle", "cocycle_path", required=True, type=click.Path(exists=True))
@click.option("--lift", "lift_path", required=True, type=click.Path(exists=True))
@click.pass_context
def lift_verify(ctx, cover_path, ext_path, cocycle_path, lift_path):
    """Check the twisted cocycle condition of a candidate lift."""
    _run(ctx, "lift-verify", lambda: {"cover": _load(cover_path), "extension": _load(ext_path),
                              "cocycle": _load(cocycle_path), "lift": _load(lift_path)})


@main.command("equiv-verify")
@click.option("--cover", "cover_path", required=True, type=click.Path(exists=True))
@click.option("--extension", "ext_path", required=True, type=click.Path(exists=True))
@click.option("--cocycle", "cocycle_path", required=True, type=click.Path(exists=True))
@click.option("--lift", "lift_path", required=True, type=click.Path(exists=True))
@click.option("--lift2", "lift2_path", required=True, type=click.Path(exists=True))
@click.option("--trivialization", "sigma_path", required=True, type=click.Path(exists=True))
@click.pass_context
def equiv_verify(ctx, cover_path, ext_path, cocycle_path, lift_path, lift2_path, sigma_path):
    """Check that a kernel trivialization carries one lift to another."""
    _run(ctx, "equiv-verify", lambda: {"cover": _load(cover_path), "extension": _load(ext_path),
                               "cocycle": _load(cocycle_path), "lift": _load(lift_path),
                               "lift2": _load(lift2_path),
                               "trivialization": _load(sigma_path)})


@main.command("bijection-test")
@click.option("--cover", "cover_path", required=True, type=click.Path(exists=True))
@click.option("--extension", "ext_path", required=True, type=click.Path(exists=True))
@click.option("--samples", default=5, type=click.IntRange(1, 50))
@click.pass_context
def bijection_test(ctx, cover_path, ext_path, samples):
    """Round-trip sampled certified lifts through the curved dictionary."""
    _run(ctx, "bijection-test", lambda: {"cover": _load(cover_path), "extension": _load(ext_path),
                                 "samples": samples})


@main.command("serve")
@click.option("--host", default="127.0.0.1")
@click.option("--port", default=8000, type=int)
def serve(host, port):
    """Run the HTTP service."""
    import uvicorn

    from .service import app

    uvicorn.run(app, host=host, port=port)


if __name__ == "__main__":
    main()
