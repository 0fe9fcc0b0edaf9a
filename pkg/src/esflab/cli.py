"""Command-line front end: compute / decide / witness / verify / table1 /
check-bounds / sweep, with stable machine-readable output.

Exit codes are part of the contract: 0 ok, 1 verification failure,
2 verdict returned but uncertified, 3 no qualifying witness prime,
64 usage error, 65 unreadable data file. JSON payloads render all big
integers as decimal strings and are byte-stable for fixed inputs; only
the envelope's elapsed_ms varies between runs.
"""

from __future__ import annotations

import json
import os
import sys
import time
from pathlib import Path

import click

from . import __version__, bounds, decider, padic, primes, sweep
from .esf import esf
from .rational import approx_str, render

EXIT_VERIFY_FAIL = 1
EXIT_UNCERTIFIED = 2
EXIT_NO_WITNESS = 3
EXIT_USAGE = 64
EXIT_DATA = 65

click.UsageError.exit_code = EXIT_USAGE

JOBS_ENV_VAR = "ESFLAB_JOBS"


def _emit(command: str, payload, t0: float) -> None:
    envelope = {
        "command": command,
        "version": __version__,
        "payload": payload,
        "elapsed_ms": int((time.time() - t0) * 1000),
    }
    click.echo(json.dumps(envelope, indent=2, sort_keys=True))


def _default_jobs() -> int:
    raw = os.environ.get(JOBS_ENV_VAR)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            raise click.UsageError(f"{JOBS_ENV_VAR} must be an integer, got {raw!r}")
    return 1


def _load_config(path: str | None) -> dict:
    """Optional key=value file; recognized keys: sieve_limit, checkpoint_every."""
    if path is None:
        return {}
    out = {}
    for line_no, line in enumerate(Path(path).read_text().splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise click.UsageError(f"{path}:{line_no}: expected key=value")
        key, _, value = line.partition("=")
        key = key.strip()
        if key not in ("sieve_limit", "checkpoint_every"):
            raise click.UsageError(f"{path}:{line_no}: unknown key {key!r}")
        try:
            out[key] = int(value.strip())
        except ValueError:
            raise click.UsageError(f"{path}:{line_no}: {key} must be an integer")
    return out


@click.group()
@click.version_option(version=__version__)
@click.option("--config", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Optional key=value config file.")
@click.pass_context
def main(ctx, config):
    """Exact-arithmetic lab for symmetric functions of reciprocal
    arithmetic progressions."""
    ctx.ensure_object(dict)
    ctx.obj.update(_load_config(config))


def _abnk_options(fn):
    for name in ("k", "n", "b", "a"):
        fn = click.option(f"--{name}", type=int, required=True)(fn)
    return fn


def _check_query(a: int, b: int, n: int, k: int) -> None:
    if a < 1 or b < 1 or n < 1 or k < 1:
        raise click.UsageError("a, b, n, k must all be positive integers")
    if k > n:
        raise click.UsageError(f"k must not exceed n (got k={k}, n={n})")


@main.command()
@_abnk_options
@click.option("--format", "fmt", type=click.Choice(["json", "text"]), default="json")
def compute(a, b, n, k, fmt):
    """Exact value of the k-th symmetric function of the first n reciprocals."""
    t0 = time.time()
    _check_query(a, b, n, k)
    value = esf(a, b, n, k)
    exact, approx = render(value), approx_str(value, 12)
    if fmt == "text":
        click.echo(exact)
        click.echo(f"~ {approx}")
    else:
        _emit("compute", {"a": a, "b": b, "n": n, "k": k,
                          "value": exact, "decimal": approx}, t0)


@main.command()
@_abnk_options
@click.option("--mode", type=click.Choice(["theorem", "certify"]), default="certify")
def decide(a, b, n, k, mode):
    """Integer / non-integer verdict, with checkable evidence in certify mode."""
    t0 = time.time()
    _check_query(a, b, n, k)
    decision = decider.decide(a, b, n, k, mode=mode)
    payload = {"a": a, "b": b, "n": n, "k": k, "mode": mode}
    payload.update(decision.to_payload())
    _emit("decide", payload, t0)
    if not decision.certified:
        sys.exit(EXIT_UNCERTIFIED)


@main.command()
@_abnk_options
def witness(a, b, n, k):
    """Emit a valuation certificate from a witness prime, if one exists."""
    t0 = time.time()
    _check_query(a, b, n, k)
    cert = decider.find_witness_certificate(a, b, n, k)
    if cert is None:
        click.echo("no qualifying prime in (n/(k+1), n/k]", err=True)
        sys.exit(EXIT_NO_WITNESS)
    _emit("witness", cert.to_json_dict(), t0)


def _load_certificate(path: str) -> padic.ValuationCertificate:
    """Accepts a bare certificate object or a witness-command envelope."""
    data = json.loads(Path(path).read_text())
    if isinstance(data, dict) and "payload" in data and "command" in data:
        data = data["payload"]
    if not isinstance(data, dict):
        raise ValueError("certificate JSON must be an object")
    return padic.ValuationCertificate.from_json_dict(data)


@main.command()
@click.argument("certificate_file", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["fast", "exhaustive"]), default="fast")
def verify(certificate_file, mode):
    """Re-check a certificate file; exit 0 on pass, 1 on fail."""
    t0 = time.time()
    try:
        cert = _load_certificate(certificate_file)
    except (ValueError, json.JSONDecodeError) as exc:
        click.echo(f"unreadable certificate: {exc}", err=True)
        sys.exit(EXIT_DATA)
    result = padic.verify_certificate(cert, mode=mode)
    payload = {
        "mode": mode,
        "ok": result.ok,
        "failed_clause": result.failed_clause,
        "recomputed_valuation": result.recomputed_valuation,
        "certificate": cert.to_json_dict(),
    }
    _emit("verify", payload, t0)
    if not result.ok:
        sys.exit(EXIT_VERIFY_FAIL)


@main.command()
@click.option("--sieve-limit", type=int, default=None)
@click.option("--format", "fmt", type=click.Choice(["csv", "text", "json"]),
              default="csv")
@click.pass_context
def table1(ctx, sieve_limit, fmt):
    """The consecutive-prime-ratio schedule table (k, i_k, p_ik)."""
    t0 = time.time()
    limit = sieve_limit or ctx.obj.get("sieve_limit", primes.DEFAULT_SIEVE_LIMIT)
    table = primes.build_schedule_table(limit)
    if fmt == "csv":
        click.echo(table.to_csv(), nl=False)
    elif fmt == "text":
        click.echo(table.render_text())
    else:
        _emit("table1", {
            "rows": [{"k": k, "i_k": ik, "p_ik": pik} for k, ik, pik in table.rows],
            "sieve_limit": table.sieve_limit,
            "max_index": table.max_index,
            "max_prime": table.max_prime,
        }, t0)


@main.command("check-bounds")
@_abnk_options
def check_bounds(a, b, n, k):
    """Certified (0,1)-confinement threshold report for one (a,b,n,k)."""
    t0 = time.time()
    _check_query(a, b, n, k)
    if k < 2:
        raise click.UsageError("threshold predicates require k >= 2")
    report = bounds.below_one_report(a, b, n, k)
    payload = {"a": a, "b": b, "n": n, "k": k}
    payload.update(report.to_payload())
    _emit("check-bounds", payload, t0)


@main.command("sweep")
@click.option("--program", type=click.Choice(["1", "2", "custom"]), required=True)
@click.option("--a-min", type=int, default=None)
@click.option("--a-max", type=int, default=None)
@click.option("--b-min", type=int, default=None)
@click.option("--b-max", type=int, default=None)
@click.option("--n-max", type=int, default=None)
@click.option("--k-min", type=int, default=1)
@click.option("--k-max", type=int, default=None)
@click.option("--checkpoint", "checkpoint_dir",
              type=click.Path(file_okay=False), default=None)
@click.option("--smoke", is_flag=True, help="Cap n at 500 for CI-sized runs.")
@click.option("--jobs", type=int, default=None)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Also write the JSON report here.")
@click.option("--csv", "csv_out", type=click.Path(dir_okay=False), default=None,
              help="Also write the integer-hit rows as CSV here.")
@click.pass_context
def sweep_cmd(ctx, program, a_min, a_max, b_min, b_max, n_max, k_min, k_max,
              checkpoint_dir, smoke, jobs, out, csv_out):
    """Exhaustive integrality sweep; exit 0 iff the hits match prediction."""
    t0 = time.time()
    jobs = jobs if jobs is not None else _default_jobs()
    checkpoint_every = ctx.obj.get("checkpoint_every", sweep.DEFAULT_CHECKPOINT_EVERY)
    if program == "1":
        table = primes.build_schedule_table(
            ctx.obj.get("sieve_limit", primes.DEFAULT_SIEVE_LIMIT))
        report = sweep.run_program1(table, jobs=jobs, smoke=smoke,
                                    checkpoint_dir=checkpoint_dir,
                                    checkpoint_every=checkpoint_every)
    elif program == "2":
        report = sweep.run_program2(jobs=jobs, smoke=smoke,
                                    checkpoint_dir=checkpoint_dir,
                                    checkpoint_every=checkpoint_every)
    else:
        missing = [name for name, val in (("--a-min", a_min), ("--a-max", a_max),
                                          ("--b-min", b_min), ("--b-max", b_max),
                                          ("--n-max", n_max), ("--k-max", k_max))
                   if val is None]
        if missing:
            raise click.UsageError(
                "custom sweeps need " + ", ".join(missing))
        spec = sweep.SweepSpec(
            a_range=(a_min, a_max), b_range=(b_min, b_max),
            n_max=min(n_max, sweep.SMOKE_N_MAX) if smoke else n_max,
            k_min=k_min, k_max=k_max, checkpoint_dir=checkpoint_dir,
            checkpoint_every=checkpoint_every,
        )
        try:
            spec.validate()
        except ValueError as exc:
            raise click.UsageError(str(exc))
        report = sweep.run_custom(spec, jobs=jobs)
    if out:
        Path(out).write_text(report.to_json())
    if csv_out:
        Path(csv_out).write_text(report.hits_csv())
    _emit("sweep", report.to_payload(), t0)
    if not report.matches_expected:
        sys.exit(EXIT_VERIFY_FAIL)


if __name__ == "__main__":
    main()
