"""CLI entry point: check, construct, estimate-norm and gen."""

from __future__ import annotations

import sys

import click

from config import configure_logging, settings

from .exceptions import ConfigInvalid, NclpError

FIELD_FLAGS = {"dims": "--dim", "fmt": "--format", "check_name": "CHECK", "eps": "--eps"}


def _split(raw: tuple[str, ...]) -> tuple[str, ...]:
    """Values from repeated flags, each of which may hold a comma-separated list."""
    return tuple(v.strip() for item in raw for v in item.split(",") if v.strip())


def _int_list(raw: tuple[str, ...]) -> tuple:
    values = []
    for v in _split(raw):
        try:
            values.append(int(v))
        except ValueError:
            raise ConfigInvalid("dims", f"not an integer: {v!r}") from None
    return tuple(values)


def _emit_json(payload, out: str | None):
    from .serializers import dumps_json, write_json

    if out:
        write_json(out, payload)
    else:
        click.echo(dumps_json(payload))


def _fail(exc: NclpError):
    raise click.ClickException(f"{type(exc).__name__}: {exc}")


@click.group()
@click.option("--log-level", default=None, help="Root log level (defaults to NCLP_LOG_LEVEL).")
def main(log_level: str | None):
    """Noncommutative L_p toolkit: checks, constructions and random instances."""
    configure_logging(log_level)


# --- check -------------------------------------------------------------------

def _check_names() -> list[str]:
    from .harness.checks import CHECKS

    return sorted(CHECKS)


@main.command()
@click.argument("check_name", type=click.Choice(_check_names()))
@click.option("--p", "p", multiple=True, help="Exponent p (repeat or comma-separate for a grid).")
@click.option("--q", "q", multiple=True, help="Exponent q.")
@click.option("--r", "r", multiple=True, help="Exponent r.")
@click.option("--eta", multiple=True, help="Interpolation parameter η.")
@click.option("--t", "t", multiple=True, help="Scale t of the p,t,d norm.")
@click.option("--eps", multiple=True, help="Discretization grid ε.")
@click.option("--dim", "dims", multiple=True, help="Matrix dimension(s), 1..64.")
@click.option("--trials", type=int, default=None, help="Trials per grid point.")
@click.option("--seed", type=int, default=None, help="Master seed (falls back to NCLP_SEED).")
@click.option("--tol", type=float, default=None, help="Override the slack tolerance of every record.")
@click.option("--cond", type=float, default=None, help="Condition number of sampled densities.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Report file (stdout if omitted).")
@click.option("--jobs", type=int, default=None, help="Worker processes (defaults to NCLP_JOBS or all cores).")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]), default=None, help="Report format.")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="JSON file with the same fields; flags win.")
@click.option("--timing", is_flag=True, default=False, help="Add wall_time to the summary record.")
def check(check_name, p, q, r, eta, t, eps, dims, trials, seed, tol, cond, out, jobs, fmt, config_path, timing):
    """Run a registered check over a seeded grid of random instances."""
    from .harness import ExperimentConfig, records_of, run
    from .serializers import dumps_records, read_json

    try:
        file_data = read_json(config_path) if config_path else {}
        config = ExperimentConfig.from_mapping(
            file_data,
            check_name=check_name,
            dims=_int_list(dims),
            p=_split(p), q=_split(q), r=_split(r),
            eta=_split(eta), t=_split(t), eps=_split(eps),
            trials=trials,
            seed=seed,
            tol=tol,
            cond=cond,
            out=out,
            jobs=jobs if jobs is not None else file_data.get("jobs", settings.DEFAULT_JOBS),
            fmt=fmt,
            timing=timing or None,
        ).resolve()
    except ConfigInvalid as e:
        raise click.BadParameter(str(e), param_hint=FIELD_FLAGS.get(e.field, f"--{e.field}"))
    except NclpError as e:
        _fail(e)

    state = run(config)
    for note in state.get("audit_notes", []):
        click.echo(note, err=True)
    if state.get("summary") is None or state.get("error_message"):
        raise click.ClickException(state.get("error_message") or "run did not complete")
    if not config.out:
        click.echo(dumps_records(records_of(state), config.fmt), nl=False)
    summary = state["summary"]
    sys.exit(0 if summary["fail_count"] == 0 and summary["error_count"] == 0 else 1)


# --- construct ---------------------------------------------------------------

@main.group()
def construct():
    """Constructions on matrix files."""


def _exponent_options(*names):
    def decorate(f):
        for name in reversed(names):
            f = click.option(f"--{name}", required=True, help=f"Exponent {name} (number, a/b or inf).")(f)
        return f
    return decorate


@construct.command("embed-u")
@click.option("--x", "x_path", required=True, type=click.Path(exists=True))
@click.option("--density", "d_path", required=True, type=click.Path(exists=True))
@_exponent_options("q", "p")
@click.option("--out", default=None)
def embed_u_cmd(x_path, d_path, q, p, out):
    """u(x) with x = d^α u + u d^α."""
    from .embedding import embed_u
    from .serializers import load_density, load_matrix, matrix_to_dict

    try:
        u = embed_u(load_matrix(x_path), load_density(d_path), q, p)
    except NclpError as e:
        _fail(e)
    _emit_json(matrix_to_dict(u), out)


@construct.command("reconstruct")
@click.option("--u", "u_path", required=True, type=click.Path(exists=True))
@click.option("--density", "d_path", required=True, type=click.Path(exists=True))
@_exponent_options("q", "p")
@click.option("--out", default=None)
def reconstruct_cmd(u_path, d_path, q, p, out):
    """d^α u + u d^α."""
    from .embedding import reconstruct
    from .serializers import load_density, load_matrix, matrix_to_dict

    try:
        x = reconstruct(load_matrix(u_path), load_density(d_path), q, p)
    except NclpError as e:
        _fail(e)
    _emit_json(matrix_to_dict(x), out)


@construct.command("qr-project")
@click.option("--y", "y_path", required=True, type=click.Path(exists=True))
@click.option("--z", "z_path", required=True, type=click.Path(exists=True))
@click.option("--density", "d_path", required=True, type=click.Path(exists=True))
@_exponent_options("p", "r")
@click.option("--out", default=None)
def qr_project_cmd(y_path, z_path, d_path, p, r, out):
    """(L_{d^α} + R_{d^α})^{-1}(y + z)."""
    from .schur import qr_project
    from .serializers import load_density, load_matrix, matrix_to_dict

    try:
        x = qr_project(load_matrix(y_path), load_matrix(z_path), load_density(d_path), p, r)
    except NclpError as e:
        _fail(e)
    _emit_json(matrix_to_dict(x), out)


@construct.command("discretize")
@click.option("--density", "d_path", required=True, type=click.Path(exists=True))
@click.option("--eps", type=float, required=True)
@click.option("--out", default=None)
def discretize_cmd(d_path, eps, out):
    """Round the spectrum up to the grid λ_max(1+ε)^{-j}."""
    from .density import discretize, sandwich_constant
    from .serializers import density_to_dict, load_density

    try:
        d = load_density(d_path)
        d_eps = discretize(d, eps)
    except NclpError as e:
        _fail(e)
    click.echo(f"sandwich constant {sandwich_constant(d, d_eps):.12g}", err=True)
    _emit_json(density_to_dict(d_eps), out)


@construct.command("blocks")
@click.option("--density", "d_path", required=True, type=click.Path(exists=True))
@click.option("--cluster-tol", type=float, default=settings.CLUSTER_TOL, show_default=True)
def blocks_cmd(d_path, cluster_tol):
    """Distinct eigenvalues and the ranks of their spectral projections."""
    from .density import spectral_blocks
    from .serializers import load_density

    try:
        blocks = spectral_blocks(load_density(d_path), cluster_tol)
    except NclpError as e:
        _fail(e)
    _emit_json(blocks.export(), None)


@construct.command("heuristic-density")
@click.option("--basis", "manifest", required=True, type=click.Path(exists=True))
@click.option("--out", default=None)
def heuristic_density_cmd(manifest, out):
    """Normalized Σ|b_k|_s² of a subspace basis (heuristic, not optimal)."""
    from .embedding import heuristic_density
    from .serializers import density_to_dict, load_basis

    try:
        d = heuristic_density(load_basis(manifest))
    except NclpError as e:
        _fail(e)
    _emit_json(density_to_dict(d), out)


@construct.command("distortion")
@click.option("--basis", "manifest", required=True, type=click.Path(exists=True))
@click.option("--density", "d_path", required=True, type=click.Path(exists=True))
@_exponent_options("q", "p")
@click.option("--trials", type=int, default=2000, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", default=None)
def distortion_cmd(manifest, d_path, q, p, trials, seed, out):
    """Sampled min and max of ‖u(x)‖_p over unit vectors of the subspace."""
    from .embedding import subspace_distortion
    from .serializers import load_basis, load_density

    seed = settings.DEFAULT_SEED if seed is None else seed
    try:
        d = load_density(d_path)
        lower, upper = subspace_distortion(load_basis(manifest), d, q, p, trials, seed)
    except NclpError as e:
        _fail(e)
    _emit_json({"lower": lower, "upper": upper, "trials": trials, "seed": seed,
                "condition_d": d.condition}, out)


# --- estimate-norm -----------------------------------------------------------

NORM_MAPS = ("identity", "triangular", "min-multiplier", "resolvent")


@main.command("estimate-norm")
@click.argument("map_name", type=click.Choice(NORM_MAPS))
@click.option("--p", "p", required=True)
@click.option("--dim", type=int, default=4, show_default=True)
@click.option("--trials", type=int, default=20, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--density", "d_path", type=click.Path(exists=True), default=None,
              help="Density file; a seeded random density otherwise.")
@click.option("--cond", type=float, default=1e3, show_default=True)
@click.option("--beta", type=float, default=1.0, show_default=True)
@click.option("--eta", type=float, default=0.0, show_default=True)
@click.option("--part", type=click.Choice(["full", "upper", "lower"]), default="full", show_default=True,
              help="Restrict the map to a block triangle.")
@click.option("--jobs", type=int, default=1)
def estimate_norm(map_name, p, dim, trials, seed, d_path, cond, beta, eta, part, jobs):
    """Certified lower bound for the L_p → L_p norm of a block map."""
    import numpy as np

    from .randomgen import random_density, trial_rng
    from .schur import min_symbol, resolvent_symbol
    from .serializers import load_density
    from .triangular import BlockMap, operator_norm_estimate

    seed = settings.DEFAULT_SEED if seed is None else seed
    try:
        if d_path:
            d = load_density(d_path)
        else:
            d = random_density(trial_rng(seed, dim), dim, condition=cond)
        blocks = d.blocks
        if map_name == "identity":
            linear_map = BlockMap.identity(blocks)
        elif map_name == "triangular":
            linear_map = BlockMap.triangular(blocks)
        elif map_name == "min-multiplier":
            linear_map = BlockMap.from_table(blocks, min_symbol().table(blocks), map_name)
        else:
            linear_map = BlockMap.from_table(blocks, resolvent_symbol(beta, eta).table(blocks), map_name)
        if part != "full":
            mask = BlockMap.triangular(blocks, part).symbol
            linear_map = BlockMap.from_table(blocks, linear_map.symbol * mask, f"{linear_map.name}[{part}]")
        estimate = operator_norm_estimate(linear_map, p, d.dim, trials, seed, jobs=jobs,
                                          starts=[np.eye(d.dim)])
    except NclpError as e:
        _fail(e)
    _emit_json({"map": linear_map.name, "p": str(p), "dim": d.dim, "blocks": blocks.count,
                "trials": trials, "seed": seed, "estimate": estimate}, None)


# --- gen ---------------------------------------------------------------------

@main.command()
@click.argument("kind", type=click.Choice(["hermitian", "psd", "density", "upper_triangular"]))
@click.option("--dim", type=int, required=True)
@click.option("--seed", type=int, default=None)
@click.option("--out", default=None)
def gen(kind, dim, seed, out):
    """Seeded random matrix written as JSON."""
    from .randomgen import gen_random
    from .serializers import matrix_to_dict

    seed = settings.DEFAULT_SEED if seed is None else seed
    try:
        x = gen_random(kind, dim, seed)
    except NclpError as e:
        _fail(e)
    payload = matrix_to_dict(x)
    if kind == "density":
        payload["trace_tol"] = settings.TRACE_TOL
    _emit_json(payload, out)


if __name__ == "__main__":
    main()
