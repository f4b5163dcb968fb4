"""Command-line interface.

Subcommands: ``sweep`` (run an experiment plan from a config file),
``gen`` (synthetic dataset generation), ``diag`` (dataset diagnostics and
the cluster plots' data), ``predict`` (one vote, for debugging).

Exit codes: 0 success, 1 usage error, 2 data error, 3 non-convergence.
"""
from __future__ import annotations

import sys
from pathlib import Path

import click

from .exceptions import ConvergenceError, DataError
from .harness import emit_report, load_plan, make_method, run_sweep
from .ingest import load_file
from .ratings import RatingMatrix, sparsity, vote_entropy
from .spectral import build_spectral_similarity, cluster_diagnostic
from .synthetic import (
    CorrelationTarget,
    correlation_distribution,
    offdiag_moments,
    sample_votes,
    sample_votes_bimodal,
    valid_correlation_matrix,
    write_metadata,
)
from .ingest import TimedTriple, write_triples


@click.group()
def cli():
    """Collaborative-filtering laboratory."""


@cli.command()
@click.option("--config", "config_path", required=True, type=click.Path(exists=False),
              help="Plain-text key=value experiment configuration.")
@click.option("--set", "overrides", multiple=True, metavar="KEY=VALUE",
              help="Override a config key (repeatable).")
@click.option("--out", default=None, type=click.Path(),
              help="Report CSV path (overrides the config's 'out').")
def sweep(config_path, overrides, out):
    """Run a sparsity sweep and write its CSV report."""
    override_map = {}
    for item in overrides:
        key, eq, value = item.partition("=")
        if not eq:
            raise click.UsageError(f"--set expects KEY=VALUE, got {item!r}")
        override_map[key.strip()] = value.strip()
    out_path = out or override_map.get("out")
    if out_path is None:
        try:
            from .harness import parse_config
            out_path = parse_config(Path(config_path).read_text(encoding="utf-8")).get("out")
        except OSError as exc:
            raise DataError(f"cannot read config {config_path}: {exc}") from exc
    if not out_path:
        raise click.UsageError("no report path: pass --out or set 'out' in the config")
    plan = load_plan(config_path, override_map)
    report = run_sweep(plan)
    emit_report(report, out_path)
    click.echo(f"wrote {len(report.rows)} rows to {out_path}")


@cli.command()
@click.option("--users", required=True, type=int)
@click.option("--items", required=True, type=int)
@click.option("--mu", required=True, type=float,
              help="Target mean of the pairwise correlations.")
@click.option("--sigma", required=True, type=float,
              help="Target standard deviation of the pairwise correlations.")
@click.option("--dist", default="uniform", type=click.Choice(["uniform", "gaussian"]))
@click.option("--bimodal", "delta", default=None, type=float,
              help="Shift the two user halves apart by +/- DELTA.")
@click.option("--seed", default=0, type=int)
@click.option("--out", required=True, type=click.Path())
def gen(users, items, mu, sigma, dist, delta, seed, out):
    """Generate a synthetic dataset as canonical triple CSV plus sidecar."""
    target = CorrelationTarget(n_users=users, mean=mu, std=sigma, dist=dist, seed=seed)
    correlation = valid_correlation_matrix(target)
    achieved_mean, achieved_std = offdiag_moments(correlation)
    if delta is not None:
        votes = sample_votes_bimodal(correlation, items, delta, seed=seed + 1)
    else:
        votes = sample_votes(correlation, items, seed=seed + 1)
    triples = [TimedTriple(u, i, v) for u, i, v in votes.to_triples()]
    write_triples(triples, out)
    write_metadata(str(out) + ".meta", {
        "users": users,
        "items": items,
        "mu": mu,
        "sigma": sigma,
        "dist": dist,
        "mode": votes.mode,
        "delta": "" if delta is None else delta,
        "seed": seed,
        "achieved_mean": f"{achieved_mean:.12g}",
        "achieved_std": f"{achieved_std:.12g}",
    })
    click.echo(f"wrote {len(triples)} votes to {out}")


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--format", "fmt", default="auto",
              type=click.Choice(["auto", "movielens", "jester", "triples"]))
@click.option("--min-overlap", "n_c", default=3, type=int)
@click.option("--bins", default=5, type=int, help="Entropy histogram bins.")
@click.option("--k", default=3, type=int,
              help="Eigenvectors for the cluster diagnostic (>= 3).")
@click.option("--embedding-out", default=None, type=click.Path(),
              help="Cluster diagnostic CSV (default: <in>.embedding.csv).")
def diag(in_path, fmt, n_c, bins, k, embedding_out):
    """Entropy, correlation distribution and spectral cluster diagnostics."""
    triples, scale = load_file(in_path, fmt)
    matrix = RatingMatrix.from_triples(
        [(t.user, t.item, t.vote) for t in triples], scale)
    click.echo(f"users={matrix.n_users} items={matrix.n_items} votes={matrix.n_votes}")
    click.echo(f"sparsity={sparsity(matrix):.12g}")
    click.echo(f"vote_entropy={vote_entropy(matrix, bins=bins):.12g}")
    summary = correlation_distribution(matrix, n_c=n_c)
    click.echo(f"correlation_mean={summary.mean:.12g}")
    click.echo(f"correlation_std={summary.std:.12g}")
    click.echo(f"correlation_pairs={summary.n_pairs}")

    _, spectrum = build_spectral_similarity(matrix, max(k, 3))
    if spectrum.degenerate:
        click.echo("degenerate_spectrum=true (embedding is non-unique)")
    y1, projection = cluster_diagnostic(spectrum)
    out_path = Path(embedding_out) if embedding_out else Path(str(in_path) + ".embedding.csv")
    with out_path.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write("user_index,y1,y2\n")
        for idx in range(len(y1)):
            handle.write(f"{idx},{y1[idx]:.12g},{projection[idx, 1]:.12g}\n")
    click.echo(f"wrote cluster diagnostic to {out_path}")


@cli.command()
@click.option("--in", "in_path", required=True, type=click.Path())
@click.option("--format", "fmt", default="auto",
              type=click.Choice(["auto", "movielens", "jester", "triples"]))
@click.option("--method", required=True, help="e.g. correlation(n_c=3) or spectral(k=8)")
@click.option("--user", required=True, type=int)
@click.option("--item", required=True, type=int)
def predict(in_path, fmt, method, user, item):
    """Predict one vote from the whole file treated as training data."""
    triples, scale = load_file(in_path, fmt)
    matrix = RatingMatrix.from_triples(
        [(t.user, t.item, t.vote) for t in triples], scale)
    if not 0 <= user < matrix.n_users:
        raise DataError(f"user {user} outside [0, {matrix.n_users})")
    if not 0 <= item < matrix.n_items:
        raise DataError(f"item {item} outside [0, {matrix.n_items})")
    model = make_method(method).fit(matrix)
    result = model.predict_pair(user, item)
    suffix = " (fallback)" if result.fallback else ""
    click.echo(f"{result.value:.12g}{suffix}")


def main(argv=None) -> int:
    """Entry point with the documented exit codes."""
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        return 1
    except ConvergenceError as exc:
        click.echo(f"error: {exc}", err=True)
        return 3
    except DataError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
