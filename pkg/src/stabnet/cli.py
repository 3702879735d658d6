"""Command-line interface: detection, sweeps, generators and line-graph tools."""

from __future__ import annotations

import hashlib
import json
import sys
from pathlib import Path

import click

from . import __version__
from .analysis import detect_plateaus, nmi as nmi_value, sweep
from .errors import DomainError, GenerationError, ParseError, StabnetError
from .generators import HParams, arenas_h, ravasz_barabasi
from .graph import (
    Graph,
    Partition,
    line_graph,
    load_edge_list,
    load_gml,
    project_edge_partition,
    prune_leaves,
    reattach_leaves,
)
from .markov import MarkovModel, MarkovTimeGrid, build_time_grid
from .optimize import (
    OPTIMIZERS,
    OptimizerConfig,
    gso,
    gso_single_time,
    lso,
    msgso,
    refine_vertex_mover,
    rgso,
)

EXIT_USAGE = 2
EXIT_PARSE = 3
EXIT_DOMAIN = 4
EXIT_INTERNAL = 5


def _load_graph(path: Path) -> tuple[Graph, str]:
    text = path.read_text()
    digest = hashlib.sha256(text.encode()).hexdigest()
    if path.suffix.lower() == ".gml":
        return load_gml(text), digest
    return load_edge_list(text), digest


def _grid_options(f):
    f = click.option("--t-min", type=float, default=0.0, show_default=True)(f)
    f = click.option("--t-max", type=float, default=100.0, show_default=True)(f)
    f = click.option("--step", type=float, default=0.05, show_default=True,
                     help="Linear sampling step below the cutoff.")(f)
    f = click.option("--cutoff", type=float, default=2.0, show_default=True,
                     help="Switch from linear to log sampling here.")(f)
    f = click.option("--log-points", type=int, default=100, show_default=True)(f)
    return f


def _manifest(command: str, digest: str | None, **extra) -> dict:
    out = {"tool": "stabnet", "version": __version__, "command": command}
    if digest is not None:
        out["input_sha256"] = digest
    out.update(extra)
    return out


def _write_partition(path: Path, labels, p: Partition) -> None:
    lines = [f"{label}\t{int(c)}" for label, c in zip(labels, p.assignment)]
    path.write_text("\n".join(lines) + "\n")


def _read_partition(path: Path) -> dict[str, int]:
    out: dict[str, int] = {}
    for lineno, raw in enumerate(path.read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("\t") if "\t" in line else line.split()
        if len(parts) != 2:
            raise ParseError("expected 'label<TAB>community'", lineno)
        try:
            out[parts[0]] = int(parts[1])
        except ValueError:
            raise ParseError(f"non-integer community id {parts[1]!r}", lineno) from None
    if not out:
        raise ParseError(f"no assignments found in {path}")
    return out


@click.group()
@click.version_option(__version__, prog_name="stabnet")
def cli():
    """Multi-scale community detection by Markov-stability optimisation."""


@cli.command()
@click.argument("input_path", type=click.Path(exists=True, path_type=Path))
@click.option("-t", "time", type=float, default=None,
              help="Single Markov time (or window upper bound for windowed optimisers).")
@_grid_options
@click.option("--optimiser", type=click.Choice(OPTIMIZERS), default="gso-single",
              show_default=True)
@click.option("--model", type=click.Choice(["discrete", "continuous"]),
              default="discrete", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--msgso-k", type=int, default=2, show_default=True)
@click.option("--prune-leaves", "prune", is_flag=True,
              help="Remove degree-1 nodes first, reattach them afterwards.")
@click.option("--refine", is_flag=True,
              help="Vertex-mover post-processing on the detected partition.")
@click.option("-o", "--output", type=click.Path(path_type=Path), default=None,
              help="Output prefix (default: input stem).")
def detect(input_path, time, t_min, t_max, step, cutoff, log_points,
           optimiser, model, seed, msgso_k, prune, refine, output):
    """Detect one partition and write it plus a JSON summary."""
    g, digest = _load_graph(input_path)
    mdl = MarkovModel.from_string(model)
    work = g
    record = None
    if prune:
        work, record = prune_leaves(g)
    windowed = optimiser in ("gso", "rgso", "msgso")
    if windowed:
        upper = time if time is not None else t_max
        grid = build_time_grid(t_min, upper, step, cutoff, log_points)
    else:
        grid = MarkovTimeGrid.single(time if time is not None else t_max)
    cfg = OptimizerConfig(mdl, grid, seed, msgso_k)
    if optimiser == "gso":
        res = gso(work, cfg)
    elif optimiser == "rgso":
        res = rgso(work, cfg)
    elif optimiser == "msgso":
        res = msgso(work, cfg)
    elif optimiser == "lso":
        res = lso(work, float(grid.times[-1]), mdl, seed)
    else:
        res = gso_single_time(work, float(grid.times[-1]), mdl)
    part = res.best_partition
    if refine:
        part = refine_vertex_mover(work, part, cfg)
    if record is not None:
        part = reattach_leaves(part, record)
    from .stability import evaluate_partition

    vec, score = evaluate_partition(g, part, grid, mdl)
    prefix = output if output is not None else input_path.with_suffix("")
    part_path = Path(f"{prefix}.partition.tsv")
    json_path = Path(f"{prefix}.json")
    _write_partition(part_path, g.node_labels, part)
    summary = {
        "stability": score.value,
        "communities": part.community_count,
        "manifest": _manifest(
            "detect", digest, optimiser=optimiser, model=model, seed=seed,
            msgso_k=msgso_k, prune_leaves=prune, refine=refine,
            grid={"times": [float(x) for x in grid.times]},
        ),
    }
    json_path.write_text(json.dumps(summary, indent=2) + "\n")
    click.echo(f"communities={part.community_count} stability={score.value:.6f}")
    click.echo(f"wrote {part_path} and {json_path}")


def _records_to_csv(records) -> str:
    lines = ["t,communities,stability,nmi_prev"]
    for r in records:
        nmi_s = "" if r.nmi_prev is None else f"{r.nmi_prev:.6f}"
        lines.append(f"{r.time:g},{r.community_count},{r.stability:.10g},{nmi_s}")
    return "\n".join(lines) + "\n"


def _plateau_entry(p, labels) -> dict:
    return {
        "time_start": p.time_start,
        "time_end": p.time_end,
        "communities": p.community_count,
        "mean_nmi": p.mean_nmi,
        "n_points": p.n_points,
        "partition": {
            str(label): int(c)
            for label, c in zip(labels, p.representative_partition.assignment)
        },
    }


@cli.command("sweep")
@click.argument("input_path", type=click.Path(exists=True, path_type=Path))
@_grid_options
@click.option("--optimiser", type=click.Choice(OPTIMIZERS), default="gso-single",
              show_default=True)
@click.option("--model", type=click.Choice(["discrete", "continuous"]),
              default="discrete", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--msgso-k", type=int, default=2, show_default=True)
@click.option("--nmi-threshold", type=float, default=0.99, show_default=True)
@click.option("--min-points", type=int, default=3, show_default=True)
@click.option("--jobs", type=int, default=1, envvar="STABNET_JOBS", show_default=True)
@click.option("-o", "--output", type=click.Path(path_type=Path), default=None)
def sweep_cmd(input_path, t_min, t_max, step, cutoff, log_points, optimiser,
              model, seed, msgso_k, nmi_threshold, min_points, jobs, output):
    """Sweep the Markov time, writing per-time CSV and ranked plateau JSON."""
    g, digest = _load_graph(input_path)
    mdl = MarkovModel.from_string(model)
    grid = build_time_grid(t_min, t_max, step, cutoff, log_points)
    cfg = OptimizerConfig(mdl, None, seed, msgso_k)
    records = sweep(g, grid, optimiser, cfg, jobs=jobs)
    plateaus = detect_plateaus(records, nmi_threshold, min_points)
    prefix = output if output is not None else input_path.with_suffix("")
    csv_path = Path(f"{prefix}.sweep.csv")
    json_path = Path(f"{prefix}.plateaus.json")
    csv_path.write_text(_records_to_csv(records))
    doc = {
        "plateaus": [_plateau_entry(p, g.node_labels) for p in plateaus],
        "manifest": _manifest(
            "sweep", digest, optimiser=optimiser, model=model, seed=seed,
            msgso_k=msgso_k, nmi_threshold=nmi_threshold, min_points=min_points,
            grid={"t_min": t_min, "t_max": t_max, "step": step,
                  "cutoff": cutoff, "log_points": log_points},
        ),
    }
    json_path.write_text(json.dumps(doc, indent=2) + "\n")
    top = plateaus[0].community_count if plateaus else None
    click.echo(f"records={len(records)} plateaus={len(plateaus)} top={top}")
    click.echo(f"wrote {csv_path} and {json_path}")


@cli.command()
@click.argument("input_path", type=click.Path(exists=True, path_type=Path))
@click.option("-o", "--output", type=click.Path(path_type=Path), required=True)
def linegraph(input_path, output):
    """Write the line graph of the input as an edge list."""
    g, _ = _load_graph(input_path)
    lg, _mapping = line_graph(g)
    lines = [f"{lg.node_labels[u]} {lg.node_labels[v]} {w:g}" for u, v, w in lg.edges()]
    Path(output).write_text("\n".join(lines) + "\n")
    click.echo(f"wrote {output} ({lg.n} line-nodes)")


@cli.command()
@click.argument("input_path", type=click.Path(exists=True, path_type=Path))
@_grid_options
@click.option("--optimiser", type=click.Choice(OPTIMIZERS), default="gso-single",
              show_default=True)
@click.option("--model", type=click.Choice(["discrete", "continuous"]),
              default="discrete", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--nmi-threshold", type=float, default=0.99, show_default=True)
@click.option("--min-points", type=int, default=3, show_default=True)
@click.option("--jobs", type=int, default=1, envvar="STABNET_JOBS", show_default=True)
@click.option("-o", "--output", type=click.Path(path_type=Path), default=None)
def overlap(input_path, t_min, t_max, step, cutoff, log_points, optimiser,
            model, seed, nmi_threshold, min_points, jobs, output):
    """Sweep the line graph and project plateaus to overlapping communities."""
    g, digest = _load_graph(input_path)
    lg, mapping = line_graph(g)
    mdl = MarkovModel.from_string(model)
    grid = build_time_grid(t_min, t_max, step, cutoff, log_points)
    cfg = OptimizerConfig(mdl, None, seed)
    records = sweep(lg, grid, optimiser, cfg, jobs=jobs)
    plateaus = detect_plateaus(records, nmi_threshold, min_points)
    prefix = output if output is not None else input_path.with_suffix("")
    csv_path = Path(f"{prefix}.sweep.csv")
    json_path = Path(f"{prefix}.overlap.json")
    csv_path.write_text(_records_to_csv(records))
    entries = []
    for p in plateaus:
        memberships = project_edge_partition(mapping, p.representative_partition)
        entries.append(
            {
                "time_start": p.time_start,
                "time_end": p.time_end,
                "edge_communities": p.community_count,
                "mean_nmi": p.mean_nmi,
                "n_points": p.n_points,
                "memberships": {
                    g.node_labels[u]: sorted(int(x) for x in s)
                    for u, s in enumerate(memberships)
                },
            }
        )
    doc = {
        "plateaus": entries,
        "manifest": _manifest(
            "overlap", digest, optimiser=optimiser, model=model, seed=seed,
            nmi_threshold=nmi_threshold, min_points=min_points,
            grid={"t_min": t_min, "t_max": t_max, "step": step,
                  "cutoff": cutoff, "log_points": log_points},
        ),
    }
    json_path.write_text(json.dumps(doc, indent=2) + "\n")
    click.echo(f"records={len(records)} plateaus={len(plateaus)}")
    click.echo(f"wrote {csv_path} and {json_path}")


@cli.command()
@click.argument("family", type=click.Choice(["rb", "h"]))
@click.option("--steps", type=int, default=3, show_default=True,
              help="Hierarchy depth for the rb family.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("-o", "--output", type=click.Path(path_type=Path), required=True)
def generate(family, steps, seed, output):
    """Generate a synthetic benchmark network as an edge list."""
    if family == "rb":
        g = ravasz_barabasi(steps)
        params = {"steps": steps}
    else:
        g = arenas_h(HParams(seed=seed))
        params = {"seed": seed}
    lines = [f"{g.node_labels[u]} {g.node_labels[v]} {w:g}" for u, v, w in g.edges()]
    out = Path(output)
    out.write_text("\n".join(lines) + "\n")
    manifest = _manifest("generate", None, family=family, params=params,
                         nodes=g.n, edges=len(g.edges()))
    Path(f"{out}.manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    click.echo(f"wrote {out} ({g.n} nodes, {len(g.edges())} edges)")


@cli.command("nmi")
@click.argument("partition_a", type=click.Path(exists=True, path_type=Path))
@click.argument("partition_b", type=click.Path(exists=True, path_type=Path))
def nmi_cmd(partition_a, partition_b):
    """Normalised mutual information between two partition files."""
    pa = _read_partition(partition_a)
    pb = _read_partition(partition_b)
    if set(pa) != set(pb):
        only_a = sorted(set(pa) - set(pb))[:5]
        only_b = sorted(set(pb) - set(pa))[:5]
        raise DomainError(
            f"label sets differ (only in A: {only_a}, only in B: {only_b})"
        )
    labels = sorted(pa)
    a = Partition.from_labels([pa[x] for x in labels])
    b = Partition.from_labels([pb[x] for x in labels])
    click.echo(f"{nmi_value(a, b):.6f}")


def run() -> None:
    """Entry point with the documented exit-code mapping."""
    try:
        cli.main(standalone_mode=False)
    except click.UsageError as exc:
        exc.show()
        sys.exit(EXIT_USAGE)
    except click.ClickException as exc:
        exc.show()
        sys.exit(exc.exit_code)
    except click.exceptions.Abort:
        sys.exit(EXIT_USAGE)
    except ParseError as exc:
        click.echo(f"parse error: {exc}", err=True)
        sys.exit(EXIT_PARSE)
    except (DomainError, GenerationError) as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_DOMAIN)
    except StabnetError as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)
    except Exception as exc:  # pragma: no cover - defensive
        click.echo(f"internal error: {exc}", err=True)
        sys.exit(EXIT_INTERNAL)


if __name__ == "__main__":
    run()
