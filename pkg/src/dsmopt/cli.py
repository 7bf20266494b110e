"""Command-line entry point: ``dsmopt run | oracle | bench``.

``run`` loads a model, writes the initial matrix, optimizes the allocation,
then writes the clustered matrix, the allocation, the component exchanges
and a JSON report into one output directory.
"""

from __future__ import annotations

import argparse
import csv
import io
import itertools
import json
import logging
import os
import sys
import tempfile
from dataclasses import fields, replace
from pathlib import Path
from typing import Any, Sequence

from dsmopt.coupling import architecture_coupling
from dsmopt.dsm import build_dsm, cluster_order, format_matrix
from dsmopt.ga import RNG_NAME, GaConfig, optimize
from dsmopt.model import ArchitectureModel, ModelError, derive_component_exchanges, read_model
from dsmopt.oracle import DEFAULT_LIMIT, SearchSpaceTooLarge, enumerate_optimum

log = logging.getLogger("dsmopt")

FORMAT_VERSION = 1
GA_FIELDS = tuple(f.name for f in fields(GaConfig))
# CLI flag -> GaConfig field.
FLAG_FIELDS = {
    "seed": "seed",
    "population": "initial_population",
    "max_generations": "max_generations",
    "survivor_pct": "survivor_pct",
    "parent_pct": "parent_pct",
    "child_mutation_pct": "child_mutation_pct",
    "gene_mutation_pct": "gene_mutation_pct",
}
BENCH_COLUMNS = (
    *GA_FIELDS,
    "best_coupling",
    "interactions",
    "generations",
    "termination",
    "wall_time",
)


class CliError(Exception):
    pass


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise


def _json_text(doc: Any) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def _load_config(args: argparse.Namespace) -> GaConfig:
    base: dict[str, Any] = {}
    if args.config:
        try:
            base = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(base, dict):
            raise CliError(f"{args.config}: config must be a JSON object")
    for flag, field_name in FLAG_FIELDS.items():
        value = getattr(args, flag)
        if value is not None:
            base[field_name] = value
    try:
        return GaConfig.from_dict(base)
    except (TypeError, ValueError) as exc:
        raise CliError(f"invalid GA configuration: {exc}") from exc


def _component_exchange_csv(model: ArchitectureModel, exchanges) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["sourceComponent", "sourceName", "targetComponent", "targetName", "exchangeIds"])
    for ce in exchanges:
        writer.writerow(
            [
                ce.source_component,
                model.components[ce.source_component].name,
                ce.target_component,
                model.components[ce.target_component].name,
                ";".join(str(i) for i in ce.carried_exchanges),
            ]
        )
    return buf.getvalue()


def run_pipeline(
    model: ArchitectureModel,
    config: GaConfig,
    out_dir: Path,
    *,
    include_actors: bool = True,
) -> dict[str, Path]:
    """Execute the full pipeline and return the written artifact paths."""
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(f"cannot create output directory {out_dir}: {exc}") from exc
    stem = model.name
    names = {
        "initialMatrix": f"{stem}-initial.csv",
        "optimizedMatrix": f"{stem}-optimized.csv",
        "allocation": f"{stem}-allocation.json",
        "componentExchanges": f"{stem}-component-exchanges.csv",
        "report": f"{stem}-report.json",
    }

    dsm = build_dsm(model)
    initial_text = format_matrix(dsm)

    result = optimize(model, config, include_actors=include_actors)
    alloc = result.best.chromosome
    component_names = [c.name for c in model.components]
    optimized_text = format_matrix(
        dsm.reordered(cluster_order(model, alloc)), (alloc, component_names)
    )
    exchanges = derive_component_exchanges(model, alloc)
    coupling = architecture_coupling(model, alloc, include_actors=include_actors)

    report = {
        "formatVersion": FORMAT_VERSION,
        "model": stem,
        "functions": model.n_functions,
        "components": model.n_components,
        "preAllocatedFunctions": len(model.locked_positions),
        "includeActors": include_actors,
        "totalCoupling": coupling.total,
        "interactions": coupling.interactions,
        "perComponent": [
            {
                "id": cid,
                "name": model.components[cid].name,
                "kind": model.components[cid].kind.value,
                "coupling": value,
            }
            for cid, value in coupling.per_component
        ],
        "componentExchanges": len(exchanges),
        "ga": config.to_dict(),
        "seed": config.seed,
        "rng": RNG_NAME,
        "generations": result.generations_run,
        "evaluations": result.evaluations,
        "termination": result.termination.value,
        "history": list(result.history),
        "wallTime": result.wall_time,
        "artifacts": {k: v for k, v in names.items() if k != "report"},
    }

    texts = {
        "initialMatrix": initial_text,
        "optimizedMatrix": optimized_text,
        "allocation": _json_text(alloc.to_dict()),
        "componentExchanges": _component_exchange_csv(model, exchanges),
        "report": _json_text(report),
    }
    paths = {}
    try:
        for key, name in names.items():
            paths[key] = out_dir / name
            _atomic_write(paths[key], texts[key])
    except OSError as exc:
        raise CliError(f"cannot write artifacts to {out_dir}: {exc}") from exc
    log.info(
        "%s: coupling %.4f, %d interactions, %d generations (%s), %.2fs",
        stem,
        coupling.total,
        coupling.interactions,
        result.generations_run,
        result.termination.value,
        result.wall_time,
    )
    return paths


def _load_sweep(path: str) -> tuple[list[dict[str, Any]], list[int]]:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read sweep {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise CliError(f"{path}: sweep must be a JSON object")
    seeds = doc.get("seeds", [0])
    grid = {k: v for k, v in doc.items() if k != "seeds"}
    unknown = sorted(set(grid) - set(GA_FIELDS) - {"seed"})
    if unknown or "seed" in grid:
        raise CliError(f"{path}: unknown sweep key(s) {unknown or ['seed']}; use 'seeds'")
    for key, values in [*grid.items(), ("seeds", seeds)]:
        if not isinstance(values, list) or not values:
            raise CliError(f"{path}: grid '{key}' must be a non-empty list")
    keys = sorted(grid, key=GA_FIELDS.index)
    combos = [dict(zip(keys, values)) for values in itertools.product(*(grid[k] for k in keys))]
    return combos, seeds


def bench_rows(
    model: ArchitectureModel,
    combos: Sequence[dict[str, Any]],
    seeds: Sequence[int],
    base: GaConfig | None = None,
    *,
    include_actors: bool = True,
) -> list[dict[str, Any]]:
    base = base or GaConfig()
    if not combos or not seeds:
        raise CliError("empty parameter grid")
    rows = []
    for combo in combos:
        for seed in seeds:
            config = replace(base, **combo, seed=seed)
            result = optimize(model, config, include_actors=include_actors)
            coupling = architecture_coupling(
                model, result.best.chromosome, include_actors=include_actors
            )
            rows.append(
                {
                    **config.to_dict(),
                    "best_coupling": coupling.total,
                    "interactions": coupling.interactions,
                    "generations": result.generations_run,
                    "termination": result.termination.value,
                    "wall_time": round(result.wall_time, 4),
                }
            )
    return rows


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dsmopt",
        description="Allocate functions to logical components to minimize coupling.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    def model_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--model", required=True, help="model JSON document")
        p.add_argument(
            "--exclude-actors",
            action="store_true",
            help="leave actor components out of the coupling sum",
        )

    def ga_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON file with GA parameters (flags override it)")
        p.add_argument("--seed", type=int)
        p.add_argument("--population", type=int)
        p.add_argument("--max-generations", type=int)
        p.add_argument("--survivor-pct", type=float)
        p.add_argument("--parent-pct", type=float)
        p.add_argument("--child-mutation-pct", type=float)
        p.add_argument("--gene-mutation-pct", type=float)

    run = sub.add_parser("run", help="optimize a model and write all artifacts")
    model_args(run)
    ga_args(run)
    run.add_argument("--out-dir", required=True)

    oracle = sub.add_parser("oracle", help="exhaustive optimum for small models")
    model_args(oracle)
    oracle.add_argument("--limit", type=int, default=DEFAULT_LIMIT)

    bench = sub.add_parser("bench", help="parameter sweep, one CSV row per setting and seed")
    model_args(bench)
    ga_args(bench)
    bench.add_argument("--sweep", required=True, help="JSON object of parameter lists")
    bench.add_argument("--out", help="CSV output path (default: stdout)")
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(message)s",
    )
    include_actors = not args.exclude_actors
    try:
        model = read_model(args.model)
        if args.command == "run":
            paths = run_pipeline(
                model, _load_config(args), Path(args.out_dir), include_actors=include_actors
            )
            print(paths["report"])
        elif args.command == "oracle":
            result = enumerate_optimum(model, args.limit, include_actors=include_actors)
            print(_json_text(result.to_dict()), end="")
        elif args.command == "bench":
            combos, seeds = _load_sweep(args.sweep)
            rows = bench_rows(
                model, combos, seeds, _load_config(args), include_actors=include_actors
            )
            buf = io.StringIO()
            writer = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
            writer.writeheader()
            writer.writerows(rows)
            if args.out:
                _atomic_write(Path(args.out), buf.getvalue())
            else:
                sys.stdout.write(buf.getvalue())
    except ModelError as exc:
        print(f"error: invalid model: {exc}", file=sys.stderr)
        return 1
    except SearchSpaceTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (CliError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
