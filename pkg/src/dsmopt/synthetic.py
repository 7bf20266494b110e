"""Seeded random architecture models for tests, benchmarks and scale checks."""

from __future__ import annotations

import numpy as np

from dsmopt.model import (
    ArchitectureModel,
    ComponentDef,
    ComponentKind,
    ExchangeKind,
    FunctionalExchange,
    FunctionDef,
)


def random_model(
    seed: int,
    n_functions: int,
    n_systems: int,
    *,
    n_actors: int = 0,
    n_locked: int = 0,
    n_exchanges: int | None = None,
    control_fraction: float = 0.0,
    allow_parallel: bool = False,
    name: str | None = None,
) -> ArchitectureModel:
    """Build a valid model.

    Actors come after the systems in id order and each receives at least one
    locked function when ``n_locked`` allows.  Exchanges are drawn without
    repeating a (source, target) pair unless ``allow_parallel`` is set.
    """
    if n_systems < 1:
        raise ValueError("need at least one system component")
    if n_locked > n_functions:
        raise ValueError("cannot lock more functions than exist")
    rng = np.random.default_rng(seed)
    n_components = n_systems + n_actors
    components = [ComponentDef(i, f"S{i}") for i in range(n_systems)]
    components += [
        ComponentDef(n_systems + i, f"A{i}", ComponentKind.ACTOR) for i in range(n_actors)
    ]

    locked = rng.choice(n_functions, size=n_locked, replace=False).tolist()
    targets = rng.integers(0, n_components, size=n_locked).tolist()
    for i in range(min(n_actors, n_locked)):
        targets[i] = n_systems + i
    pre = dict(zip(locked, targets))
    functions = [
        FunctionDef(i, f"Function {i}", pre.get(i), f"F{i + 1}") for i in range(n_functions)
    ]

    if n_exchanges is None:
        n_exchanges = n_functions
    max_pairs = n_functions * (n_functions - 1)
    if not allow_parallel and n_exchanges > max_pairs:
        raise ValueError(f"at most {max_pairs} distinct exchanges for {n_functions} functions")
    exchanges: list[FunctionalExchange] = []
    seen: set[tuple[int, int]] = set()
    while len(exchanges) < n_exchanges:
        s, t = rng.choice(n_functions, size=2, replace=False).tolist()
        if not allow_parallel and (s, t) in seen:
            continue
        seen.add((s, t))
        kind = ExchangeKind.CONTROL if rng.random() < control_fraction else ExchangeKind.DATA
        exchanges.append(FunctionalExchange(len(exchanges), s, t, kind))

    return ArchitectureModel(
        tuple(functions),
        tuple(components),
        tuple(exchanges),
        name=name or f"synthetic-{seed}",
    )
