"""Exhaustive search over every feasible allocation of a small model.

Plain enumeration, no pruning: free genes range over the system components in
lexicographic chromosome order, and every chromosome is scored.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from dsmopt.coupling import CouplingEvaluator
from dsmopt.model import Allocation, ArchitectureModel

DEFAULT_LIMIT = 10**7
# Scores within this distance of the minimum count as optimal (float summation noise).
TIE_TOLERANCE = 1e-9


class SearchSpaceTooLarge(ValueError):
    def __init__(self, n_systems: int, n_free: int, limit: int) -> None:
        self.count = n_systems**n_free
        self.limit = limit
        super().__init__(
            f"search space {n_systems}^{n_free} = {self.count} allocations exceeds limit {limit}"
        )


@dataclass(frozen=True)
class OracleResult:
    optimum: float
    optimal_allocations: tuple[Allocation, ...]
    enumerated: int

    def to_dict(self) -> dict:
        return {
            "optimum": self.optimum,
            "enumerated": self.enumerated,
            "optimalAllocations": [list(a.assignment) for a in self.optimal_allocations],
        }


def enumerate_optimum(
    model: ArchitectureModel,
    limit: int = DEFAULT_LIMIT,
    *,
    include_actors: bool = True,
    chunk_size: int = 1 << 15,
) -> OracleResult:
    free = np.array(model.free_positions, dtype=np.intp)
    systems = np.array(model.system_ids, dtype=np.intp)
    n_free, n_sys = free.size, systems.size
    total = n_sys**n_free
    if total > limit:
        raise SearchSpaceTooLarge(n_sys, n_free, limit)

    template = np.zeros(model.n_functions, dtype=np.intp)
    for f in model.functions:
        if f.locked:
            template[f.id] = f.pre_allocated_to
    evaluate = CouplingEvaluator(model, include_actors=include_actors)
    # Most significant digit first, so index order is lexicographic order
    # (system ids are sorted ascending).
    place = n_sys ** np.arange(n_free - 1, -1, -1, dtype=np.int64)

    optimum = np.inf
    winners: list[np.ndarray] = []
    for start in range(0, total, chunk_size):
        index = np.arange(start, min(start + chunk_size, total), dtype=np.int64)
        block = np.tile(template, (index.size, 1))
        if n_free:
            digits = (index[:, None] // place) % n_sys
            block[:, free] = systems[digits]
        scores = evaluate(block)
        low = scores.min()
        if low < optimum - TIE_TOLERANCE:
            optimum = float(low)
            winners = []
        elif low < optimum:
            optimum = float(low)
        winners.append(block[scores <= optimum + TIE_TOLERANCE])

    rows = np.concatenate(winners) if winners else np.empty((0, model.n_functions), np.intp)
    # Earlier chunks may hold near-ties that a later, slightly lower minimum excludes.
    final = evaluate(rows) if rows.size else np.empty(0)
    keep = rows[final <= optimum + TIE_TOLERANCE]
    return OracleResult(
        optimum=optimum,
        optimal_allocations=tuple(Allocation(r) for r in keep.tolist()),
        enumerated=total,
    )
