"""Coupling of logical components and of a whole architecture.

A component's coupling is ``1 - 1/(d_i + 2*c_i + d_o + 2*c_o + fan_out + fan_in)``
where the ``d``/``c`` terms count data/control exchanges crossing its
boundary and fan-out/fan-in count distinct partner components.  An isolated
component scores 0.  The architecture coupling is the plain sum.

``architecture_coupling`` is the readable reference.  ``CouplingEvaluator``
scores whole populations at once with numpy and is what the optimizer and
the exhaustive oracle call.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from dsmopt.model import Allocation, ArchitectureModel, ExchangeKind, check_allocation


@dataclass(frozen=True)
class CouplingTerms:
    component: int
    d_i: int = 0
    c_i: int = 0
    d_o: int = 0
    c_o: int = 0
    fan_out: int = 0
    fan_in: int = 0

    @property
    def denominator(self) -> int:
        return self.d_i + 2 * self.c_i + self.d_o + 2 * self.c_o + self.fan_out + self.fan_in


@dataclass(frozen=True)
class ArchitectureCoupling:
    per_component: tuple[tuple[int, float], ...]
    total: float
    interactions: int


def tally_terms(model: ArchitectureModel, alloc: Allocation, component: int) -> CouplingTerms:
    if not 0 <= component < model.n_components:
        raise ValueError(f"unknown component {component}")
    check_allocation(model, alloc)
    d_i = c_i = d_o = c_o = 0
    sends_to: set[int] = set()
    receives_from: set[int] = set()
    for e in model.exchanges:
        src, dst = alloc[e.source], alloc[e.target]
        if src == dst:
            continue
        control = e.kind == ExchangeKind.CONTROL
        if src == component:
            sends_to.add(dst)
            if control:
                c_o += 1
            else:
                d_o += 1
        elif dst == component:
            receives_from.add(src)
            if control:
                c_i += 1
            else:
                d_i += 1
    return CouplingTerms(component, d_i, c_i, d_o, c_o, len(sends_to), len(receives_from))


def component_coupling(terms: CouplingTerms) -> float:
    denominator = terms.denominator
    if denominator == 0:
        return 0.0
    return 1.0 - 1.0 / denominator


def architecture_coupling(
    model: ArchitectureModel, alloc: Allocation, *, include_actors: bool = True
) -> ArchitectureCoupling:
    """Per-component values, their sum, and the cross-component exchange count.

    With ``include_actors=False`` actor components are left out of the sum
    (their exchanges still count as interactions).
    """
    check_allocation(model, alloc)
    per_component = []
    for comp in model.components:
        if comp.is_actor and not include_actors:
            continue
        value = component_coupling(tally_terms(model, alloc, comp.id))
        per_component.append((comp.id, value))
    interactions = sum(1 for e in model.exchanges if alloc[e.source] != alloc[e.target])
    return ArchitectureCoupling(
        tuple(per_component), math.fsum(v for _, v in per_component), interactions
    )


class CouplingEvaluator:
    """Vectorized total coupling for a batch of chromosomes.

    Feasibility is not checked here; callers only feed chromosomes built
    from the model's locked genes and system components.
    """

    def __init__(
        self, model: ArchitectureModel, *, include_actors: bool = True, chunk_size: int = 8192
    ) -> None:
        self.model = model
        self.include_actors = include_actors
        self.chunk_size = chunk_size
        self.n_components = model.n_components
        self._src = np.array([e.source for e in model.exchanges], dtype=np.intp)
        self._dst = np.array([e.target for e in model.exchanges], dtype=np.intp)
        # Control parameters count twice in the denominator.
        self._weight = np.array(
            [2 if e.kind == ExchangeKind.CONTROL else 1 for e in model.exchanges], dtype=np.int64
        )
        mask = np.ones(self.n_components, dtype=bool)
        if not include_actors:
            mask[list(model.actor_ids)] = False
        self._component_mask = mask

    def __call__(self, chromosomes: np.ndarray) -> np.ndarray:
        chromosomes = np.atleast_2d(np.asarray(chromosomes, dtype=np.intp))
        out = np.empty(chromosomes.shape[0], dtype=float)
        for start in range(0, chromosomes.shape[0], self.chunk_size):
            block = chromosomes[start : start + self.chunk_size]
            out[start : start + block.shape[0]] = self._totals(block)
        return out

    def interactions(self, chromosomes: np.ndarray) -> np.ndarray:
        chromosomes = np.atleast_2d(np.asarray(chromosomes, dtype=np.intp))
        return (chromosomes[:, self._src] != chromosomes[:, self._dst]).sum(axis=1)

    def _totals(self, block: np.ndarray) -> np.ndarray:
        p, k = block.shape[0], self.n_components
        if self._src.size == 0:
            return np.zeros(p)
        src_c = block[:, self._src]
        dst_c = block[:, self._dst]
        cross = src_c != dst_c
        rows = np.broadcast_to(np.arange(p)[:, None], src_c.shape)[cross]
        sc, dc = src_c[cross], dst_c[cross]
        w = np.broadcast_to(self._weight, src_c.shape)[cross]

        # Parameter terms: each crossing exchange counts at both endpoints.
        params = np.bincount(rows * k + sc, weights=w, minlength=p * k)
        params += np.bincount(rows * k + dc, weights=w, minlength=p * k)

        # Fan terms: distinct ordered partner pairs per chromosome.
        links = np.zeros(p * k * k, dtype=bool)
        links[(rows * k + sc) * k + dc] = True
        links = links.reshape(p, k, k)
        fans = links.sum(axis=2) + links.sum(axis=1)

        denom = params.reshape(p, k) + fans
        safe = np.where(denom > 0, denom, 1.0)
        values = np.where(denom > 0, 1.0 - 1.0 / safe, 0.0)
        values[:, ~self._component_mask] = 0.0
        return values.sum(axis=1)
