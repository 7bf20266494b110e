"""Tool-neutral logical architecture model.

Functions, components (systems and actors), directed functional exchanges
and pre-allocation constraints, plus the allocation vector that maps every
function to a component.  Documents are plain JSON; see ``load_model``.
"""

from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence


class ModelError(ValueError):
    """Raised when a model document is malformed or violates an invariant.

    ``path`` locates the offending element, e.g. ``functions[3].preAllocatedTo``.
    """

    def __init__(self, message: str, path: str = "") -> None:
        self.path = path
        super().__init__(f"{path}: {message}" if path else message)


class InvalidAllocationError(ValueError):
    def __init__(self, violations: Sequence["Violation"]) -> None:
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid allocation: {lines}")


class ComponentKind(str, Enum):
    SYSTEM = "system"
    ACTOR = "actor"


class ExchangeKind(str, Enum):
    DATA = "data"
    CONTROL = "control"


@dataclass(frozen=True)
class FunctionDef:
    id: int
    name: str
    pre_allocated_to: int | None = None
    # Diagonal label in matrix output ("F5" etc.); falls back to the name.
    tag: str | None = None

    @property
    def locked(self) -> bool:
        return self.pre_allocated_to is not None


@dataclass(frozen=True)
class ComponentDef:
    id: int
    name: str
    kind: ComponentKind = ComponentKind.SYSTEM

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ComponentKind(self.kind))

    @property
    def is_actor(self) -> bool:
        return self.kind is ComponentKind.ACTOR


@dataclass(frozen=True)
class FunctionalExchange:
    id: int
    source: int
    target: int
    kind: ExchangeKind = ExchangeKind.DATA

    def __post_init__(self) -> None:
        object.__setattr__(self, "kind", ExchangeKind(self.kind))


@dataclass(frozen=True)
class Allocation:
    """Chromosome: ``assignment[f]`` is the component hosting function ``f``."""

    assignment: tuple[int, ...]

    def __init__(self, assignment: Iterable[int]) -> None:
        object.__setattr__(self, "assignment", tuple(int(c) for c in assignment))

    @classmethod
    def _of(cls, genes: tuple[int, ...]) -> "Allocation":
        # Skips int coercion; callers pass a tuple of plain ints.
        alloc = object.__new__(cls)
        object.__setattr__(alloc, "assignment", genes)
        return alloc

    def __len__(self) -> int:
        return len(self.assignment)

    def __getitem__(self, function_id: int) -> int:
        return self.assignment[function_id]

    def to_dict(self) -> dict[str, Any]:
        return {"assignment": list(self.assignment)}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "Allocation":
        if not isinstance(doc, Mapping) or set(doc) != {"assignment"}:
            raise ModelError("allocation document must have exactly the key 'assignment'")
        values = doc["assignment"]
        if not isinstance(values, list) or not all(_is_int(v) for v in values):
            raise ModelError("must be an array of integers", "assignment")
        return cls(values)


@dataclass(frozen=True)
class ComponentExchange:
    source_component: int
    target_component: int
    carried_exchanges: tuple[int, ...]


@dataclass(frozen=True)
class Violation:
    function: int
    rule: str
    message: str

    def __str__(self) -> str:
        return f"function {self.function} [{self.rule}]: {self.message}"


# Violation rule identifiers.
RULE_UNKNOWN_COMPONENT = "unknown-component"
RULE_LOCKED_GENE = "locked-gene"
RULE_ACTOR_TARGET = "actor-target"


@dataclass(frozen=True)
class ArchitectureModel:
    functions: tuple[FunctionDef, ...]
    components: tuple[ComponentDef, ...]
    exchanges: tuple[FunctionalExchange, ...]
    name: str = field(default="model", compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "functions", tuple(self.functions))
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "exchanges", tuple(self.exchanges))
        _check_invariants(self)

    @property
    def n_functions(self) -> int:
        return len(self.functions)

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def system_ids(self) -> tuple[int, ...]:
        return tuple(c.id for c in self.components if not c.is_actor)

    @property
    def actor_ids(self) -> tuple[int, ...]:
        return tuple(c.id for c in self.components if c.is_actor)

    @property
    def free_positions(self) -> tuple[int, ...]:
        return tuple(f.id for f in self.functions if not f.locked)

    @property
    def locked_positions(self) -> tuple[int, ...]:
        return tuple(f.id for f in self.functions if f.locked)

    def to_dict(self) -> dict[str, Any]:
        functions = []
        for f in self.functions:
            entry: dict[str, Any] = {"id": f.id, "name": f.name}
            if f.pre_allocated_to is not None:
                entry["preAllocatedTo"] = f.pre_allocated_to
            if f.tag is not None:
                entry["tag"] = f.tag
            functions.append(entry)
        return {
            "functions": functions,
            "components": [
                {"id": c.id, "name": c.name, "kind": c.kind.value} for c in self.components
            ],
            "exchanges": [
                {"id": e.id, "source": e.source, "target": e.target, "kind": e.kind.value}
                for e in self.exchanges
            ],
        }


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _check_dense(key: str, ids: list[int]) -> None:
    seen: set[int] = set()
    for pos, item_id in enumerate(ids):
        if item_id in seen:
            raise ModelError(f"duplicate id {item_id}", f"{key}[{pos}].id")
        seen.add(item_id)
    for pos, item_id in enumerate(ids):
        if item_id >= len(ids):
            raise ModelError(f"ids must be the dense range 0..{len(ids) - 1}", f"{key}[{pos}].id")


def _check_invariants(model: ArchitectureModel) -> None:
    # Paths below use document positions, so check before re-sorting by id.
    _check_dense("functions", [f.id for f in model.functions])
    _check_dense("components", [c.id for c in model.components])

    n_comp = len(model.components)
    for pos, f in enumerate(model.functions):
        if f.pre_allocated_to is not None and not 0 <= f.pre_allocated_to < n_comp:
            raise ModelError(
                f"function {f.id} ({f.name!r}) is pre-allocated to unknown component "
                f"{f.pre_allocated_to}",
                f"functions[{pos}].preAllocatedTo",
            )

    n_func = len(model.functions)
    seen: set[int] = set()
    for pos, e in enumerate(model.exchanges):
        if e.id in seen:
            raise ModelError(f"duplicate exchange id {e.id}", f"exchanges[{pos}].id")
        seen.add(e.id)
        for end in ("source", "target"):
            ref = getattr(e, end)
            if not 0 <= ref < n_func:
                raise ModelError(f"unknown function {ref}", f"exchanges[{pos}].{end}")
        if e.source == e.target:
            raise ModelError(f"self-loop on function {e.source}", f"exchanges[{pos}]")

    free = [f for f in model.functions if not f.locked]
    if free and not any(not c.is_actor for c in model.components):
        raise ModelError(
            f"{len(free)} free function(s) but no system component to host them", "components"
        )

    # Positional lookup (chromosome index = function id) needs id-sorted storage.
    object.__setattr__(model, "functions", tuple(sorted(model.functions, key=lambda f: f.id)))
    object.__setattr__(model, "components", tuple(sorted(model.components, key=lambda c: c.id)))


_FUNCTION_KEYS = {"id", "name", "preAllocatedTo", "tag"}
_COMPONENT_KEYS = {"id", "name", "kind"}
_EXCHANGE_KEYS = {"id", "source", "target", "kind"}


def _require_object(value: Any, path: str, allowed: set[str], required: set[str]) -> None:
    if not isinstance(value, dict):
        raise ModelError("expected an object", path)
    unknown = sorted(set(value) - allowed)
    if unknown:
        raise ModelError(f"unknown key(s) {unknown}", path)
    missing = sorted(required - set(value))
    if missing:
        raise ModelError(f"missing key(s) {missing}", path)


def _int_field(obj: Mapping[str, Any], key: str, path: str) -> int:
    value = obj[key]
    if not _is_int(value) or value < 0:
        raise ModelError("expected a non-negative integer", f"{path}.{key}")
    return value


def _str_field(obj: Mapping[str, Any], key: str, path: str) -> str:
    value = obj[key]
    if not isinstance(value, str):
        raise ModelError("expected a string", f"{path}.{key}")
    return value


def model_from_dict(doc: Any, name: str = "model") -> ArchitectureModel:
    """Build and validate a model from an already-parsed JSON document."""
    _require_object(doc, "$", {"functions", "components", "exchanges"},
                    {"functions", "components", "exchanges"})
    for key in ("functions", "components", "exchanges"):
        if not isinstance(doc[key], list):
            raise ModelError("expected an array", key)

    functions = []
    for pos, raw in enumerate(doc["functions"]):
        path = f"functions[{pos}]"
        _require_object(raw, path, _FUNCTION_KEYS, {"id", "name"})
        pre = raw.get("preAllocatedTo")
        if pre is not None:
            pre = _int_field(raw, "preAllocatedTo", path)
        tag = raw.get("tag")
        if tag is not None:
            tag = _str_field(raw, "tag", path)
        functions.append(
            FunctionDef(_int_field(raw, "id", path), _str_field(raw, "name", path), pre, tag)
        )

    components = []
    for pos, raw in enumerate(doc["components"]):
        path = f"components[{pos}]"
        _require_object(raw, path, _COMPONENT_KEYS, {"id", "name", "kind"})
        try:
            kind = ComponentKind(raw["kind"])
        except ValueError:
            raise ModelError("kind must be 'system' or 'actor'", f"{path}.kind") from None
        components.append(
            ComponentDef(_int_field(raw, "id", path), _str_field(raw, "name", path), kind)
        )

    exchanges = []
    for pos, raw in enumerate(doc["exchanges"]):
        path = f"exchanges[{pos}]"
        _require_object(raw, path, _EXCHANGE_KEYS, {"id", "source", "target"})
        try:
            kind = ExchangeKind(raw.get("kind", "data"))
        except ValueError:
            raise ModelError("kind must be 'data' or 'control'", f"{path}.kind") from None
        exchanges.append(
            FunctionalExchange(
                _int_field(raw, "id", path),
                _int_field(raw, "source", path),
                _int_field(raw, "target", path),
                kind,
            )
        )

    return ArchitectureModel(tuple(functions), tuple(components), tuple(exchanges), name=name)


def load_model(document: str | bytes, name: str = "model") -> ArchitectureModel:
    """Parse a JSON model document and validate it.

    Raises ``ModelError`` for malformed JSON (path ``$``) and for every
    invariant breach, with the path of the offending element.
    """
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as exc:
        raise ModelError(f"malformed JSON: {exc}", "$") from exc
    return model_from_dict(doc, name=name)


def read_model(path: str | Path) -> ArchitectureModel:
    path = Path(path)
    return load_model(path.read_text(encoding="utf-8"), name=path.stem)


def dump_model(model: ArchitectureModel) -> str:
    return json.dumps(model.to_dict(), indent=2) + "\n"


def validate_allocation(model: ArchitectureModel, alloc: Allocation) -> list[Violation]:
    """Return every broken allocation rule; empty means the allocation is feasible."""
    if len(alloc) != model.n_functions:
        raise ValueError(
            f"allocation has {len(alloc)} entries, model has {model.n_functions} functions"
        )
    violations = []
    n_comp = model.n_components
    for f in model.functions:
        comp = alloc[f.id]
        if not 0 <= comp < n_comp:
            violations.append(
                Violation(f.id, RULE_UNKNOWN_COMPONENT, f"component {comp} does not exist")
            )
        elif f.locked and comp != f.pre_allocated_to:
            violations.append(
                Violation(
                    f.id,
                    RULE_LOCKED_GENE,
                    f"pre-allocated to component {f.pre_allocated_to}, assigned to {comp}",
                )
            )
        elif not f.locked and model.components[comp].is_actor:
            violations.append(
                Violation(
                    f.id,
                    RULE_ACTOR_TARGET,
                    f"free function assigned to actor component {comp}",
                )
            )
    return violations


def check_allocation(model: ArchitectureModel, alloc: Allocation) -> None:
    violations = validate_allocation(model, alloc)
    if violations:
        raise InvalidAllocationError(violations)


def derive_component_exchanges(
    model: ArchitectureModel, alloc: Allocation
) -> list[ComponentExchange]:
    """Group cross-boundary functional exchanges by ordered component pair.

    Intra-component exchanges are dropped.  Output is sorted by
    ``(source_component, target_component)``; carried ids keep model order.
    """
    check_allocation(model, alloc)
    carried: dict[tuple[int, int], list[int]] = defaultdict(list)
    for e in model.exchanges:
        a, b = alloc[e.source], alloc[e.target]
        if a != b:
            carried[(a, b)].append(e.id)
    return [ComponentExchange(a, b, tuple(ids)) for (a, b), ids in sorted(carried.items())]
