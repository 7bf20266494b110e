from __future__ import annotations

from importlib import resources

import pytest

from dsmopt.model import (
    Allocation,
    ArchitectureModel,
    ComponentDef,
    ComponentKind,
    FunctionalExchange,
    FunctionDef,
    read_model,
)

# Visible part of the reference initial matrix: (function id, name, cells), cells
# in the column order of VISIBLE_COLUMNS, diagonal shown as the function tag.
VISIBLE_COLUMNS = [0, 2, 3, 4, 5, 9, 11, 12, 13, 14, 15, 16, 20]
VISIBLE_ROWS = """\
Emergency Landing	0	F1	0	0	0	0	0	0	0	0	0	0	0	0
Sense and Avoid Obstacles	2	0	F3	0	0	0	0	0	0	0	0	0	0	0
Build FlightPlan Relative to Aircraft Type	3	0	0	F4	0	1	0	0	0	0	0	0	0	0
CheckWinForce	4	0	0	0	F5	0	0	1	0	0	0	0	0	0
Retrieve POI	5	0	0	0	0	F6	0	0	0	0	0	0	0	0
Identify Absolute Aircraft Coordinates	9	0	0	0	0	1	F10	0	0	0	0	0	0	0
Manage Mission Modes	11	1	0	0	0	1	0	F12	0	0	0	1	0	0
Send Pictures to DB	12	0	0	0	0	0	0	0	F13	0	0	0	0	0
Record photos and videos	13	0	0	0	0	0	0	0	0	F14	1	0	0	0
Control Camera Orientation	14	0	0	0	0	0	0	0	0	0	F15	0	0	0
Manage Photos Recording	15	0	0	0	0	0	0	0	1	1	1	F16	0	0
Configure Flight Plan	16	0	0	1	0	0	0	0	0	0	0	0	F17	0
Send aircraft view	20	0	0	0	0	0	0	0	0	1	0	0	0	F21
"""


def visible_rows() -> list[tuple[str, int, list[str]]]:
    rows = []
    for line in VISIBLE_ROWS.splitlines():
        name, index, *cells = line.split("\t")
        rows.append((name, int(index), cells))
    return rows


def visible_exchanges() -> list[tuple[int, int]]:
    pairs = []
    for _, index, cells in visible_rows():
        for col, cell in zip(VISIBLE_COLUMNS, cells):
            if cell == "1":
                pairs.append((index, col))
    return pairs


@pytest.fixture(scope="session")
def aida() -> ArchitectureModel:
    path = resources.files("dsmopt") / "data" / "aida_light.json"
    with resources.as_file(path) as p:
        return read_model(p)


@pytest.fixture
def grouped_allocation(aida: ArchitectureModel) -> Allocation:
    """Free mission functions on Mission Mgt (1), free camera functions on Vision (2)."""
    genes = [f.pre_allocated_to for f in aida.functions]
    for fid in (0, 3, 4, 5, 9):
        genes[fid] = 1
    for fid in (12, 13, 14):
        genes[fid] = 2
    return Allocation(genes)


def make_model(
    n_functions: int,
    exchanges: list[tuple[int, int]] | list[tuple[int, int, str]],
    components: list[str] | None = None,
    locked: dict[int, int] | None = None,
) -> ArchitectureModel:
    """Small hand-built model; ``components`` lists kinds ('system'/'actor')."""
    kinds = components or ["system", "system"]
    locked = locked or {}
    funcs = [FunctionDef(i, f"f{i}", locked.get(i)) for i in range(n_functions)]
    comps = [ComponentDef(i, f"C{i}", ComponentKind(k)) for i, k in enumerate(kinds)]
    exs = []
    for i, ex in enumerate(exchanges):
        kind = ex[2] if len(ex) == 3 else "data"
        exs.append(FunctionalExchange(i, ex[0], ex[1], kind))
    return ArchitectureModel(tuple(funcs), tuple(comps), tuple(exs))


ACCEPTANCE: list[tuple[str, bool, str]] = []


class _Criterion:
    def __init__(self, name: str) -> None:
        self.name = name
        self.detail = ""

    def __enter__(self) -> "_Criterion":
        return self

    def __exit__(self, exc_type, exc, tb) -> bool:
        passed = exc_type is None
        detail = self.detail if passed else f"{self.detail} {exc_type.__name__}: {exc}".strip()
        ACCEPTANCE.append((self.name, passed, detail))
        print(f"{'PASS' if passed else 'FAIL'}  {self.name}  {detail}")
        return False


@pytest.fixture
def criterion():
    return _Criterion


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in ACCEPTANCE:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
