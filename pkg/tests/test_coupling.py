import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from dsmopt.coupling import (
    CouplingEvaluator,
    CouplingTerms,
    architecture_coupling,
    component_coupling,
    tally_terms,
)
from dsmopt.model import (
    Allocation,
    ExchangeKind,
    FunctionalExchange,
    derive_component_exchanges,
)
from dsmopt.synthetic import random_model

from conftest import make_model

# (d_i, c_i, d_o, c_o, fan_out, fan_in) -> expected, evaluated by hand.
COUPLING_TABLE = [
    ((0, 0, 0, 0, 0, 0), 0.0),
    ((1, 0, 0, 0, 0, 0), 0.0),
    ((1, 0, 1, 0, 1, 1), 0.75),
    ((2, 1, 0, 0, 0, 1), 0.8),
    ((2, 2, 0, 0, 0, 1), 1 - 1 / 7),
    ((1, 0, 0, 0, 0, 1), 0.5),
    ((0, 0, 1, 0, 1, 0), 0.5),
    ((0, 1, 0, 0, 0, 1), 2 / 3),
    ((0, 0, 0, 1, 1, 0), 2 / 3),
    ((3, 2, 4, 1, 2, 3), 1 - 1 / 18),
    ((5, 0, 5, 0, 3, 3), 1 - 1 / 16),
    ((0, 3, 0, 3, 1, 1), 1 - 1 / 14),
    ((10, 10, 10, 10, 5, 5), 1 - 1 / 70),
]


@pytest.mark.parametrize("terms, expected", COUPLING_TABLE)
def test_component_coupling_table(terms, expected):
    assert component_coupling(CouplingTerms(0, *terms)) == pytest.approx(expected, abs=1e-12)


def test_in_and_out_neighbour():
    # C1 receives f0 -> f1 from C0 and sends f1 -> f2 to C2.
    model = make_model(3, [(0, 1), (1, 2)], ["system"] * 3)
    terms = tally_terms(model, Allocation([0, 1, 2]), 1)
    assert terms == CouplingTerms(1, d_i=1, c_i=0, d_o=1, c_o=0, fan_out=1, fan_in=1)


def test_isolated_component():
    model = make_model(3, [(0, 1)], ["system"] * 3)
    assert tally_terms(model, Allocation([0, 0, 2]), 2) == CouplingTerms(2)


def test_two_exchanges_same_neighbour():
    model = make_model(3, [(0, 2), (1, 2)])
    terms = tally_terms(model, Allocation([0, 0, 1]), 1)
    assert (terms.d_i, terms.fan_in) == (2, 1)


def test_control_exchanges():
    model = make_model(2, [(0, 1, "control")])
    src = tally_terms(model, Allocation([0, 1]), 0)
    dst = tally_terms(model, Allocation([0, 1]), 1)
    assert (src.c_o, src.d_o, dst.c_i, dst.d_i) == (1, 0, 1, 0)
    # Control counts twice: 1 - 1/(2 + 1).
    assert component_coupling(src) == pytest.approx(2 / 3)


def test_unknown_component():
    model = make_model(2, [(0, 1)])
    with pytest.raises(ValueError):
        tally_terms(model, Allocation([0, 1]), 5)


def test_single_component_zero():
    model = make_model(3, [(0, 1), (1, 2)], ["system"])
    result = architecture_coupling(model, Allocation([0, 0, 0]))
    assert (result.total, result.interactions) == (0.0, 0)


def test_two_components_one_exchange():
    model = make_model(2, [(0, 1)])
    result = architecture_coupling(model, Allocation([0, 1]))
    assert result.per_component == ((0, 0.5), (1, 0.5))
    assert result.total == 1.0
    assert result.interactions == 1


def test_exclude_actors_drops_their_terms():
    model = make_model(2, [(0, 1)], ["system", "actor"], {1: 1})
    alloc = Allocation([0, 1])
    assert architecture_coupling(model, alloc).total == 1.0
    excluded = architecture_coupling(model, alloc, include_actors=False)
    assert excluded.total == 0.5
    assert excluded.interactions == 1


def terms_from_component_exchanges(model, alloc, component):
    """Independent route: read the terms off the component-exchange graph."""
    kind = {e.id: e.kind for e in model.exchanges}
    ces = derive_component_exchanges(model, alloc)
    outgoing = [ce for ce in ces if ce.source_component == component]
    incoming = [ce for ce in ces if ce.target_component == component]

    def count(ces, wanted):
        return sum(1 for ce in ces for i in ce.carried_exchanges if kind[i] == wanted)

    return CouplingTerms(
        component,
        d_i=count(incoming, ExchangeKind.DATA),
        c_i=count(incoming, ExchangeKind.CONTROL),
        d_o=count(outgoing, ExchangeKind.DATA),
        c_o=count(outgoing, ExchangeKind.CONTROL),
        fan_out=len(outgoing),
        fan_in=len(incoming),
    )


def model_and_allocation(seed, n, systems, actors, data):
    model = random_model(
        seed, n, systems, n_actors=actors, n_locked=min(n, actors), n_exchanges=2 * n,
        control_fraction=0.3, allow_parallel=True,
    )
    genes = []
    for f in model.functions:
        if f.locked:
            genes.append(f.pre_allocated_to)
        else:
            genes.append(data.draw(st.integers(0, systems - 1)))
    return model, Allocation(genes)


instances = st.tuples(
    st.integers(0, 10_000), st.integers(2, 12), st.integers(1, 5), st.integers(0, 2)
)


@settings(max_examples=80, deadline=None)
@given(instances, st.data())
def test_terms_match_component_exchange_route(inst, data):
    model, alloc = model_and_allocation(*inst, data)
    for comp in model.components:
        terms = tally_terms(model, alloc, comp.id)
        assert terms == terms_from_component_exchanges(model, alloc, comp.id)
        k = model.n_components
        assert terms.fan_out <= k - 1 and terms.fan_in <= k - 1
        assert (terms.d_i + terms.c_i > 0) == (terms.fan_in > 0)
        assert (terms.d_o + terms.c_o > 0) == (terms.fan_out > 0)


@settings(max_examples=80, deadline=None)
@given(instances, st.data())
def test_architecture_invariants(inst, data):
    model, alloc = model_and_allocation(*inst, data)
    result = architecture_coupling(model, alloc)
    values = [v for _, v in result.per_component]
    assert all(0.0 <= v < 1.0 for v in values)
    assert result.total == pytest.approx(math.fsum(values), abs=1e-12)
    assert (result.total == 0) == (result.interactions == 0)
    carried = sum(len(ce.carried_exchanges) for ce in derive_component_exchanges(model, alloc))
    assert result.interactions == carried


@settings(max_examples=60, deadline=None)
@given(instances, st.data())
def test_batch_evaluator_matches_reference(inst, data):
    model, alloc = model_and_allocation(*inst, data)
    for include_actors in (True, False):
        ref = architecture_coupling(model, alloc, include_actors=include_actors)
        evaluator = CouplingEvaluator(model, include_actors=include_actors, chunk_size=3)
        batch = np.array([alloc.assignment] * 5)
        assert evaluator(batch) == pytest.approx([ref.total] * 5, abs=1e-12)
        assert evaluator.interactions(batch).tolist() == [ref.interactions] * 5


@settings(max_examples=60, deadline=None)
@given(instances, st.data())
def test_component_relabeling_invariance(inst, data):
    model, alloc = model_and_allocation(inst[0], inst[1], inst[2], 0, data)
    k = model.n_components
    perm = data.draw(st.permutations(range(k)))
    relabeled = Allocation(perm[c] for c in alloc.assignment)
    a = architecture_coupling(model, alloc)
    b = architecture_coupling(model, relabeled)
    assert a.total == pytest.approx(b.total, abs=1e-12)
    assert a.interactions == b.interactions


@settings(max_examples=60, deadline=None)
@given(instances, st.data())
def test_adding_crossing_exchange_never_lowers_endpoint_coupling(inst, data):
    model, alloc = model_and_allocation(*inst, data)
    src, dst = data.draw(
        st.tuples(st.integers(0, model.n_functions - 1), st.integers(0, model.n_functions - 1))
    )
    if src == dst or alloc[src] == alloc[dst]:
        return
    kind = data.draw(st.sampled_from(list(ExchangeKind)))
    extra = FunctionalExchange(len(model.exchanges), src, dst, kind)
    bigger = replace(model, exchanges=model.exchanges + (extra,))
    for comp in (alloc[src], alloc[dst]):
        before = component_coupling(tally_terms(model, alloc, comp))
        after = component_coupling(tally_terms(bigger, alloc, comp))
        assert after >= before
