"""Coupling-driven allocation of functions to logical components."""

from dsmopt.coupling import (
    ArchitectureCoupling,
    CouplingEvaluator,
    CouplingTerms,
    architecture_coupling,
    component_coupling,
    tally_terms,
)
from dsmopt.dsm import Dsm, build_dsm, cluster_order, parse_matrix, write_matrix
from dsmopt.ga import GaConfig, Individual, RunReport, Termination, optimize
from dsmopt.model import (
    Allocation,
    ArchitectureModel,
    ComponentDef,
    ComponentExchange,
    ComponentKind,
    ExchangeKind,
    FunctionalExchange,
    FunctionDef,
    InvalidAllocationError,
    ModelError,
    derive_component_exchanges,
    load_model,
    read_model,
    validate_allocation,
)
from dsmopt.oracle import OracleResult, SearchSpaceTooLarge, enumerate_optimum

__version__ = "0.1.0"
