"""Perturbation algebra toolkit.

Symbolic engine for the perturbation algebra on s, t, x (``algebra``,
``catalog``), its exact linear realization on chain complexes (``hodge``),
A-infinity transfer and decomposition (``ainf``), module transfer by
admissible trees (``modules``) and the JSON/CLI layer (``problems``, ``cli``).
"""
__version__ = "0.1.0"

from .algebra import (
    AlgebraElement,
    NotInvertibleError,
    TensorSquareElement,
    TruncatedSeries,
    apply_phi,
    apply_rho,
    coproduct,
    counit,
    differential,
    gauge_action,
    invert_series,
    multiply,
    normal_form,
    series_constant,
    twisted_differential,
)
from .catalog import CATALOG, IdentityReport, verify_catalog
from .hodge import (
    ChainComplex,
    GradedMap,
    GradedSpace,
    HodgeData,
    Perturbation,
    build_hodge,
    evaluate_element,
    gauge_conjugation,
    make_perturbation,
    transferred_structure,
    verify_hodge,
)
from .ainf import (
    AInfMorphismData,
    AInfStructure,
    codifferential_check,
    coextend_hodge,
    convert_conventions,
    decomposition,
    morphism_check,
    transfer_minimal,
)
from .modules import (
    AdmissibleTree,
    AInfModuleStructure,
    enumerate_admissible_trees,
    transfer_module,
    tree_map,
)
