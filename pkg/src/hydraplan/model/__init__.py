"""Deterministic-equivalent model assembly."""

from .assemble import FAMILIES, AssembledModel, assemble
from .cases import PRESETS, CaseConfig, CaseError
from .catalog import DecisionVariableCatalog, RepurposeLink, build_catalog
from .emitters import Row, fixed_h2_scale

__all__ = ["FAMILIES", "PRESETS", "AssembledModel", "CaseConfig", "CaseError", "DecisionVariableCatalog",
           "RepurposeLink", "Row", "assemble", "build_catalog", "fixed_h2_scale"]
