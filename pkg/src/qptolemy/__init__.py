"""Flip words on ideal triangulations and the central exponents of their relations.

Labeled triangulations and flips live in :mod:`qptolemy.triangulation`;
words, rewrite rules and proof scripts in :mod:`qptolemy.words`; the bounded
rewrite search in :mod:`qptolemy.simplify`; the shear-coordinate oracle in
:mod:`qptolemy.shear`; fixtures and twist constructors in
:mod:`qptolemy.catalog` and :mod:`qptolemy.reconstruct`; relation checking,
lift normalization and the class bookkeeping in :mod:`qptolemy.extension`.
"""
from .catalog import (
    FixtureDataset,
    TwistEntry,
    conjugated_twist,
    elementary_twist,
    load_fixture,
    validate_fixture,
)
from .errors import PtolemyError
from .extension import (
    ExtensionClass,
    RelationReport,
    RelationSpec,
    build_relator,
    cohomology_class,
    normalize_lifts,
    verify_relation,
)
from .perm import Perm
from .reconstruct import reconstruct_triangulation
from .shear import identity_residual, word_action
from .simplify import auto_simplify, relator_phase
from .triangulation import Triangulation, apply_permutation, flip, labeled_equal
from .words import Flip, FlipWord, ProofScript, Step, check_script, compose, expand_ad, invert, replay

__version__ = "0.1.0"

__all__ = [
    "ExtensionClass",
    "FixtureDataset",
    "Flip",
    "FlipWord",
    "Perm",
    "ProofScript",
    "PtolemyError",
    "RelationReport",
    "RelationSpec",
    "Step",
    "Triangulation",
    "TwistEntry",
    "apply_permutation",
    "auto_simplify",
    "build_relator",
    "check_script",
    "cohomology_class",
    "compose",
    "conjugated_twist",
    "elementary_twist",
    "expand_ad",
    "flip",
    "identity_residual",
    "invert",
    "labeled_equal",
    "load_fixture",
    "normalize_lifts",
    "reconstruct_triangulation",
    "relator_phase",
    "replay",
    "validate_fixture",
    "verify_relation",
    "word_action",
]
