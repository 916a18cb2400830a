"""Computational workbench for quasi-abelian constructions.

Finitely presented abelian groups (over Z or Z_(p)) form the ambient abelian
category; the torsion and torsion-free classes, a symbolic fragment of
divisible groups, and finite-dimensional normed operators supply the
non-abelian contexts.
"""

__version__ = "0.1.0"

from .linalg import ZZ, ExactMatrix, Ring, SmithDecomposition, kernel_basis, snf, snf_local
from .fpmod import (
    CanonicalDecomposition,
    FpMorphism,
    FpObject,
    IllDefined,
    cokernel,
    decompose,
    equal_morphisms,
    kernel,
    make_morphism,
    make_object,
    pullback,
    pushout,
)
from .torsion import TorsionPair, TorsionSES, cokernel_in_torsionfree_class, pullback_in_torsion_class, radical, torsion_ses
from .universality import (
    ClassificationReport,
    NotRepresentable,
    RealizationResult,
    axiom_stability_trial,
    classify,
    realize_kernel_epi,
    universal_epi_test,
    universal_mono_test,
)

__all__ = [
    "ZZ", "ExactMatrix", "Ring", "SmithDecomposition", "kernel_basis", "snf", "snf_local",
    "CanonicalDecomposition", "FpMorphism", "FpObject", "IllDefined", "cokernel", "decompose",
    "equal_morphisms", "kernel", "make_morphism", "make_object", "pullback", "pushout",
    "TorsionPair", "TorsionSES", "cokernel_in_torsionfree_class", "pullback_in_torsion_class",
    "radical", "torsion_ses",
    "ClassificationReport", "NotRepresentable", "RealizationResult", "axiom_stability_trial",
    "classify", "realize_kernel_epi", "universal_epi_test", "universal_mono_test",
]
