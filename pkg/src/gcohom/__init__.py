"""Group (co)homology of finite permutation groups over prime fields.

Normalized bar complexes, exact GF(p) linear algebra, Ext/Tor duality
certificates, and localization/splicing along subgroup chains.
"""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    CapExceeded,
    DimensionMismatch,
    GcohomError,
    GroupError,
    IncompatibleFamily,
    InternalInconsistency,
    ModuleError,
    ModulusMismatch,
    NotACocycle,
    NotACycle,
    NotExact,
)
from .exactla import FpMatrix, FpScalar, Subspace, caps
from .groups import FiniteGroup, SubgroupEmbedding, embed, group_from_generators, named_group, sl2
from .gmodules import GModule, Submodule
from .barcomplex import cohomology, ext, homology, long_exact_sequence, settings, tor
from .duality import duality_certificate, lemma2_check, pair
from .localsys import SubgroupChain, homology_colimit_check, localize, splice, survival_analysis

__all__ = [
    "__version__",
    "CapExceeded",
    "DimensionMismatch",
    "GcohomError",
    "GroupError",
    "IncompatibleFamily",
    "InternalInconsistency",
    "ModuleError",
    "ModulusMismatch",
    "NotACocycle",
    "NotACycle",
    "NotExact",
    "FpMatrix",
    "FpScalar",
    "Subspace",
    "caps",
    "FiniteGroup",
    "SubgroupEmbedding",
    "embed",
    "group_from_generators",
    "named_group",
    "sl2",
    "GModule",
    "Submodule",
    "cohomology",
    "ext",
    "homology",
    "long_exact_sequence",
    "settings",
    "tor",
    "duality_certificate",
    "lemma2_check",
    "pair",
    "SubgroupChain",
    "homology_colimit_check",
    "localize",
    "splice",
    "survival_analysis",
]
