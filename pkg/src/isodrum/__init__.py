"""Isospectral, nonisometric plane drums built from the Gassmann pair in SL(3, 2)."""

from .gassmann import (
    ConjugacyClassTable,
    CosetAction,
    Intertwiner,
    PermutationGroup,
    Subgroup,
    conjugacy_classes,
    coset_action,
    gassmann_pair,
    intertwiner,
    is_almost_conjugate,
    is_conjugate,
    sl3_f2,
)
from .mesh import Mesh, refine
from .pipeline import DrumPair, drum_pair
from .spectral import (
    AssembledSystem,
    BCSpec,
    Spectrum,
    assemble,
    compare_spectra,
    extrapolate,
    solve_lowest,
    weyl_fit,
)
from .transplant import PiecewiseFunction, Transplantation, apply, build_transplantation, verify_eigen
from .unfolding import (
    BaseTriangle,
    GluingDiagram,
    PlanarDomain,
    boundary_signature,
    check_embedding,
    derive_diagrams,
    to_svg,
    unfold,
)

__version__ = "0.1.0"
