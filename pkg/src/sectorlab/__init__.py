"""Finite-dimensional superselection sectors, group duality, measurement and modular theory."""

from .algebra import (
    FiniteDimAlgebra,
    Projection,
    RepresentationData,
    block_diagonal_algebra,
    center,
    commutant,
    diagonal_algebra,
    full_matrix_algebra,
    generate_algebra,
    minimal_central_projections,
    representation,
)
from .commands import Flags, run_command
from .errors import (
    InputError,
    NoOutcome,
    NumericalError,
    SchemaError,
    SectorLabError,
)
from .groups import FiniteAbelianGroup, check_pentagonal, multiplicative_unitary, verify_masa
from .io import ProblemSpec, parse_spec
from .measurement import build_coupling, instrument, measure
from .modular import check_tomita, standard_form
from .report import Report, render_report
from .states import State, central_decomposition, conditional_expectation, gns, sector_distribution
from .symmetry import GroupAction, augmented_algebra, breaking_analysis, fixed_point_algebra

__version__ = "0.1.0"
