"""Deterministic example spaces and maps, parameterized by truncation size."""

from .comb import Comb, CombFamily, CombRetraction, CombRetractionFamily, comb, comb_retraction
from .cubes import CubesFamily, CubesSquares, cubes_squares
from .family import TruncationFamily, TruncationInstance
from .groups import (
    HeisenbergBall,
    HeisenbergFamily,
    LatticeQuotient,
    LatticeQuotientFamily,
    ball_growth,
    ball_sizes,
    commutator,
    enumerate_words_ball,
    heisenberg,
    heisenberg_cayley_ball,
    lattice_ball,
    lattice_points,
    lattice_quotient,
    multiply,
    octahedral_size,
)
from .random_spaces import (
    CoequaliserInstance,
    RipsInstance,
    discrete_copy,
    random_instance,
    random_rips_instance,
)
