"""Exact computations for finite Lie conformal and vertex algebras."""

from .exact import Poly, Series, WindowError
from .cdmod import FgModule, ModElement, Submodule, span
from .lca import ConformalAlgebra, check_axioms, derived_series, central_series, center
from .gcmat import ConformalMatrix, gc_bracket, adjoint_matrix, action_nilpotent, weight_spaces
from .cohom import CoefficientModule, h2, classify_irreducible
from .va import VertexTable, product, novir_verify, make_finitevertex_example, make_holomorphic

__version__ = "0.1.0"
