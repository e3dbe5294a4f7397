"""Formal local cohomology of graded monomial data over a polynomial ring.

Exact rational (or prime field) linear algebra, degree by degree in the
fine Z^n grading.
"""

from .complexes import (AtomComplex, CohomologyTable, DegreeBox, cech, cone, direct_sum,
                        hom_from_free, homology_table, cohomology_table, koszul, shift,
                        stable_cech_trunc, stable_koszul_trunc, tensor)
from .derived import (dagger, duality_formula, formal_complex, formal_table, limit_formula,
                      llambda, local_cohomology, local_homology, matlis_dual, rgamma, tate_table)
from .errors import (DimensionMismatch, FormalCohError, Inconclusive, InvalidInput, NotAChainMap,
                     ParseError, RouteDisagreement)
from .invariants import (InvariantReport, cd, cd_of_support, depth, dim_complex, fdepth,
                         is_cohen_macaulay, sup_formal, sup_local_homology)
from .linalg import QQ, FieldSpec, Matrix, rank
from .monomial import ModulePresentation, MonomialIdeal, RingSpec, syzygy_resolution, taylor_resolution

__version__ = "0.1.0"
