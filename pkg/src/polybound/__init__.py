"""Polybounded semigroups: covers, Zariski isolation and filter witnesses."""

from .semigroup import (CayleySemigroup, Element, ForeignElementError, Semigroup,
                        SemigroupError, Window, adjoin_identity, adjoin_zero, from_cayley,
                        make_cyclic, make_free_monoid, make_int_plus, make_left_zero,
                        make_nat_plus, make_semidirect_pm, make_semilattice,
                        make_semilattice_omega, make_symmetric3, make_taimanov,
                        make_taimanov_finite, make_trivial, mul, product, zpm_element)
from .polynomial import (PolyTerm, compose, evaluate, identity_poly, is_pruned,
                         parse_poly, prune_decompose, render)
from .polybounded import Cover, verify_cover, search_cover, trivial_finite_cover
from .verdict import Verdict

__version__ = "0.1.0"
