"""Exact TBR distance between unrooted binary phylogenetic trees.

The pipeline reduces a tree pair with distance-safe rules and solves the
remaining kernel with an exact agreement-forest search.  Brute-force oracles
for the distance and for maximum agreement forests live alongside it.
"""

from .bruteforce import bruteforce_distance, enumerate_mafs, maf_bruteforce
from .chains import (Chain, common_chains, eligible_common_chains, find_common_pendant_subtrees,
                     find_maximal_common_chains, parent_walk)
from .errors import (BudgetExceeded, CardinalityError, DegreeError, DuplicateLabelError,
                     IneligibleChainError, NetworkError, NewickSyntaxError, NotAPartitionError,
                     NotMaximumError, TaxonSetMismatchError, TBRError, TooLargeError,
                     UnknownTaxonError)
from .forest import AgreementForest, ChainStatus, chain_status, is_agreement_forest
from .network import (Generator, UnrootedNetwork, attach, displays, extract_generator,
                      hu_upper_bound_check, reticulation_number, tight_family)
from .newick import NewickDocument, parse, read_trees, serialize
from .preservation import classify_components, enforce_chain_preservation
from .reductions import (ReductionStep, ReductionTrace, RuleKind, apply_31star, apply_32, apply_33,
                         apply_212, apply_chain_reduction, apply_star3star, apply_subtree_reduction,
                         exhaustively_reduce)
from .search import maf_search
from .tbr import DistanceResult, audit_metric, tbr_bfs_distance, tbr_distance, tbr_neighbors
from .tree import (Quartet, UnrootedTree, caterpillar, enumerate_trees, isomorphic, random_tree,
                   validate)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
