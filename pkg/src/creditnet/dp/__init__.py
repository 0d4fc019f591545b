"""Polynomial-time exact counting and liquidity."""
from .decomposition import Node, TreeDecomposition, make_nice, min_degree_decomposition
from .star import (
    star_class_counts,
    star_failure_bounds,
    star_liquidity,
    unconstrained_star_failure,
)
from .tree import tree_class_count, tree_liquidity
from .treewidth import treewidth_class_count, treewidth_liquidity

__all__ = [
    "Node",
    "TreeDecomposition",
    "make_nice",
    "min_degree_decomposition",
    "star_class_counts",
    "star_failure_bounds",
    "star_liquidity",
    "unconstrained_star_failure",
    "tree_class_count",
    "tree_liquidity",
    "treewidth_class_count",
    "treewidth_liquidity",
]
