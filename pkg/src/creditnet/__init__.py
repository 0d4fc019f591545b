"""Liquidity of credit networks: exact class counting, dynamic programs,
the expander-to-star reduction and Monte-Carlo simulation."""
from importlib import resources

from .classspace import (
    ClassSpace,
    ForestCount,
    count_forests,
    distinguishing_sequence,
    enumerate_all_configurations,
    enumerate_reachable,
    exact_liquidity,
    unconstrained,
)
from .constraints import (
    TRUE,
    And,
    ConstrainedNetwork,
    Linear,
    Not,
    Or,
    TxResult,
    TxStatus,
    attempt_transaction,
    build_gadget,
    evaluate,
    feasible_configuration,
    group_bound,
    node_bound,
    node_constrained,
)
from .errors import *  # noqa: F401,F403
from .markov import SimReport, TransactionDistribution, estimate_liquidity, merge_reports, simulate
from .netfile import NetworkFile, parse_network, serialize
from .network import (
    Configuration,
    CreditEdge,
    CreditNetwork,
    Transaction,
    apply_payment,
    configurations_equivalent,
    find_route,
    score_vector,
)
from .reduction import (
    AddEdge,
    ReplaceSubgraphWithStar,
    edge_expansion,
    expander_to_star,
    monotonicity_experiment,
    reduction_spec,
    verify_reduction,
    windowed_network,
)

__version__ = "0.1.0"


def corpus_path(name: str):
    """Path of a shipped example network, e.g. ``corpus_path("k4.net")``."""
    return resources.files(__name__) / "corpus" / name


def load_corpus(name: str) -> NetworkFile:
    return parse_network(corpus_path(name).read_text(encoding="utf-8"))
