"""Cut-off and bounded-loss cut-off decisions for rendez-vous protocols and Petri nets."""

from .continuous import ContinuousCertificate, continuous_coverable, continuous_reachable, max_support_solution
from .cutoff import (
    Decision,
    TooLarge,
    build_insertion_witness,
    build_scaling_witness,
    compute_cutoff_bound,
    decide_bounded_loss,
    decide_cutoff,
    decide_cutoff_acyclic,
)
from .io import parse_any, parse_net, parse_protocol, parse_run, serialize_net, serialize_protocol, serialize_run
from .model import (
    LeaderProtocolPair,
    PetriNet,
    PetriNetSystem,
    Protocol,
    Rule,
    SymmetricProtocol,
    is_acyclic,
    leader_to_net,
    protocol_to_net,
)
from .oracle import bfs_reach, semi_decide_cutoff, validate_rle_run
from .runs import RleRun
from .symmetric import decide_leader_cutoff, decide_symmetric_bounded_loss, decide_symmetric_cutoff
from .vectors import Marking, SolutionVector

__all__ = [
    "ContinuousCertificate",
    "Decision",
    "LeaderProtocolPair",
    "Marking",
    "PetriNet",
    "PetriNetSystem",
    "Protocol",
    "RleRun",
    "Rule",
    "SolutionVector",
    "SymmetricProtocol",
    "TooLarge",
    "bfs_reach",
    "build_insertion_witness",
    "build_scaling_witness",
    "compute_cutoff_bound",
    "continuous_coverable",
    "continuous_reachable",
    "decide_bounded_loss",
    "decide_cutoff",
    "decide_cutoff_acyclic",
    "decide_leader_cutoff",
    "decide_symmetric_bounded_loss",
    "decide_symmetric_cutoff",
    "is_acyclic",
    "leader_to_net",
    "max_support_solution",
    "parse_any",
    "parse_net",
    "parse_protocol",
    "parse_run",
    "protocol_to_net",
    "semi_decide_cutoff",
    "serialize_net",
    "serialize_protocol",
    "serialize_run",
    "validate_rle_run",
]
