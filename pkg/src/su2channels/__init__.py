"""SU(2)-irreducibly covariant EPOSIC channels: construction, minimal output
entropy and entanglement-breaking classification."""

from .channels import KrausChannel, apply, choi, dual, partial_trace, tensor, von_neumann_entropy
from .eposic import EposicParams, epsilon, epsilon_table, eposic_channel
from .moe import MoeResult, moe_exact_m11, moe_numeric
from .su2 import GroupElement, RepSpace, random_group_element, rep_matrix

__all__ = [
    "EposicParams",
    "GroupElement",
    "KrausChannel",
    "MoeResult",
    "RepSpace",
    "apply",
    "choi",
    "dual",
    "eposic_channel",
    "epsilon",
    "epsilon_table",
    "moe_exact_m11",
    "moe_numeric",
    "partial_trace",
    "random_group_element",
    "rep_matrix",
    "tensor",
    "von_neumann_entropy",
]

__version__ = "0.1.0"
