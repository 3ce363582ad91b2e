"""Subchannel assignment by graph coloring."""
from .base import (
    ColoringScheme,
    global_coloring,
    least_used_color,
    neighbor_color_counts,
    random_coloring,
    switch_probability,
)
from .gg import GGParams, TCFAParams, generalized_global, tcfa_gg
from .cts import CTSParams, clique_tabu_search, tabu_search, tcfa_cts

__all__ = [
    "ColoringScheme",
    "CTSParams",
    "GGParams",
    "TCFAParams",
    "clique_tabu_search",
    "generalized_global",
    "global_coloring",
    "least_used_color",
    "neighbor_color_counts",
    "random_coloring",
    "switch_probability",
    "tabu_search",
    "tcfa_cts",
    "tcfa_gg",
]
