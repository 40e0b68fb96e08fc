"""Bipartite observation-graph diagnostics.

Agents and items are nodes; each observed cell (i, j) is an edge. Degree and
component checks run on this graph via networkx.
"""
from __future__ import annotations

import networkx as nx
import numpy as np

from ..models import ConnectivityReport, ObservationMask

AGENT = "a"
ITEM = "q"


def _pattern(mask: ObservationMask | np.ndarray) -> np.ndarray:
    if isinstance(mask, ObservationMask):
        return mask.pattern
    return np.asarray(mask, dtype=bool)


def bipartite_graph(mask: ObservationMask | np.ndarray) -> nx.Graph:
    """Graph with nodes ("a", i) and ("q", j) and one edge per observed cell."""
    pattern = _pattern(mask)
    n_agents, n_items = pattern.shape
    graph = nx.Graph()
    graph.add_nodes_from((AGENT, i) for i in range(n_agents))
    graph.add_nodes_from((ITEM, j) for j in range(n_items))
    rows, cols = np.nonzero(pattern)
    graph.add_edges_from(((AGENT, int(i)), (ITEM, int(j))) for i, j in zip(rows, cols))
    return graph


def component_labels(mask: ObservationMask | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Component index of every agent and every item."""
    pattern = _pattern(mask)
    n_agents, n_items = pattern.shape
    agent_comp = np.zeros(n_agents, dtype=int)
    item_comp = np.zeros(n_items, dtype=int)
    for label, nodes in enumerate(nx.connected_components(bipartite_graph(pattern))):
        for kind, idx in nodes:
            if kind == AGENT:
                agent_comp[idx] = label
            else:
                item_comp[idx] = label
    return agent_comp, item_comp


def count_components(mask: ObservationMask | np.ndarray) -> int:
    return nx.number_connected_components(bipartite_graph(mask))


def check_connectivity(
    mask: ObservationMask | np.ndarray,
    d_min: int = 3,
    repaired_pairs: int = 0,
) -> ConnectivityReport:
    """Minimum degrees and component count of the observation graph."""
    pattern = _pattern(mask)
    return ConnectivityReport(
        min_agent_degree=int(pattern.sum(axis=1).min()) if pattern.shape[0] else 0,
        min_item_degree=int(pattern.sum(axis=0).min()) if pattern.shape[1] else 0,
        n_components=count_components(pattern),
        repaired_pairs=repaired_pairs,
        d_min=d_min,
    )
