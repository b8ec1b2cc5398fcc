"""
envy.py -- Envy graphs and cycle elimination.

The graph is a networkx DiGraph whose nodes and edges are inserted in
ascending agent order, so every traversal below (cycle search, BFS) breaks
ties by lowest agent index.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Set, Tuple

import networkx as nx

from .errors import InvariantViolation
from .model import Allocation, Instance
from .valuation import envies, own_value

logger = logging.getLogger("efx2.envy")


@dataclass(frozen=True)
class EnvyGraph:
    """Edge i -> j iff agent i symbolically envies agent j."""

    n: int
    graph: nx.DiGraph

    @property
    def edges(self) -> List[Tuple[int, int]]:
        return sorted(self.graph.edges())

    def has_edge(self, i: int, j: int) -> bool:
        return self.graph.has_edge(i, j)

    def path(self, start: int, end: int) -> Optional[List[int]]:
        """Shortest path by BFS, lowest-index neighbours first."""
        if start == end:
            return [start]
        parents: Dict[int, int] = dict(nx.bfs_predecessors(self.graph, start))
        if end not in parents:
            return None
        path = [end]
        while path[-1] != start:
            path.append(parents[path[-1]])
        path.reverse()
        return path


def from_edges(n: int, edges) -> EnvyGraph:
    graph = nx.DiGraph()
    graph.add_nodes_from(range(n))
    graph.add_edges_from(sorted(edges))
    return EnvyGraph(n, graph)


def build_envy_graph(instance: Instance, alloc: Allocation) -> EnvyGraph:
    return from_edges(
        instance.n,
        (
            (i, j)
            for i in instance.agents
            for j in instance.agents
            if envies(instance, alloc, i, j)
        ),
    )


def sources(g: EnvyGraph) -> Set[int]:
    return {v for v in range(g.n) if g.graph.in_degree(v) == 0}


def find_dicycle(g: EnvyGraph) -> Optional[List[int]]:
    """Return a directed cycle as a vertex sequence, or None if acyclic."""
    try:
        cycle_edges = nx.find_cycle(g.graph, source=sorted(g.graph.nodes))
    except nx.NetworkXNoCycle:
        return None
    return [u for u, _ in cycle_edges]


def rotate(alloc: Allocation, cycle: List[int]) -> Allocation:
    """Each agent on the cycle takes the bundle of its successor."""
    k = len(cycle)
    return alloc.replace(
        {cycle[pos]: alloc.bundles[cycle[(pos + 1) % k]] for pos in range(k)}
    )


def rotate_until_acyclic(
    instance: Instance, alloc: Allocation
) -> Tuple[Allocation, List[List[int]]]:
    """Rotate bundles along envy cycles until none is left.

    Returns the final allocation and the cycles used, in order.
    """
    rotations: List[List[int]] = []
    current = alloc
    # each rotation strictly raises the sum of own values, so no permutation
    # of the bundles can repeat
    bound = math.factorial(instance.n)
    while True:
        cycle = find_dicycle(build_envy_graph(instance, current))
        if cycle is None:
            return current, rotations
        if len(rotations) >= bound:
            raise InvariantViolation(
                f"cycle elimination did not converge after {len(rotations)} rotations"
            )
        rotated = rotate(current, cycle)
        for agent in cycle:
            if not own_value(instance, rotated, agent) > own_value(instance, current, agent):
                raise InvariantViolation(
                    f"rotation along {cycle} did not improve agent {agent}"
                )
        logger.debug("rotated bundles along cycle %s", cycle)
        rotations.append(cycle)
        current = rotated


def eliminate_cycles(instance: Instance, alloc: Allocation) -> Allocation:
    return rotate_until_acyclic(instance, alloc)[0]
