"""Brute-force references the library is judged against.

Nothing here shares successor or fixpoint machinery with the package:
graphs come from enumerating concrete steps over an explicit value pool,
and the CTL labeling is the textbook explicit-state one over materialized
edge sets (predecessor worklist for until, iterative pruning for EG).
"""

from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass

from regmc.core import Configuration, RegisterAutomaton, concrete_successors
from regmc.ctl import EG, EU, EX, And, AtLocation, Not, RegEq, RegEqConst
from regmc.matrices import ZERO, RepConfig, canonical_valuation, matrix_of_valuation


@dataclass
class OracleGraph:
    """A finite graph with explicit nodes and materialized successor sets."""

    nodes: set
    edge_map: dict

    def edges(self, n):
        return self.edge_map[n]


def check_pool(ra: RegisterAutomaton, pool) -> None:
    max_arity = max((a.arity for a in ra.actions), default=0)
    fresh = set(pool) - set(ra.constants)
    if not set(ra.constants) <= set(pool):
        raise ValueError("pool must contain every constant")
    if len(fresh) < ra.num_registers + max_arity + 1:
        raise ValueError(
            f"pool has {len(fresh)} non-constant values, "
            f"need at least {ra.num_registers + max_arity + 1}"
        )


def concrete_graph(ra: RegisterAutomaton, pool) -> OracleGraph:
    """Every concrete configuration over the pool, with one-step edges."""
    check_pool(ra, pool)
    nodes = {
        Configuration(l, v)
        for l in ra.locations
        for v in itertools.product(pool, repeat=ra.num_registers)
    }
    return OracleGraph(nodes, {c: concrete_successors(ra, c, pool) for c in nodes})


def concrete_quotient(ra: RegisterAutomaton, pool) -> OracleGraph:
    """The concrete graph with every configuration collapsed to its class."""
    cg = concrete_graph(ra, pool)
    classes = {
        c: RepConfig(c.location, matrix_of_valuation(c.valuation, ra.constants))
        for c in cg.nodes
    }
    edge_map = defaultdict(set)
    for c in cg.nodes:
        edge_map[classes[c]].update(classes[s] for s in cg.edge_map[c])
    return OracleGraph(set(classes.values()), dict(edge_map))


def concrete_post_of(ra: RegisterAutomaton, config: RepConfig, pool) -> set[RepConfig]:
    """Successor classes seen from one canonical concrete representative."""
    check_pool(ra, pool)
    w = canonical_valuation(config.matrix, ra.constants)
    return {
        RepConfig(s.location, matrix_of_valuation(s.valuation, ra.constants))
        for s in concrete_successors(ra, Configuration(config.location, w), pool)
    }


def _atom_holds(node, f) -> bool:
    concrete = isinstance(node, Configuration)
    if isinstance(f, AtLocation):
        return node.location == f.location
    if isinstance(f, RegEq):
        if concrete:
            return node.valuation[f.i] == node.valuation[f.j]
        return node.matrix.entry(f.i, f.j) != ZERO
    if concrete:
        return node.valuation[f.i] == f.c
    return node.matrix.entry(f.i, f.i) == f.c


def explicit_ctl(graph, f) -> set:
    """Textbook explicit-state CTL labeling over any finite graph.

    Works over concrete graphs (valuation nodes) and quotient graphs
    (matrix nodes) alike; atoms read whichever representation the node
    carries.
    """
    nodes = set(graph.nodes)
    edges = {n: set(graph.edges(n)) for n in nodes}
    preds = defaultdict(set)
    for n, succs in edges.items():
        for m in succs:
            preds[m].add(n)

    def sat(g) -> set:
        if isinstance(g, (AtLocation, RegEq, RegEqConst)):
            return {n for n in nodes if _atom_holds(n, g)}
        if isinstance(g, Not):
            return nodes - sat(g.f)
        if isinstance(g, And):
            return sat(g.f0) & sat(g.f1)
        if isinstance(g, EX):
            s = sat(g.f)
            return {n for n in nodes if edges[n] & s}
        if isinstance(g, EU):
            s0, s1 = sat(g.f0), sat(g.f1)
            result = set(s1)
            frontier = list(s1)
            while frontier:
                m = frontier.pop()
                for n in preds[m]:
                    if n in s0 and n not in result:
                        result.add(n)
                        frontier.append(n)
            return result
        if isinstance(g, EG):
            u = sat(g.f)
            while True:
                drop = [n for n in u if not (edges[n] & u)]
                if not drop:
                    return u
                u -= set(drop)
        raise ValueError(f"not a formula: {g!r}")

    return sat(f)
