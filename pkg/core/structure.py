"""
Model Structure - the stock-flow diagram as a directed influence graph.

Features:
    - Typed nodes (stock, flow, converter, auxiliary, parameter)
    - Signed influence edges (+1 / -1) and flow -> stock links
    - Feedback loop enumeration with polarity
    - Inflow/outflow listing per stock
"""

from dataclasses import dataclass
from typing import Dict, List, Tuple

import networkx as nx


@dataclass(frozen=True)
class FeedbackLoop:
    """A closed chain of influences."""
    nodes: Tuple[str, ...]
    polarity: str  # "reinforcing" or "balancing"

    def to_dict(self) -> dict:
        return {"nodes": list(self.nodes), "polarity": self.polarity}


# ==================== Structure Definition ====================

STOCKS = ["P", "U", "O", "K", "MFP"]

# flow -> (stock, +1 inflow / -1 outflow)
FLOWS = {
    "population_growth": ("P", +1),
    "underutilisation_onset": ("U", +1),
    "job_creation": ("U", -1),
    "mortality": ("U", -1),
    "onset_change": ("O", +1),
    "kl_change": ("K", +1),
    "mfp_change": ("MFP", +1),
}

CONVERTERS = ["eta", "delta", "rho", "theta"]

AUXILIARIES = ["labour_force", "psi", "income_pc", "consumption_index"]

PARAMETERS = ["g", "i", "mu", "d", "lambda", "m", "beta", "alpha", "nu", "r", "tau", "omega"]

# (source, target, polarity)
INFLUENCES = [
    ("P", "population_growth", +1),
    ("g", "population_growth", +1),
    ("P", "labour_force", +1),
    ("i", "labour_force", +1),
    ("mu", "labour_force", -1),
    ("labour_force", "underutilisation_onset", +1),
    ("O", "underutilisation_onset", +1),
    ("U", "underutilisation_onset", -1),
    ("d", "underutilisation_onset", -1),
    ("labour_force", "job_creation", +1),
    ("lambda", "job_creation", +1),
    ("U", "mortality", +1),
    ("m", "mortality", +1),
    ("K", "eta", +1),
    ("O", "onset_change", +1),
    ("beta", "onset_change", +1),
    ("eta", "onset_change", +1),
    ("K", "kl_change", +1),
    ("alpha", "kl_change", +1),
    ("K", "delta", +1),
    ("MFP", "mfp_change", +1),
    ("nu", "mfp_change", +1),
    ("delta", "mfp_change", +1),
    ("MFP", "rho", -1),
    ("U", "theta", -1),
    ("labour_force", "theta", +1),
    ("labour_force", "psi", +1),
    ("U", "psi", -1),
    ("r", "psi", +1),
    ("theta", "psi", +1),
    ("tau", "psi", +1),
    ("psi", "income_pc", +1),
    ("P", "income_pc", -1),
    ("income_pc", "consumption_index", +1),
    ("rho", "consumption_index", -1),
    ("omega", "consumption_index", -1),
]


def model_structure() -> nx.DiGraph:
    """Build the influence graph of the model."""
    graph = nx.DiGraph()

    for stock in STOCKS:
        graph.add_node(stock, kind="stock")
    for flow in FLOWS:
        graph.add_node(flow, kind="flow")
    for conv in CONVERTERS:
        graph.add_node(conv, kind="converter")
    for aux in AUXILIARIES:
        graph.add_node(aux, kind="auxiliary")
    for param in PARAMETERS:
        graph.add_node(param, kind="parameter")

    for source, target, polarity in INFLUENCES:
        graph.add_edge(source, target, polarity=polarity, kind="influence")

    # A flow changes its stock in the direction of the flow sign
    for flow, (stock, sign) in FLOWS.items():
        graph.add_edge(flow, stock, polarity=sign, kind="flow")

    return graph


# ==================== Query Methods ====================

def nodes_of_kind(graph: nx.DiGraph, kind: str) -> List[str]:
    return [n for n, data in graph.nodes(data=True) if data.get("kind") == kind]


def stock_flows(graph: nx.DiGraph) -> Dict[str, Dict[str, List[str]]]:
    """Inflows and outflows of every stock."""
    result = {}
    for stock in nodes_of_kind(graph, "stock"):
        inflows, outflows = [], []
        for source in graph.predecessors(stock):
            edge = graph.edges[source, stock]
            if edge.get("kind") != "flow":
                continue
            (inflows if edge["polarity"] > 0 else outflows).append(source)
        result[stock] = {"inflows": sorted(inflows), "outflows": sorted(outflows)}
    return result


def feedback_loops(graph: nx.DiGraph) -> List[FeedbackLoop]:
    """
    All elementary cycles with their polarity.

    A loop is reinforcing when the product of its edge polarities is
    positive, balancing otherwise.
    """
    loops = []
    for cycle in nx.simple_cycles(graph):
        # Rotate so the loop starts at its smallest node name (stable output)
        start = cycle.index(min(cycle))
        cycle = cycle[start:] + cycle[:start]

        sign = 1
        for a, b in zip(cycle, cycle[1:] + cycle[:1]):
            sign *= graph.edges[a, b]["polarity"]
        loops.append(FeedbackLoop(
            nodes=tuple(cycle),
            polarity="reinforcing" if sign > 0 else "balancing",
        ))

    loops.sort(key=lambda loop: (len(loop.nodes), loop.nodes))
    return loops


def edge_table(graph: nx.DiGraph) -> List[dict]:
    """Edges as rows (source, target, polarity, kind), sorted."""
    rows = [
        {"source": a, "target": b, "polarity": data["polarity"], "kind": data["kind"]}
        for a, b, data in graph.edges(data=True)
    ]
    rows.sort(key=lambda row: (row["source"], row["target"]))
    return rows


def get_stats(graph: nx.DiGraph) -> dict:
    """Graph statistics."""
    return {
        "stocks": len(nodes_of_kind(graph, "stock")),
        "flows": len(nodes_of_kind(graph, "flow")),
        "converters": len(nodes_of_kind(graph, "converter")),
        "edges": graph.number_of_edges(),
        "feedback_loops": len(feedback_loops(graph)),
    }
