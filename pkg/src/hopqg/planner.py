"""Reasoning-chain planning over a context graph.

A chain for difficulty d is a (d+1)-node subtree of the BFS spanning tree
rooted at the sampled answer node, indexed by preorder traversal. Difficulty
counts inference hops: the initial question covers hop 1, every later node
adds one rewrite.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum

from .context import AnnotatedContext, Sentence
from .errors import InsufficientContextError, PlanningError
from .graph import ContextGraph, Edge


class RewriteType(str, Enum):
    BRIDGE = "Bridge"
    INTERSECTION = "Intersection"


class EdgeDirection(str, Enum):
    CHILD_TO_PARENT = "child_to_parent"  # the edge points N_i -> N_parent(i)
    PARENT_TO_CHILD = "parent_to_child"


@dataclass
class ChainNode:
    index: int
    node_id: int
    surface: str
    parent: int | None = None
    edge_text: str | None = None
    edge_direction: EdgeDirection | None = None
    sentence: int | None = None
    rewrite_type: RewriteType | None = None


@dataclass
class ReasoningChain:
    nodes: list[ChainNode]
    d: int

    @property
    def answer_node(self) -> ChainNode:
        return self.nodes[0]

    @property
    def answer_surface(self) -> str:
        return self.nodes[0].surface

    def children_of(self, index: int) -> list[int]:
        return [n.index for n in self.nodes if n.parent == index]

    def to_json(self) -> dict:
        return {
            "answer_node": self.nodes[0].node_id,
            "d": self.d,
            "nodes": [
                {
                    "i": n.index,
                    "surface": n.surface,
                    "parent": n.parent,
                    "edge": n.edge_text,
                    "edge_dir": n.edge_direction.value if n.edge_direction else None,
                    "sentence": n.sentence,
                    "rewrite_type": n.rewrite_type.value if n.rewrite_type else None,
                }
                for n in self.nodes
            ],
        }

    @staticmethod
    def from_json(doc: dict) -> "ReasoningChain":
        nodes = []
        for obj in doc["nodes"]:
            nodes.append(
                ChainNode(
                    index=obj["i"],
                    node_id=obj.get("node_id", doc["answer_node"] if obj["i"] == 0 else -1),
                    surface=obj["surface"],
                    parent=obj["parent"],
                    edge_text=obj["edge"],
                    edge_direction=EdgeDirection(obj["edge_dir"]) if obj.get("edge_dir") else None,
                    sentence=obj["sentence"],
                    rewrite_type=RewriteType(obj["rewrite_type"]) if obj.get("rewrite_type") else None,
                )
            )
        return ReasoningChain(nodes, doc["d"])


@dataclass
class SpanningTree:
    root: int
    # child node id -> (parent node id, connecting edge)
    parent: dict[int, tuple[int, Edge]]
    order: list[int] = field(default_factory=list)  # BFS visit order

    def size(self) -> int:
        return len(self.order)

    def children_of(self, node_id: int) -> list[int]:
        return [c for c, (p, _) in self.parent.items() if p == node_id]


def eligible_answer_nodes(graph: ContextGraph) -> list[int]:
    """Nodes that are (or neighbor) a named entity and have degree above one."""
    out = []
    for node in graph.nodes:
        if graph.undirected_degree(node.id) <= 1:
            continue
        if node.is_named_entity or any(graph.node(o).is_named_entity for _, o in graph.incident(node.id)):
            out.append(node.id)
    return out


def sample_answer_node(graph: ContextGraph, seed: int) -> int:
    """Uniform seeded choice among eligible answer nodes."""
    eligible = eligible_answer_nodes(graph)
    if not eligible:
        raise PlanningError("no eligible answer node: need a named-entity-linked node with degree > 1")
    return random.Random(seed).choice(eligible)


def _edge_sort_key(graph: ContextGraph, at: int, edge: Edge, other: int):
    direction = 0 if edge.source == other else 1
    return (edge.sentence_index, graph.node(other).surface, edge.relation, direction)


def spanning_tree(graph: ContextGraph, root: int) -> SpanningTree:
    """Breadth-first spanning tree of the undirected view, deterministic ties.

    All relations carry unit weight, so a maximum spanning tree over the
    component is any spanning tree; BFS keeps chains as short-path trees.
    Neighbor visit order: lower edge sentence index, then neighbor surface.
    """
    parent: dict[int, tuple[int, Edge]] = {}
    order = [root]
    visited = {root}
    queue = [root]
    while queue:
        u = queue.pop(0)
        incident = sorted(graph.incident(u), key=lambda eo: _edge_sort_key(graph, u, eo[0], eo[1]))
        for edge, other in incident:
            if other in visited:
                continue
            visited.add(other)
            parent[other] = (u, edge)
            order.append(other)
            queue.append(other)
    return SpanningTree(root, parent, order)


def prune_tree(graph: ContextGraph, tree: SpanningTree, d: int) -> list[int]:
    """Keep root plus d nodes, greedily maximizing distinct source sentences.

    Frontier nodes whose connecting edge adds a new sentence are preferred;
    ties resolve by sentence order, then node surface. Returns kept node ids.
    """
    if d < 1:
        raise PlanningError(f"difficulty must be >= 1, got {d}")
    if tree.size() < d + 1:
        raise InsufficientContextError(
            f"component has {tree.size()} nodes; difficulty {d} needs {d + 1} "
            f"(max attainable d = {tree.size() - 1})",
            max_d=tree.size() - 1,
        )
    kept = [tree.root]
    covered: set[int] = set()
    frontier = set(tree.children_of(tree.root))
    for _ in range(d):
        def key(nid: int):
            _, edge = tree.parent[nid]
            return (edge.sentence_index, graph.node(nid).surface, nid)

        fresh = [n for n in frontier if tree.parent[n][1].sentence_index not in covered]
        pool = fresh or sorted(frontier)
        chosen = min(pool, key=key)
        kept.append(chosen)
        covered.add(tree.parent[chosen][1].sentence_index)
        frontier.discard(chosen)
        frontier.update(tree.children_of(chosen))
    return kept


def index_chain(graph: ContextGraph, tree: SpanningTree, kept: list[int], d: int) -> ReasoningChain:
    """Preorder-index the kept subtree; children ordered by (sentence, surface)."""
    kept_set = set(kept)
    children: dict[int, list[int]] = {nid: [] for nid in kept}
    for nid in kept:
        if nid == tree.root:
            continue
        p, _ = tree.parent[nid]
        children[p].append(nid)
    for p in children:
        children[p].sort(key=lambda c: (tree.parent[c][1].sentence_index, graph.node(c).surface, c))

    nodes: list[ChainNode] = []
    idx_of: dict[int, int] = {}

    def visit(nid: int, parent_idx: int | None):
        i = len(nodes)
        idx_of[nid] = i
        if parent_idx is None:
            nodes.append(ChainNode(i, nid, graph.node(nid).surface))
        else:
            _, edge = tree.parent[nid]
            direction = EdgeDirection.CHILD_TO_PARENT if edge.source == nid else EdgeDirection.PARENT_TO_CHILD
            nodes.append(
                ChainNode(
                    i, nid, graph.node(nid).surface,
                    parent=parent_idx,
                    edge_text=edge.relation,
                    edge_direction=direction,
                    sentence=edge.sentence_index,
                )
            )
        for c in children[nid]:
            visit(c, i)

    visit(tree.root, None)
    assert len(nodes) == d + 1 and set(idx_of) == kept_set
    return ReasoningChain(nodes, d)


def assign_rewrite_types(chain: ReasoningChain) -> ReasoningChain:
    """Node i >= 2 is Bridge iff it is the first preorder child of its parent."""
    first_child: dict[int, int] = {}
    for n in chain.nodes[1:]:
        first_child.setdefault(n.parent, n.index)
    for n in chain.nodes:
        if n.index >= 2:
            n.rewrite_type = (
                RewriteType.BRIDGE if first_child[n.parent] == n.index else RewriteType.INTERSECTION
            )
        else:
            n.rewrite_type = None
    return chain


def context_sentence(ctx: AnnotatedContext, node: ChainNode) -> Sentence:
    """The sentence the node's connecting relation was extracted from."""
    if node.sentence is None:
        raise PlanningError(f"chain node {node.index} has no source sentence (root?)")
    return ctx.sentence_of(node.sentence)


def plan_chain(
    graph: ContextGraph,
    d: int,
    seed: int = 0,
    answer_text: str | None = None,
) -> ReasoningChain:
    """Sample (or pin) an answer node and plan a difficulty-d chain."""
    if answer_text is not None:
        root = graph.find_node(answer_text).id
    else:
        root = sample_answer_node(graph, seed)
    tree = spanning_tree(graph, root)
    kept = prune_tree(graph, tree, d)
    return assign_rewrite_types(index_chain(graph, tree, kept, d))
