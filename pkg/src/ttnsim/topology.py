"""Rooted tree topologies whose leaves carry qubits.

`TreeTopology` is the immutable nested description (what the planner emits
and the file format stores); `FlatTree` is the derived indexed view (parents,
children, paths) that the TTN engine and the dry-run walker work on.
"""

import json
from dataclasses import dataclass


@dataclass(frozen=True)
class Leaf:
    qubit: int


@dataclass(frozen=True)
class Internal:
    children: tuple

    def __post_init__(self):
        object.__setattr__(self, "children", tuple(self.children))
        if len(self.children) < 2:
            raise ValueError("internal nodes need at least two children")


def node(children):
    """Wrap children in an internal node, collapsing single-child wrappers."""
    children = list(children)
    if len(children) == 1:
        return children[0]
    return Internal(tuple(children))


class TreeTopology:
    """A rooted tree whose leaves biject with qubits 0..N-1.

    The root may itself be a leaf only in the degenerate N=1 case.
    """

    def __init__(self, root):
        self.root = root
        leaves = []
        _collect_leaves(root, leaves)
        n = len(leaves)
        if sorted(leaves) != list(range(n)):
            raise ValueError(f"leaves must biject with 0..{n - 1}, got {sorted(leaves)}")
        self.num_qubits = n

    def __eq__(self, other):
        if not isinstance(other, TreeTopology):
            return NotImplemented
        return self.root == other.root

    @property
    def height(self) -> int:
        return _height(self.root)

    @property
    def max_arity(self) -> int:
        return _max_arity(self.root)


def _collect_leaves(spec, out):
    if isinstance(spec, Leaf):
        out.append(spec.qubit)
    else:
        for ch in spec.children:
            _collect_leaves(ch, out)


def _height(spec) -> int:
    if isinstance(spec, Leaf):
        return 0
    return 1 + max(_height(ch) for ch in spec.children)


def _max_arity(spec) -> int:
    if isinstance(spec, Leaf):
        return 0
    return max(len(spec.children), max(_max_arity(ch) for ch in spec.children))


def perfect_tree(arity: int, height: int) -> TreeTopology:
    """Perfect m-ary topology with arity**height leaves, qubits left to right."""
    if arity < 2 or height < 1:
        raise ValueError("need arity >= 2 and height >= 1")

    counter = iter(range(arity**height))

    def build(level):
        if level == 0:
            return Leaf(next(counter))
        return Internal(tuple(build(level - 1) for _ in range(arity)))

    return TreeTopology(build(height))


# ---------------------------------------------------------------------------
# file format: a JSON document of nested nodes, {"leaf": q} or
# {"children": [node, ...]}.


def _spec_to_obj(spec):
    if isinstance(spec, Leaf):
        return {"leaf": spec.qubit}
    return {"children": [_spec_to_obj(ch) for ch in spec.children]}


def _obj_to_spec(obj):
    if "leaf" in obj:
        return Leaf(int(obj["leaf"]))
    return Internal(tuple(_obj_to_spec(ch) for ch in obj["children"]))


def dumps_topology(t: TreeTopology) -> str:
    return json.dumps(_spec_to_obj(t.root), separators=(",", ":")) + "\n"


def loads_topology(text: str) -> TreeTopology:
    return TreeTopology(_obj_to_spec(json.loads(text)))


def save_topology(t: TreeTopology, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(dumps_topology(t))


def load_topology(path) -> TreeTopology:
    with open(path, encoding="utf-8") as f:
        return loads_topology(f.read())


# ---------------------------------------------------------------------------
# indexed view


class FlatTree:
    """Indexed form of a topology: nodes numbered in DFS preorder, root = 0.

    Every node's edge to its parent is identified by the child node id, so
    per-edge tables from the engine and the dry-run walker line up.
    """

    def __init__(self, topo: TreeTopology):
        self.topology = topo
        self.parent: list[int | None] = []
        self.children: list[list[int]] = []
        self.leaf_qubit: list[int | None] = []
        self.depth: list[int] = []

        def visit(spec, parent_id, depth):
            nid = len(self.parent)
            self.parent.append(parent_id)
            self.children.append([])
            self.depth.append(depth)
            if parent_id is not None:
                self.children[parent_id].append(nid)
            if isinstance(spec, Leaf):
                self.leaf_qubit.append(spec.qubit)
            else:
                self.leaf_qubit.append(None)
                for ch in spec.children:
                    visit(ch, nid, depth + 1)
            return nid

        visit(topo.root, None, 0)
        self.num_nodes = len(self.parent)
        self.num_qubits = topo.num_qubits
        self.qubit_node = {self.leaf_qubit[i]: i for i in range(self.num_nodes)
                           if self.leaf_qubit[i] is not None}
        self.height = [0] * self.num_nodes
        for nid in reversed(range(self.num_nodes)):
            if self.children[nid]:
                self.height[nid] = 1 + max(self.height[c] for c in self.children[nid])
        self.postorder = self._postorder()

    def _postorder(self) -> list[int]:
        order = []

        def walk(nid):
            for ch in self.children[nid]:
                walk(ch)
            order.append(nid)

        walk(0)
        return order

    def is_leaf(self, nid: int) -> bool:
        return self.leaf_qubit[nid] is not None

    def child_index(self, nid: int) -> int:
        """Position of `nid` among its parent's children."""
        return self.children[self.parent[nid]].index(nid)

    def ancestors(self, nid: int) -> list[int]:
        """Chain from `nid` up to and including the root."""
        chain = [nid]
        while self.parent[chain[-1]] is not None:
            chain.append(self.parent[chain[-1]])
        return chain

    def path_between(self, qa: int, qb: int) -> tuple[list[int], int, list[int]]:
        """Path structure between two leaves.

        Returns ``(up_a, lca, up_b)`` where `up_a` is the chain from qubit
        qa's leaf (inclusive) to just below the lowest common ancestor, and
        likewise `up_b`; `lca` is the turning-point node.
        """
        chain_a = self.ancestors(self.qubit_node[qa])
        chain_b = self.ancestors(self.qubit_node[qb])
        in_b = set(chain_b)
        lca = next(nid for nid in chain_a if nid in in_b)
        up_a = chain_a[: chain_a.index(lca)]
        up_b = chain_b[: chain_b.index(lca)]
        return up_a, lca, up_b

    def path_edges(self, qa: int, qb: int) -> list[int]:
        """Edges (as child node ids) the thread between two leaves crosses."""
        up_a, _, up_b = self.path_between(qa, qb)
        return up_a + up_b

    def edge_level(self, child_id: int) -> int:
        """Level of the edge above `child_id` (leaf edges are level 1)."""
        return self.height[child_id] + 1
