"""Symbolic bond-dimension simulation and gate-pattern admissibility.

A dry-run replays a circuit against a tree topology (or an MPS site order)
tracking only edge dimensions: each two-qubit gate multiplies every on-path
edge by its Schmidt rank k, after which a reduction pass iterates

    dim(e) <- min(dim(e), product of dims below e, product of dims above e)

to a fixpoint. The reduction is the symbolic shadow of economical-SVD
sweeps, which can only shrink an edge to the smaller of its two matricization
sides, so dry-run dimensions upper-bound what the engines observe.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import gates as gatelib
from .circuits import Circuit
from .gates import gate_rank
from .topology import FlatTree, TreeTopology, perfect_tree
from .treesearch import l_cluster


@dataclass
class GateEvent:
    """Dry-run record of one two-qubit gate."""

    gate_index: int
    label: str
    k: int
    path_length: int
    edges: list


@dataclass
class DryRunReport:
    """Final edge-dimension ledger plus the derived size metrics."""

    kind: str  # "ttn" or "mps"
    edge_dims: dict
    edge_levels: dict
    d_max_observed: int
    m_entries: int
    events: list = field(default_factory=list)
    cap: int | None = None
    cap_events: int = 0


def _reduce_tree(dims: dict, tree: FlatTree):
    """Two-sided min rule to fixpoint over a tree ledger (keyed by child id)."""

    def below(nid):
        if tree.is_leaf(nid):
            return 2
        return math.prod(dims[c] for c in tree.children[nid])

    def above(nid):
        parent = tree.parent[nid]
        prod = 1 if tree.parent[parent] is None else dims[parent]
        for sibling in tree.children[parent]:
            if sibling != nid:
                prod *= dims[sibling]
        return prod

    changed = True
    while changed:
        changed = False
        for nid in dims:
            new = min(dims[nid], below(nid), above(nid))
            if new < dims[nid]:
                dims[nid] = new
                changed = True


def _tree_entries(dims: dict, tree: FlatTree) -> int:
    total = 0
    for nid in range(tree.num_nodes):
        if tree.is_leaf(nid):
            total += 2 * dims[nid]
        else:
            size = math.prod(dims[c] for c in tree.children[nid])
            size *= dims[nid] if tree.parent[nid] is not None else 1
            total += size
    return total


def _dryrun_tree(circuit: Circuit, topology: TreeTopology, cap) -> DryRunReport:
    tree = topology if isinstance(topology, FlatTree) else FlatTree(topology)
    if tree.num_qubits != circuit.num_qubits:
        raise ValueError("topology leaves must cover the circuit qubits")
    dims = {nid: 1 for nid in range(tree.num_nodes) if tree.parent[nid] is not None}
    events = []
    cap_events = 0
    for idx, g in enumerate(circuit.gates):
        if g.num_qubits != 2:
            continue
        k = gate_rank(g)
        edges = tree.path_edges(*g.qubits)
        for e in edges:
            dims[e] *= k
        _reduce_tree(dims, tree)
        if cap is not None:
            for e in edges:
                if dims[e] > cap:
                    dims[e] = cap
                    cap_events += 1
        events.append(GateEvent(idx, g.label, k, len(edges), sorted(edges)))
    levels = {e: tree.edge_level(e) for e in dims}
    d_max = max(dims.values(), default=1)
    return DryRunReport("ttn", dims, levels, max(int(d_max), 2),
                        _tree_entries(dims, tree), events, cap, cap_events)


def _reduce_chain(bonds: list):
    n = len(bonds)
    changed = True
    while changed:
        changed = False
        for j in range(n):
            left = bonds[j - 1] if j > 0 else 1
            right = bonds[j + 1] if j < n - 1 else 1
            new = min(bonds[j], 2 * left, 2 * right)
            if new < bonds[j]:
                bonds[j] = new
                changed = True


def _dryrun_mps(circuit: Circuit, order, cap) -> DryRunReport:
    site_of = list(order)
    if sorted(site_of) != list(range(circuit.num_qubits)):
        raise ValueError("order must be a permutation of the circuit qubits")
    n = circuit.num_qubits
    bonds = [1] * (n - 1)
    events = []
    cap_events = 0
    for idx, g in enumerate(circuit.gates):
        if g.num_qubits != 2:
            continue
        k = gate_rank(g)
        sa, sb = sorted(site_of[q] for q in g.qubits)
        for j in range(sa, sb):
            bonds[j] *= k
        _reduce_chain(bonds)
        if cap is not None:
            for j in range(sa, sb):
                if bonds[j] > cap:
                    bonds[j] = cap
                    cap_events += 1
        events.append(GateEvent(idx, g.label, k, sb - sa, list(range(sa, sb))))
    dims = {j: bonds[j] for j in range(n - 1)}
    levels = {j: 1 for j in dims}
    m_entries = sum(
        (bonds[j - 1] if j > 0 else 1) * 2 * (bonds[j] if j < n - 1 else 1)
        for j in range(n)
    )
    d_max = max(bonds, default=1)
    return DryRunReport("mps", dims, levels, max(int(d_max), 2), m_entries,
                        events, cap, cap_events)


def dryrun(circuit: Circuit, layout, cap: int | None = None) -> DryRunReport:
    """Symbolically simulate bond growth for a tree topology or a site order.

    `layout` is a TreeTopology (or FlatTree) for the tree engine, or a
    qubit-to-site permutation for the MPS baseline. With `cap` set, edges are
    clamped at the cap and each clamp is recorded as a would-truncate event.
    """
    if isinstance(layout, (TreeTopology, FlatTree)):
        return _dryrun_tree(circuit, layout, cap)
    return _dryrun_mps(circuit, layout, cap)


# ---------------------------------------------------------------------------
# admissibility against a d_max budget


def edge_crossing_limit(d_max: int) -> float:
    """Max rank-4 gates that may cross one edge: log4(d_max)."""
    return 0.5 * math.log2(d_max)


def node_crossing_limit(arity: int, d_max: int) -> float:
    """Max rank-4 gate threads through one node: (m+1)/4 * log2(d_max)."""
    return (arity + 1) / 4.0 * math.log2(d_max)


@dataclass
class AdmissibilityReport:
    """Worst-case edge products versus the d_max budget.

    Only edges whose lower endpoint sits at or above the cluster level are
    restricted; gate sequences inside a cluster-height subtree stay exact
    regardless, so they carry no budget.
    """

    admissible: bool
    d_max: int
    arity: int
    cluster_level: int
    edge_products: dict
    edge_crossings: dict
    node_crossings: dict
    violations: list
    edge_limit: float
    node_limit: float


def admissible(circuit: Circuit, topology: TreeTopology, d_max: int) -> AdmissibilityReport:
    """Check the crossing-product condition prod(k_G) <= d_max on every
    restricted edge, and report crossing counts against the closed-form
    per-edge and per-node limits."""
    tree = topology if isinstance(topology, FlatTree) else FlatTree(topology)
    arity = max(tree.topology.max_arity, 2)
    lc = l_cluster(arity, d_max)
    restricted = [nid for nid in range(tree.num_nodes)
                  if tree.parent[nid] is not None and tree.height[nid] >= lc]
    products = {e: 1 for e in restricted}
    crossings = {e: 0 for e in restricted}
    node_counts = {nid: 0 for nid in range(tree.num_nodes)
                   if not tree.is_leaf(nid) and tree.height[nid] > lc}
    for g in circuit.gates:
        if g.num_qubits != 2:
            continue
        k = gate_rank(g)
        up_a, lca, up_b = tree.path_between(*g.qubits)
        for e in up_a + up_b:
            if e in products:
                products[e] *= k
                crossings[e] += 1
        for nid in up_a[1:] + up_b[1:] + [lca]:
            if nid in node_counts:
                node_counts[nid] += 1
    violations = sorted(e for e, p in products.items() if p > d_max)
    return AdmissibilityReport(
        admissible=not violations,
        d_max=d_max,
        arity=arity,
        cluster_level=lc,
        edge_products=products,
        edge_crossings=crossings,
        node_crossings=node_counts,
        violations=violations,
        edge_limit=edge_crossing_limit(d_max),
        node_limit=node_crossing_limit(arity, d_max),
    )


# ---------------------------------------------------------------------------
# recursively admissible triangle circuits (the TTN-vs-MPS separation family)

_TRI_THETA = 0.9
_TRI_PHI = 0.6


class _TriangleBlock:
    """One node of the recursive wiring; hands out entry qubits while keeping
    every sub-block parent edge within its crossing budget."""

    def __init__(self, level: int, base: int, out_gates: list, limit: int, pattern):
        if level == 1:
            self.subs = None
            self.qubits = list(range(base, base + 9))
            self._next = 0
            for i in range(9):
                for j in range(i + 1, 9):
                    out_gates.append(
                        gatelib.fsim(_TRI_THETA, _TRI_PHI, base + i, base + j))
        else:
            third = 9 * 3 ** (level - 2)
            self.subs = [
                _TriangleBlock(level - 1, base + i * third, out_gates, limit, pattern)
                for i in range(3)
            ]
            self.limit = limit
            self.used = [0, 0, 0]
            for i, j in pattern:
                self.used[i] += 1
                self.used[j] += 1
                qa = self.subs[i].entry()
                qb = self.subs[j].entry()
                out_gates.append(gatelib.fsim(_TRI_THETA, _TRI_PHI, qa, qb))

    def entry(self) -> int:
        if self.subs is None:
            q = self.qubits[self._next % 9]
            self._next += 1
            return q
        i = next(idx for idx in range(3) if self.used[idx] < self.limit)
        self.used[i] += 1
        return self.subs[i].entry()


def gen_triangle_pattern(levels: int, d_max: int) -> tuple[Circuit, TreeTopology]:
    """Nested-triangle circuit on 9 * 3**(levels-1) qubits plus its matched
    perfect 3-ary topology.

    Each 9-qubit base cluster carries all-pair rank-4 gates (unrestricted
    below the cluster level); groups of three blocks are joined pairwise,
    linearly for d_max=16 and as a full triangle for d_max=64, with entry
    qubits spread so no restricted edge exceeds its crossing budget.
    """
    if levels < 1:
        raise ValueError("levels must be at least 1")
    if d_max == 16:
        limit, pattern = 2, ((0, 1), (1, 2))
    elif d_max == 64:
        limit, pattern = 3, ((0, 1), (1, 2), (0, 2))
    else:
        raise ValueError("d_max must be 16 or 64")
    num_qubits = 9 * 3 ** (levels - 1)
    out_gates: list = []
    _TriangleBlock(levels, 0, out_gates, limit, pattern)
    circuit = Circuit(num_qubits, out_gates)
    return circuit, perfect_tree(3, levels + 1)


def random_qubit_orders(num_qubits: int, count: int, seed: int) -> list[list[int]]:
    """Seeded random qubit-to-site permutations for MPS ordering studies."""
    rng = np.random.default_rng(seed)
    return [list(rng.permutation(num_qubits)) for _ in range(count)]
