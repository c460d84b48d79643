"""Exact binary labeling of items via a source/sink minimum cut.

Items are partitioned into a source class (class 1) and a sink class by
minimizing: class-2 scores over items placed in class 1, plus class-1 scores
over items placed in class 2, plus association scores over split pairs. The
graph realizes these as capacities, and the cut is computed exactly with a
max-flow algorithm over rounded integer capacities, so there is no
floating-point termination risk. A brute-force enumerator over all subsets
serves as the testing oracle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import IO, Iterable, Mapping

import numpy as np

from .classifiers import IndividualScores

DEFAULT_SCALE = 10**6


@dataclass(frozen=True)
class AssociationScores:
    """Symmetric nonnegative pairwise scores, stored once per unordered pair (i < k)."""

    pairs: Mapping[tuple[int, int], float]

    def __post_init__(self) -> None:
        for (i, k), value in self.pairs.items():
            if not (0 <= i < k):
                raise ValueError(f"pair ({i}, {k}) must satisfy 0 <= i < k")
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"association ({i}, {k}) = {value} must be finite and >= 0")

    def get(self, i: int, k: int) -> float:
        if i > k:
            i, k = k, i
        return self.pairs.get((i, k), 0.0)

    def __len__(self) -> int:
        return len(self.pairs)


EMPTY_ASSOCIATIONS = AssociationScores(pairs={})


def partition_cost(
    ind: IndividualScores, assoc: AssociationScores, source_side: Iterable[int]
) -> float:
    """Cost of assigning ``source_side`` to class 1 and the rest to class 2."""
    chosen = set(source_side)
    cost = 0.0
    for i in range(len(ind)):
        cost += ind.class2[i] if i in chosen else ind.class1[i]
    for (i, k), value in assoc.pairs.items():
        if (i in chosen) != (k in chosen):
            cost += value
    return cost


class FlowNetwork:
    """Source/sink capacity graph over n items, with integer-scaled capacities.

    Nodes 0..n-1 are items, node n is the source, node n+1 the sink. Arcs are
    stored in residual pairs: arc a and arc a^1 are each other's partner.
    Undirected association edges carry full capacity in both directions.
    """

    def __init__(self, n: int, scale_factor: int = DEFAULT_SCALE):
        if n < 0:
            raise ValueError("item count must be >= 0")
        if scale_factor < 1:
            raise ValueError("scale_factor must be >= 1")
        self.n = n
        self.scale_factor = scale_factor
        self.source = n
        self.sink = n + 1
        self._to: list[int] = []
        self._cap: list[int] = []
        self._adj: list[list[int]] = [[] for _ in range(n + 2)]
        self._forward: list[int] = []  # arc ids of forward arcs, insertion order
        self._ind: IndividualScores | None = None
        self._assoc: AssociationScores | None = None
        # set by build_network: arc ids of (source, i) and (i, sink) per item
        self._terminal_arcs: list[tuple[int, int]] | None = None

    def _add_arc_pair(self, u: int, v: int, cap_uv: int, cap_vu: int) -> None:
        self._forward.append(len(self._to))
        self._adj[u].append(len(self._to))
        self._to.append(v)
        self._cap.append(cap_uv)
        self._adj[v].append(len(self._to))
        self._to.append(u)
        self._cap.append(cap_vu)

    @property
    def arc_count(self) -> int:
        return len(self._forward)

    def arcs(self) -> list[tuple[int, int, int]]:
        """Forward arcs as (u, v, capacity) triples, in insertion order."""
        return [(self._to[a ^ 1], self._to[a], self._cap[a]) for a in self._forward]

    def dump(self, stream: IO[str]) -> None:
        """Write the arc list as ``u v capacity`` lines, with s/t named nodes."""

        def name(node: int) -> str:
            if node == self.source:
                return "s"
            if node == self.sink:
                return "t"
            return str(node)

        for u, v, cap in self.arcs():
            stream.write(f"{name(u)} {name(v)} {cap}\n")


def _scaled(value: float, scale: int) -> int:
    # round-half-even keeps the scaled weights unbiased
    return round(value * scale)


def build_network(
    ind: IndividualScores,
    assoc: AssociationScores,
    scale_factor: int = DEFAULT_SCALE,
) -> FlowNetwork:
    """Build the cut graph: n source arcs, n sink arcs, one edge per nonzero pair.

    Real-valued scores are rounded to integers at ``scale_factor`` so the flow
    computation terminates exactly. Zero-weight association pairs are omitted.
    """
    n = len(ind)
    net = FlowNetwork(n, scale_factor)
    net._ind = ind
    net._assoc = assoc
    # np.rint rounds half to even, matching _scaled
    toward_source = np.rint(ind.class1 * scale_factor).astype(np.int64).tolist()
    toward_sink = np.rint(ind.class2 * scale_factor).astype(np.int64).tolist()
    terminal_arcs = []
    for i in range(n):
        source_arc = len(net._to)
        net._add_arc_pair(net.source, i, toward_source[i], 0)
        sink_arc = len(net._to)
        net._add_arc_pair(i, net.sink, toward_sink[i], 0)
        terminal_arcs.append((source_arc, sink_arc))
    net._terminal_arcs = terminal_arcs
    for (i, k) in sorted(assoc.pairs):
        if k >= n:
            raise ValueError(f"association pair ({i}, {k}) out of range for n={n}")
        cap = _scaled(float(assoc.pairs[(i, k)]), scale_factor)
        if cap == 0:
            continue
        net._add_arc_pair(i, k, cap, cap)
    return net


@dataclass(frozen=True)
class CutResult:
    """A minimum partition: class-1 items, its cost over the raw scores, and
    the integer max-flow value when one was computed."""

    source_side: tuple[int, ...]
    cost: float
    max_flow_value: int | None = None


def _dinic_max_flow(net: FlowNetwork, cap: list[int]) -> int:
    """Dinic's algorithm: repeated BFS level graphs, each drained by an
    iterative blocking-flow DFS. Capacities are mutated in ``cap``."""
    to, adj = net._to, net._adj
    source, sink = net.source, net.sink
    n_nodes = net.n + 2
    total = 0
    if net._terminal_arcs is not None:
        # saturate the direct source -> item -> sink lanes up front; this is
        # exactly the first level-graph phase, done in one cheap pass
        for source_arc, sink_arc in net._terminal_arcs:
            pushed = min(cap[source_arc], cap[sink_arc])
            if pushed > 0:
                cap[source_arc] -= pushed
                cap[source_arc + 1] += pushed
                cap[sink_arc] -= pushed
                cap[sink_arc + 1] += pushed
                total += pushed
    while True:
        level = [-1] * n_nodes
        level[source] = 0
        queue = [source]
        for u in queue:
            lv = level[u] + 1
            for a in adj[u]:
                if cap[a] > 0:
                    v = to[a]
                    if level[v] < 0:
                        level[v] = lv
                        queue.append(v)
        if level[sink] < 0:
            return total
        it = [0] * n_nodes
        path: list[int] = []
        u = source
        while True:
            if u == sink:
                pushed = min(cap[a] for a in path)
                total += pushed
                retreat = -1
                for depth, a in enumerate(path):
                    cap[a] -= pushed
                    cap[a ^ 1] += pushed
                    if retreat < 0 and cap[a] == 0:
                        retreat = depth
                del path[retreat:]
                u = to[path[-1]] if path else source
                continue
            adj_u = adj[u]
            len_u = len(adj_u)
            iu = it[u]
            lv = level[u] + 1
            advanced = False
            while iu < len_u:
                a = adj_u[iu]
                if cap[a] > 0 and level[to[a]] == lv:
                    it[u] = iu
                    path.append(a)
                    u = to[a]
                    advanced = True
                    break
                iu += 1
            if advanced:
                continue
            it[u] = iu
            if not path:
                break  # blocking flow complete, rebuild levels
            level[u] = -1  # dead end, prune from this phase
            a = path.pop()
            u = to[a ^ 1]
            it[u] += 1


def _residual_reachable(net: FlowNetwork, cap: list[int]) -> list[bool]:
    seen = [False] * (net.n + 2)
    seen[net.source] = True
    stack = [net.source]
    to, adj = net._to, net._adj
    while stack:
        u = stack.pop()
        for a in adj[u]:
            v = to[a]
            if cap[a] > 0 and not seen[v]:
                seen[v] = True
                stack.append(v)
    return seen


def min_cut(net: FlowNetwork) -> CutResult:
    """Compute a minimum-cost source/sink cut of the network.

    The returned partition is canonical: the source side is the set of items
    reachable from the source in the final residual graph, i.e. the unique
    minimum cut with smallest source side, which makes results deterministic
    when several minimum cuts exist. The cost is recomputed from the raw
    (unscaled) scores of the partition. The network is not mutated.
    """
    if net._ind is None:
        raise ValueError("network was not produced by build_network")
    cap = list(net._cap)
    flow = _dinic_max_flow(net, cap)
    reachable = _residual_reachable(net, cap)
    source_side = tuple(i for i in range(net.n) if reachable[i])
    assoc = net._assoc if net._assoc is not None else EMPTY_ASSOCIATIONS
    cost = partition_cost(net._ind, assoc, source_side)
    return CutResult(source_side=source_side, cost=cost, max_flow_value=flow)


def scale_instance(
    ind: IndividualScores,
    assoc: AssociationScores,
    scale_factor: int = DEFAULT_SCALE,
) -> tuple[IndividualScores, AssociationScores]:
    """Integer-scaled copy of an instance, mirroring build_network's rounding.

    Brute-forcing the scaled copy gives costs directly comparable to a
    network's max-flow value, with no float tolerance involved.
    """
    s_ind = IndividualScores(
        class1=np.array([float(_scaled(float(x), scale_factor)) for x in ind.class1]),
        class2=np.array([float(_scaled(float(x), scale_factor)) for x in ind.class2]),
    )
    s_pairs = {}
    for key, value in assoc.pairs.items():
        cap = _scaled(float(value), scale_factor)
        if cap != 0:
            s_pairs[key] = float(cap)
    return s_ind, AssociationScores(pairs=s_pairs)


BRUTE_FORCE_LIMIT = 20


def brute_force_min(ind: IndividualScores, assoc: AssociationScores) -> CutResult:
    """Exhaustive minimum over all 2^n partitions; the oracle for min_cut.

    Ties break toward the lexicographically smallest sorted index tuple.
    Refuses instances with more than 20 items.
    """
    n = len(ind)
    if n > BRUTE_FORCE_LIMIT:
        raise ValueError(f"brute force refused: n={n} exceeds {BRUTE_FORCE_LIMIT}")
    if n == 0:
        return CutResult(source_side=(), cost=0.0)
    best_cost = None
    best_side: tuple[int, ...] = ()
    for mask in range(1 << n):
        side = tuple(i for i in range(n) if mask >> i & 1)
        cost = partition_cost(ind, assoc, side)
        if best_cost is None or cost < best_cost or (cost == best_cost and side < best_side):
            best_cost = cost
            best_side = side
    return CutResult(source_side=best_side, cost=best_cost)
