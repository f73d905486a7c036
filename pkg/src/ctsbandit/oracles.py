"""Exact linear-maximization oracles over structured action spaces.

Every space maps a weight vector ``w`` to an action maximizing ``sum(w[A])``.
Ties are broken towards the lexicographically smallest incidence vector
where the space allows it cheaply (enumerated, m-sets, partitions); the
matching and path solvers break ties deterministically but by their own
order.
"""

from __future__ import annotations

import heapq
import itertools
import math
from pathlib import Path as _FsPath

import numpy as np
from scipy.optimize import linear_sum_assignment

from .core import Action, CapabilityError, CapacityError

__all__ = [
    "ActionSpace",
    "Enumerated",
    "MSets",
    "Partition",
    "Matching",
    "Path",
    "InfeasibleError",
    "oracle",
    "enumerate_actions",
    "initial_cover",
    "load_edge_list",
    "road_graph",
    "DEFAULT_ENUMERATION_CAP",
]

DEFAULT_ENUMERATION_CAP = 10**6


class InfeasibleError(RuntimeError):
    """No source-to-target path exists."""


def _lex_first_best(values, incidence_order):
    """Index of the maximum, preferring the first entry of ``incidence_order``."""
    best = values[incidence_order].max()
    return incidence_order[np.flatnonzero(values[incidence_order] == best)[0]]


class ActionSpace:
    """Base class; subclasses set ``n`` and ``m`` and implement ``oracle``."""

    n: int
    m: int

    def oracle(self, weights) -> Action:
        raise NotImplementedError

    def minimize(self, costs) -> Action:
        """Action of minimal total cost, i.e. the oracle on negated costs."""
        return self.oracle(-np.asarray(costs, dtype=float))

    def enumerate(self, cap: int = DEFAULT_ENUMERATION_CAP) -> list:
        raise CapabilityError(f"{type(self).__name__} cannot be enumerated")

    def initial_cover(self) -> list:
        raise CapabilityError(f"{type(self).__name__} has no initial cover")

    def _check(self, weights) -> np.ndarray:
        w = np.asarray(weights, dtype=float)
        if w.shape != (self.n,):
            raise ValueError(f"expected {self.n} weights, got shape {w.shape}")
        return w


class Enumerated(ActionSpace):
    def __init__(self, actions, n: int | None = None):
        actions = [Action(A) for A in actions]
        if not actions:
            raise ValueError("an enumerated space needs at least one action")
        self.n = n if n is not None else 1 + max(A[-1] for A in actions)
        actions = [Action(A, self.n) for A in actions]
        if len(set(actions)) != len(actions):
            raise ValueError("duplicate actions")
        self.actions = actions
        self.m = max(len(A) for A in actions)
        self.incidence = np.array([A.incidence(self.n) for A in actions], dtype=float)
        # rows sorted by incidence vector, ascending
        self._lex = np.array(sorted(range(len(actions)),
                                    key=lambda k: tuple(self.incidence[k])), dtype=np.intp)

    def oracle(self, weights) -> Action:
        w = self._check(weights)
        return self.actions[_lex_first_best(self.incidence @ w, self._lex)]

    def enumerate(self, cap: int = DEFAULT_ENUMERATION_CAP) -> list:
        if len(self.actions) > cap:
            raise CapacityError(f"{len(self.actions)} actions exceed cap {cap}")
        return list(self.actions)

    def initial_cover(self) -> list:
        """Greedy: for each uncovered arm in order, the first action holding it."""
        cover, covered = [], set()
        for i in range(self.n):
            if i in covered:
                continue
            holder = next((A for A in self.actions if i in A), None)
            if holder is None:
                raise CapabilityError(f"arm {i} belongs to no action")
            cover.append(holder)
            covered.update(holder)
        return cover

    def __repr__(self):
        return f"Enumerated({len(self.actions)} actions, n={self.n})"


class MSets(ActionSpace):
    """All subsets of exactly ``m`` arms out of ``n``."""

    def __init__(self, n: int, m: int):
        if not 1 <= m <= n:
            raise ValueError("need 1 <= m <= n")
        self.n, self.m = n, m
        self._neg_index = -np.arange(n)

    def oracle(self, weights) -> Action:
        w = self._check(weights)
        # ties go to larger indices: that yields the smallest incidence vector
        order = np.lexsort((self._neg_index, -w))
        return Action(order[: self.m])

    def enumerate(self, cap: int = DEFAULT_ENUMERATION_CAP) -> list:
        count = math.comb(self.n, self.m)
        if count > cap:
            raise CapacityError(f"C({self.n},{self.m}) = {count} exceeds cap {cap}")
        return [Action(c) for c in itertools.combinations(range(self.n), self.m)]

    def initial_cover(self) -> list:
        starts = list(range(0, self.n - self.m + 1, self.m))
        if starts[-1] + self.m < self.n:
            starts.append(self.n - self.m)
        return [Action(range(s, s + self.m)) for s in starts]

    def __repr__(self):
        return f"MSets({self.n}, {self.m})"


class Partition(ActionSpace):
    """Disjoint consecutive blocks of ``m`` arms: the separated action space."""

    def __init__(self, n: int, m: int):
        if m < 1 or n % m:
            raise ValueError("m must divide n")
        self.n, self.m = n, m
        self.blocks = [Action(range(k * m, (k + 1) * m)) for k in range(n // m)]

    def oracle(self, weights) -> Action:
        w = self._check(weights)
        scores = w.reshape(-1, self.m).sum(axis=1)
        # later blocks have smaller incidence vectors
        return self.blocks[len(scores) - 1 - int(np.argmax(scores[::-1]))]

    def enumerate(self, cap: int = DEFAULT_ENUMERATION_CAP) -> list:
        if len(self.blocks) > cap:
            raise CapacityError(f"{len(self.blocks)} blocks exceed cap {cap}")
        return list(self.blocks)

    def initial_cover(self) -> list:
        return list(self.blocks)

    def __repr__(self):
        return f"Partition({self.n}, {self.m})"


class Matching(ActionSpace):
    """Perfect matchings of K_{q,q}; edge (r, c) is arm ``r * q + c``."""

    MAX_ENUMERABLE_Q = 8

    def __init__(self, q: int):
        if q < 1:
            raise ValueError("q must be positive")
        self.q = q
        self.n = q * q
        self.m = q
        self._rows = np.arange(q) * q

    def oracle(self, weights) -> Action:
        w = self._check(weights).reshape(self.q, self.q)
        rows, cols = linear_sum_assignment(w, maximize=True)
        return Action(rows * self.q + cols)

    def enumerate(self, cap: int = DEFAULT_ENUMERATION_CAP) -> list:
        if self.q > self.MAX_ENUMERABLE_Q or math.factorial(self.q) > cap:
            raise CapacityError(f"{self.q}! matchings exceed the enumeration cap")
        return [Action(self._rows + np.asarray(p)) for p in itertools.permutations(range(self.q))]

    def initial_cover(self) -> list:
        r = np.arange(self.q)
        return [Action(r * self.q + (r + k) % self.q) for k in range(self.q)]

    def __repr__(self):
        return f"Matching({self.q})"


class Path(ActionSpace):
    """Source-to-target paths in a directed multigraph; arc k is arm k.

    The oracle maximizes the total weight over paths and therefore requires
    non-positive weights (it runs Dijkstra on the negated weights).
    """

    def __init__(self, arcs, source, target, max_paths: int = DEFAULT_ENUMERATION_CAP):
        self.arcs = [(int(u), int(v)) for u, v in arcs]
        self.n = len(self.arcs)
        self.source, self.target = int(source), int(target)
        self.max_paths = max_paths
        self.nodes = sorted({x for arc in self.arcs for x in arc} | {self.source, self.target})
        self.out_arcs = {v: [] for v in self.nodes}
        for k, (u, v) in enumerate(self.arcs):
            self.out_arcs[u].append((k, v))
        _, _, dist = self._dijkstra(np.zeros(self.n))
        if self.target not in dist:
            raise InfeasibleError(f"no path from {self.source} to {self.target}")
        # a simple path visits each node at most once
        self.m = len(self.nodes) - 1

    def _dijkstra(self, costs):
        dist = {self.source: 0.0}
        pred = {}
        heap = [(0.0, self.source)]
        done = set()
        while heap:
            d, u = heapq.heappop(heap)
            if u in done:
                continue
            done.add(u)
            if u == self.target:
                break
            for k, v in self.out_arcs[u]:
                nd = d + costs[k]
                if v not in dist or nd < dist[v]:
                    dist[v] = nd
                    pred[v] = k
                    heapq.heappush(heap, (nd, v))
        return pred, done, dist

    def oracle(self, weights) -> Action:
        w = self._check(weights)
        if np.any(w > 0):
            raise ValueError("the path oracle needs non-positive weights (clamp into the prior range)")
        pred, _, dist = self._dijkstra(-w)
        if self.target not in dist:
            raise InfeasibleError(f"no path from {self.source} to {self.target}")
        arms, v = [], self.target
        while v != self.source:
            k = pred[v]
            arms.append(k)
            v = self.arcs[k][0]
        return Action(arms)

    def enumerate(self, cap: int | None = None) -> list:
        cap = self.max_paths if cap is None else cap
        found = []
        stack = [(self.source, [], {self.source})]
        while stack:
            u, arms, seen = stack.pop()
            if u == self.target:
                found.append(Action(arms))
                if len(found) > cap:
                    raise CapacityError(f"more than {cap} simple paths")
                continue
            for k, v in reversed(self.out_arcs[u]):
                if v not in seen:
                    stack.append((v, arms + [k], seen | {v}))
        return sorted(set(found))

    def __repr__(self):
        return f"Path({len(self.nodes)} nodes, {self.n} arcs, {self.source}->{self.target})"


def oracle(space: ActionSpace, weights) -> Action:
    return space.oracle(weights)


def enumerate_actions(space: ActionSpace, cap: int = DEFAULT_ENUMERATION_CAP) -> list:
    return space.enumerate(cap)


def initial_cover(space: ActionSpace) -> list:
    return space.initial_cover()


def load_edge_list(path) -> list:
    """Read ``tail head`` arcs, one per line; arc k is the k-th arc line.

    Blank lines and lines starting with ``#`` or ``%`` are skipped.
    """
    arcs = []
    for line in _FsPath(path).read_text().splitlines():
        line = line.strip()
        if not line or line[0] in "#%":
            continue
        fields = line.split()
        if len(fields) < 2:
            raise ValueError(f"malformed arc line: {line!r}")
        arcs.append((int(fields[0]), int(fields[1])))
    return arcs


def road_graph(nodes: int = 39, arcs: int = 170, seed: int = 0) -> list:
    """Random road-like directed graph, strongly connected.

    Nodes are random points in the unit square, numbered by x coordinate so
    node 0 and node ``nodes - 1`` sit on opposite sides. Roads are the
    Euclidean minimum spanning tree plus the shortest remaining segments,
    each road contributing one arc per direction (``arcs`` must be even).
    """
    if arcs % 2 or arcs // 2 < nodes - 1:
        raise ValueError("arcs must be even and at least 2 * (nodes - 1)")
    roads = arcs // 2
    if roads > nodes * (nodes - 1) // 2:
        raise ValueError("too many arcs for a simple graph")
    rng = np.random.default_rng(seed)
    pts = rng.random((nodes, 2))
    pts = pts[np.argsort(pts[:, 0], kind="stable")]
    d = np.linalg.norm(pts[:, None, :] - pts[None, :, :], axis=-1)

    # Prim
    in_tree = np.zeros(nodes, dtype=bool)
    in_tree[0] = True
    best = d[0].copy()
    parent = np.zeros(nodes, dtype=int)
    edges = set()
    for _ in range(nodes - 1):
        cand = np.where(in_tree, np.inf, best)
        v = int(np.argmin(cand))
        edges.add((min(v, parent[v]), max(v, parent[v])))
        in_tree[v] = True
        closer = d[v] < best
        best = np.where(closer, d[v], best)
        parent = np.where(closer, v, parent)

    iu, ju = np.triu_indices(nodes, k=1)
    for k in np.argsort(d[iu, ju], kind="stable"):
        if len(edges) == roads:
            break
        edges.add((int(iu[k]), int(ju[k])))

    out = []
    for u, v in sorted(edges):
        out.extend([(u, v), (v, u)])
    return out
