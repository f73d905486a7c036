"""
Action spaces and their oracles
===============================

Every structured space answers one question: which action maximizes a
linear score? Here we poke at the five spaces the library ships.
"""

import numpy as np

from ctsbandit import oracles
from ctsbandit.core import linear_reward

rng = np.random.default_rng(0)

# m-sets: the best m arms
space = oracles.MSets(6, 3)
w = rng.normal(size=6)
print("weights", np.round(w, 2))
print("best 3-set", space.oracle(w))

# matchings of K_{4,4}; edge (r, c) is arm r*4 + c
space = oracles.Matching(4)
w = rng.random(16)
best = space.oracle(w)
print("\nmatching", best, "rows", [a // 4 for a in best], "cols", [a % 4 for a in best])

# brute force agrees
value = max(linear_reward(a, w) for a in space.enumerate())
print("oracle value %.4f, enumeration %.4f" % (linear_reward(best, w), value))

# The initial cover plays every arm at least once; for matchings it is the
# q cyclic shifts of the diagonal.
print("cover", space.initial_cover())

# Shortest paths on a road-like graph. The path oracle maximizes a sum of
# non-positive weights, so a cost vector goes through minimize().
arcs = oracles.road_graph(39, 170, seed=7)
roads = oracles.Path(arcs, 0, 38)
costs = rng.random(roads.n)
path = roads.minimize(costs)
print("\n%r" % roads)
print("cheapest path uses %d arcs, cost %.3f" % (len(path), costs[list(path)].sum()))
# arms are arc indices; walk them from the source to list the nodes
nxt = {arcs[k][0]: arcs[k][1] for k in path}
nodes = [0]
while nodes[-1] != 38:
    nodes.append(nxt[nodes[-1]])
print("nodes", nodes)

# Ties: the smallest incidence vector wins, so equal weights keep the last arms.
print("\nties on MSets(4, 2):", oracles.MSets(4, 2).oracle(np.zeros(4)))
