"""Independent reference computations used by several test modules."""

from itertools import combinations, product


def n2_path_reliability(arc_rel, node_rel):
    """Inclusion-exclusion over the four source-sink paths of the n=2 network.

    Arc order: A-B, s-A, s-B, A-t, B-t; nodes A, B.
    """
    ab, sa, sb, at, bt = (("arc", i) for i in range(5))
    A, B = ("node", 0), ("node", 1)
    paths = [
        {sa, A, at},
        {sb, B, bt},
        {sa, A, ab, B, bt},
        {sb, B, ab, A, at},
    ]
    p = {("arc", i): arc_rel[i] for i in range(5)}
    p.update({("node", i): node_rel[i] for i in range(2)})
    total = 0.0
    for r in range(1, 5):
        for group in combinations(paths, r):
            comps = set().union(*group)
            prod_ = 1.0
            for c in comps:
                prod_ *= p[c]
            total += (-1) ** (r + 1) * prod_
    return total


def brute_force_reliability(n, arc_rel, node_rel):
    """Plain-Python enumeration with a union-find connectivity test."""
    arcs = [(j, k) for j in range(1, n + 1) for k in range(j + 1, n + 1)]
    arcs += [(0, j) for j in range(1, n + 1)] + [(j, n + 1) for j in range(1, n + 1)]
    probs = list(arc_rel) + list(node_rel)
    total = 0.0
    for state in product((0, 1), repeat=len(probs)):
        w = 1.0
        for s, q in zip(state, probs):
            w *= q if s else 1 - q
        if w == 0:
            continue
        parent = list(range(n + 2))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        node_up = [True] + list(state[len(arcs):]) + [True]
        for up, (u, v) in zip(state, arcs):
            if up and node_up[u] and node_up[v]:
                parent[find(u)] = find(v)
        if find(0) == find(n + 1):
            total += w
    return total
