"""Independent brute-force oracles used to cross-check the package's search
routines.  These deliberately re-derive everything from raw adjacency and
never call the package's BFS helpers."""

from collections import deque


def adjacency(graph):
    return {v: list(graph.neighbors(v)) for v in graph.labels()}


def naive_distances(adj, start):
    dist = {start: 0}
    frontier = [start]
    while frontier:
        nxt = []
        for v in frontier:
            for u in adj[v]:
                if u not in dist:
                    dist[u] = dist[v] + 1
                    nxt.append(u)
        frontier = nxt
    return dist


def naive_distance(adj, a, b):
    return naive_distances(adj, a).get(b)


def naive_eccentricity(adj, a):
    dist = naive_distances(adj, a)
    assert len(dist) == len(adj), "oracle eccentricity needs a connected graph"
    return max(dist.values())


def naive_return_distance(traversed, current, source):
    """Shortest path from current to source using only the given edges."""
    adj = {source: [], current: []}
    for a, b in traversed:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    queue = deque([current])
    dist = {current: 0}
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist.get(source)
