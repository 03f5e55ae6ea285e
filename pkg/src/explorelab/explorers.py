"""Reference deterministic exploration policies.

A policy is a stateless descriptor; :meth:`start` creates the per-run state,
which is fed memory records through ``observe`` and queried for the next
action through ``next_action`` (a port number, or None to halt).  Run states
keep derived structures for speed, but every decision is a pure function of
the record sequence seen so far: replaying the same records always reproduces
the same actions, which the test suite spot-checks.

Tie-breaking everywhere is lexicographic on (distance, node label, port), so
runs are bit-reproducible.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import ParameterError
from .runtime import ExploredDistances, MemoryRecord


class ExploredView:
    """The subgraph an agent can reconstruct from its memory sequence: known
    degrees, known port assignments, and which nodes still own unexplored
    ports."""

    __slots__ = ("source", "cur", "degree", "adj", "rev", "frontier")

    def __init__(self):
        self.source: int | None = None
        self.cur: int | None = None
        self.degree: dict[int, int] = {}
        self.adj: dict[int, dict[int, int]] = {}
        self.rev: dict[int, dict[int, int]] = {}
        self.frontier: set[int] = set()

    def _touch(self, label: int, degree: int) -> None:
        if label not in self.degree:
            self.degree[label] = degree
            self.adj[label] = {}
            self.rev[label] = {}
            self.frontier.add(label)

    def _refresh_frontier(self, label: int) -> None:
        if len(self.adj[label]) == self.degree[label]:
            self.frontier.discard(label)

    def observe(self, rec: MemoryRecord) -> tuple[bool, int | None]:
        """Feed one record; returns (edge was new, previous node label)."""
        if rec.out_port == -1:
            self.source = self.cur = rec.label
            self._touch(rec.label, rec.degree)
            self._refresh_frontier(rec.label)
            return (False, None)
        prev = self.cur
        new_edge = rec.out_port not in self.adj[prev]
        if new_edge:
            self.adj[prev][rec.out_port] = rec.label
            self.rev[prev][rec.label] = rec.out_port
        self._touch(rec.label, rec.degree)
        if rec.in_port not in self.adj[rec.label]:
            self.adj[rec.label][rec.in_port] = prev
            self.rev[rec.label][prev] = rec.in_port
        self._refresh_frontier(prev)
        self._refresh_frontier(rec.label)
        self.cur = rec.label
        return (new_edge, prev)

    def has_unexplored(self, v: int) -> bool:
        return v in self.frontier

    def smallest_unexplored_port(self, v: int) -> int | None:
        known = self.adj[v]
        for p in range(self.degree[v]):
            if p not in known:
                return p
        return None

    def plan_to(self, is_target) -> tuple[int, list[int]] | None:
        """Breadth-first search from the current node over explored edges,
        expanding port-ascending; returns the closest node satisfying the
        predicate (smallest label on ties) and the port path to it."""
        cur = self.cur
        if is_target(cur):
            return (cur, [])
        parent: dict[int, int | None] = {cur: None}
        level = [cur]
        while level:
            nxt: list[int] = []
            found: list[int] = []
            for x in level:
                row = self.adj[x]
                for p in sorted(row):
                    y = row[p]
                    if y not in parent:
                        parent[y] = x
                        nxt.append(y)
                        if is_target(y):
                            found.append(y)
            if found:
                node = min(found)
                chain = [node]
                while parent[chain[-1]] is not None:
                    chain.append(parent[chain[-1]])
                chain.reverse()
                return (node, [self.rev[a][b] for a, b in zip(chain, chain[1:])])
            level = nxt
        return None


class ExplorationPolicy:
    name = "abstract"

    def start(self):
        raise NotImplementedError


class _PlannedRun:
    """Shared machinery for policies that walk precomputed explored paths and
    replan only when the explored subgraph grows.

    Replanning happens inside ``observe``, at points fully determined by the
    record stream (a new edge appeared, or the plan ran out), so the whole
    state is a pure function of the records and ``next_action`` is a pure
    read.
    """

    def __init__(self):
        self.view = ExploredView()
        self.plan: list[int] | None = []
        self.pos = 0
        self.stale = False

    def observe(self, rec: MemoryRecord) -> None:
        new_edge, prev = self.view.observe(rec)
        if rec.out_port != -1:
            if self.plan and self.pos < len(self.plan):
                self.pos += 1
            if new_edge:
                self._edge_added(prev, rec.label)
                self.stale = True
        if self.plan is not None and (self.stale or self.pos >= len(self.plan)):
            self.stale = False
            self.pos = 0
            self._replan()

    def _edge_added(self, a: int, b: int) -> None:
        pass

    def _replan(self) -> None:
        raise NotImplementedError

    def next_action(self) -> int | None:
        if self.plan is None or self.pos >= len(self.plan):
            return None
        return self.plan[self.pos]


def _require_slack(alpha: Fraction, ecc: int) -> Fraction:
    alpha = Fraction(alpha)
    if alpha <= 0 or alpha * ecc < 1:
        raise ParameterError(
            f"need alpha > 0 and alpha * ecc >= 1, got alpha={alpha}, ecc={ecc}"
        )
    return alpha


class CautiousBfsPolicy(ExplorationPolicy):
    """Distance-safe explorer: repeatedly walks to the closest known node
    that still owns an unexplored port and whose known distance from the
    source is below the return cap, then probes that node's smallest
    unexplored port.

    Every node of the graph has true distance at most ecc from the source,
    and ecc stays below the cap, so the frontier keeps expanding until every
    edge is explored; probing only below the cap keeps the known return
    distance within the cap after every single traversal.
    """

    name = "cautious-bfs"

    def __init__(self, alpha: Fraction, ecc: int):
        alpha = _require_slack(alpha, ecc)
        cap = (1 + alpha) * ecc
        self.cap_floor = cap.numerator // cap.denominator

    def start(self):
        return _CautiousRun(self.cap_floor)


class _CautiousRun(_PlannedRun):
    def __init__(self, cap_floor: int):
        super().__init__()
        self.cap_floor = cap_floor
        self.dist_src: ExploredDistances | None = None

    def observe(self, rec: MemoryRecord) -> None:
        if rec.out_port == -1:
            self.dist_src = ExploredDistances(rec.label)
        super().observe(rec)

    def _edge_added(self, a: int, b: int) -> None:
        self.dist_src.add_edge(a, b)

    def _eligible(self, v: int) -> bool:
        if not self.view.has_unexplored(v):
            return False
        d = self.dist_src.get(v)
        return d is not None and d <= self.cap_floor - 1

    def _replan(self) -> None:
        hit = self.view.plan_to(self._eligible)
        if hit is None:
            self.plan = None
            return
        target, ports = hit
        ports.append(self.view.smallest_unexplored_port(target))
        self.plan = ports


class DfsPolicy(ExplorationPolicy):
    """Depth-first baseline: depart through the smallest port not yet used
    for departure, keeping the first-entry port for last; halts back at the
    source once every port is spent.  Traverses each edge once per direction,
    so a connected graph costs exactly 2|E| moves.  Ignores all constraints.
    """

    name = "dfs"

    def start(self):
        return _DfsRun()


class _DfsRun:
    def __init__(self):
        self.cur: int | None = None
        self.degree: dict[int, int] = {}
        self.first_entry: dict[int, int | None] = {}
        self.departed: dict[int, set[int]] = {}

    def observe(self, rec: MemoryRecord) -> None:
        if rec.out_port == -1:
            self.first_entry[rec.label] = None
        else:
            self.departed[self.cur].add(rec.out_port)
            if rec.label not in self.first_entry:
                self.first_entry[rec.label] = rec.in_port
        self.cur = rec.label
        self.degree.setdefault(rec.label, rec.degree)
        self.departed.setdefault(rec.label, set())

    def next_action(self) -> int | None:
        used = self.departed[self.cur]
        entry = self.first_entry[self.cur]
        fallback = None
        for p in range(self.degree[self.cur]):
            if p in used:
                continue
            if p == entry:
                fallback = p
                continue
            return p
        return fallback


class FuelCautiousPolicy(ExplorationPolicy):
    """Tank-safe explorer: from the source, walks to the closest known node
    with an unexplored port whose round trip fits the tank, probes one port,
    and walks straight home to refuel; halts when no such node remains.

    A node at known distance d costs at most 2d + 2 to visit, probe, and
    return from, so requiring 2d + 2 <= floor(tank) keeps every excursion
    within one tank.
    """

    name = "fuel-cautious"

    def __init__(self, alpha: Fraction, ecc: int):
        alpha = _require_slack(alpha, ecc)
        tank = 2 * (1 + alpha) * ecc
        self.tank_floor = tank.numerator // tank.denominator

    def start(self):
        return _FuelRun(self.tank_floor)


class _FuelRun(_PlannedRun):
    def __init__(self, tank_floor: int):
        super().__init__()
        self.tank_floor = tank_floor
        self.dist_src: ExploredDistances | None = None

    def observe(self, rec: MemoryRecord) -> None:
        if rec.out_port == -1:
            self.dist_src = ExploredDistances(rec.label)
        super().observe(rec)

    def _edge_added(self, a: int, b: int) -> None:
        self.dist_src.add_edge(a, b)

    def _affordable(self, v: int) -> bool:
        if not self.view.has_unexplored(v):
            return False
        d = self.dist_src.get(v)
        return d is not None and 2 * d + 2 <= self.tank_floor

    def _replan(self) -> None:
        view = self.view
        if view.cur == view.source:
            hit = view.plan_to(self._affordable)
            if hit is None:
                self.plan = None
                return
            target, ports = hit
            ports.append(view.smallest_unexplored_port(target))
            self.plan = ports
        else:
            _, ports = view.plan_to(lambda v: v == view.source)
            self.plan = ports


POLICY_NAMES = ("cautious-bfs", "dfs", "fuel-cautious")


def make_policy(name: str, alpha: Fraction, ecc: int) -> ExplorationPolicy:
    """Look up a policy by registry name, instantiated for (alpha, ecc)."""
    if name == "cautious-bfs":
        return CautiousBfsPolicy(alpha, ecc)
    if name == "dfs":
        return DfsPolicy()
    if name == "fuel-cautious":
        return FuelCautiousPolicy(alpha, ecc)
    raise ParameterError(f"unknown policy {name!r}; known: {', '.join(POLICY_NAMES)}")
