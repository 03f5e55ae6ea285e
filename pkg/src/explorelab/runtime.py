"""Deterministic execution of exploration policies with penalty accounting
and distance / fuel / completion monitors.

The agent model: the policy sees only the memory sequence (one 4-tuple per
traversal) and answers with the next port to take or a halt.  The runtime
owns the graph, performs traversals, and feeds records back.  Constraint
violations are recorded in the run report and the run continues, so that
monitors can observe what an incorrect policy would have done.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import NamedTuple

from .errors import BudgetError, ParameterError, PolicyError, StructuralError
from .family import FamilyMeta
from .graph import LabeledGraph, edge_key, eccentricity, is_connected

MONITOR_KINDS = ("distance", "fuel", "completion")


class MemoryRecord(NamedTuple):
    """What the agent learns from one traversal (ports are -1 initially)."""

    label: int
    degree: int
    out_port: int
    in_port: int


def initial_record(g: LabeledGraph, source: int) -> MemoryRecord:
    return MemoryRecord(source, g.degree(source), -1, -1)


@dataclass(frozen=True)
class Instance:
    """A problem instance: graph, source label, and the slack constant.

    The source eccentricity, the return-distance cap and the fuel tank size
    are derived exactly (alpha is kept as a Fraction so the floors are exact).
    """

    graph: LabeledGraph
    source: int
    alpha: Fraction
    ecc: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "alpha", Fraction(self.alpha))
        if self.alpha <= 0:
            raise ParameterError(f"alpha must be positive, got {self.alpha}")
        if self.source not in self.graph:
            raise ParameterError(f"source {self.source} not in graph")
        if not is_connected(self.graph):
            raise StructuralError("instance graph must be connected")
        object.__setattr__(self, "ecc", eccentricity(self.graph, self.source))

    @property
    def dist_cap(self) -> Fraction:
        return (1 + self.alpha) * self.ecc

    @property
    def fuel_tank(self) -> Fraction:
        return 2 * (1 + self.alpha) * self.ecc

    @property
    def dist_cap_floor(self) -> int:
        d = self.dist_cap
        return d.numerator // d.denominator

    @property
    def fuel_floor(self) -> int:
        b = self.fuel_tank
        return b.numerator // b.denominator


@dataclass
class Trace:
    """Everything observable about one run."""

    memory: list[MemoryRecord]
    traversed: set[tuple[int, int]] = field(default_factory=set)
    first_gadget_step: int | None = None

    @property
    def steps(self) -> int:
        return len(self.memory) - 1

    @property
    def current(self) -> int:
        return self.memory[-1].label

    def edge_at(self, i: int) -> tuple[int, int]:
        """The edge of the i-th traversal (1-based)."""
        return edge_key(self.memory[i - 1].label, self.memory[i].label)


@dataclass
class RunReport:
    steps: int = 0
    penalty: int = 0
    complete: bool | None = None
    halted: bool = False
    violations: list[dict] = field(default_factory=list)

    def violations_of(self, kind: str) -> list[dict]:
        return [v for v in self.violations if v["kind"] == kind]

    def to_dict(self) -> dict:
        return {
            "steps": self.steps,
            "penalty": self.penalty,
            "complete": self.complete,
            "halted": self.halted,
            "violations": self.violations,
        }


class ExploredDistances:
    """Exact shortest-path distances from a fixed root over a growing edge
    set.  Adding an edge triggers a decrease-only relaxation, so lookups
    stay O(1) between additions."""

    __slots__ = ("root", "dist", "adj")

    def __init__(self, root: int):
        self.root = root
        self.dist: dict[int, int] = {root: 0}
        self.adj: dict[int, list[int]] = {root: []}

    def add_edge(self, a: int, b: int) -> None:
        self.adj.setdefault(a, []).append(b)
        self.adj.setdefault(b, []).append(a)
        da = self.dist.get(a)
        db = self.dist.get(b)
        queue = deque()
        if da is not None and (db is None or db > da + 1):
            self.dist[b] = da + 1
            queue.append(b)
        elif db is not None and (da is None or da > db + 1):
            self.dist[a] = db + 1
            queue.append(a)
        while queue:
            v = queue.popleft()
            dv = self.dist[v]
            for u in self.adj[v]:
                du = self.dist.get(u)
                if du is None or du > dv + 1:
                    self.dist[u] = dv + 1
                    queue.append(u)

    def get(self, v: int) -> int | None:
        return self.dist.get(v)


def execute(
    inst: Instance,
    policy,
    *,
    monitors: frozenset | set | tuple = (),
    max_steps: int | None = None,
    gadget_set: set[int] | None = None,
) -> tuple[Trace, RunReport]:
    """Run ``policy`` on ``inst`` until it halts; returns (trace, report).

    Monitors ("distance", "fuel", "completion") record violations without
    stopping the run.  ``max_steps`` defaults to 50*|E| + 1000; exceeding it
    raises :class:`BudgetError` carrying the partial trace.
    """
    g = inst.graph
    for m in monitors:
        if m not in MONITOR_KINDS:
            raise ParameterError(f"unknown monitor {m!r}")
    edge_total = g.edge_count()
    if max_steps is None:
        max_steps = 50 * edge_total + 1000

    trace = Trace(memory=[initial_record(g, inst.source)])
    report = RunReport()
    state = policy.start()
    state.observe(trace.memory[0])

    fuel = inst.fuel_tank
    watch_distance = "distance" in monitors
    watch_fuel = "fuel" in monitors
    dists = ExploredDistances(inst.source) if watch_distance else None
    cur = inst.source

    while True:
        port = state.next_action()
        if port is None:
            report.halted = True
            break
        if not isinstance(port, int) or not 0 <= port < g.degree(cur):
            raise PolicyError(
                f"policy chose port {port!r} at node {cur} of degree {g.degree(cur)}"
            )
        if trace.steps + 1 > max_steps:
            report.steps = trace.steps
            report.penalty = trace.steps - edge_total
            raise BudgetError(f"exceeded {max_steps} traversals", trace=trace)

        if watch_fuel and fuel < 1:
            report.violations.append(
                {"kind": "fuel", "step": trace.steps + 1, "detail": f"tank {fuel}"}
            )
        fuel -= 1

        nxt = g.neighbor(cur, port)
        rec = MemoryRecord(nxt, g.degree(nxt), port, g.port_of(nxt, cur))
        key = edge_key(cur, nxt)
        new_edge = key not in trace.traversed
        trace.traversed.add(key)
        trace.memory.append(rec)
        cur = nxt
        if cur == inst.source:
            fuel = inst.fuel_tank
        if gadget_set is not None and trace.first_gadget_step is None and cur in gadget_set:
            trace.first_gadget_step = trace.steps
        if watch_distance:
            if new_edge:
                dists.add_edge(key[0], key[1])
            d = dists.get(cur)
            if d is None or d > inst.dist_cap_floor:
                report.violations.append(
                    {
                        "kind": "distance",
                        "step": trace.steps,
                        "detail": f"known return distance {d} > {inst.dist_cap_floor}",
                    }
                )
        state.observe(rec)

    report.steps = trace.steps
    report.penalty = trace.steps - edge_total
    if "completion" in monitors:
        report.complete = len(trace.traversed) == edge_total
        if not report.complete:
            report.violations.append(
                {
                    "kind": "completion",
                    "step": trace.steps,
                    "detail": f"{edge_total - len(trace.traversed)} edges unexplored",
                }
            )
    return trace, report


def known_return_distance(trace: Trace, graph: LabeledGraph, source: int) -> int | None:
    """BFS distance from the trace's current node to the source within the
    subgraph induced by the traversed edges (the independent oracle for the
    distance monitor)."""
    if not trace.memory:
        raise ParameterError("trace is empty")
    adj: dict[int, list[int]] = {source: []}
    for a, b in trace.traversed:
        adj.setdefault(a, []).append(b)
        adj.setdefault(b, []).append(a)
    cur = trace.current
    if cur not in adj:
        return None if cur != source else 0
    dist = {cur: 0}
    queue = deque([cur])
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if u not in dist:
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist.get(source)


def layer_traversal_stats(trace: Trace, meta: FamilyMeta) -> dict[int, tuple[int, int]]:
    """Per-layer (descending, ascending) green-edge traversal counts, taken
    up to the first gadget visit (whole trace when no gadget was visited)."""
    cutoff = trace.first_gadget_step
    if cutoff is None:
        cutoff = trace.steps
    counts = {i: [0, 0] for i in range(1, meta.params.levels)}
    for i in range(1, cutoff + 1):
        a = trace.memory[i - 1].label
        b = trace.memory[i].label
        la, lb = meta.level_of(a), meta.level_of(b)
        if la is None or lb is None:
            continue
        if lb == la + 1:
            counts[la][0] += 1
        elif lb == la - 1:
            counts[lb][1] += 1
    return {i: (d, u) for i, (d, u) in counts.items()}


def penalty_before_step(trace: Trace, cutoff: int) -> int:
    """Number of the first ``cutoff`` traversals that re-cross an edge
    already traversed at that moment."""
    if cutoff > trace.steps:
        raise ParameterError(f"cutoff {cutoff} exceeds trace steps {trace.steps}")
    seen: set[tuple[int, int]] = set()
    repeats = 0
    for i in range(1, cutoff + 1):
        key = trace.edge_at(i)
        if key in seen:
            repeats += 1
        else:
            seen.add(key)
    return repeats
