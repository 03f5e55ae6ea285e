"""The adversary: stepwise graph rewriting driven by the choices of a
deterministic exploration policy.

The rewriting never touches an edge the agent has traversed, so the agent's
memory prefix is preserved across every rewrite; the engine verifies this
per surgery (touched edges against the traversed set) and, after every step
that changed the graph, by a full fresh replay.  Structural monitors
(family membership, prefix preservation) raise on failure since they hold
unconditionally; behavioral monitors (the agent being kept out of gadgets,
and each descent ending in a deeper frontier node or a repeated edge) are
recorded as flags because they are only guaranteed for policies that
actually solve the distance-constrained problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .errors import BudgetError, InvariantViolation, ParameterError
from .family import FamilyMeta, FamilyParams, build_family_graph, validate_family_membership
from .graph import LabeledGraph, edge_key, eccentricity
from .runtime import MemoryRecord, Trace, initial_record
from .surgery import SurgeryResult, move_gadget, switch_edges, switch_ports

STAGE_DIVERT_PORT = "divert-port"
STAGE_DIVERT_GADGET = "divert-gadget"
STAGE_REROUTE = "reroute"


@dataclass
class SurgeryAudit:
    op: str
    args: tuple
    changed: bool
    reason: str | None = None
    note: str | None = None

    def to_dict(self) -> dict:
        return {
            "op": self.op,
            "args": list(self.args),
            "changed": self.changed,
            "reason": self.reason,
            "note": self.note,
        }


@dataclass
class StepAudit:
    step: int
    stages: list[str] = field(default_factory=list)
    surgeries: list[SurgeryAudit] = field(default_factory=list)
    changed: bool = False
    prefix_ok: bool | None = None
    flags: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "step": self.step,
            "stages": self.stages,
            "surgeries": [s.to_dict() for s in self.surgeries],
            "changed": self.changed,
            "prefix_ok": self.prefix_ok,
            "flags": self.flags,
        }


@dataclass
class AdversaryRun:
    ecc: int
    alpha: Fraction
    policy_name: str
    width: int
    seed: int
    final_graph: LabeledGraph
    step_count: int
    audit: list[StepAudit]
    trace: Trace
    flags: list[tuple[int, str]]
    prefix_checks: int
    membership_checks: int

    @property
    def params(self) -> FamilyParams:
        cap = (1 + self.alpha) * self.ecc
        return FamilyParams(cap.numerator // cap.denominator + 1, self.width, self.ecc)


class ReplayCursor:
    """Stepwise execution of a policy that survives graph rewrites leaving
    the already-traversed subgraph intact.

    The policy only ever sees memory records, and rewrites preserve labels,
    degrees and the ports of traversed edges, so the accumulated policy state
    remains valid when :meth:`replace_graph` swaps the graph underneath it.
    """

    def __init__(self, graph: LabeledGraph, policy, source: int = 0, meta: FamilyMeta | None = None):
        self.graph = graph
        self.policy = policy
        self.state = policy.start()
        self.memory: list[MemoryRecord] = [initial_record(graph, source)]
        self.traversed: set[tuple[int, int]] = set()
        self.meta = meta
        self.red_explored = False
        self.first_gadget_step: int | None = None
        self.explored_green: dict[int, int] = (
            {i: 0 for i in range(1, meta.params.levels)} if meta else {}
        )
        self.state.observe(self.memory[0])

    @property
    def steps(self) -> int:
        return len(self.memory) - 1

    @property
    def node(self) -> int:
        return self.memory[-1].label

    def pending_port(self) -> int | None:
        return self.state.next_action()

    def pending_edge(self) -> tuple[int, int] | None:
        port = self.pending_port()
        if port is None:
            return None
        return edge_key(self.node, self.graph.neighbor(self.node, port))

    def pending_node(self) -> int | None:
        port = self.pending_port()
        if port is None:
            return None
        return self.graph.neighbor(self.node, port)

    def replace_graph(self, new_graph: LabeledGraph, touched: tuple) -> None:
        for key in touched:
            if key in self.traversed:
                raise InvariantViolation(
                    f"surgery touched already-traversed edge {key}"
                )
        self.graph = new_graph

    def commit(self) -> MemoryRecord:
        port = self.pending_port()
        if port is None:
            raise InvariantViolation("commit requested but the policy halted")
        cur = self.node
        nxt = self.graph.neighbor(cur, port)
        rec = MemoryRecord(nxt, self.graph.degree(nxt), port, self.graph.port_of(nxt, cur))
        key = edge_key(cur, nxt)
        new_edge = key not in self.traversed
        self.traversed.add(key)
        self.memory.append(rec)
        if self.meta is not None:
            meta = self.meta
            if new_edge:
                kind, layer = meta.edge_kind(cur, nxt)
                if kind == "green":
                    self.explored_green[layer] += 1
                if meta.is_gadget(cur) or meta.is_gadget(nxt):
                    self.red_explored = True
            if self.first_gadget_step is None and meta.is_gadget(nxt):
                self.first_gadget_step = self.steps
        self.state.observe(rec)
        return rec

    def advance_to(self, t: int) -> bool:
        """Commit steps until ``t`` traversals are done; False on early halt."""
        while self.steps < t:
            if self.pending_port() is None:
                return False
            self.commit()
        return True

    def as_trace(self) -> Trace:
        return Trace(
            memory=self.memory,
            traversed=self.traversed,
            first_gadget_step=self.first_gadget_step,
        )


# -- the per-step modification ---------------------------------------------------


def _unexplored_layer_edge_at(
    cursor: ReplayCursor, meta: FamilyMeta, v: int, layer: int
) -> bool:
    g = cursor.graph
    for u in g.neighbors(v):
        kind, klayer = meta.edge_kind(v, u)
        if klayer == layer and kind in ("green", "red"):
            if edge_key(v, u) not in cursor.traversed:
                return True
    return False


def _unexplored_greens(cursor: ReplayCursor, meta: FamilyMeta, layer: int) -> list[tuple[int, int]]:
    return [
        e for e in meta.green_edges(cursor.graph, layer) if edge_key(*e) not in cursor.traversed
    ]


def _apply(cursor: ReplayCursor, audit: StepAudit, op: str, args: tuple, result: SurgeryResult) -> bool:
    audit.surgeries.append(
        SurgeryAudit(op, args, result.changed, result.reason, result.note)
    )
    if result.changed:
        cursor.replace_graph(result.graph, result.touched)
    return result.changed


def _modify_step(cursor: ReplayCursor, meta: FamilyMeta, audit: StepAudit) -> None:
    """One modification round at the cursor's current prefix.

    Three stages, each firing only when its guards hold: repoint the pending
    port onto an unexplored edge of the descending layer; if the pending edge
    is red, move the target gadget onto an unexplored green edge so the
    pending port now descends a green edge; if the reached node has no
    unexplored edge below it, move a spare gadget to mint a fresh green edge
    and switch the pending edge onto its endpoint, which does.
    """
    g = cursor.graph
    u = cursor.node
    e = cursor.pending_edge()
    if e is None:
        raise ParameterError("policy halts before the step being modified")
    levels = meta.params.levels
    i = meta.level_of(u)

    if cursor.red_explored or e in cursor.traversed or i is None or i >= levels:
        return

    # repoint the pending port onto the descending layer when it aims elsewhere
    kind, klayer = meta.edge_kind(*e)
    in_layer = kind in ("green", "red") and klayer == i
    if not in_layer:
        candidates = [
            x
            for x in g.neighbors(u)
            if edge_key(u, x) not in cursor.traversed
            and meta.edge_kind(u, x)[1] == i
            and meta.edge_kind(u, x)[0] in ("green", "red")
        ]
        if candidates:
            target = min(candidates)
            pending = cursor.pending_port()
            new_port = g.port_of(u, target)
            res = switch_ports(g, u, pending, new_port)
            audit.stages.append(STAGE_DIVERT_PORT)
            if not _apply(cursor, audit, "switch-ports", (u, pending, new_port), res):
                audit.flags.append("divert-port-noop")
            g = cursor.graph
            e = cursor.pending_edge()

    # a pending red edge: move its gadget onto an unexplored green edge of the
    # same layer, which turns the pending port into a green descent
    kind, klayer = meta.edge_kind(*e)
    if kind == "red":
        greens = _unexplored_greens(cursor, meta, klayer)
        if greens:
            gadget = cursor.pending_node()
            audit.stages.append(STAGE_DIVERT_GADGET)
            res = move_gadget(g, meta, greens[0], gadget)
            if not _apply(cursor, audit, "move-gadget", (greens[0], gadget), res):
                audit.flags.append("divert-gadget-noop")
            g = cursor.graph
            e = cursor.pending_edge()

    reached = cursor.pending_node()
    if (
        i < levels - 1
        and meta.level_of(reached) == i + 1
        and not _unexplored_layer_edge_at(cursor, meta, reached, i + 1)
    ):
        audit.stages.append(STAGE_REROUTE)
        blocked = {u, reached}
        for x in (u, reached):
            for y in g.neighbors(x):
                if meta.is_gadget(y) and meta.gadget_layer(y) == i:
                    blocked.add(y)
        n_lo = {
            v
            for v in meta.level_labels(i)
            if not any(y in blocked for y in g.neighbors(v))
        }
        n_hi = {
            v
            for v in meta.level_labels(i + 1)
            if not any(y in blocked for y in g.neighbors(v))
            and _unexplored_layer_edge_at(cursor, meta, v, i + 1)
        }
        greens = [x for x in _unexplored_greens(cursor, meta, i) if x != e]
        glo = meta._level_top + (i - 1) * meta.params.gadgets_per_layer + 1
        chosen = None
        for gadget in range(glo, glo + meta.params.gadgets_per_layer):
            pair = meta.gadget_level_pair(g, gadget)
            if pair is None or pair[0] not in n_lo or pair[1] not in n_hi:
                continue
            # two specific green edges would make the follow-up switch
            # collide with a gadget next to the pending edge; skip them
            banned = {edge_key(u, pair[1]), edge_key(pair[0], reached)}
            for h in greens:
                if edge_key(*h) not in banned:
                    chosen = (h, gadget, pair)
                    break
            if chosen:
                break
        if chosen:
            h, gadget, (lo, hi) = chosen
            res = move_gadget(g, meta, h, gadget)
            if not _apply(cursor, audit, "move-gadget", (h, gadget), res):
                audit.flags.append("reroute-move-noop")
                return
            g = cursor.graph
            p_reached = g.port_of(reached, u)
            p_hi = g.port_of(hi, lo)
            res = switch_edges(g, meta, reached, hi, p_reached, p_hi)
            if not _apply(
                cursor, audit, "switch-edges", (reached, hi, p_reached, p_hi), res
            ):
                audit.flags.append("reroute-switch-noop")


def graph_modification(
    graph: LabeledGraph,
    alpha: Fraction,
    policy,
    t: int,
    *,
    meta: FamilyMeta | None = None,
) -> tuple[LabeledGraph, StepAudit]:
    """Replay ``policy`` for ``t`` steps on ``graph`` and rewrite the graph so
    that, when possible, the next traversal descends; the first ``t`` records
    of the agent's memory are never altered.

    Standalone form of the engine's per-step rewrite: family parameters are
    derived from the graph itself (source eccentricity, level width).
    """
    if meta is None:
        ecc = eccentricity(graph, 0)
        cap = (1 + Fraction(alpha)) * ecc
        levels = cap.numerator // cap.denominator + 1
        meta = FamilyMeta(FamilyParams(levels, graph.degree(0), ecc))
    cursor = ReplayCursor(graph, policy, source=0, meta=meta)
    if not cursor.advance_to(t):
        raise ParameterError(f"policy halted before step {t + 1}")
    audit = StepAudit(step=t + 1)
    _modify_step(cursor, meta, audit)
    audit.changed = cursor.graph is not graph
    if audit.changed:
        report = validate_family_membership(cursor.graph, meta.params)
        if not report.ok:
            raise InvariantViolation(f"rewrite left the family: {report.codes()}")
        audit.prefix_ok = _prefix_matches_rolling(cursor, t)
        if not audit.prefix_ok:
            raise InvariantViolation("rewrite altered the memory prefix")
    return cursor.graph, audit


def check_memory_prefix_equal(
    policy, g1: LabeledGraph, g2: LabeledGraph, alpha, t: int
) -> bool:
    """True iff the agent's memory sequences on the two graphs agree through
    index t.  An early halt on either side counts as disagreement."""
    del alpha  # instances share the policy; replay depends on graphs only
    c1 = ReplayCursor(g1, policy, source=0)
    c2 = ReplayCursor(g2, policy, source=0)
    if c1.memory[0] != c2.memory[0]:
        return False
    for _ in range(t):
        if c1.pending_port() is None or c2.pending_port() is None:
            return False
        if c1.commit() != c2.commit():
            return False
    return True


def _prefix_matches_rolling(cursor: ReplayCursor, t: int) -> bool:
    """Fresh replay of the cursor's policy on its current graph, compared
    element-wise against the cursor's rolling memory prefix."""
    fresh = ReplayCursor(cursor.graph, cursor.policy, source=cursor.memory[0].label)
    if fresh.memory[0] != cursor.memory[0]:
        return False
    for idx in range(1, t + 1):
        if fresh.pending_port() is None:
            return False
        if fresh.commit() != cursor.memory[idx]:
            return False
    return True


def adversary_behavior(
    ecc: int,
    alpha: Fraction,
    policy,
    width: int,
    *,
    policy_name: str = "?",
    seed: int = 0,
    max_steps: int | None = None,
    validate_each: bool = True,
) -> AdversaryRun:
    """Run the full adversary: build a fresh family member, rewrite it ahead
    of every traversal of the policy, and return it once the policy halts.

    ``validate_each`` re-runs the family-membership validator after every
    graph change (raising on any violation); prefix preservation is verified
    after every change as well.  Gadget-avoidance and descent-dichotomy flags
    are recorded per step but never raise: they are only promised for
    policies that actually solve the distance-constrained problem.
    """
    alpha = Fraction(alpha)
    if ecc < 6:
        raise ParameterError(f"ecc must be >= 6, got {ecc}")
    if width < 16 or width % 16 != 0:
        raise ParameterError(f"width must be a positive multiple of 16, got {width}")
    cap = (1 + alpha) * ecc
    levels = cap.numerator // cap.denominator + 1
    params = FamilyParams(levels, width, ecc)
    graph, meta = build_family_graph(params, seed)
    cursor = ReplayCursor(graph, policy, source=0, meta=meta)
    if max_steps is None:
        max_steps = 50 * graph.edge_count() + 1000

    audits: list[StepAudit] = []
    flags: list[tuple[int, str]] = []
    prefix_checks = 0
    membership_checks = 0
    half = params.greens_per_layer // 2
    x = 1
    while True:
        if x > max_steps:
            raise BudgetError(f"adversary exceeded {max_steps} steps", trace=cursor.as_trace())
        before = cursor.graph
        u = cursor.node
        i = meta.level_of(u)
        greens_left_everywhere = all(
            cursor.explored_green[j] < params.greens_per_layer
            for j in range(1, params.levels)
        )
        avoid_hyp = (
            i is not None and not cursor.red_explored and greens_left_everywhere
        )
        descent_hyp = (
            i is not None
            and i <= params.levels - 1
            and not cursor.red_explored
            and _unexplored_layer_edge_at(cursor, meta, u, i)
            and all(
                cursor.explored_green[j] <= half for j in range(1, params.levels)
            )
        )

        audit = StepAudit(step=x)
        _modify_step(cursor, meta, audit)
        audit.changed = cursor.graph is not before
        if audit.changed:
            if validate_each:
                report = validate_family_membership(cursor.graph, params)
                membership_checks += 1
                if not report.ok:
                    raise InvariantViolation(
                        f"family membership broken at step {x}: {report.codes()}"
                    )
            audit.prefix_ok = _prefix_matches_rolling(cursor, x - 1)
            prefix_checks += 1
            if not audit.prefix_ok:
                raise InvariantViolation(f"memory prefix not preserved at step {x}")

        was_seen = cursor.pending_edge() in cursor.traversed
        cursor.commit()
        reached = cursor.node

        if avoid_hyp and meta.is_gadget(reached):
            audit.flags.append("early-gadget")
        if descent_hyp and not was_seen:
            deeper = (
                i < params.levels - 1
                and meta.level_of(reached) == i + 1
                and _unexplored_layer_edge_at(cursor, meta, reached, i + 1)
            )
            if not deeper:
                audit.flags.append("dichotomy")
        for f in audit.flags:
            flags.append((x, f))
        if audit.stages or audit.flags:
            audits.append(audit)

        if cursor.pending_port() is None:
            break
        x += 1

    final_report = validate_family_membership(cursor.graph, params)
    if not final_report.ok:
        raise InvariantViolation(f"final graph left the family: {final_report.codes()}")
    return AdversaryRun(
        ecc=ecc,
        alpha=alpha,
        policy_name=policy_name,
        width=width,
        seed=seed,
        final_graph=cursor.graph,
        step_count=x,
        audit=audits,
        trace=cursor.as_trace(),
        flags=flags,
        prefix_checks=prefix_checks,
        membership_checks=membership_checks,
    )
