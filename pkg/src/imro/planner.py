"""Staged impression allocation: exact SDP, the degree heuristic, and the one-stage baseline.

Click probabilities are evaluated against the statuses frozen at the start of
each stage, so users targeted in the same stage never influence one another.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from .influence import InfluenceParams
from .netgraph import SocialGraph

# tolerance used when ranking candidate subsets; earlier (lexicographically
# smaller) candidates win near-ties
_TIE_EPS = 1e-12


class PlannerSizeError(ValueError):
    pass


@dataclass(frozen=True)
class CampaignConfig:
    stages: int
    budget: int
    params: InfluenceParams

    def __post_init__(self):
        if self.stages < 1:
            raise ValueError("stages must be >= 1")
        if self.budget < 1:
            raise ValueError("budget must be >= 1")


@dataclass(frozen=True)
class PolicyResult:
    expected_clicks: float
    first_stage_allocation: tuple
    method: str
    stage_counts: Optional[tuple] = None


@dataclass(frozen=True)
class SdpGuard:
    max_nodes: int = 14
    max_budget: int = 6
    max_stages: int = 4

    def check(self, config: CampaignConfig, graph: SocialGraph) -> None:
        if (graph.node_count > self.max_nodes or config.budget > self.max_budget
                or config.stages > self.max_stages):
            raise PlannerSizeError(
                f"SDP limited to <= {self.max_nodes} nodes, budget <= {self.max_budget}, "
                f"stages <= {self.max_stages} (got {graph.node_count} nodes, budget "
                f"{config.budget}, stages {config.stages}); use the LDH method instead"
            )


DEFAULT_GUARD = SdpGuard()


class _SdpSolver:
    """Backward induction over reachable (stage, budget, clicked, not-clicked) states.

    Nodes are bits of two masks; the memo maps a state to its optimal value.
    """

    def __init__(self, config: CampaignConfig, graph: SocialGraph):
        self.stages = config.stages
        self.model = config.params
        self.n = graph.node_count
        self.full = (1 << self.n) - 1
        self.nbr = graph.neighbor_masks()
        self.deg = graph.degrees
        self.memo: dict = {}

    def probs(self, clicked: int, missed: int) -> list:
        """(node, p) for every untargeted node, in id order."""
        targeted = clicked | missed
        out = []
        f = self.model.from_counts
        for i in range(self.n):
            if targeted >> i & 1:
                continue
            m = self.nbr[i]
            out.append((i, f(self.deg[i], (m & clicked).bit_count(), (m & missed).bit_count())))
        return out

    def value(self, stage: int, budget: int, clicked: int, missed: int) -> float:
        if stage > self.stages or budget == 0 or (clicked | missed) == self.full:
            return 0.0
        key = (stage, budget, clicked, missed)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        v, _ = self.best(stage, budget, clicked, missed)
        self.memo[key] = v
        return v

    def best(self, stage: int, budget: int, clicked: int, missed: int):
        cand = self.probs(clicked, missed)
        if stage == self.stages:
            # last stage: nothing downstream, so the top-budget probabilities win
            order = sorted((t for t in cand if t[1] > 0.0), key=lambda t: (-t[1], t[0]))[:budget]
            chosen = tuple(sorted(i for i, _ in order))
            return sum(p for _, p in order), chosen

        best_v = -1.0
        best_s: tuple = ()
        nxt = stage + 1
        value = self.value
        m = len(cand)

        # depth-first over subsets in lexicographic order, carrying the outcome
        # distribution of the partial subset as (prob, clicked, missed) triples
        stack = [((), 0, 0.0, [(1.0, clicked, missed)])]
        while stack:
            chosen, start, imm, outcomes = stack.pop()
            size = len(chosen)
            rest = budget - size
            ev = 0.0
            for q, c, x in outcomes:
                ev += q * value(nxt, rest, c, x)
            total = imm + ev
            if total > best_v + _TIE_EPS:
                best_v, best_s = total, chosen
            if size == budget:
                continue
            children = []
            for idx in range(start, m):
                i, p = cand[idx]
                bit = 1 << i
                grown = []
                for q, c, x in outcomes:
                    if p > 0.0:
                        grown.append((q * p, c | bit, x))
                    if p < 1.0:
                        grown.append((q * (1.0 - p), c, x | bit))
                children.append((chosen + (i,), idx + 1, imm + p, grown))
            # reversed so the lexicographically smallest child is popped first
            stack.extend(reversed(children))
        return best_v, best_s


def sdp_value(config: CampaignConfig, graph: SocialGraph, guard: SdpGuard = DEFAULT_GUARD) -> PolicyResult:
    """Optimal expected clicks over adaptive staged policies."""
    guard.check(config, graph)
    solver = _SdpSolver(config, graph)
    v, alloc = solver.best(1, config.budget, 0, 0)
    return PolicyResult(v, alloc, "SDP")


def stage_split(budget: int, stages: int) -> tuple:
    """Near-even split of the budget; earlier stages absorb the remainder."""
    base, extra = divmod(budget, stages)
    return tuple(base + (1 if k < extra else 0) for k in range(stages))


def _expected_fixed_plan(params: InfluenceParams, graph: SocialGraph, plan: list) -> float:
    """Exact expected clicks of an open-loop plan (list of per-stage node tuples)."""

    def probs_for(nodes, clicked, missed):
        out = []
        for i in nodes:
            nbrs = graph.neighbors(i)
            y = sum(1 for j in nbrs if j in clicked)
            n = sum(1 for j in nbrs if j in missed)
            out.append(params.from_counts(len(nbrs), y, n))
        return out

    def recurse(k, clicked, missed):
        if k == len(plan):
            return 0.0
        nodes = plan[k]
        ps = probs_for(nodes, clicked, missed)
        total = sum(ps)
        if k + 1 == len(plan):
            return total
        outcomes = [(1.0, clicked, missed)]
        for i, p in zip(nodes, ps):
            grown = []
            for q, c, x in outcomes:
                if p > 0.0:
                    grown.append((q * p, c | {i}, x))
                if p < 1.0:
                    grown.append((q * (1.0 - p), c, x | {i}))
            outcomes = grown
        for q, c, x in outcomes:
            total += q * recurse(k + 1, c, x)
        return total

    return recurse(0, frozenset(), frozenset())


def ldh_plan(config: CampaignConfig, graph: SocialGraph) -> list:
    order = sorted(range(graph.node_count), key=lambda i: (-graph.degree(i), i))
    plan, pos = [], 0
    for b in stage_split(config.budget, config.stages):
        plan.append(tuple(sorted(order[pos:pos + b])))
        pos += b
    return plan


def ldh_value(config: CampaignConfig, graph: SocialGraph) -> PolicyResult:
    """Degree heuristic: each stage targets its share of the highest-degree untargeted users."""
    plan = ldh_plan(config, graph)
    ev = _expected_fixed_plan(config.params, graph, plan)
    return PolicyResult(ev, plan[0], "LDH", stage_counts=stage_split(config.budget, config.stages))


def single_stage_value(config: CampaignConfig, graph: SocialGraph,
                       guard: SdpGuard = DEFAULT_GUARD) -> PolicyResult:
    """All impressions in one stage; exact for guard-sized graphs, top-degree otherwise."""
    one = CampaignConfig(1, config.budget, config.params)
    if graph.node_count <= guard.max_nodes:
        v, alloc = _SdpSolver(one, graph).best(1, config.budget, 0, 0)
    else:
        order = sorted(range(graph.node_count), key=lambda i: (-graph.degree(i), i))
        alloc = tuple(sorted(order[:config.budget]))
        v = _expected_fixed_plan(config.params, graph, [alloc])
    return PolicyResult(v, alloc, "SingleStage")


def plan_value(method: str, config: CampaignConfig, graph: SocialGraph) -> PolicyResult:
    method = method.lower()
    if method == "sdp":
        return sdp_value(config, graph)
    if method == "ldh":
        return ldh_value(config, graph)
    if method in ("single", "singlestage", "single-stage"):
        return single_stage_value(config, graph)
    raise ValueError(f"unknown planning method {method!r}")
