"""End-to-end allocation pipelines.

Two solvers share the same skeleton: sort items, normalize valuations,
greedily remove satisfied (agent, bundle) pairs, deal the rest into bags,
fill the bags, then translate everything back to the original items.

``solve_poly34`` guarantees every agent 3/4 of her maximin share without
ever computing a maximin share: rows are normalized to the average bound
instead (strongly polynomial).  Whenever the bag profiles prove some
agent's working bound is overestimated, the tentative removals are rolled
back, that agent's row is rescaled by the tightest certified bound, and
the removal phases rerun.

``solve_existence`` computes each agent's exact maximin share first (via
the branch-and-bound oracle), normalizes by it, and runs the one-shot
pipeline; with ``plus=True`` the guarantee rises to 3/4 + 1/(12 n).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable

from .bags import (
    BagFillResult,
    agents_needing_rescale,
    fill_bags,
    profile_agent,
)
from .errors import InputError, InvariantViolation, IterationCapExceeded, NotRescalable
from .model import (
    Allocation,
    Instance,
    OrderedView,
    lift_allocation,
    normalize_average,
    normalize_mms,
    order_instance,
)
from .oracle import DEFAULT_CAP, exact_mms
from .reduction import (
    ReductionState,
    reduce_all_shapes,
    reduce_fixed,
    reduce_tentative,
    undo_tentative,
)

ALPHA_BASE = Fraction(3, 4)

MODE_BASE = "three_quarter"
MODE_PLUS = "three_quarter_plus"


@dataclass(frozen=True)
class SolveStats:
    """Counters and an audit trail for one solve.

    per_agent_ratio holds v_i(bundle)/share_i against the original instance
    and is only filled by pipelines that computed exact shares anyway; a None
    entry means that agent's share is zero (anything satisfies her).  events
    is a JSON-ready trace of reductions, rescales, undos, and bag rounds.
    """

    update_loop_iterations: int
    fixed_assignments: int
    tentative_assignments: int
    bag_rounds: int
    per_agent_ratio: tuple[Fraction | None, ...] | None
    events: tuple[dict, ...] = ()

    def to_json(self) -> dict:
        ratios = None
        if self.per_agent_ratio is not None:
            ratios = [None if r is None else str(r) for r in self.per_agent_ratio]
        return {
            "update_loop_iterations": self.update_loop_iterations,
            "fixed_assignments": self.fixed_assignments,
            "tentative_assignments": self.tentative_assignments,
            "bag_rounds": self.bag_rounds,
            "per_agent_ratio": ratios,
            "events": list(self.events),
        }


def gamma_constant(n: int) -> Fraction:
    """The guarantee margin of the plus pipeline: 1/(12 n) for n agents."""
    if n < 1:
        raise InputError(f"agent count must be >= 1, got {n}")
    return Fraction(1, 12 * n)


def iteration_cap(n: int) -> int:
    """Hard budget for the rescale loop: comfortably above the provable
    O(n^3) bound, so hitting it means a bug, not a big instance."""
    return 4 * n**3 + 16


def rescale_candidates(
    state: ReductionState, agent: int, held_out: frozenset[int] | set[int] = frozenset()
) -> dict[str, Fraction]:
    """Certified upper bounds on ``agent``'s maximin share, by source.

    Each candidate says: if the agent's true share exceeded this value, some
    removal or profile condition would have fired already.  The caller takes
    the max.  ``held_out`` lists items that were tentatively assigned before
    the rollback; the "open_pair" candidate only considers items outside it.

    Keys: "top" (4/3 of the best item), "mid_pair" (4/3 of positions n,n+1),
    "tail_triple" (4/3 of positions 2n-1..2n+1), "open_pair" (4/3 of the best
    non-held bag item plus the best non-held filler), "bag_deficit" (from the
    low-bag accounting).  Missing positions contribute zero; a candidate with
    no witness items is omitted.
    """
    n = len(state.agents)
    items = state.items
    row = state.vals[agent]

    def at(p: int) -> Fraction:
        return row[items[p - 1]] if 1 <= p <= len(items) else Fraction(0)

    four_thirds = Fraction(4, 3)
    cands: dict[str, Fraction] = {
        "top": four_thirds * at(1),
        "mid_pair": four_thirds * (at(n) + at(n + 1)),
        "tail_triple": four_thirds * (at(2 * n - 1) + at(2 * n) + at(2 * n + 1)),
    }
    covered = min(2 * n, len(items))
    bag_item = next((j for j in items[:covered] if j not in held_out), None)
    filler_item = next((j for j in items[covered:] if j not in held_out), None)
    if bag_item is not None and filler_item is not None:
        cands["open_pair"] = four_thirds * (row[bag_item] + row[filler_item])
    prof = profile_agent(state, agent)
    if prof.low_bags > 0:
        cands["bag_deficit"] = (
            prof.filler_value + Fraction(3, 4) * prof.low_bags - prof.deficit
        ) / (Fraction(7, 8) * prof.low_bags)
    return cands


def update_upper_bound(
    state: ReductionState,
    agent: int,
    held_out: frozenset[int] | set[int] = frozenset(),
    check_membership: bool = True,
) -> Fraction:
    """The tightest certified bound on ``agent``'s maximin share, in (0, 1).

    The caller divides the agent's row by this value.  ``check_membership``
    re-derives needs_rescale on the given state and raises NotRescalable if
    it does not hold; the solver disables the check because membership is
    established on the post-tentative state while the bound is evaluated on
    the rolled-back one.
    """
    if check_membership and not profile_agent(state, agent).needs_rescale:
        raise NotRescalable(f"agent {agent} does not need a rescale here")
    cands = rescale_candidates(state, agent, held_out)
    if "bag_deficit" not in cands:
        state._notify(
            "diagnostic",
            {"note": "rescale target has no low bags", "agent": agent},
        )
    alpha = max(cands.values())
    if not 0 < alpha < 1:
        raise InvariantViolation(
            f"rescale bound for agent {agent} is {alpha}, outside (0, 1); "
            f"candidates: { {k: str(v) for k, v in cands.items()} }"
        )
    return alpha


def _compose_allocation(
    inst: Instance,
    view: OrderedView,
    state: ReductionState,
    fills: BagFillResult,
    silent_agents: list[int],
) -> tuple[Allocation, int]:
    """Merge log + bag assignments over sorted positions, fold leftovers into
    the last assigned bundle, and lift back to original items.  Returns the
    lifted allocation (stats unset) and the bag-round count."""
    assigned: list[tuple[int, tuple[int, ...]]] = [
        (rec.agent, rec.bundle) for rec in state.log
    ]
    assigned.extend(fills.assignments)

    bundles: dict[int, tuple[int, ...]] = {i: () for i in range(inst.n)}
    for agent, bundle in assigned:
        bundles[agent] = bundle

    leftovers = fills.leftovers
    leftover_agent = None
    if leftovers:
        if assigned:
            leftover_agent = assigned[-1][0]
        elif silent_agents:
            leftover_agent = silent_agents[-1]
        else:
            raise InvariantViolation("leftover items with nobody to take them")
        bundles[leftover_agent] = tuple(
            sorted(bundles[leftover_agent] + leftovers)
        )

    ordered_alloc = Allocation(
        bundles=tuple(tuple(sorted(bundles[i])) for i in range(inst.n)),
        leftovers=leftovers,
        leftover_agent=leftover_agent,
    )
    return lift_allocation(inst, view, ordered_alloc), len(fills.assignments)


def _stats_from_log(state: ReductionState) -> tuple[int, int]:
    fixed = sum(1 for r in state.log if r.kind == "fixed" and r.shape != "zero")
    tentative = sum(
        1 for r in state.log if r.kind == "tentative" and r.shape != "zero"
    )
    return fixed, tentative


def solve_poly34(
    inst: Instance, observer: Callable[[str, dict], None] | None = None
) -> tuple[Allocation, SolveStats]:
    """Allocate every item; every agent gets at least 3/4 of her maximin
    share.  Never consults the exact-share oracle.

    ``observer`` receives audit events: each reduction (with a pre-removal
    snapshot), each completed fixed phase (with a state clone), each rescale,
    each undo.  Returns (allocation, stats); the allocation also carries the
    stats on its ``stats`` field.
    """
    events: list[dict] = []

    def emit(event: str, payload) -> None:
        if observer is not None:
            observer(event, payload)

    def on_state_event(event: str, payload: dict) -> None:
        if event == "reduce":
            events.append(
                {
                    "event": "reduce",
                    "kind": payload["kind"],
                    "shape": payload["shape"],
                    "agent": payload["agent"],
                    "bundle": list(payload["bundle"]),
                }
            )
        elif event == "diagnostic":
            events.append({"event": "diagnostic", **payload})
        emit(event, payload)

    totals = [inst.total(i) for i in range(inst.n)]
    silent = [i for i, t in enumerate(totals) if t == 0]
    active = [i for i, t in enumerate(totals) if t > 0]
    for i in silent:
        events.append(
            {"event": "reduce", "kind": "fixed", "shape": "zero", "agent": i, "bundle": []}
        )

    view = order_instance(inst)

    if not active:
        # Everyone values everything at zero; park the items on the last
        # agent so the result is still a partition.
        bundles = [()] * inst.n
        leftovers = tuple(range(inst.m))
        if leftovers:
            bundles[-1] = leftovers
        stats = SolveStats(0, 0, 0, 0, None, tuple(events))
        alloc = Allocation(
            tuple(bundles),
            leftovers,
            inst.n - 1 if leftovers else None,
            stats,
        )
        return alloc, stats

    norm = normalize_average(view.ordered)
    state = ReductionState.from_instance(norm, agent_ids=active, renormalize=True)
    state.observer = on_state_event

    reduce_fixed(state)
    events.append({"event": "fixed_phase_done"})
    emit("fixed_phase_done", state.clone())
    reduce_tentative(state)

    cap = iteration_cap(len(active))
    iterations = 0
    while True:
        pending = agents_needing_rescale(state)
        if not pending:
            break
        iterations += 1
        if iterations > cap:
            raise IterationCapExceeded(
                f"rescale loop passed {cap} iterations for {len(active)} agents"
            )
        target = pending[0]
        held = set()
        for rec in state.log:
            if rec.kind == "tentative":
                held.update(rec.bundle)
        state = undo_tentative(state)
        events.append({"event": "undo_tentative"})
        emit("undo_tentative", None)
        bound = update_upper_bound(state, target, held, check_membership=False)
        state.scale_row(target, 1 / bound)
        events.append({"event": "rescale", "agent": target, "bound": str(bound)})
        emit("rescale", {"agent": target, "bound": bound})
        reduce_fixed(state)
        events.append({"event": "fixed_phase_done"})
        emit("fixed_phase_done", state.clone())
        reduce_tentative(state)

    events.append({"event": "finalize_tentative"})
    fills = fill_bags(state, ALPHA_BASE)
    for row in fills.trace:
        events.append({"event": "bag_round", **row})

    alloc, bag_rounds = _compose_allocation(inst, view, state, fills, silent)
    fixed_count, tentative_count = _stats_from_log(state)
    stats = SolveStats(
        update_loop_iterations=iterations,
        fixed_assignments=fixed_count,
        tentative_assignments=tentative_count,
        bag_rounds=bag_rounds,
        per_agent_ratio=None,
        events=tuple(events),
    )
    alloc = replace(alloc, stats=stats)
    return alloc, stats


def solve_existence(
    inst: Instance,
    mode: str = MODE_BASE,
    oracle_cap: int = DEFAULT_CAP,
    observer: Callable[[str, dict], None] | None = None,
) -> tuple[Allocation, SolveStats]:
    """Allocate with exact maximin shares in hand.

    mode selects the guarantee: MODE_BASE gives 3/4 of each share, MODE_PLUS
    gives 3/4 + 1/(12 n).  Shares come from the exact oracle (so the item
    count must fit under ``oracle_cap``).  Stats include per-agent ratios
    against the original instance.
    """
    if mode not in (MODE_BASE, MODE_PLUS):
        raise InputError(f"unknown mode {mode!r}")
    margin = gamma_constant(inst.n) if mode == MODE_PLUS else Fraction(0)
    alpha = ALPHA_BASE + margin

    events: list[dict] = []

    def emit(event: str, payload) -> None:
        if observer is not None:
            observer(event, payload)

    def on_state_event(event: str, payload: dict) -> None:
        if event == "reduce":
            events.append(
                {
                    "event": "reduce",
                    "kind": payload["kind"],
                    "shape": payload["shape"],
                    "agent": payload["agent"],
                    "bundle": list(payload["bundle"]),
                }
            )
        emit(event, payload)

    # Exact shares at the current agent count; agents whose share is zero are
    # satisfied by the empty bundle and leave, which can only raise the
    # others' shares, so we recompute until the survivors all have positive
    # shares.  The first pass (at the full count) is kept for honest ratios.
    remaining = list(range(inst.n))
    first_pass: dict[int, Fraction] = {}
    shares: dict[int, Fraction] = {}
    while remaining:
        count = len(remaining)
        current = {
            i: exact_mms(inst.values[i], count, cap=oracle_cap).value
            for i in remaining
        }
        if not first_pass:
            first_pass = dict(current)
        zeroed = [i for i in remaining if current[i] == 0]
        if not zeroed:
            shares = current
            break
        for i in zeroed:
            events.append(
                {"event": "reduce", "kind": "fixed", "shape": "zero", "agent": i, "bundle": []}
            )
        remaining = [i for i in remaining if current[i] > 0]

    view = order_instance(inst)

    if not remaining:
        bundles = [()] * inst.n
        leftovers = tuple(range(inst.m))
        if leftovers:
            bundles[-1] = leftovers
        ratios = tuple(None for _ in range(inst.n))
        stats = SolveStats(0, 0, 0, 0, ratios, tuple(events))
        alloc = Allocation(
            tuple(bundles),
            leftovers,
            inst.n - 1 if leftovers else None,
            stats,
        )
        return alloc, stats

    # Removed agents get a placeholder share of 1; their rows never enter
    # the reduction state anyway.
    normed = normalize_mms(
        view.ordered, [shares.get(i, Fraction(1)) for i in range(inst.n)]
    )
    state = ReductionState.from_instance(
        normed, agent_ids=remaining, renormalize=False
    )
    state.observer = on_state_event

    reduce_all_shapes(state, alpha)
    fills = fill_bags(state, alpha)
    for row in fills.trace:
        events.append({"event": "bag_round", **row})

    silent = [i for i in range(inst.n) if i not in remaining]
    alloc, bag_rounds = _compose_allocation(inst, view, state, fills, silent)
    fixed_count, _ = _stats_from_log(state)

    ratios: list[Fraction | None] = []
    for i in range(inst.n):
        mu = first_pass[i]
        if mu == 0:
            ratios.append(None)
        else:
            ratios.append(inst.bundle_value(i, alloc.bundles[i]) / mu)
    stats = SolveStats(
        update_loop_iterations=0,
        fixed_assignments=fixed_count,
        tentative_assignments=0,
        bag_rounds=bag_rounds,
        per_agent_ratio=tuple(ratios),
        events=tuple(events),
    )
    alloc = replace(alloc, stats=stats)
    return alloc, stats
