"""Core data model: instances, item ordering, normalization, allocations.

Everything here works on exact rationals (`fractions.Fraction`).  Floats are
rejected at the door so that no rounding can creep into the solver path.
All operations are pure: the same inputs give bit-identical outputs.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import (
    EmptyAgents,
    IncompleteAllocation,
    InputError,
    NegativeValue,
    NonPositiveScale,
    RaggedMatrix,
    ZeroMMS,
)


def as_rational(x) -> Fraction:
    """Coerce an int, Fraction, or exact decimal/fraction string to Fraction.

    Floats and bools are rejected: exact arithmetic only.

    >>> as_rational("3/7")
    Fraction(3, 7)
    >>> as_rational("0.25")
    Fraction(1, 4)
    """
    if isinstance(x, bool):
        raise InputError(f"boolean is not a valuation: {x!r}")
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        raise InputError(
            f"float {x!r} rejected: pass an int or an exact string like '1/3' or '0.25'"
        )
    if isinstance(x, str):
        try:
            return Fraction(x)
        except (ValueError, ZeroDivisionError) as exc:
            raise InputError(f"cannot parse rational from {x!r}") from exc
    raise InputError(f"cannot interpret {type(x).__name__} as a rational")


@dataclass(frozen=True)
class Instance:
    """An additive fair-division instance: one valuation row per agent.

    values[i][j] is agent i's value for item j, always a nonnegative Fraction.
    """

    values: tuple[tuple[Fraction, ...], ...]

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def m(self) -> int:
        return len(self.values[0]) if self.values else 0

    def value(self, agent: int, item: int) -> Fraction:
        return self.values[agent][item]

    def bundle_value(self, agent: int, items: Iterable[int]) -> Fraction:
        row = self.values[agent]
        return sum((row[j] for j in items), Fraction(0))

    def total(self, agent: int) -> Fraction:
        return sum(self.values[agent], Fraction(0))


def make_instance(values: Sequence[Sequence]) -> Instance:
    """Validate and freeze a valuation matrix.

    Entries may be ints, Fractions, or exact strings.  Raises EmptyAgents,
    RaggedMatrix, or NegativeValue when the matrix is unusable.
    """
    rows = [list(row) for row in values]
    if not rows:
        raise EmptyAgents("an instance needs at least one agent")
    width = len(rows[0])
    out = []
    for i, row in enumerate(rows):
        if len(row) != width:
            raise RaggedMatrix(
                f"row {i} has {len(row)} entries, expected {width}"
            )
        conv = []
        for j, entry in enumerate(row):
            v = as_rational(entry)
            if v < 0:
                raise NegativeValue(f"values[{i}][{j}] = {v} is negative")
            conv.append(v)
        out.append(tuple(conv))
    return Instance(tuple(out))


@dataclass(frozen=True)
class OrderedView:
    """An instance whose rows are sorted descending, plus the way back.

    ranking[i][p] is the original item id sitting at sorted position p for
    agent i.  Ties sort by ascending original item id, so the view is
    deterministic.
    """

    ordered: Instance
    ranking: tuple[tuple[int, ...], ...]


def order_instance(inst: Instance) -> OrderedView:
    """Sort every agent's row into descending order of value.

    >>> view = order_instance(make_instance([[1, 3, 2]]))
    >>> view.ordered.values[0]
    (Fraction(3, 1), Fraction(2, 1), Fraction(1, 1))
    >>> view.ranking[0]
    (1, 2, 0)
    """
    ordered_rows = []
    rankings = []
    for row in inst.values:
        order = sorted(range(len(row)), key=lambda j: (-row[j], j))
        rankings.append(tuple(order))
        ordered_rows.append(tuple(row[j] for j in order))
    return OrderedView(Instance(tuple(ordered_rows)), tuple(rankings))


@dataclass(frozen=True)
class Allocation:
    """A complete assignment of items to agents.

    bundles[i] holds agent i's item ids, sorted ascending.  When filler items
    were left over after the last agent was satisfied, they are folded into
    the last assigned bundle; `leftovers` records which items those were and
    `leftover_agent` records who absorbed them, purely for audit.
    """

    bundles: tuple[tuple[int, ...], ...]
    leftovers: tuple[int, ...] = ()
    leftover_agent: int | None = None
    stats: object | None = None


def lift_allocation(inst: Instance, view: OrderedView, alloc: Allocation) -> Allocation:
    """Translate an allocation of the sorted view back to original items.

    Walks sorted positions from most valuable down; the agent who owns each
    position picks her favorite original item still on the table.  Every
    agent ends up with a bundle she values at least as much as her bundle in
    the sorted view.  Runs in O(n*m).

    Raises IncompleteAllocation unless the input bundles partition all items.
    """
    n, m = inst.n, inst.m
    owner = [-1] * m
    for agent, bundle in enumerate(alloc.bundles):
        for pos in bundle:
            if not 0 <= pos < m or owner[pos] != -1:
                raise IncompleteAllocation(
                    f"position {pos} is missing or assigned twice"
                )
            owner[pos] = agent
    if any(o == -1 for o in owner):
        raise IncompleteAllocation("some positions were never assigned")

    taken = [False] * m
    cursor = [0] * n
    lifted: list[list[int]] = [[] for _ in range(n)]
    picked = [0] * m  # sorted position -> original item handed out at that step
    for pos in range(m):
        agent = owner[pos]
        rank = view.ranking[agent]
        p = cursor[agent]
        while taken[rank[p]]:
            p += 1
        item = rank[p]
        cursor[agent] = p + 1
        taken[item] = True
        picked[pos] = item
        lifted[agent].append(item)

    leftovers = tuple(sorted(picked[pos] for pos in alloc.leftovers))
    return Allocation(
        bundles=tuple(tuple(sorted(b)) for b in lifted),
        leftovers=leftovers,
        leftover_agent=alloc.leftover_agent,
        stats=alloc.stats,
    )


def scale_agent(inst: Instance, agent: int, factor) -> Instance:
    """Multiply one agent's whole row by a positive rational."""
    c = as_rational(factor)
    if c <= 0:
        raise NonPositiveScale(f"scale factor must be positive, got {c}")
    if not 0 <= agent < inst.n:
        raise InputError(f"no agent {agent} in an instance with n={inst.n}")
    rows = list(inst.values)
    rows[agent] = tuple(v * c for v in rows[agent])
    return Instance(tuple(rows))


def zero_value_agents(inst: Instance) -> tuple[int, ...]:
    """Agents whose entire row sums to zero; any bundle satisfies them."""
    return tuple(i for i in range(inst.n) if inst.total(i) == 0)


def normalize_average(inst: Instance) -> Instance:
    """Rescale every row so it sums to the number of agents.

    After this, each agent's maximin share is at most 1 (she cannot make
    every one of n bundles worth more than the average).  Rows that sum to
    zero cannot be rescaled and are left untouched; use zero_value_agents
    to find them.
    """
    n = inst.n
    rows = []
    for i in range(n):
        tot = inst.total(i)
        if tot == 0:
            rows.append(inst.values[i])
        else:
            c = Fraction(n) / tot
            rows.append(tuple(v * c for v in inst.values[i]))
    return Instance(tuple(rows))


def normalize_mms(inst: Instance, shares: Sequence) -> Instance:
    """Divide each row by that agent's maximin share, making every share 1.

    Raises ZeroMMS when any supplied share is not strictly positive.
    """
    if len(shares) != inst.n:
        raise InputError(
            f"expected {inst.n} share values, got {len(shares)}"
        )
    rows = []
    for i in range(inst.n):
        mu = as_rational(shares[i])
        if mu <= 0:
            raise ZeroMMS(f"agent {i} share {mu} is not positive")
        rows.append(tuple(v / mu for v in inst.values[i]))
    return Instance(tuple(rows))
