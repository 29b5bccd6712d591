"""Three exact engines for the layer-allocation program.

All engines return the same canonical optimum: maximize the objective, treat
objectives within ``TIE_TOL`` as tied, and break ties by minimum total cost,
then by the lexicographically smallest layer vector in device input order.
``solve_bruteforce`` is the reference oracle and implements that definition
directly; the dynamic program and branch-and-bound reproduce it.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

import numpy as np

from .formulation import ChoiceSet, build_profit_matrix
from .model import Allocation, Instance, min_feasible_budget

# Absolute tolerance at which two objective values count as tied.
TIE_TOL = 1e-9

DEFAULT_ENUMERATION_GUARD = 10_000_000

# Smallest power-of-ten multiplier tried by the DP when costs are fractional.
_DP_SCALE_CAP = 1000


class EnumerationTooLarge(RuntimeError):
    """Brute-force search space exceeds the enumeration guard."""


class NonIntegerCosts(ValueError):
    """Layer costs cannot be scaled to integers for the dynamic program."""


class SolveStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"


@dataclass(frozen=True)
class SolveStats:
    """Work counter (combinations, DP states, or tree nodes) and wall time."""

    explored: int
    elapsed: float


@dataclass(frozen=True)
class SolveOutcome:
    status: SolveStatus
    allocation: Allocation | None
    stats: SolveStats

    @property
    def is_optimal(self) -> bool:
        return self.status is SolveStatus.OPTIMAL


def _infeasible(started: float, explored: int = 0) -> SolveOutcome:
    return SolveOutcome(
        status=SolveStatus.INFEASIBLE,
        allocation=None,
        stats=SolveStats(explored=explored, elapsed=time.perf_counter() - started),
    )


def _outcome(instance: Instance, layers, started: float, explored: int) -> SolveOutcome:
    return SolveOutcome(
        status=SolveStatus.OPTIMAL,
        allocation=Allocation.from_layers(instance, layers),
        stats=SolveStats(explored=explored, elapsed=time.perf_counter() - started),
    )


def solve_bruteforce(
    instance: Instance, enumeration_guard: int = DEFAULT_ENUMERATION_GUARD
) -> SolveOutcome:
    """Enumerate every admissible layer vector; the canonical-rule oracle.

    Costs and objectives are accumulated device by device so each combination
    carries exactly the same floating-point sums the other engines produce.
    """
    started = time.perf_counter()
    if min_feasible_budget(instance) > instance.budget:
        return _infeasible(started)

    choice_sets = build_profit_matrix(instance)
    n = len(choice_sets)
    total = math.prod(len(cs.layers) for cs in choice_sets)
    if total > enumeration_guard:
        raise EnumerationTooLarge(
            f"{total} combinations exceed the enumeration guard {enumeration_guard}"
        )

    cost_grid = np.zeros((), dtype=np.float64)
    obj_grid = np.zeros((), dtype=np.float64)
    for i, cs in enumerate(choice_sets):
        shape = [1] * n
        shape[i] = len(cs.layers)
        cost_grid = cost_grid + np.asarray(cs.costs, dtype=np.float64).reshape(shape)
        obj_grid = obj_grid + np.asarray(cs.profits, dtype=np.float64).reshape(shape)

    feasible = cost_grid <= instance.budget
    best_obj = obj_grid[feasible].max()
    band = feasible & (obj_grid >= best_obj - TIE_TOL)
    band_costs = np.where(band, cost_grid, np.inf)
    min_cost = band_costs.min()
    winners = band & (cost_grid == min_cost)
    # C-order index scan = lexicographically smallest layer vector.
    flat = int(np.argmax(winners.reshape(-1)))
    idx = np.unravel_index(flat, winners.shape)
    layers = [cs.layers[int(i)] for cs, i in zip(choice_sets, idx)]
    return _outcome(instance, layers, started, explored=total)


def _dp_scale(choice_sets: list[ChoiceSet]) -> int:
    """Power of ten turning every layer cost into an integer."""
    scale = 1
    while scale <= _DP_SCALE_CAP:
        if all(
            abs(c * scale - round(c * scale)) <= 1e-6 * max(1.0, abs(c * scale))
            for cs in choice_sets
            for c in cs.costs
        ):
            return scale
        scale *= 10
    raise NonIntegerCosts(
        f"layer costs cannot be scaled to integers with a factor <= {_DP_SCALE_CAP}"
    )


def solve_dp(instance: Instance) -> SolveOutcome:
    """Dynamic program over exact spend, with canonical reconstruction.

    State (k, r) holds the best objective over the first k devices spending
    exactly r scaled cost units, together with the lexicographically smallest
    layer prefix achieving it. Objectives are accumulated as exact rationals
    so state values are independent of addition order; without this, two
    identical devices (same weight and attack probability, e.g. from one
    preset) can make the float sums of swapped assignments differ by one ulp
    and the state maximum would pick a tie representative the other engines
    do not. The final answer scans reachable end states for the objective
    maximum, keeps states within ``TIE_TOL`` of it, and picks the cheapest,
    lexicographically smallest one.
    """
    started = time.perf_counter()
    if min_feasible_budget(instance) > instance.budget:
        return _infeasible(started)

    choice_sets = build_profit_matrix(instance)
    scale = _dp_scale(choice_sets)
    int_costs = [
        [int(round(c * scale)) for c in cs.costs] for cs in choice_sets
    ]
    scaled_budget = instance.budget * scale
    # Flooring the scaled budget is exact once costs are integral; absorb the
    # float drift of budget * scale before flooring.
    if abs(scaled_budget - round(scaled_budget)) <= 1e-6 * max(1.0, abs(scaled_budget)):
        budget_units = int(round(scaled_budget))
    else:
        budget_units = math.floor(scaled_budget)

    frac_profits = [[Fraction(p) for p in cs.profits] for cs in choice_sets]

    # spend -> (objective, lex-smallest layer prefix achieving it)
    states: dict[int, tuple[Fraction, tuple[int, ...]]] = {0: (Fraction(0), ())}
    explored = 1
    for cs, costs, profits in zip(choice_sets, int_costs, frac_profits):
        nxt: dict[int, tuple[Fraction, tuple[int, ...]]] = {}
        for spend in sorted(states):
            value, prefix = states[spend]
            for layer, cost, profit in zip(cs.layers, costs, profits):
                new_spend = spend + cost
                if new_spend > budget_units:
                    continue
                new_value = value + profit
                candidate = prefix + (layer,)
                held = nxt.get(new_spend)
                if (
                    held is None
                    or new_value > held[0]
                    or (new_value == held[0] and candidate < held[1])
                ):
                    nxt[new_spend] = (new_value, candidate)
        states = nxt
        explored += len(states)

    # The eager feasibility check guarantees at least one reachable end state.
    best_obj = max(value for value, _ in states.values())
    tie_floor = best_obj - Fraction(TIE_TOL)
    winner: tuple[int, ...] | None = None
    for spend in sorted(states):
        value, prefix = states[spend]
        if value >= tie_floor:
            winner = prefix
            break
    assert winner is not None
    return _outcome(instance, winner, started, explored=explored)


def fractional_upper_bound(
    choice_sets: list[ChoiceSet], start: int, remaining_budget: float
) -> float:
    """Admissible bound on the best completion of devices ``start`` onward.

    Every remaining device starts at its cheapest admissible layer (deepest
    layer on cost ties); the leftover budget is then spent on consecutive
    layer upgrades in decreasing profit-gain per unit cost, the last upgrade
    taken fractionally. Returns ``-inf`` when even the cheapest completion
    overruns the budget.
    """
    base = 0.0
    upgrades: list[tuple[float, float]] = []  # (gain, extra cost)
    budget = remaining_budget
    for cs in choice_sets[start:]:
        cheapest = max(
            range(len(cs.costs)), key=lambda j: (-cs.costs[j], cs.layers[j])
        )
        base += cs.profits[cheapest]
        budget -= cs.costs[cheapest]
        for j in range(cheapest, len(cs.costs) - 1):
            upgrades.append((cs.profits[j + 1] - cs.profits[j], cs.costs[j + 1] - cs.costs[j]))
    if budget < 0.0:
        return -math.inf

    bound = base
    free = [u for u in upgrades if u[1] <= 0.0]
    paid = [u for u in upgrades if u[1] > 0.0]
    for gain, cost in free:
        # Costs need not grow with depth, so an increment can be free or even
        # refund budget; taking it fully keeps the relaxation admissible.
        bound += gain
        budget -= cost
    paid.sort(key=lambda u: u[0] / u[1], reverse=True)
    for gain, cost in paid:
        if cost <= budget:
            bound += gain
            budget -= cost
        else:
            bound += gain * (budget / cost)
            break
    return bound


def solve_bnb(instance: Instance) -> SolveOutcome:
    """Depth-first branch-and-bound over devices in input order.

    Branches deepest layer first so the greedy relaxation's favourite leaf is
    reached early. A node is pruned only when its bound shows the subtree
    cannot even tie the incumbent within ``TIE_TOL``; ties must be explored
    for the cost/lex part of the canonical rule to see them.
    """
    started = time.perf_counter()
    if min_feasible_budget(instance) > instance.budget:
        return _infeasible(started)

    choice_sets = build_profit_matrix(instance)
    n = len(choice_sets)
    min_completion = [0.0] * (n + 1)
    for i in range(n - 1, -1, -1):
        min_completion[i] = min_completion[i + 1] + min(choice_sets[i].costs)

    incumbent: tuple[float, float, tuple[int, ...]] | None = None  # obj, cost, layers
    nodes = 0

    def consider(obj: float, cost: float, layers: tuple[int, ...]) -> None:
        nonlocal incumbent
        if incumbent is None:
            incumbent = (obj, cost, layers)
            return
        inc_obj, inc_cost, inc_layers = incumbent
        if obj > inc_obj + TIE_TOL:
            incumbent = (obj, cost, layers)
        elif obj >= inc_obj - TIE_TOL and (cost, layers) < (inc_cost, inc_layers):
            incumbent = (obj, cost, layers)

    def descend(depth: int, cost: float, obj: float, layers: tuple[int, ...]) -> None:
        nonlocal nodes
        nodes += 1
        if depth == n:
            consider(obj, cost, layers)
            return
        cs = choice_sets[depth]
        order = range(len(cs.layers) - 1, -1, -1)
        for j in order:
            child_cost = cost + cs.costs[j]
            if child_cost + min_completion[depth + 1] > instance.budget:
                continue
            child_obj = obj + cs.profits[j]
            bound = child_obj + fractional_upper_bound(
                choice_sets, depth + 1, instance.budget - child_cost
            )
            if incumbent is not None and bound <= incumbent[0] - TIE_TOL:
                continue
            descend(depth + 1, child_cost, child_obj, layers + (cs.layers[j],))

    descend(0, 0.0, 0.0, ())
    assert incumbent is not None
    return _outcome(instance, incumbent[2], started, explored=nodes)


ENGINES = {
    "brute": solve_bruteforce,
    "dp": solve_dp,
    "bnb": solve_bnb,
}

DEFAULT_ENGINE = "bnb"


def solve(instance: Instance, engine: str = DEFAULT_ENGINE) -> SolveOutcome:
    """Solve with the named engine (one of ``brute``, ``dp``, ``bnb``)."""
    try:
        fn = ENGINES[engine]
    except KeyError:
        raise ValueError(f"unknown engine {engine!r}; expected one of {sorted(ENGINES)}")
    return fn(instance)


def verify_allocation(instance: Instance, allocation: Allocation) -> list[str]:
    """Standalone checker for the four program constraints.

    Recomputes everything from the raw assignment with independent arithmetic
    and returns a list of violation messages (empty means the allocation is
    feasible and internally consistent).
    """
    problems: list[str] = []
    ids = [d.id for d in instance.devices]
    extra = set(allocation.assignment) - set(ids)
    missing = set(ids) - set(allocation.assignment)
    if extra:
        problems.append(f"assignment covers unknown devices: {sorted(extra)}")
    if missing:
        problems.append(f"devices without an assigned layer: {sorted(missing)}")
    if problems:
        return problems

    for device in instance.devices:
        layer = allocation.assignment[device.id]
        if not 1 <= layer <= instance.num_layers:
            problems.append(f"{device.id}: layer {layer} outside the schedule")
            continue
        if device.critical and layer < instance.alpha:
            problems.append(
                f"{device.id}: critical device below alpha ({layer} < {instance.alpha})"
            )
        if layer > instance.device_cap(device):
            problems.append(
                f"{device.id}: layer {layer} above cap {instance.device_cap(device)}"
            )

    total_cost = math.fsum(
        instance.schedule.cost(allocation.assignment[d.id]) for d in instance.devices
    )
    if total_cost > instance.budget + 1e-9:
        problems.append(f"total cost {total_cost} exceeds budget {instance.budget}")
    if not math.isclose(total_cost, allocation.total_cost, rel_tol=0.0, abs_tol=1e-9):
        problems.append(
            f"stored total cost {allocation.total_cost} != recomputed {total_cost}"
        )
    objective = math.fsum(
        (d.weight * d.attack_prob)
        * instance.schedule.detection(allocation.assignment[d.id])
        for d in instance.devices
    )
    if not math.isclose(objective, allocation.objective, rel_tol=0.0, abs_tol=1e-9):
        problems.append(
            f"stored objective {allocation.objective} != recomputed {objective}"
        )
    return problems
