"""Budget sweeps: solve one instance across many budgets.

Produces the data behind per-budget layer-assignment and per-device
objective-contribution tables. Budgets are solved independently with the
selected engine so every entry equals a standalone solve.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Sequence

from .model import Allocation, Instance, device_profit, min_feasible_budget, validate_instance
from .solver import DEFAULT_ENGINE, solve


class UnknownDevice(ValueError):
    """Allocation references a device the instance does not define."""


class EntryStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    ERROR = "error"


@dataclass(frozen=True)
class DeviceContribution:
    device_id: str
    layer: int
    contribution: float


@dataclass(frozen=True)
class SweepEntry:
    """Outcome of one budget: allocation and per-device breakdown, or why not."""

    budget: float
    status: EntryStatus
    allocation: Allocation | None = None
    contributions: tuple[DeviceContribution, ...] = ()
    total_cost: float | None = None
    objective: float | None = None
    min_feasible_budget: float | None = None
    error: str | None = None


@dataclass(frozen=True)
class SweepReport:
    entries: tuple[SweepEntry, ...]


def contribution_breakdown(
    allocation: Allocation, instance: Instance
) -> list[DeviceContribution]:
    """Per-device objective contributions, in device input order.

    Contributions use the same products and accumulation order as the
    allocation objective, so their running sum reproduces it exactly.
    """
    ids = {d.id for d in instance.devices}
    extra = set(allocation.assignment) - ids
    missing = ids - set(allocation.assignment)
    if extra or missing:
        raise UnknownDevice(
            f"allocation does not match instance devices "
            f"(unknown: {sorted(extra)}, missing: {sorted(missing)})"
        )
    return [
        DeviceContribution(
            device_id=device.id,
            layer=allocation.assignment[device.id],
            contribution=device_profit(
                device, instance.schedule, allocation.assignment[device.id]
            ),
        )
        for device in instance.devices
    ]


def run_sweep(
    instance: Instance, budgets: Sequence[float], engine: str = DEFAULT_ENGINE
) -> SweepReport:
    """Solve ``instance`` at each budget; entries come back sorted ascending.

    Per-budget solver errors are captured in their entry instead of aborting
    the remaining budgets.
    """
    if not budgets:
        raise ValueError("budgets must be non-empty")
    entries = []
    for budget in sorted(set(float(b) for b in budgets)):
        try:
            candidate = validate_instance(instance.with_budget(budget))
            outcome = solve(candidate, engine=engine)
        except Exception as exc:  # noqa: BLE001 - per-entry error capture
            entries.append(
                SweepEntry(budget=budget, status=EntryStatus.ERROR, error=str(exc))
            )
            continue
        if not outcome.is_optimal:
            entries.append(
                SweepEntry(
                    budget=budget,
                    status=EntryStatus.INFEASIBLE,
                    min_feasible_budget=min_feasible_budget(instance),
                )
            )
            continue
        allocation = outcome.allocation
        assert allocation is not None
        entries.append(
            SweepEntry(
                budget=budget,
                status=EntryStatus.OPTIMAL,
                allocation=allocation,
                contributions=tuple(contribution_breakdown(allocation, candidate)),
                total_cost=allocation.total_cost,
                objective=allocation.objective,
            )
        )
    return SweepReport(entries=tuple(entries))
