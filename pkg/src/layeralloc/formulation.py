"""Multiple-choice knapsack form of an instance, plus LP-format export.

The minimum-layer and maximum-layer constraints are folded into each device's
admissible layer range, so the solvers only ever see one choice set per device
and a single budget row.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import Device, Instance, device_profit

_LP_NAME_RE = re.compile(r"[A-Za-z0-9_.]+")


@dataclass(frozen=True)
class ChoiceSet:
    """Admissible layers for one device with per-layer profit and cost."""

    device_id: str
    layers: range
    profits: tuple[float, ...]
    costs: tuple[float, ...]


def admissible_layers(device: Device, instance: Instance) -> range:
    """Contiguous layer range the device may be assigned."""
    return range(instance.device_floor(device), instance.device_cap(device) + 1)


def build_profit_matrix(instance: Instance) -> list[ChoiceSet]:
    """One ChoiceSet per device, in input order."""
    sets = []
    for device in instance.devices:
        layers = admissible_layers(device, instance)
        sets.append(
            ChoiceSet(
                device_id=device.id,
                layers=layers,
                profits=tuple(
                    device_profit(device, instance.schedule, l) for l in layers
                ),
                costs=tuple(instance.schedule.cost(l) for l in layers),
            )
        )
    return sets


def _num(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def export_lp(instance: Instance) -> str:
    """Render the integer program in CPLEX LP text format.

    Binary variables are named ``y_<deviceid>_<layer>`` and exist only for
    admissible layers; the program has one budget row and one exactly-one row
    per device. Any LP-reading MIP solver applied to the output must agree
    with the in-repo engines on feasibility and optimal objective.
    """
    for device in instance.devices:
        if not _LP_NAME_RE.fullmatch(device.id):
            raise ValueError(
                f"device id {device.id!r} is not usable in LP variable names "
                f"(allowed characters: letters, digits, '_', '.')"
            )

    choice_sets = build_profit_matrix(instance)

    def var(device_id: str, layer: int) -> str:
        return f"y_{device_id}_{layer}"

    obj_terms = []
    budget_terms = []
    binaries = []
    assign_rows = []
    for cs in choice_sets:
        row_terms = []
        for layer, profit, cost in zip(cs.layers, cs.profits, cs.costs):
            name = var(cs.device_id, layer)
            obj_terms.append(f"{_num(profit)} {name}")
            budget_terms.append(f"{_num(cost)} {name}")
            row_terms.append(name)
            binaries.append(name)
        assign_rows.append(f" assign_{cs.device_id}: {' + '.join(row_terms)} = 1")

    lines = ["Maximize"]
    lines.append(f" obj: {' + '.join(obj_terms)}")
    lines.append("Subject To")
    lines.append(f" budget: {' + '.join(budget_terms)} <= {_num(instance.budget)}")
    lines.extend(assign_rows)
    lines.append("Binary")
    lines.extend(f" {name}" for name in binaries)
    lines.append("End")
    return "\n".join(lines) + "\n"
