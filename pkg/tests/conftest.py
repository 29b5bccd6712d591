"""Shared fixtures: the six-device reference network and random generators."""

from __future__ import annotations

import itertools
import random

import pytest

from layeralloc import Device, Instance, LayerSchedule, validate_instance

# Heterogeneous six-device network used throughout: four monitoring layers
# with detection rates 0.2/0.5/0.8/0.95 and costs 1/2/4/7, three critical
# devices (alpha = 2), and dev_2 capped at layer 3.
SIX_DEVICE_SCHEDULE = LayerSchedule.from_lists([0.2, 0.5, 0.8, 0.95], [1, 2, 4, 7])
SIX_DEVICES = (
    Device(id="dev_1", weight=1.0, attack_prob=0.998),
    Device(id="dev_2", weight=3.0, attack_prob=0.579, critical=True, max_layer=3),
    Device(id="dev_3", weight=5.0, attack_prob=0.045, critical=True),
    Device(id="dev_4", weight=10.0, attack_prob=0.517, critical=True),
    Device(id="dev_5", weight=9.0, attack_prob=0.682),
    Device(id="dev_6", weight=7.0, attack_prob=0.71),
)


def six_device_instance(budget: float = 10.0) -> Instance:
    return validate_instance(
        Instance(schedule=SIX_DEVICE_SCHEDULE, devices=SIX_DEVICES, alpha=2, budget=budget)
    )


@pytest.fixture
def six_device() -> Instance:
    return six_device_instance()


def random_instance(
    rng: random.Random, max_devices: int = 8, max_layers: int = 4
) -> Instance:
    """Random validated instance with integer layer costs 1..9.

    Detection rates and device weights/probabilities are continuous, so
    distinct assignments have distinct objectives almost surely; criticality
    and caps are random with caps >= alpha for critical devices. Costs may
    decrease with depth. Budgets range from hopeless to saturating.
    """
    num_layers = rng.randint(1, max_layers)
    detections = sorted(rng.uniform(0.02, 1.0) for _ in range(num_layers))
    while any(b <= a for a, b in zip(detections, detections[1:])):
        detections = sorted(rng.uniform(0.02, 1.0) for _ in range(num_layers))
    costs = [float(rng.randint(1, 9)) for _ in range(num_layers)]
    alpha = rng.randint(1, num_layers)
    schedule = LayerSchedule.from_lists(detections, costs)

    devices = []
    for i in range(rng.randint(1, max_devices)):
        critical = rng.random() < 0.4
        low = alpha if critical else 1
        cap = rng.randint(low, num_layers) if rng.random() < 0.5 else None
        weight = 0.0 if rng.random() < 0.05 else rng.uniform(0.1, 10.0)
        prob = 0.0 if rng.random() < 0.05 else rng.uniform(0.01, 1.0)
        devices.append(
            Device(
                id=f"dev_{i + 1}",
                weight=weight,
                attack_prob=prob,
                critical=critical,
                max_layer=cap,
            )
        )

    saturating = sum(
        max(schedule.cost(l) for l in range(1, (d.max_layer or num_layers) + 1))
        for d in devices
    )
    budget = rng.uniform(0.0, 1.15 * saturating)
    return validate_instance(
        Instance(schedule=schedule, devices=tuple(devices), alpha=alpha, budget=budget)
    )


def unpruned_optimum(instance: Instance) -> float | None:
    """Best objective over the raw layer grid with all constraints explicit.

    Independent of the pruned formulation: iterates every vector in
    [1..L]^n, filters by the critical-minimum, cap, and budget constraints,
    and accumulates cost/objective the same way the engines do. Returns None
    when nothing is feasible.
    """
    best = None
    full_range = range(1, instance.num_layers + 1)
    for combo in itertools.product(full_range, repeat=len(instance.devices)):
        ok = True
        for device, layer in zip(instance.devices, combo):
            if device.critical and layer < instance.alpha:
                ok = False
                break
            if layer > instance.device_cap(device):
                ok = False
                break
        if not ok:
            continue
        cost = 0.0
        objective = 0.0
        for device, layer in zip(instance.devices, combo):
            cost = cost + instance.schedule.cost(layer)
            objective = objective + (
                device.weight * device.attack_prob
            ) * instance.schedule.detection(layer)
        if cost <= instance.budget and (best is None or objective > best):
            best = objective
    return best


def assert_feasible_costs_at_least(instance: Instance, floor: float) -> None:
    """Check min_feasible_budget lower-bounds every feasible allocation."""
    sets = [
        range(instance.device_floor(d), instance.device_cap(d) + 1)
        for d in instance.devices
    ]
    for combo in itertools.product(*sets):
        cost = sum(instance.schedule.cost(l) for l in combo)
        assert cost >= floor - 1e-9


def outcome_signature(instance, outcome):
    if outcome.allocation is None:
        return (outcome.status,)
    return (
        outcome.status,
        outcome.allocation.layer_vector(instance),
        outcome.allocation.objective,
        outcome.allocation.total_cost,
    )


def parse_lp_text(text: str):
    """Independent reader for the exported LP subset.

    Returns (objective terms, <= rows, = rows, binary names); each row is a
    (name -> coefficient dict, rhs) pair. Deliberately knows nothing about the
    exporter beyond the documented format.
    """
    sections: dict[str, list[str]] = {}
    current = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line in ("Maximize", "Subject To", "Binary", "End"):
            current = line
            sections.setdefault(current, [])
            continue
        sections[current].append(line)

    def parse_terms(expr):
        terms = {}
        for part in expr.split("+"):
            part = part.strip()
            if not part:
                continue
            pieces = part.split()
            if len(pieces) == 1:
                terms[pieces[0]] = 1.0
            else:
                coef, name = pieces
                terms[name] = float(coef)
        return terms

    objective = parse_terms(" ".join(sections["Maximize"]).split(":", 1)[1])
    le_rows = []
    eq_rows = []
    for row in sections["Subject To"]:
        _, body = row.split(":", 1)
        if "<=" in body:
            expr, rhs = body.split("<=")
            le_rows.append((parse_terms(expr), float(rhs)))
        else:
            expr, rhs = body.split("=")
            eq_rows.append((parse_terms(expr), float(rhs)))
    return objective, le_rows, eq_rows, list(sections["Binary"])
