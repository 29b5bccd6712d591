import random

import pytest

from conftest import random_instance
from layeralloc import (
    Allocation,
    Device,
    Instance,
    LayerSchedule,
    UnknownDevice,
    estimate_detection,
    solve,
    solve_bruteforce,
    validate_instance,
)


def test_mean_tracks_objective(six_device):
    inst = six_device.with_budget(40.0)
    alloc = solve_bruteforce(inst).allocation
    result = estimate_detection(alloc, inst, trials=200_000, seed=11)
    assert result.sample_std_error > 0.0
    z = abs(result.mean_detected_weight - alloc.objective) / result.sample_std_error
    assert z <= 5.0


def test_million_trials_close_to_objective(six_device):
    inst = six_device.with_budget(40.0)
    alloc = solve_bruteforce(inst).allocation
    result = estimate_detection(alloc, inst, trials=1_000_000, seed=0)
    z = abs(result.mean_detected_weight - 18.01555) / result.sample_std_error
    assert z <= 3.0


def test_deterministic_for_fixed_seed(six_device):
    alloc = solve_bruteforce(six_device).allocation
    a = estimate_detection(alloc, six_device, trials=10_000, seed=123)
    b = estimate_detection(alloc, six_device, trials=10_000, seed=123)
    assert a == b
    c = estimate_detection(alloc, six_device, trials=10_000, seed=124)
    assert c.mean_detected_weight != a.mean_detected_weight


def test_no_attacks_means_exact_zero():
    inst = validate_instance(
        Instance(
            schedule=LayerSchedule.from_lists([0.2, 0.5], [1, 2]),
            devices=(
                Device(id="a", weight=3.0, attack_prob=0.0),
                Device(id="b", weight=1.0, attack_prob=0.0),
            ),
            alpha=1,
            budget=4.0,
        )
    )
    alloc = Allocation.from_layers(inst, (2, 1))
    result = estimate_detection(alloc, inst, trials=5_000, seed=0)
    assert result.mean_detected_weight == 0.0
    assert result.sample_std_error == 0.0


def test_certain_attack_certain_detection_means_exact_one():
    inst = validate_instance(
        Instance(
            schedule=LayerSchedule.from_lists([1.0], [1]),
            devices=(Device(id="a", weight=1.0, attack_prob=1.0),),
            alpha=1,
            budget=1.0,
        )
    )
    alloc = Allocation.from_layers(inst, (1,))
    result = estimate_detection(alloc, inst, trials=1_000, seed=5)
    assert result.mean_detected_weight == 1.0
    assert result.sample_std_error == 0.0


def test_single_trial_has_zero_std_error(six_device):
    alloc = solve_bruteforce(six_device).allocation
    result = estimate_detection(alloc, six_device, trials=1, seed=9)
    assert result.trials == 1
    assert result.sample_std_error == 0.0
    # one Bernoulli draw per device: the score is a subset sum of weights
    weights = [d.weight for d in six_device.devices]
    subset_sums = {0.0}
    for w in weights:
        subset_sums |= {s + w for s in subset_sums}
    assert any(
        abs(result.mean_detected_weight - s) < 1e-12 for s in subset_sums
    )


def test_common_random_numbers_monotone_coupling():
    # same seed = same uniforms, so raising any device's layer can only grow
    # the detected set
    rng = random.Random(808)
    checked = 0
    while checked < 15:
        inst = random_instance(rng, max_devices=5)
        out = solve(inst)
        if not out.is_optimal:
            continue
        base_layers = list(out.allocation.layer_vector(inst))
        raised_layers = [
            min(l + 1, inst.device_cap(d)) for l, d in zip(base_layers, inst.devices)
        ]
        if raised_layers == base_layers:
            continue
        checked += 1
        base = Allocation.from_layers(inst, base_layers)
        raised = Allocation.from_layers(inst, raised_layers)
        for seed in (1, 2, 3):
            lo = estimate_detection(base, inst, trials=4_000, seed=seed)
            hi = estimate_detection(raised, inst, trials=4_000, seed=seed)
            assert hi.mean_detected_weight >= lo.mean_detected_weight


def test_chunking_is_invisible(six_device):
    # trials that straddle the internal chunk size still give one stream
    alloc = solve_bruteforce(six_device).allocation
    r1 = estimate_detection(alloc, six_device, trials=65_537, seed=77)
    assert r1.trials == 65_537


def test_unknown_device_rejected(six_device):
    alloc = Allocation(assignment={"ghost": 1}, total_cost=0.0, objective=0.0)
    with pytest.raises(UnknownDevice):
        estimate_detection(alloc, six_device, trials=10, seed=0)


def test_bad_trials_rejected(six_device):
    alloc = solve_bruteforce(six_device).allocation
    with pytest.raises(ValueError):
        estimate_detection(alloc, six_device, trials=0, seed=0)
