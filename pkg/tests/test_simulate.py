import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segprune.errors import CalibrationError, ValidationError
from segprune.formats import volume_to_bytes
from segprune.metrics import dice
from segprune.simulate import (
    DEFAULT_TAU0,
    PRE_ONSET_LEVEL,
    SimSampleSpec,
    converging_ensemble,
    convergence_horizon,
    planted_ensemble,
    random_blob_mask,
    simulate_mask_sequence,
    simulate_trajectories,
    trajectory_values,
)
from segprune.volumes import MaskVolume, binarize


def spec_of(**kw) -> SimSampleSpec:
    base = dict(sample_id="s", plateau=0.9, tau=10.0, onset=5, eta=0.0)
    base.update(kw)
    return SimSampleSpec(**base)


@pytest.mark.parametrize("field,value", [
    ("plateau", 0.0),
    ("plateau", 1.5),
    ("tau", 0.0),
    ("tau", -1.0),
    ("onset", -1),
    ("eta", -0.1),
])
def test_spec_ranges_validated(field, value):
    with pytest.raises(ValidationError):
        spec_of(**{field: value})


def test_difficulty_range_validated():
    with pytest.raises(ValidationError):
        SimSampleSpec.from_difficulty("s", difficulty=1.2)
    with pytest.raises(ValidationError):
        SimSampleSpec.from_difficulty("s", difficulty=-0.1)


def test_from_difficulty_parameter_map():
    easy = SimSampleSpec.from_difficulty("e", difficulty=0.0)
    hard = SimSampleSpec.from_difficulty("h", difficulty=1.0)
    assert easy.plateau == 1.0 and easy.tau == DEFAULT_TAU0
    assert hard.plateau == pytest.approx(0.7)
    assert hard.tau == pytest.approx(5 * DEFAULT_TAU0)


def test_noise_free_curve_reaches_plateau():
    spec = spec_of(plateau=0.85, tau=3.0, onset=2)
    values = trajectory_values(spec, t_max=200, seed=0)
    assert values[-1] == pytest.approx(0.85, abs=1e-9)


def test_pre_onset_holds_at_floor():
    spec = spec_of(onset=10)
    values = trajectory_values(spec, t_max=9, seed=0)
    assert np.all(values == PRE_ONSET_LEVEL)


def test_noise_free_curve_is_monotone_after_onset():
    spec = spec_of(onset=4, tau=7.0)
    values = trajectory_values(spec, t_max=80, seed=0)
    post = values[4:]
    assert np.all(np.diff(post) >= 0)


def test_mean_value_matches_noise_free_trajectory():
    spec = spec_of(plateau=0.6, tau=12.0, onset=8)
    values = trajectory_values(spec, t_max=40, seed=0)
    for epoch in (1, 8, 9, 20, 40):
        assert values[epoch - 1] == pytest.approx(spec.mean_value(epoch))


def test_easy_sample_dominates_hard_sample():
    easy = SimSampleSpec.from_difficulty("e", difficulty=0.0, onset=5)
    hard = SimSampleSpec.from_difficulty("h", difficulty=1.0, onset=5)
    ev = trajectory_values(easy, t_max=120, seed=0)
    hv = trajectory_values(hard, t_max=120, seed=0)
    for t in range(15, 121, 5):
        assert np.mean(ev[t - 10:t]) > np.mean(hv[t - 10:t])


def test_same_seed_reproduces_stream():
    specs = planted_ensemble(8, seed=11)
    a = simulate_trajectories(specs, t_max=30, seed=11)
    b = simulate_trajectories(specs, t_max=30, seed=11)
    assert a == b


def test_different_seed_changes_noise():
    spec = spec_of(eta=0.05)
    a = trajectory_values(spec, t_max=30, seed=1)
    b = trajectory_values(spec, t_max=30, seed=2)
    assert not np.array_equal(a, b)


def test_noise_streams_independent_per_sample():
    # dropping one sample must not shift another sample's noise draw
    sa = spec_of(sample_id="a", eta=0.05)
    sb = spec_of(sample_id="b", eta=0.05)
    paired = simulate_trajectories([sa, sb], t_max=20, seed=7)
    alone = simulate_trajectories([sb], t_max=20, seed=7)
    b_paired = [r.dice for r in paired if r.sample_id == "b"]
    b_alone = [r.dice for r in alone]
    assert b_paired == b_alone


def test_records_are_epoch_major_and_complete():
    specs = planted_ensemble(5, seed=0)
    records = simulate_trajectories(specs, t_max=4, seed=0)
    assert len(records) == 20
    assert [r.epoch for r in records[:5]] == [1] * 5
    assert [r.epoch for r in records[-5:]] == [4] * 5


def test_duplicate_sample_ids_rejected():
    with pytest.raises(ValidationError):
        simulate_trajectories([spec_of(), spec_of()], t_max=3, seed=0)


@settings(max_examples=30, deadline=None)
@given(
    eta=st.floats(min_value=0.0, max_value=0.5),
    plateau=st.floats(min_value=0.01, max_value=1.0),
    seed=st.integers(min_value=0, max_value=2**31),
)
def test_values_stay_clamped(eta, plateau, seed):
    spec = spec_of(plateau=plateau, eta=eta)
    values = trajectory_values(spec, t_max=50, seed=seed)
    assert np.all(values >= 0.0) and np.all(values <= 1.0)


def test_planted_ensemble_spans_difficulty():
    specs = planted_ensemble(10, seed=0)
    assert len(specs) == 10
    assert specs[0].difficulty == 0.0
    assert specs[-1].difficulty == 1.0
    assert len({s.sample_id for s in specs}) == 10
    assert all(0 <= s.onset <= 30 for s in specs)


def test_planted_ensemble_needs_two():
    with pytest.raises(ValidationError):
        planted_ensemble(1, seed=0)


def test_converging_ensemble_pins_plateau():
    specs = converging_ensemble(6, seed=0)
    assert all(s.plateau == 1.0 for s in specs)
    assert len({s.tau for s in specs}) > 1


def test_convergence_horizon_scales():
    specs = [spec_of(onset=10, tau=6.0)]
    assert convergence_horizon(specs) == 10 + 30
    assert convergence_horizon(specs, factor=2.0) == 80
    assert convergence_horizon(specs, factor=1.5) == math.ceil(1.5 * 40)


def test_blob_mask_share_and_reproducibility():
    mask = random_blob_mask((48, 48), seed=4, foreground=0.2)
    share = mask.foreground_count / mask.voxel_count
    assert share == pytest.approx(0.2, abs=0.05)
    again = random_blob_mask((48, 48), seed=4, foreground=0.2)
    assert mask == again
    other = random_blob_mask((48, 48), seed=5, foreground=0.2)
    assert mask != other


def test_blob_mask_3d():
    mask = random_blob_mask((16, 16, 16), seed=0, foreground=0.3)
    assert mask.dims == (16, 16, 16)
    assert 0 < mask.foreground_count < mask.voxel_count


def test_mask_sequence_tracks_targets():
    truth = random_blob_mask((32, 32), seed=9, foreground=0.25)
    spec = spec_of(plateau=0.95, tau=4.0, onset=3, eta=0.0)
    volumes = simulate_mask_sequence(truth, spec, t_max=25, seed=9)
    assert len(volumes) == 25
    for epoch, vol in enumerate(volumes, start=1):
        target = min(max(spec.mean_value(epoch), 0.0), 1.0)
        achieved = dice(binarize(vol), truth)
        assert abs(achieved - target) <= 0.05, (epoch, target, achieved)


def test_mask_sequence_hits_perfect_target():
    truth = random_blob_mask((24, 24), seed=2, foreground=0.3)
    spec = spec_of(plateau=1.0, tau=0.5, onset=0, eta=0.0)
    volumes = simulate_mask_sequence(truth, spec, t_max=8, seed=2)
    final = binarize(volumes[-1])
    assert dice(final, truth) == 1.0
    assert np.array_equal(final.data, truth.data)


def test_mask_sequence_same_seed_same_bytes():
    truth = random_blob_mask((20, 20), seed=3, foreground=0.2)
    spec = spec_of(plateau=0.8, tau=5.0, onset=2, eta=0.01)
    a = simulate_mask_sequence(truth, spec, t_max=6, seed=31)
    b = simulate_mask_sequence(truth, spec, t_max=6, seed=31)
    assert [volume_to_bytes(v) for v in a] == [volume_to_bytes(v) for v in b]


def test_mask_sequence_unreachable_target_raises():
    # all-foreground 2x2 leaves no room to dilate; erosion alone cannot
    # land within 0.05 of dice 0.5 (reachable set: 1, 6/7, 2/3, 2/5, 0)
    truth = MaskVolume((2, 2), np.ones((2, 2), dtype=np.uint8))
    spec = spec_of(plateau=0.5, tau=0.1, onset=0, eta=0.0)
    with pytest.raises(CalibrationError):
        simulate_mask_sequence(truth, spec, t_max=3, seed=0)


def test_mask_sequence_empty_truth_rejected():
    truth = MaskVolume((4, 4), np.zeros((4, 4), dtype=np.uint8))
    with pytest.raises(ValidationError):
        simulate_mask_sequence(truth, spec_of(), t_max=2, seed=0)
