"""Activation encoder: decay arithmetic, cutoff exactness, memory bound."""

import math

import numpy as np
import pytest

from chunklab.encoding import EncodedVector, EncoderConfig, encode_sequence, encode_step
from chunklab.errors import ConfigError, InputError


def roll(config, states):
    """Encode a state list and return the full snapshot history."""
    return list(encode_sequence(config, states))


def test_fresh_activation_reads_one():
    cfg = EncoderConfig(n_states=4)
    vec = encode_step(cfg, 2, 0)
    assert vec.values[2] == 1.0
    assert np.all(vec.values[[0, 1, 3]] == 0.0)


def test_decay_value_after_one_presentation():
    cfg = EncoderConfig(n_states=2)
    history = roll(cfg, [0, 1])
    at_t10 = history[10]
    assert at_t10.values[1] == 1.0
    assert at_t10.values[0] == pytest.approx(math.exp(-1.0), abs=1e-12)


def test_snapshot_with_expiry_after_two_transitions():
    cfg = EncoderConfig(n_states=3)
    history = roll(cfg, [0, 1, 2])
    at_t20 = history[20]
    assert at_t20.values[0] == 0.0  # exactly expired, not merely small
    assert at_t20.values[1] == pytest.approx(math.exp(-1.0), abs=1e-12)
    assert at_t20.values[2] == 1.0


def test_cutoff_is_exact_zero():
    cfg = EncoderConfig(n_states=5)
    vec = encode_step(cfg, 0, 0)
    for t in range(1, cfg.cutoff):
        vec = encode_step(cfg, 4, t, vec)
        assert vec.values[0] > 0.0
    vec = encode_step(cfg, 4, cfg.cutoff, vec)
    assert vec.values[0] == 0.0
    assert np.isnan(vec.last_activation[0])


def test_monotone_decay_until_cutoff():
    cfg = EncoderConfig(n_states=3)
    vec = encode_step(cfg, 0, 0)
    prev = vec.values[0]
    for t in range(1, cfg.cutoff + 5):
        vec = encode_step(cfg, 1 + t % 2, t, vec)
        cur = vec.values[0]
        if prev > 0.0:
            assert cur < prev
        else:
            assert cur == 0.0
        prev = cur


def test_memory_bound_on_nonzero_count():
    cfg = EncoderConfig(n_states=8)
    rng = np.random.default_rng(11)
    states = rng.integers(0, 8, size=60)
    for vec in encode_sequence(cfg, states):
        assert np.count_nonzero(vec.values) <= cfg.memory


def test_reactivation_resets_to_one():
    cfg = EncoderConfig(n_states=2)
    history = roll(cfg, [0, 1, 0])
    assert history[20].values[0] == 1.0


def test_single_state_sequence_shape():
    cfg = EncoderConfig(n_states=2)
    history = roll(cfg, [0])
    assert len(history) == cfg.tstep
    assert history[0].values[0] == 1.0


def test_value_refreshes_only_on_transition_steps():
    cfg = EncoderConfig(n_states=2)
    history = roll(cfg, [0, 0])
    # re-presented at t=10, so the decay restarts there and nowhere else
    assert history[10].values[0] == 1.0
    assert history[9].values[0] == pytest.approx(math.exp(-0.9), abs=1e-12)
    assert history[11].values[0] == pytest.approx(math.exp(-0.1), abs=1e-12)


def test_stream_continuation_matches_one_shot():
    cfg = EncoderConfig(n_states=4)
    states = [0, 1, 2, 3, 1, 0]
    whole = [v.values for v in roll(cfg, states)]
    first = list(encode_sequence(cfg, states[:3]))
    rest = list(
        encode_sequence(cfg, states[3:], start_t=3 * cfg.tstep, previous=first[-1])
    )
    joined = [v.values for v in first + rest]
    assert np.allclose(whole, joined)


def test_out_of_range_state_rejected():
    cfg = EncoderConfig(n_states=3)
    with pytest.raises(InputError):
        encode_step(cfg, 3, 0)
    with pytest.raises(InputError):
        encode_step(cfg, -1, 0)


def test_empty_sequence_rejected():
    cfg = EncoderConfig(n_states=3)
    with pytest.raises(InputError):
        list(encode_sequence(cfg, []))


def test_config_validation():
    with pytest.raises(ConfigError):
        EncoderConfig(n_states=1)
    with pytest.raises(ConfigError):
        EncoderConfig(n_states=4, tstep=0)
    with pytest.raises(ConfigError):
        EncoderConfig(n_states=4, memory=0)
    with pytest.raises(ConfigError):
        EncoderConfig(n_states=4, decay_rate=0.0)


def test_initial_vector_is_all_dead():
    vec = EncodedVector.initial(3)
    assert np.all(vec.values == 0.0)
    assert np.all(np.isnan(vec.last_activation))
