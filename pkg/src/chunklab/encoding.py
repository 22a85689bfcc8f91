"""Exponentially decaying activation encoding of a discrete state stream.

Each state of the stream is presented for ``tstep`` timesteps.  A state's
activation starts at 1.0 when it is (re)activated and decays as
``exp(-decay_rate * elapsed)`` until it has been inactive for
``memory * tstep`` steps, after which it is exactly 0.  At most ``memory``
states are therefore nonzero at any timestep.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import ConfigError, InputError


@dataclass(frozen=True)
class EncoderConfig:
    n_states: int
    tstep: int = 10
    memory: int = 2
    decay_rate: float = 0.1

    def __post_init__(self):
        if self.n_states < 2:
            raise ConfigError(f"n_states must be >= 2, got {self.n_states}")
        if self.tstep < 1:
            raise ConfigError(f"tstep must be >= 1, got {self.tstep}")
        if self.memory < 1:
            raise ConfigError(f"memory must be >= 1, got {self.memory}")
        if not self.decay_rate > 0:
            raise ConfigError(f"decay_rate must be > 0, got {self.decay_rate}")

    @property
    def cutoff(self) -> int:
        """Elapsed time at or beyond which an activation reads exactly 0."""
        return self.memory * self.tstep


@dataclass
class EncodedVector:
    """Activation snapshot at one timestep.

    ``last_activation[i]`` is the timestep state ``i`` was last activated,
    NaN if it was never activated or its activation has expired.
    """

    values: np.ndarray
    last_activation: np.ndarray

    @classmethod
    def initial(cls, n_states: int) -> "EncodedVector":
        return cls(np.zeros(n_states), np.full(n_states, np.nan))


def encode_step(
    config: EncoderConfig,
    active_state: int,
    t: int,
    previous: EncodedVector | None = None,
) -> EncodedVector:
    """Advance the encoder one timestep with ``active_state`` presented.

    The caller presents each state for ``tstep`` consecutive timesteps;
    activation timestamps refresh only on transition steps (multiples of
    ``tstep``), so calls must advance ``t`` monotonically.
    """
    if not 0 <= active_state < config.n_states:
        raise InputError(
            f"state index {active_state} out of range [0, {config.n_states})"
        )
    if previous is None:
        previous = EncodedVector.initial(config.n_states)
    ta = previous.last_activation.copy()
    if t % config.tstep == 0 or np.isnan(ta[active_state]):
        ta[active_state] = t

    elapsed = t - ta
    live = elapsed < config.cutoff  # NaN compares False: never-activated stays dead
    values = np.zeros(config.n_states)
    values[live] = np.exp(-config.decay_rate * elapsed[live])
    ta[~live] = np.nan
    return EncodedVector(values, ta)


def encode_sequence(
    config: EncoderConfig,
    states: Sequence[int] | Iterable[int],
    start_t: int = 0,
    previous: EncodedVector | None = None,
) -> Iterator[EncodedVector]:
    """Encode a state sequence, yielding ``tstep`` vectors per state.

    ``start_t`` and ``previous`` allow a stream to be continued across
    calls (the continual setting), keeping decay seamless at the joint.
    """
    states = list(states)
    if not states:
        raise InputError("state sequence must be nonempty")
    if start_t % config.tstep != 0:
        raise InputError(f"start_t must be a multiple of tstep, got {start_t}")
    t = start_t
    current = previous
    for s in states:
        for _ in range(config.tstep):
            current = encode_step(config, s, t, current)
            t += 1
            yield current
