"""Self-organizing map dynamics driven by activation coincidence.

Every state owns one point in a bounded k-dimensional map.  At each
timestep the states are split into a positive set (recently activated)
and a negative set (everything else).  Positive points are attracted to
the positive centroid; what happens to negative points is selectable,
because attraction and repulsion variants lead to different equilibria:

* ``split``    - negative points move away from the positive centroid,
                 with step size scaled by |PS|/|NS| so the negative set's
                 total displacement balances the positive set's (the
                 default: the only variant with a stable multi-cluster
                 equilibrium, see README).
* ``repel``    - negative points move away from the negative centroid.
* ``attract``  - negative points move toward the negative centroid, so
                 separation between groups only emerges through the map
                 normalization.
* ``dipole``   - both sets feel an attraction to their own centroid and
                 a repulsion from the opposite one.

Each applied displacement is a unit vector scaled by the learning rate,
and after every update the whole map is rescaled so the largest point
norm equals ``radius`` (preserving relative geometry, which the density
clustering downstream depends on).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Iterable

import numpy as np

from . import _kernel
from .encoding import EncoderConfig, EncodedVector
from .errors import ConfigError, InputError, NumericFailure

NEGATIVE_RULES = ("split", "repel", "attract", "dipole")

_RULE_ALIASES = {
    "split": "split",
    "repel": "repel",
    "attract": "attract",
    "dipole": "dipole",
    # compatibility spellings for the two negative-centroid readings
    "eq8": "repel",
    "eq8_literal": "repel",
    "attract_cn": "attract",
}
_RULE_CODES = {
    "split": _kernel.RULE_SPLIT,
    "repel": _kernel.RULE_REPEL,
    "attract": _kernel.RULE_ATTRACT,
    "dipole": _kernel.RULE_DIPOLE,
}
_MODE_ALIASES = {"fixed": "fixed", "scaled_by_n": "scaled_by_n", "out": "scaled_by_n"}
_NORM_CODES = {"rescale": _kernel.NORM_RESCALE, "clip": _kernel.NORM_CLIP}


@dataclass(frozen=True)
class DynamicsConfig:
    alpha: float = 0.1
    alpha_mode: str = "fixed"  # or "scaled_by_n": learning rate times n_states
    dims: int = 3
    radius: float = 10.0
    activation_threshold: float = 0.1
    epsilon: float = 1e-8  # guard added to distance denominators
    negative_rule: str = "split"
    norm_mode: str = "rescale"  # or "clip": only shrink rows that exceed radius

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigError(f"alpha must be > 0, got {self.alpha}")
        if self.dims < 2:
            raise ConfigError(f"dims must be >= 2, got {self.dims}")
        if not self.radius > 0:
            raise ConfigError(f"radius must be > 0, got {self.radius}")
        if not 0 < self.activation_threshold < 1:
            raise ConfigError(
                f"activation_threshold must be in (0, 1), got {self.activation_threshold}"
            )
        if self.alpha_mode not in _MODE_ALIASES:
            raise ConfigError(f"unknown alpha_mode {self.alpha_mode!r}")
        if self.negative_rule not in _RULE_ALIASES:
            raise ConfigError(f"unknown negative_rule {self.negative_rule!r}")
        if self.norm_mode not in _NORM_CODES:
            raise ConfigError(f"unknown norm_mode {self.norm_mode!r}")
        # canonicalize aliases so equality and reports are stable
        object.__setattr__(self, "alpha_mode", _MODE_ALIASES[self.alpha_mode])
        object.__setattr__(self, "negative_rule", _RULE_ALIASES[self.negative_rule])

    def alpha_eff(self, n_states: int) -> float:
        if self.alpha_mode == "scaled_by_n":
            return self.alpha * n_states
        return self.alpha


@dataclass
class SyncMapState:
    weights: np.ndarray  # (n_states, dims)
    step_count: int = 0

    @property
    def n_states(self) -> int:
        return self.weights.shape[0]


@dataclass
class ActivationPartition:
    positive: np.ndarray  # index sets; together they cover all states
    negative: np.ndarray


def init_map(n_states: int, config: DynamicsConfig, rng: np.random.Generator) -> SyncMapState:
    """Random initial positions, rescaled to lie within the radius ball."""
    if n_states < 2:
        raise ConfigError(f"need at least 2 states, got {n_states}")
    w = rng.uniform(-config.radius, config.radius, size=(n_states, config.dims))
    w = _rescale(w, config.radius)
    return SyncMapState(weights=w)


def partition(x: EncodedVector | np.ndarray, threshold: float = 0.1) -> ActivationPartition:
    values = x.values if isinstance(x, EncodedVector) else np.asarray(x)
    mask = values > threshold
    idx = np.arange(values.shape[0])
    return ActivationPartition(positive=idx[mask], negative=idx[~mask])


def centroids(part: ActivationPartition, state: SyncMapState):
    """Mean positions of both sets, or None when either set has <= 1 member.

    A degenerate set means there is nothing to synchronize against, so the
    step is skipped entirely.
    """
    if len(part.positive) <= 1 or len(part.negative) <= 1:
        return None
    cp = state.weights[part.positive].mean(axis=0)
    cn = state.weights[part.negative].mean(axis=0)
    return cp, cn


def displacements(
    weights: np.ndarray,
    part: ActivationPartition,
    cp: np.ndarray,
    cn: np.ndarray,
    config: DynamicsConfig,
) -> np.ndarray:
    """Pre-normalization update for every point, from pre-update weights."""
    alpha = config.alpha_eff(weights.shape[0])
    to_cp = cp[None, :] - weights
    to_cn = cn[None, :] - weights
    unit_cp = to_cp / (np.linalg.norm(to_cp, axis=1, keepdims=True) + config.epsilon)
    unit_cn = to_cn / (np.linalg.norm(to_cn, axis=1, keepdims=True) + config.epsilon)

    pos = np.zeros(weights.shape[0], dtype=bool)
    pos[part.positive] = True
    delta = np.empty_like(weights)
    rule = config.negative_rule
    if rule == "dipole":
        delta[pos] = alpha * (unit_cp[pos] - unit_cn[pos])
        delta[~pos] = alpha * (unit_cn[~pos] - unit_cp[~pos])
    elif rule == "split":
        n_pos = len(part.positive)
        delta[pos] = alpha * unit_cp[pos]
        delta[~pos] = -alpha * (n_pos / (weights.shape[0] - n_pos)) * unit_cp[~pos]
    else:
        delta[pos] = alpha * unit_cp[pos]
        sign = -1.0 if rule == "repel" else 1.0
        delta[~pos] = sign * alpha * unit_cn[~pos]
    return delta


def _rescale(w: np.ndarray, radius: float) -> np.ndarray:
    mx = np.linalg.norm(w, axis=1).max()
    if mx > 0.0:
        w = w * (radius / mx)
    return w


def _clip(w: np.ndarray, radius: float) -> np.ndarray:
    norms = np.linalg.norm(w, axis=1)
    over = norms > radius
    if over.any():
        w = w.copy()
        w[over] *= (radius / norms[over])[:, None]
    return w


def update_step(state: SyncMapState, x: EncodedVector | np.ndarray, config: DynamicsConfig) -> SyncMapState:
    """Apply one synchronous update in place; skip steps leave state untouched."""
    values = x.values if isinstance(x, EncodedVector) else np.asarray(x)
    if values.shape[0] != state.n_states:
        raise InputError(
            f"input length {values.shape[0]} != map size {state.n_states}"
        )
    part = partition(values, config.activation_threshold)
    cc = centroids(part, state)
    if cc is None:
        return state
    cp, cn = cc
    w = state.weights + displacements(state.weights, part, cp, cn, config)
    if config.norm_mode == "rescale":
        w = _rescale(w, config.radius)
    else:
        w = _clip(w, config.radius)
    if not np.isfinite(w).all():
        raise NumericFailure("map weights became non-finite")
    state.weights = w
    state.step_count += 1
    return state


def fit(
    encoded: Iterable[EncodedVector],
    config: DynamicsConfig,
    rng: np.random.Generator | None = None,
    state: SyncMapState | None = None,
    n_states: int | None = None,
) -> SyncMapState:
    """Run update_step over an encoded stream (reference implementation).

    Pass an existing ``state`` to continue fitting without
    re-initialization, as the continual protocol requires.  This path is
    exact but slow; ``SyncMap`` drives the compiled kernel instead.
    """
    iterator = iter(encoded)
    if state is None:
        first = next(iterator, None)
        if first is None:
            raise InputError("encoded stream must be nonempty")
        if rng is None:
            raise ConfigError("fit needs an rng when no state is given")
        state = init_map(len(first.values), config, rng)
        state = update_step(state, first, config)
    for x in iterator:
        state = update_step(state, x, config)
    return state


class SyncMap:
    """Streaming learner: encoder state plus map state, fed state indices.

    Feeding is incremental so a continual schedule can interleave feeding
    and snapshotting without ever re-initializing the map.
    """

    def __init__(
        self,
        n_states: int,
        config: DynamicsConfig | None = None,
        encoder: EncoderConfig | None = None,
        rng: np.random.Generator | int | None = None,
    ):
        self.config = config if config is not None else DynamicsConfig()
        self.encoder = (
            encoder if encoder is not None else EncoderConfig(n_states=n_states)
        )
        if self.encoder.n_states != n_states:
            raise ConfigError(
                f"encoder is for {self.encoder.n_states} states, learner for {n_states}"
            )
        if not isinstance(rng, np.random.Generator):
            rng = np.random.default_rng(rng)
        self.state = init_map(n_states, self.config, rng)
        self._ta = np.full(n_states, np.nan)
        self._t = 0

    @property
    def weights(self) -> np.ndarray:
        return self.state.weights

    @property
    def step_count(self) -> int:
        return self.state.step_count

    @property
    def timesteps(self) -> int:
        return self._t

    def feed(self, states) -> "SyncMap":
        """Advance the learner over a block of state indices."""
        arr = np.ascontiguousarray(states, dtype=np.int64)
        if arr.size == 0:
            return self
        if arr.min() < 0 or arr.max() >= self.state.n_states:
            raise InputError("state index out of range")
        c = self.config
        t, updates = _kernel.fit_kernel(
            self.state.weights,
            arr,
            self._ta,
            self._t,
            self.encoder.tstep,
            self.encoder.memory,
            self.encoder.decay_rate,
            c.activation_threshold,
            c.alpha_eff(self.state.n_states),
            c.radius,
            c.epsilon,
            _RULE_CODES[c.negative_rule],
            _NORM_CODES[c.norm_mode],
        )
        if not np.isfinite(self.state.weights).all():
            raise NumericFailure("map weights became non-finite")
        self._t = int(t)
        self.state.step_count += int(updates)
        return self
