"""Frequency-based n-gram chunking baseline.

A lexicon of symbol n-grams ("units") is shaped by reading the stream a
few units at a time.  Each reading step concatenates 1..``max_percept_len``
consumed units into a percept; the percept's unit gains weight, every
other unit forgets a little, and units sharing symbols with the percept
suffer additional interference.  Units whose weight reaches the shaping
threshold start acting as perceptual wholes: the segmenter consumes them
greedily (longest match first), so established chunks stop exposing
their internals to further composition.

Two bounds keep the lexicon honest under regime changes and noise:

* a new composite unit is created only when the percept was not fully
  parsed into established units (at least one component fell back to a
  bare symbol), so fully-predictable material stops spawning ever longer
  concatenations of itself;
* unit weight saturates at ``weight_cap``, so units abandoned by the
  stream decay back below threshold in bounded time instead of time
  proportional to their training history.

Chunk readout keeps units at or above the shaping threshold (dropping
n-grams longer than ``postprocess_max_n``) and merges units that share a
symbol; symbols covered by no surviving unit become singletons.

The per-step bookkeeping is O(1) amortized: forgetting and interference
are settled lazily from per-symbol exposure counters instead of touching
every unit on every step.  ``tests/test_parser.py`` checks the lazy
arithmetic against an eager reference implementation.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit, types
from numba.typed import Dict as TypedDict

from .clustering import ChunkAssignment
from .errors import ConfigError, InputError

_COMPACT_EVERY = 4096

_VALUE_TYPE = types.UniTuple(types.float64, 3)


@dataclass(frozen=True)
class ParserConfig:
    """Rates and bounds for lexicon shaping.

    ``max_percept_len`` is the number of units consumed per reading step
    (drawn uniformly from 1..max_percept_len).  ``gain`` is the weight
    added to the perceived unit, ``forgetting`` the per-step decay of
    every unit, and ``interference`` the extra decay a unit pays per
    symbol it shares with the current percept.  Units at or above
    ``shaping_threshold`` participate in segmentation and in chunk
    readout; readout also drops units longer than ``postprocess_max_n``.
    ``weight_cap`` saturates unit weight so adaptation after a regime
    switch takes at most ``weight_cap / forgetting`` steps.
    """

    max_percept_len: int = 3
    gain: float = 1.0
    forgetting: float = 0.05
    interference: float = 0.005
    shaping_threshold: float = 1.0
    postprocess_max_n: int = 6
    weight_cap: float = 20.0

    def __post_init__(self) -> None:
        if self.max_percept_len < 1:
            raise ConfigError("max_percept_len must be at least 1")
        if self.postprocess_max_n < 1:
            raise ConfigError("postprocess_max_n must be at least 1")
        for name in ("gain", "forgetting", "interference"):
            if getattr(self, name) < 0:
                raise ConfigError(f"{name} must be nonnegative")
        if self.shaping_threshold <= 0:
            raise ConfigError("shaping_threshold must be positive")
        if self.gain <= 0:
            raise ConfigError("gain must be positive")
        if self.weight_cap < self.gain:
            raise ConfigError("weight_cap must be at least gain")


@njit(cache=True, nogil=True)
def _exposure_sum(exposure, stream, start, length):
    """Sum exposure counters over the distinct symbols of a slice."""
    total = 0.0
    for i in range(length):
        s = stream[start + i]
        seen = False
        for j in range(i):
            if stream[start + j] == s:
                seen = True
                break
        if not seen:
            total += exposure[s]
    return total


@njit(cache=True, nogil=True)
def _key_exposure_sum(exposure, key, base):
    """Same as _exposure_sum but decoding symbols from an encoded key."""
    total = 0.0
    k = key
    while k > 1:
        s = k % base - 1
        k //= base
        rest = k
        seen = False
        while rest > 1:
            if rest % base - 1 == s:
                seen = True
                break
            rest //= base
        if not seen:
            total += exposure[s]
    return total


@njit(cache=True, nogil=True)
def _compact(units, exposure, step, base, forgetting, interference):
    """Drop units whose settled weight has decayed to zero or below."""
    dead = []
    for key in units:
        w, last, snap = units[key]
        now = w - forgetting * (step - last)
        if interference > 0.0:
            now -= interference * (_key_exposure_sum(exposure, key, base) - snap)
        if now <= 0.0:
            dead.append(key)
    for key in dead:
        del units[key]


@njit(cache=True, nogil=True)
def _shape_lexicon(
    stream,
    uniforms,
    units,
    exposure,
    start_step,
    base,
    max_unit_len,
    max_percept_len,
    gain,
    forgetting,
    interference,
    threshold,
    cap,
):
    """Consume one stream, updating the lexicon in place.

    Returns the step counter and the longest unit length seen so far.
    ``units`` maps encoded n-gram -> (weight, settle step, exposure sum
    at settle); a unit's current weight is its stored weight minus
    forgetting per elapsed step minus interference per exposure its
    symbols accumulated since settling.
    """
    n = stream.shape[0]
    step = start_step
    pos = 0
    while pos < n:
        count = 1 + int(uniforms[step - start_step] * max_percept_len)
        if count > max_percept_len:
            count = max_percept_len
        begin = pos
        bare_symbol = False
        for _ in range(count):
            if pos >= n:
                break
            limit = max_unit_len
            if n - pos < limit:
                limit = n - pos
            length = 1
            for cand in range(limit, 1, -1):
                key = np.int64(1)
                for i in range(cand):
                    key = key * base + stream[pos + i] + 1
                if key in units:
                    w, last, snap = units[key]
                    now = w - forgetting * (step - last)
                    if interference > 0.0:
                        now -= interference * (
                            _exposure_sum(exposure, stream, pos, cand) - snap
                        )
                    if now <= 0.0:
                        del units[key]
                    elif now >= threshold:
                        length = cand
                        break
            if length == 1:
                bare_symbol = True
            pos += length
        plen = pos - begin
        if plen <= max_unit_len:
            key = np.int64(1)
            for i in range(plen):
                key = key * base + stream[begin + i] + 1
            settled = -1.0
            if key in units:
                w, last, snap = units[key]
                settled = w - forgetting * (step - last)
                if interference > 0.0:
                    settled -= interference * (
                        _exposure_sum(exposure, stream, begin, plen) - snap
                    )
            if settled > 0.0 or bare_symbol:
                if settled < 0.0:
                    settled = 0.0
                w_new = settled + gain
                if w_new > cap:
                    w_new = cap
                for i in range(plen):
                    s = stream[begin + i]
                    dup = False
                    for j in range(i):
                        if stream[begin + j] == s:
                            dup = True
                            break
                    if not dup:
                        exposure[s] += 1.0
                units[key] = (
                    w_new,
                    float(step),
                    _exposure_sum(exposure, stream, begin, plen),
                )
            else:
                for i in range(plen):
                    s = stream[begin + i]
                    dup = False
                    for j in range(i):
                        if stream[begin + j] == s:
                            dup = True
                            break
                    if not dup:
                        exposure[s] += 1.0
        else:
            seen_end = begin + plen
            for p in range(begin, seen_end):
                s = stream[p]
                dup = False
                for q in range(begin, p):
                    if stream[q] == s:
                        dup = True
                        break
                if not dup:
                    exposure[s] += 1.0
        step += 1
        if step % _COMPACT_EVERY == 0:
            _compact(units, exposure, step, base, forgetting, interference)
    return step


class PerceptLexicon:
    """Weighted n-gram store shaped by reading a symbol stream.

    Feeding is incremental: a lexicon fed two streams back to back ends
    up in the same state as one fed their concatenation would, except
    that percepts never span a feed boundary.
    """

    def __init__(self, n_states: int, config: ParserConfig | None = None):
        if n_states < 1:
            raise InputError("n_states must be at least 1")
        self.config = config if config is not None else ParserConfig()
        self.n_states = int(n_states)
        max_len = self.config.postprocess_max_n
        # exact check in Python ints: encoded keys must stay below 2**63
        if (self.n_states + 1) ** (max_len + 1) > np.iinfo(np.int64).max:
            raise InputError(
                f"{n_states} states with postprocess_max_n={max_len} "
                "overflows the n-gram encoding"
            )
        self._base = np.int64(self.n_states + 1)
        self._units = TypedDict.empty(types.int64, _VALUE_TYPE)
        self._exposure = np.zeros(self.n_states, dtype=np.float64)
        self._step = 0

    @property
    def step_count(self) -> int:
        """Number of reading steps performed so far."""
        return self._step

    def feed(self, states, rng: np.random.Generator) -> "PerceptLexicon":
        """Read a stream of state indices, shaping the lexicon in place."""
        states = np.ascontiguousarray(states, dtype=np.int64)
        if states.ndim != 1:
            raise InputError("states must be a 1-d sequence of state indices")
        if states.size == 0:
            return self
        if states.min() < 0 or states.max() >= self.n_states:
            raise InputError(
                f"state indices must lie in [0, {self.n_states}), "
                f"got range [{states.min()}, {states.max()}]"
            )
        cfg = self.config
        self._step = _shape_lexicon(
            states,
            rng.random(states.size),
            self._units,
            self._exposure,
            self._step,
            self._base,
            cfg.postprocess_max_n,
            cfg.max_percept_len,
            cfg.gain,
            cfg.forgetting,
            cfg.interference,
            cfg.shaping_threshold,
            cfg.weight_cap,
        )
        return self

    def _decode(self, key: int) -> tuple[int, ...]:
        base = int(self._base)
        syms = []
        k = int(key)
        while k > 1:
            syms.append(k % base - 1)
            k //= base
        return tuple(reversed(syms))

    @property
    def units(self) -> dict[tuple[int, ...], float]:
        """Settled positive unit weights, keyed by symbol tuple."""
        cfg = self.config
        out: dict[tuple[int, ...], float] = {}
        for key in self._units:
            w, last, snap = self._units[key]
            now = w - cfg.forgetting * (self._step - last)
            if cfg.interference > 0.0:
                now -= cfg.interference * (
                    _key_exposure_sum(self._exposure, np.int64(key), self._base)
                    - snap
                )
            if now > 0.0:
                out[self._decode(key)] = float(now)
        return out

    def top_units(self, k: int = 10) -> list[tuple[tuple[int, ...], float]]:
        """The k heaviest units, heaviest first (ties broken by gram)."""
        ranked = sorted(self.units.items(), key=lambda kv: (-kv[1], kv[0]))
        return ranked[:k]


def parser_fit(
    sequence,
    config: ParserConfig | None = None,
    rng: np.random.Generator | None = None,
    n_states: int | None = None,
) -> PerceptLexicon:
    """Shape a fresh lexicon on one symbol stream."""
    states = np.ascontiguousarray(sequence, dtype=np.int64)
    if states.size == 0:
        raise InputError("sequence must be nonempty")
    if rng is None:
        rng = np.random.default_rng()
    if n_states is None:
        n_states = int(states.max()) + 1
    lexicon = PerceptLexicon(n_states, config)
    lexicon.feed(states, rng)
    return lexicon


def parser_chunks(
    lexicon: PerceptLexicon, config: ParserConfig | None = None
) -> ChunkAssignment:
    """Read chunk labels out of a shaped lexicon.

    Units at or above the shaping threshold survive (n-grams longer than
    ``postprocess_max_n`` are dropped); surviving units that share a
    symbol merge into one chunk.  Merging runs in descending weight
    order (ties by gram) so group numbering is deterministic, and every
    symbol outside all surviving units becomes its own singleton.
    """
    cfg = config if config is not None else lexicon.config
    survivors = [
        (gram, w)
        for gram, w in lexicon.units.items()
        if len(gram) <= cfg.postprocess_max_n and w >= cfg.shaping_threshold
    ]
    survivors.sort(key=lambda kv: (-kv[1], kv[0]))

    n = lexicon.n_states
    group = np.full(n, -1, dtype=np.int64)
    n_groups = 0
    for gram, _ in survivors:
        syms = set(gram)
        hit = sorted({int(group[s]) for s in syms if group[s] >= 0})
        if not hit:
            target = n_groups
            n_groups += 1
        else:
            target = hit[0]
        for s in syms:
            group[s] = target
        if len(hit) > 1:
            stale = set(hit[1:])
            for s in range(n):
                if group[s] in stale:
                    group[s] = target

    noise = group < 0
    labels = np.full(n, -1, dtype=np.int64)
    next_id = 0
    remap: dict[int, int] = {}
    for s in range(n):
        g = int(group[s])
        if g < 0:
            labels[s] = next_id
            next_id += 1
        else:
            if g not in remap:
                remap[g] = next_id
                next_id += 1
            labels[s] = remap[g]
    return ChunkAssignment(labels=labels, noise=noise)
