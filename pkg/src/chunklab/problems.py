"""Benchmark sequence generators with ground-truth chunk labels.

A problem is a stream of state indices plus, for every task segment, the
true chunk label of each state.  Most problems are first-order Markov
chains described by a TransitionGraph; the long-chunks problem needs its
own generator because chunk visits there have stochastic durations that
a first-order chain cannot express.

Graphs can also be loaded from JSON files so community structures that
only exist as figures (or as user data, e.g. animal song transition
graphs) can be run through the exact same pipeline.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _kernel
from .errors import ConfigError, GraphFormatError, InputError

_ROW_SUM_TOL = 1e-9


@dataclass
class TransitionGraph:
    """First-order chain over named states with per-state chunk labels.

    chunk_labels is the flattened truth used for scoring: a state that
    belongs to several chunks carries the first-listed chunk's id.  The
    full membership sets are kept separately because the community
    condition (internal degree > external degree) must be checked against
    memberships, not the flattened labels, or shared states would count
    their own chunk-mates as external.
    """

    states: list
    transitions: np.ndarray
    chunk_labels: np.ndarray
    fixed: np.ndarray  # bool mask: state has exactly one outgoing edge, p = 1
    memberships: list = None  # per state: frozenset of chunk ids
    name: str = ""

    def __post_init__(self):
        self.transitions = np.asarray(self.transitions, dtype=float)
        self.chunk_labels = np.asarray(self.chunk_labels, dtype=np.int64)
        self.fixed = np.asarray(self.fixed, dtype=bool)
        if self.memberships is None:
            self.memberships = [frozenset([int(c)]) for c in self.chunk_labels]

    @property
    def n_states(self) -> int:
        return len(self.states)

    def index(self, name) -> int:
        try:
            return self.states.index(name)
        except ValueError:
            raise InputError(f"unknown state {name!r} in graph {self.name!r}") from None

    def check_stochastic(self):
        p = self.transitions
        if p.shape != (self.n_states, self.n_states):
            raise ConfigError(
                f"transition matrix shape {p.shape} does not match {self.n_states} states"
            )
        if (p < 0).any():
            raise ConfigError("negative transition probability")
        bad = np.where(np.abs(p.sum(axis=1) - 1.0) > _ROW_SUM_TOL)[0]
        if bad.size:
            s = self.states[bad[0]]
            raise ConfigError(
                f"row for state {s!r} sums to {p[bad[0]].sum():.6f}, expected 1"
            )

    def validate(self):
        """Structural invariants; raises ConfigError on the first violation."""
        if self.n_states < 2:
            raise ConfigError("graph needs at least 2 states")
        if len(set(map(str, self.states))) != self.n_states:
            raise ConfigError("duplicate state names")
        self.check_stochastic()
        if self.chunk_labels.shape != (self.n_states,):
            raise ConfigError("chunk_labels must cover every state")
        p = self.transitions
        for i in np.where(self.fixed)[0]:
            row = p[i]
            if not (np.count_nonzero(row) == 1 and np.isclose(row.max(), 1.0)):
                raise ConfigError(
                    f"state {self.states[i]!r} is marked fixed but its "
                    f"out-transition is not deterministic"
                )
        self._check_communities()
        return self

    def _check_communities(self):
        """Internal degree must beat external degree, per community state.

        Applies only to fully probabilistic chunks: deterministic chains
        are chunks by construction, not communities, and their members
        (e.g. a chain head reachable from every other chunk) can have
        arbitrarily many external neighbors.
        """
        p = self.transitions
        linked = (p > 0) | (p > 0).T
        np.fill_diagonal(linked, False)
        chunk_has_fixed = {}
        for i in range(self.n_states):
            for c in self.memberships[i]:
                chunk_has_fixed[c] = chunk_has_fixed.get(c, False) or bool(self.fixed[i])
        for i in range(self.n_states):
            if all(chunk_has_fixed[c] for c in self.memberships[i]):
                continue
            nbrs = np.where(linked[i])[0]
            k_int = sum(1 for j in nbrs if self.memberships[i] & self.memberships[j])
            k_ext = len(nbrs) - k_int
            if not k_int > k_ext:
                raise ConfigError(
                    f"state {self.states[i]!r} breaks the community condition: "
                    f"{k_int} internal vs {k_ext} external neighbors"
                )


@dataclass
class ContinualSchedule:
    """Ordered tasks over one shared state set, each run for a fixed length."""

    tasks: list
    samples_per_task: int = 100000

    def __post_init__(self):
        if not self.tasks:
            raise ConfigError("schedule needs at least one task")
        if self.samples_per_task < 1:
            raise ConfigError("samples_per_task must be >= 1")
        names = self.tasks[0].states
        for g in self.tasks[1:]:
            if g.states != names:
                raise ConfigError("all tasks in a schedule must share one state set")

    @property
    def n_tasks(self) -> int:
        return len(self.tasks)


@dataclass
class ChunkedSequence:
    """Generated stream plus per-task truth labels.

    task_boundaries holds the sample indices where a new task begins
    (empty for single-task problems); truth[k] labels every state id for
    task k.
    """

    states: np.ndarray
    truth: list
    task_boundaries: list
    state_names: list

    def __post_init__(self):
        self.states = np.asarray(self.states, dtype=np.int64)
        if len(self.task_boundaries) != len(self.truth) - 1:
            raise InputError("need exactly one boundary between consecutive tasks")
        if any(b <= 0 or b >= len(self.states) for b in self.task_boundaries):
            raise InputError("task boundaries must fall inside the sequence")
        if list(self.task_boundaries) != sorted(set(self.task_boundaries)):
            raise InputError("task boundaries must be strictly increasing")

    @property
    def n_states(self) -> int:
        return len(self.state_names)

    @property
    def n_tasks(self) -> int:
        return len(self.truth)

    def task_slices(self):
        edges = [0, *self.task_boundaries, len(self.states)]
        return [(edges[i], edges[i + 1]) for i in range(len(edges) - 1)]


def random_walk(graph: TransitionGraph, n_samples: int, rng: np.random.Generator,
                start: int | None = None):
    """Sample a walk; returns (sequence, final_state).

    With start=None the walk opens at a uniformly drawn state which is
    emitted as the first sample.  With an explicit start the walk emits
    n_samples transitions leaving from it (the start itself is not
    emitted), which is what continuing across a task boundary needs.
    """
    if n_samples < 1:
        raise InputError(f"n_samples must be >= 1, got {n_samples}")
    graph.check_stochastic()
    cum = np.cumsum(graph.transitions, axis=1)
    out = np.empty(n_samples, dtype=np.int64)
    if start is None:
        out[0] = rng.integers(graph.n_states)
        if n_samples == 1:
            return out, int(out[0])
        final = _kernel.walk_kernel(cum, out[0], rng.random(n_samples - 1), out[1:])
    else:
        if not 0 <= start < graph.n_states:
            raise InputError(f"start state {start} out of range")
        final = _kernel.walk_kernel(cum, start, rng.random(n_samples), out)
    return out, int(final)


def make_schedule(tasks, samples_per_task: int = 100000) -> ContinualSchedule:
    return ContinualSchedule(list(tasks), samples_per_task)


def generate(schedule: ContinualSchedule, rng: np.random.Generator) -> ChunkedSequence:
    """Concatenated walks, each task continuing from the current state."""
    parts = []
    boundaries = []
    current = None
    total = 0
    for g in schedule.tasks:
        seq, current = random_walk(g, schedule.samples_per_task, rng, start=current)
        parts.append(seq)
        total += len(seq)
        boundaries.append(total)
    return ChunkedSequence(
        states=np.concatenate(parts),
        truth=[g.chunk_labels for g in schedule.tasks],
        task_boundaries=boundaries[:-1],
        state_names=list(schedule.tasks[0].states),
    )


# ---------------------------------------------------------------------------
# generators for the benchmark family


def _chain_graph(chunks, name):
    """Deterministic chains; each chain end jumps uniformly to another
    chain's head (never back to its own)."""
    states = sorted({s for ch in chunks for s in ch})
    n = len(states)
    idx = {s: i for i, s in enumerate(states)}
    p = np.zeros((n, n))
    labels = np.zeros(n, dtype=np.int64)
    fixed = np.zeros(n, dtype=bool)
    heads = [idx[ch[0]] for ch in chunks]
    for c, ch in enumerate(chunks):
        for k, s in enumerate(ch):
            labels[idx[s]] = c
            if k + 1 < len(ch):
                p[idx[s], idx[ch[k + 1]]] = 1.0
                fixed[idx[s]] = True
            else:
                others = [h for j, h in enumerate(heads) if j != c]
                p[idx[s], others] = 1.0 / len(others)
    return TransitionGraph(states, p, labels, fixed, name=name).validate()


def gen_fixed_chunks() -> TransitionGraph:
    """Four deterministic 3-state chains over 12 states."""
    return _chain_graph(
        [["a", "b", "c"], ["d", "e", "f"], ["g", "h", "i"], ["j", "k", "l"]],
        name="fixed_chunks",
    )


def gen_continual_fixed(samples_per_task: int = 100000) -> ContinualSchedule:
    """Two fixed-chunk tasks; the second permutes every chunk's membership
    so that each old chunk is spread over three new ones."""
    task1 = gen_fixed_chunks()
    task2 = _chain_graph(
        [["a", "k", "i"], ["g", "e", "j"], ["d", "h", "c"], ["f", "b", "l"]],
        name="fixed_chunks_task2",
    )
    return make_schedule([task1, task2], samples_per_task)


def gen_overlap(variant: int) -> TransitionGraph:
    """Two probabilistic chunks sharing states.

    Variant 1 shares two states; variant 2 nests one chunk inside the
    other.  Realized as a mixture chain: leaving a state, one of its
    chunks is drawn uniformly, then a uniform other member of that chunk.
    Shared states are labeled with their first-listed chunk for scoring.
    """
    if variant == 1:
        chunks = [list("abcde"), list("defgh")]
    elif variant == 2:
        chunks = [list("abcde"), list("abcdefghij")]
    else:
        raise InputError(f"overlap variant must be 1 or 2, got {variant}")
    states = sorted({s for ch in chunks for s in ch})
    n = len(states)
    idx = {s: i for i, s in enumerate(states)}
    member = [frozenset(c for c, ch in enumerate(chunks) if s in ch) for s in states]
    labels = np.array([min(m) for m in member], dtype=np.int64)
    p = np.zeros((n, n))
    for i, s in enumerate(states):
        for c in member[i]:
            others = [idx[t] for t in chunks[c] if t != s]
            p[i, others] += 1.0 / (len(member[i]) * len(others))
    g = TransitionGraph(
        states, p, labels, np.zeros(n, dtype=bool),
        memberships=member, name=f"overlap{variant}",
    )
    return g.validate()


def gen_long_chunks(n_samples: int, rng: np.random.Generator) -> ChunkedSequence:
    """Alternating visits to two 4-state chunks with stochastic dwell.

    Chunk A = {a,b,c,d} is emitted as a fresh permutation of its members
    per visit; chunk B = {e,f,g,h} runs for 5 + unif{0..19} draws, each
    uniform over the members excluding the previous symbol.  The chunks
    are disjoint, so no symbol ever repeats back to back.
    """
    if n_samples < 1:
        raise InputError(f"n_samples must be >= 1, got {n_samples}")
    a_members = np.arange(4)
    b_members = np.arange(4, 8)
    out = np.empty(n_samples, dtype=np.int64)
    pos = 0
    in_a = bool(rng.integers(2))
    while pos < n_samples:
        if in_a:
            visit = rng.permutation(a_members)
        else:
            dur = 5 + int(rng.integers(20))
            visit = np.empty(dur, dtype=np.int64)
            visit[0] = rng.choice(b_members)
            for k in range(1, dur):
                step = rng.choice(3)  # 3 members other than the previous one
                visit[k] = b_members[(visit[k - 1] - 4 + 1 + step) % 4]
        take = min(len(visit), n_samples - pos)
        out[pos:pos + take] = visit[:take]
        pos += take
        in_a = not in_a
    labels = np.array([0, 0, 0, 0, 1, 1, 1, 1], dtype=np.int64)
    return ChunkedSequence(out, [labels], [], list("abcdefgh"))


# ---------------------------------------------------------------------------
# graph files

_GRAPH_KEYS = {"states", "edges", "chunks", "fixed"}


def load_graph(path) -> TransitionGraph:
    """Read a transition graph from JSON.

    Format: {"states": [...], "edges": [{"from","to","p"?}], "chunks":
    {state: chunk_id}, "fixed": [states]}.  Edges without "p" split
    whatever probability mass their source state has not assigned
    explicitly (so a state with only bare edges gets a uniform row).
    """
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise GraphFormatError(f"{path}: {e}") from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e

    def fail(msg):
        raise GraphFormatError(f"{path}: {msg}")

    if not isinstance(doc, dict):
        fail("top level must be a JSON object")
    unknown = set(doc) - _GRAPH_KEYS
    if unknown:
        fail(f"unknown keys {sorted(unknown)}")
    for key in ("states", "edges", "chunks"):
        if key not in doc:
            fail(f"missing required key {key!r}")

    states = doc["states"]
    if (not isinstance(states, list) or len(states) < 2
            or not all(isinstance(s, str) for s in states)):
        fail('"states" must be a list of at least 2 state names')
    if len(set(states)) != len(states):
        fail("duplicate state names")
    n = len(states)
    idx = {s: i for i, s in enumerate(states)}

    chunks = doc["chunks"]
    if not isinstance(chunks, dict):
        fail('"chunks" must map state name to chunk id')
    for s, c in chunks.items():
        if s not in idx:
            fail(f'"chunks" references unknown state {s!r}')
        if not isinstance(c, int):
            fail(f"chunk id for state {s!r} must be an integer")
    missing = [s for s in states if s not in chunks]
    if missing:
        fail(f"states without a chunk label: {missing}")
    labels = np.array([chunks[s] for s in states], dtype=np.int64)

    fixed_names = doc.get("fixed", [])
    if not isinstance(fixed_names, list):
        fail('"fixed" must be a list of state names')
    fixed = np.zeros(n, dtype=bool)
    for s in fixed_names:
        if s not in idx:
            fail(f'"fixed" references unknown state {s!r}')
        fixed[idx[s]] = True

    if not isinstance(doc["edges"], list) or not doc["edges"]:
        fail('"edges" must be a nonempty list')
    p = np.zeros((n, n))
    bare = []  # edges whose probability is left to uniform completion
    seen = set()
    for k, e in enumerate(doc["edges"]):
        if not isinstance(e, dict) or "from" not in e or "to" not in e:
            fail(f'edge #{k} must be an object with "from" and "to"')
        a, b = e["from"], e["to"]
        if a not in idx:
            fail(f"edge #{k} references unknown state {a!r}")
        if b not in idx:
            fail(f"edge #{k} references unknown state {b!r}")
        if (a, b) in seen:
            fail(f"duplicate edge {a!r} -> {b!r}")
        seen.add((a, b))
        if "p" in e:
            prob = e["p"]
            if not isinstance(prob, (int, float)) or not 0 < prob <= 1:
                fail(f"edge {a!r} -> {b!r} has invalid probability {prob!r}")
            p[idx[a], idx[b]] = prob
        else:
            bare.append((idx[a], idx[b]))

    # bare edges split whatever mass their row has not assigned explicitly
    bare_per_row = np.zeros(n, dtype=int)
    for a, _ in bare:
        bare_per_row[a] += 1
    assigned = p.sum(axis=1)
    for a in range(n):
        if bare_per_row[a]:
            leftover = 1.0 - assigned[a]
            if leftover < -_ROW_SUM_TOL:
                fail(f"state {states[a]!r} assigns more than probability 1")
            for aa, b in bare:
                if aa == a:
                    p[a, b] = leftover / bare_per_row[a]
    degree = np.count_nonzero(p, axis=1)
    if (degree == 0).any():
        dead = states[int(np.argmin(degree))]
        fail(f"state {dead!r} has no outgoing edges")

    g = TransitionGraph(list(states), p, labels, fixed, name=str(path))
    try:
        g.validate()
    except ConfigError as e:
        raise GraphFormatError(f"{path}: {e}") from e
    return g


def _bundled(name) -> Path:
    from importlib.resources import files

    return Path(str(files("chunklab") / "graphs" / name))


def gen_mixed(path=None) -> TransitionGraph:
    """Graph with two probabilistic communities bridged to one
    deterministic chain; the bundled default is a small reconstruction
    with 11 states."""
    return load_graph(path if path is not None else _bundled("mixed.json"))


def gen_continual_mixed(path=None, path2=None,
                        samples_per_task: int = 100000) -> ContinualSchedule:
    """Mixed-structure task followed by a membership permutation of it."""
    task1 = gen_mixed(path)
    task2 = load_graph(path2 if path2 is not None else _bundled("mixed_task2.json"))
    return make_schedule([task1, task2], samples_per_task)


# ---------------------------------------------------------------------------
# registry


class Problem:
    """Uniform handle the harness runs: id, state space, per-task truth,
    and a seeded sequence sampler."""

    def __init__(self, problem_id, state_names, truths, sampler, graphs=None):
        self.id = problem_id
        self.state_names = list(state_names)
        self.truths = [np.asarray(t, dtype=np.int64) for t in truths]
        self._sampler = sampler
        self.graphs = graphs

    @property
    def n_states(self) -> int:
        return len(self.state_names)

    @property
    def n_tasks(self) -> int:
        return len(self.truths)

    def sequence(self, samples_per_task: int, rng: np.random.Generator) -> ChunkedSequence:
        return self._sampler(samples_per_task, rng)

    @classmethod
    def from_graphs(cls, problem_id, graphs):
        def sampler(spt, rng):
            return generate(make_schedule(graphs, spt), rng)

        return cls(
            problem_id,
            graphs[0].states,
            [g.chunk_labels for g in graphs],
            sampler,
            graphs=list(graphs),
        )


def _problem_long_chunks():
    labels = np.array([0, 0, 0, 0, 1, 1, 1, 1], dtype=np.int64)
    return Problem(
        "long_chunks",
        list("abcdefgh"),
        [labels],
        lambda spt, rng: gen_long_chunks(spt, rng),
    )


_REGISTRY = {
    "fixed_chunks": lambda: Problem.from_graphs("fixed_chunks", [gen_fixed_chunks()]),
    "long_chunks": _problem_long_chunks,
    "overlap1": lambda: Problem.from_graphs("overlap1", [gen_overlap(1)]),
    "overlap2": lambda: Problem.from_graphs("overlap2", [gen_overlap(2)]),
    "continual_fixed": lambda: Problem.from_graphs(
        "continual_fixed", gen_continual_fixed().tasks),
    "mixed": lambda: Problem.from_graphs("mixed", [gen_mixed()]),
    "continual_mixed": lambda: Problem.from_graphs(
        "continual_mixed", gen_continual_mixed().tasks),
}


def list_problems():
    return sorted(_REGISTRY)


def get_problem(problem_id: str) -> Problem:
    """Resolve a problem id; 'graph:<path>' or a bare *.json path loads a
    user-supplied graph as a single-task problem."""
    if problem_id in _REGISTRY:
        return _REGISTRY[problem_id]()
    if problem_id.startswith("graph:") or problem_id.endswith(".json"):
        path = problem_id[6:] if problem_id.startswith("graph:") else problem_id
        return Problem.from_graphs(problem_id, [load_graph(path)])
    raise InputError(
        f"unknown problem {problem_id!r}; expected one of {list_problems()} "
        f"or graph:<file.json>"
    )
