"""
Fitting the default problem end to end
======================================

Four deterministic 3-state chains, jump-linked at the ends, are streamed
into the map learner. States that follow each other in time end up close
on the map, so density clustering recovers the chains.
"""

import numpy as np

from chunklab.clustering import assign_chunks
from chunklab.dynamics import DynamicsConfig, SyncMap
from chunklab.metrics import nmi
from chunklab.problems import get_problem

problem = get_problem("fixed_chunks")
rng = np.random.default_rng(0)
seq = problem.sequence(30000, rng)

# a slice of the raw stream, rendered with state names
names = np.array(problem.state_names)
print("stream:", " ".join(names[seq.states[:30]]), "...")
print("truth: ", dict(zip(problem.state_names, map(int, seq.truth[0]))))

learner = SyncMap(problem.n_states, DynamicsConfig(), rng=rng)
learner.feed(seq.states)
print(f"\nfitted {learner.timesteps} encoder timesteps "
      f"({learner.step_count} map updates)")

# final positions: 12 states in a 3-d ball of radius 10
print("\nstate  label  position")
chunks = assign_chunks(learner.state)
for i, name in enumerate(problem.state_names):
    x, y, z = learner.weights[i]
    print(f"{name:>5} {chunks.labels[i]:>6}  ({x:7.2f}, {y:7.2f}, {z:7.2f})")

score = nmi(chunks.labels, seq.truth[0])
print(f"\nNMI against ground truth: {score:.3f}")
