"""
Adapting across a mid-stream regime switch
==========================================

The continual problem regroups the same 12 states into different chunks
halfway through the stream. One learner is fed straight through the
switch with no reset; the map dissolves the old arrangement and re-forms
around the new one.
"""

import numpy as np

from chunklab.clustering import assign_chunks
from chunklab.dynamics import DynamicsConfig, SyncMap
from chunklab.metrics import nmi
from chunklab.problems import get_problem

problem = get_problem("continual_fixed")
rng = np.random.default_rng(1)
seq = problem.sequence(30000, rng)        # 30000 samples per task
boundary = seq.task_boundaries[0]

learner = SyncMap(problem.n_states, DynamicsConfig(), rng=rng)

def score_both(tag):
    labels = assign_chunks(learner.state).labels
    s1, s2 = nmi(labels, seq.truth[0]), nmi(labels, seq.truth[1])
    print(f"{tag:>28}: vs task-1 truth {s1:.3f}   vs task-2 truth {s2:.3f}")

# task 1: the familiar four chains
learner.feed(seq.states[:boundary])
score_both("after task 1")

# continue on the regrouped stream, sampling the drift as it happens
chunk = (len(seq.states) - boundary) // 4
for k in range(4):
    learner.feed(seq.states[boundary + k * chunk : boundary + (k + 1) * chunk])
    score_both(f"task 2, {25 * (k + 1):3d}% consumed")
