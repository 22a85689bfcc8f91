"""Compiled inner loop for map fitting.

One trial processes ``len(states) * tstep`` timesteps; the pure-numpy
update path costs several microseconds per step, so the loop is JIT
compiled.  Semantics mirror ``dynamics.update_step`` exactly: partition
by activation, synchronous centroid update, then map normalization.
"""

import math

import numpy as np
from numba import njit

RULE_REPEL = 0
RULE_ATTRACT = 1
RULE_DIPOLE = 2
RULE_SPLIT = 3

NORM_RESCALE = 0
NORM_CLIP = 1


@njit(cache=True, nogil=True)
def fit_kernel(
    w,
    states,
    ta,
    start_t,
    tstep,
    memory,
    decay,
    threshold,
    alpha_eff,
    radius,
    guard,
    rule,
    norm_mode,
):
    n, k = w.shape
    cutoff = float(memory * tstep)
    pos = np.empty(n, np.bool_)
    cp = np.empty(k)
    cn = np.empty(k)
    delta = np.empty((n, k))
    t = start_t
    updates = 0

    for si in range(states.shape[0]):
        ta[states[si]] = t
        for _ in range(tstep):
            npos = 0
            for i in range(n):
                e = t - ta[i]  # NaN for never-activated states
                if e >= 0.0 and e < cutoff and math.exp(-decay * e) > threshold:
                    pos[i] = True
                    npos += 1
                else:
                    pos[i] = False

            if npos > 1 and (n - npos) > 1:
                for j in range(k):
                    cp[j] = 0.0
                    cn[j] = 0.0
                for i in range(n):
                    if pos[i]:
                        for j in range(k):
                            cp[j] += w[i, j]
                    else:
                        for j in range(k):
                            cn[j] += w[i, j]
                for j in range(k):
                    cp[j] /= npos
                    cn[j] /= n - npos

                for i in range(n):
                    dp = 0.0
                    dn = 0.0
                    for j in range(k):
                        dp += (w[i, j] - cp[j]) ** 2
                        dn += (w[i, j] - cn[j]) ** 2
                    dp = math.sqrt(dp) + guard
                    dn = math.sqrt(dn) + guard
                    for j in range(k):
                        to_cp = (cp[j] - w[i, j]) / dp
                        to_cn = (cn[j] - w[i, j]) / dn
                        if pos[i]:
                            if rule == RULE_DIPOLE:
                                delta[i, j] = alpha_eff * (to_cp - to_cn)
                            else:
                                delta[i, j] = alpha_eff * to_cp
                        else:
                            if rule == RULE_REPEL:
                                delta[i, j] = -alpha_eff * to_cn
                            elif rule == RULE_ATTRACT:
                                delta[i, j] = alpha_eff * to_cn
                            elif rule == RULE_SPLIT:
                                delta[i, j] = -alpha_eff * (npos / (n - npos)) * to_cp
                            else:
                                delta[i, j] = alpha_eff * (to_cn - to_cp)

                for i in range(n):
                    for j in range(k):
                        w[i, j] += delta[i, j]

                if norm_mode == NORM_RESCALE:
                    mx = 0.0
                    for i in range(n):
                        s2 = 0.0
                        for j in range(k):
                            s2 += w[i, j] * w[i, j]
                        if s2 > mx:
                            mx = s2
                    mx = math.sqrt(mx)
                    if mx > 0.0:
                        f = radius / mx
                        for i in range(n):
                            for j in range(k):
                                w[i, j] *= f
                else:
                    for i in range(n):
                        s2 = 0.0
                        for j in range(k):
                            s2 += w[i, j] * w[i, j]
                        nrm = math.sqrt(s2)
                        if nrm > radius:
                            f = radius / nrm
                            for j in range(k):
                                w[i, j] *= f
                updates += 1
            t += 1

    return t, updates


@njit(cache=True, nogil=True)
def walk_kernel(cum, start, uniforms, out):
    """Markov chain walk given per-row cumulative probabilities.

    cum:      (n_states, n_states) cumulative row sums of P
    start:    state the first transition leaves from (not emitted)
    uniforms: one uniform draw per emitted sample
    out:      int64 output buffer, len(uniforms)

    Returns the final state so a later segment can continue the walk.
    """
    s = start
    for i in range(uniforms.shape[0]):
        row = cum[s]
        u = uniforms[i]
        nxt = 0
        while row[nxt] < u and nxt < row.shape[0] - 1:
            nxt += 1
        out[i] = nxt
        s = nxt
    return s
