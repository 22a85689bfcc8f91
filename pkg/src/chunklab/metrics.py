"""Scoring of chunk assignments and statistical comparison of methods."""

from __future__ import annotations

import numpy as np
from scipy import stats

from .errors import InputError


def _entropy(counts: np.ndarray) -> float:
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(predicted, truth) -> float:
    """Normalized mutual information 2*I/(H_pred + H_truth), in [0, 1].

    Entropies use natural log (the base cancels in the ratio).  If both
    labelings are single-cluster the score is 1 by convention; if exactly
    one is, the score is 0 (no information can be shared with a constant).
    """
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape or predicted.ndim != 1:
        raise InputError(
            f"labelings must be equal-length 1-d arrays, got {predicted.shape} vs {truth.shape}"
        )
    if predicted.size < 1:
        raise InputError("labelings must be nonempty")

    _, pi = np.unique(predicted, return_inverse=True)
    _, ti = np.unique(truth, return_inverse=True)
    n_p, n_t = pi.max() + 1, ti.max() + 1
    joint = np.bincount(pi * n_t + ti, minlength=n_p * n_t).reshape(n_p, n_t)

    h_p = _entropy(joint.sum(axis=1))
    h_t = _entropy(joint.sum(axis=0))
    if h_p == 0.0 and h_t == 0.0:
        return 1.0
    if h_p == 0.0 or h_t == 0.0:
        return 0.0
    info = h_p + h_t - _entropy(joint.ravel())
    return float(min(1.0, max(0.0, 2.0 * info / (h_p + h_t))))


def welch_t_test(samples_a, samples_b) -> float:
    """Two-sided Welch t-test p-value for unequal-variance samples.

    Degenerate case: when both samples have zero variance the p-value is
    1 for equal means and 0 otherwise (scipy yields NaN there).
    """
    a = np.asarray(samples_a, dtype=float)
    b = np.asarray(samples_b, dtype=float)
    if a.size < 2 or b.size < 2:
        raise InputError("each sample set needs at least 2 observations")
    if np.var(a) == 0.0 and np.var(b) == 0.0:
        return 1.0 if a.mean() == b.mean() else 0.0
    p = stats.ttest_ind(a, b, equal_var=False).pvalue
    return float(p)


def aggregate(trial_scores) -> tuple[float, float]:
    """Mean and sample std (ddof=1) of trial scores; a single score has std 0."""
    scores = np.asarray(trial_scores, dtype=float)
    if scores.size == 0:
        raise InputError("aggregate needs at least one score")
    if scores.size == 1:
        return float(scores[0]), 0.0
    return float(scores.mean()), float(scores.std(ddof=1))
