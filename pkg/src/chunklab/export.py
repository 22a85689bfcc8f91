"""Map snapshot export: CSV rows and an SVG scatter of the first two dims.

Both formats carry the same cluster labels; the SVG derives each
cluster's fill color from the label id alone, so a label in the CSV and
a fill in the SVG always correspond.
"""

from __future__ import annotations

import csv
import io

import numpy as np

from .errors import InputError


def label_color(label: int, n_labels: int) -> str:
    """Deterministic fill color for a cluster label."""
    n = max(int(n_labels), 1)
    hue = (int(label) * 360.0 / n) % 360.0
    return f"hsl({hue:.1f}, 65%, 45%)"


def _check(weights, labels, state_names):
    weights = np.asarray(weights, dtype=float)
    labels = np.asarray(labels, dtype=np.int64)
    if weights.ndim != 2:
        raise InputError("weights must be a 2-d (states x dims) array")
    if labels.shape != (weights.shape[0],):
        raise InputError(
            f"need one label per state, got {labels.shape} for {weights.shape[0]}"
        )
    if state_names is None:
        state_names = [str(i) for i in range(weights.shape[0])]
    if len(state_names) != weights.shape[0]:
        raise InputError("state_names length does not match weights")
    return weights, labels, [str(s) for s in state_names]


def map_csv(weights, labels, state_names=None) -> str:
    """CSV text with header state,label,dim0,...,dimK."""
    weights, labels, state_names = _check(weights, labels, state_names)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["state", "label"] + [f"dim{k}" for k in range(weights.shape[1])]
    )
    for i, name in enumerate(state_names):
        writer.writerow([name, int(labels[i])] + [repr(float(v)) for v in weights[i]])
    return buf.getvalue()


def map_svg(weights, labels, state_names=None, size: int = 480) -> str:
    """SVG scatter of dims 0 and 1, one circle per state, color by label.

    The projection keeps the aspect ratio: both axes share one scale
    centered on the data midpoint.
    """
    weights, labels, state_names = _check(weights, labels, state_names)
    if weights.shape[1] < 2:
        raise InputError("svg export needs a map with at least 2 dims")
    xy = weights[:, :2]
    margin = 40.0
    half = (size - 2 * margin) / 2.0
    center = (xy.max(axis=0) + xy.min(axis=0)) / 2.0
    spread = float(np.max(np.abs(xy - center))) or 1.0
    scale = half / spread
    n_labels = int(labels.max()) + 1 if labels.size else 1

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" '
        f'height="{size}" viewBox="0 0 {size} {size}">',
        f'<rect width="{size}" height="{size}" fill="white"/>',
    ]
    for i, name in enumerate(state_names):
        cx = size / 2.0 + (xy[i, 0] - center[0]) * scale
        cy = size / 2.0 - (xy[i, 1] - center[1]) * scale
        fill = label_color(int(labels[i]), n_labels)
        parts.append(
            f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="7" fill="{fill}">'
            f"<title>{name} (cluster {int(labels[i])})</title></circle>"
        )
        parts.append(
            f'<text x="{cx + 9:.2f}" y="{cy + 4:.2f}" font-size="12" '
            f'font-family="sans-serif">{name}</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts)


def export_map(weights, labels, path, fmt: str, state_names=None) -> None:
    """Write a map snapshot to path in the named format."""
    if fmt == "csv":
        text = map_csv(weights, labels, state_names)
    elif fmt == "svg":
        text = map_svg(weights, labels, state_names)
    else:
        raise InputError(f"unknown export format {fmt!r}; expected csv or svg")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(text)
