"""Adaptive threshold range estimation from a corpus edge-weight distribution.

The pooled distribution of connection weights is discretized into 256 bins
over [0, 1]. The lower limit is the distribution peak; the upper limit either
covers a target fraction of the mass (practical rule, default 0.9) or is the
point where the corpus mean degree first drops to 1 (exact rule). Both limits
are reported as bin upper edges so the strict ``w > t`` cut drops the entire
argmax bin.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .network import weight_from_diff
from .stencil import canonical_edge_offsets
from .validation import MAX_LEVEL, check_image_list, check_radius

N_BINS = 256


@dataclass
class EdgeWeightHistogram:
    """Pooled 256-bin histogram of edge weights over a corpus sample."""

    bins: np.ndarray
    total: int
    source_radius: int

    def normalized(self):
        """Per-bin probability mass (sums to 1 when the corpus has edges)."""
        if self.total == 0:
            return np.zeros(N_BINS, dtype=np.float64)
        return self.bins / float(self.total)


@dataclass
class ThresholdPlan:
    """The estimated limits and the m equidistant thresholds between them."""

    t1: float
    t_m: float
    thresholds: np.ndarray
    m: int

    def to_dict(self):
        return {
            "t1": self.t1,
            "t_m": self.t_m,
            "m": self.m,
            "thresholds": [float(t) for t in self.thresholds],
        }


def bin_index(w):
    """Histogram bin of a weight: min(floor(w * 256), 255)."""
    w = np.asarray(w, dtype=np.float64)
    idx = np.minimum(np.floor(w * N_BINS).astype(np.int64), N_BINS - 1)
    return idx if idx.ndim else int(idx)


def bin_upper_edge(i):
    """Representative weight of bin ``i`` (its upper edge)."""
    return (int(i) + 1) / N_BINS


def _hist_lut(dists, r):
    dp = np.arange(MAX_LEVEL + 1, dtype=np.float64)
    lut = np.empty((dists.size, MAX_LEVEL + 1), dtype=np.int64)
    for i, d in enumerate(dists):
        lut[i] = bin_index(weight_from_diff(dp, d, r, MAX_LEVEL))
    return lut


def _image_histogram(image, r, offs, dist, lut, inv):
    h, w, _ = image.shape
    img = image.astype(np.int16)
    counts = np.zeros(N_BINS, dtype=np.int64)
    for k in range(offs.shape[0]):
        dy, dx, ca, cb = offs[k]
        y0, y1 = max(0, -dy), h - max(0, dy)
        x0, x1 = max(0, -dx), w - max(0, dx)
        if y0 >= y1 or x0 >= x1:
            continue
        dp = np.abs(
            img[y0:y1, x0:x1, ca] - img[y0 + dy : y1 + dy, x0 + dx : x1 + dx, cb]
        )
        counts += np.bincount(lut[inv[k]][dp].ravel(), minlength=N_BINS)
    return counts


def edge_weight_histogram(images, r=1):
    """Pooled edge-weight histogram of the radius-``r`` networks of a corpus.

    Each undirected edge is counted once. Per-image histograms simply add, so
    the pooled histogram is independent of corpus order and chunking.
    """
    r = check_radius(r)
    images = check_image_list(images)
    z = images[0].shape[2]
    offs, dist = canonical_edge_offsets(r, z)
    classes, inv = np.unique(dist, return_inverse=True)
    lut = _hist_lut(classes, r)
    counts = np.zeros(N_BINS, dtype=np.int64)
    for image in images:
        counts += _image_histogram(image, r, offs, dist, lut, inv)
    return EdgeWeightHistogram(
        bins=counts, total=int(counts.sum()), source_radius=r
    )


def lower_limit(h):
    """Peak of the weight distribution (bin upper edge, ties to the lowest bin)."""
    if h.total <= 0:
        raise ValueError("histogram is empty; cannot locate the distribution peak")
    return bin_upper_edge(int(np.argmax(h.bins)))


def upper_limit_quantile(h, q=0.9):
    """Smallest bin upper edge covering at least fraction ``q`` of the mass."""
    if h.total <= 0:
        raise ValueError("histogram is empty; cannot take a quantile")
    if not 0.0 < q < 1.0:
        raise ValueError(f"quantile must lie in (0, 1), got {q}")
    cum = np.cumsum(h.bins) / h.total
    i = int(np.searchsorted(cum, q, side="left"))
    return bin_upper_edge(min(i, N_BINS - 1))


def upper_limit_mean_degree(images, r, h):
    """Smallest bin upper edge where the corpus mean degree drops to <= 1.

    The mean degree at threshold ``t`` is ``2 * |{edges with w > t}| / n`` with
    ``n`` the pooled vertex count; the surviving-edge count at a bin upper edge
    is the histogram tail above that bin. Exact counterpart of the practical
    quantile rule, resolved at bin granularity.
    """
    if h.total <= 0:
        raise ValueError("histogram is empty; cannot evaluate the mean degree")
    images = check_image_list(images)
    n_vertices = sum(im.shape[0] * im.shape[1] * im.shape[2] for im in images)
    tail = h.total - np.cumsum(h.bins)  # edges in bins > i
    gamma = 2.0 * tail / n_vertices
    i = int(np.argmax(gamma <= 1.0))
    return bin_upper_edge(i)


def threshold_set(t1, t_m, m):
    """The ``m`` equidistant thresholds spanning [t1, t_m]."""
    t1 = float(t1)
    t_m = float(t_m)
    m = int(m)
    if m < 2:
        raise ValueError(f"threshold count must be >= 2, got {m}")
    if t1 > t_m:
        raise ValueError(f"lower limit {t1} exceeds upper limit {t_m}")
    if t1 == t_m:
        warnings.warn(
            f"degenerate threshold interval [{t1}, {t_m}]; emitting {m} equal "
            "thresholds (single-color corpus?)",
            stacklevel=2,
        )
    j = np.arange(m, dtype=np.float64)
    ts = t1 + j * ((t_m - t1) / (m - 1))
    ts[0] = t1
    ts[-1] = t_m
    return ThresholdPlan(t1=t1, t_m=t_m, thresholds=ts, m=m)


def estimate_plan(images, m, rule="quantile", q=0.9, source_radius=1):
    """Estimate [t1, t_m] from a training corpus and emit the threshold plan."""
    if rule not in ("quantile", "mean-degree"):
        raise ValueError(f"unknown threshold rule {rule!r}")
    h = edge_weight_histogram(images, r=source_radius)
    t1 = lower_limit(h)
    if rule == "quantile":
        t_m = upper_limit_quantile(h, q=q)
    else:
        t_m = upper_limit_mean_degree(images, source_radius, h)
    t_m = max(t_m, t1)
    return threshold_set(t1, t_m, m), h


def write_histogram_csv(h, path):
    """256 rows of (bin_low, bin_high, count, normalized_mass)."""
    mass = h.normalized()
    with open(path, "w", newline="") as fh:
        fh.write("bin_low,bin_high,count,normalized_mass\n")
        for i in range(N_BINS):
            fh.write(
                f"{i / N_BINS:.17g},{(i + 1) / N_BINS:.17g},"
                f"{int(h.bins[i])},{mass[i]:.17g}\n"
            )
