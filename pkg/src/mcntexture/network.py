"""Multilayer pixel network construction, threshold cuts and W/B splits.

A vertex is one pixel in one channel; its canonical index is
``((y * width) + x) * channels + channel``, which fixes a deterministic
ordering for per-vertex outputs. Edges are undirected and stored once.
"""

from dataclasses import dataclass

import numpy as np

from .stencil import NeighborhoodStencil, build_stencil, canonical_edge_offsets
from .validation import MAX_LEVEL, check_image, check_radius, check_threshold


def weight_from_diff(dp, d, r, L=MAX_LEVEL):
    """Connection weight from an absolute intensity difference.

    ``w = ((|dp| + 1) / (L + 1)) * ((d + 1) / (r + 1))``; both factors are
    shifted by one so that zero intensity difference and zero spatial
    distance (co-located pixels of different channels) still produce a
    positive weight. Always in (0, 1] for valid inputs.
    """
    return ((np.abs(dp) + 1.0) / (L + 1.0)) * ((d + 1.0) / (r + 1.0))


def edge_weight(p_i, p_j, d, r, L=MAX_LEVEL):
    """Weight of the edge between intensities ``p_i`` and ``p_j`` at distance ``d``.

    Raises if ``d`` exceeds the radius (such an edge must not exist) or the
    intensities fall outside ``[0, L]``.
    """
    r = check_radius(r)
    p_i = np.asarray(p_i, dtype=np.float64)
    p_j = np.asarray(p_j, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if np.any(d < 0) or np.any(d > r):
        raise ValueError(f"distance must lie in [0, r={r}]")
    for p in (p_i, p_j):
        if np.any(p < 0) or np.any(p > L):
            raise ValueError(f"intensities must lie in [0, {L}]")
    w = weight_from_diff(p_i - p_j, d, r, L)
    return float(w) if w.ndim == 0 else w


@dataclass
class PixelNetwork:
    """A (possibly thresholded) multilayer pixel network.

    ``edges_a``/``edges_b`` hold canonical vertex indices with
    ``edges_a < edges_b`` row-wise; ``weights`` the matching connection
    weights. ``threshold`` records the cut applied (None before any cut).
    """

    height: int
    width: int
    channels: int
    radius: int
    max_level: int
    edges_a: np.ndarray
    edges_b: np.ndarray
    weights: np.ndarray
    threshold: float = None

    @property
    def n_vertices(self):
        return self.height * self.width * self.channels

    @property
    def n_edges(self):
        return self.edges_a.shape[0]

    def vertex_channels(self):
        """Channel of every vertex in canonical order."""
        return np.arange(self.n_vertices, dtype=np.int64) % self.channels

    def edge_set(self):
        """Edges as a set of (a, b) index pairs (for oracle comparisons)."""
        return set(zip(self.edges_a.tolist(), self.edges_b.tolist()))


def build_network(image, stencil):
    """Build the radius-scaled network over all channel layers of ``image``.

    Every vertex pair within the stencil's spatial window is connected (all
    channel pairs included); interior vertices therefore share the same
    degree and the pre-threshold network is regular away from the borders.
    """
    image = check_image(image)
    if not isinstance(stencil, NeighborhoodStencil):
        stencil = build_stencil(*stencil)
    h, w, z = image.shape
    if stencil.channels != z:
        raise ValueError(
            f"stencil built for {stencil.channels} channels, image has {z}"
        )
    r = stencil.radius
    offs, dist = canonical_edge_offsets(r, z)
    img = image.astype(np.int16)
    vid = (np.arange(h * w, dtype=np.int64).reshape(h, w)) * z

    a_parts, b_parts, w_parts = [], [], []
    for k in range(offs.shape[0]):
        dy, dx, ca, cb = offs[k]
        y0, y1 = max(0, -dy), h - max(0, dy)
        x0, x1 = max(0, -dx), w - max(0, dx)
        if y0 >= y1 or x0 >= x1:
            continue
        base = img[y0:y1, x0:x1, ca]
        other = img[y0 + dy : y1 + dy, x0 + dx : x1 + dx, cb]
        wts = weight_from_diff(base - other, dist[k], r, MAX_LEVEL)
        va = vid[y0:y1, x0:x1] + ca
        vb = vid[y0 + dy : y1 + dy, x0 + dx : x1 + dx] + cb
        lo = np.minimum(va, vb).ravel()
        hi = np.maximum(va, vb).ravel()
        a_parts.append(lo)
        b_parts.append(hi)
        w_parts.append(wts.ravel())

    if a_parts:
        ea = np.concatenate(a_parts)
        eb = np.concatenate(b_parts)
        ew = np.concatenate(w_parts)
    else:
        ea = np.empty(0, dtype=np.int64)
        eb = np.empty(0, dtype=np.int64)
        ew = np.empty(0, dtype=np.float64)
    return PixelNetwork(
        height=h, width=w, channels=z, radius=r, max_level=MAX_LEVEL,
        edges_a=ea, edges_b=eb, weights=ew,
    )


def apply_threshold(net, t):
    """Keep exactly the edges with weight strictly greater than ``t``.

    Low-weighted edges join similar pixels; discarding them leaves the
    connections between distinct vertices.
    """
    t = check_threshold(t)
    keep = net.weights > t
    return PixelNetwork(
        height=net.height, width=net.width, channels=net.channels,
        radius=net.radius, max_level=net.max_level,
        edges_a=net.edges_a[keep], edges_b=net.edges_b[keep],
        weights=net.weights[keep], threshold=t,
    )


def split_within_between(net):
    """Partition the edges into the within-channel and between-channel subnets.

    Returns ``(W, B)`` sharing the vertex set of ``net``; every edge lands in
    exactly one of the two.
    """
    within = (net.edges_a % net.channels) == (net.edges_b % net.channels)

    def _sub(mask):
        return PixelNetwork(
            height=net.height, width=net.width, channels=net.channels,
            radius=net.radius, max_level=net.max_level,
            edges_a=net.edges_a[mask], edges_b=net.edges_b[mask],
            weights=net.weights[mask], threshold=net.threshold,
        )

    return _sub(within), _sub(~within)
