"""Neighborhood geometry: which vertex pairs a radius connects.

Vertices live on an (x, y, channel) lattice. Spatial distance is the
Euclidean distance of the (x, y) coordinates only; the channel axis never
contributes to distance, so every channel pair is reachable within any
radius (including the zero spatial offset between co-located pixels of
different channels).
"""

from dataclasses import dataclass, field

import numpy as np

from .validation import check_radius


def spatial_offsets(r):
    """Nonzero integer (dx, dy) offsets with dx^2 + dy^2 <= r^2, sorted."""
    r = check_radius(r)
    out = []
    for dy in range(-r, r + 1):
        for dx in range(-r, r + 1):
            if dx == 0 and dy == 0:
                continue
            if dx * dx + dy * dy <= r * r:
                out.append((dx, dy))
    return out


@dataclass(frozen=True)
class NeighborhoodStencil:
    """Offsets realizing the radius-r window across channel layers.

    ``offsets`` holds ``(dx, dy, dc)`` triples relative to a base vertex,
    where ``dc`` is the channel displacement modulo ``channels`` (dc = 0 is
    the same channel; each dc in 1..channels-1 reaches one distinct other
    channel). The self offset (0, 0, 0) is excluded.
    """

    radius: int
    channels: int
    offsets: tuple = field(repr=False)

    @property
    def size(self):
        return len(self.offsets)

    def __len__(self):
        return len(self.offsets)


def build_stencil(r, z):
    """Build the neighborhood stencil for radius ``r`` and ``z`` channels.

    Within a channel only the nonzero spatial offsets apply; toward each of
    the other z-1 channels the zero offset is also valid (same pixel,
    different channel).
    """
    r = check_radius(r)
    z = int(z)
    if z < 1:
        raise ValueError(f"channel count must be >= 1, got {z}")
    spatial = spatial_offsets(r)
    offsets = [(dx, dy, 0) for dx, dy in spatial]
    for dc in range(1, z):
        offsets.append((0, 0, dc))
        offsets.extend((dx, dy, dc) for dx, dy in spatial)
    return NeighborhoodStencil(radius=r, channels=z, offsets=tuple(offsets))


def canonical_edge_offsets(r, z):
    """Enumerate each undirected edge offset exactly once.

    Returns
    -------
    offs : ndarray of int64, shape (K, 4)
        Rows ``(dy, dx, ca, cb)``: the edge joins base vertex ``(y, x, ca)``
        to ``(y+dy, x+dx, cb)``. Spatial offsets are restricted to the half
        plane ``dy > 0 or (dy == 0 and dx > 0)`` over all ordered channel
        pairs, plus the zero spatial offset with ``ca < cb``.
    dist : ndarray of float64, shape (K,)
        Euclidean (x, y) length of each offset.
    """
    r = check_radius(r)
    z = int(z)
    if z < 1:
        raise ValueError(f"channel count must be >= 1, got {z}")
    rows = []
    half = [(dx, dy) for dx, dy in spatial_offsets(r) if dy > 0 or (dy == 0 and dx > 0)]
    for ca in range(z):
        for cb in range(ca + 1, z):
            rows.append((0, 0, ca, cb))
    for dx, dy in half:
        for ca in range(z):
            for cb in range(z):
                rows.append((dy, dx, ca, cb))
    offs = np.asarray(rows, dtype=np.int64).reshape(-1, 4)
    dist = np.sqrt((offs[:, 0] ** 2 + offs[:, 1] ** 2).astype(np.float64))
    return offs, dist


def canonical_id_map(offs, r, z):
    """Index array mapping (dy, dx, ca, cb) -> canonical offset row (-1 if absent)."""
    idmap = np.full((2 * r + 1, 2 * r + 1, z, z), -1, dtype=np.int64)
    for k, (dy, dx, ca, cb) in enumerate(offs):
        idmap[dy + r, dx + r, ca, cb] = k
    return idmap
