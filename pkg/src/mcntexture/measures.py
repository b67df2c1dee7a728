"""Per-vertex degree and clustering, their summary statistics, and maps.

Two routes compute the same measures:

* the reference route on a materialized :class:`~mcntexture.network.PixelNetwork`
  (:func:`degree_field` / :func:`clustering_field`), a direct transcription of
  the definitions;
* the fused route (:func:`measure_fields`), which buckets edge weights against
  the whole threshold list once and evaluates every threshold in a single pass
  over compiled kernels. Results are bit-identical to the reference route.
"""

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from . import _kernels
from .stencil import canonical_edge_offsets, canonical_id_map
from .validation import MAX_LEVEL, check_image, check_radius, check_thresholds
from .network import weight_from_diff

VARIANTS = ("N", "W", "B")

_PATTERN_CACHE = {}


@dataclass
class MeasureField:
    """Degree and clustering of every vertex for one (variant, r, t).

    Arrays follow the canonical vertex order
    ``((y * width) + x) * channels + channel``.
    """

    variant: str
    radius: int
    threshold: float
    height: int
    width: int
    channels: int
    degrees: np.ndarray
    clusterings: np.ndarray


@dataclass(frozen=True)
class StatBlock:
    """Mean / standard deviation / energy / entropy of one distribution."""

    mean: float
    std: float
    energy: float
    entropy: float

    def as_array(self):
        return np.array([self.mean, self.std, self.energy, self.entropy])


def clustering_from_counts(triangles, degrees):
    """c(v) = 2 * triangles(v) / (k(v) * (k(v) - 1)), 0 wherever k < 2."""
    deg = degrees.astype(np.int64)
    tri = triangles.astype(np.int64)
    c = np.zeros(deg.shape, dtype=np.float64)
    ok = deg >= 2
    den = (deg[ok] * (deg[ok] - 1)).astype(np.float64)
    c[ok] = (2.0 * tri[ok]) / den
    return c


def degree_field(net):
    """Number of surviving edges incident to each vertex (reference route)."""
    n = net.n_vertices
    return (
        np.bincount(net.edges_a, minlength=n) + np.bincount(net.edges_b, minlength=n)
    ).astype(np.int64)


def triangle_field(net):
    """Edges among each vertex's neighbors, counted via the adjacency matrix."""
    n = net.n_vertices
    if net.n_edges == 0:
        return np.zeros(n, dtype=np.int64)
    data = np.ones(net.n_edges, dtype=np.int64)
    a = sparse.coo_matrix((data, (net.edges_a, net.edges_b)), shape=(n, n))
    a = (a + a.T).tocsr()
    # row sum of (A^2 ∘ A) counts each triangle at a vertex twice
    paths = (a @ a).multiply(a)
    tri2 = np.asarray(paths.sum(axis=1)).ravel()
    return (tri2 // 2).astype(np.int64)


def clustering_field(net):
    """Per-vertex clustering coefficients (reference route)."""
    return clustering_from_counts(triangle_field(net), degree_field(net))


def _distance_classes(dist):
    classes, inverse = np.unique(dist, return_inverse=True)
    return classes, inverse


def _bucket_lut(thresholds, dists, r):
    """Bucket (count of thresholds strictly below w) per intensity difference."""
    dp = np.arange(MAX_LEVEL + 1, dtype=np.float64)
    lut = np.empty((dists.size, MAX_LEVEL + 1), dtype=np.uint8)
    for i, d in enumerate(dists):
        w = weight_from_diff(dp, d, r, MAX_LEVEL)
        lut[i] = np.searchsorted(thresholds, w, side="left").astype(np.uint8)
    return lut


def edge_bucket_slabs(image, r, thresholds):
    """Padded per-offset slabs of bucketed edge weights.

    Returns ``(slabs, offs)`` where ``slabs[k, y+r, x+r]`` is the bucket of the
    canonical edge ``k`` based at pixel ``(y, x)`` (0 when the neighbor falls
    outside the image) and ``offs`` appends a within-channel flag to the
    canonical offset rows.
    """
    h, w, z = image.shape
    offs, dist = canonical_edge_offsets(r, z)
    classes, inv = _distance_classes(dist)
    lut = _bucket_lut(thresholds, classes, r)
    slabs = np.zeros((offs.shape[0], h + 2 * r, w + 2 * r), dtype=np.uint8)
    img = image.astype(np.int16)
    for k in range(offs.shape[0]):
        dy, dx, ca, cb = offs[k]
        y0, y1 = max(0, -dy), h - max(0, dy)
        x0, x1 = max(0, -dx), w - max(0, dx)
        if y0 >= y1 or x0 >= x1:
            continue
        dp = np.abs(
            img[y0:y1, x0:x1, ca] - img[y0 + dy : y1 + dy, x0 + dx : x1 + dx, cb]
        )
        slabs[k, y0 + r : y1 + r, x0 + r : x1 + r] = lut[inv[k]][dp]
    within = (offs[:, 2] == offs[:, 3]).astype(np.int64)
    offs5 = np.column_stack([offs, within])
    return slabs, offs5


def _directed_offsets(offs, z):
    """Per base channel, all directed (dy, dx, cb) neighbor offsets."""
    per_channel = [[] for _ in range(z)]
    for dy, dx, ca, cb in offs:
        per_channel[ca].append((dy, dx, cb))
        per_channel[cb].append((-dy, -dx, ca))
    return [np.asarray(v, dtype=np.int64).reshape(-1, 3) for v in per_channel]


def triangle_patterns(r, z):
    """Translation-invariant triangle templates for radius ``r`` and ``z`` layers.

    Each row is ``(k1, sy1, sx1, k2, sy2, sx2, k3, sy3, sx3, slot)``: the three
    canonical edge slabs forming a triangle based at a vertex of channel
    ``slot // 3``, with per-edge slab shifts, and ``slot % 3`` classifying the
    triangle (0 mixed-channel, 1 all within one channel, 2 spanning three
    distinct channels). Cached per (r, z).
    """
    key = (int(r), int(z))
    if key in _PATTERN_CACHE:
        return _PATTERN_CACHE[key]
    r, z = key
    offs, _ = canonical_edge_offsets(r, z)
    idmap = canonical_id_map(offs, r, z)
    directed = _directed_offsets(offs[:, :4] if offs.shape[1] > 4 else offs, z)

    def _edge_lookup(ay, ax, ac, by, bx, bc):
        # canonical slab id + base-pixel shift for edge (ay,ax,ac)-(by,bx,bc)
        k = idmap[by - ay + r, bx - ax + r, ac, bc]
        sy = np.where(k >= 0, ay, by)
        sx = np.where(k >= 0, ax, bx)
        k = np.where(k >= 0, k, idmap[ay - by + r, ax - bx + r, bc, ac])
        return k, sy, sx

    rows = []
    for c in range(z):
        d = directed[c]
        n = d.shape[0]
        i, j = np.triu_indices(n, k=1)
        dy1, dx1, cb1 = d[i, 0], d[i, 1], d[i, 2]
        dy2, dx2, cb2 = d[j, 0], d[j, 1], d[j, 2]
        ddy, ddx = dy2 - dy1, dx2 - dx1
        ok = ddy * ddy + ddx * ddx <= r * r
        ok &= ~((ddy == 0) & (ddx == 0) & (cb1 == cb2))
        dy1, dx1, cb1 = dy1[ok], dx1[ok], cb1[ok]
        dy2, dx2, cb2 = dy2[ok], dx2[ok], cb2[ok]
        zero = np.zeros(dy1.shape, dtype=np.int64)
        k1, sy1, sx1 = _edge_lookup(zero, zero, zero + c, dy1, dx1, cb1)
        k2, sy2, sx2 = _edge_lookup(zero, zero, zero + c, dy2, dx2, cb2)
        k3, sy3, sx3 = _edge_lookup(dy1, dx1, cb1, dy2, dx2, cb2)
        cls = np.zeros(dy1.shape, dtype=np.int64)
        cls[(cb1 == c) & (cb2 == c)] = 1
        cls[(cb1 != c) & (cb2 != c) & (cb1 != cb2)] = 2
        slot = c * 3 + cls
        rows.append(
            np.column_stack([k1, sy1, sx1, k2, sy2, sx2, k3, sy3, sx3, slot])
        )
    table = np.ascontiguousarray(np.concatenate(rows), dtype=np.int64)
    _PATTERN_CACHE[key] = table
    return table


def _suffix_counts(counts):
    """S[..., b] = sum of counts over buckets >= b."""
    return np.cumsum(counts[..., ::-1], axis=-1)[..., ::-1]


def fused_measure_grids(image, r, thresholds, variants=VARIANTS):
    """Degree and triangle grids for every threshold in one fused pass.

    Returns ``(deg, tri)`` dicts mapping each requested variant to an
    ``(m, z, h, w)`` int32 array indexed by threshold position.
    """
    image = check_image(image)
    thresholds = check_thresholds(thresholds)
    r = check_radius(r)
    h, w, z = image.shape
    m = thresholds.size
    nb = m + 1
    slabs, offs = edge_bucket_slabs(image, r, thresholds)

    dcounts = np.zeros((2, z, h + 2 * r, w + 2 * r, nb), dtype=np.int32)
    _kernels.degree_bucket_counts(slabs, offs, h, w, r, dcounts)
    dsuf = _suffix_counts(dcounts[:, :, r : r + h, r : r + w, :])
    # buckets > j survive threshold j; axis order -> (m, z, h, w)
    deg_b = np.moveaxis(dsuf[0, ..., 1:], -1, 0)
    deg_w = np.moveaxis(dsuf[1, ..., 1:], -1, 0)
    deg = {"N": deg_w + deg_b, "W": deg_w, "B": deg_b}

    patterns = triangle_patterns(r, z)
    if "N" not in variants:
        keep = np.zeros(patterns.shape[0], dtype=bool)
        if "W" in variants:
            keep |= patterns[:, 9] % 3 == 1
        if "B" in variants:
            keep |= patterns[:, 9] % 3 == 2
        patterns = patterns[keep]
    # flat-offset form: slab index of each edge at pixel (0, 0) + output base
    hp, wp = h + 2 * r, w + 2 * r
    pat = np.empty((patterns.shape[0], 4), dtype=np.int64)
    for e in range(3):
        k, sy, sx = patterns[:, 3 * e], patterns[:, 3 * e + 1], patterns[:, 3 * e + 2]
        pat[:, e] = k * (hp * wp) + (sy + r) * wp + (sx + r)
    pat[:, 3] = patterns[:, 9] * (h * w * nb)
    tcounts = np.zeros(3 * z * h * w * nb, dtype=np.int32)
    _kernels.triangle_bucket_counts(slabs.ravel(), pat, h, w, wp, nb, tcounts)
    tsuf = _suffix_counts(tcounts.reshape(3 * z, h, w, nb)).reshape(z, 3, h, w, nb)
    tri_all = np.moveaxis(tsuf[..., 1:], -1, 0)  # (m, z, 3, h, w)
    tri = {
        "N": tri_all.sum(axis=2, dtype=np.int32),
        "W": tri_all[:, :, 1],
        "B": tri_all[:, :, 2],
    }
    deg = {v: deg[v] for v in variants}
    tri = {v: tri[v] for v in variants}
    return deg, tri


def _flatten_grid(grid):
    # (z, h, w) -> canonical vertex order ((y*w + x)*z + c)
    return np.ascontiguousarray(np.moveaxis(grid, 0, -1)).reshape(-1)


def measure_fields(image, r, thresholds, variants=VARIANTS):
    """Fused per-vertex measures for each variant at every threshold.

    Returns a dict mapping variant -> list of :class:`MeasureField`, one per
    threshold in order.
    """
    image = check_image(image)
    ts = check_thresholds(thresholds)
    deg, tri = fused_measure_grids(image, r, ts, variants=variants)
    h, w, z = image.shape
    out = {}
    for v in variants:
        fields = []
        for j, t in enumerate(ts):
            d = _flatten_grid(deg[v][j]).astype(np.int64)
            c = clustering_from_counts(_flatten_grid(tri[v][j]), d)
            fields.append(
                MeasureField(
                    variant=v, radius=int(r), threshold=float(t),
                    height=h, width=w, channels=z, degrees=d, clusterings=c,
                )
            )
        out[v] = fields
    return out


def stats(values, kind, sigma_mode="normalized"):
    """Summarize a degree or clustering distribution with the four statistics.

    ``mean`` and ``std`` are taken over the raw per-vertex values (population
    std by default; ``sigma_mode="verbatim"`` skips the 1/|V| normalization).
    ``energy``/``entropy`` use the normalized occurrence histogram: one bin per
    integer for degrees, 256 uniform bins over [0, 1] for clustering. Entropy
    uses the natural logarithm with 0*ln(0) = 0.
    """
    values = np.asarray(values, dtype=np.float64).ravel()
    if values.size == 0:
        raise ValueError("cannot summarize an empty distribution")
    if sigma_mode not in ("normalized", "verbatim"):
        raise ValueError(f"unknown sigma_mode {sigma_mode!r}")
    mu = float(values.mean())
    dev2 = float(((values - mu) ** 2).sum())
    std = np.sqrt(dev2 / values.size) if sigma_mode == "normalized" else np.sqrt(dev2)

    if kind == "degree":
        ints = np.rint(values).astype(np.int64)
        if not np.array_equal(ints, values):
            raise ValueError("degree values must be integers")
        counts = np.bincount(ints)
    elif kind == "clustering":
        if values.min() < 0.0 or values.max() > 1.0:
            raise ValueError("clustering values must lie in [0, 1]")
        bins = np.minimum(np.floor(values * 256.0).astype(np.int64), 255)
        counts = np.bincount(bins, minlength=256)
    else:
        raise ValueError(f"unknown distribution kind {kind!r}")
    p = counts[counts > 0] / values.size
    energy = float((p * p).sum())
    entropy = float(-(p * np.log(p)).sum() + 0.0)  # avoid -0.0 for point masses
    return StatBlock(mean=mu, std=float(std), energy=energy, entropy=entropy)


def render_measure_map(field, measure="degree"):
    """Convert a 3-layer measure field into an RGB image.

    The three per-layer values of each pixel become the RGB intensities after
    a single global min/max normalization to [0, 255] (layers are scaled
    jointly so inter-layer ratios survive). A constant field maps to black.
    """
    if field.channels != 3:
        raise ValueError("measure maps require a 3-channel field")
    if measure == "degree":
        vals = field.degrees
    elif measure == "clustering":
        vals = field.clusterings
    else:
        raise ValueError(f"unknown measure {measure!r}")
    grid = np.asarray(vals, dtype=np.float64).reshape(
        field.height, field.width, field.channels
    )
    vmin = grid.min()
    vmax = grid.max()
    if vmax > vmin:
        scaled = (grid - vmin) * (255.0 / (vmax - vmin))
    else:
        scaled = np.zeros_like(grid)
    return np.rint(scaled).astype(np.uint8)


def export_field_csv(field, path):
    """Write a field as CSV rows of (vertex_index, degree, clustering)."""
    n = field.degrees.size
    with open(path, "w", newline="") as fh:
        fh.write("vertex_index,degree,clustering\n")
        for i in range(n):
            fh.write(f"{i},{int(field.degrees[i])},{field.clusterings[i]:.17g}\n")
