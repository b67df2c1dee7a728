"""Compiled kernels for the fused multi-threshold measure evaluation.

Edge weights are pre-bucketed against the sorted threshold list: an edge's
bucket is the number of thresholds strictly below its weight, so the edge
survives exactly the first ``bucket`` thresholds. Bucket 0 doubles as the
sentinel for nonexistent edges (out-of-image neighbors in the padded slabs),
because such edges survive no threshold either way; bucket-0 counts are
accumulated but never read. Per-vertex counts land in per-bucket histograms
and suffix sums then yield every threshold at once.
"""

import numba
import numpy as np


@numba.njit(cache=True)
def degree_bucket_counts(slabs, offs, h, w, r, out):
    # slabs: (K, h+2r, w+2r) uint8 bucket of each canonical edge offset
    # offs:  (K, 5) int64 rows (dy, dx, ca, cb, within01)
    # out:   (2, z, h+2r, w+2r, nbuckets) int32; class 0 = between, 1 = within.
    #        Border/sentinel writes land in padding or bucket 0; both ignored.
    for k in range(offs.shape[0]):
        dy = offs[k, 0]
        dx = offs[k, 1]
        ca = offs[k, 2]
        cb = offs[k, 3]
        cls = offs[k, 4]
        for y in range(h):
            for x in range(w):
                b = slabs[k, y + r, x + r]
                out[cls, ca, y + r, x + r, b] += 1
                out[cls, cb, y + r + dy, x + r + dx, b] += 1


@numba.njit(cache=True)
def triangle_bucket_counts(flat, pat, h, w, wp, nb, out):
    # flat: raveled padded slabs; pat: (P, 4) int64 rows (o1, o2, o3, obase)
    #   o1..o3 are flat offsets of the three triangle edges at pixel (0, 0),
    #   obase = slot * h * w * nb locates the output histogram plane.
    # out: raveled (3*z, h, w, nbuckets) int32.
    # Row-major sweep: pass A takes the min edge bucket of a whole row
    # (explicit views so the loop vectorizes), pass B scatters it into the
    # per-vertex histograms, which stay cache-resident for the row.
    row_min = np.empty(w, dtype=np.uint8)
    for y in range(h):
        yoff = y * wp
        orow = y * (w * nb)
        for p in range(pat.shape[0]):
            o1 = pat[p, 0] + yoff
            o2 = pat[p, 1] + yoff
            o3 = pat[p, 2] + yoff
            e1 = flat[o1 : o1 + w]
            e2 = flat[o2 : o2 + w]
            e3 = flat[o3 : o3 + w]
            for x in range(w):
                row_min[x] = min(e1[x], min(e2[x], e3[x]))
            ob = pat[p, 3] + orow
            orow_view = out[ob : ob + w * nb]
            for x in range(w):
                orow_view[x * nb + row_min[x]] += 1


def warmup():
    """Trigger JIT compilation (results are cached on disk afterwards)."""
    slabs = np.zeros((1, 3, 3), dtype=np.uint8)
    offs = np.zeros((1, 5), dtype=np.int64)
    out_d = np.zeros((2, 1, 3, 3, 2), dtype=np.int32)
    degree_bucket_counts(slabs, offs, 1, 1, 1, out_d)
    pat = np.zeros((1, 4), dtype=np.int64)
    out_t = np.zeros(3 * 1 * 1 * 2, dtype=np.int32)
    triangle_bucket_counts(slabs.ravel(), pat, 1, 1, 3, 2, out_t)
