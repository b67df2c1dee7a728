"""Input validation helpers shared by the estimators and the functional API."""

import numpy as np

MAX_LEVEL = 255


def check_image(image, channels=None):
    """Validate an intensity grid and return it as a C-contiguous uint8 array.

    Accepts ``(H, W)`` (promoted to one channel) or ``(H, W, Z)`` arrays of
    integers in ``[0, 255]``.

    Parameters
    ----------
    image : array-like
        Pixel intensities.
    channels : int, optional
        Required channel count (e.g. 3 for RGB-only operations).

    Returns
    -------
    ndarray of uint8, shape (H, W, Z)
    """
    arr = np.asarray(image)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ValueError(f"image must be 2-D or 3-D, got shape {arr.shape}")
    h, w, z = arr.shape
    if h < 1 or w < 1 or z < 1:
        raise ValueError(f"image dimensions must be >= 1, got shape {arr.shape}")
    if channels is not None and z != channels:
        raise ValueError(f"expected a {channels}-channel image, got {z} channels")
    if not np.issubdtype(arr.dtype, np.integer):
        if not np.all(arr == np.floor(arr)):
            raise ValueError("image intensities must be integers")
    if arr.min() < 0 or arr.max() > MAX_LEVEL:
        raise ValueError(f"intensities must lie in [0, {MAX_LEVEL}]")
    return np.ascontiguousarray(arr, dtype=np.uint8)


def check_image_list(images, channels=None):
    """Validate a non-empty corpus of images with a uniform channel count."""
    if isinstance(images, np.ndarray) and images.ndim in (2, 3):
        images = [images]
    images = [check_image(im, channels=channels) for im in images]
    if not images:
        raise ValueError("corpus must contain at least one image")
    zs = {im.shape[2] for im in images}
    if len(zs) > 1:
        raise ValueError(f"corpus mixes channel counts: {sorted(zs)}")
    return images


def check_radius(r):
    r = int(r)
    if r < 1:
        raise ValueError(f"radius must be an integer >= 1, got {r}")
    return r


def check_radii(radii):
    """Validate an ordered radius set: non-empty, strictly increasing, min >= 1."""
    radii = tuple(int(r) for r in radii)
    if not radii:
        raise ValueError("radius set must be non-empty")
    if any(r < 1 for r in radii):
        raise ValueError(f"radii must be >= 1, got {radii}")
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValueError(f"radii must be strictly increasing, got {radii}")
    return radii


def check_variants(variants):
    """Validate a non-empty ordered subset of the network variants N, W, B."""
    if isinstance(variants, str):
        variants = tuple(variants)
    variants = tuple(str(v).upper() for v in variants)
    if not variants:
        raise ValueError("variant set must be non-empty")
    bad = [v for v in variants if v not in ("N", "W", "B")]
    if bad:
        raise ValueError(f"unknown network variants: {bad} (expected N, W or B)")
    if len(set(variants)) != len(variants):
        raise ValueError(f"duplicate variants in {variants}")
    return variants


def check_threshold(t):
    t = float(t)
    if not 0.0 <= t <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {t}")
    return t


def check_thresholds(thresholds):
    """Validate an ascending threshold sequence in [0, 1]."""
    ts = np.asarray(thresholds, dtype=np.float64).ravel()
    if ts.size == 0:
        raise ValueError("threshold list must be non-empty")
    if ts.min() < 0.0 or ts.max() > 1.0:
        raise ValueError("thresholds must lie in [0, 1]")
    if np.any(np.diff(ts) < 0):
        raise ValueError("thresholds must be sorted ascending")
    if ts.size > 200:
        raise ValueError("at most 200 thresholds are supported per plan")
    return ts
