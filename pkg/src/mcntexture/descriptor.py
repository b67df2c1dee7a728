"""Dynamic-evolution feature extraction and the fit/transform estimator.

For each radius and each threshold of the plan, the degree and clustering
distributions of the requested network variants are summarized into
4-statistic blocks and concatenated:

    variants (configured order) > radii ascending > thresholds ascending >
    (deg mean, deg std, deg energy, deg entropy,
     clu mean, clu std, clu energy, clu entropy)

The within-channel variant W drops its four clustering statistics at r = 1
(spatial distance 1 cannot form same-channel triangles, so they are
identically zero); the layout records the omission instead of zero-filling.
"""

from dataclasses import dataclass, field

import numpy as np
from joblib import Parallel, delayed
from sklearn.base import BaseEstimator, TransformerMixin

from . import measures
from .thresholds import ThresholdPlan, estimate_plan, threshold_set
from .validation import (
    check_image,
    check_image_list,
    check_radii,
    check_thresholds,
    check_variants,
)

STAT_NAMES = ("mean", "std", "energy", "entropy")
MEASURE_NAMES = ("deg", "clu")


@dataclass(frozen=True)
class ExtractionConfig:
    """Everything that determines a feature vector besides the image."""

    radii: tuple = (1, 2, 3, 4, 5, 6)
    m: int = 10
    variants: tuple = ("N", "W", "B")
    sigma_mode: str = "normalized"
    histogram_radius: int = 1
    rule: str = "quantile"
    quantile: float = 0.9
    t_limits: tuple = None  # explicit (t1, t_m) instead of corpus estimation

    def __post_init__(self):
        object.__setattr__(self, "radii", check_radii(self.radii))
        object.__setattr__(self, "variants", check_variants(self.variants))
        if self.m < 2:
            raise ValueError(f"threshold count m must be >= 2, got {self.m}")
        if self.sigma_mode not in ("normalized", "verbatim"):
            raise ValueError(f"unknown sigma_mode {self.sigma_mode!r}")
        if self.rule not in ("quantile", "mean-degree"):
            raise ValueError(f"unknown threshold rule {self.rule!r}")

    def to_dict(self):
        d = {
            "radii": list(self.radii),
            "m": self.m,
            "variants": list(self.variants),
            "sigma_mode": self.sigma_mode,
            "histogram_radius": self.histogram_radius,
            "rule": self.rule,
            "quantile": self.quantile,
        }
        if self.t_limits is not None:
            d["t_limits"] = list(self.t_limits)
        return d


@dataclass(frozen=True)
class FeatureLayout:
    """Maps every feature position to (variant, radius, t_index, measure, stat)."""

    entries: tuple = field(repr=False)

    @property
    def size(self):
        return len(self.entries)

    def names(self):
        return [
            f"{v}_r{r}_t{t:02d}_{meas}_{stat}" for v, r, t, meas, stat in self.entries
        ]


def feature_layout(config):
    """The feature positions implied by a configuration."""
    entries = []
    for v in config.variants:
        for r in config.radii:
            for t in range(config.m):
                for meas in MEASURE_NAMES:
                    if meas == "clu" and v == "W" and r == 1:
                        continue  # identically zero, omitted by design
                    for stat in STAT_NAMES:
                        entries.append((v, r, t, meas, stat))
    return FeatureLayout(entries=tuple(entries))


def feature_length(config):
    n = 0
    for v in config.variants:
        n += 8 * len(config.radii) * config.m
        if v == "W" and 1 in config.radii:
            n -= 4 * config.m
    return n


def plan_for(images, config):
    """Threshold plan for a training corpus under ``config``."""
    if config.t_limits is not None:
        t1, t_m = config.t_limits
        return threshold_set(t1, t_m, config.m)
    plan, _ = estimate_plan(
        images,
        config.m,
        rule=config.rule,
        q=config.quantile,
        source_radius=config.histogram_radius,
    )
    return plan


def extract(image, config, plan):
    """Feature vector of one image under a fixed threshold plan.

    Deterministic: identical inputs produce bit-identical vectors.
    """
    if not isinstance(config, ExtractionConfig):
        raise TypeError("config must be an ExtractionConfig")
    if isinstance(plan, ThresholdPlan):
        ts = np.asarray(plan.thresholds, dtype=np.float64)
        if plan.m != config.m:
            raise ValueError(f"plan has m={plan.m}, config expects m={config.m}")
    else:
        ts = check_thresholds(plan)
        if ts.size != config.m:
            raise ValueError(f"plan has m={ts.size}, config expects m={config.m}")
    needs_color = any(v in ("W", "B") for v in config.variants)
    image = check_image(image, channels=3 if needs_color else None)

    blocks = {}
    for r in config.radii:
        deg, tri = measures.fused_measure_grids(image, r, ts, variants=config.variants)
        for v in config.variants:
            for j in range(config.m):
                d = deg[v][j].reshape(-1).astype(np.int64)
                out = list(
                    measures.stats(d, "degree", sigma_mode=config.sigma_mode).as_array()
                )
                if not (v == "W" and r == 1):
                    c = measures.clustering_from_counts(tri[v][j].reshape(-1), d)
                    out.extend(
                        measures.stats(
                            c, "clustering", sigma_mode=config.sigma_mode
                        ).as_array()
                    )
                blocks[(v, r, j)] = out

    vec = []
    for v in config.variants:
        for r in config.radii:
            for j in range(config.m):
                vec.extend(blocks[(v, r, j)])
    return np.asarray(vec, dtype=np.float64)


def extract_batch(images, config, plan=None, train_indices=None, n_jobs=1):
    """Feature matrix for a corpus, rows in corpus order.

    The threshold plan is computed once, from ``train_indices`` when given
    (otherwise the whole corpus), and reused for every image.
    """
    images = check_image_list(images)
    if plan is None:
        train = images if train_indices is None else [images[i] for i in train_indices]
        if not train:
            raise ValueError("train_indices selected an empty training corpus")
        plan = plan_for(train, config)
    if n_jobs == 1:
        rows = [extract(im, config, plan) for im in images]
    else:
        rows = Parallel(n_jobs=n_jobs)(
            delayed(extract)(im, config, plan) for im in images
        )
    return np.vstack(rows), plan


class MCNDescriptor(BaseEstimator, TransformerMixin):
    """Multilayer-network color-texture features as a sklearn transformer.

    ``fit`` estimates the adaptive threshold plan from the training corpus'
    edge-weight distribution; ``transform`` extracts one feature row per
    image. ``X`` is a sequence of (H, W, 3) uint8 arrays (a single image may
    be passed bare).

    Parameters
    ----------
    radii : tuple of int
        Neighborhood radii swept during the dynamic evolution.
    n_thresholds : int
        Number of equidistant thresholds between the estimated limits.
    variants : tuple of {"N", "W", "B"}
        Which networks to characterize (whole, within-channel,
        between-channel).
    rule : {"quantile", "mean-degree"}
        Upper-limit estimation rule.
    quantile : float
        Mass fraction for the quantile rule.
    sigma_mode : {"normalized", "verbatim"}
        Population standard deviation vs. the unnormalized variant.
    histogram_radius : int
        Radius of the networks pooled into the estimation histogram.
    t_limits : tuple of (float, float), optional
        Explicit (t1, t_m) bypassing corpus estimation.
    n_jobs : int
        Image-level parallelism for ``transform``.
    """

    def __init__(
        self,
        radii=(1, 2, 3, 4, 5, 6),
        n_thresholds=10,
        variants=("N", "W", "B"),
        rule="quantile",
        quantile=0.9,
        sigma_mode="normalized",
        histogram_radius=1,
        t_limits=None,
        n_jobs=1,
    ):
        self.radii = radii
        self.n_thresholds = n_thresholds
        self.variants = variants
        self.rule = rule
        self.quantile = quantile
        self.sigma_mode = sigma_mode
        self.histogram_radius = histogram_radius
        self.t_limits = t_limits
        self.n_jobs = n_jobs

    def _config(self):
        return ExtractionConfig(
            radii=tuple(self.radii),
            m=int(self.n_thresholds),
            variants=tuple(self.variants),
            sigma_mode=self.sigma_mode,
            histogram_radius=self.histogram_radius,
            rule=self.rule,
            quantile=self.quantile,
            t_limits=self.t_limits,
        )

    def fit(self, X, y=None):
        config = self._config()
        images = check_image_list(X)
        self.plan_ = plan_for(images, config)
        self.layout_ = feature_layout(config)
        self.n_features_out_ = self.layout_.size
        return self

    def transform(self, X):
        if not hasattr(self, "plan_"):
            raise RuntimeError("MCNDescriptor must be fitted before transform")
        config = self._config()
        images = check_image_list(X)
        mat, _ = extract_batch(images, config, plan=self.plan_, n_jobs=self.n_jobs)
        return mat

    def get_feature_names_out(self, input_features=None):
        if not hasattr(self, "layout_"):
            raise RuntimeError("MCNDescriptor must be fitted first")
        return np.asarray(self.layout_.names(), dtype=object)


def write_features_csv(path, matrix, ids, labels, layout, config_echo=None):
    """Feature matrix CSV: comment line with the effective config, header,
    then one row per image (17 significant digits)."""
    import json

    names = layout.names()
    if matrix.shape[1] != len(names):
        raise ValueError("feature matrix width does not match the layout")
    with open(path, "w", newline="") as fh:
        if config_echo is not None:
            fh.write(f"# config: {json.dumps(config_echo, sort_keys=True)}\n")
        fh.write("image_id,label," + ",".join(names) + "\n")
        for i in range(matrix.shape[0]):
            row = ",".join(f"{v:.17g}" for v in matrix[i])
            fh.write(f"{ids[i]},{labels[i]},{row}\n")


def load_features_csv(path):
    """Read back a feature CSV; returns (ids, labels, matrix, names, config)."""
    import json

    config = None
    with open(path) as fh:
        first = fh.readline()
        if first.startswith("# config:"):
            config = json.loads(first[len("# config:") :])
            header = fh.readline()
        else:
            header = first
        names = header.rstrip("\n").split(",")[2:]
        ids, labels, rows = [], [], []
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            parts = line.split(",")
            ids.append(parts[0])
            labels.append(int(parts[1]))
            rows.append([float(v) for v in parts[2:]])
    matrix = np.asarray(rows, dtype=np.float64).reshape(len(rows), len(names))
    return ids, np.asarray(labels, dtype=np.int64), matrix, names, config
