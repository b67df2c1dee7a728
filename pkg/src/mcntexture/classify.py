"""LDA with diagonal shrinkage, leave-one-out evaluation, and the color baseline."""

import json
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg
from sklearn.base import BaseEstimator, ClassifierMixin

from .validation import check_image


def color_statistics(image):
    """15-dim first-order color baseline: per channel, channel-major,
    (mean, variance, intensity-histogram entropy, third and fourth central
    moments). No spatial interaction is involved."""
    image = check_image(image, channels=3)
    out = []
    for c in range(3):
        vals = image[:, :, c].astype(np.float64).ravel()
        mu = vals.mean()
        dev = vals - mu
        var = float((dev**2).mean())
        counts = np.bincount(image[:, :, c].ravel(), minlength=256)
        p = counts[counts > 0] / vals.size
        entropy = float(-(p * np.log(p)).sum() + 0.0)
        m3 = float((dev**3).mean())
        m4 = float((dev**4).mean())
        out.extend([float(mu), var, entropy, m3, m4])
    return np.asarray(out, dtype=np.float64)


def _check_xy(features, labels):
    x = np.asarray(features, dtype=np.float64)
    y = np.asarray(labels)
    if x.ndim != 2:
        raise ValueError(f"features must be 2-D, got shape {x.shape}")
    if y.shape != (x.shape[0],):
        raise ValueError("labels must be 1-D with one entry per row")
    if x.shape[0] < 2:
        raise ValueError("need at least 2 samples")
    return x, y


class ShrinkageLDA(BaseEstimator, ClassifierMixin):
    """Gaussian equal-covariance discriminant with diagonal shrinkage.

    The pooled within-class covariance is regularized as
    ``cov_l = (1 - l) * cov_pooled + l * diag(cov_pooled)`` and factorized
    symmetrically (Cholesky); priors are the training class frequencies.
    With ``shrinkage=0`` a singular pooled covariance raises instead of
    silently falling back to a pseudo-inverse.
    """

    def __init__(self, shrinkage=1e-4):
        self.shrinkage = shrinkage

    def fit(self, X, y):
        lam = float(self.shrinkage)
        if not 0.0 <= lam <= 1.0:
            raise ValueError(f"shrinkage must lie in [0, 1], got {lam}")
        x, yy = _check_xy(X, y)
        classes, yidx = np.unique(yy, return_inverse=True)
        if classes.size < 2:
            raise ValueError("need at least 2 classes")
        n, d = x.shape
        counts = np.bincount(yidx, minlength=classes.size)
        means = np.zeros((classes.size, d))
        scatter = np.zeros((d, d))
        for c in range(classes.size):
            xc = x[yidx == c]
            means[c] = xc.mean(axis=0)
            dev = xc - means[c]
            scatter += dev.T @ dev
        dof = max(n - classes.size, 1)
        cov = scatter / dof
        self.classes_ = classes
        self.means_ = means
        self.priors_ = counts / n
        self.covariance_ = cov
        self._factorize(cov, lam)
        return self

    def _factorize(self, cov, lam):
        reg = (1.0 - lam) * cov + lam * np.diag(np.diag(cov))
        try:
            self._chol = linalg.cho_factor(reg, lower=True)
        except linalg.LinAlgError as exc:
            raise ValueError(
                "pooled covariance is singular; refit with shrinkage > 0"
            ) from exc
        # discriminant: x @ coef.T + intercept, coef_c = cov^-1 mu_c
        self.coef_ = linalg.cho_solve(self._chol, self.means_.T).T
        self.intercept_ = (
            -0.5 * np.einsum("cd,cd->c", self.means_, self.coef_)
            + np.log(self.priors_)
        )
        return self

    def decision_function(self, X):
        x = np.asarray(X, dtype=np.float64)
        if x.ndim == 1:
            x = x[None, :]
        return x @ self.coef_.T + self.intercept_

    def predict(self, X):
        scores = self.decision_function(X)
        return self.classes_[np.argmax(scores, axis=1)]


def lda_fit(features, labels, shrinkage=1e-4):
    """Convenience wrapper returning a fitted :class:`ShrinkageLDA`."""
    return ShrinkageLDA(shrinkage=shrinkage).fit(features, labels)


@dataclass
class EvalReport:
    """Leave-one-out evaluation result."""

    accuracy: float
    n_samples: int
    classes: list
    per_class_accuracy: list
    confusion: np.ndarray = field(repr=False)
    config: dict = field(default_factory=dict)

    def to_dict(self):
        def _plain(c):
            try:
                return int(c)
            except (TypeError, ValueError):
                return str(c)

        return {
            "accuracy": self.accuracy,
            "n_samples": self.n_samples,
            "classes": [_plain(c) for c in self.classes],
            "per_class_accuracy": self.per_class_accuracy,
            "confusion": self.confusion.tolist(),
            "config": self.config,
        }

    def to_json(self, indent=2):
        return json.dumps(self.to_dict(), indent=indent, sort_keys=True)

    def to_text(self):
        lines = [
            f"samples: {self.n_samples}",
            f"classes: {len(self.classes)}",
            f"accuracy: {100.0 * self.accuracy:.2f}%",
            "",
            "per-class accuracy:",
        ]
        for c, acc in zip(self.classes, self.per_class_accuracy):
            lines.append(f"  class {c}: {100.0 * acc:.2f}%")
        if self.config:
            lines.append("")
            lines.append("config: " + json.dumps(self.config, sort_keys=True))
        return "\n".join(lines)


def loo_evaluate(features, labels, shrinkage=1e-4, config=None):
    """Leave-one-out cross-validation of the shrinkage LDA.

    Every sample is predicted by a model fitted on all the others. Class
    sums and the total scatter are downdated per fold instead of recomputed,
    which matches a from-scratch refit exactly (verified in tests).
    """
    x, y = _check_xy(features, labels)
    classes, yidx = np.unique(y, return_inverse=True)
    n, d = x.shape
    counts = np.bincount(yidx, minlength=classes.size)
    if counts.min() < 2:
        short = classes[np.argmin(counts)]
        raise ValueError(
            f"leave-one-out needs >= 2 samples per class (class {short} has "
            f"{counts.min()})"
        )
    lam = float(shrinkage)
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"shrinkage must lie in [0, 1], got {lam}")

    class_sums = np.zeros((classes.size, d))
    np.add.at(class_sums, yidx, x)
    total_sq = x.T @ x  # sum of x x^T over all samples
    mean_outer = np.zeros((d, d))  # sum over classes of n_c mu_c mu_c^T
    for c in range(classes.size):
        mu = class_sums[c] / counts[c]
        mean_outer += counts[c] * np.outer(mu, mu)

    model = ShrinkageLDA(shrinkage=lam)
    confusion = np.zeros((classes.size, classes.size), dtype=np.int64)
    for i in range(n):
        c = yidx[i]
        xi = x[i]
        cnt = counts.copy()
        cnt[c] -= 1
        sums = class_sums.copy()
        sums[c] -= xi
        mu_c_old = class_sums[c] / counts[c]
        mu_c_new = sums[c] / cnt[c]
        m_outer = (
            mean_outer
            - counts[c] * np.outer(mu_c_old, mu_c_old)
            + cnt[c] * np.outer(mu_c_new, mu_c_new)
        )
        scatter = total_sq - np.outer(xi, xi) - m_outer
        dof = max((n - 1) - classes.size, 1)
        cov = scatter / dof

        model.classes_ = classes
        model.means_ = sums / cnt[:, None]
        model.priors_ = cnt / (n - 1)
        model.covariance_ = cov
        model._factorize(cov, lam)
        pred = model.predict(xi[None, :])[0]
        confusion[c, np.searchsorted(classes, pred)] += 1

    correct = np.diag(confusion)
    per_class = (correct / counts).tolist()
    return EvalReport(
        accuracy=float(correct.sum() / n),
        n_samples=int(n),
        classes=classes.tolist(),
        per_class_accuracy=per_class,
        confusion=confusion,
        config=dict(config or {}),
    )
