"""Anomaly detectors and binary evaluation.

Supervised models (logistic regression, decision tree) learn from labeled
rows; unsupervised models (k-means distance, isolation forest) produce scores
and get their decision threshold from a contamination quantile frozen at fit
time. Two token-statistics detectors (out-of-vocabulary fraction, rarity)
work directly on documents without a feature matrix. Everything here is
implemented with numpy; no external learning library is involved.
"""

from __future__ import annotations

import json
import math
import warnings
from collections import Counter

import numpy as np
from scipy import sparse

from .features import FeatureMatrix

SUPERVISED_KINDS = ("lr", "dt")
UNSUPERVISED_KINDS = ("kmeans", "iforest")


def _as_matrix(X):
    if isinstance(X, FeatureMatrix):
        return X.matrix
    return X


def _as_dense(X) -> np.ndarray:
    M = _as_matrix(X)
    if sparse.issparse(M):
        return np.asarray(M.todense(), dtype=np.float64)
    return np.asarray(M, dtype=np.float64)


def _as_labels(y) -> np.ndarray:
    return np.asarray(y, dtype=bool)


# ---------------------------------------------------------------------------
# evaluation


class EvalReport:
    """Confusion counts plus derived metrics for one evaluation run."""

    def __init__(self, tp: int, fp: int, fn: int, tn: int,
                 auc_roc: float | None = None,
                 wall_clock_ms: dict | None = None):
        self.tp, self.fp, self.fn, self.tn = tp, fp, fn, tn
        self.auc_roc = auc_roc
        self.wall_clock_ms = dict(wall_clock_ms or {})

    @property
    def accuracy(self) -> float:
        n = self.tp + self.fp + self.fn + self.tn
        return (self.tp + self.tn) / n if n else 0.0

    @property
    def precision(self) -> float:
        d = self.tp + self.fp
        return self.tp / d if d else 0.0

    @property
    def recall(self) -> float:
        d = self.tp + self.fn
        return self.tp / d if d else 0.0

    @property
    def f1_binary(self) -> float:
        """Binary F1 from the confusion counts alone.

        Zero when there are no predicted positives or no actual positives,
        rather than undefined.
        """
        if self.tp + self.fp == 0 or self.tp + self.fn == 0:
            return 0.0
        p, r = self.precision, self.recall
        if p + r == 0.0:
            return 0.0
        return 2.0 * p * r / (p + r)

    def to_dict(self) -> dict:
        return {
            "tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn,
            "accuracy": self.accuracy,
            "precision": self.precision,
            "recall": self.recall,
            "f1_binary": self.f1_binary,
            "auc_roc": self.auc_roc,
            "wall_clock_ms": self.wall_clock_ms,
        }

    def save_json(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            json.dump(self.to_dict(), f, ensure_ascii=False, indent=2)
            f.write("\n")

    CSV_HEADER = "tp,fp,fn,tn,accuracy,precision,recall,f1_binary,auc_roc"

    def csv_row(self) -> str:
        auc = "" if self.auc_roc is None else repr(self.auc_roc)
        return (f"{self.tp},{self.fp},{self.fn},{self.tn},"
                f"{self.accuracy!r},{self.precision!r},{self.recall!r},"
                f"{self.f1_binary!r},{auc}")

    def save_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as f:
            f.write(self.CSV_HEADER + "\n")
            f.write(self.csv_row() + "\n")

    def __repr__(self) -> str:
        auc = "none" if self.auc_roc is None else f"{self.auc_roc:.4f}"
        return (f"EvalReport(tp={self.tp} fp={self.fp} fn={self.fn} "
                f"tn={self.tn} acc={self.accuracy:.4f} "
                f"f1={self.f1_binary:.4f} auc={auc})")


def _tie_average_ranks(values: np.ndarray) -> np.ndarray:
    """1-based ranks with ties sharing their average rank."""
    order = np.argsort(values, kind="mergesort")
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    n = len(values)
    sorted_vals = values[order]
    while i < n:
        j = i
        while j + 1 < n and sorted_vals[j + 1] == sorted_vals[i]:
            j += 1
        avg = 0.5 * (i + j) + 1.0
        ranks[order[i:j + 1]] = avg
        i = j + 1
    return ranks


def auc_roc(scores, truth) -> float | None:
    """Area under the ROC curve via the rank-sum statistic.

    Ties get average ranks, so exchanging tied scores never changes the
    result. Returns None when truth has only one class.
    """
    truth = _as_labels(truth)
    scores = np.asarray(scores, dtype=np.float64)
    n1 = int(truth.sum())
    n0 = len(truth) - n1
    if n1 == 0 or n0 == 0:
        return None
    ranks = _tie_average_ranks(scores)
    return float((ranks[truth].sum() - n1 * (n1 + 1) / 2.0) / (n1 * n0))


def evaluate(predictions, truth, scores=None,
             wall_clock_ms: dict | None = None) -> EvalReport:
    """Confusion counts, accuracy and binary F1; AUC when scores are given."""
    pred = _as_labels(predictions)
    truth = _as_labels(truth)
    if len(pred) != len(truth):
        raise ValueError("predictions and truth differ in length")
    if len(pred) == 0:
        raise ValueError("cannot evaluate zero rows")
    tp = int(np.sum(pred & truth))
    fp = int(np.sum(pred & ~truth))
    fn = int(np.sum(~pred & truth))
    tn = int(np.sum(~pred & ~truth))
    auc = auc_roc(scores, truth) if scores is not None else None
    return EvalReport(tp, fp, fn, tn, auc_roc=auc, wall_clock_ms=wall_clock_ms)


def scores_to_labels(scores, contamination: float = 0.03) -> np.ndarray:
    """Flag the top ``ceil(contamination * n)`` scores as anomalies.

    Ties at the cut are broken by row order (earlier rows win), so the
    result is deterministic.
    """
    if not 0.0 <= contamination <= 1.0:
        raise ValueError("contamination must be in [0, 1]")
    scores = np.asarray(scores, dtype=np.float64)
    n = len(scores)
    out = np.zeros(n, dtype=bool)
    if n == 0 or contamination == 0.0:
        return out
    k = min(n, math.ceil(contamination * n))
    order = np.argsort(-scores, kind="mergesort")
    out[order[:k]] = True
    return out


# ---------------------------------------------------------------------------
# logistic regression (full-batch gradient descent)


def logistic_loss(w: np.ndarray, b: float, X, y: np.ndarray,
                  l2: float) -> float:
    """Mean cross-entropy plus (l2 / 2) * ||w||^2, bias unregularized."""
    M = _as_matrix(X)
    z = np.asarray(M @ w).ravel() + b
    yf = y.astype(np.float64)
    per_row = np.logaddexp(0.0, z) - yf * z
    return float(per_row.mean() + 0.5 * l2 * np.dot(w, w))


def logistic_gradient(w: np.ndarray, b: float, X, y: np.ndarray, l2: float):
    """Exact gradient of :func:`logistic_loss` in (w, b)."""
    M = _as_matrix(X)
    z = np.asarray(M @ w).ravel() + b
    p = 1.0 / (1.0 + np.exp(-z))
    residual = (p - y.astype(np.float64)) / len(y)
    gw = np.asarray(M.T @ residual).ravel() + l2 * w
    gb = float(residual.sum())
    return gw, gb


class LogisticRegressionDetector:
    """Binary logistic regression trained by full-batch gradient descent.

    Weights start at zero, the step size starts at 0.1 and halves within an
    epoch whenever a step would increase the loss, so the recorded loss
    history is monotonically non-increasing. Training stops when the
    improvement drops below ``tol`` or after ``max_epochs``.
    """

    kind = "lr"

    def __init__(self, learning_rate: float = 0.1, l2: float = 1e-4,
                 tol: float = 1e-6, max_epochs: int = 1000):
        self.learning_rate = learning_rate
        self.l2 = l2
        self.tol = tol
        self.max_epochs = max_epochs
        self.weights: np.ndarray | None = None
        self.bias = 0.0
        self.loss_history: list[float] = []

    def fit(self, X, y, seed: int = 0):
        M = _as_matrix(X)
        y = _as_labels(y)
        if M.shape[0] != len(y):
            raise ValueError("X and y differ in length")
        if y.all() or not y.any():
            raise ValueError("training needs both classes present")
        w = np.zeros(M.shape[1], dtype=np.float64)
        b = 0.0
        loss = logistic_loss(w, b, M, y, self.l2)
        self.loss_history = [loss]
        for _ in range(self.max_epochs):
            gw, gb = logistic_gradient(w, b, M, y, self.l2)
            step = self.learning_rate
            while True:
                w_new = w - step * gw
                b_new = b - step * gb
                new_loss = logistic_loss(w_new, b_new, M, y, self.l2)
                if new_loss <= loss or step < 1e-12:
                    break
                step *= 0.5
            if new_loss > loss:
                break
            improvement = loss - new_loss
            w, b, loss = w_new, b_new, new_loss
            self.loss_history.append(loss)
            if improvement < self.tol:
                break
        self.weights = w
        self.bias = b
        return self

    def score(self, X) -> np.ndarray:
        """Anomaly probability per row."""
        M = _as_matrix(X)
        z = np.asarray(M @ self.weights).ravel() + self.bias
        return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))

    def predict(self, X) -> np.ndarray:
        return self.score(X) >= 0.5

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "learning_rate": self.learning_rate,
            "l2": self.l2,
            "tol": self.tol,
            "max_epochs": self.max_epochs,
            "weights": [float(v) for v in self.weights],
            "bias": float(self.bias),
        }

    @classmethod
    def from_dict(cls, obj) -> "LogisticRegressionDetector":
        model = cls(obj["learning_rate"], obj["l2"], obj["tol"],
                    obj["max_epochs"])
        model.weights = np.asarray(obj["weights"], dtype=np.float64)
        model.bias = float(obj["bias"])
        return model


# ---------------------------------------------------------------------------
# decision tree (CART with Gini impurity)


class _TreeNode:
    __slots__ = ("feature", "threshold", "left", "right", "prob", "n")

    def __init__(self, prob: float, n: int):
        self.feature = -1
        self.threshold = 0.0
        self.left = None
        self.right = None
        self.prob = prob
        self.n = n

    @property
    def is_leaf(self) -> bool:
        return self.left is None


def _best_split(X: np.ndarray, y: np.ndarray):
    """Best (feature, threshold, gain) under Gini, or None.

    Features are scanned in index order and only a strictly larger gain
    replaces the incumbent, so ties resolve to the lowest feature index and,
    within a feature, to the lowest threshold. An impure node accepts even a
    zero-gain split: the gain of an exclusive-or pattern is zero at the root
    and only the children can realize it.
    """
    n = len(y)
    pos = int(y.sum())
    p = pos / n
    parent = 2.0 * p * (1.0 - p)
    if parent == 0.0:
        return None
    best = None
    best_gain = -math.inf
    yf = y.astype(np.float64)
    for j in range(X.shape[1]):
        x = X[:, j]
        order = np.argsort(x, kind="mergesort")
        xs = x[order]
        if xs[0] == xs[-1]:
            continue
        ys = yf[order]
        cut = np.flatnonzero(xs[1:] != xs[:-1]) + 1
        left_n = cut.astype(np.float64)
        left_pos = np.cumsum(ys)[cut - 1]
        right_n = n - left_n
        right_pos = pos - left_pos
        pl = left_pos / left_n
        pr = right_pos / right_n
        weighted = (left_n * 2.0 * pl * (1.0 - pl)
                    + right_n * 2.0 * pr * (1.0 - pr)) / n
        gains = parent - weighted
        k = int(np.argmax(gains))
        if gains[k] > best_gain + 1e-12:
            best_gain = float(gains[k])
            threshold = 0.5 * (xs[cut[k] - 1] + xs[cut[k]])
            best = (j, float(threshold), best_gain)
    return best


class DecisionTreeDetector:
    """Binary CART: Gini impurity, midpoint thresholds, depth cap 20."""

    kind = "dt"

    def __init__(self, max_depth: int = 20):
        if max_depth < 0:
            raise ValueError("max_depth must be non-negative")
        self.max_depth = max_depth
        self.root: _TreeNode | None = None

    def fit(self, X, y, seed: int = 0):
        Xd = _as_dense(X)
        y = _as_labels(y)
        if len(Xd) != len(y):
            raise ValueError("X and y differ in length")
        if len(y) == 0:
            raise ValueError("cannot fit on zero rows")
        if y.all() or not y.any():
            warnings.warn("decision tree trained on a single class; "
                          "it will predict a constant", RuntimeWarning,
                          stacklevel=2)
        self.root = self._grow(Xd, y, 0)
        return self

    def _grow(self, X: np.ndarray, y: np.ndarray, depth: int) -> _TreeNode:
        node = _TreeNode(prob=float(y.mean()), n=len(y))
        if depth >= self.max_depth or len(y) < 2:
            return node
        split = _best_split(X, y)
        if split is None:
            return node
        j, threshold, _ = split
        mask = X[:, j] <= threshold
        node.feature = j
        node.threshold = threshold
        node.left = self._grow(X[mask], y[mask], depth + 1)
        node.right = self._grow(X[~mask], y[~mask], depth + 1)
        return node

    @property
    def depth(self) -> int:
        def walk(node):
            if node is None or node.is_leaf:
                return 0
            return 1 + max(walk(node.left), walk(node.right))
        return walk(self.root)

    def _leaf_for(self, row: np.ndarray) -> _TreeNode:
        node = self.root
        while not node.is_leaf:
            node = node.left if row[node.feature] <= node.threshold \
                else node.right
        return node

    def score(self, X) -> np.ndarray:
        Xd = _as_dense(X)
        return np.asarray([self._leaf_for(r).prob for r in Xd],
                          dtype=np.float64)

    def predict(self, X) -> np.ndarray:
        return self.score(X) >= 0.5

    def _node_dict(self, node: _TreeNode) -> dict:
        if node.is_leaf:
            return {"prob": node.prob, "n": node.n}
        return {"feature": node.feature, "threshold": node.threshold,
                "n": node.n, "prob": node.prob,
                "left": self._node_dict(node.left),
                "right": self._node_dict(node.right)}

    def to_dict(self) -> dict:
        return {"kind": self.kind, "max_depth": self.max_depth,
                "tree": self._node_dict(self.root)}

    @classmethod
    def _node_from(cls, obj) -> _TreeNode:
        node = _TreeNode(prob=float(obj["prob"]), n=int(obj["n"]))
        if "feature" in obj:
            node.feature = int(obj["feature"])
            node.threshold = float(obj["threshold"])
            node.left = cls._node_from(obj["left"])
            node.right = cls._node_from(obj["right"])
        return node

    @classmethod
    def from_dict(cls, obj) -> "DecisionTreeDetector":
        model = cls(int(obj["max_depth"]))
        model.root = cls._node_from(obj["tree"])
        return model


# ---------------------------------------------------------------------------
# k-means distance detector


class KMeansDetector:
    """Two-cluster k-means; the anomaly score is distance to the nearest
    centroid. The first centroid is a seeded random row, the second the row
    farthest from it, then standard alternation until assignments settle.
    """

    kind = "kmeans"

    def __init__(self, n_clusters: int = 2, max_iter: int = 300,
                 contamination: float = 0.03):
        self.n_clusters = n_clusters
        self.max_iter = max_iter
        self.contamination = contamination
        self.centroids: np.ndarray | None = None
        self.threshold = 0.0
        self.seed = 0

    @staticmethod
    def _distances(X: np.ndarray, centroids: np.ndarray) -> np.ndarray:
        # squared euclidean via the expansion trick, clipped at zero
        sq = (X * X).sum(axis=1)[:, None] \
            + (centroids * centroids).sum(axis=1)[None, :] \
            - 2.0 * (X @ centroids.T)
        return np.maximum(sq, 0.0)

    def fit(self, X, seed: int = 0):
        Xd = _as_dense(X)
        n = len(Xd)
        if n < 2:
            raise ValueError("k-means needs at least 2 rows")
        self.seed = seed
        rng = np.random.default_rng(seed)
        centroids = [Xd[int(rng.integers(n))]]
        while len(centroids) < self.n_clusters:
            d = self._distances(Xd, np.asarray(centroids)).min(axis=1)
            centroids.append(Xd[int(np.argmax(d))])
        centroids = np.asarray(centroids, dtype=np.float64)

        assign = None
        for _ in range(self.max_iter):
            new_assign = np.argmin(self._distances(Xd, centroids), axis=1)
            if assign is not None and np.array_equal(new_assign, assign):
                break
            assign = new_assign
            for c in range(self.n_clusters):
                members = Xd[assign == c]
                if len(members):
                    centroids[c] = members.mean(axis=0)
        self.centroids = centroids
        train_scores = self.score(Xd)
        self.threshold = _quantile_threshold(train_scores, self.contamination)
        return self

    def score(self, X) -> np.ndarray:
        Xd = _as_dense(X)
        return np.sqrt(self._distances(Xd, self.centroids).min(axis=1))

    def predict(self, X) -> np.ndarray:
        return self.score(X) >= self.threshold

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n_clusters": self.n_clusters,
                "contamination": self.contamination, "seed": self.seed,
                "threshold": float(self.threshold),
                "centroids": [[float(v) for v in c] for c in self.centroids]}

    @classmethod
    def from_dict(cls, obj) -> "KMeansDetector":
        model = cls(int(obj["n_clusters"]),
                    contamination=float(obj["contamination"]))
        model.centroids = np.asarray(obj["centroids"], dtype=np.float64)
        model.threshold = float(obj["threshold"])
        model.seed = int(obj["seed"])
        return model


def _quantile_threshold(scores: np.ndarray, contamination: float) -> float:
    """The k-th largest training score, k = ceil(contamination * n)."""
    n = len(scores)
    if n == 0 or contamination <= 0.0:
        return float("inf")
    k = min(n, math.ceil(contamination * n))
    return float(np.sort(scores)[n - k])


# ---------------------------------------------------------------------------
# isolation forest


def _harmonic(k: int) -> float:
    if k < 1:
        return 0.0
    if k <= 64:
        return sum(1.0 / i for i in range(1, k + 1))
    return math.log(k) + 0.5772156649015329 + 1.0 / (2 * k)


def _avg_path_length(n: int) -> float:
    """Average unsuccessful BST search length c(n)."""
    if n <= 1:
        return 0.0
    return 2.0 * _harmonic(n - 1) - 2.0 * (n - 1) / n


class IsolationForestDetector:
    """Isolation forest: 100 random trees on subsamples of at most 256 rows.

    Scores follow the standard 2^(-E[h(x)] / c(psi)) form, so larger means
    more isolated. Per-tree randomness is derived from the fit seed, one
    child stream per tree, which makes results reproducible and independent
    of tree build order.
    """

    kind = "iforest"

    def __init__(self, n_trees: int = 100, max_samples: int = 256,
                 contamination: float = 0.03):
        self.n_trees = n_trees
        self.max_samples = max_samples
        self.contamination = contamination
        self.trees: list[dict] = []
        self.psi = 0
        self.threshold = 0.0
        self.seed = 0

    def _build(self, X: np.ndarray, depth: int, limit: int,
               rng: np.random.Generator) -> dict:
        n = len(X)
        if depth >= limit or n <= 1:
            return {"size": n}
        lo = X.min(axis=0)
        hi = X.max(axis=0)
        spread = np.flatnonzero(hi > lo)
        if spread.size == 0:
            return {"size": n}
        feature = int(spread[rng.integers(spread.size)])
        split = float(rng.uniform(lo[feature], hi[feature]))
        mask = X[:, feature] < split
        if not mask.any() or mask.all():
            # degenerate uniform draw at the boundary; isolate the extremes
            mask = X[:, feature] <= lo[feature]
        return {"feature": feature, "split": split,
                "left": self._build(X[mask], depth + 1, limit, rng),
                "right": self._build(X[~mask], depth + 1, limit, rng)}

    def fit(self, X, seed: int = 0):
        Xd = _as_dense(X)
        n = len(Xd)
        if n < 2:
            raise ValueError("isolation forest needs at least 2 rows")
        self.seed = seed
        self.psi = min(self.max_samples, n)
        limit = math.ceil(math.log2(self.psi)) if self.psi > 1 else 1
        self.trees = []
        for child_seed in np.random.SeedSequence(seed).spawn(self.n_trees):
            rng = np.random.default_rng(child_seed)
            idx = rng.choice(n, size=self.psi, replace=False)
            self.trees.append(self._build(Xd[idx], 0, limit, rng))
        train_scores = self.score(Xd)
        self.threshold = _quantile_threshold(train_scores, self.contamination)
        return self

    @staticmethod
    def _path_length(tree: dict, row: np.ndarray) -> float:
        depth = 0
        node = tree
        while "feature" in node:
            node = node["left"] if row[node["feature"]] < node["split"] \
                else node["right"]
            depth += 1
        return depth + _avg_path_length(node["size"])

    def score(self, X) -> np.ndarray:
        Xd = _as_dense(X)
        c = _avg_path_length(self.psi)
        if c <= 0.0:
            c = 1.0
        out = np.empty(len(Xd), dtype=np.float64)
        for i, row in enumerate(Xd):
            mean_path = sum(self._path_length(t, row) for t in self.trees) \
                / len(self.trees)
            out[i] = 2.0 ** (-mean_path / c)
        return out

    def predict(self, X) -> np.ndarray:
        return self.score(X) >= self.threshold

    def to_dict(self) -> dict:
        return {"kind": self.kind, "n_trees": self.n_trees,
                "max_samples": self.max_samples,
                "contamination": self.contamination, "seed": self.seed,
                "psi": self.psi, "threshold": float(self.threshold),
                "trees": self.trees}

    @classmethod
    def from_dict(cls, obj) -> "IsolationForestDetector":
        model = cls(int(obj["n_trees"]), int(obj["max_samples"]),
                    float(obj["contamination"]))
        model.trees = obj["trees"]
        model.psi = int(obj["psi"])
        model.threshold = float(obj["threshold"])
        model.seed = int(obj["seed"])
        return model


# ---------------------------------------------------------------------------
# token statistics detectors


class OOVDetector:
    """Score = fraction of a document's tokens never seen in training."""

    kind = "oov"

    def __init__(self, threshold: float = 0.0):
        self.threshold = threshold
        self.vocabulary: set[str] = set()

    def fit(self, documents, seed: int = 0):
        vocab = set()
        for doc in documents:
            vocab.update(doc)
        self.vocabulary = vocab
        return self

    def score(self, documents) -> np.ndarray:
        vocab = self.vocabulary
        out = []
        for doc in documents:
            if len(doc) == 0:
                out.append(0.0)
                continue
            misses = sum(1 for t in doc if t not in vocab)
            out.append(misses / len(doc))
        return np.asarray(out, dtype=np.float64)

    def predict(self, documents) -> np.ndarray:
        return self.score(documents) > self.threshold

    def to_dict(self) -> dict:
        return {"kind": self.kind, "threshold": self.threshold,
                "vocabulary": sorted(self.vocabulary)}

    @classmethod
    def from_dict(cls, obj) -> "OOVDetector":
        model = cls(float(obj["threshold"]))
        model.vocabulary = set(obj["vocabulary"])
        return model


def oov_detect(train_documents, test_documents, threshold: float = 0.0):
    """Out-of-vocabulary scores and labels for test documents."""
    model = OOVDetector(threshold).fit(train_documents)
    scores = model.score(test_documents)
    return scores, scores > threshold


class RarityDetector:
    """Mean negative log frequency of a document's tokens.

    Token frequency uses add-one smoothing over the training totals, so an
    unseen token contributes -log(1 / (T + V)) where T is the training token
    count and V the distinct-token count. Higher scores mean rarer content.
    """

    kind = "rarity"

    def __init__(self):
        self.counts: dict[str, int] = {}
        self.total = 0
        self.distinct = 0

    def fit(self, documents, seed: int = 0):
        counts: Counter = Counter()
        for doc in documents:
            counts.update(doc)
        self.counts = dict(counts)
        self.total = sum(counts.values())
        self.distinct = len(counts)
        return self

    def score(self, documents) -> np.ndarray:
        denom = self.total + self.distinct
        if denom == 0:
            return np.zeros(sum(1 for _ in documents), dtype=np.float64)
        counts = self.counts
        out = []
        for doc in documents:
            if len(doc) == 0:
                out.append(0.0)
                continue
            acc = 0.0
            for t in doc:
                acc -= math.log((counts.get(t, 0) + 1) / denom)
            out.append(acc / len(doc))
        return np.asarray(out, dtype=np.float64)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "total": self.total,
                "distinct": self.distinct,
                "counts": sorted(self.counts.items())}

    @classmethod
    def from_dict(cls, obj) -> "RarityDetector":
        model = cls()
        model.counts = {t: int(c) for t, c in obj["counts"]}
        model.total = int(obj["total"])
        model.distinct = int(obj["distinct"])
        return model


def rarity_score(train_documents, test_documents) -> np.ndarray:
    """Rarity scores of test documents against training token statistics."""
    return RarityDetector().fit(train_documents).score(test_documents)


def short_sequence_baseline(train_lengths, train_labels, test_lengths):
    """Flag test sequences shorter than the shortest normal training one."""
    train_lengths = np.asarray(train_lengths, dtype=np.int64)
    train_labels = _as_labels(train_labels)
    normal = train_lengths[~train_labels]
    if len(normal) == 0:
        return np.zeros(len(test_lengths), dtype=bool)
    return np.asarray(test_lengths, dtype=np.int64) < int(normal.min())


# ---------------------------------------------------------------------------
# training entry points and model persistence


def train_supervised(X, y, kind: str = "lr", seed: int = 0):
    """Fit a supervised detector; kind is "lr" or "dt"."""
    if kind == "lr":
        return LogisticRegressionDetector().fit(X, y, seed=seed)
    if kind == "dt":
        return DecisionTreeDetector().fit(X, y, seed=seed)
    raise ValueError(f"unknown supervised kind {kind!r}, "
                     f"expected one of {SUPERVISED_KINDS}")


def train_unsupervised(X, kind: str = "kmeans", seed: int = 0,
                       contamination: float = 0.03):
    """Fit an unsupervised detector; kind is "kmeans" or "iforest"."""
    if kind == "kmeans":
        return KMeansDetector(contamination=contamination).fit(X, seed=seed)
    if kind == "iforest":
        return IsolationForestDetector(contamination=contamination) \
            .fit(X, seed=seed)
    raise ValueError(f"unknown unsupervised kind {kind!r}, "
                     f"expected one of {UNSUPERVISED_KINDS}")


_MODEL_CLASSES = {
    "lr": LogisticRegressionDetector,
    "dt": DecisionTreeDetector,
    "kmeans": KMeansDetector,
    "iforest": IsolationForestDetector,
    "oov": OOVDetector,
    "rarity": RarityDetector,
}


def save_model(model, path) -> None:
    """Serialize any detector to JSON (kind, parameters, threshold)."""
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        json.dump(model.to_dict(), f, ensure_ascii=False,
                  separators=(",", ":"))
        f.write("\n")


def load_model(path):
    with open(path, "r", encoding="utf-8") as f:
        obj = json.load(f)
    kind = obj.get("kind")
    cls = _MODEL_CLASSES.get(kind)
    if cls is None:
        raise ValueError(f"{path}: unknown model kind {kind!r}")
    return cls.from_dict(obj)
