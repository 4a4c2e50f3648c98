"""Threshold-indicator expansion of continuous features and scorecard export.

Each continuous feature is replaced by dummy columns 1[x <= theta] (or >=)
at its realized values, so a sparse linear fit on the expanded matrix is an
additive model with one step function per selected threshold.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .core import ConfigError, DataError, DesignMatrix

DIRECTIONS = ("<=", ">=")
ENCODINGS = ("0/1", "-1/+1")


@dataclass(frozen=True)
class ThresholdGroup:
    """Thresholds generated for one source feature, with the dummy columns
    they produced (aligned, strictly increasing thresholds)."""

    name: str
    thresholds: tuple[float, ...]
    columns: tuple[int, ...]


@dataclass(frozen=True)
class ThresholdMap:
    direction: str
    encoding: str
    groups: tuple[ThresholdGroup, ...]

    def __post_init__(self):
        if self.direction not in DIRECTIONS:
            raise ConfigError(f"direction must be one of {DIRECTIONS}")
        if self.encoding not in ENCODINGS:
            raise ConfigError(f"encoding must be one of {ENCODINGS}")
        seen: set[int] = set()
        for g in self.groups:
            if any(b <= a for a, b in zip(g.thresholds, g.thresholds[1:])):
                raise DataError(f"thresholds for {g.name!r} are not strictly increasing")
            if len(g.thresholds) != len(g.columns):
                raise DataError(f"threshold/column mismatch for {g.name!r}")
            for cidx in g.columns:
                if cidx in seen:
                    raise DataError(f"dummy column {cidx} assigned twice")
                seen.add(cidx)


def _feature_thresholds(col: np.ndarray, max_thresholds: int | None) -> np.ndarray:
    vals = np.unique(col)
    if vals.size <= 1:
        return np.empty(0)  # constant feature: nothing to split on
    if max_thresholds is not None and vals.size > max_thresholds:
        probs = np.linspace(0.0, 1.0, max_thresholds)
        vals = np.unique(np.quantile(col, probs, method="lower"))
    return vals


def binarize(
    data: DesignMatrix,
    direction: str = "<=",
    encoding: str = "0/1",
    max_thresholds: int | None = None,
) -> tuple[DesignMatrix, ThresholdMap]:
    """Expand every feature into threshold dummies.

    Thresholds are the distinct realized values of each feature, capped to
    equally spaced realized quantiles when ``max_thresholds`` is given.
    Constant features contribute no columns.  The -1/+1 encoding is what the
    exponential-loss engine requires.
    """
    if direction not in DIRECTIONS:
        raise ConfigError(f"direction must be one of {DIRECTIONS}")
    if encoding not in ENCODINGS:
        raise ConfigError(f"encoding must be one of {ENCODINGS}")
    if data.n == 0:
        raise DataError("cannot binarize an empty dataset")
    if max_thresholds is not None and max_thresholds < 1:
        raise ConfigError("max_thresholds must be positive or None")

    columns: list[np.ndarray] = []
    names: list[str] = []
    groups: list[ThresholdGroup] = []
    for j, name in enumerate(data.feature_names):
        col = data.column(j)
        thresholds = _feature_thresholds(col, max_thresholds)
        idxs = []
        for theta in thresholds:
            ind = (col <= theta) if direction == "<=" else (col >= theta)
            dummy = ind.astype(np.float64)
            if encoding == "-1/+1":
                dummy = 2.0 * dummy - 1.0
            idxs.append(len(columns))
            columns.append(dummy)
            names.append(f"{name}{direction}{float(theta)!r}")
        groups.append(ThresholdGroup(name, tuple(float(t) for t in thresholds), tuple(idxs)))

    if columns:
        x = np.column_stack(columns)
    else:
        x = np.empty((data.n, 0))
    out = DesignMatrix.from_arrays(x, data.y, names)
    return out, ThresholdMap(direction=direction, encoding=encoding, groups=tuple(groups))


@dataclass(frozen=True)
class ScorecardTerm:
    feature: str
    op: str
    threshold: float
    weight: float


@dataclass(frozen=True)
class Scorecard:
    """Additive model as weighted 0/1 threshold indicators plus an intercept.

    Terms are grouped by source feature in threshold order.  Fits on -1/+1
    dummies are folded into the indicator convention at export, so a
    scorecard evaluates identically regardless of the training encoding.
    """

    loss: str
    lambda0: float
    lambda2: float
    intercept: float
    terms: tuple[ScorecardTerm, ...]

    def __post_init__(self):
        if any(t.weight == 0.0 for t in self.terms):
            raise DataError("scorecard terms must have nonzero weights")

    def score_rows(self, features: dict[str, np.ndarray]) -> np.ndarray:
        """Raw additive scores for named raw-feature columns."""
        total = None
        for t in self.terms:
            if t.feature not in features:
                raise DataError(f"scorecard needs feature {t.feature!r}")
            col = np.asarray(features[t.feature], dtype=np.float64)
            ind = (col <= t.threshold) if t.op == "<=" else (col >= t.threshold)
            contrib = t.weight * ind.astype(np.float64)
            total = contrib if total is None else total + contrib
        if total is None:
            sizes = [np.asarray(v).shape[0] for v in features.values()]
            total = np.zeros(sizes[0] if sizes else 0)
        return total + self.intercept

    def score(self, row: dict[str, float]) -> float:
        return float(self.score_rows({k: np.atleast_1d(v) for k, v in row.items()})[0])

    def to_json(self) -> str:
        return dumps_17g(
            {
                "kind": "scorecard",
                "loss": self.loss,
                "lambda0": self.lambda0,
                "lambda2": self.lambda2,
                "intercept": self.intercept,
                "terms": [
                    {"feature": t.feature, "op": t.op, "threshold": t.threshold, "weight": t.weight}
                    for t in self.terms
                ],
            }
        )

    @classmethod
    def from_json(cls, text: str) -> "Scorecard":
        obj = json.loads(text)
        if obj.get("kind") != "scorecard":
            raise DataError("not a scorecard file")
        terms = tuple(
            ScorecardTerm(str(t["feature"]), str(t["op"]), float(t["threshold"]), float(t["weight"]))
            for t in obj["terms"]
        )
        return cls(
            loss=str(obj["loss"]),
            lambda0=float(obj["lambda0"]),
            lambda2=float(obj["lambda2"]),
            intercept=float(obj["intercept"]),
            terms=terms,
        )


def export_scorecard(state, tmap: ThresholdMap, feature_names, hp) -> Scorecard:
    """Turn a fit on a binarized matrix into a scorecard.

    ``feature_names`` are the dummy-column names the state was fitted on and
    are used to cross-check the map.  -1/+1 dummies contribute 2w per
    indicator with the constant part folded into the intercept.
    """
    n_cols = sum(len(g.columns) for g in tmap.groups)
    if len(feature_names) != n_cols or state.w.shape[0] != n_cols:
        raise DataError("threshold map does not match the fitted coefficient vector")
    pm = tmap.encoding == "-1/+1"
    intercept = float(state.intercept)
    terms = []
    for g in tmap.groups:
        for theta, cidx in zip(g.thresholds, g.columns):
            w = float(state.w[cidx])
            if w == 0.0:
                continue
            if pm:
                terms.append(ScorecardTerm(g.name, tmap.direction, theta, 2.0 * w))
                intercept -= w
            else:
                terms.append(ScorecardTerm(g.name, tmap.direction, theta, w))
    return Scorecard(
        loss=hp.loss,
        lambda0=hp.lambda0,
        lambda2=hp.lambda2,
        intercept=intercept,
        terms=tuple(terms),
    )


# --- structured-text rendering ---------------------------------------------

def _render(obj, out: list[str]) -> None:
    if isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            out.append(json.dumps(str(k)))
            out.append(": ")
            _render(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _render(v, out)
        out.append("]")
    elif isinstance(obj, bool) or obj is None:
        out.append(json.dumps(obj))
    elif isinstance(obj, float):
        if obj != obj or obj in (float("inf"), float("-inf")):
            raise DataError("cannot serialize non-finite numbers")
        out.append(format(obj, ".17g"))
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, np.floating):
        _render(float(obj), out)
    else:
        out.append(json.dumps(obj))


def dumps_17g(obj) -> str:
    """JSON text with floats rendered to 17 significant digits, enough for a
    bit-exact round trip."""
    out: list[str] = []
    _render(obj, out)
    return "".join(out)
