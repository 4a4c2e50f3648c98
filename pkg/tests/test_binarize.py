"""Threshold expansion and scorecard tests."""

import numpy as np
import pytest

import sparseclass as sc
from sparseclass.binarize import ScorecardTerm, dumps_17g


def _toy(values, y=None):
    values = np.asarray(values, dtype=float).reshape(-1, 1)
    if y is None:
        y = np.where(np.arange(values.shape[0]) % 2 == 0, 1.0, -1.0)
    return sc.DesignMatrix.from_arrays(values, y, ["a"])


class TestBinarize:
    def test_distinct_values_become_thresholds(self):
        data = _toy([3.0, 1.0, 3.0, 7.0])
        out, tmap = sc.binarize(data, direction="<=", encoding="0/1")
        assert out.p == 3
        assert tmap.groups[0].thresholds == (1.0, 3.0, 7.0)
        col = out.column(tmap.groups[0].columns[1])  # theta = 3
        assert col.tolist() == [1.0, 1.0, 1.0, 0.0]

    def test_constant_feature_contributes_nothing(self):
        x = np.column_stack([np.full(4, 2.0), [1.0, 2.0, 3.0, 4.0]])
        data = sc.DesignMatrix.from_arrays(x, [1, -1, 1, -1], ["const", "varies"])
        out, tmap = sc.binarize(data)
        assert tmap.groups[0].thresholds == ()
        assert tmap.groups[0].columns == ()
        assert out.p == 4  # only the varying feature expands

    def test_empty_dataset_rejected(self):
        data = sc.DesignMatrix.from_arrays(np.empty((0, 1)), np.empty(0))
        with pytest.raises(sc.DataError):
            sc.binarize(data)

    def test_monotone_containment(self):
        rng = np.random.default_rng(2)
        data = sc.DesignMatrix.from_arrays(rng.standard_normal((30, 2)),
                                           np.where(rng.random(30) < 0.5, 1.0, -1.0))
        out, tmap = sc.binarize(data, direction="<=", encoding="0/1")
        for g in tmap.groups:
            for c1, c2 in zip(g.columns, g.columns[1:]):
                assert np.all(out.column(c1) <= out.column(c2))

    def test_risk_score_style_thresholds_present(self):
        rng = np.random.default_rng(3)
        vals = np.concatenate([[63.0, 70.0, 74.0, 83.0], rng.integers(50, 95, size=40).astype(float)])
        data = sc.DesignMatrix.from_arrays(vals.reshape(-1, 1),
                                           np.where(rng.random(44) < 0.5, 1.0, -1.0),
                                           ["ExternalRiskEstimate"])
        out, tmap = sc.binarize(data)
        ths = set(tmap.groups[0].thresholds)
        assert {63.0, 70.0, 74.0, 83.0} <= ths
        assert "ExternalRiskEstimate<=63.0" in out.feature_names

    def test_quantile_capping(self):
        rng = np.random.default_rng(5)
        col = rng.standard_normal(500)
        data = sc.DesignMatrix.from_arrays(col.reshape(-1, 1),
                                           np.where(rng.random(500) < 0.5, 1.0, -1.0))
        out, tmap = sc.binarize(data, max_thresholds=20)
        ths = tmap.groups[0].thresholds
        assert len(ths) <= 20
        assert all(b > a for a, b in zip(ths, ths[1:]))
        assert set(ths) <= set(col.tolist())  # realized values only

    def test_plus_minus_encoding_is_binary(self):
        data = _toy([3.0, 1.0, 3.0, 7.0])
        out, tmap = sc.binarize(data, encoding="-1/+1")
        assert out.binary
        assert set(np.unique(out.x)) <= {-1.0, 1.0}

    def test_ge_direction(self):
        data = _toy([3.0, 1.0, 3.0, 7.0])
        out, tmap = sc.binarize(data, direction=">=", encoding="0/1")
        col = out.column(tmap.groups[0].columns[1])  # theta = 3
        assert col.tolist() == [1.0, 0.0, 1.0, 1.0]


def _fit_on_dummies(data, tmap, rng, encoding):
    state = sc.ModelState.zeros(data)
    cols = [c for g in tmap.groups for c in g.columns]
    chosen = rng.choice(cols, size=min(4, len(cols)), replace=False)
    for c in chosen:
        state.set_coefficient(data, int(c), float(rng.standard_normal()))
    state.set_intercept(data, float(rng.standard_normal()))
    return state


class TestScorecard:
    def test_zero_model_exports_intercept_only(self):
        data = _toy([3.0, 1.0, 3.0, 7.0])
        out, tmap = sc.binarize(data)
        state = sc.ModelState.zeros(out)
        state.set_intercept(out, 0.75)
        hp = sc.HyperParams(lambda0=1.0)
        card = sc.export_scorecard(state, tmap, out.feature_names, hp)
        assert card.terms == ()
        assert card.intercept == 0.75

    def test_grouped_terms_with_verbatim_weights(self):
        x = np.column_stack([[1.0, 2.0, 3.0, 4.0], [5.0, 6.0, 7.0, 8.0]])
        data = sc.DesignMatrix.from_arrays(x, [1, -1, 1, -1], ["a", "b"])
        out, tmap = sc.binarize(data)
        state = sc.ModelState.zeros(out)
        cols = tmap.groups[0].columns
        state.set_coefficient(out, cols[0], 0.5)
        state.set_coefficient(out, cols[2], -1.25)
        hp = sc.HyperParams(lambda0=1.0)
        card = sc.export_scorecard(state, tmap, out.feature_names, hp)
        assert [t.feature for t in card.terms] == ["a", "a"]
        assert [t.weight for t in card.terms] == [0.5, -1.25]
        assert [t.threshold for t in card.terms] == [1.0, 3.0]

    def test_mismatched_map_rejected(self):
        data = _toy([3.0, 1.0, 3.0, 7.0])
        out, tmap = sc.binarize(data)
        state = sc.ModelState.zeros(out)
        hp = sc.HyperParams()
        with pytest.raises(sc.DataError):
            sc.export_scorecard(state, tmap, out.feature_names[:-1], hp)

    @pytest.mark.parametrize("encoding", ["0/1", "-1/+1"])
    def test_prediction_equivalence(self, encoding):
        rng = np.random.default_rng(7)
        raw = sc.DesignMatrix.from_arrays(rng.standard_normal((25, 3)),
                                          np.where(rng.random(25) < 0.5, 1.0, -1.0),
                                          ["u", "v", "w"])
        out, tmap = sc.binarize(raw, encoding=encoding, max_thresholds=8)
        state = _fit_on_dummies(out, tmap, rng, encoding)
        hp = sc.HyperParams(lambda0=1.0)
        card = sc.export_scorecard(state, tmap, out.feature_names, hp)
        linear_scores = state.scores(out)
        card_scores = card.score_rows({n: raw.column(j) for j, n in enumerate(raw.feature_names)})
        np.testing.assert_allclose(card_scores, linear_scores, atol=1e-12)

    def test_roundtrip_is_bit_exact(self):
        rng = np.random.default_rng(11)
        for _ in range(50):
            n_terms = int(rng.integers(0, 20))
            terms = tuple(
                ScorecardTerm(
                    feature=f"f{rng.integers(5)}",
                    op="<=" if rng.random() < 0.7 else ">=",
                    threshold=float(rng.standard_normal() * 100),
                    weight=float(rng.standard_normal()) or 1.0,
                )
                for _ in range(n_terms)
            )
            card = sc.Scorecard(
                loss="exponential" if rng.random() < 0.5 else "logistic",
                lambda0=float(rng.uniform(0, 10)),
                lambda2=float(rng.uniform(0, 1)),
                intercept=float(rng.standard_normal()),
                terms=terms,
            )
            again = sc.Scorecard.from_json(card.to_json())
            assert again == card

    def test_nineteen_term_roundtrip(self):
        rng = np.random.default_rng(13)
        terms = tuple(
            ScorecardTerm(f"g{i % 6}", "<=", float(rng.standard_normal() * 50),
                          float(rng.standard_normal()))
            for i in range(19)
        )
        card = sc.Scorecard("exponential", 5.0, 0.0,
                            intercept=-0.2584626, terms=terms)
        assert sc.Scorecard.from_json(card.to_json()) == card

    def test_zero_weight_terms_rejected(self):
        with pytest.raises(sc.DataError):
            sc.Scorecard("logistic", 1.0, 0.0, 0.0,
                         (ScorecardTerm("a", "<=", 1.0, 0.0),))


class TestFloatRendering:
    def test_17g_roundtrip(self):
        rng = np.random.default_rng(17)
        values = rng.standard_normal(200) * 10.0 ** rng.integers(-8, 8, size=200)
        import json
        for v in values:
            text = dumps_17g({"v": float(v)})
            assert json.loads(text)["v"] == float(v)
