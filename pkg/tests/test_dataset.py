import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relnet.dataset import (ClassMap, DatasetError, RawDataset, SingleClassWarning, apply_transform, fit_transform,
                            load_dataset, map_classes, spearman)


def avg_rank_spearman(x, y):
    """Hand-rolled oracle: average ranks then Pearson."""
    def ranks(v):
        order = sorted(range(len(v)), key=lambda i: v[i])
        r = [0.0] * len(v)
        i = 0
        while i < len(order):
            j = i
            while j + 1 < len(order) and v[order[j + 1]] == v[order[i]]:
                j += 1
            for k in range(i, j + 1):
                r[order[k]] = (i + j) / 2 + 1
            i = j + 1
        return r
    rx, ry = ranks(list(x)), ranks(list(y))
    mx, my = sum(rx) / len(rx), sum(ry) / len(ry)
    cov = sum((a - mx) * (b - my) for a, b in zip(rx, ry))
    vx = sum((a - mx) ** 2 for a in rx)
    vy = sum((b - my) ** 2 for b in ry)
    return cov / math.sqrt(vx * vy)


def raw(X, labels):
    return RawDataset(np.array(X, dtype=float), labels)


class TestLoad:
    def test_libsvm_fills_missing(self, tmp_path):
        p = tmp_path / "d.libsvm"
        p.write_text("+1 1:0.5 3:2.0\n-1 2:1\n")
        d = load_dataset(p, "libsvm")
        assert d.n_attributes == 3
        np.testing.assert_array_equal(d.instances[0], [0.5, 0, 2.0])
        assert d.labels == ("+1", "-1")

    def test_csv_last_column(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("1.0,2.0,yes\n3,4,no\n")
        d = load_dataset(p, "csv", "last_column")
        np.testing.assert_array_equal(d.instances[0], [1.0, 2.0])
        assert d.labels == ("yes", "no")

    def test_csv_header_detected(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("a,b,class\n1,2,x\n")
        assert len(load_dataset(p, "csv")) == 1

    def test_three_classes_rejected(self, tmp_path):
        p = tmp_path / "d.csv"
        p.write_text("1,a\n2,b\n3,c\n")
        with pytest.raises(DatasetError, match="more than two classes"):
            load_dataset(p, "csv")

    def test_malformed_line_reports_number(self, tmp_path):
        p = tmp_path / "d.libsvm"
        p.write_text("+1 1:0.5\n-1 2:abc\n")
        with pytest.raises(DatasetError, match="line 2"):
            load_dataset(p, "libsvm")

    def test_empty_and_missing(self, tmp_path):
        p = tmp_path / "e.libsvm"
        p.write_text("\n")
        with pytest.raises(DatasetError, match="zero instances"):
            load_dataset(p)
        with pytest.raises(DatasetError):
            load_dataset(tmp_path / "nope.csv", "csv")

    def test_pinned_attribute_count(self, tmp_path):
        p = tmp_path / "d.libsvm"
        p.write_text("+1 1:1\n")
        assert load_dataset(p, n_attributes=3).n_attributes == 3
        with pytest.raises(DatasetError):
            load_dataset(p, n_attributes=0)


class TestClassMap:
    def test_majority_is_one(self):
        d = raw([[0]] * 5, ["+1", "+1", "+1", "-1", "-1"])
        cm = map_classes(d)
        assert cm.label_for_one == "+1"
        assert cm.theta == 0.6
        assert list(cm.encode(d.labels)) == [1, 1, 1, 0, 0]

    def test_tie_goes_to_larger_label(self):
        cm = map_classes(raw([[0], [1]], ["a", "b"]))
        assert cm.label_for_one == "b" and cm.theta == 0.5

    def test_single_label_warns(self):
        with pytest.warns(SingleClassWarning):
            cm = map_classes(raw([[0], [1]], ["+1", "+1"]))
        assert cm.theta == 1.0 and cm.label_for_zero is None

    def test_theta_is_exact_ratio(self):
        cm = map_classes(raw([[0]] * 7, ["x"] * 4 + ["y"] * 3))
        assert (cm.n_one, cm.n_total) == (4, 7)
        assert cm.theta == 4 / 7


class TestTransform:
    def test_spearman_matches_oracle(self):
        assert spearman(np.array([2, 4, 6.]), np.array([0, 0, 1])) == pytest.approx(math.sqrt(3) / 2)
        rng = np.random.default_rng(3)
        for _ in range(20):
            x = rng.integers(0, 4, 12).astype(float)
            y = rng.integers(0, 2, 12)
            if len(set(x)) > 1 and len(set(y)) > 1:
                assert spearman(x, y) == pytest.approx(avg_rank_spearman(x, y), abs=1e-12)

    @pytest.mark.parametrize("col, rs, expected", [
        ([2, 4, 6], math.sqrt(3) / 2, [0, 0.5, 1]),
        ([6, 4, 2], -math.sqrt(3) / 2, [0, 0.5, 1]),
    ])
    def test_worked_columns(self, col, rs, expected):
        d = raw([[v] for v in col], ["a", "a", "b"])
        # y01 = [0, 0, 1]; built directly since the majority rule would give [1, 1, 0]
        cm = ClassMap("b", "a", 1, 3)
        spec, td = fit_transform(d, cm)
        assert spec.r_s[0] == pytest.approx(rs, abs=1e-12)
        assert spec.r_s[0] == pytest.approx(avg_rank_spearman(col, [0, 0, 1]), abs=1e-12)
        np.testing.assert_allclose(td.node_rel[:, 0], expected)

    def test_constant_column(self):
        d = raw([[5, 1], [5, 2], [5, 3]], ["a", "a", "b"])
        spec, td = fit_transform(d, map_classes(d))
        np.testing.assert_array_equal(td.node_rel[:, 0], [0.5, 0.5, 0.5])

    def test_apply_clamps(self):
        d = raw([[2], [6], [4]], ["a", "b", "a"])
        spec, _ = fit_transform(d, map_classes(d))
        assert spec.flips[0]
        assert apply_transform(spec, [0.0])[0] == 1.0
        assert apply_transform(spec, [8.0])[0] == 0.0

    def test_apply_clamps_unflipped(self):
        d = raw([[2], [6], [4]], ["b", "a", "a"])
        spec, _ = fit_transform(d, map_classes(d))
        assert not spec.flips[0]
        assert apply_transform(spec, [8.0])[0] == 1.0
        assert apply_transform(spec, [0.0])[0] == 0.0

    def test_wrong_length(self):
        d = raw([[2, 1], [6, 2]], ["a", "b"])
        spec, _ = fit_transform(d, map_classes(d))
        with pytest.raises(DatasetError):
            apply_transform(spec, [1.0])


values = st.floats(-1e6, 1e6, allow_nan=False).map(lambda v: round(v, 3))


@st.composite
def datasets(draw):
    n = draw(st.integers(2, 25))
    m = draw(st.integers(1, 4))
    X = draw(st.lists(st.lists(values, min_size=m, max_size=m), min_size=n, max_size=n))
    labels = draw(st.lists(st.sampled_from(["p", "q"]), min_size=n, max_size=n))
    return RawDataset(np.array(X), labels)


@settings(max_examples=150, deadline=None)
@given(datasets())
def test_transform_properties(d):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SingleClassWarning)
        cm = map_classes(d)
    spec, td = fit_transform(d, cm)
    assert np.all((td.node_rel >= 0) & (td.node_rel <= 1))
    assert np.all(spec.mins <= spec.maxs)
    np.testing.assert_array_equal(spec.flips, spec.r_s < 0)
    for j in range(d.n_attributes):
        if spec.maxs[j] > spec.mins[j]:
            assert spearman(td.node_rel[:, j], td.y01) >= -1e-12
    for i in range(len(d)):
        np.testing.assert_array_equal(apply_transform(spec, d.instances[i]), td.node_rel[i])


@settings(max_examples=100, deadline=None)
@given(datasets(), st.lists(st.floats(-1e9, 1e9, allow_nan=False), min_size=4, max_size=4))
def test_apply_never_leaves_unit_interval(d, probe):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", SingleClassWarning)
        spec, _ = fit_transform(d, map_classes(d))
    out = apply_transform(spec, probe[:d.n_attributes])
    assert np.all((out >= 0) & (out <= 1))
