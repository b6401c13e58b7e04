import json

import numpy as np
import pytest

from stepgan import ratings
from stepgan.errors import NoDataRetained, SchemaViolation
from stepgan.ratings import (
    RatingPage,
    apply_exclusions,
    load_ratings,
    summarize,
    validate_session,
    write_summary,
)
from stepgan.stimuli import CONDITIONS


def session_doc(pid="p1", pages=None):
    if pages is None:
        pages = [marks()]
    return {
        "participant": {
            "id": pid,
            "experience": {
                "critical_listening": True,
                "years_music": 5,
                "years_engineering": 2,
                "years_sound_design": 0,
            },
            "headphones": "HD600",
        },
        "pages": [{"series_id": f"series_{i:02d}", "marks": m} for i, m in enumerate(pages)],
    }


def marks(**overrides):
    base = {c: 0.6 for c in CONDITIONS}
    base["PM1"] = 0.05
    base["REAL"] = 0.9
    base.update(overrides)
    return base


def page(pid="p", series="s", **mark_overrides):
    return RatingPage(pid, series, f"{pid}:{series}", marks(**mark_overrides))


class TestLoadRatings:
    def test_valid_export_round_trips(self, tmp_path):
        path = tmp_path / "ok.json"
        path.write_text(json.dumps(session_doc(pages=[marks(), marks()])))
        pages = load_ratings([path])
        assert len(pages) == 2
        assert pages[0].participant_id == "p1"
        assert len(pages[0].records) == 9
        assert pages[0].experience["critical_listening"] is True

    def test_value_out_of_bounds(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps(session_doc(pages=[marks(WAVE=1.2)])))
        with pytest.raises(SchemaViolation, match="WAVE"):
            load_ratings([path])

    def test_duplicate_condition_key(self, tmp_path):
        doc = json.dumps(session_doc())
        # inject a duplicate key textually: JSON objects cannot carry them natively
        dup = doc.replace('"HIFI": 0.6', '"HIFI": 0.6, "HIFI": 0.7', 1)
        path = tmp_path / "dup.json"
        path.write_text(dup)
        with pytest.raises(SchemaViolation, match="duplicate"):
            load_ratings([path])

    def test_missing_condition(self):
        m = marks()
        del m["ADD"]
        with pytest.raises(SchemaViolation, match="ADD"):
            validate_session(session_doc(pages=[m]))

    def test_unknown_condition(self):
        with pytest.raises(SchemaViolation, match="XYZ"):
            validate_session(session_doc(pages=[dict(marks(), XYZ=0.5)]))

    def test_non_strict_collects_problems(self, tmp_path):
        good = tmp_path / "good.json"
        good.write_text(json.dumps(session_doc()))
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        pages, problems = load_ratings([good, bad], strict=False)
        assert len(pages) == 1
        assert len(problems) == 1
        assert "bad.json" in problems[0][0]


class TestExclusions:
    def test_anchor_rule_fires(self):
        result = apply_exclusions([page(PM1=0.2)])
        assert not result.retained
        assert "anchor" in result.excluded[0][1][0]

    def test_reference_rule_fires(self):
        result = apply_exclusions([page(REAL=0.4)])
        assert not result.retained
        assert "reference" in result.excluded[0][1][0]

    def test_both_rules_recorded(self):
        result = apply_exclusions([page(PM1=0.5, REAL=0.1)])
        assert len(result.excluded[0][1]) == 2

    def test_compliant_page_retained(self):
        result = apply_exclusions([page(PM1=0.05, REAL=0.7)])
        assert len(result.retained) == 1
        assert not result.excluded

    def test_boundary_values_not_excluded(self):
        # rules are strict inequalities: anchor > 0.1, reference < 0.5
        result = apply_exclusions([page(PM1=0.1, REAL=0.5)])
        assert len(result.retained) == 1

    def test_page_atomic_and_exhaustive(self):
        pages = [page("a", "s1"), page("b", "s1", PM1=0.9), page("c", "s2", REAL=0.0)]
        result = apply_exclusions(pages)
        assert len(result.retained) + len(result.excluded) == 3
        assert {p.participant_id for p in result.retained} == {"a"}


class TestSummarize:
    def test_constant_ratings(self):
        pages = [page(str(i)) for i in range(5)]
        stats = summarize(pages)
        assert stats["WAVE"].median == 0.6
        assert stats["WAVE"].q3 - stats["WAVE"].q1 == 0.0
        assert stats["WAVE"].n == 5

    def test_hand_computed_quartiles(self):
        # oracle for the inclusive linear-interpolation convention
        values = [0.1, 0.2, 0.3, 0.4, 0.5]
        pages = [page(str(i), HIFI=v) for i, v in enumerate(values)]
        stats = summarize(pages)
        assert abs(stats["HIFI"].median - 0.3) < 1e-12
        assert abs(stats["HIFI"].q1 - 0.2) < 1e-12
        assert abs(stats["HIFI"].q3 - 0.4) < 1e-12

    def test_whiskers_and_outliers(self):
        values = [0.4, 0.41, 0.42, 0.43, 0.44, 0.45, 0.46, 0.47, 0.05]
        pages = [page(str(i), SPS=v) for i, v in enumerate(values)]
        s = summarize(pages)["SPS"]
        assert 0.05 in s.outliers
        assert s.whisker_lo >= 0.4

    def test_permutation_invariance(self):
        rng = np.random.default_rng(0)
        values = rng.uniform(0, 1, 12)
        pages = [page(str(i), ADD=float(v)) for i, v in enumerate(values)]
        a = summarize(pages)["ADD"]
        b = summarize(list(reversed(pages)))["ADD"]
        assert (a.median, a.q1, a.q3, a.whisker_lo, a.whisker_hi) == (
            b.median, b.q1, b.q3, b.whisker_lo, b.whisker_hi
        )

    def test_empty_raises(self):
        with pytest.raises(NoDataRetained):
            summarize([])

    def test_write_summary_outputs(self, tmp_path):
        pages = [page(str(i)) for i in range(4)]
        result = apply_exclusions(pages + [page("x", PM1=0.9)])
        stats = summarize(result.retained)
        out = write_summary(stats, result, tmp_path / "stats.json", tmp_path / "stats.csv")
        doc = json.loads(out.read_text())
        assert doc["quartile_convention"].startswith("linear interpolation")
        assert doc["n_retained"] == 4
        assert doc["n_excluded"] == 1
        csv_text = (tmp_path / "stats.csv").read_text()
        assert csv_text.startswith("condition,n,median")
        assert len(csv_text.strip().splitlines()) == 1 + len(stats)
