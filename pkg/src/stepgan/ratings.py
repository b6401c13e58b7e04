"""Listening-test rating ingest, reliability exclusions, summary statistics.

Shared ratings JSON schema (one document per participant session):

    {
      "participant": {
        "id": str,
        "experience": {"critical_listening": bool, "years_music": num,
                        "years_engineering": num, "years_sound_design": num},
        "headphones": str
      },
      "pages": [{"series_id": str, "marks": {condition: value in [0, 1]}}]
    }
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import NoDataRetained, SchemaViolation
from .stimuli import CONDITIONS

ANCHOR_CONDITION = "PM1"
REFERENCE_CONDITION = "REAL"
ANCHOR_MAX = 0.1
REFERENCE_MIN = 0.5


@dataclass
class RatingRecord:
    participant_id: str
    series_id: str
    condition: str
    value: float
    page_id: str


@dataclass
class RatingPage:
    participant_id: str
    series_id: str
    page_id: str
    marks: dict  # condition -> value
    experience: dict = field(default_factory=dict)
    headphones: str = ""

    @property
    def records(self) -> list:
        return [
            RatingRecord(self.participant_id, self.series_id, c, v, self.page_id)
            for c, v in self.marks.items()
        ]


def _reject_duplicate_keys(pairs):
    seen = {}
    for key, value in pairs:
        if key in seen:
            raise SchemaViolation(f"duplicate key {key!r}")
        seen[key] = value
    return seen


def _check(cond: bool, reason: str, problems: list) -> None:
    if not cond:
        problems.append(reason)


def validate_session(doc: dict, source: str = "<memory>") -> list:
    """Validate one ratings document; returns its RatingPages or raises."""
    problems: list = []
    participant = doc.get("participant")
    _check(isinstance(participant, dict), "missing 'participant' object", problems)
    pid = ""
    experience, headphones = {}, ""
    if isinstance(participant, dict):
        pid = participant.get("id")
        _check(isinstance(pid, str) and pid != "", "participant.id must be a non-empty string", problems)
        experience = participant.get("experience", {})
        _check(isinstance(experience, dict), "participant.experience must be an object", problems)
        headphones = participant.get("headphones", "")
    pages_raw = doc.get("pages")
    _check(isinstance(pages_raw, list) and pages_raw, "'pages' must be a non-empty list", problems)

    pages: list = []
    for i, page in enumerate(pages_raw or []):
        where = f"pages[{i}]"
        if not isinstance(page, dict):
            problems.append(f"{where} is not an object")
            continue
        series = page.get("series_id")
        _check(isinstance(series, str) and series != "", f"{where}.series_id missing", problems)
        marks = page.get("marks")
        if not isinstance(marks, dict):
            problems.append(f"{where}.marks must be an object")
            continue
        unknown = sorted(set(marks) - set(CONDITIONS))
        _check(not unknown, f"{where}: unknown condition(s) {unknown}", problems)
        absent = sorted(set(CONDITIONS) - set(marks))
        _check(not absent, f"{where}: missing condition(s) {absent}", problems)
        for cond, value in marks.items():
            if not isinstance(value, (int, float)) or isinstance(value, bool) or not 0.0 <= value <= 1.0:
                problems.append(f"{where}.marks[{cond!r}] = {value!r} not in [0, 1]")
        pages.append(
            RatingPage(
                participant_id=pid or "?",
                series_id=series or "?",
                page_id=f"{source}:{i}",
                marks={c: float(v) for c, v in marks.items() if isinstance(v, (int, float))},
                experience=experience if isinstance(experience, dict) else {},
                headphones=headphones if isinstance(headphones, str) else "",
            )
        )
    if problems:
        raise SchemaViolation(f"{source}: " + "; ".join(problems))
    return pages


def load_ratings(paths, strict: bool = True):
    """Load rating files. strict=True raises on the first malformed file;
    otherwise returns (pages, problems) with per-file reasons."""
    pages, problems = [], []
    for path in paths:
        path = Path(path)
        try:
            doc = json.loads(path.read_text(), object_pairs_hook=_reject_duplicate_keys)
            pages.extend(validate_session(doc, source=path.name))
        except SchemaViolation as exc:
            if strict:
                raise
            problems.append((str(path), str(exc)))
        except (OSError, json.JSONDecodeError) as exc:
            err = SchemaViolation(f"{path.name}: unreadable JSON ({exc})")
            if strict:
                raise err from exc
            problems.append((str(path), str(err)))
    if strict:
        return pages
    return pages, problems


@dataclass
class ExclusionResult:
    retained: list
    excluded: list  # (page, [rule names])

    @property
    def log(self) -> list:
        return [
            {
                "participant_id": p.participant_id,
                "series_id": p.series_id,
                "page_id": p.page_id,
                "rules": rules,
            }
            for p, rules in self.excluded
        ]


def apply_exclusions(
    pages,
    anchor: str = ANCHOR_CONDITION,
    reference: str = REFERENCE_CONDITION,
    anchor_max: float = ANCHOR_MAX,
    reference_min: float = REFERENCE_MIN,
) -> ExclusionResult:
    """Drop whole pages whose anchor rating is too high or reference too low."""
    retained, excluded = [], []
    for page in pages:
        rules = []
        if page.marks.get(anchor, 0.0) > anchor_max:
            rules.append(f"anchor {anchor} > {anchor_max}")
        if page.marks.get(reference, 1.0) < reference_min:
            rules.append(f"reference {reference} < {reference_min}")
        if rules:
            excluded.append((page, rules))
        else:
            retained.append(page)
    return ExclusionResult(retained, excluded)


QUARTILE_CONVENTION = "linear interpolation between order statistics (inclusive)"


@dataclass
class ConditionStats:
    condition: str
    n: int
    median: float
    q1: float
    q3: float
    whisker_lo: float
    whisker_hi: float
    outliers: list
    values: list

    def to_dict(self) -> dict:
        return {
            "condition": self.condition,
            "n": self.n,
            "median": self.median,
            "q1": self.q1,
            "q3": self.q3,
            "whisker_lo": self.whisker_lo,
            "whisker_hi": self.whisker_hi,
            "outliers": self.outliers,
        }


def summarize(pages) -> dict:
    """Per-condition boxplot statistics (1.5 IQR whiskers) over retained pages."""
    pages = list(pages)
    if not pages:
        raise NoDataRetained("no rating pages left to summarize")
    stats = {}
    for condition in CONDITIONS:
        values = np.sort([p.marks[condition] for p in pages if condition in p.marks])
        if values.size == 0:
            continue
        q1, med, q3 = np.percentile(values, [25, 50, 75])
        iqr = q3 - q1
        in_lo = values[values >= q1 - 1.5 * iqr]
        in_hi = values[values <= q3 + 1.5 * iqr]
        whisker_lo = float(in_lo[0]) if in_lo.size else float(q1)
        whisker_hi = float(in_hi[-1]) if in_hi.size else float(q3)
        outliers = values[(values < q1 - 1.5 * iqr) | (values > q3 + 1.5 * iqr)]
        stats[condition] = ConditionStats(
            condition, int(values.size), float(med), float(q1), float(q3),
            whisker_lo, whisker_hi, [float(v) for v in outliers], [float(v) for v in values],
        )
    return stats


def write_summary(stats: dict, exclusions: ExclusionResult, out_json, out_csv=None) -> Path:
    out_json = Path(out_json)
    out_json.parent.mkdir(parents=True, exist_ok=True)
    doc = {
        "quartile_convention": QUARTILE_CONVENTION,
        "conditions": {c: s.to_dict() for c, s in stats.items()},
        "excluded_pages": exclusions.log,
        "n_retained": len(exclusions.retained),
        "n_excluded": len(exclusions.excluded),
    }
    out_json.write_text(json.dumps(doc, indent=2))
    if out_csv is not None:
        lines = ["condition,n,median,q1,q3,whisker_lo,whisker_hi,n_outliers"]
        for c, s in stats.items():
            lines.append(
                f"{c},{s.n},{s.median},{s.q1},{s.q3},{s.whisker_lo},{s.whisker_hi},{len(s.outliers)}"
            )
        Path(out_csv).write_text("\n".join(lines) + "\n")
    return out_json
