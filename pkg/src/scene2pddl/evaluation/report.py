"""Aggregation of scenario scores into table-shaped reports."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from pathlib import Path

from ..domains import DomainId
from .verdicts import EvalError, KitchenErrorCategory, ScenarioScore

DIFFICULTIES = ("easy", "medium", "hard")
GOAL_MODES = ("image", "text")
MODE_LABELS = {"image": "Images (Initial & Goal)", "text": "Image (Initial), Text (Goal)"}
DOMAIN_TITLES = {
    "blocksworld": "Blocksworld",
    "sliding_tile": "Sliding-Tile Puzzle",
    "kitchen": "Kitchen",
    "shoebox": "Shoebox",
}
ROW_FIELDS = ("domain", "difficulty", "goal_mode", "n", "syntax_errors", "content_errors")
HIST_FIELDS = ("category", "count", "goal_mode")


@dataclass(frozen=True, order=True)
class ReportRow:
    domain: str
    difficulty: str
    goal_mode: str
    n: int
    syntax_errors: int
    content_errors: int


def _row_key(r: ReportRow) -> tuple:
    return (r.domain, DIFFICULTIES.index(r.difficulty) if r.difficulty in DIFFICULTIES else 99, r.difficulty,
            GOAL_MODES.index(r.goal_mode) if r.goal_mode in GOAL_MODES else 99, r.goal_mode)


@dataclass
class EvalReport:
    rows: list[ReportRow] = field(default_factory=list)
    # (category, goal_mode) -> count; only kitchen runs contribute
    histogram: dict[tuple[str, str], int] = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.rows = sorted(self.rows, key=_row_key)

    def cell(self, domain: str, difficulty: str, goal_mode: str) -> ReportRow | None:
        return next((r for r in self.rows if (r.domain, r.difficulty, r.goal_mode) == (domain, difficulty, goal_mode)),
                    None)

    @property
    def syntax_errors(self) -> int:
        return sum(r.syntax_errors for r in self.rows)

    @property
    def content_errors(self) -> int:
        return sum(r.content_errors for r in self.rows)

    def has_kitchen(self) -> bool:
        return any(r.domain == DomainId.KITCHEN.value for r in self.rows)


def aggregate(scores: list[ScenarioScore], metadata: list[dict] | dict | None = None) -> EvalReport:
    """Count errors per (domain, difficulty, goal_mode).

    metadata is one dict per run (or a single dict); differing adapters or
    template hashes raise MIXED_RUN.
    """
    metas = [metadata] if isinstance(metadata, dict) else list(metadata or [])
    for key in ("adapter", "template_hash"):
        values = {m.get(key) for m in metas if m.get(key) is not None}
        if len(values) > 1:
            raise EvalError("MIXED_RUN", f"results span several values of {key}: {sorted(values)}")
    merged: dict = {}
    for m in metas:
        for k, v in m.items():
            merged.setdefault(k, v)
    cells: dict[tuple[str, str, str], list[int]] = {}
    hist: dict[tuple[str, str], int] = {}
    kitchen_modes = set()
    for s in scores:
        c = cells.setdefault((s.domain.value, s.difficulty, s.goal_mode), [0, 0, 0])
        c[0] += 1
        c[1] += s.syntax_error
        c[2] += s.content_error
        if s.domain is DomainId.KITCHEN:
            kitchen_modes.add(s.goal_mode)
            for cat in s.kitchen:
                hist[(cat.value, s.goal_mode)] = hist.get((cat.value, s.goal_mode), 0) + 1
    for mode in kitchen_modes:
        for cat in KitchenErrorCategory:
            hist.setdefault((cat.value, mode), 0)
    rows = [ReportRow(d, lvl, mode, *vals) for (d, lvl, mode), vals in cells.items()]
    return EvalReport(rows, dict(sorted(hist.items())), merged)


# serialization


def report_to_json(r: EvalReport) -> str:
    data = {
        "metadata": r.metadata,
        "rows": [{f: getattr(row, f) for f in ROW_FIELDS} for row in r.rows],
        "kitchen_histogram": [{"category": c, "goal_mode": m, "count": n} for (c, m), n in sorted(r.histogram.items())],
    }
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def report_from_json(text: str) -> EvalReport:
    data = json.loads(text)
    rows = [ReportRow(**row) for row in data["rows"]]
    hist = {(h["category"], h["goal_mode"]): int(h["count"]) for h in data["kitchen_histogram"]}
    return EvalReport(rows, hist, data.get("metadata", {}))


def report_to_csv(r: EvalReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROW_FIELDS)
    for row in r.rows:
        w.writerow([getattr(row, f) for f in ROW_FIELDS])
    return buf.getvalue()


def histogram_to_csv(r: EvalReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HIST_FIELDS)
    for (cat, mode), n in sorted(r.histogram.items()):
        w.writerow([cat, n, mode])
    return buf.getvalue()


def report_from_csv(rows_text: str, histogram_text: str | None = None, metadata: dict | None = None) -> EvalReport:
    """Rebuild a report from its CSV files; CSV carries no run metadata."""
    rows = []
    for rec in csv.DictReader(io.StringIO(rows_text)):
        rows.append(ReportRow(rec["domain"], rec["difficulty"], rec["goal_mode"], int(rec["n"]),
                              int(rec["syntax_errors"]), int(rec["content_errors"])))
    hist = {}
    if histogram_text:
        for rec in csv.DictReader(io.StringIO(histogram_text)):
            hist[(rec["category"], rec["goal_mode"])] = int(rec["count"])
    return EvalReport(rows, hist, dict(metadata or {}))


def report_to_markdown(r: EvalReport) -> str:
    out = ["# Evaluation report", ""]
    if r.metadata:
        for key in sorted(r.metadata):
            out.append(f"- {key}: {r.metadata[key]}")
        out.append("")
    for domain in sorted({row.domain for row in r.rows}):
        out += [f"## {DOMAIN_TITLES.get(domain, domain)}", "",
                "| Input Type | Difficulty | Syntax Errors | Content Errors |",
                "|---|---|---|---|"]
        for mode in GOAL_MODES:
            first = True
            for lvl in DIFFICULTIES:
                row = r.cell(domain, lvl, mode)
                if row is None:
                    continue
                label = MODE_LABELS[mode] if first else ""
                first = False
                out.append(f"| {label} | {lvl.capitalize()} | {row.syntax_errors}/{row.n} | "
                           f"{row.content_errors}/{row.n} |")
        out.append("")
    if r.has_kitchen():
        modes = sorted({m for _, m in r.histogram}, key=lambda m: GOAL_MODES.index(m) if m in GOAL_MODES else 99)
        out += ["## Kitchen error types", "", "| Category | " + " | ".join(MODE_LABELS.get(m, m) for m in modes) + " |",
                "|---" * (len(modes) + 1) + "|"]
        for cat in KitchenErrorCategory:
            counts = " | ".join(str(r.histogram.get((cat.value, m), 0)) for m in modes)
            out.append(f"| {cat.value} | {counts} |")
        out.append("")
    return "\n".join(out)


FORMATS = ("csv", "json", "md")


def emit_report(r: EvalReport, fmt: str, out_dir: Path) -> list[Path]:
    """Write report.<fmt> (csv also writes kitchen_errors.csv); returns the paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    fmt = {"markdown": "md", "markdown-table": "md"}.get(fmt, fmt)
    if fmt == "csv":
        paths = [out_dir / "report.csv", out_dir / "kitchen_errors.csv"]
        paths[0].write_text(report_to_csv(r), encoding="utf-8", newline="")
        paths[1].write_text(histogram_to_csv(r), encoding="utf-8", newline="")
        return paths
    if fmt == "json":
        path = out_dir / "report.json"
        path.write_text(report_to_json(r), encoding="utf-8")
        return [path]
    if fmt == "md":
        path = out_dir / "report.md"
        path.write_text(report_to_markdown(r), encoding="utf-8")
        return [path]
    raise ValueError(f"unknown report format {fmt!r}; choose from {FORMATS}")
