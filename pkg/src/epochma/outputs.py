"""CSV and SVG artifacts for a batch of runs."""

from __future__ import annotations

import csv
import math
from pathlib import Path
from xml.sax.saxutils import escape

from epochma import indicators
from epochma.harness import METRICS

SUMMARY_FIELDS = ["block", "label", "algorithm", "p_ls", "p_em", "ig", "fg", "runs"] + [
    f"{m}_{stat}" for m in METRICS for stat in ("best", "median", "qd", "cqd", "p", "mark")
] + ["error"]

PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
           "#bcbd22", "#17becf"]


def _fmt(x) -> str:
    if isinstance(x, float):
        return "" if math.isnan(x) else f"{x:.6g}"
    return str(x)


def summary_records(rows) -> list:
    records = []
    for row in rows:
        spec, w = row.spec, row.spec.window
        rec = {
            "block": row.block,
            "label": spec.label,
            "algorithm": spec.algorithm,
            "p_ls": _fmt(w.p_ls) if w else "",
            "p_em": _fmt(w.p_em) if w else "",
            "ig": w.start_gen if w else "",
            "fg": w.end_gen if w else "",
            "runs": len(row.results),
            "error": row.error,
        }
        for m in METRICS:
            s = row.summaries.get(m)
            if s is None:
                continue
            rec.update({
                f"{m}_best": _fmt(s.best),
                f"{m}_median": _fmt(s.median),
                f"{m}_qd": _fmt(s.qd),
                f"{m}_cqd": _fmt(s.cqd),
                f"{m}_p": _fmt(s.p_value),
                f"{m}_mark": s.mark,
            })
        records.append(rec)
    return records


def write_summary(path, rows):
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=SUMMARY_FIELDS, lineterminator="\n")
        w.writeheader()
        for rec in summary_records(rows):
            w.writerow(rec)


def _polyline_svg(series, xlabel: str, ylabel: str, title: str, width=640, height=480) -> str:
    margin = 60
    xs = [x for _, (px, _) in series for x in px]
    ys = [y for _, (_, py) in series for y in py]
    if xs:
        x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    else:
        x0, x1, y0, y1 = 0.0, 1.0, 0.0, 1.0
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0

    def sx(x):
        return margin + (x - x0) / (x1 - x0) * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{width / 2}" y="24" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" y2="{height - margin}" stroke="black"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" stroke="black"/>',
        f'<text x="{width / 2}" y="{height - 15}" text-anchor="middle" font-size="13">{escape(xlabel)}</text>',
        f'<text x="18" y="{height / 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 18 {height / 2})">{escape(ylabel)}</text>',
        f'<text x="{margin}" y="{height - margin + 16}" font-size="10">{x0:.4g}</text>',
        f'<text x="{width - margin}" y="{height - margin + 16}" text-anchor="end" font-size="10">{x1:.4g}</text>',
        f'<text x="{margin - 4}" y="{height - margin}" text-anchor="end" font-size="10">{y0:.4g}</text>',
        f'<text x="{margin - 4}" y="{margin + 4}" text-anchor="end" font-size="10">{y1:.4g}</text>',
    ]
    for i, (label, (px, py)) in enumerate(series):
        colour = PALETTE[i % len(PALETTE)]
        pts = " ".join(f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(px, py))
        out.append(f'<polyline fill="none" stroke="{colour}" stroke-width="1.5" points="{pts}">'
                   f"<title>{escape(label)}</title></polyline>")
        ly = margin + 16 * i
        out.append(f'<text x="{width - margin - 150}" y="{ly}" font-size="11" fill="{colour}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def per_algorithm_fronts(rows) -> list:
    """(label, combined front over that configuration's runs) for every finished row."""
    return [(row.spec.label, indicators.combine_fronts([r.front for r in row.results]))
            for row in rows if row.results]


def write_figures(out_dir, rows, risk_free_rate: float = 0.0):
    out_dir = Path(out_dir)
    fronts = per_algorithm_fronts(rows)
    panels = {
        "fronts.svg": ("risk", "return", lambda f: (f.risk.tolist(), f.ret.tolist())),
        "sharpe_vs_risk.svg": ("risk", "Sharpe index",
                               lambda f: (f.risk.tolist(), indicators.front_sharpes(f, risk_free_rate).tolist())),
        "sharpe_vs_return.svg": ("return", "Sharpe index",
                                 lambda f: (f.ret.tolist(), indicators.front_sharpes(f, risk_free_rate).tolist())),
    }
    for name, (xl, yl, proj) in panels.items():
        series = [(label, proj(f)) for label, f in fronts]
        title = "Combined Pareto fronts" if name == "fronts.svg" else f"Sharpe index vs {xl}"
        (out_dir / name).write_text(_polyline_svg(series, xl, yl, title), encoding="utf-8")


def emit_outputs(out_dir, rows, context=None, risk_free_rate: float = 0.0) -> Path:
    """Write summary.csv, per-run and combined front CSVs and the three SVG panels."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_summary(out_dir / "summary.csv", rows)
    for row in rows:
        for r in row.results:
            indicators.write_front(out_dir / f"front_{row.spec.slug}_{r.run_index}.csv", r.front, risk_free_rate)
    combined = context.front if context is not None else indicators.Front.empty()
    indicators.write_front(out_dir / "front_combined.csv", combined, risk_free_rate)
    write_figures(out_dir, rows, risk_free_rate)
    return out_dir
