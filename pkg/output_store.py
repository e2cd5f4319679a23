"""
Output Store - byte-stable files for every experiment.

File Layout:
    simulate     -> <out>                 trajectory CSV
    scenarios    -> <out>                 comparison CSV
    sensitivity  -> <out>/summary.csv     horizon statistics with published values
                    <out>/bands.csv       per-time percentiles per series
    sweep        -> <out>                 heatmap CSV
    threshold    -> <out>                 JSON object
    calibrate    -> <out>                 configuration document (+ <out>.json report)
    structure    -> <out>                 influence edges CSV

CSV: header always present, LF line endings, shortest round-trip floats.
JSON: sorted keys, two-space indent, trailing newline.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from core.integrator import Trajectory
from experiments.scenarios import published_anchor
from experiments.sensitivity import EnsembleSummary
from experiments.sweep import HeatmapTable

logger = logging.getLogger(__name__)


COMPARISON_COLUMNS = [
    "scenario", "metric", "baseline_value", "scenario_value",
    "abs_reduction", "pct_reduction", "published_mean_pct",
]

SUMMARY_COLUMNS = [
    "scenario", "metric", "mean_reduction", "mean_pct", "median_pct", "lo95", "hi95",
    "draws", "failed", "published_mean_pct", "published_median_pct", "published_lo95", "published_hi95",
]

EDGE_COLUMNS = ["source", "target", "polarity", "kind"]


class OutputStore:
    """Writes result files; every writer returns the path it wrote."""

    LINE_TERMINATOR = "\n"
    ENCODING = "utf-8"

    # ==================== Path Builders ====================

    def _summary_path(self, directory: Path) -> Path:
        return directory / "summary.csv"

    def _bands_path(self, directory: Path) -> Path:
        return directory / "bands.csv"

    def _report_path(self, path: Path) -> Path:
        return path.with_name(path.name + ".json")

    # ==================== Primitives ====================

    def write_frame(self, frame: pd.DataFrame, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        frame.to_csv(path, index=False, lineterminator=self.LINE_TERMINATOR, encoding=self.ENCODING)
        logger.info("wrote path=%s rows=%d", path, len(frame))
        return path

    def write_json(self, payload: Dict, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
        with open(path, "w", encoding=self.ENCODING, newline="\n") as f:
            f.write(text)
        logger.info("wrote path=%s", path)
        return path

    def write_text(self, text: str, path) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with open(path, "w", encoding=self.ENCODING, newline="\n") as f:
            f.write(text)
        logger.info("wrote path=%s", path)
        return path

    # ==================== Experiments ====================

    def save_trajectory(self, traj: Trajectory, path) -> Path:
        return self.write_frame(traj.to_frame(), path)

    def save_comparisons(self, rows: List[tuple], path) -> Path:
        """Rows of (scenario_id, ComparisonSummary) with the published mean percent."""
        records = []
        for scenario_id, summary in rows:
            anchor = published_anchor(scenario_id, summary.metric)
            records.append({
                "scenario": scenario_id,
                "metric": summary.metric,
                "baseline_value": summary.baseline_value,
                "scenario_value": summary.scenario_value,
                "abs_reduction": summary.abs_reduction,
                "pct_reduction": summary.pct_reduction,
                "published_mean_pct": anchor.mean_pct if anchor else None,
            })
        return self.write_frame(pd.DataFrame(records, columns=COMPARISON_COLUMNS), path)

    def save_ensemble(self, summaries: List[EnsembleSummary], directory) -> Dict[str, Path]:
        directory = Path(directory)
        rows = [row for summary in summaries for row in summary.summary_rows()]
        bands = pd.concat([s.bands_frame().assign(scenario=s.scenario_id) for s in summaries],
                          ignore_index=True)
        bands = bands[["scenario"] + [c for c in bands.columns if c != "scenario"]]
        return {
            "summary": self.write_frame(pd.DataFrame(rows, columns=SUMMARY_COLUMNS),
                                        self._summary_path(directory)),
            "bands": self.write_frame(bands, self._bands_path(directory)),
        }

    def save_heatmap(self, table: HeatmapTable, path) -> Path:
        return self.write_frame(table.to_frame(), path)

    def save_edges(self, rows: List[dict], path) -> Path:
        return self.write_frame(pd.DataFrame(rows, columns=EDGE_COLUMNS), path)

    def save_calibration(self, document: str, report: Optional[Dict], path) -> Path:
        """Fitted configuration document; the search report goes next to it as JSON."""
        path = self.write_text(document, path)
        if report is not None:
            self.write_json(report, self._report_path(path))
        return path
