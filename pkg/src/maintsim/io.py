"""Result files and the run manifest.

Every output file embeds the manifest fields needed to reproduce it
(input hashes, scenario, seed, tool version); re-running with the same
inputs reproduces the data files byte for byte.  Wall-clock timestamps are
kept out of the data files for that reason and live only in the
stand-alone ``manifest.json``.

File schemas are versioned:

``records-v1`` (CSV)
    One row per iteration.  Columns: ``iteration``, ``t_op_sys``,
    ``t_degraded``, ``n_f_sys``, ``n_missions_completed``, then
    ``n_cm_<id>``, ``n_pm_<id>``, ``t_op_<id>`` for every component id and
    ``n_f_mod_<index>`` for every module.  Header comment lines start with
    ``#`` and carry the schema tag and the manifest as compact JSON.

``summary-v1`` / ``report-v1`` (JSON)
    ``{"schema": ..., "manifest": {...}, "summary"|"report": {...}}``.

``plotdata-v1`` (CSV)
    Per-component maintenance table for grouped bar charts with error
    bars: mean and 95% CI half-width of CM and PM counts under both
    strategies.
"""

from __future__ import annotations

import csv
import datetime
import hashlib
import json
from dataclasses import dataclass, field

from . import __version__
from .analysis import CbaReport, SummaryStats
from .model import ScenarioConfig
from .simulate import IterationRecord

RECORDS_SCHEMA = "records-v1"
SUMMARY_SCHEMA = "summary-v1"
REPORT_SCHEMA = "report-v1"
PLOTDATA_SCHEMA = "plotdata-v1"


def sha256_of(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def sha256_of_file(path) -> str:
    with open(path, "rb") as fh:
        return sha256_of(fh.read())


@dataclass(frozen=True)
class RunManifest:
    """Everything needed to reproduce a run's output files."""

    tool_version: str
    system_sha256: str
    scenario: dict
    seed: int
    iterations: int
    strategy_sha256: str | None = None
    baseline_sha256: str | None = None
    candidate_sha256: str | None = None
    created_at: str | None = None

    @classmethod
    def for_run(
        cls,
        system_sha256: str,
        scenario: ScenarioConfig,
        seed: int,
        iterations: int,
        **hashes,
    ) -> "RunManifest":
        return cls(
            tool_version=__version__,
            system_sha256=system_sha256,
            scenario={
                "t_life": scenario.t_life,
                "t_m": scenario.t_m,
                "c_f_sys": scenario.c_f_sys,
                "c_op": scenario.c_op,
                "degraded_factor": scenario.degraded_factor,
            },
            seed=seed,
            iterations=iterations,
            created_at=datetime.datetime.now(datetime.timezone.utc).isoformat(),
            **hashes,
        )

    def embedded(self) -> dict:
        """Manifest fields embedded in data files (timestamp-free)."""
        out = {
            "tool_version": self.tool_version,
            "system_sha256": self.system_sha256,
            "scenario": self.scenario,
            "seed": self.seed,
            "iterations": self.iterations,
        }
        for name in ("strategy_sha256", "baseline_sha256", "candidate_sha256"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        return out

    def full(self) -> dict:
        out = self.embedded()
        out["created_at"] = self.created_at
        return out


def write_manifest(path, manifest: RunManifest) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(manifest.full(), fh, indent=2)
        fh.write("\n")


def _num(x) -> str:
    return repr(float(x))


def write_records_csv(path, records: list[IterationRecord], component_ids, manifest: RunManifest) -> None:
    n_modules = len(records[0].n_f_module) if records else 0
    header = (
        ["iteration", "t_op_sys", "t_degraded", "n_f_sys", "n_missions_completed"]
        + [f"n_cm_{cid}" for cid in component_ids]
        + [f"n_pm_{cid}" for cid in component_ids]
        + [f"t_op_{cid}" for cid in component_ids]
        + [f"n_f_mod_{j}" for j in range(1, n_modules + 1)]
    )
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# schema: {RECORDS_SCHEMA}\n")
        fh.write(f"# manifest: {json.dumps(manifest.embedded(), sort_keys=True)}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        for r in records:
            writer.writerow(
                [r.iteration, _num(r.t_op_sys), _num(r.t_degraded), r.n_f_sys, r.n_missions_completed]
                + [int(v) for v in r.n_cm]
                + [int(v) for v in r.n_pm]
                + [_num(v) for v in r.t_op]
                + [int(v) for v in r.n_f_module]
            )


def write_summary_json(path, summary: SummaryStats, manifest: RunManifest) -> None:
    doc = {
        "schema": SUMMARY_SCHEMA,
        "manifest": manifest.embedded(),
        "summary": summary.to_jsonable(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


def write_report_json(path, report: CbaReport, manifest: RunManifest) -> None:
    doc = {
        "schema": REPORT_SCHEMA,
        "manifest": manifest.embedded(),
        "report": report.to_jsonable(),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True)
        fh.write("\n")


PLOT_COLUMNS = [
    "component",
    "label",
    "baseline_cm_mean",
    "baseline_cm_ci95",
    "baseline_pm_mean",
    "baseline_pm_ci95",
    "candidate_cm_mean",
    "candidate_cm_ci95",
    "candidate_pm_mean",
    "candidate_pm_ci95",
]


def write_plot_csv(path, rows: list[dict], manifest: RunManifest) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# schema: {PLOTDATA_SCHEMA}\n")
        fh.write(f"# manifest: {json.dumps(manifest.embedded(), sort_keys=True)}\n")
        writer = csv.writer(fh)
        writer.writerow(PLOT_COLUMNS)
        for row in rows:
            writer.writerow(
                [row["component"], row["label"]]
                + [_num(row[c]) for c in PLOT_COLUMNS[2:]]
            )
