"""Run an experiment and write its CSV traces, JSON manifest and optional SVG."""

from __future__ import annotations

import csv
import json
import logging
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional

from .. import __version__
from ..errors import DivergenceError
from ..samplers import SamplerConfig, TrajectoryRecord, run
from .config import ExperimentSpec, format_config
from .plotting import write_svg

__all__ = ["CSV_COLUMNS", "ExperimentResult", "run_experiment", "write_csv", "read_csv"]

log = logging.getLogger(__name__)

CSV_COLUMNS = ("iteration", "min_objective", "mean_objective", "threshold", "delta_hat")


@dataclass
class ExperimentResult:
    exit_code: int
    manifest: dict
    records: Dict[str, List[TrajectoryRecord]]


def _fmt(x) -> str:
    return "%.17g" % x


def write_csv(path, records) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([r.iteration, _fmt(r.min_objective), _fmt(r.mean_objective),
                             _fmt(r.threshold), _fmt(r.delta_hat)])


def read_csv(path) -> List[dict]:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    return [{k: (int(v) if k == "iteration" else float(v)) for k, v in row.items()} for row in rows]


def _config_dict(cfg: SamplerConfig) -> dict:
    return {
        "method": cfg.method,
        "eta": cfg.eta,
        "beta": cfg.beta,
        "iterations": cfg.iterations,
        "chains": cfg.chains,
        "seed": cfg.seed,
        "lambda": cfg.activation.lam,
        "theta": cfg.activation.theta,
        "c": cfg.activation.c,
        "epsilon": cfg.epsilon,
        "gamma_exponent": cfg.gamma_exponent,
        "init_mean": list(cfg.init_mean),
        "init_cov_scale": cfg.init_cov_scale,
    }


def run_experiment(spec: ExperimentSpec, output_dir: Optional[str] = None) -> ExperimentResult:
    """Run every method of ``spec`` in order and write the artifacts.

    A diverging method keeps its partial CSV, is marked in the manifest, and
    makes the exit code 1; the remaining methods still run.
    """
    out = Path(output_dir if output_dir is not None else spec.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    f = spec.objective.build()
    manifest = {
        "name": spec.name,
        "library_version": __version__,
        "objective": {"kind": spec.objective.kind, **spec.objective.params},
        "record_stride": spec.record_stride,
        "resolved_config": format_config(spec),
        "methods": {},
    }
    all_records = {}
    exit_code = 0
    for label, cfg in spec.methods.items():
        entry = {"config": _config_dict(cfg), "seed": cfg.seed, "csv": f"{label}.csv"}
        start = time.perf_counter()
        try:
            result = run(cfg, f, stride=spec.record_stride)
            records = result.records
            entry["status"] = "ok"
            entry["estimate"] = [float(v) for v in result.estimate]
        except DivergenceError as err:
            records = err.records
            entry["status"] = "diverged"
            entry["error"] = {"message": str(err), "chain": err.chain, "iteration": err.iteration}
            exit_code = 1
            log.error("%s: %s", label, err)
        entry["wall_clock_seconds"] = time.perf_counter() - start
        entry["records"] = len(records)
        if records:
            entry["final"] = {c: getattr(records[-1], c) for c in CSV_COLUMNS}
        write_csv(out / f"{label}.csv", records)
        manifest["methods"][label] = entry
        all_records[label] = records
    if spec.emit_svg:
        write_svg(out / f"{spec.name}.svg", all_records, title=spec.name)
        manifest["svg"] = f"{spec.name}.svg"
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return ExperimentResult(exit_code, manifest, all_records)
