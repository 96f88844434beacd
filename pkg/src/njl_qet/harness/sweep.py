"""Parameter sweeps over (lambda_A, lambda_B) and result files."""

from __future__ import annotations

import csv
import io
import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Optional

from ..protocol import (EnergyReport, Prepared, alice_stage, prepare_initial_state,
                        run_protocol)
from .config import SweepSpec

log = logging.getLogger(__name__)

CSV_COLUMNS = ("lambda_a", "lambda_b", "delta_e_a", "delta_e_b", "delta_e_net", "mu", "p_mu")


@dataclass
class SweepPoint:
    lambda_a: float
    lambda_b: float
    report: Optional[EnergyReport] = None
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.report is not None


def grid(spec: SweepSpec) -> list[tuple[float, float]]:
    """lambda_B-major (in the given order), lambda_A ascending."""
    return [(la, lb) for lb in spec.lambda_b for la in sorted(spec.lambda_a)]


def run_sweep(spec: SweepSpec, prepared: Optional[Prepared] = None) -> list[SweepPoint]:
    """One protocol run per grid point, sharing the vacuum and the pre-Bob evolution.

    The evolved state only depends on lambda_A, so it is computed once per
    lambda_A value.  A failing point is recorded and the sweep continues.
    """
    prepared = prepared if prepared is not None else prepare_initial_state(spec.base)
    stages = {}
    points = []
    for la, lb in grid(spec):
        cfg = replace(spec.base, lambda_a=la, lambda_b=lb)
        try:
            if la not in stages:
                stages[la] = alice_stage(cfg, prepared)
            report = run_protocol(cfg, prepared, stages[la])
            points.append(SweepPoint(la, lb, report))
        except Exception as exc:  # a failed point must not abort the sweep
            log.error("grid point lambda_a=%r lambda_b=%r failed: %s", la, lb, exc)
            points.append(SweepPoint(la, lb, error=f"{type(exc).__name__}: {exc}"))
    return points


def _g17(x: float) -> str:
    return format(x, ".17g")


def csv_text(reports: list[EnergyReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in reports:
        w.writerow([_g17(r.lambda_a), _g17(r.lambda_b), _g17(r.dE_A), _g17(r.dE_B),
                    _g17(r.dE_net), str(r.mu), _g17(r.p_mu)])
    return buf.getvalue()


def json_text(reports: list[EnergyReport]) -> str:
    return json.dumps([r.to_dict() for r in reports], indent=2, sort_keys=True) + "\n"


def write_results(reports: list[EnergyReport], fmt: str, path, split: bool = False) -> list[Path]:
    """Write ``reports``; with ``split`` one file per lambda_B (``name_lb0.5.csv``)."""
    if not reports:
        raise ValueError("no reports to write")
    if fmt not in ("csv", "json"):
        raise ValueError(f"unknown format {fmt!r}")
    render = csv_text if fmt == "csv" else json_text
    path = Path(path)
    groups = {}
    if split:
        for r in reports:
            groups.setdefault(r.lambda_b, []).append(r)
    else:
        groups[None] = list(reports)
    written = []
    for lb, group in groups.items():
        target = path if lb is None else path.with_name(f"{path.stem}_lb{lb:g}{path.suffix}")
        try:
            target.write_text(render(group))
        except OSError as exc:
            raise OSError(f"cannot write results to {target}: {exc}") from exc
        written.append(target)
    return written


def read_results(path, fmt: Optional[str] = None):
    """Inverse of :func:`write_results` for one file.

    JSON gives back ``EnergyReport`` objects; CSV gives dicts keyed by the CSV
    columns with numbers parsed.
    """
    path = Path(path)
    fmt = fmt or path.suffix.lstrip(".")
    text = path.read_text()
    if fmt == "json":
        return [EnergyReport.from_dict(d) for d in json.loads(text)]
    rows = []
    for row in csv.DictReader(io.StringIO(text)):
        rows.append({k: (int(v) if k == "mu" else float(v)) for k, v in row.items()})
    return rows
