"""Command-line entry point: ``njl-qet [--config FILE] [flags]``."""

from __future__ import annotations

import logging
import sys
from dataclasses import replace
from pathlib import Path

from .. import _kernels
from ..errors import ConfigError
from ..njl.lattice import format_model
from ..protocol import prepare_initial_state
from .circuit import export_circuit
from .config import parse_config
from .sweep import csv_text, json_text, run_sweep, write_results

log = logging.getLogger("njl_qet")


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    level = "WARNING"
    if "--log-level" in argv:
        i = argv.index("--log-level")
        if i + 1 < len(argv):
            level = argv[i + 1].upper()
    logging.basicConfig(level=getattr(logging, level, logging.WARNING),
                        format="%(asctime)s %(name)s %(levelname)s %(message)s")
    try:
        spec = parse_config(argv=argv)
    except ConfigError as exc:
        print(f"njl-qet: configuration error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"njl-qet: cannot read configuration: {exc}", file=sys.stderr)
        return 2

    base = spec.base
    log.info("backend=%s sites=%d steps=%d dt=%r grid=%dx%d", _kernels.BACKEND,
             base.lattice.sites, base.steps, base.dt, len(spec.lambda_a), len(spec.lambda_b))
    prepared = prepare_initial_state(base)

    if spec.export_circuit:
        first = replace(base, lambda_a=sorted(spec.lambda_a)[0], lambda_b=spec.lambda_b[0])
        Path(spec.export_circuit).write_text(export_circuit(first, prepared.model).render())
        log.info("circuit written to %s", spec.export_circuit)

    points = run_sweep(spec, prepared)
    reports = [p.report for p in points if p.ok]
    failed = [p for p in points if not p.ok]
    for p in failed:
        print(f"njl-qet: point lambda_a={p.lambda_a!r} lambda_b={p.lambda_b!r} failed: "
              f"{p.error}", file=sys.stderr)

    if reports:
        if spec.output:
            try:
                paths = write_results(reports, spec.format, spec.output, spec.split)
                out = Path(spec.output)
                out.with_name(out.stem + ".model.txt").write_text(format_model(prepared.model))
            except OSError as exc:
                print(f"njl-qet: {exc}", file=sys.stderr)
                return 1
            log.info("wrote %s", ", ".join(str(p) for p in paths))
        else:
            sys.stdout.write(csv_text(reports) if spec.format == "csv" else json_text(reports))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
