"""CSV result files: a ``# manifest:`` header line, then csv.DictWriter rows."""

from __future__ import annotations

import csv
import io
import sys
from pathlib import Path
from typing import Iterable, Optional, TextIO

from brickqec.core.manifest import RunManifest, parse_header
from brickqec.utils.libw import verbo

SWEEP_FIELDS = ("r", "d", "n", "n_phys", "p", "trials", "failures_bulk", "bulk_qubits",
                "p_L_prime", "stderr", "p_L", "variant", "seed")


def _fmt(value, digits: int):
    if isinstance(value, float):
        return f"{value:.{digits}g}"
    return value


def write_rows(rows: Iterable[dict], fieldnames: Iterable[str], out: "str | Path | TextIO | None" = None,
               manifest: Optional[RunManifest] = None, digits: Optional[int] = None) -> None:
    """Write *rows* as CSV to a path, an open stream, or stdout."""
    if digits is None:
        from brickqec.core.config import get_config
        digits = get_config().csv_float_digits
    fields = list(fieldnames)

    def _write(f: TextIO):
        if manifest is not None:
            f.write(manifest.header_line() + "\n")
        writer = csv.DictWriter(f, fieldnames=fields, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt(v, digits) for k, v in row.items()})

    if out is None:
        _write(sys.stdout)
    elif isinstance(out, (str, Path)):
        path = Path(out)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", newline="") as f:
            _write(f)
        verbo(f"[results] Wrote {path}")
    else:
        _write(out)


def read_rows(source: "str | Path | TextIO") -> tuple[Optional[dict], list[dict]]:
    """(manifest or None, rows) from a result CSV; numeric fields become float/int."""
    if isinstance(source, (str, Path)):
        text = Path(source).read_text(encoding="utf-8")
    else:
        text = source.read()
    manifest = None
    body = []
    for line in text.splitlines():
        if line.startswith("#"):
            manifest = parse_header(line) or manifest
            continue
        if line.strip():
            body.append(line)
    rows = [{k: _parse(v) for k, v in row.items()} for row in csv.DictReader(io.StringIO("\n".join(body)))]
    return manifest, rows


def _parse(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except (TypeError, ValueError):
            pass
    return value
