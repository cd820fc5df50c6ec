"""Run manifest: timestamped log plus a one-line JSON header for result files."""

from __future__ import annotations

import json
import platform
from datetime import datetime
from pathlib import Path
from typing import Any, Optional

import psutil

from brickqec.utils.libw import verbo


def _jsonable(value: Any) -> Any:
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (str, int, float, bool)) or value is None:
        return value
    return str(value)


class RunManifest:
    def __init__(self, command: str, params: Optional[dict] = None, seed: Optional[int] = None):
        from brickqec import __version__

        self.command = command
        self.params = dict(params or {})
        self.seed = seed
        self.version = __version__
        self.started = datetime.now()
        self.finished: Optional[datetime] = None
        self.entries: list[str] = []
        self.system = {
            "python": platform.python_version(),
            "cpu_physical": psutil.cpu_count(logical=False),
            "sys_mem": psutil.virtual_memory().total,
        }

    def log_entry(self, text: str):
        timestamp = datetime.now().strftime("[%Y-%m-%d %H:%M:%S]")
        entry = f"{timestamp} {text.strip()}"
        self.entries.append(entry)
        verbo(f"[manifest] {entry[:80]}")

    def finish(self):
        self.finished = datetime.now()

    def as_dict(self) -> dict:
        out = {
            "command": self.command,
            "version": self.version,
            "seed": self.seed,
            "params": self.params,
            "started": self.started.isoformat(timespec="seconds"),
            "finished": self.finished.isoformat(timespec="seconds") if self.finished else None,
            "system": self.system,
        }
        if self.entries:
            out["log"] = list(self.entries)
        return _jsonable(out)

    def header_line(self, deterministic: bool = False) -> str:
        """One-line JSON header; *deterministic* drops timestamps and host details."""
        data = self.as_dict()
        if deterministic:
            for key in ("started", "finished", "system", "log"):
                data.pop(key, None)
        return "# manifest: " + json.dumps(data, sort_keys=True)

    def save(self, path: "str | Path") -> Path:
        out_path = Path(path)
        out_path.parent.mkdir(parents=True, exist_ok=True)
        out_path.write_text(json.dumps(self.as_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
        verbo(f"[manifest] Saved to {out_path}")
        return out_path


def parse_header(line: str) -> Optional[dict]:
    """Inverse of :meth:`RunManifest.header_line`; None for any other line."""
    prefix = "# manifest: "
    if not line.startswith(prefix):
        return None
    return json.loads(line[len(prefix):])
