# ipcondense/reporting.py
# Writes result rows as tidy CSV or JSON, each file opening with a metadata block (config echo, seed, version).

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Sequence

import config

META_PREFIX = "# "


def metadata(cfg) -> Dict:
    """Everything needed to rerun the command that produced a file."""
    echo = cfg.echo() if hasattr(cfg, "echo") else dict(cfg)
    return {
        "project": config.PROJECT_NAME,
        "version": config.VERSION,
        "command": echo.get("command"),
        "seed": echo.get("seed"),
        "config": echo,
    }


def _cell(v):
    if isinstance(v, float):
        return repr(v)
    if v is None:
        return ""
    return v


def export_rows_csv(rows: Iterable[Dict], keys: Sequence[str], path: Path, meta: Optional[Dict] = None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as f:
        if meta is not None:
            f.write(f"{META_PREFIX}{json.dumps(meta, sort_keys=True)}\n")
        w = csv.DictWriter(f, fieldnames=list(keys), extrasaction="ignore", lineterminator="\n")
        w.writeheader()
        for r in rows:
            w.writerow({k: _cell(r.get(k, "")) for k in keys})


def export_rows_json(rows: Iterable[Dict], path: Path, meta: Optional[Dict] = None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump({"metadata": meta or {}, "rows": list(rows)}, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")


def export_rows(rows: List[Dict], keys: Sequence[str], path: Path, fmt: str, meta: Optional[Dict] = None):
    if not config.is_supported_format(fmt):
        raise ValueError(f"unsupported format '{fmt}'")
    if fmt == "json":
        export_rows_json(rows, path, meta)
    else:
        export_rows_csv(rows, keys, path, meta)


def export_summary_json(summary: Dict, path: Path, meta: Optional[Dict] = None):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump({"metadata": meta or {}, "summary": summary}, f, ensure_ascii=False, indent=2, sort_keys=True)
        f.write("\n")


def read_metadata(path: Path) -> Dict:
    """Metadata block of a file written by this module."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if text.startswith(META_PREFIX):
        return json.loads(text.splitlines()[0][len(META_PREFIX):])
    return json.loads(text).get("metadata", {})
