import hashlib
import json
from typing import Any, Dict, Iterable, List

from tabulate import tabulate


def canonical_json(obj: Any) -> str:
    """Deterministic JSON text: sorted keys, two-space indent, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def inputs_digest(command: str, options: Dict[str, Any], blobs: Iterable[bytes] = ()) -> str:
    """sha256 over the command name, its options and the raw input files."""
    h = hashlib.sha256()
    h.update(command.encode("utf-8"))
    h.update(json.dumps(options, sort_keys=True, default=str).encode("utf-8"))
    for blob in blobs:
        h.update(blob)
    return h.hexdigest()


def _cell(value: Any) -> str:
    if isinstance(value, (dict, list)):
        return json.dumps(value, sort_keys=True)
    return str(value)


def render_table(reports: List[Dict[str, Any]]) -> str:
    """Human summary: one row per (report, section, key)."""
    rows = []
    for report in reports:
        for section in ("outputs", "verification", "error"):
            for key, value in sorted((report.get(section) or {}).items()):
                rows.append([report["command"], section, key, _cell(value)])
        if "wall_time" in report:
            rows.append([report["command"], "timing", "wall_time", f"{report['wall_time']:.6f}"])
    return tabulate(rows, headers=["command", "section", "key", "value"], tablefmt="github") + "\n"
