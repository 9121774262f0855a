"""Report documents: {"version", "config", "checks": [...]}."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Iterable

from .. import __version__
from .checks import CheckReport


def build_report(config: dict, reports: Iterable[CheckReport], timing: bool = True) -> dict:
    return {"version": __version__, "config": config, "checks": [r.to_json(timing) for r in reports]}


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, default=_default)


def _default(obj):
    # numpy scalars and Fractions end up here
    if hasattr(obj, "item"):
        return obj.item()
    return str(obj)


def write_report(path: str | Path, doc: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(doc) + "\n")
    return path


def strip_timing(doc: dict) -> dict:
    """Copy without the timing fields, for determinism comparisons."""
    out = dict(doc)
    out["checks"] = [{k: v for k, v in c.items() if k != "timing"} for c in doc["checks"]]
    return out


def render_text(doc: dict) -> str:
    lines = [f"biasrank {doc['version']}"]
    if not doc["checks"]:
        lines.append("no checks run")
    for c in doc["checks"]:
        label = c["name"]
        if "criterion" in c["params"]:
            label = f"[{c['params']['criterion']}] {label}"
        elapsed = c.get("timing", {}).get("elapsed_s")
        suffix = f" ({elapsed:.2f}s)" if elapsed is not None else ""
        lines.append(f"{c['status'].upper():7} {label}{suffix}")
        for k, v in c["stats"].items():
            lines.append(f"        {k}: {json.dumps(v, default=_default)}")
        for w in c["witnesses"][:3]:
            lines.append(f"        witness: {json.dumps(w, default=_default)[:400]}")
    return "\n".join(lines)
