"""Deterministic report assembly.

Reports are byte-identical for identical (config, seed): keys are sorted,
no timestamps are embedded, and thread count never appears (it can only
affect speed). Wall time goes to stderr, not into the report.
"""

from __future__ import annotations

import json
import os

from . import __version__


def _git_hash():
    """Commit hash of the enclosing checkout, if any (stable per checkout)."""
    path = os.getcwd()
    while True:
        git_dir = os.path.join(path, ".git")
        if os.path.isdir(git_dir):
            try:
                with open(os.path.join(git_dir, "HEAD")) as fh:
                    head = fh.read().strip()
                if head.startswith("ref: "):
                    ref = head[5:]
                    with open(os.path.join(git_dir, ref)) as fh:
                        return fh.read().strip()
                return head
            except OSError:
                return None
        parent = os.path.dirname(path)
        if parent == path:
            return None
        path = parent


def provenance():
    out = {"tool": "monoforge", "version": __version__}
    git = _git_hash()
    if git:
        out["git"] = git
    return out


def sanitize(obj):
    """Recursively convert report payloads to JSON-native values."""
    from fractions import Fraction

    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (set, frozenset)):
        return sorted(sanitize(x) for x in obj)
    if isinstance(obj, (list, tuple)):
        return [sanitize(x) for x in obj]
    if isinstance(obj, dict):
        return {str(k): sanitize(v) for k, v in obj.items()}
    if isinstance(obj, float):
        return round(obj, 12)
    return obj


def check(check_id, passed, **data):
    """One report line; passed may be None for informational entries."""
    return {"id": check_id, "passed": passed, "data": sanitize(data)}


def make_report(command, config, checks):
    failed = [c["id"] for c in checks if c["passed"] is False]
    return {
        "command": command,
        "config": sanitize(config),
        "checks": checks,
        "failed": failed,
        "ok": not failed,
        "provenance": provenance(),
    }


def canonical_json(obj):
    return json.dumps(obj, sort_keys=True, indent=2, default=_default) + "\n"


def _default(obj):
    from fractions import Fraction

    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"not JSON-serializable: {type(obj)}")
