"""Python access to the laundering audit core."""

import json

from ._laudit import (
    LauditError,
    asr,
    auc,
    launder,
    laundering_prompt,
    registers,
    run_cli,
    tpr_at_fpr,
)
from ._laudit import scenario_audit as _scenario_audit

__all__ = [
    "LauditError",
    "asr",
    "auc",
    "audit_scenario",
    "launder",
    "laundering_prompt",
    "registers",
    "run_cli",
    "tpr_at_fpr",
]


def audit_scenario(spec=None, search=None):
    """Build a synthetic scenario, audit it, return parsed verdict, trace and ground truth."""
    raw = _scenario_audit(json.dumps(spec or {}), json.dumps(search) if search else "")
    return {k: json.loads(v) for k, v in raw.items()}
