"""Verification outcome records and the JSON report document."""
# Copyright 2023 Canonical Ltd.
# See LICENSE file for licensing details.

import logging
import time
from dataclasses import asdict, dataclass, replace
from typing import Dict, Iterable, List, Optional

from jsonschema import exceptions, validate

# Increment this major API version when introducing breaking changes
LIBAPI = 0

# Increment this PATCH version before tagging a release or reset
# to 0 if you are raising the major API version
LIBPATCH = 2

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
SYMBOLIC = "symbolic"
SAMPLED = "sampled-exact"
VARIABLE = "variable"
DEGREE = "degree"
BOTH = "both"

REPORT_VERSION = f"v{LIBAPI}.{LIBPATCH}"

REPORT_JSON_SCHEMA = {
    "$schema": "http://json-schema.org/draft-04/schema#",
    "type": "object",
    "title": "verification report",
    "properties": {
        "relation": {"type": "string"},
        "representation": {"type": "string", "enum": [VARIABLE, DEGREE, BOTH]},
        "mode": {"type": "string", "enum": [SYMBOLIC, SAMPLED]},
        "status": {"type": "string", "enum": [PASS, FAIL]},
        "witness": {"type": ["string", "null"]},
        "elapsed_ms": {"type": "number", "minimum": 0},
    },
    "required": ["relation", "representation", "mode", "status", "witness", "elapsed_ms"],
    "additionalProperties": False,
}

DOCUMENT_JSON_SCHEMA = {
    "$schema": "http://json-schema.org/draft-04/schema#",
    "type": "object",
    "title": "verification run",
    "properties": {
        "version": {"type": "string"},
        "catalogue_sha256": {"type": "string", "pattern": "^[0-9a-f]{64}$"},
        "config": {"type": "object"},
        "summary": {
            "type": "object",
            "properties": {
                "total": {"type": "integer", "minimum": 0},
                "passed": {"type": "integer", "minimum": 0},
                "failed": {"type": "integer", "minimum": 0},
            },
            "required": ["total", "passed", "failed"],
        },
        "reports": {"type": "array", "items": REPORT_JSON_SCHEMA},
    },
    "required": ["version", "catalogue_sha256", "config", "summary", "reports"],
    "additionalProperties": False,
}


class InvalidReportError(Exception):
    """Raised when a report document does not follow the JSON schema."""

    pass


@dataclass(frozen=True)
class VerificationReport:
    """Outcome of one verification.

    - relation: catalogue id or check name.
    - representation: variable, degree or both.
    - mode: symbolic or sampled-exact.
    - status: pass or fail.
    - witness: first nonzero residual term or failing sample, None on pass.
    - elapsed_ms: wall time spent, in milliseconds.
    """

    relation: str
    representation: str
    mode: str
    status: str
    witness: Optional[str] = None
    elapsed_ms: float = 0

    @property
    def passed(self) -> bool:
        """True when the check passed."""
        return self.status == PASS

    def without_timing(self) -> "VerificationReport":
        """Copy with elapsed_ms cleared, for byte-identical reruns."""
        return replace(self, elapsed_ms=0)

    def to_dict(self) -> Dict:
        """JSON-ready mapping in schema field order."""
        return asdict(self)


def outcome(
    relation: str,
    representation: str,
    mode: str,
    witness: Optional[str],
    elapsed_ms: float = 0,
) -> VerificationReport:
    """Build a report that passes exactly when there is no witness."""
    report = VerificationReport(
        relation=relation,
        representation=representation,
        mode=mode,
        status=PASS if witness is None else FAIL,
        witness=witness,
        elapsed_ms=round(elapsed_ms, 3),
    )
    if report.passed:
        logger.info("%s [%s, %s]: pass", relation, representation, mode)
    else:
        logger.error("%s [%s, %s]: fail, witness %s", relation, representation, mode, witness)
    return report


class Stopwatch:
    """Elapsed wall time in milliseconds since creation."""

    def __init__(self) -> None:
        self._start = time.perf_counter()

    @property
    def elapsed_ms(self) -> float:
        """Milliseconds elapsed so far."""
        return (time.perf_counter() - self._start) * 1000.0


def summarize(reports: Iterable[VerificationReport]) -> Dict[str, int]:
    """Count totals, passes and failures."""
    reports = list(reports)
    passed = sum(1 for report in reports if report.passed)
    return {"total": len(reports), "passed": passed, "failed": len(reports) - passed}


def build_document(
    reports: Iterable[VerificationReport], config: Dict, catalogue_sha256: str
) -> Dict:
    """Assemble and validate the JSON report document."""
    reports = list(reports)
    document = {
        "version": REPORT_VERSION,
        "catalogue_sha256": catalogue_sha256,
        "config": config,
        "summary": summarize(reports),
        "reports": [report.to_dict() for report in reports],
    }
    validate_document(document)
    return document


def validate_document(document: Dict) -> None:
    """Raise InvalidReportError unless the document follows DOCUMENT_JSON_SCHEMA."""
    try:
        validate(instance=document, schema=DOCUMENT_JSON_SCHEMA)
    except exceptions.ValidationError as e:
        raise InvalidReportError(str(e.message)) from e


def reports_from_document(document: Dict) -> List[VerificationReport]:
    """Rebuild report records from a validated document."""
    validate_document(document)
    return [VerificationReport(**entry) for entry in document["reports"]]
