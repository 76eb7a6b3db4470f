"""Check records shared by every verification suite."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Dict, Optional

PASS, FAIL, SKIPPED, NA = "PASS", "FAIL", "SKIPPED", "NOT-APPLICABLE"
STATUSES = (PASS, FAIL, SKIPPED, NA)


@dataclass
class CheckReport:
    id: str
    tag: str
    suite: str
    params: Dict[str, int]
    status: str
    compared: int = 0
    skipped: int = 0
    counterexample: Optional[str] = None
    seconds: float = 0.0
    note: str = ""

    def to_json(self) -> dict:
        return asdict(self)
