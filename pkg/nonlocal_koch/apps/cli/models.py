from dataclasses import dataclass, field
from typing import Dict


@dataclass(frozen=True)
class RunResult:
    """File contents keyed by file name, plus the summary a command prints."""
    outputs: Dict[str, bytes]
    report: Dict = field(default_factory=dict)
    failed: bool = False
