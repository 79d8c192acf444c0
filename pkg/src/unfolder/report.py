"""JSON run reports."""

from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field


def digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


@dataclass
class RunReport:
    command: str
    input_digest: str = ""
    u: list = field(default_factory=lambda: [0.0, 0.0, 1.0])
    seed: int = 0
    tree: dict = None
    general_position: dict = None
    simplicity: dict = None
    stretch: dict = None
    tracing: dict = None
    verify: dict = None
    sweep: dict = None
    info: dict = None
    timings: dict = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "RunReport":
        return cls(**json.loads(text))
