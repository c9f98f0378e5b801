import json
import os
from datetime import datetime, timezone
from enum import Enum

from constants import TOOL_VERSION
from errors import ConfigurationError


class RunStatus(Enum):
    RUNNING = "running"
    OK = "ok"
    FAILED = "failed"
    TERMINATED = "terminated"


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class RunManifest:
    """
    Record of one run: what was asked for, when it ran and which files it left.

    Attributes:
        config_hash: sha256 of the fully defaulted config document
        physics_hash: sha256 of the physics sections, used to refuse comparing unlike runs
        mode: experiment mode
        seed: master seed
        files: emitted files relative to the output directory, in emission order
        summaries: one dict per sub-run (per P for sweeps)
    """

    def __init__(
        self,
        config_hash: str,
        physics_hash: str,
        mode: str,
        seed: int,
        tool_version: str = TOOL_VERSION,
        started_at: str = None,
        finished_at: str = None,
        status: RunStatus = RunStatus.RUNNING,
        files: list[str] = None,
        summaries: list[dict] = None,
        error: str = None,
    ):
        self.config_hash = config_hash
        self.physics_hash = physics_hash
        self.mode = mode
        self.seed = seed
        self.tool_version = tool_version
        self.started_at = started_at or utc_now()
        self.finished_at = finished_at
        self.status = RunStatus(status)
        self.files = list(files or [])
        self.summaries = list(summaries or [])
        self.error = error

    def add_file(self, name: str):
        if name not in self.files:
            self.files.append(name)

    def finalize(self, status: RunStatus, error: str = None):
        self.status = RunStatus(status)
        self.error = error
        self.finished_at = utc_now()

    def to_dict(self) -> dict:
        return {
            "config_hash": self.config_hash,
            "physics_hash": self.physics_hash,
            "mode": self.mode,
            "seed": self.seed,
            "tool_version": self.tool_version,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "status": self.status.value,
            "files": self.files,
            "summaries": self.summaries,
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, document: dict) -> "RunManifest":
        return cls(**document)

    def write(self, path: str):
        temporary = f"{path}.tmp"
        with open(temporary, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(temporary, path)

    @classmethod
    def load(cls, path: str) -> "RunManifest":
        try:
            with open(path, encoding="utf-8") as fh:
                return cls.from_dict(json.load(fh))
        except (OSError, json.JSONDecodeError, TypeError) as e:
            raise ConfigurationError(f"cannot read manifest {path}: {e}")

    def __repr__(self):
        return (
            f"RunManifest[mode={self.mode}, seed={self.seed}, status={self.status.value}, "
            f"files={len(self.files)}]"
        )

