"""Append-only run ledger: one RunRecord JSON document per line"""
import json
import logging
import os
from datetime import datetime
from typing import Any, Dict, Iterator, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field

from config import ENGINE_VERSION, settings
from digests import digest_manager
from errors import InvalidCertificate, Verdict, failed, passed
from verification import Artifact, verify_artifact

logger = logging.getLogger(__name__)


class RunRecord(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    command: str
    arguments: Dict[str, Any] = Field(default_factory=dict)
    input_hashes: Dict[str, str] = Field(default_factory=dict, alias="input-hashes")
    artifact: Optional[Artifact] = None
    artifact_path: Optional[str] = Field(default=None, alias="artifact-path")
    artifact_hash: str = Field(default="", alias="artifact-hash")
    exit_status: int = Field(default=0, alias="exit-status")
    wall_time: float = Field(default=0.0, alias="wall-time")
    engine_version: str = Field(default=ENGINE_VERSION, alias="engine-version")
    timestamp: datetime = Field(default_factory=datetime.utcnow)
    signature: str = ""

    def signed_content(self) -> Dict[str, Any]:
        return self.model_dump(mode="json", by_alias=True, exclude={"signature"})


def canonical_arguments(arguments: Dict[str, Any]) -> Dict[str, Any]:
    """Drops unset options so equal invocations hash alike"""
    return {k: v for k, v in sorted(arguments.items()) if v is not None and not callable(v)}


def input_hashes(arguments: Dict[str, Any], input_files: Optional[Dict[str, str]] = None) -> Dict[str, str]:
    """Hash of the arguments plus one content hash per input file, keyed by its option"""
    hashes = {"arguments": digest_manager.content_hash(arguments)}
    for option, path in sorted((input_files or {}).items()):
        try:
            hashes[f"file:{option}"] = digest_manager.file_hash(path)
        except OSError as e:
            logger.warning(f"⚠️ Could not hash input {option}={path}: {e}")
    return hashes


def new_record(
    command: str,
    arguments: Dict[str, Any],
    artifact: Optional[Artifact] = None,
    input_files: Optional[Dict[str, str]] = None,
    **extra,
) -> RunRecord:
    arguments = json.loads(json.dumps(canonical_arguments(arguments), default=str))
    record = RunRecord(
        command=command,
        arguments=arguments,
        input_hashes=input_hashes(arguments, input_files),
        artifact=artifact,
        artifact_hash=digest_manager.content_hash(artifact) if artifact is not None else "",
        **extra,
    )
    return record


# Create the ledger file
def init_ledger(path: Optional[str] = None) -> str:
    path = path or settings.LEDGER_PATH
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    if not os.path.exists(path):
        open(path, "a", encoding="utf-8").close()
        logger.info(f"✅ Ledger created at {path}")
    return path


def append_record(record: RunRecord, path: Optional[str] = None) -> RunRecord:
    path = init_ledger(path)
    record = record.model_copy(update={"signature": digest_manager.sign(record.signed_content())})
    line = digest_manager.canonical_json(record)
    with open(path, "a", encoding="utf-8") as fh:
        fh.write(line + "\n")
    logger.debug(f"ledger += {record.command} ({record.artifact_hash or 'no artifact'})")
    return record


def read_records(path: Optional[str] = None) -> Iterator[Tuple[int, RunRecord]]:
    path = path or settings.LEDGER_PATH
    if not os.path.exists(path):
        raise InvalidCertificate(f"no ledger at {path}")
    with open(path, "r", encoding="utf-8") as fh:
        for number, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                yield number, RunRecord.model_validate_json(line)
            except ValueError as e:
                raise InvalidCertificate(f"ledger line {number} is not a run record: {e}")


def verify_record(record: RunRecord) -> Verdict:
    if not digest_manager.verify_signature(record.signed_content(), record.signature):
        return failed("signature mismatch")
    if record.artifact is None:
        return passed("no artifact recorded")
    if digest_manager.content_hash(record.artifact) != record.artifact_hash:
        return failed("artifact hash mismatch")
    return verify_artifact(record.artifact)


def verify_ledger(path: Optional[str] = None) -> List[Tuple[int, Verdict]]:
    """Re-verifies every record; returns (line number, verdict) pairs"""
    out = []
    for number, record in read_records(path):
        verdict = verify_record(record)
        marker = "✅" if verdict else "❌"
        logger.info(f"{marker} ledger line {number} ({record.command}): {verdict.reason}")
        out.append((number, verdict))
    return out
