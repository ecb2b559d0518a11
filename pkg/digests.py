import hmac
import hashlib
import json
from typing import Any

from pydantic import BaseModel

from config import settings


class DigestManager:
    @staticmethod
    def canonical_json(payload: Any) -> str:
        """Sorted keys, compact separators; models are dumped by alias"""
        if isinstance(payload, BaseModel):
            payload = payload.model_dump(mode="json", by_alias=True)
        return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)

    @staticmethod
    def content_hash(payload: Any) -> str:
        digest = hashlib.sha256(DigestManager.canonical_json(payload).encode()).hexdigest()
        return f"sha256:{digest}"

    @staticmethod
    def file_hash(path: str) -> str:
        """sha256 of the raw bytes of a file"""
        digest = hashlib.sha256()
        with open(path, "rb") as fh:
            for chunk in iter(lambda: fh.read(65536), b""):
                digest.update(chunk)
        return f"sha256:{digest.hexdigest()}"

    @staticmethod
    def sign(payload: Any, secret: str = "") -> str:
        """HMAC-SHA256 of the canonical form; empty when no secret is configured"""
        secret = secret or settings.LEDGER_SECRET
        if not secret:
            return ""
        return hmac.new(
            secret.encode(),
            DigestManager.canonical_json(payload).encode(),
            hashlib.sha256
        ).hexdigest()

    @staticmethod
    def verify_signature(payload: Any, signature: str, secret: str = "") -> bool:
        secret = secret or settings.LEDGER_SECRET
        if not secret:
            # unsigned ledgers carry no signature to check
            return not signature
        try:
            expected = DigestManager.sign(payload, secret)
            return hmac.compare_digest(expected, signature)
        except (TypeError, ValueError):
            return False


digest_manager = DigestManager()
