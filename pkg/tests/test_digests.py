from digests import digest_manager
from rado import ColumnsDocument, check_columns
from linalg import parse_matrix


def test_canonical_json_sorts_keys():
    assert digest_manager.canonical_json({"b": 1, "a": [1, 2]}) == '{"a":[1,2],"b":1}'


def test_content_hash_ignores_key_order():
    first = digest_manager.content_hash({"x": 1, "y": 2})
    second = digest_manager.content_hash({"y": 2, "x": 1})
    assert first == second
    assert first.startswith("sha256:")
    assert len(first) == len("sha256:") + 64


def test_models_hash_like_their_dumps():
    A = parse_matrix("1 1 -1")
    doc = ColumnsDocument.from_certificate(A, check_columns(A))
    assert digest_manager.content_hash(doc) == digest_manager.content_hash(doc.model_dump(mode="json"))


def test_signature_round_trip():
    payload = {"command": "rado check", "status": 0}
    signature = digest_manager.sign(payload, "s3cret")
    assert signature
    assert digest_manager.verify_signature(payload, signature, "s3cret")
    assert not digest_manager.verify_signature({"command": "rado check", "status": 1}, signature, "s3cret")
    assert not digest_manager.verify_signature(payload, signature, "other")


def test_unsigned_mode(monkeypatch):
    from config import settings
    monkeypatch.setattr(settings, "LEDGER_SECRET", "")
    assert digest_manager.sign({"a": 1}) == ""
    assert digest_manager.verify_signature({"a": 1}, "")
    assert not digest_manager.verify_signature({"a": 1}, "deadbeef")


def test_file_hash_follows_bytes(tmp_path):
    path = tmp_path / "shape.json"
    path.write_bytes(b'{"d": 1}')
    first = digest_manager.file_hash(str(path))
    assert first.startswith("sha256:")
    assert first == digest_manager.file_hash(str(path))
    path.write_bytes(b'{"d": 2}')
    assert digest_manager.file_hash(str(path)) != first
