"""Canonical JSON certificates.

Layout, in this key order::

    version, kind, parameters, blue, recipe, claims, digest

``digest`` is the 64-bit FNV-1a hash (16 lowercase hex digits) of the
canonical serialization of the other six fields. Claims carry only
booleans, integers, strings and lists of those; floats are refused.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Any

VERSION = 1
KINDS = ("coloring", "apfree-set", "threshold", "exact-w")
FIELDS = ("version", "kind", "parameters", "blue", "recipe", "claims", "digest")

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


class CertificateError(ValueError):
    """Malformed certificate text or structure."""


def fnv1a64(data: bytes) -> int:
    h = FNV_OFFSET
    for byte in data:
        h ^= byte
        h = (h * FNV_PRIME) & 0xFFFF_FFFF_FFFF_FFFF
    return h


def _no_floats(value: Any, where: str) -> None:
    if isinstance(value, float):
        raise CertificateError(f"floating-point value in {where}")
    if isinstance(value, dict):
        for k, v in value.items():
            _no_floats(v, f"{where}.{k}")
    elif isinstance(value, (list, tuple)):
        for v in value:
            _no_floats(v, where)


@dataclass
class Certificate:
    kind: str
    parameters: dict
    blue: list[int]
    recipe: dict
    claims: dict
    version: int = VERSION
    digest: str = field(default="")

    def body(self) -> dict:
        return {
            "version": self.version,
            "kind": self.kind,
            "parameters": self.parameters,
            "blue": list(self.blue),
            "recipe": self.recipe,
            "claims": self.claims,
        }

    def compute_digest(self) -> str:
        return f"{fnv1a64(_dump(self.body()).encode('utf-8')):016x}"

    def seal(self) -> "Certificate":
        _no_floats(self.claims, "claims")
        self.blue = sorted(self.blue)
        self.digest = self.compute_digest()
        return self

    def to_json(self) -> str:
        doc = self.body()
        doc["digest"] = self.digest
        return _dump(doc) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "Certificate":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise CertificateError(f"not JSON: {exc}") from None
        if not isinstance(doc, dict) or list(doc) != list(FIELDS):
            raise CertificateError(f"expected keys {FIELDS} in that order")
        if not isinstance(doc["blue"], list) or not all(
            isinstance(x, int) and not isinstance(x, bool) for x in doc["blue"]
        ):
            raise CertificateError("blue must be a list of integers")
        for key in ("parameters", "recipe", "claims"):
            if not isinstance(doc[key], dict):
                raise CertificateError(f"{key} must be an object")
        return cls(
            kind=doc["kind"],
            parameters=doc["parameters"],
            blue=doc["blue"],
            recipe=doc["recipe"],
            claims=doc["claims"],
            version=doc["version"],
            digest=doc["digest"],
        )


def _dump(doc: dict) -> str:
    return json.dumps(doc, separators=(",", ":"), ensure_ascii=False, allow_nan=False)
