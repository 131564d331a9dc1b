"""Block signature schemes.

Two kinds exist:

* ``TEST`` -- a deterministic symmetric stand-in built from SHAKE-256,
  truncated to the configured length. It is a keyed MAC, not a real
  digital signature; it exists so the protocol logic (what gets signed,
  how packets verify) can be tested end to end with reproducible bytes.
* ``MODELED`` -- a named placeholder carrying only an output length.
  Modeled schemes parameterize the timing model and overhead accounting
  but cannot sign or verify actual bytes.
"""

from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass
from enum import IntEnum

from .errors import InvalidInput, UnsupportedScheme

# Domain separator for the TEST MAC; leaf and node digests use 0x00/0x01.
_SIG_SEP = b"\x02"


class SignatureKind(IntEnum):
    """Wire identifier of the scheme family."""

    TEST = 0
    MODELED = 1


@dataclass(frozen=True)
class SignatureSpec:
    kind: SignatureKind
    sig_len_bits: int
    key: bytes = b""
    name: str = "test"

    def __post_init__(self):
        if self.sig_len_bits <= 0 or self.sig_len_bits % 8 != 0:
            raise InvalidInput(f"sig_len_bits must be a positive multiple of 8, got {self.sig_len_bits}")

    @property
    def sig_len_bytes(self) -> int:
        return self.sig_len_bits // 8

    @staticmethod
    def test(sig_len_bits: int, key: bytes = b"") -> "SignatureSpec":
        return SignatureSpec(SignatureKind.TEST, sig_len_bits, key, "test")

    @staticmethod
    def modeled(name: str, sig_len_bits: int) -> "SignatureSpec":
        return SignatureSpec(SignatureKind.MODELED, sig_len_bits, b"", name)


def sign_message(message: bytes, spec: SignatureSpec) -> bytes:
    """Sign raw bytes under the TEST scheme.

    Modeled schemes carry lengths for the timing model only and refuse
    to produce bytes.
    """
    if spec.kind is not SignatureKind.TEST:
        raise UnsupportedScheme(f"scheme '{spec.name}' cannot sign bytes")
    return hashlib.shake_256(spec.key + _SIG_SEP + message).digest(spec.sig_len_bytes)


def verify_message(message: bytes, signature: bytes, spec: SignatureSpec) -> bool:
    """Check a TEST-scheme signature. Constant-time comparison."""
    if spec.kind is not SignatureKind.TEST:
        raise UnsupportedScheme(f"scheme '{spec.name}' cannot verify bytes")
    if len(signature) != spec.sig_len_bytes:
        return False
    return hmac.compare_digest(signature, sign_message(message, spec))
