import pytest

from treecast import (
    InvalidInput,
    SignatureKind,
    SignatureSpec,
    UnsupportedScheme,
    sign_message,
    verify_message,
)


def test_sign_deterministic(sig1256):
    msg = b"message"
    assert sign_message(msg, sig1256) == sign_message(msg, sig1256)


def test_sign_length_matches_spec():
    spec = SignatureSpec.test(1256, b"k")
    assert len(sign_message(b"m", spec)) == 157
    assert len(sign_message(b"m", SignatureSpec.test(384, b"k"))) == 48


def test_verify_roundtrip(sig1256):
    msg = b"payload to cover"
    sig = sign_message(msg, sig1256)
    assert verify_message(msg, sig, sig1256)
    assert not verify_message(msg + b"!", sig, sig1256)
    assert not verify_message(msg, sig[:-1] + bytes([sig[-1] ^ 1]), sig1256)


def test_verify_rejects_wrong_length(sig1256):
    sig = sign_message(b"m", sig1256)
    assert not verify_message(b"m", sig[:-1], sig1256)
    assert not verify_message(b"m", sig + b"\x00", sig1256)


def test_modeled_scheme_cannot_sign_or_verify():
    modeled = SignatureSpec.modeled("offline-1256", 1256)
    assert modeled.kind is SignatureKind.MODELED
    with pytest.raises(UnsupportedScheme):
        sign_message(b"m", modeled)
    with pytest.raises(UnsupportedScheme):
        verify_message(b"m", b"\x00" * 157, modeled)


@pytest.mark.parametrize("bits", [0, -8, 12, 1255])
def test_bad_sig_len_rejected(bits):
    with pytest.raises(InvalidInput):
        SignatureSpec.test(bits, b"k")


def test_key_changes_signature():
    msg = b"m"
    a = sign_message(msg, SignatureSpec.test(256, b"key-a"))
    b = sign_message(msg, SignatureSpec.test(256, b"key-b"))
    assert a != b
