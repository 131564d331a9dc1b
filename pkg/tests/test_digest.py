import random

import pytest

from treecast import DigestSpec, InvalidInput, leaf_digest, node_digest

from conftest import DIGEST_KEY

# 32-Kbit test vector #1: 4096 fixed bytes. The digest below was generated
# once from the reference construction (SHA-256 over key || 0x00 || payload,
# truncated to 32 bits) and frozen.
TEST_VECTOR_1 = bytes(range(256)) * 16
TEST_VECTOR_1_DIGEST = bytes.fromhex("d2b7468d")

# node_digest(0x00000000, 0xFFFFFFFF) with an unkeyed spec, frozen the same way.
NODE_GOLDEN = bytes.fromhex("cd50a6e9")


def test_leaf_golden_vector():
    spec = DigestSpec(32, DIGEST_KEY, keyed=True)
    assert len(TEST_VECTOR_1) * 8 == 32 * 1024
    assert leaf_digest(TEST_VECTOR_1, spec) == TEST_VECTOR_1_DIGEST


def test_leaf_deterministic(spec32):
    payload = b"same payload"
    assert leaf_digest(payload, spec32) == leaf_digest(payload, spec32)


def test_leaf_key_sensitivity():
    rng = random.Random(7)
    payload = rng.randbytes(64)
    for _ in range(100):
        key = rng.randbytes(16)
        flipped = bytearray(key)
        bit = rng.randrange(len(key) * 8)
        flipped[bit // 8] ^= 1 << (bit % 8)
        a = leaf_digest(payload, DigestSpec(32, key, keyed=True))
        b = leaf_digest(payload, DigestSpec(32, bytes(flipped), keyed=True))
        assert a != b


def test_leaf_empty_payload_rejected(spec32):
    with pytest.raises(InvalidInput):
        leaf_digest(b"", spec32)


@pytest.mark.parametrize("out_len", [8, 32, 64, 128, 256])
def test_truncation_length(out_len):
    spec = DigestSpec(out_len)
    assert len(leaf_digest(b"x", spec)) == out_len // 8
    assert len(node_digest(b"\x00" * (out_len // 8), b"\x01" * (out_len // 8), spec)) == out_len // 8


def test_node_golden_vector():
    spec = DigestSpec(32)  # unkeyed
    assert node_digest(b"\x00\x00\x00\x00", b"\xff\xff\xff\xff", spec) == NODE_GOLDEN


def test_node_deterministic(spec32):
    d = leaf_digest(b"leaf", spec32)
    assert node_digest(d, d, spec32) == node_digest(d, d, spec32)


def test_node_asymmetric(spec32):
    rng = random.Random(11)
    for _ in range(100):
        a, b = rng.randbytes(4), rng.randbytes(4)
        if a == b:
            continue
        assert node_digest(a, b, spec32) != node_digest(b, a, spec32)


def test_node_length_mismatch(spec32):
    with pytest.raises(InvalidInput):
        node_digest(b"\x00" * 3, b"\x00" * 4, spec32)
    with pytest.raises(InvalidInput):
        node_digest(b"\x00" * 4, b"\x00" * 5, spec32)


@pytest.mark.parametrize("out_len", [0, 4, 12, 260, 264, -8])
def test_bad_out_len_rejected(out_len):
    with pytest.raises(InvalidInput):
        DigestSpec(out_len)


def test_unkeyed_spec_must_have_empty_key():
    with pytest.raises(InvalidInput):
        DigestSpec(32, b"secret", keyed=False)


def test_fingerprint_separates_specs():
    a = DigestSpec(32, b"key-a", keyed=True)
    b = DigestSpec(32, b"key-b", keyed=True)
    c = DigestSpec(64, b"key-a", keyed=True)
    fingerprints = {a.fingerprint(), b.fingerprint(), c.fingerprint()}
    assert len(fingerprints) == 3
    assert all(len(fp) == 4 for fp in fingerprints)
