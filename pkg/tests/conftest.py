import random

import pytest

from treecast import DigestSpec, Packet, SignatureSpec

DIGEST_KEY = bytes.fromhex("00112233445566778899aabbccddeeff")
SIG_KEY = b"block-signing-key"


@pytest.fixture
def spec32():
    return DigestSpec(32, DIGEST_KEY, keyed=True)


@pytest.fixture
def sig1256():
    return SignatureSpec.test(1256, SIG_KEY)


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def make_block(rng, n, payload_bytes=32):
    return [Packet(rng.randbytes(payload_bytes)) for _ in range(n)]
