"""Exception types shared across the toolkit."""


class TreecastError(Exception):
    """Base class for all treecast errors."""


class InvalidInput(TreecastError):
    """A value violates a documented precondition (empty payload, bad length...)."""


class InvalidBlockSize(TreecastError):
    """Block size is not a power of two; partial blocks are not padded."""


class IndexOutOfRange(TreecastError):
    """Packet index outside [0, n)."""


class UnsupportedScheme(TreecastError):
    """Operation requested on a signature scheme that cannot perform it."""


class TreeNotSigned(TreecastError):
    """Packets can only be emitted from a tree whose root has been signed."""


class SpecMismatch(TreecastError):
    """Digest/signature spec does not match what a packet was built with."""


class WireFormatError(TreecastError):
    """Serialized packet bytes are malformed.

    ``offset`` is the byte offset into the buffer where parsing failed.
    """

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte offset {offset})")
        self.offset = offset


class InvalidSplit(TreecastError):
    """Requested subtree split is impossible (k not a power of two, k > n, ...)."""


class PartialBlockUnsupported(TreecastError):
    """Input size is not an exact multiple of one block (n * packet length)."""


class InvalidTiming(TreecastError):
    """Timing inputs outside the model's domain (e.g. non-positive parallel time)."""


class ConfigError(TreecastError):
    """A configuration key is unknown or its value fails validation."""

    def __init__(self, key: str, reason: str):
        super().__init__(f"config key '{key}': {reason}")
        self.key = key
        self.reason = reason
