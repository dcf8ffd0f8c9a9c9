"""Exception hierarchy shared by the codec layers."""


class LZRSError(Exception):
    pass


class RSParameterError(LZRSError, ValueError):
    """Codeword geometry violates ``len(data) + 2*e <= 255``."""


class CorruptStreamError(LZRSError):
    """A token stream cannot be decoded (bad pointer, bad embedded index...)."""


class FramingError(LZRSError):
    """Malformed serialized stream or container."""


class CapacityError(LZRSError):
    """Not enough pointer redundancy to carry the requested bits.

    ``block`` is the 1-based index of the first block that came up short,
    or None when the failure is not tied to a block.
    """

    def __init__(self, message, block=None):
        super().__init__(message)
        self.block = block
