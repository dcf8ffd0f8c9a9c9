"""Error-resilient LZ'77 compression with RS parity hidden in pointer choices."""

from .errors import CapacityError, CorruptStreamError, FramingError, LZRSError, RSParameterError
from .framing import ADAPTIVE, CONSTANT, ProtectedFile, max_constant_e, plan_blocks
from .lz77 import MAX_LEN, WINDOW, Token, compress, decompress, deserialize, serialize
from .pipeline import DecodeOutcome, decode, encode, encode_adaptive, encode_constant
from .rscode import rs_decode, rs_encode

__version__ = "0.1.0"
