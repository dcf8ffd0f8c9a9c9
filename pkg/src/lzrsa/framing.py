"""Block planning and the protected container format.

A serialized token stream is cut into blocks; block ``n`` is
``255 - 2*e_n`` bytes long (the last one may be shorter) and is protected by
``2*e_n`` RS parity bytes. In adaptive mode ``e_1`` is given and every later
``e_{n+1}`` is the number of parity byte *pairs* (16 bits each) that block
``n``'s pointer redundancy can carry. In constant mode every block uses the
same ``e``.

A token belongs to the block holding the last byte of its 4-byte record, so a
decoder that has corrected blocks ``1..n`` can read every token of block ``n``.

Container layout::

    "LZRA" | version=1 | mode (0 constant, 1 adaptive) | [e, constant only]
    | e1 | payload_len (u64 LE) | rs1 (2*e1 bytes) | payload
"""

import logging
import struct
from dataclasses import dataclass, field

import numpy as np

from .errors import FramingError
from .lz77 import RECORD_SIZE

log = logging.getLogger(__name__)

MAGIC = b"LZRA"
VERSION = 1
CONSTANT = "constant"
ADAPTIVE = "adaptive"
_MODE_BYTES = {CONSTANT: 0, ADAPTIVE: 1}
E_MAX = 127
BITS_PER_E = 16


@dataclass(frozen=True)
class Block:
    start: int
    length: int
    e: int
    tokens: range
    capacity: int

    @property
    def end(self):
        return self.start + self.length


@dataclass
class BlockPlan:
    mode: str
    e1: int
    blocks: list
    clamps: list = field(default_factory=list)

    @property
    def e_sequence(self):
        return [b.e for b in self.blocks]

    @property
    def mean_e(self):
        if not self.blocks:
            return float(self.e1)
        return float(np.mean(self.e_sequence))


def next_e(capacity):
    """Parity budget of the following block; returns ``(e, clamped)``."""
    e = capacity // BITS_PER_E
    if e > E_MAX:
        return E_MAX, True
    return e, False


def block_length(e):
    return 255 - 2 * e


def token_range(start, length):
    """Indices of tokens whose record ends inside ``[start, start+length)``."""
    return range(start // RECORD_SIZE, (start + length) // RECORD_SIZE)


def _capacity_prefix(tokens):
    caps = np.fromiter((t.capacity for t in tokens), dtype=np.int64, count=len(tokens))
    return np.concatenate(([0], np.cumsum(caps)))


def _check_stream(tokens, serialized):
    if len(serialized) != RECORD_SIZE * len(tokens):
        raise FramingError("serialized stream does not match token count")


def _check_e(e, name):
    if not 0 <= e <= E_MAX:
        raise ValueError(f"{name} must be in [0, {E_MAX}], got {e}")


def plan_blocks(tokens, serialized, e1):
    """Adaptive plan: each block's capacity sets the next block's ``e``."""
    _check_stream(tokens, serialized)
    _check_e(e1, "e1")
    prefix = _capacity_prefix(tokens)
    total = len(serialized)
    blocks = []
    clamps = []
    start, e = 0, e1
    while start < total:
        length = min(block_length(e), total - start)
        rng = token_range(start, length)
        cap = int(prefix[rng.stop] - prefix[rng.start])
        blocks.append(Block(start, length, e, rng, cap))
        start += length
        e, clamped = next_e(cap)
        if clamped and start < total:
            clamps.append(len(blocks) + 1)
            log.warning("block %d parity clamped to e=%d (capacity %d bits)",
                        len(blocks) + 1, E_MAX, cap)
    return BlockPlan(ADAPTIVE, e1, blocks, clamps)


def plan_constant(tokens, serialized, e, e1=None):
    """Constant plan: every block is ``255 - 2e`` bytes with ``e`` parity pairs.

    ``e1`` is the protection of the first block (parity kept in the header);
    it defaults to ``e``.
    """
    _check_stream(tokens, serialized)
    _check_e(e, "e")
    e1 = e if e1 is None else e1
    _check_e(e1, "e1")
    if e1 > e:
        raise ValueError(f"e1={e1} cannot exceed the constant e={e}")
    prefix = _capacity_prefix(tokens)
    total = len(serialized)
    size = block_length(e)
    blocks = []
    for n, start in enumerate(range(0, total, size)):
        length = min(size, total - start)
        rng = token_range(start, length)
        cap = int(prefix[rng.stop] - prefix[rng.start])
        blocks.append(Block(start, length, e1 if n == 0 else e, rng, cap))
    return BlockPlan(CONSTANT, e1, blocks)


def constant_shortfall(tokens, serialized, e):
    """1-based index of the first block that cannot carry its successor's
    parity under a constant-``e`` plan, or None if every block can."""
    plan = plan_constant(tokens, serialized, e)
    for n, blk in enumerate(plan.blocks[:-1], start=1):
        if blk.capacity < BITS_PER_E * e:
            return n
    return None


def max_constant_e(tokens, serialized):
    """Largest ``e`` for which a constant plan can embed every block's parity."""
    _check_stream(tokens, serialized)
    if not serialized:
        raise ValueError("empty stream")
    total = len(serialized)
    ends = np.arange(len(tokens)) * RECORD_SIZE + RECORD_SIZE - 1
    caps = np.fromiter((t.capacity for t in tokens), dtype=np.int64, count=len(tokens))
    for e in range(E_MAX, 0, -1):
        size = block_length(e)
        nblocks = -(-total // size)
        per_block = np.bincount(ends // size, weights=caps, minlength=nblocks)
        if np.all(per_block[:nblocks - 1] >= BITS_PER_E * e):
            return e
    return 0


@dataclass
class ProtectedFile:
    mode: str
    e: int          # constant mode: per-block e; adaptive: unused (0)
    e1: int
    rs1: bytes
    payload: bytes
    payload_len: int = None
    plan: BlockPlan = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.payload_len is None:
            self.payload_len = len(self.payload)

    @property
    def header_size(self):
        return len(self.header_bytes())

    def header_bytes(self):
        out = bytearray(MAGIC)
        out.append(VERSION)
        out.append(_MODE_BYTES[self.mode])
        if self.mode == CONSTANT:
            out.append(self.e)
        out.append(self.e1)
        out += struct.pack("<Q", self.payload_len)
        out += self.rs1
        return bytes(out)

    def to_bytes(self):
        return self.header_bytes() + bytes(self.payload)

    @classmethod
    def from_bytes(cls, data):
        data = bytes(data)
        if data[:4] != MAGIC:
            raise FramingError("bad magic")
        if len(data) < 7:
            raise FramingError("truncated header")
        if data[4] != VERSION:
            raise FramingError(f"unsupported version {data[4]}")
        modes = {v: k for k, v in _MODE_BYTES.items()}
        if data[5] not in modes:
            raise FramingError(f"unknown mode byte {data[5]}")
        mode = modes[data[5]]
        pos = 6
        e = 0
        if mode == CONSTANT:
            e = data[pos]
            pos += 1
        if len(data) < pos + 9:
            raise FramingError("truncated header")
        e1 = data[pos]
        (payload_len,) = struct.unpack_from("<Q", data, pos + 1)
        pos += 9
        if e > E_MAX or e1 > E_MAX:
            raise FramingError("parity parameter out of range")
        rs1 = data[pos:pos + 2 * e1]
        if len(rs1) != 2 * e1:
            raise FramingError("truncated header parity")
        return cls(mode, e, e1, rs1, data[pos + 2 * e1:], payload_len)
