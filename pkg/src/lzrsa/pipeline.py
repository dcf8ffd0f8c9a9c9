"""LZRS'77 (constant parity) and LZRSa'77 (adaptive parity) codecs.

Encoding runs back to front: the parity of block ``n`` is computed once the
bytes of block ``n`` are final, then hidden in the pointer choices of block
``n - 1``. Block 1's parity goes to the container header. Decoding runs front
to back: correct block ``n`` with the parity recovered from block ``n - 1``,
expand its tokens, and pull the parity of block ``n + 1`` out of them.
"""

from dataclasses import dataclass, field

from . import framing, lz77, rscode, stego
from .errors import CapacityError, CorruptStreamError
from .framing import ADAPTIVE, BITS_PER_E, CONSTANT, ProtectedFile

OK = "ok"
CORRECTED = "corrected"
FAILED = "failed"


@dataclass
class DecodeOutcome:
    data: bytes
    status: str
    blocks_corrected: int = 0
    failed_block: int = None
    cause: str = None
    e_sequence: list = field(default_factory=list)

    @property
    def ok(self):
        return self.status != FAILED


def _embed_parity(tokens, stream, plan, e1):
    """Back-to-front parity embedding shared by both modes; returns rs1."""
    blocks = plan.blocks
    for n in range(len(blocks) - 1, 0, -1):
        blk, prev = blocks[n], blocks[n - 1]
        parity = rscode.rs_encode(stream[blk.start:blk.end], blk.e)
        if not parity:
            continue
        rng = prev.tokens
        carriers = stego.embed(tokens[rng.start:rng.stop], stego.bytes_to_bits(parity))
        for t, tok in zip(rng, carriers):
            tokens[t] = tok
            at = t * lz77.RECORD_SIZE
            stream[at:at + lz77.RECORD_SIZE] = lz77.serialize_token(tok)
    first = blocks[0] if blocks else None
    return rscode.rs_encode(stream[first.start:first.end] if first else b"", e1)


def encode_adaptive(source, e1=1, window=lz77.WINDOW, max_len=lz77.MAX_LEN):
    """Compress ``source`` with per-block parity set by the previous block's
    redundancy. ``e1`` protects the first block; 0 keeps the payload readable
    by a plain LZ'77 decoder."""
    tokens = lz77.compress(source, window, max_len)
    stream = bytearray(lz77.serialize(tokens))
    plan = framing.plan_blocks(tokens, stream, e1)
    rs1 = _embed_parity(tokens, stream, plan, e1)
    return ProtectedFile(ADAPTIVE, 0, e1, rs1, bytes(stream), plan=plan)


def encode_constant(source, e, window=lz77.WINDOW, max_len=lz77.MAX_LEN, e1=None):
    """Compress ``source`` with the same parity ``e`` in every block.

    Raises CapacityError naming the first block whose redundancy cannot hold
    its successor's ``2e`` parity bytes.
    """
    tokens = lz77.compress(source, window, max_len)
    stream = bytearray(lz77.serialize(tokens))
    short = framing.constant_shortfall(tokens, stream, e)
    if short is not None:
        raise CapacityError(f"block {short} cannot carry e={e} parity", block=short)
    plan = framing.plan_constant(tokens, stream, e, e1)
    rs1 = _embed_parity(tokens, stream, plan, plan.e1)
    return ProtectedFile(CONSTANT, e, plan.e1, rs1, bytes(stream), plan=plan)


def decode(container, window=lz77.WINDOW, max_len=lz77.MAX_LEN):
    """Recover the source from a :class:`ProtectedFile` (or its bytes)."""
    pf = container if isinstance(container, ProtectedFile) else ProtectedFile.from_bytes(container)
    hist = lz77.History(window=window, max_len=max_len)
    payload = pf.payload
    total = pf.payload_len
    constant = pf.mode == CONSTANT

    e = pf.e1
    parity = pf.rs1
    size = framing.block_length(pf.e if constant else pf.e1)
    start, n, fixed_blocks = 0, 1, 0
    carry = b""
    es = []
    mark = 0

    def fail(cause):
        return DecodeOutcome(bytes(hist.buf[:mark]), FAILED, fixed_blocks, n, cause, es)

    while start < total:
        mark = len(hist)
        es.append(e)
        length = min(size, total - start)
        block = payload[start:start + length]
        if len(block) < length:
            return fail("truncated")
        if e:
            block, status = rscode.rs_decode(block + parity, e)
            if status == rscode.FAILURE:
                return fail("rs")
            fixed_blocks += status == rscode.CORRECTED
        start += length
        has_next = start < total

        records = carry + block
        cut = len(records) - len(records) % lz77.RECORD_SIZE
        carry = records[cut:]
        want = BITS_PER_E * pf.e if constant else None
        bits = []
        try:
            for tok in lz77.deserialize(records[:cut]):
                at = hist.apply(tok)
                if has_next and (want is None or len(bits) < want):
                    bits.extend(stego.token_bits(tok, hist.candidates(at, tok.length)))
        except CorruptStreamError:
            return fail("stream")

        if constant:
            e = pf.e
            if has_next and len(bits) < BITS_PER_E * e:
                return fail("stream")
        else:
            e, _ = framing.next_e(len(bits))
            size = framing.block_length(e)
        parity = stego.bits_to_bytes(bits[:BITS_PER_E * e])
        n += 1

    if carry:
        n -= 1
        return fail("stream")
    return DecodeOutcome(bytes(hist.buf), CORRECTED if fixed_blocks else OK, fixed_blocks,
                         e_sequence=es)


def encode(source, mode=ADAPTIVE, e=None, e1=None, window=lz77.WINDOW, max_len=lz77.MAX_LEN):
    """Mode dispatch; constant ``e=None`` picks the largest feasible value."""
    if mode == ADAPTIVE:
        return encode_adaptive(source, 1 if e1 is None else e1, window, max_len)
    if mode != CONSTANT:
        raise ValueError(f"unknown mode {mode!r}")
    if e is None:
        tokens = lz77.compress(source, window, max_len)
        e = framing.max_constant_e(tokens, lz77.serialize(tokens)) if tokens else 0
    return encode_constant(source, e, window, max_len, e1)

