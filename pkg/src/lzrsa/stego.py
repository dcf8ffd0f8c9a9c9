"""Hide bits in the choice among equally long LZ'77 matches.

A token with ``M`` candidates carries ``d = floor(log2 M)`` bits: the next
``d`` bits (MSB first) form an index into the ascending candidate list. Any
plain decoder ignores the choice, so the stream stays a valid LZ'77 stream
of the same size.
"""

from dataclasses import replace

import numpy as np

from .errors import CapacityError, CorruptStreamError
from .lz77 import MAX_LEN, WINDOW, History


def bytes_to_bits(data):
    return np.unpackbits(np.frombuffer(bytes(data), dtype=np.uint8)).tolist()


def bits_to_bytes(bits):
    if len(bits) % 8:
        raise ValueError("bit count must be a multiple of 8")
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def budget(tokens):
    return sum(t.capacity for t in tokens)


def embed(tokens, bits):
    """Return a copy of ``tokens`` whose positions spell out ``bits``.

    Tokens left over once ``bits`` runs out get candidate 0.
    """
    total = budget(tokens)
    if len(bits) > total:
        raise CapacityError(f"{len(bits)} bits requested, only {total} available")
    out = []
    k = 0
    for tok in tokens:
        d = tok.capacity
        if d == 0:
            out.append(tok)
            continue
        v = 0
        for b in bits[k:k + d]:
            v = (v << 1) | b
        # bits ran out mid-token: pad the index with zeros on the right
        v <<= max(0, k + d - len(bits))
        k += d
        out.append(replace(tok, position=tok.candidates[v]))
    return out


def token_bits(tok, cands):
    """The bits a received token carries, given its recomputed candidates."""
    m = len(cands)
    d = m.bit_length() - 1 if m else 0
    try:
        v = cands.index(tok.position)
    except ValueError:
        raise CorruptStreamError(f"position {tok.position} is not a longest-match offset") from None
    if v >> d:
        raise CorruptStreamError(f"candidate index {v} does not fit in {d} bits")
    return [(v >> s) & 1 for s in range(d - 1, -1, -1)]


def extract(tokens, history, nbits, window=WINDOW, max_len=MAX_LEN):
    """Recover the first ``nbits`` embedded bits from ``tokens``.

    ``history`` is the decoded text preceding the first token.
    """
    hist = History(history, window, max_len)
    bits = []
    for tok in tokens:
        if len(bits) >= nbits:
            break
        start = hist.apply(tok)
        bits.extend(token_bits(tok, hist.candidates(start, tok.length)))
    if len(bits) < nbits:
        raise CapacityError(f"{nbits} bits requested, only {len(bits)} embedded")
    return bits[:nbits]
