"""Sliding-window LZ'77 with full longest-match multiplicity.

Every token is a ``(position, length, symbol)`` triple: copy ``length`` bytes
starting ``position`` bytes back, then emit ``symbol``. The encoder also
records *all* window offsets that reach the same (capped) longest match; the
spare choice among them is what :mod:`lzrsa.stego` uses to hide bits.

The serialized stream is a flat run of 4-byte records::

    [pos_lo][pos_hi][len][sym]

with ``pos`` a 15-bit little-endian offset (top bit reserved zero). A literal
is ``pos = 0, len = 0``.

The decoder re-derives candidate lists from its own output via
:class:`History`, which must agree exactly with the encoder. Both sides use
the same rule: the candidates for a token of length ``L`` at index ``i`` are
all offsets ``o`` in ``1 .. min(i, window - 1)`` with
``text[i-o : i-o+L] == text[i : i+L]`` (overlap allowed), in ascending order.
"""

from bisect import bisect_left
from dataclasses import dataclass, field

import numpy as np

from .errors import CorruptStreamError, FramingError

WINDOW = 32768
MAX_LEN = 255
RECORD_SIZE = 4
_MAX_OFFSET = 0x7FFF

_EMPTY = np.zeros(0, dtype=np.int64)


@dataclass(frozen=True)
class Token:
    position: int
    length: int
    symbol: int
    candidates: tuple = field(default=(), compare=False, repr=False)

    @property
    def multiplicity(self):
        return len(self.candidates)

    @property
    def capacity(self):
        """Number of bits the candidate choice can carry, floor(log2 M)."""
        m = len(self.candidates)
        return m.bit_length() - 1 if m else 0


def check_params(window, max_len):
    if not 1 <= window <= _MAX_OFFSET + 1:
        raise ValueError(f"window must be in [1, {_MAX_OFFSET + 1}], got {window}")
    if not 1 <= max_len <= 255:
        raise ValueError(f"max_len must be in [1, 255], got {max_len}")


class _PairIndex:
    """Positions of every 2-byte prefix seen so far, in ascending order."""

    def __init__(self, buf):
        self._buf = buf
        self._lists = {}
        self._done = 0

    def extend(self, upto):
        # index positions p with p + 1 < upto
        buf = self._buf
        lists = self._lists
        for p in range(self._done, upto - 1):
            key = buf[p] | (buf[p + 1] << 8)
            lst = lists.get(key)
            if lst is None:
                lists[key] = [p]
            else:
                lst.append(p)
        self._done = max(self._done, upto - 1)

    def lookup(self, key, lo, hi):
        lst = self._lists.get(key)
        if not lst:
            return _EMPTY
        a = bisect_left(lst, lo)
        b = bisect_left(lst, hi)
        if a == b:
            return _EMPTY
        return np.array(lst[a:b], dtype=np.int64)


def _common_prefix(arr, starts, i, limit):
    """Per-start match length against ``arr[i:]``, capped at ``limit``."""
    lcp = np.zeros(len(starts), dtype=np.int64)
    active = np.arange(len(starts))
    k = 0
    step = 8
    while active.size and k < limit:
        width = min(step, limit - k)
        cols = np.arange(k, k + width)
        eq = arr[starts[active, None] + cols] == arr[i + k:i + k + width]
        full = eq.all(axis=1)
        lcp[active] = k + np.where(full, width, eq.argmin(axis=1))
        active = active[full]
        k += width
        step *= 2
    return lcp


def _window_start(i, window):
    return max(0, i - window + 1)


def compress(source, window=WINDOW, max_len=MAX_LEN):
    """Greedy LZ'77 parse of ``source`` into a list of :class:`Token`.

    Each token lists every window offset achieving the longest match (capped
    at ``max_len`` and at the bytes left before the final symbol) in
    ``candidates``; ``position`` is the smallest of them.
    """
    check_params(window, max_len)
    data = bytes(source)
    n = len(data)
    arr = np.frombuffer(data, dtype=np.uint8)
    index = _PairIndex(data)
    index.extend(n)
    tokens = []
    i = 0
    while i < n:
        cap = min(max_len, n - i - 1)
        lo = _window_start(i, window)
        length, starts = 0, _EMPTY
        if cap >= 2 and i > lo:
            starts = index.lookup(data[i] | (data[i + 1] << 8), lo, i)
            if starts.size:
                lcp = _common_prefix(arr, starts, i, cap)
                length = int(lcp.max())
                starts = starts[lcp == length]
        if length == 0 and cap >= 1 and i > lo:
            starts = np.flatnonzero(arr[lo:i] == data[i]) + lo
            if starts.size:
                length = 1
        if length == 0:
            tokens.append(Token(0, 0, data[i], (0,)))
        else:
            cands = tuple((i - starts[::-1]).tolist())
            tokens.append(Token(cands[0], length, data[i + length], cands))
        i += length + 1
    return tokens


class History:
    """Decoder-side output buffer that can re-derive candidate lists.

    ``apply`` validates and expands one token; ``candidates`` recomputes the
    encoder's candidate list for a token already applied at ``start``.
    """

    def __init__(self, data=b"", window=WINDOW, max_len=MAX_LEN):
        check_params(window, max_len)
        self.window = window
        self.max_len = max_len
        self.buf = bytearray(data)
        self._index = _PairIndex(self.buf)

    def __len__(self):
        return len(self.buf)

    def apply(self, token):
        """Append the bytes of ``token``; return the index where they start."""
        buf = self.buf
        start = len(buf)
        pos, length = token.position, token.length
        if not 0 <= token.symbol <= 255:
            raise CorruptStreamError(f"symbol {token.symbol} out of byte range")
        if length == 0:
            if pos != 0:
                raise CorruptStreamError(f"literal with non-zero position {pos}")
        else:
            if length > self.max_len:
                raise CorruptStreamError(f"length {length} exceeds {self.max_len}")
            if pos < 1 or pos > start or pos > self.window - 1:
                raise CorruptStreamError(
                    f"position {pos} outside history of {min(start, self.window - 1)} bytes")
            src = start - pos
            if pos >= length:
                buf += buf[src:src + length]
            else:
                chunk = bytes(buf[src:])
                buf += (chunk * (length // pos + 1))[:length]
        buf.append(token.symbol)
        return start

    def candidates(self, start, length):
        """Ascending offsets that reproduce the ``length`` bytes at ``start``."""
        if length == 0:
            return (0,)
        buf = self.buf
        lo = _window_start(start, self.window)
        if start <= lo:
            return ()
        arr = np.frombuffer(buf, dtype=np.uint8)
        try:
            if length == 1:
                starts = np.flatnonzero(arr[lo:start] == buf[start]) + lo
            else:
                self._index.extend(start + 1)
                starts = self._index.lookup(buf[start] | (buf[start + 1] << 8), lo, start)
                if starts.size:
                    starts = starts[_common_prefix(arr, starts, start, length) == length]
            return tuple((start - starts[::-1]).tolist())
        finally:
            del arr


def decompress(tokens, window=WINDOW, max_len=MAX_LEN):
    hist = History(window=window, max_len=max_len)
    for tok in tokens:
        hist.apply(tok)
    return bytes(hist.buf)


def recompute_candidates(history, token, window=WINDOW, max_len=MAX_LEN):
    """Candidate offsets for ``token`` given the decoded text that precedes it."""
    hist = History(history, window, max_len)
    start = hist.apply(token)
    cands = hist.candidates(start, token.length)
    if token.position not in cands:
        raise CorruptStreamError(f"position {token.position} not among candidates")
    return list(cands)


def serialize(tokens):
    n = len(tokens)
    out = np.zeros((n, RECORD_SIZE), dtype=np.uint8)
    if n:
        pos = np.fromiter((t.position for t in tokens), dtype=np.int64, count=n)
        if pos.min() < 0 or pos.max() > _MAX_OFFSET:
            raise ValueError("token position does not fit in 15 bits")
        out[:, 0] = pos & 0xFF
        out[:, 1] = pos >> 8
        out[:, 2] = np.fromiter((t.length for t in tokens), dtype=np.uint8, count=n)
        out[:, 3] = np.fromiter((t.symbol for t in tokens), dtype=np.uint8, count=n)
    return out.tobytes()


def serialize_token(token):
    return bytes((token.position & 0xFF, token.position >> 8, token.length, token.symbol))


def deserialize(data):
    """Parse 4-byte records; any record parses, validity is checked on decode."""
    if len(data) % RECORD_SIZE:
        raise FramingError(f"stream length {len(data)} is not a multiple of {RECORD_SIZE}")
    recs = np.frombuffer(bytes(data), dtype=np.uint8).reshape(-1, RECORD_SIZE).astype(np.int64)
    pos = (recs[:, 0] | (recs[:, 1] << 8)).tolist()
    return [Token(p, l, s) for p, l, s in zip(pos, recs[:, 2].tolist(), recs[:, 3].tolist())]
