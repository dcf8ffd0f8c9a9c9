"""GF(2^8) arithmetic and a systematic Reed-Solomon codec.

Field: primitive polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11D), generator
alpha = 2. The code generator polynomial has roots alpha^1 .. alpha^2e, so
a codeword is ``data || parity`` with ``2e`` parity bytes and corrects up to
``e`` byte errors. Any data length ``k`` with ``k + 2e <= 255`` is accepted;
shorter messages behave as if zero-padded at the front (shortened code).

Codeword byte 0 is the highest-degree coefficient, which is the layout used
by most RS libraries over GF(256).
"""

from functools import lru_cache

import numpy as np

from .errors import RSParameterError

PRIM_POLY = 0x11D
FIELD_SIZE = 256
CODE_LENGTH = 255

OK = "ok"
CORRECTED = "corrected"
FAILURE = "failure"


def _build_tables():
    exp = np.zeros(512, dtype=np.int64)
    log = np.zeros(256, dtype=np.int64)
    x = 1
    for i in range(255):
        exp[i] = x
        log[x] = i
        x <<= 1
        if x & 0x100:
            x ^= PRIM_POLY
    exp[255:510] = exp[:255]
    return exp, log


EXP, LOG = _build_tables()


def _build_mul_table():
    table = EXP[(LOG[:, None] + LOG[None, :]) % 255]
    table[0, :] = 0
    table[:, 0] = 0
    return table.astype(np.uint8)


MUL = _build_mul_table()
for _arr in (EXP, LOG, MUL):
    _arr.flags.writeable = False

_EXP = EXP.tolist()
_LOG = LOG.tolist()


def gf_add(a, b):
    return a ^ b


def gf_mul(a, b):
    if a == 0 or b == 0:
        return 0
    return _EXP[_LOG[a] + _LOG[b]]


def gf_inv(a):
    if a == 0:
        raise ZeroDivisionError("0 has no inverse in GF(256)")
    return _EXP[255 - _LOG[a]]


def gf_div(a, b):
    if b == 0:
        raise ZeroDivisionError("division by zero in GF(256)")
    if a == 0:
        return 0
    return _EXP[(_LOG[a] - _LOG[b]) % 255]


def gf_pow(a, n):
    if a == 0:
        return 0 if n else 1
    return _EXP[(_LOG[a] * n) % 255]


def _check(k, e):
    if e < 0:
        raise RSParameterError(f"e must be non-negative, got {e}")
    if k + 2 * e > CODE_LENGTH:
        raise RSParameterError(
            f"{k} data bytes + {2 * e} parity bytes exceed {CODE_LENGTH}")


@lru_cache(maxsize=None)
def generator_poly(e):
    """Coefficients (highest degree first) of prod_{i=1..2e} (x - alpha^i)."""
    g = [1]
    for i in range(1, 2 * e + 1):
        root = _EXP[i]
        nxt = g + [0]
        for j, c in enumerate(g):
            nxt[j + 1] ^= gf_mul(c, root)
        g = nxt
    return tuple(g)


@lru_cache(maxsize=None)
def _parity_rows(e):
    # Row r holds x^(r + 2e) mod g(x); parity is the XOR of data-weighted rows.
    nsym = 2 * e
    g = generator_poly(e)[1:]
    rows = np.zeros((CODE_LENGTH - nsym, nsym), dtype=np.uint8)
    rem = list(g)
    for r in range(CODE_LENGTH - nsym):
        rows[r] = rem
        top = rem[0]
        rem = rem[1:] + [0]
        if top:
            rem = [c ^ gf_mul(top, gc) for c, gc in zip(rem, g)]
    rows.flags.writeable = False
    return rows


def rs_encode(data, e):
    """Return the ``2e`` systematic parity bytes for ``data``."""
    k = len(data)
    _check(k, e)
    if e == 0:
        return b""
    if k == 0:
        return bytes(2 * e)
    d = np.frombuffer(bytes(data), dtype=np.uint8)
    rows = _parity_rows(e)[k - 1::-1]
    return np.bitwise_xor.reduce(MUL[d[:, None], rows], axis=0).tobytes()


def syndromes(codeword, nsym):
    """S_j = c(alpha^j) for j = 1..nsym."""
    n = len(codeword)
    r = np.frombuffer(bytes(codeword), dtype=np.uint8)
    degrees = np.arange(n - 1, -1, -1)
    js = np.arange(1, nsym + 1)
    powers = EXP[(degrees[None, :] * js[:, None]) % 255]
    return np.bitwise_xor.reduce(MUL[r[None, :], powers], axis=1).tolist()


def _poly_eval_low(poly, x):
    # poly is lowest-degree first
    y = 0
    for c in reversed(poly):
        y = gf_mul(y, x) ^ c
    return y


def _berlekamp_massey(synd):
    """Error locator (lowest degree first) for syndromes S_1..S_2e."""
    locator = [1]
    prev = [1]
    degree = 0
    shift = 1
    prev_disc = 1
    for k, s in enumerate(synd):
        disc = s
        for i in range(1, degree + 1):
            if i < len(locator):
                disc ^= gf_mul(locator[i], synd[k - i])
        if disc == 0:
            shift += 1
            continue
        coef = gf_div(disc, prev_disc)
        update = [0] * shift + [gf_mul(coef, c) for c in prev]
        new = locator + [0] * max(0, len(update) - len(locator))
        for i, c in enumerate(update):
            new[i] ^= c
        if 2 * degree <= k:
            prev, prev_disc = locator, disc
            degree = k + 1 - degree
            shift = 1
        else:
            shift += 1
        locator = new
    while len(locator) > 1 and locator[-1] == 0:
        locator.pop()
    return locator, degree


def rs_decode(received, e):
    """Correct up to ``e`` byte errors in ``received = data || parity``.

    Returns ``(data, status)`` where status is ``"ok"``, ``"corrected"`` or
    ``"failure"``. On failure the uncorrected data portion is returned. Beyond
    ``e`` errors the decoder may also land on a wrong codeword and report
    ``"corrected"``; that is inherent to RS and is left to callers to notice.
    """
    n = len(received)
    nsym = 2 * e
    if e < 0 or n > CODE_LENGTH or n < nsym:
        raise RSParameterError(f"bad received length {n} for e={e}")
    data_len = n - nsym
    if e == 0:
        return bytes(received), OK
    synd = syndromes(received, nsym)
    if not any(synd):
        return bytes(received[:data_len]), OK

    locator, nerr = _berlekamp_massey(synd)
    if nerr > e or len(locator) - 1 != nerr:
        return bytes(received[:data_len]), FAILURE

    # Chien search over positions present in the (possibly shortened) word.
    degrees = np.arange(n - 1, -1, -1)
    inv_x = EXP[(255 - degrees) % 255]
    acc = np.zeros(n, dtype=np.int64)
    for c in reversed(locator):
        acc = MUL[acc, inv_x].astype(np.int64) ^ c
    positions = np.flatnonzero(acc == 0).tolist()
    if len(positions) != nerr:
        return bytes(received[:data_len]), FAILURE

    # Forney, first consecutive root alpha^1.
    omega = [0] * nsym
    for i, s in enumerate(synd):
        for j, lc in enumerate(locator):
            if i + j < nsym:
                omega[i + j] ^= gf_mul(s, lc)
    deriv = [locator[i] if i % 2 else 0 for i in range(1, len(locator))]
    fixed = bytearray(received)
    for pos in positions:
        xinv = _EXP[(255 - (n - 1 - pos)) % 255]
        denom = _poly_eval_low(deriv, xinv)
        if denom == 0:
            return bytes(received[:data_len]), FAILURE
        fixed[pos] ^= gf_div(_poly_eval_low(omega, xinv), denom)
    if any(syndromes(fixed, nsym)):
        return bytes(received[:data_len]), FAILURE
    return bytes(fixed[:data_len]), CORRECTED
