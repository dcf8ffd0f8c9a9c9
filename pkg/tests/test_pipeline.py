import random
from dataclasses import replace

import pytest

import corpus
import oracles
from lzrsa import framing, lz77, pipeline
from lzrsa.errors import CapacityError
from lzrsa.framing import ProtectedFile
from lzrsa.pipeline import decode, encode_adaptive, encode_constant


@pytest.fixture(scope="module")
def prose_3k():
    return corpus.files()["prose"][:3000]


def corrupt_bytes(payload, positions, rnd):
    buf = bytearray(payload)
    for p in positions:
        buf[p] ^= rnd.randint(1, 255)
    return bytes(buf)


@pytest.mark.parametrize("name", list(corpus.files()))
@pytest.mark.parametrize("mode", ["adaptive", "constant"])
def test_round_trip(name, mode):
    data = corpus.files()[name][:3000]
    pf = pipeline.encode(data, mode)
    out = decode(pf.to_bytes())
    assert out.status == "ok"
    assert out.data == data
    assert out.e_sequence == pf.plan.e_sequence


@pytest.mark.parametrize("data", [b"", b"a", b"ab", b"abcabcabc", bytes(300)])
@pytest.mark.parametrize("e1", [0, 1, 5])
def test_tiny_inputs(data, e1):
    pf = encode_adaptive(data, e1)
    assert decode(pf.to_bytes()).data == data


def test_single_block_has_no_embedding():
    data = b"the cat sat on the mat; the cat sat on the hat"
    pf = encode_adaptive(data, 1)
    toks = lz77.compress(data)
    assert len(pf.plan.blocks) == 1
    assert pf.payload == lz77.serialize(toks)
    assert pf.to_bytes() == pf.header_bytes() + pf.payload
    assert len(pf.rs1) == 2


def test_backward_compatible_when_e1_zero(prose_3k):
    pf = encode_adaptive(prose_3k, 0)
    assert pf.rs1 == b""
    assert oracles.plain_lz77_decode(pf.payload) == prose_3k
    assert lz77.decompress(lz77.deserialize(pf.payload)) == prose_3k


def test_payload_size_neutral(prose_3k):
    plain = lz77.serialize(lz77.compress(prose_3k))
    for e1 in (0, 1, 4):
        pf = encode_adaptive(prose_3k, e1)
        assert len(pf.payload) == len(plain)
        assert len(pf.to_bytes()) - len(plain) == 15 + 2 * e1


def test_embedding_leaves_multiplicity_unchanged(prose_3k):
    pf = encode_adaptive(prose_3k, 1)
    toks = lz77.compress(prose_3k)
    hist = lz77.History()
    for orig, got in zip(toks, lz77.deserialize(pf.payload)):
        at = hist.apply(got)
        assert hist.candidates(at, got.length) == orig.candidates
    # and parity really was embedded somewhere
    assert pf.payload != lz77.serialize(toks)


def test_constant_mode_zero_is_plain(prose_3k):
    pf = encode_constant(prose_3k, 0)
    assert pf.payload == lz77.serialize(lz77.compress(prose_3k))
    assert pf.rs1 == b""
    assert decode(pf).data == prose_3k


def test_constant_mode_capacity_error_names_block(prose_3k):
    toks = lz77.compress(prose_3k)
    emax = framing.max_constant_e(toks, lz77.serialize(toks))
    encode_constant(prose_3k, emax)
    with pytest.raises(CapacityError) as info:
        encode_constant(prose_3k, emax + 1)
    assert info.value.block == framing.constant_shortfall(toks, lz77.serialize(toks), emax + 1)
    assert info.value.block >= 1


def test_geo_like_data_supports_constant_e3():
    data = corpus.files()["geo"][:10000]
    pf = encode_constant(data, 3)
    assert decode(pf).data == data


def test_correct_up_to_e_in_one_block(prose_3k):
    pf = encode_adaptive(prose_3k, 3)
    rnd = random.Random(0)
    for n, blk in enumerate(pf.plan.blocks):
        if blk.e == 0:
            continue
        positions = rnd.sample(range(blk.start, blk.end), min(blk.e, blk.length))
        bad = replace(pf, payload=corrupt_bytes(pf.payload, positions, rnd))
        out = decode(bad)
        assert out.status == "corrected", n
        assert out.data == prose_3k
        assert out.blocks_corrected == 1


def test_bit_flips_within_e_bytes_corrected(prose_3k):
    pf = encode_adaptive(prose_3k, 2)
    blk = pf.plan.blocks[3]
    buf = bytearray(pf.payload)
    for p in range(blk.start, blk.start + blk.e):
        buf[p] ^= 0xFF              # all 8 bits of each byte
    out = decode(replace(pf, payload=bytes(buf)))
    assert out.data == prose_3k


def test_errors_beyond_e_are_reported(prose_3k, record_property):
    pf = encode_adaptive(prose_3k, 2)
    rnd = random.Random(1)
    outcomes = {"failed": 0, "wrong": 0, "recovered": 0}
    for _ in range(60):
        blk = rnd.choice([b for b in pf.plan.blocks if b.e])
        positions = rnd.sample(range(blk.start, blk.end), min(blk.e + 1, blk.length))
        out = decode(replace(pf, payload=corrupt_bytes(pf.payload, positions, rnd)))
        if not out.ok:
            outcomes["failed"] += 1
            assert prose_3k.startswith(out.data)
            assert out.failed_block is not None and out.cause in ("rs", "stream")
        elif out.data == prose_3k:
            outcomes["recovered"] += 1
        else:
            outcomes["wrong"] += 1
    record_property("beyond_e_outcomes", outcomes)
    assert outcomes["failed"] > 0
    assert outcomes["recovered"] < 60


def test_failed_decode_returns_prefix(prose_3k):
    pf = encode_adaptive(prose_3k, 1)
    blk = pf.plan.blocks[4]
    buf = bytearray(pf.payload)
    for p in range(blk.start, blk.end, 2):
        buf[p] ^= 0x33
    out = decode(replace(pf, payload=bytes(buf)))
    assert out.status == "failed"
    assert out.failed_block == 5
    assert prose_3k.startswith(out.data)
    assert len(out.data) > 0


def test_truncated_payload(prose_3k):
    pf = encode_adaptive(prose_3k, 1)
    blob = pf.to_bytes()[:-100]
    out = decode(blob)
    assert out.status == "failed"
    assert out.cause == "truncated"
    assert prose_3k.startswith(out.data)


def test_mean_adaptive_e_at_least_max_constant():
    for name, data in corpus.files().items():
        for n in (3000, 30000):
            toks = lz77.compress(data[:n])
            stream = lz77.serialize(toks)
            plan = framing.plan_blocks(toks, stream, 1)
            assert plan.mean_e >= framing.max_constant_e(toks, stream), name


def test_decode_accepts_container_or_bytes(prose_3k):
    pf = encode_adaptive(prose_3k, 1)
    assert decode(pf).data == decode(pf.to_bytes()).data == decode(ProtectedFile.from_bytes(pf.to_bytes())).data
