"""Bit-error injection and the resilience experiment harness.

Errors are i.i.d. Bernoulli flips over the payload bits (gaps between flips
are geometric). The container header is never corrupted. Trial ``t`` of an
experiment draws its flips from ``seed ^ t``; since a flip happens where a
uniform draw falls below the BER, the patterns for one trial are nested
across the BER sweep and shared between the two algorithms.
"""

import csv
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from . import framing, lz77, pipeline
from .framing import ADAPTIVE, CONSTANT

CSV_FIELDS = ["input", "algorithm", "e1", "ber", "trials", "successes", "mean_e", "payload_bytes"]
ALGORITHMS = {CONSTANT: "LZRS77", ADAPTIVE: "LZRSa77"}


@dataclass(frozen=True)
class ErrorModel:
    ber: float
    seed: int = 0
    kind: str = "iid-bernoulli"

    def __post_init__(self):
        if not 0.0 <= self.ber <= 1.0:
            raise ValueError(f"ber must be in [0, 1], got {self.ber}")


@dataclass
class TrialReport:
    input: str
    algorithm: str
    e1: int
    ber: float
    trials: int
    successes: int
    mean_e: float
    payload_bytes: int
    flips: int = 0      # realized bit flips summed over trials

    def row(self):
        return {
            "input": self.input, "algorithm": self.algorithm, "e1": self.e1,
            "ber": repr(self.ber), "trials": self.trials, "successes": self.successes,
            "mean_e": f"{self.mean_e:.4f}", "payload_bytes": self.payload_bytes,
        }


def flip_mask(nbytes, model):
    rng = np.random.default_rng(model.seed)
    hits = rng.random(nbytes * 8) < model.ber
    return np.packbits(hits)


def inject(payload, model):
    """Flip each payload bit independently with probability ``model.ber``."""
    data = np.frombuffer(bytes(payload), dtype=np.uint8)
    return (data ^ flip_mask(len(data), model)).tobytes()


def corrupt_file(pf, model):
    """Corrupt the payload of a ProtectedFile, leaving its header intact."""
    return replace(pf, payload=inject(pf.payload, model))


def count_flips(a, b):
    x = np.frombuffer(a, dtype=np.uint8) ^ np.frombuffer(b, dtype=np.uint8)
    return int(np.unpackbits(x).sum())


def trial_seed(base, trial):
    return base ^ trial


def _run_point(args):
    pf_bytes, source, ber, trials, seed, window, max_len = args
    pf = framing.ProtectedFile.from_bytes(pf_bytes)
    successes = flips = 0
    for t in range(trials):
        payload = inject(pf.payload, ErrorModel(ber, trial_seed(seed, t)))
        flips += count_flips(payload, pf.payload)
        if payload == pf.payload:
            successes += 1      # clean channel decodes exactly (checked once up front)
            continue
        out = pipeline.decode(replace(pf, payload=payload), window, max_len)
        successes += out.ok and out.data == source
    return successes, flips


def run_experiment(source, mode, e, bers, trials=100, seed=0, input_id="input",
                   window=lz77.WINDOW, max_len=lz77.MAX_LEN, workers=1, container=None):
    """Encode once, then corrupt and decode ``trials`` times per BER.

    ``e`` is the constant parity (``mode="constant"``, None for the largest
    feasible value) or ``e1`` (``mode="adaptive"``). A trial succeeds when the
    decoded bytes equal ``source`` exactly.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    source = bytes(source)
    if container is None:
        if mode == ADAPTIVE:
            container = pipeline.encode_adaptive(source, 1 if e is None else e, window, max_len)
        else:
            container = pipeline.encode(source, CONSTANT, e=e, window=window, max_len=max_len)
    clean = pipeline.decode(container, window, max_len)
    if not (clean.ok and clean.data == source):
        raise RuntimeError("container does not decode on a clean channel")
    blob = container.to_bytes()
    jobs = [(blob, source, float(b), trials, seed, window, max_len) for b in bers]
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_run_point, jobs))
    else:
        results = [_run_point(j) for j in jobs]
    e_report = container.e if container.mode == CONSTANT else container.e1
    mean_e = container.plan.mean_e if container.plan else float(e_report)
    return [
        TrialReport(input_id, ALGORITHMS[container.mode], e_report, float(b), trials, s,
                    mean_e, len(container.payload), f)
        for b, (s, f) in zip(bers, results)
    ]


def binomial_sigma(successes, trials):
    p = successes / trials
    return math.sqrt(trials * p * (1 - p))


def write_csv(reports, fh):
    writer = csv.DictWriter(fh, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in reports:
        writer.writerow(r.row())


def read_csv(fh):
    out = []
    for row in csv.DictReader(fh):
        out.append(TrialReport(row["input"], row["algorithm"], int(row["e1"]), float(row["ber"]),
                               int(row["trials"]), int(row["successes"]), float(row["mean_e"]),
                               int(row["payload_bytes"])))
    return out


def capacity_stats(source, length, substrings=1, e1=1, window=lz77.WINDOW, max_len=lz77.MAX_LEN):
    """Redundancy statistics over ``substrings`` evenly spaced windows of
    ``length`` bytes: max constant e of each, and mean adaptive e_n of each.
    """
    source = bytes(source)
    length = min(length, len(source))
    if length == 0:
        raise ValueError("empty input")
    last = len(source) - length
    offsets = sorted({round(k * last / max(1, substrings - 1)) for k in range(substrings)})
    emax, means = [], []
    for off in offsets:
        tokens = lz77.compress(source[off:off + length], window, max_len)
        stream = lz77.serialize(tokens)
        emax.append(framing.max_constant_e(tokens, stream))
        means.append(framing.plan_blocks(tokens, stream, e1).mean_e)
    return {
        "offsets": offsets,
        "e_max": emax,
        "mean_e": means,
        "e_max_first": emax[0],
        "e_max_avg": float(np.mean(emax)),
        "mean_e_avg": float(np.mean(means)),
    }
