"""Command-line front end.

    lzrsa pack INPUT OUTPUT [--mode adaptive|constant] [--e E] [--e1 E1]
    lzrsa unpack INPUT OUTPUT
    lzrsa corrupt INPUT OUTPUT --ber BER [--seed S]
    lzrsa stats FILE... [--prefix-len N ...] [--substrings K]
    lzrsa bench --corpus DIR [--bers ...] [--trials N] --out results.csv

Results go to stdout as ``key=value`` lines. Exit status: 0 success,
1 decode failure, 2 usage or parameter error.
"""

import argparse
import logging
import sys
from pathlib import Path

from . import channel, framing, lz77, pipeline
from .errors import CapacityError, FramingError
from .framing import ADAPTIVE, CONSTANT

EXIT_OK, EXIT_DECODE, EXIT_USAGE = 0, 1, 2

log = logging.getLogger("lzrsa")


def _emit(out, **kv):
    for k, v in kv.items():
        if isinstance(v, float):
            v = f"{v:.4f}"
        print(f"{k}={v}", file=out)


def _codec_args(p):
    p.add_argument("--window", type=int, default=lz77.WINDOW,
                   help="sliding window in bytes (default %(default)s); unpack must match pack")
    p.add_argument("--max-len", type=int, default=lz77.MAX_LEN,
                   help="longest match in bytes (default %(default)s)")


def cmd_pack(args, out):
    source = Path(args.input).read_bytes()
    if args.mode == ADAPTIVE:
        pf = pipeline.encode_adaptive(source, 1 if args.e1 is None else args.e1,
                                      args.window, args.max_len)
    else:
        pf = pipeline.encode(source, CONSTANT, e=args.e, e1=args.e1,
                             window=args.window, max_len=args.max_len)
    Path(args.output).write_bytes(pf.to_bytes())
    _emit(out, mode=pf.mode, source_bytes=len(source), payload_bytes=len(pf.payload),
          header_bytes=pf.header_size, blocks=len(pf.plan.blocks), e1=pf.e1,
          mean_e=pf.plan.mean_e)
    if pf.mode == CONSTANT:
        _emit(out, e=pf.e)
    if pf.plan.clamps:
        _emit(out, clamped_blocks=",".join(map(str, pf.plan.clamps)))
    return EXIT_OK


def cmd_unpack(args, out):
    blob = Path(args.input).read_bytes()
    try:
        result = pipeline.decode(blob, args.window, args.max_len)
    except FramingError as exc:
        _emit(out, status="failed", cause=f"container: {exc}")
        return EXIT_DECODE
    if not result.ok:
        partial = Path(str(args.output) + ".partial")
        partial.write_bytes(result.data)
        _emit(out, status="failed", failed_block=result.failed_block, cause=result.cause,
              partial_bytes=len(result.data), partial=partial)
        return EXIT_DECODE
    Path(args.output).write_bytes(result.data)
    _emit(out, status=result.status, blocks=len(result.e_sequence),
          blocks_corrected=result.blocks_corrected, bytes=len(result.data))
    return EXIT_OK


def cmd_corrupt(args, out):
    pf = framing.ProtectedFile.from_bytes(Path(args.input).read_bytes())
    bad = channel.corrupt_file(pf, channel.ErrorModel(args.ber, args.seed))
    Path(args.output).write_bytes(bad.to_bytes())
    _emit(out, ber=args.ber, seed=args.seed, payload_bytes=len(pf.payload),
          flips=channel.count_flips(pf.payload, bad.payload))
    return EXIT_OK


def cmd_stats(args, out):
    from . import report

    for name in args.inputs:
        data = Path(name).read_bytes()
        for length in args.prefix_len:
            st = channel.capacity_stats(data, length, args.substrings, args.e1,
                                        args.window, args.max_len)
            _emit(out, file=name, length=min(length, len(data)), substrings=len(st["offsets"]),
                  e_max_first=st["e_max_first"], e_max_avg=st["e_max_avg"],
                  mean_e_avg=st["mean_e_avg"])
            if args.plot:
                toks = lz77.compress(data[:length], args.window, args.max_len)
                stream = lz77.serialize(toks)
                plan = framing.plan_blocks(toks, stream, args.e1)
                dest = Path(args.plot) / f"{Path(name).name}-{length}-parity.png"
                dest.parent.mkdir(parents=True, exist_ok=True)
                report.plot_parity_profile(plan, dest, st["e_max_first"],
                                           title=f"{Path(name).name}, first {length} bytes")
                _emit(out, figure=dest)
    return EXIT_OK


def cmd_bench(args, out):
    files = sorted(p for p in Path(args.corpus).iterdir() if p.is_file())
    if not files:
        print(f"no files in {args.corpus}", file=sys.stderr)
        return EXIT_USAGE
    reports = []
    for path in files:
        source = path.read_bytes()[:args.prefix_len]
        if not source:
            continue
        tokens = lz77.compress(source, args.window, args.max_len)
        stream = lz77.serialize(tokens)
        e_const = framing.max_constant_e(tokens, stream) if args.e is None else args.e
        if args.e1 is None:
            e1 = max(1, round(framing.plan_blocks(tokens, stream, 1).mean_e))
        else:
            e1 = args.e1
        for mode, e in ((CONSTANT, e_const), (ADAPTIVE, e1)):
            rs = channel.run_experiment(source, mode, e, args.bers, args.trials, args.seed,
                                        path.name, args.window, args.max_len, args.workers)
            reports.extend(rs)
            for r in rs:
                _emit(out, input=r.input, algorithm=r.algorithm, e1=r.e1, ber=r.ber,
                      successes=r.successes, trials=r.trials, flips=r.flips)
    dest = Path(args.out)
    dest.parent.mkdir(parents=True, exist_ok=True)
    with open(dest, "w", newline="") as fh:
        channel.write_csv(reports, fh)
    _emit(out, csv=dest)
    if not args.no_plot:
        from . import report

        for fig in report.render_bench(reports, dest):
            _emit(out, figure=fig)
    return EXIT_OK


def _float_list(text):
    return [float(x) for x in text.split(",") if x.strip()]


def build_parser():
    parser = argparse.ArgumentParser(prog="lzrsa", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pack", help="compress with embedded RS parity")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--mode", choices=[ADAPTIVE, CONSTANT], default=ADAPTIVE)
    p.add_argument("--e", type=int, default=None,
                   help="constant mode parity (default: largest feasible)")
    p.add_argument("--e1", type=int, default=None,
                   help="first-block parity (adaptive default 1, constant default e); 0 = plain LZ'77 payload")
    _codec_args(p)
    p.set_defaults(func=cmd_pack)

    p = sub.add_parser("unpack", help="correct and decompress a container")
    p.add_argument("input")
    p.add_argument("output")
    _codec_args(p)
    p.set_defaults(func=cmd_unpack)

    p = sub.add_parser("corrupt", help="flip random payload bits of a container")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--ber", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_corrupt)

    p = sub.add_parser("stats", help="max constant e and mean adaptive e_n of file prefixes")
    p.add_argument("inputs", nargs="+")
    p.add_argument("--prefix-len", type=int, action="append", default=None,
                   help="substring length, repeatable (default 10000)")
    p.add_argument("--substrings", type=int, default=1,
                   help="number of evenly spaced substrings per length")
    p.add_argument("--e1", type=int, default=1)
    p.add_argument("--plot", metavar="DIR", help="write per-block parity figures here")
    _codec_args(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("bench", help="error-injection experiment over a corpus directory")
    p.add_argument("--corpus", required=True)
    p.add_argument("--bers", type=_float_list, default=[1e-4, 2e-4, 5e-4, 1e-3, 2e-3])
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--prefix-len", type=int, default=3000)
    p.add_argument("--e", type=int, default=None, help="constant e (default: largest feasible)")
    p.add_argument("--e1", type=int, default=None,
                   help="adaptive e1 (default: rounded mean e_n of the input)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", required=True, help="CSV path; figures are written beside it")
    p.add_argument("--no-plot", action="store_true")
    _codec_args(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "prefix_len", None) is None and args.command == "stats":
        args.prefix_len = [10000]
    try:
        return args.func(args, out)
    except CapacityError as exc:
        print(f"error: {exc}", file=sys.stderr)
        if exc.block is not None:
            _emit(out, status="capacity_error", block=exc.block)
        return EXIT_USAGE
    except (ValueError, OSError, FramingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
