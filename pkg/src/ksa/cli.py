"""``ksa`` command line: build, search, kmers, stats, bench.

Exit status is 0 on success, 1 on domain errors (bad symbols, over-long
patterns, corrupt index files) and 2 on usage errors. Results go to stdout,
diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import contextlib
import struct
import sys
import warnings

from . import __version__
from .alphabet import Alphabet, as_bytes
from .bench import emit_csv, ensure_parent, load_config, run_benchmark
from .errors import KsaError
from .sequence_io import read_records
from .serialize import load, save
from .trie import KmerIndex, ShortSequenceWarning

_LEN_PREFIX = struct.Struct("<I")


class CliError(Exception):
    """Domain failure reported with exit status 1."""


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ksa", description="k-mer truncated suffix trie index")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="index sequence files into a KSA1 file")
    p.add_argument("--k", type=_positive_int, required=True)
    p.add_argument("--input", nargs="+", required=True, metavar="PATH",
                   help="input files; '-' reads standard input")
    p.add_argument("--format", choices=("fasta", "plain"), default="fasta")
    p.add_argument("--alphabet", choices=("dna", "protein", "bytes"), default="dna")
    p.add_argument("--no-postings", action="store_true",
                   help="store occurrence counts only")
    p.add_argument("--out", required=True, metavar="PATH")

    p = sub.add_parser("search", help="look up patterns in an index")
    p.add_argument("--index", required=True, metavar="PATH")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--pattern")
    group.add_argument("--patterns-file", metavar="PATH")
    p.add_argument("--count-only", action="store_true")

    p = sub.add_parser("kmers", help="list k-mers with their counts")
    p.add_argument("--index", required=True, metavar="PATH")
    p.add_argument("--min-count", type=_positive_int, default=1)

    p = sub.add_parser("stats", help="summarize an index")
    p.add_argument("--index", required=True, metavar="PATH")

    p = sub.add_parser("bench", help="run the memory/time benchmark")
    p.add_argument("--config", required=True, metavar="PATH")
    p.add_argument("--out", metavar="PATH", help="CSV path (overrides the config)")
    return parser


_PRINTABLE = frozenset(range(0x20, 0x7F)) - {0x5C}


def _show(kmer: bytes) -> str:
    """Printable ASCII verbatim; every other byte (and backslash) as ``\\xNN``."""
    return "".join(chr(b) if b in _PRINTABLE else f"\\x{b:02x}" for b in kmer)


def _load_index(path) -> KmerIndex:
    try:
        return load(path)
    except OSError as exc:
        raise CliError(f"cannot read index {path}: {exc.strerror or exc}") from None


def cmd_build(args, out, err) -> int:
    alphabet = Alphabet.from_name(args.alphabet)
    index = KmerIndex(args.k, alphabet, postings=not args.no_postings)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", ShortSequenceWarning)
            for rec in read_records(args.input, alphabet, args.format):
                if len(rec.data) < args.k:
                    label = rec.name or f"#{rec.seq_id}"
                    print(f"warning: sequence {label} has length {len(rec.data)} < k={args.k}; "
                          "no windows indexed", file=err)
                index.index_sequence(rec.data, rec.seq_id)
    except OSError as exc:
        raise CliError(f"cannot read input: {exc}") from None
    index.freeze()
    ensure_parent(args.out)
    save(index, args.out)
    stats = index.stats()
    print(f"k={index.k} sequences={len(index.sequence_lengths)} windows={index.total_windows} "
          f"nodes={stats.node_count} modeled_bytes={stats.estimated_bytes}", file=out)
    return 0


def _read_patterns(path, binary: bool) -> list[bytes]:
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise CliError(f"cannot read patterns file: {exc}") from None
    if not binary:
        return [line.rstrip(b"\r") for line in raw.split(b"\n") if line.rstrip(b"\r")]
    patterns, pos = [], 0
    while pos < len(raw):
        if pos + 4 > len(raw):
            raise CliError("truncated length prefix in patterns file")
        (n,) = _LEN_PREFIX.unpack_from(raw, pos)
        pos += 4
        if pos + n > len(raw):
            raise CliError("truncated record in patterns file")
        patterns.append(raw[pos:pos + n])
        pos += n
    return patterns


def cmd_search(args, out, err) -> int:
    index = _load_index(args.index)
    if args.pattern is not None:
        patterns = [as_bytes(args.pattern)]
    else:
        patterns = _read_patterns(args.patterns_file, binary=len(index.alphabet) == 256)
    if not args.count_only and not index.has_postings:
        raise CliError("index was built with --no-postings; use --count-only")
    for pattern in patterns:
        if not pattern:
            continue
        if args.count_only:
            print(f"{_show(pattern)}\t{index.count_occurrences(pattern)}", file=out)
        else:
            hits = index.locate(pattern)
            where = ",".join(f"{s}:{o}" for s, o in hits)
            print(f"{_show(pattern)}\t{len(hits)}\t{where}", file=out)
    return 0


def cmd_kmers(args, out, err) -> int:
    index = _load_index(args.index)
    for kmer, count in index.enumerate_kmers():
        if count >= args.min_count:
            print(f"{_show(kmer)}\t{count}", file=out)
    return 0


def cmd_stats(args, out, err) -> int:
    index = _load_index(args.index)
    stats = index.stats()
    lines = [
        f"k={index.k}",
        f"alphabet_size={len(index.alphabet)}",
        f"sequences={len(index.sequence_lengths)}",
        f"windows={stats.total_windows}",
        f"nodes={stats.node_count}",
        f"leaves={stats.leaf_count}",
        f"distinct_kmers={stats.distinct_kmers}",
        f"height={stats.height}",
        f"postings={'yes' if index.has_postings else 'no'}",
        f"modeled_bytes={stats.estimated_bytes}",
    ]
    print("\n".join(lines), file=out)
    return 0


def cmd_bench(args, out, err) -> int:
    try:
        config = load_config(args.config)
    except OSError as exc:
        raise CliError(f"cannot read config: {exc}") from None
    path = args.out or config.output or "bench.csv"
    report = run_benchmark(config)
    ensure_parent(path)
    emit_csv(report, path)
    for line in report.summary_lines():
        print(line, file=err)
    for row in report.rows:
        if row.status != "ok":
            print(f"{row.dataset} {row.structure} k={row.k}: {row.status}: {row.note}", file=err)
    print(path, file=out)
    return 0


COMMANDS = {
    "build": cmd_build,
    "search": cmd_search,
    "kmers": cmd_kmers,
    "stats": cmd_stats,
    "bench": cmd_bench,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(err):
            args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "search" and args.pattern is not None and not args.pattern:
        parser.print_usage(err)
        print("ksa search: error: --pattern must be non-empty", file=err)
        return 2
    try:
        return COMMANDS[args.command](args, out, err)
    except (KsaError, CliError) as exc:
        print(f"ksa {args.command}: error: {exc}", file=err)
        return 1


def main_entry() -> None:
    sys.exit(main())
