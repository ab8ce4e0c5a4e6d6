"""Desk-scale memory/time comparison of the k-mer trie against a suffix tree.

Each configured (input, k, structure) produces one :class:`BenchRow` with a
modeled byte count (see :mod:`ksa.cost`), an optional measured peak RSS,
the median build time over the configured repetitions, and the throughput of
a fixed-seed query workload. Rows that would exceed the memory ceiling are
reported as aborted instead of being built to completion.

Config files are flat ``key = value`` text; ``#`` starts a comment and
``input`` may repeat::

    output = results.csv
    alphabet = dna
    k_values = 5, 10
    structures = ksa, suffix_tree
    postings = false
    repetitions = 3
    memory_ceiling = 4GiB
    measure_memory = true
    input = rice12 fasta:data/rice12.fa
    input = random100k synthetic:100000:7

Input sources are ``fasta:PATH``, ``plain:PATH`` or ``synthetic:LENGTH:SEED``.
Relative paths resolve against the config file's directory.
"""
from __future__ import annotations

import csv
import gc
import multiprocessing
import os
import statistics
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .alphabet import DNA, Alphabet
from .cost import POSTING_BYTES, STRUCTURES, node_cost_model
from .errors import InvalidParameterError, KsaError
from .sequence_io import SequenceRecord, read_records, synthesize_sequence
from .suffix_tree import SuffixTree
from .trie import KmerIndex

__all__ = [
    "BenchConfig",
    "BenchReport",
    "BenchRow",
    "CSV_COLUMNS",
    "InputSpec",
    "emit_csv",
    "load_config",
    "node_cost_model",
    "parse_config",
    "run_benchmark",
]

CSV_COLUMNS = (
    "dataset", "text_size", "structure", "k", "node_count", "leaf_count",
    "modeled_bytes", "measured_peak_bytes", "build_seconds", "queries_per_second",
)
DEFAULT_CEILING = 4 << 30
SAMPLED_QUERIES = 500
RANDOM_QUERIES = 500

_UNITS = {"": 1, "b": 1, "kib": 1 << 10, "mib": 1 << 20, "gib": 1 << 30,
          "kb": 10**3, "mb": 10**6, "gb": 10**9}


@dataclass
class InputSpec:
    label: str
    kind: str  # fasta | plain | synthetic
    path: str | None = None
    length: int = 0
    seed: int = 0

    @classmethod
    def parse(cls, label: str, source: str, base_dir: Path | None = None) -> "InputSpec":
        kind, _, rest = source.partition(":")
        if kind == "synthetic":
            try:
                length, seed = (int(x) for x in rest.split(":"))
            except ValueError:
                raise InvalidParameterError(f"bad synthetic source {source!r}") from None
            return cls(label, kind, length=length, seed=seed)
        if kind not in ("fasta", "plain") or not rest:
            raise InvalidParameterError(f"bad input source {source!r}")
        path = Path(rest)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        return cls(label, kind, path=str(path))

    def load(self, alphabet: Alphabet) -> list[SequenceRecord]:
        if self.kind == "synthetic":
            return [synthesize_sequence(self.length, alphabet, self.seed)]
        return list(read_records([self.path], alphabet, self.kind))


@dataclass
class BenchConfig:
    inputs: list[InputSpec] = field(default_factory=list)
    k_values: list[int] = field(default_factory=lambda: [5, 10, 15])
    structures: tuple[str, ...] = STRUCTURES
    postings_enabled: bool = False
    repetitions: int = 1
    output: str | None = None
    alphabet: Alphabet = DNA
    memory_ceiling: int = DEFAULT_CEILING
    measure_memory: bool = False
    query_seed: int = 0

    def __post_init__(self):
        if not self.k_values or any(k < 1 for k in self.k_values):
            raise InvalidParameterError("k_values must be non-empty and all >= 1")
        if self.repetitions < 1:
            raise InvalidParameterError("repetitions must be >= 1")
        unknown = set(self.structures) - set(STRUCTURES)
        if unknown:
            raise InvalidParameterError(f"unknown structures {sorted(unknown)}")
        if self.memory_ceiling < 1:
            raise InvalidParameterError("memory_ceiling must be positive")


def _parse_bool(value: str) -> bool:
    v = value.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise InvalidParameterError(f"not a boolean: {value!r}")


def _parse_size(value: str) -> int:
    v = value.strip().lower().replace(" ", "")
    num = v.rstrip("abcdefghijklmnopqrstuvwxyz")
    unit = v[len(num):]
    if unit not in _UNITS or not num:
        raise InvalidParameterError(f"bad size {value!r}")
    return int(float(num) * _UNITS[unit])


def parse_config(text: str, base_dir: Path | None = None) -> BenchConfig:
    kwargs: dict = {"inputs": []}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise InvalidParameterError(f"config line {lineno}: expected key = value")
        key, value = key.strip(), value.strip()
        try:
            _apply_setting(kwargs, key, value, base_dir)
        except InvalidParameterError as exc:
            raise InvalidParameterError(f"config line {lineno}: {exc}") from None
        except ValueError:
            raise InvalidParameterError(
                f"config line {lineno}: bad value {value!r} for {key}") from None
    return BenchConfig(**kwargs)


def _apply_setting(kwargs: dict, key: str, value: str, base_dir: Path | None):
    if key == "input":
        label, _, source = value.partition(" ")
        if not source.strip():
            raise InvalidParameterError("input needs LABEL SOURCE")
        kwargs["inputs"].append(InputSpec.parse(label, source.strip(), base_dir))
    elif key == "k_values":
        kwargs["k_values"] = [int(x) for x in value.split(",") if x.strip()]
    elif key == "structures":
        kwargs["structures"] = tuple(x.strip() for x in value.split(",") if x.strip())
    elif key == "postings":
        kwargs["postings_enabled"] = _parse_bool(value)
    elif key == "repetitions":
        kwargs["repetitions"] = int(value)
    elif key == "output":
        path = Path(value)
        if base_dir is not None and not path.is_absolute():
            path = base_dir / path
        kwargs["output"] = str(path)
    elif key == "alphabet":
        kwargs["alphabet"] = Alphabet.from_name(value)
    elif key == "memory_ceiling":
        kwargs["memory_ceiling"] = _parse_size(value)
    elif key == "measure_memory":
        kwargs["measure_memory"] = _parse_bool(value)
    elif key == "query_seed":
        kwargs["query_seed"] = int(value)
    else:
        raise InvalidParameterError(f"unknown key {key!r}")


def load_config(path) -> BenchConfig:
    path = Path(path)
    return parse_config(path.read_text(), base_dir=path.parent)


@dataclass
class BenchRow:
    dataset: str
    text_size: int
    structure: str
    k: int
    node_count: int | None = None
    leaf_count: int | None = None
    modeled_bytes: int | None = None
    measured_peak_bytes: int | None = None
    build_seconds: float | None = None
    queries_per_second: float | None = None
    status: str = "ok"  # ok | aborted | error
    note: str = ""
    workload_hits: int = 0
    workload_sampled: int = 0


@dataclass
class BenchReport:
    rows: list[BenchRow] = field(default_factory=list)
    memory_ceiling: int = DEFAULT_CEILING
    suffix_tree_algorithm: str = SuffixTree.algorithm

    def find(self, dataset: str, structure: str, k: int) -> BenchRow:
        for row in self.rows:
            if (row.dataset, row.structure, row.k) == (dataset, structure, k):
                return row
        raise KeyError((dataset, structure, k))

    def space_ratio(self, dataset: str, k: int) -> float | None:
        """Suffix-tree modeled bytes divided by k-mer trie modeled bytes."""
        try:
            st, ksa = self.find(dataset, "suffix_tree", k), self.find(dataset, "ksa", k)
        except KeyError:
            return None
        if not st.modeled_bytes or not ksa.modeled_bytes:
            return None
        return st.modeled_bytes / ksa.modeled_bytes

    def summary_lines(self) -> list[str]:
        lines = []
        seen = []
        for row in self.rows:
            key = (row.dataset, row.k)
            if key in seen:
                continue
            seen.append(key)
            ratio = self.space_ratio(*key)
            if ratio is not None:
                lines.append(f"{row.dataset} k={row.k}: suffix_tree/ksa modeled bytes = {ratio:.2f}")
        return lines


def modeled_upper_bound(structure: str, alphabet: Alphabet, lengths: list[int], k: int,
                        postings: bool) -> int:
    """Worst-case modeled bytes, used to refuse builds above the ceiling."""
    sigma = len(alphabet)
    if structure == "suffix_tree":
        n = sum(lengths)
        return 2 * (n + 1) * node_cost_model("suffix_tree", sigma)
    windows = sum(max(0, n - k + 1) for n in lengths)
    nodes = 1
    for d in range(1, k + 1):
        level = windows if d * sigma.bit_length() > 64 else sigma ** d
        nodes += min(level, windows)
    return nodes * node_cost_model("ksa", sigma) + (windows * POSTING_BYTES if postings else 0)


def _build(structure: str, records: list[SequenceRecord], k: int, config: BenchConfig):
    if structure == "ksa":
        index = KmerIndex(k, config.alphabet, postings=config.postings_enabled)
        for rec in records:
            index.index_sequence(rec.data, rec.seq_id)
        return index.freeze()
    return SuffixTree(b"".join(rec.data for rec in records), config.alphabet)


def _workload(records: list[SequenceRecord], k: int, alphabet: Alphabet, seed: int):
    rng = np.random.default_rng(seed)
    usable = [rec.data for rec in records if len(rec.data) >= k]
    sampled = []
    if usable:
        weights = np.array([len(d) - k + 1 for d in usable], dtype=float)
        picks = rng.choice(len(usable), size=SAMPLED_QUERIES, p=weights / weights.sum())
        for which in picks:
            data = usable[which]
            off = int(rng.integers(0, len(data) - k + 1))
            sampled.append(data[off:off + k])
    symbols = np.frombuffer(alphabet.symbols, dtype=np.uint8)
    randoms = [symbols[rng.integers(0, len(alphabet), size=k)].tobytes()
               for _ in range(RANDOM_QUERIES)]
    return sampled, randoms


def _rss_now() -> tuple[int | None, int | None]:
    """(current RSS, peak RSS) in bytes from /proc, or (None, None)."""
    try:
        with open("/proc/self/status") as fh:
            fields = dict(line.split(":", 1) for line in fh if ":" in line)
        return int(fields["VmRSS"].split()[0]) * 1024, int(fields["VmHWM"].split()[0]) * 1024
    except (OSError, KeyError, ValueError):
        return None, None


def _measure_row(structure, records, k, config) -> dict:
    """Build, time and query one structure; returns BenchRow fields."""
    times = []
    built = None
    gc_was_enabled = gc.isenabled()
    for _ in range(config.repetitions):
        built = None
        gc.collect()
        gc.disable()
        try:
            t0 = time.perf_counter()
            built = _build(structure, records, k, config)
            times.append(time.perf_counter() - t0)
        finally:
            if gc_was_enabled:
                gc.enable()
    stats = built.stats()
    sampled, randoms = _workload(records, k, config.alphabet, config.query_seed)
    count = built.count_occurrences if structure == "ksa" else built.count
    t0 = time.perf_counter()
    hits = sum(1 for p in sampled if count(p) >= 1)
    for p in randoms:
        count(p)
    elapsed = time.perf_counter() - t0
    n_queries = len(sampled) + len(randoms)
    return dict(
        node_count=stats.node_count,
        leaf_count=stats.leaf_count,
        modeled_bytes=stats.estimated_bytes,
        build_seconds=statistics.median(times),
        queries_per_second=n_queries / elapsed if elapsed > 0 else float("inf"),
        workload_hits=hits,
        workload_sampled=len(sampled),
    )


def _child_entry(conn, structure, records, k, config, limit):
    try:
        if limit is not None:
            import resource
            resource.setrlimit(resource.RLIMIT_AS, (limit, limit))
        base_rss, _ = _rss_now()
        result = _measure_row(structure, records, k, config)
        _, peak = _rss_now()
        if peak is not None and base_rss is not None:
            result["measured_peak_bytes"] = grown = max(0, peak - base_rss)
            # pages inherited from the parent can be reused without growing the
            # address space, so the rlimit alone does not catch every overrun
            if grown > config.memory_ceiling:
                conn.send(("aborted", f"measured peak {grown} exceeds ceiling"))
                return
        conn.send(("ok", result))
    except MemoryError:
        conn.send(("aborted", "memory ceiling exceeded"))
    except Exception as exc:  # reported as an error row
        conn.send(("error", f"{type(exc).__name__}: {exc}"))
    finally:
        conn.close()


def _vm_size() -> int | None:
    try:
        with open("/proc/self/status") as fh:
            for line in fh:
                if line.startswith("VmSize:"):
                    return int(line.split()[1]) * 1024
    except OSError:
        pass
    return None


def _run_isolated(structure, records, k, config) -> tuple[str, object]:
    """Run one row in a forked child so its peak RSS and address space are its own."""
    ctx = multiprocessing.get_context("fork")
    parent, child = ctx.Pipe(duplex=False)
    vm = _vm_size()
    limit = vm + config.memory_ceiling if vm is not None else None
    proc = ctx.Process(target=_child_entry, args=(child, structure, records, k, config, limit))
    proc.start()
    child.close()
    try:
        outcome = parent.recv()
    except EOFError:
        outcome = ("aborted", f"worker exited with code {proc.exitcode}")
    proc.join()
    return outcome


def run_benchmark(config: BenchConfig) -> BenchReport:
    report = BenchReport(memory_ceiling=config.memory_ceiling)
    for source in config.inputs:
        try:
            records = source.load(config.alphabet)
            load_error = None
        except (OSError, KsaError) as exc:
            records, load_error = [], f"{type(exc).__name__}: {exc}"
        lengths = [len(rec.data) for rec in records]
        text_size = sum(lengths)
        for k in config.k_values:
            for structure in config.structures:
                row = BenchRow(source.label, text_size, structure, k)
                report.rows.append(row)
                if load_error is not None:
                    row.status, row.note = "error", load_error
                    continue
                if structure == "suffix_tree" and text_size == 0:
                    row.status, row.note = "error", "suffix tree needs non-empty text"
                    continue
                bound = modeled_upper_bound(structure, config.alphabet, lengths, k,
                                            config.postings_enabled and structure == "ksa")
                if bound > config.memory_ceiling:
                    row.status = "aborted"
                    row.note = f"modeled bound {bound} exceeds ceiling"
                    continue
                if config.measure_memory:
                    status, payload = _run_isolated(structure, records, k, config)
                else:
                    try:
                        status, payload = "ok", _measure_row(structure, records, k, config)
                    except MemoryError:
                        status, payload = "aborted", "memory ceiling exceeded"
                if status == "ok":
                    for name, value in payload.items():
                        setattr(row, name, value)
                else:
                    row.status, row.note = status, payload
    return report


def _fmt(value, pattern: str = "") -> str:
    if value is None:
        return ""
    return format(value, pattern)


def emit_csv(report: BenchReport, path) -> None:
    """Write the report as CSV (header + one line per row)."""
    if str(path) == "-":
        _write_csv(report, sys.stdout)
        return
    with open(path, "w", newline="") as fh:
        _write_csv(report, fh)


def _write_csv(report: BenchReport, fh) -> None:
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows:
        if row.status == "aborted":
            measured = f">{report.memory_ceiling}"
        elif row.status == "error":
            measured = "ERROR"
        else:
            measured = _fmt(row.measured_peak_bytes)
        writer.writerow([
            row.dataset, row.text_size, row.structure, row.k,
            _fmt(row.node_count), _fmt(row.leaf_count), _fmt(row.modeled_bytes),
            measured, _fmt(row.build_seconds, ".6f"), _fmt(row.queries_per_second, ".1f"),
        ])


def ensure_parent(path) -> None:
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)
