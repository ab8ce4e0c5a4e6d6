import pytest

from ksa import DNA, PROTEIN, create_index
from ksa.bench import (
    CSV_COLUMNS,
    BenchConfig,
    InputSpec,
    emit_csv,
    load_config,
    modeled_upper_bound,
    node_cost_model,
    parse_config,
    run_benchmark,
)
from ksa.errors import InvalidParameterError


def synth(label, n, seed=1):
    return InputSpec(label, "synthetic", length=n, seed=seed)


# -- cost model -----------------------------------------------------------

def test_dna_array_node_cost():
    # 4 child slots of 8 bytes plus the 16-byte header
    assert node_cost_model("ksa", 4, "array", 8) == 32 + 16


def test_cost_grows_with_alphabet_per_child_map_kind():
    assert node_cost_model("ksa", 20, "array") > node_cost_model("ksa", 4, "array")
    assert node_cost_model("ksa", 20, "sparse") >= node_cost_model("ksa", 4, "sparse")
    assert node_cost_model("ksa", 4) == node_cost_model("ksa", 4, "array")
    assert node_cost_model("ksa", 20) == node_cost_model("ksa", 20, "sparse")


def test_suffix_tree_node_costs_more():
    for sigma in (4, 20, 256):
        assert node_cost_model("suffix_tree", sigma) > node_cost_model("ksa", sigma)


def test_empty_index_costs_one_node():
    assert create_index(4, DNA).stats().estimated_bytes == node_cost_model("ksa", 4)
    assert create_index(4, PROTEIN).stats().estimated_bytes == node_cost_model("ksa", 20)


def test_cost_model_rejects_unknowns():
    with pytest.raises(ValueError):
        node_cost_model("btree", 4)
    with pytest.raises(ValueError):
        node_cost_model("ksa", 4, "hash")


# -- config ---------------------------------------------------------------

def test_parse_config(tmp_path):
    cfg = tmp_path / "bench.cfg"
    cfg.write_text(
        "# desk-scale run\n"
        "output = out/results.csv\n"
        "alphabet = protein\n"
        "k_values = 5, 10,15\n"
        "structures = ksa\n"
        "postings = yes\n"
        "repetitions = 3\n"
        "memory_ceiling = 2GiB\n"
        "measure_memory = false\n"
        "input = chr12 fasta:data/chr12.fa   # relative to the config\n"
        "input = rnd synthetic:1000:4\n"
    )
    config = load_config(cfg)
    assert config.output == str(tmp_path / "out/results.csv")
    assert config.alphabet == PROTEIN
    assert config.k_values == [5, 10, 15]
    assert config.structures == ("ksa",)
    assert config.postings_enabled
    assert config.repetitions == 3
    assert config.memory_ceiling == 2 << 30
    assert config.inputs[0] == InputSpec("chr12", "fasta", path=str(tmp_path / "data/chr12.fa"))
    assert config.inputs[1] == InputSpec("rnd", "synthetic", length=1000, seed=4)


@pytest.mark.parametrize("text", [
    "k_values = 0\n",
    "repetitions = 0\n",
    "structures = ksa, btree\n",
    "colour = blue\n",
    "just a line\n",
    "input = lonely\n",
    "input = x gzip:file\n",
    "memory_ceiling = lots\n",
    "postings = maybe\n",
])
def test_bad_config(text):
    with pytest.raises(InvalidParameterError):
        parse_config(text)


# -- run_benchmark --------------------------------------------------------

def test_empty_input_list():
    report = run_benchmark(BenchConfig())
    assert report.rows == []


def test_four_rows_and_k5_space_advantage():
    config = BenchConfig(inputs=[synth("dna100k", 10 ** 5)], k_values=[5, 10])
    report = run_benchmark(config)
    assert [(r.structure, r.k) for r in report.rows] == [
        ("ksa", 5), ("suffix_tree", 5), ("ksa", 10), ("suffix_tree", 10)]
    assert all(r.status == "ok" for r in report.rows)
    ksa5 = report.find("dna100k", "ksa", 5)
    st5 = report.find("dna100k", "suffix_tree", 5)
    assert ksa5.modeled_bytes < st5.modeled_bytes
    assert ksa5.node_count == 1365
    assert st5.leaf_count == 10 ** 5 + 1
    assert report.space_ratio("dna100k", 5) == st5.modeled_bytes / ksa5.modeled_bytes
    assert report.suffix_tree_algorithm == "ukkonen"
    for row in report.rows:
        assert row.workload_sampled == 500
        assert row.workload_hits == 500
        assert row.build_seconds > 0
        assert row.queries_per_second > 0
    assert len(report.summary_lines()) == 2


def test_k5_saturates_at_1365_nodes():
    config = BenchConfig(inputs=[synth("a", 10 ** 5, 7), synth("b", 10 ** 6, 7)],
                         k_values=[5], structures=("ksa",))
    report = run_benchmark(config)
    counts = [r.node_count for r in report.rows]
    assert counts == [1365, 1365] == [sum(4 ** d for d in range(6))] * 2


def test_k_sensitivity():
    config = BenchConfig(inputs=[synth("a", 20000)], k_values=[3, 5, 8, 12], structures=("ksa",))
    sizes = [r.modeled_bytes for r in run_benchmark(config).rows]
    assert sizes == sorted(sizes) and len(set(sizes)) == len(sizes)


def test_modeled_bytes_formula_with_postings():
    config = BenchConfig(inputs=[synth("a", 5000)], k_values=[6], structures=("ksa",),
                         postings_enabled=True)
    row = run_benchmark(config).rows[0]
    assert row.modeled_bytes == row.node_count * 48 + (5000 - 6 + 1) * 12


def test_unreadable_input_gives_error_rows(tmp_path):
    config = BenchConfig(inputs=[InputSpec("gone", "fasta", path=str(tmp_path / "nope.fa")),
                                 synth("ok", 1000)], k_values=[4])
    report = run_benchmark(config)
    assert [r.status for r in report.rows] == ["error", "error", "ok", "ok"]
    assert "FileNotFoundError" in report.rows[0].note


def test_ceiling_aborts_by_model_bound():
    config = BenchConfig(inputs=[synth("a", 10 ** 4)], k_values=[8], memory_ceiling=10 ** 5)
    report = run_benchmark(config)
    assert [r.status for r in report.rows] == ["aborted", "aborted"]
    assert report.rows[0].node_count is None


def test_upper_bound_dominates_actual():
    config = BenchConfig(inputs=[synth("a", 3000)], k_values=[2, 6, 9], postings_enabled=True)
    report = run_benchmark(config)
    for row in report.rows:
        bound = modeled_upper_bound(row.structure, DNA, [3000], row.k,
                                    row.structure == "ksa")
        assert row.modeled_bytes <= bound


def test_isolated_rows_report_measured_peak():
    config = BenchConfig(inputs=[synth("a", 20000)], k_values=[8], measure_memory=True)
    report = run_benchmark(config)
    for row in report.rows:
        assert row.status == "ok"
        assert row.measured_peak_bytes is not None and row.measured_peak_bytes >= 0
    plain = run_benchmark(BenchConfig(inputs=[synth("a", 20000)], k_values=[8]))
    assert [r.node_count for r in plain.rows] == [r.node_count for r in report.rows]


def test_isolated_row_hits_address_space_limit():
    config = BenchConfig(inputs=[synth("a", 10 ** 6)], k_values=[5], structures=("ksa",),
                         measure_memory=True, memory_ceiling=70000)
    bound = modeled_upper_bound("ksa", DNA, [10 ** 6], 5, False)
    assert bound < config.memory_ceiling  # passes the model check, fails for real
    (row,) = run_benchmark(config).rows
    assert row.status == "aborted"


# -- CSV ------------------------------------------------------------------

@pytest.fixture(scope="module")
def small_report():
    return run_benchmark(BenchConfig(inputs=[synth("s", 2000)], k_values=[4, 8]))


def test_csv_layout(small_report, tmp_path):
    path = tmp_path / "r.csv"
    emit_csv(small_report, path)
    lines = path.read_text().splitlines()
    assert len(lines) == 5
    assert lines[0] == ",".join(CSV_COLUMNS)
    assert lines[0] == ("dataset,text_size,structure,k,node_count,leaf_count,modeled_bytes,"
                        "measured_peak_bytes,build_seconds,queries_per_second")
    first = lines[1].split(",")
    assert first[:4] == ["s", "2000", "ksa", "4"]
    assert first[7] == ""  # not measured


def test_csv_is_deterministic(small_report, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    emit_csv(small_report, a)
    emit_csv(small_report, b)
    assert a.read_bytes() == b.read_bytes()


def test_csv_aborted_token(tmp_path):
    report = run_benchmark(BenchConfig(inputs=[synth("a", 10 ** 4)], k_values=[8],
                                       memory_ceiling=32000000))
    report.rows[1].status = "aborted"
    path = tmp_path / "r.csv"
    emit_csv(report, path)
    fields = path.read_text().splitlines()[2].split(",")
    assert fields[7] == ">32000000"
    assert fields[4:7] == [str(report.rows[1].node_count), str(report.rows[1].leaf_count),
                           str(report.rows[1].modeled_bytes)]


def test_empty_report_csv_is_header_only(tmp_path):
    path = tmp_path / "e.csv"
    emit_csv(run_benchmark(BenchConfig()), path)
    assert path.read_text() == ",".join(CSV_COLUMNS) + "\n"
