import json
import subprocess
import sys
from pathlib import Path

import pytest

from wmpb.cli import main as cli_main
from wmpb.corpus import FilterPolicy, read_documents
from wmpb.errors import ConfigError
from wmpb.lm import extract_prompt
from wmpb.metrics import MetricSummary
from wmpb.runner import (
    CellKey,
    CellResult,
    ExperimentConfig,
    Pairing,
    ReportBundle,
    SourceSpec,
    build_hlpc,
    emit_report,
    evaluate,
    run_all,
    run_pairing,
)
from wmpb.tokenizer import tokenize


def small_config(output_dir: str, **overrides) -> ExperimentConfig:
    cfg = ExperimentConfig(
        sources=[SourceSpec("synth", n_pairs=120)],
        filter_policy=FilterPolicy(sample_size=25),
        rounds=2,
        global_seed=7,
        output_dir=output_dir,
    )
    for key, value in overrides.items():
        setattr(cfg, key, value)
    return cfg


@pytest.fixture(scope="module")
def built(tmp_path_factory):
    root = tmp_path_factory.mktemp("run")
    cfg = small_config(str(root / "out"))
    run_all(cfg)
    return cfg


def _tree_bytes(root: Path) -> dict[str, bytes]:
    return {p.relative_to(root).as_posix(): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


# --- corpus build -----------------------------------------------------------------


def test_build_counts_per_type(built):
    sdir = built.out_root() / "corpus" / "synth"
    n = built.filter_policy.sample_size
    assert len(read_documents(sdir / "h_doc.jsonl")) == n
    assert len(read_documents(sdir / "h_pp.jsonl")) == n
    assert len(read_documents(sdir / "llm_doc_wm.jsonl")) == n
    assert len(read_documents(sdir / "llm_doc_nw.jsonl")) == n
    for tag in ("wm", "nw"):
        for paraphraser in ("diverse", "conservative"):
            rows = read_documents(sdir / f"llm_pp_{tag}_{paraphraser}.jsonl")
            assert len(rows) == n * built.rounds
            for r in range(1, built.rounds + 1):
                assert sum(1 for d in rows if d.round == r) == n


def test_build_prompts_are_first_five_tokens(built):
    sdir = built.out_root() / "corpus" / "synth"
    h_docs = read_documents(sdir / "h_doc.jsonl")
    for tag in ("wm", "nw"):
        llm_docs = read_documents(sdir / f"llm_doc_{tag}.jsonl")
        for h, l in zip(h_docs, llm_docs):
            assert tokenize(l.text)[:5] == extract_prompt(h)


def test_build_documents_pass_filter_policy(built):
    sdir = built.out_root() / "corpus" / "synth"
    policy = built.filter_policy
    for path in sdir.glob("*.jsonl"):
        for doc in read_documents(path):
            assert policy.min_tokens <= doc.token_count <= policy.max_tokens, path.name


def test_build_byte_identical_reruns(tmp_path):
    cfg_a = small_config(str(tmp_path / "a"))
    cfg_b = small_config(str(tmp_path / "b"))
    build_hlpc(cfg_a)
    build_hlpc(cfg_b)
    a = _tree_bytes(cfg_a.out_root() / "corpus")
    b = _tree_bytes(cfg_b.out_root() / "corpus")
    assert a.keys() == b.keys()
    for name in a:
        assert a[name] == b[name], name


def test_zero_rounds_no_pp_files(tmp_path):
    cfg = small_config(str(tmp_path / "out"), rounds=0)
    build_hlpc(cfg)
    sdir = cfg.out_root() / "corpus" / "synth"
    assert not list(sdir.glob("llm_pp_*"))
    manifest = json.loads((sdir / "manifest.json").read_text())
    assert "rounds=0" in manifest["stages"]["paraphrase"].get("note", "")


def test_long_form_source(tmp_path):
    cfg = small_config(
        str(tmp_path / "out"),
        sources=[SourceSpec("synth", long_form=True, n_pairs=120)],
        rounds=1,
    )
    build_hlpc(cfg)
    sdir = cfg.out_root() / "corpus" / "synth"
    h_docs = read_documents(sdir / "h_doc.jsonl")
    h_pps = read_documents(sdir / "h_pp.jsonl")
    llm_docs = read_documents(sdir / "llm_doc_wm.jsonl")
    for h, l in zip(h_docs, llm_docs):
        assert tokenize(l.text)[:30] == extract_prompt(h, long_form=True)
    # Long-form bases are condensed to the longest human paraphrase.
    cap = max(d.token_count for d in h_pps)
    bases = read_documents(sdir / "llm_base_wm.jsonl")
    assert len(bases) == len(llm_docs)
    assert all(b.token_count <= cap for b in bases)


# --- evaluation -------------------------------------------------------------------


def test_run_pairing_balance_and_shape(built):
    summaries = run_pairing(built, round=1)
    assert summaries
    for label, summary in summaries.items():
        assert summary.n_pos == summary.n_neg, label


def test_run_pairing_round_out_of_range(built):
    with pytest.raises(ConfigError):
        run_pairing(built, round=built.rounds + 1)


def test_evaluate_before_build(tmp_path):
    cfg = small_config(str(tmp_path / "never-built"))
    with pytest.raises(ConfigError, match="build-corpus"):
        evaluate(cfg)


def test_cell_coverage(built):
    bundle = evaluate(built)
    keys = {
        (c.key.watermarked, c.key.paraphraser, c.key.round, c.key.pairing, c.key.detector)
        for c in bundle.cells
    }
    paraphrasers = ("diverse", "conservative")
    expected = set()
    for wm, det in ((True, "watermark"), (False, "likelihood")):
        for pairing in Pairing:
            if pairing in (Pairing.HDOC_VS_LLMDOC, Pairing.HPP_VS_LLMDOC):
                expected.add((wm, "-", 0, pairing, det))
            else:
                for p in paraphrasers:
                    for r in range(built.rounds + 1):
                        expected.add((wm, p, r, pairing, det))
    assert keys == expected
    assert all(c.summary is not None for c in bundle.cells)


def test_full_pairing_pools_both_sides(built):
    bundle = evaluate(built)
    n = built.filter_policy.sample_size
    full = [c for c in bundle.cells if c.key.pairing is Pairing.FULL_VS_FULL]
    assert full
    for cell in full:
        if cell.key.detector == "watermark":
            assert cell.summary.n_pos == cell.summary.n_neg == 2 * n


# --- report emission -----------------------------------------------------------------


def _cell(pairing, auroc, tpr=0.5, acc=0.7, round=1):
    key = CellKey("synth", True, "diverse", round, pairing, "watermark")
    summary = MetricSummary(auroc=auroc, tpr_at_1pct_fpr=tpr, accuracy=acc, n_pos=10, n_neg=10)
    return CellResult(key, summary, 4.0, [(float("inf"), 0.0, 0.0), (float("-inf"), 1.0, 1.0)])


def test_percentage_difference_oracle(tmp_path):
    bundle = ReportBundle(
        config=small_config(str(tmp_path / "out")),
        cells=[
            _cell(Pairing.HDOC_VS_LLMPP, auroc=0.9),
            _cell(Pairing.HPP_VS_LLMPP, auroc=0.85),
            _cell(Pairing.FULL_VS_FULL, auroc=0.8),
        ],
        similarity=[],
        lengths=[],
    )
    emit_report(bundle, tmp_path / "reports")
    lines = (tmp_path / "reports" / "metrics.csv").read_text().splitlines()
    header = lines[0].split(",")
    full_row = next(l for l in lines[1:] if "FULL_VS_FULL" in l).split(",")
    row = dict(zip(header, full_row))
    # (0.8 - 0.9) / 0.9 = -11.11%
    assert row["auroc_pct_vs_hdoc"] == "-11.11"
    assert row["auroc_pct_vs_hpp"] == f"{(0.8 - 0.85) / 0.85 * 100:.2f}"


def test_zero_difference_is_zero(tmp_path):
    bundle = ReportBundle(
        config=small_config(str(tmp_path / "out")),
        cells=[
            _cell(Pairing.HDOC_VS_LLMPP, auroc=0.8),
            _cell(Pairing.FULL_VS_FULL, auroc=0.8),
        ],
        similarity=[],
        lengths=[],
    )
    emit_report(bundle, tmp_path / "reports")
    lines = (tmp_path / "reports" / "metrics.csv").read_text().splitlines()
    full_row = next(l for l in lines[1:] if "FULL_VS_FULL" in l)
    row = dict(zip(lines[0].split(","), full_row.split(",")))
    assert row["auroc_pct_vs_hdoc"] == "0.00"


def test_report_files_exist(built):
    reports = built.out_root() / "reports"
    for name in ("metrics.csv", "similarity.csv", "lengths.csv", "manifest.json", "cells.json"):
        assert (reports / name).exists()
    assert list((reports / "roc").glob("*.csv"))
    manifest = json.loads((reports / "manifest.json").read_text())
    assert manifest["config_hash"] == built.config_hash()
    assert all(cell["status"] == "ok" for cell in manifest["cells"])


def test_manifest_hash_deterministic(tmp_path):
    m1 = run_all(small_config(str(tmp_path / "r1")))
    m2 = run_all(small_config(str(tmp_path / "r2")))
    assert m1["content_hash"] == m2["content_hash"]
    m3 = run_all(small_config(str(tmp_path / "r3"), global_seed=8))
    assert m3["content_hash"] != m1["content_hash"]


def test_watermark_off_drops_watermark_cells(tmp_path):
    cfg = small_config(str(tmp_path / "out"), watermark=None, rounds=1)
    run_all(cfg)
    bundle = evaluate(cfg)
    assert bundle.cells
    assert all(not c.key.watermarked for c in bundle.cells)
    sdir = cfg.out_root() / "corpus" / "synth"
    assert not (sdir / "llm_doc_wm.jsonl").exists()


# --- config round trips ----------------------------------------------------------------


def test_config_json_round_trip(tmp_path):
    cfg = small_config(str(tmp_path / "out"))
    clone = ExperimentConfig.from_json(cfg.to_json())
    assert clone.to_json() == cfg.to_json()
    assert clone.config_hash() == cfg.config_hash()


def test_output_root_env_override(tmp_path, monkeypatch):
    monkeypatch.setenv("WMPB_OUTPUT_ROOT", str(tmp_path / "root"))
    cfg = small_config("rel/dir")
    assert cfg.out_root() == tmp_path / "root" / "rel" / "dir"


# --- CLI ------------------------------------------------------------------------------


def test_cli_run_all_and_staged_commands(tmp_path, capsys):
    out = str(tmp_path / "cli-run")
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(small_config(out, rounds=1).to_json()))
    base = ["--config", str(config_path)]
    assert cli_main(["run-all", *base]) == 0
    # Staged commands over the same directory still work.
    assert cli_main(["generate", *base]) == 0
    assert cli_main(["paraphrase", *base]) == 0
    assert cli_main(["similarity", *base]) == 0
    assert cli_main(["detect", *base]) == 0
    assert cli_main(["evaluate", *base]) == 0
    assert cli_main(["report", *base]) == 0
    capsys.readouterr()


def test_cli_evaluate_before_build_is_config_error(tmp_path, capsys):
    out = str(tmp_path / "missing")
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(small_config(out).to_json()))
    code = cli_main(["evaluate", "--config", str(config_path)])
    assert code == 2
    err = capsys.readouterr().err
    assert json.loads(err.strip())["error"] == "config"


def test_cli_unknown_pairing(tmp_path, capsys):
    code = cli_main(["run-all", "--config", "default", "--pairing", "vii",
                     "--output", str(tmp_path / "x")])
    assert code == 2
    capsys.readouterr()


def test_cli_pairing_and_paraphraser_filters(tmp_path, capsys):
    out = str(tmp_path / "filtered")
    config_path = tmp_path / "config.json"
    config_path.write_text(json.dumps(small_config(out, rounds=1).to_json()))
    code = cli_main(["run-all", "--config", str(config_path), "--pairing", "i",
                     "--paraphraser", "diverse"])
    assert code == 0
    capsys.readouterr()
    cells = json.loads((Path(out) / "reports" / "cells.json").read_text())["cells"]
    assert all(c["key"]["pairing"] == "HDOC_VS_LLMDOC" for c in cells)


def test_cli_seed_determinism(tmp_path, capsys):
    config_path = tmp_path / "config.json"
    hashes = []
    for name in ("s1", "s2"):
        out = str(tmp_path / name)
        config_path.write_text(json.dumps(small_config(out, rounds=1).to_json()))
        assert cli_main(["run-all", "--config", str(config_path), "--seed", "42"]) == 0
        manifest = json.loads((Path(out) / "reports" / "manifest.json").read_text())
        hashes.append(manifest["content_hash"])
    capsys.readouterr()
    assert hashes[0] == hashes[1]


def test_cli_entry_point_subprocess(tmp_path):
    result = subprocess.run(
        [sys.executable, "-m", "wmpb.cli", "build-corpus", "--config", "default",
         "--output", str(tmp_path / "sp"), "--rounds", "0"],
        capture_output=True,
        text=True,
        timeout=300,
    )
    assert result.returncode == 0, result.stderr
