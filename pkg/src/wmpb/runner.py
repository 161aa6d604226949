"""End-to-end orchestration: corpus build, detection, evaluation, reports.

The run is a chain of stages, each a pure function of (config, earlier
stage files).  Every random decision is seeded by
``hash_fields(global_seed, doc_id, stage)``, so stages can be re-run or
parallelized without changing a byte of output.

Stage layout under the output directory:

    corpus/<source>/      h_doc.jsonl h_pp.jsonl model.json llm_doc_*.jsonl
                          llm_pp_<variant>_<paraphraser>.jsonl manifest.json
    detections/           <source>__<detector>.jsonl
    reports/              metrics.csv roc/*.csv similarity.csv lengths.csv
                          manifest.json cells.json
"""

from __future__ import annotations

import contextlib
import csv
import hashlib
import json
import os
import time
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from . import synth
from .corpus import (
    Document,
    FilterPolicy,
    Kind,
    Origin,
    Source,
    filter_pairs,
    load_pairs,
    read_documents,
    sample_documents,
    token_length_stats,
    write_documents,
)
from .detect import (
    WATERMARK_Z_THRESHOLD,
    DetectorKind,
    DetectorSpec,
    calibrate_threshold,
    encode_for_scoring,
    run_detector,
)
from .errors import ConfigError, SingleClassError, WorkbenchError
from .hashing import hash_fields
from .lm import GenerationRequest, MarkovLM, extract_prompt
from .metrics import DetectionRecord, MetricSummary, roc_curve, summarize
from .paraphrase import (
    ConservativeConfig,
    DiverseConfig,
    ParaphraseLineage,
    ParaphraserKind,
    ParaphraserSpec,
    condense,
    recursive_paraphrase,
)
from .simeval import TfidfEmbedder, round_similarity_report
from .tokenizer import detokenize
from .watermark import WatermarkLogitBias, WatermarkParams
from .watermark import score_text as score_wm_text

OUTPUT_ROOT_ENV = "WMPB_OUTPUT_ROOT"


class Pairing(str, Enum):
    """The five human/LLM comparisons, in the order the study reports them."""

    HDOC_VS_LLMDOC = "HDOC_VS_LLMDOC"  # i
    HPP_VS_LLMDOC = "HPP_VS_LLMDOC"  # ii
    HDOC_VS_LLMPP = "HDOC_VS_LLMPP"  # iii
    HPP_VS_LLMPP = "HPP_VS_LLMPP"  # iv
    FULL_VS_FULL = "FULL_VS_FULL"  # v


PAIRING_NUMERALS = {
    "i": Pairing.HDOC_VS_LLMDOC,
    "ii": Pairing.HPP_VS_LLMDOC,
    "iii": Pairing.HDOC_VS_LLMPP,
    "iv": Pairing.HPP_VS_LLMPP,
    "v": Pairing.FULL_VS_FULL,
}


@dataclass
class SourceSpec:
    name: str
    long_form: bool = False
    path: str | None = None
    format: str = "JSONL"
    n_pairs: int = 320

    @property
    def source_enum(self) -> Source:
        try:
            return Source(self.name.upper())
        except ValueError:
            return Source.SYNTH


@dataclass
class LmSettings:
    order: int = 2
    smoothing: float = 1e-4
    temperature: float = 1.0


@dataclass
class ExperimentConfig:
    sources: list[SourceSpec] = field(default_factory=lambda: [SourceSpec("synth")])
    lm: LmSettings = field(default_factory=LmSettings)
    watermark: WatermarkParams | None = field(default_factory=WatermarkParams)
    filter_policy: FilterPolicy = field(default_factory=FilterPolicy)
    paraphrasers: list[dict] = field(default_factory=lambda: [
        {"name": "diverse", "kind": "DIVERSE", "p_sub": 0.3, "p_del": 0.05, "reorder": True},
        {"name": "conservative", "kind": "CONSERVATIVE"},
    ])
    rounds: int = 5
    detectors: list[dict] = field(default_factory=lambda: [
        {"name": "watermark", "kind": "WATERMARK"},
        {"name": "likelihood", "kind": "LIKELIHOOD"},
    ])
    pairings: list[Pairing] = field(default_factory=lambda: list(Pairing))
    global_seed: int = 42
    output_dir: str = "runs/default"

    def __post_init__(self):
        if self.rounds < 0:
            raise ConfigError("rounds must be >= 0")
        if not self.detectors:
            raise ConfigError("at least one detector is required")

    def to_json(self) -> dict:
        return {
            "sources": [vars(s) for s in self.sources],
            "lm": vars(self.lm),
            "watermark": vars(self.watermark) if self.watermark else None,
            "filter": vars(self.filter_policy),
            "paraphrasers": self.paraphrasers,
            "rounds": self.rounds,
            "detectors": self.detectors,
            "pairings": [p.value for p in self.pairings],
            "global_seed": self.global_seed,
            "output_dir": self.output_dir,
        }

    def config_hash(self) -> str:
        """Hash of the experiment parameters; where outputs land is excluded."""
        payload = self.to_json()
        payload.pop("output_dir")
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()

    @classmethod
    def from_json(cls, obj: dict) -> "ExperimentConfig":
        cfg = cls()
        if "sources" in obj:
            cfg.sources = [SourceSpec(**s) for s in obj["sources"]]
        if "lm" in obj:
            cfg.lm = LmSettings(**obj["lm"])
        if "watermark" in obj:
            cfg.watermark = WatermarkParams(**obj["watermark"]) if obj["watermark"] else None
        if "filter" in obj:
            cfg.filter_policy = FilterPolicy(**obj["filter"])
        for key in ("paraphrasers", "rounds", "detectors", "global_seed", "output_dir"):
            if key in obj:
                setattr(cfg, key, obj[key])
        if "pairings" in obj:
            cfg.pairings = [Pairing(p) for p in obj["pairings"]]
        cfg.__post_init__()
        return cfg

    def out_root(self) -> Path:
        root = os.environ.get(OUTPUT_ROOT_ENV)
        if root:
            return Path(root) / self.output_dir
        return Path(self.output_dir)


def default_config() -> ExperimentConfig:
    return ExperimentConfig()


def _paraphraser_spec(entry: dict, stack: contextlib.ExitStack | None = None) -> ParaphraserSpec:
    kind = ParaphraserKind(entry["kind"])
    if kind is ParaphraserKind.DIVERSE:
        config = DiverseConfig(
            p_sub=entry.get("p_sub", 0.3),
            p_del=entry.get("p_del", 0.05),
            reorder=entry.get("reorder", True),
            lexicon=entry.get("lexicon") or synth.default_lexicon(),
        )
    elif kind is ParaphraserKind.CONSERVATIVE:
        rules = entry.get("rules")
        table = (
            [(list(lhs), list(rhs)) for lhs, rhs in rules]
            if rules is not None
            else synth.default_rewrite_rules()
        )
        config = ConservativeConfig(rewrite_table=table)
    else:
        from .bridge import BridgeClient, external_paraphraser

        client = BridgeClient(entry["command"])
        if stack is not None:
            stack.enter_context(client)
        config = external_paraphraser(client)
    return ParaphraserSpec(name=entry["name"], kind=kind, config=config)


class RunPaths:
    def __init__(self, config: ExperimentConfig):
        self.root = config.out_root()
        self.corpus = self.root / "corpus"
        self.detections = self.root / "detections"
        self.reports = self.root / "reports"

    def source_dir(self, name: str) -> Path:
        return self.corpus / name

    def detections_file(self, source: str, detector: str) -> Path:
        return self.detections / f"{source}__{detector}.jsonl"


def _pairs_for(config: ExperimentConfig, spec: SourceSpec):
    if spec.path:
        return load_pairs(spec.path, spec.format, source=spec.source_enum)
    seed = hash_fields(config.global_seed, spec.name, "pairs")
    return synth.generate_pairs(spec.n_pairs, seed=seed, long_form=spec.long_form)


def _require(path: Path, hint: str) -> Path:
    if not path.exists():
        raise ConfigError(f"missing {path}; run `{hint}` first")
    return path


# ---------------------------------------------------------------------------
# Corpus stages


def stage_human(config: ExperimentConfig, spec: SourceSpec) -> dict:
    """Filter the pair source and sample aligned H-DOC / H-PP sets."""
    sdir = RunPaths(config).source_dir(spec.name)
    sdir.mkdir(parents=True, exist_ok=True)
    pairs = _pairs_for(config, spec)
    kept = filter_pairs(pairs, config.filter_policy, long_form=spec.long_form)
    policy = FilterPolicy(
        min_tokens=config.filter_policy.min_tokens,
        min_tokens_long=config.filter_policy.min_tokens_long,
        max_tokens=config.filter_policy.max_tokens,
        sample_size=config.filter_policy.sample_size,
        seed=hash_fields(config.global_seed, spec.name, "sample"),
    )
    h_docs, h_pps = sample_documents(kept, policy)
    write_documents(sdir / "h_doc.jsonl", h_docs)
    write_documents(sdir / "h_pp.jsonl", h_pps)
    # Train on the pairs that were NOT sampled, so the sampled human
    # documents are held out of the model that generates and scores.
    sampled_ids = {d.id for d in h_docs}
    train_pairs = [p for p in kept if p.doc.id not in sampled_ids] or kept
    model = MarkovLM(order=config.lm.order, smoothing=config.lm.smoothing)
    model.fit(
        [p.doc for p in train_pairs] + [p.pp for p in train_pairs],
        vocab_docs=[p.doc for p in kept] + [p.pp for p in kept],
    )
    model.save(sdir / "model.json")
    return {
        "pairs": len(pairs),
        "filtered": len(kept),
        "sampled": len(h_docs),
        "train_pairs": len(train_pairs),
    }


def stage_generate(config: ExperimentConfig, spec: SourceSpec) -> dict:
    """Generate watermarked and non-watermarked machine documents."""
    sdir = RunPaths(config).source_dir(spec.name)
    h_docs = read_documents(_require(sdir / "h_doc.jsonl", "build-corpus"))
    h_pps = read_documents(sdir / "h_pp.jsonl")
    model = MarkovLM.load(sdir / "model.json")
    max_len = max(d.token_count for d in h_docs)
    min_len = config.filter_policy.min_tokens_long if spec.long_form else config.filter_policy.min_tokens
    variants: list[tuple[str, WatermarkParams | None]] = [("nw", None)]
    if config.watermark is not None:
        variants.append(("wm", config.watermark))
    counts = {}
    for tag, wm in variants:
        transform = WatermarkLogitBias(wm, len(model.vocab)) if wm else None
        docs = []
        for k, h_doc in enumerate(h_docs):
            doc_id = f"{spec.name}:llm:{tag}:{k:03d}"
            request = GenerationRequest(
                prompt=extract_prompt(h_doc, long_form=spec.long_form),
                max_len=max_len,
                temperature=config.lm.temperature,
                seed=hash_fields(config.global_seed, doc_id, "generate"),
                logit_transform=transform,
                min_len=min_len,
            )
            tokens = model.generate(request)
            docs.append(Document.make(doc_id, spec.source_enum, Origin.LLM, Kind.DOC, 0, detokenize(tokens)))
        write_documents(sdir / f"llm_doc_{tag}.jsonl", docs)
        counts[tag] = len(docs)
        if spec.long_form:
            # Long-form machine documents are condensed before paraphrasing,
            # capped at the longest human paraphrase.
            cap = max(d.token_count for d in h_pps)
            bases = [
                Document.make(f"{d.id}:cond", d.source, d.origin, Kind.DOC, 0, condense(d.text, cap))
                for d in docs
            ]
            write_documents(sdir / f"llm_base_{tag}.jsonl", bases)
    return counts


def _paraphrase_bases(sdir: Path, spec: SourceSpec, tag: str) -> list[Document]:
    base_file = sdir / f"llm_base_{tag}.jsonl"
    if spec.long_form and base_file.exists():
        return read_documents(base_file)
    return read_documents(_require(sdir / f"llm_doc_{tag}.jsonl", "generate"))


def _variant_tags(config: ExperimentConfig) -> list[str]:
    return ["nw"] + (["wm"] if config.watermark is not None else [])


def stage_paraphrase(config: ExperimentConfig, spec: SourceSpec) -> dict:
    """Run every paraphraser for `rounds` recursive rounds over both variants."""
    sdir = RunPaths(config).source_dir(spec.name)
    counts = {}
    with contextlib.ExitStack() as stack:
        for tag in _variant_tags(config):
            bases = _paraphrase_bases(sdir, spec, tag)
            for entry in config.paraphrasers:
                pspec = _paraphraser_spec(entry, stack)
                rows: list[Document] = []
                extra: dict[str, dict] = {}
                for base in bases:
                    seed = hash_fields(config.global_seed, base.id, "paraphrase", pspec.name)
                    lineage = recursive_paraphrase(base, pspec, config.rounds, seed)
                    for doc in lineage.rounds:
                        rows.append(doc)
                        extra[doc.id] = {"base_id": base.id, "paraphraser": pspec.name, "round": doc.round}
                if rows:
                    write_documents(sdir / f"llm_pp_{tag}_{pspec.name}.jsonl", rows, extra)
                counts[f"{tag}:{pspec.name}"] = len(rows)
    return counts


def load_lineages(config: ExperimentConfig, spec: SourceSpec, tag: str, paraphraser: str) -> list[ParaphraseLineage]:
    """Rebuild lineage objects from the corpus files."""
    sdir = RunPaths(config).source_dir(spec.name)
    bases = {d.id: d for d in _paraphrase_bases(sdir, spec, tag)}
    pp_file = sdir / f"llm_pp_{tag}_{paraphraser}.jsonl"
    rounds_by_base: dict[str, list[Document]] = {b: [] for b in bases}
    if config.rounds > 0:
        for doc in read_documents(_require(pp_file, "paraphrase")):
            base_id = doc.id.split(":pp", 1)[0]
            rounds_by_base[base_id].append(doc)
    return [
        ParaphraseLineage(base=bases[bid], rounds=sorted(docs, key=lambda d: d.round), paraphraser=paraphraser)
        for bid, docs in sorted(rounds_by_base.items())
    ]


def build_hlpc(config: ExperimentConfig) -> Path:
    """Build the full corpus directory; returns its path.

    A failing stage is recorded in the per-source manifest and does not
    stop other sources from building.
    """
    paths = RunPaths(config)
    for spec in config.sources:
        sdir = paths.source_dir(spec.name)
        sdir.mkdir(parents=True, exist_ok=True)
        manifest = {
            "source": spec.name,
            "long_form": spec.long_form,
            "config_hash": config.config_hash(),
            "global_seed": config.global_seed,
            "stages": {},
        }
        for stage_name, stage_fn in (
            ("human", stage_human),
            ("generate", stage_generate),
            ("paraphrase", stage_paraphrase),
        ):
            try:
                result = stage_fn(config, spec)
                manifest["stages"][stage_name] = {"status": "ok", "counts": result}
            except WorkbenchError as exc:
                manifest["stages"][stage_name] = {"status": "failed", "error": str(exc)}
                break
        if config.rounds == 0:
            manifest["stages"].setdefault("paraphrase", {})["note"] = "rounds=0: lineages are empty"
        with open(sdir / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, sort_keys=True, indent=2)
    return paths.corpus


# ---------------------------------------------------------------------------
# Detection and evaluation


def _detector_variant(kind: DetectorKind) -> str:
    """Watermark detectors score the watermarked corpus; all others the plain one."""
    return "wm" if kind is DetectorKind.WATERMARK else "nw"


def _detector_spec(
    config: ExperimentConfig, entry: dict, spec: SourceSpec, stack: contextlib.ExitStack | None = None
) -> DetectorSpec:
    kind = DetectorKind(entry["kind"])
    sdir = RunPaths(config).source_dir(spec.name)
    if kind is DetectorKind.WATERMARK:
        if config.watermark is None:
            raise ConfigError("watermark detector configured but watermarking is off")
        model = MarkovLM.load(_require(sdir / "model.json", "build-corpus"))
        return DetectorSpec(entry["name"], kind, (config.watermark, model.vocab))
    if kind is DetectorKind.LIKELIHOOD:
        model = MarkovLM.load(_require(sdir / "model.json", "build-corpus"))
        return DetectorSpec(entry["name"], kind, model)
    from .bridge import BridgeClient, external_scorer

    client = BridgeClient(entry["command"])
    if stack is not None:
        stack.enter_context(client)
    return DetectorSpec(entry["name"], kind, external_scorer(client))


def _scorable_documents(config: ExperimentConfig, spec: SourceSpec, tag: str) -> list[Document]:
    """Everything one detector variant must score for this source."""
    sdir = RunPaths(config).source_dir(spec.name)
    docs = []
    docs += read_documents(_require(sdir / "h_doc.jsonl", "build-corpus"))
    docs += read_documents(sdir / "h_pp.jsonl")
    docs += read_documents(_require(sdir / f"llm_doc_{tag}.jsonl", "generate"))
    base_file = sdir / f"llm_base_{tag}.jsonl"
    if base_file.exists():
        docs += read_documents(base_file)
    for entry in config.paraphrasers:
        pp_file = sdir / f"llm_pp_{tag}_{entry['name']}.jsonl"
        if config.rounds > 0:
            docs += read_documents(_require(pp_file, "paraphrase"))
    return docs


def stage_detect(config: ExperimentConfig, spec: SourceSpec) -> dict:
    paths = RunPaths(config)
    paths.detections.mkdir(parents=True, exist_ok=True)
    counts = {}
    with contextlib.ExitStack() as stack:
        for entry in config.detectors:
            kind = DetectorKind(entry["kind"])
            if kind is DetectorKind.WATERMARK and config.watermark is None:
                continue
            detector = _detector_spec(config, entry, spec, stack)
            docs = _scorable_documents(config, spec, _detector_variant(kind))
            records = run_detector(detector, docs)
            doc_by_id = {d.id: d for d in docs}
            out = paths.detections_file(spec.name, entry["name"])
            with open(out, "w", encoding="utf-8") as fh:
                for r in records:
                    row = r.to_json()
                    if kind is DetectorKind.WATERMARK and r.error is None:
                        wm_params, vocab = detector.params
                        tokens = encode_for_scoring(doc_by_id[r.doc_id].text, vocab)
                        row.update(score_wm_text(tokens, wm_params, len(vocab)).to_json())
                    fh.write(json.dumps(row, sort_keys=True) + "\n")
            counts[entry["name"]] = len(records)
    return counts


def _load_scores(config: ExperimentConfig, spec: SourceSpec, detector: str) -> dict[str, DetectionRecord]:
    path = _require(RunPaths(config).detections_file(spec.name, detector), "detect")
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            obj = json.loads(line)
            out[obj["doc_id"]] = DetectionRecord(
                doc_id=obj["doc_id"],
                score=obj["score"],
                truth=Origin(obj["truth"]),
                detector=obj["detector"],
                error=obj.get("error"),
            )
    return out


@dataclass
class CellKey:
    source: str
    watermarked: bool
    paraphraser: str
    round: int
    pairing: Pairing
    detector: str

    def label(self) -> str:
        wm = "wm" if self.watermarked else "nw"
        return f"{self.source}_{wm}_{self.paraphraser}_r{self.round}_{self.pairing.value}_{self.detector}"


@dataclass
class CellResult:
    key: CellKey
    summary: MetricSummary | None
    threshold: float | None
    roc: list | None
    error: str | None = None


@dataclass
class ReportBundle:
    config: ExperimentConfig
    cells: list[CellResult]
    similarity: list[dict]
    lengths: list[dict]


def _pairing_docs(
    pairing: Pairing,
    h_doc: list[Document],
    h_pp: list[Document],
    llm_doc: list[Document],
    llm_pp: list[Document] | None,
) -> tuple[list[Document], list[Document]]:
    if pairing is Pairing.HDOC_VS_LLMDOC:
        return h_doc, llm_doc
    if pairing is Pairing.HPP_VS_LLMDOC:
        return h_pp, llm_doc
    if pairing is Pairing.HDOC_VS_LLMPP:
        return h_doc, llm_pp
    if pairing is Pairing.HPP_VS_LLMPP:
        return h_pp, llm_pp
    return h_doc + h_pp, llm_doc + llm_pp


def run_pairing(config: ExperimentConfig, round: int) -> dict[str, MetricSummary]:
    """Evaluate one round across configured sources/detectors/pairings."""
    if round > config.rounds:
        raise ConfigError(f"round {round} exceeds configured rounds={config.rounds}")
    out = {}
    for cell in _evaluate_cells(config, rounds=[round]):
        if cell.summary is not None:
            out[cell.key.label()] = cell.summary
    return out


def _evaluate_cells(config: ExperimentConfig, rounds: list[int] | None = None) -> list[CellResult]:
    cells: list[CellResult] = []
    eval_rounds = rounds if rounds is not None else list(range(config.rounds + 1))
    for spec in config.sources:
        sdir = RunPaths(config).source_dir(spec.name)
        h_doc = read_documents(_require(sdir / "h_doc.jsonl", "build-corpus"))
        h_pp = read_documents(sdir / "h_pp.jsonl")
        for entry in config.detectors:
            kind = DetectorKind(entry["kind"])
            if kind is DetectorKind.WATERMARK and config.watermark is None:
                continue
            tag = _detector_variant(kind)
            watermarked = tag == "wm"
            scores = _load_scores(config, spec, entry["name"])
            llm_doc = read_documents(_require(sdir / f"llm_doc_{tag}.jsonl", "generate"))
            lineages = {
                p["name"]: load_lineages(config, spec, tag, p["name"]) for p in config.paraphrasers
            }
            for pairing in config.pairings:
                doc_pairings: list[tuple[str, int, list[Document], list[Document]]] = []
                if pairing in (Pairing.HDOC_VS_LLMDOC, Pairing.HPP_VS_LLMDOC):
                    human, llm = _pairing_docs(pairing, h_doc, h_pp, llm_doc, None)
                    doc_pairings.append(("-", 0, human, llm))
                else:
                    for pname, lins in sorted(lineages.items()):
                        for r in eval_rounds:
                            pp_docs = [lin.at_round(r) for lin in lins]
                            human, llm = _pairing_docs(pairing, h_doc, h_pp, llm_doc, pp_docs)
                            doc_pairings.append((pname, r, human, llm))
                for pname, r, human, llm in doc_pairings:
                    key = CellKey(spec.name, watermarked, pname, r, pairing, entry["name"])
                    try:
                        cells.append(_evaluate_cell(config, key, kind, scores, human, llm))
                    except WorkbenchError as exc:
                        cells.append(CellResult(key, None, None, None, error=str(exc)))
    return cells


def _evaluate_cell(
    config: ExperimentConfig,
    key: CellKey,
    kind: DetectorKind,
    scores: dict[str, DetectionRecord],
    human: list[Document],
    llm: list[Document],
) -> CellResult:
    records = []
    for doc in human + llm:
        rec = scores.get(doc.id)
        if rec is None:
            raise ConfigError(f"no detection record for {doc.id} in cell {key.label()}")
        records.append(rec)
    if kind is DetectorKind.WATERMARK:
        threshold = WATERMARK_Z_THRESHOLD
        eval_records = records
    else:
        threshold, eval_records = calibrate_threshold(
            records, seed=hash_fields(config.global_seed, key.label(), "calibrate")
        )
    n_pos = sum(1 for r in eval_records if r.truth is Origin.LLM)
    n_neg = len(eval_records) - n_pos
    if n_pos != n_neg:
        raise SingleClassError(f"cell {key.label()} is unbalanced: {n_pos} LLM vs {n_neg} human")
    summary = summarize(eval_records, threshold)
    roc = [(p.threshold, p.tpr, p.fpr) for p in roc_curve(eval_records)]
    return CellResult(key, summary, threshold, roc)


def stage_similarity(config: ExperimentConfig, spec: SourceSpec) -> list[dict]:
    """Per-round cosine degradation rows for every (variant, paraphraser)."""
    sdir = RunPaths(config).source_dir(spec.name)
    h_doc = read_documents(_require(sdir / "h_doc.jsonl", "build-corpus"))
    h_pp = read_documents(sdir / "h_pp.jsonl")
    rows: list[dict] = []
    for tag in _variant_tags(config):
        bases = _paraphrase_bases(sdir, spec, tag)
        embedder = TfidfEmbedder().fit(h_doc + h_pp + bases)
        for entry in config.paraphrasers:
            lineages = load_lineages(config, spec, tag, entry["name"])
            if config.rounds == 0:
                continue
            for row in round_similarity_report(lineages, embedder):
                rows.append(
                    {
                        "paraphraser": entry["name"],
                        "watermarked": tag == "wm",
                        "source": spec.name,
                        "round": row.round,
                        "mean_cosine": row.mean,
                        "stddev": row.stddev,
                        "n": row.n,
                    }
                )
    return rows


def _length_rows(config: ExperimentConfig, spec: SourceSpec) -> list[dict]:
    sdir = RunPaths(config).source_dir(spec.name)
    rows = []
    for path in sorted(sdir.glob("*.jsonl")):
        docs = read_documents(path)
        if not docs:
            continue
        stats = token_length_stats(docs)
        rows.append(
            {
                "source": spec.name,
                "slice": path.stem,
                "mean": stats.mean,
                "min": stats.min,
                "max": stats.max,
                "count": stats.count,
            }
        )
    return rows


def evaluate(config: ExperimentConfig) -> ReportBundle:
    cells = _evaluate_cells(config)
    similarity = []
    lengths = []
    for spec in config.sources:
        similarity += stage_similarity(config, spec)
        lengths += _length_rows(config, spec)
    return ReportBundle(config=config, cells=cells, similarity=similarity, lengths=lengths)


def save_bundle(bundle: ReportBundle, path: str | Path) -> None:
    payload = {
        "config": bundle.config.to_json(),
        "similarity": bundle.similarity,
        "lengths": bundle.lengths,
        "cells": [
            {
                "key": {
                    "source": c.key.source,
                    "watermarked": c.key.watermarked,
                    "paraphraser": c.key.paraphraser,
                    "round": c.key.round,
                    "pairing": c.key.pairing.value,
                    "detector": c.key.detector,
                },
                "summary": vars(c.summary) if c.summary else None,
                "threshold": c.threshold,
                "roc": c.roc,
                "error": c.error,
            }
            for c in bundle.cells
        ],
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True)


def load_bundle(path: str | Path) -> ReportBundle:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    cells = []
    for row in payload["cells"]:
        k = row["key"]
        key = CellKey(
            k["source"], k["watermarked"], k["paraphraser"], k["round"], Pairing(k["pairing"]), k["detector"]
        )
        summary = MetricSummary(**row["summary"]) if row["summary"] else None
        roc = [tuple(p) for p in row["roc"]] if row["roc"] else None
        cells.append(CellResult(key, summary, row["threshold"], roc, row["error"]))
    return ReportBundle(
        config=ExperimentConfig.from_json(payload["config"]),
        cells=cells,
        similarity=payload["similarity"],
        lengths=payload["lengths"],
    )


# ---------------------------------------------------------------------------
# Report emission


def _fmt(x: float | None) -> str:
    return "" if x is None else f"{x:.6f}"


def _pct(new: float, base: float) -> str:
    if base == 0:
        return ""
    return f"{(new - base) / base * 100.0:.2f}"


def emit_report(bundle: ReportBundle, out_dir: str | Path) -> dict:
    """Write metrics.csv, roc/*.csv, similarity.csv, lengths.csv, manifest.json."""
    out = Path(out_dir)
    (out / "roc").mkdir(parents=True, exist_ok=True)
    by_key = {
        (c.key.source, c.key.watermarked, c.key.paraphraser, c.key.round, c.key.pairing, c.key.detector): c
        for c in bundle.cells
    }

    def sibling(cell: CellResult, pairing: Pairing) -> MetricSummary | None:
        k = cell.key
        other = by_key.get((k.source, k.watermarked, k.paraphraser, k.round, pairing, k.detector))
        return other.summary if other and other.summary else None

    metrics_path = out / "metrics.csv"
    with open(metrics_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "source", "watermarked", "paraphraser", "round", "pairing", "detector",
                "auroc", "tpr_at_1pct_fpr", "accuracy", "n_pos", "n_neg", "threshold",
                "auroc_pct_vs_hdoc", "auroc_pct_vs_hpp",
                "tpr_pct_vs_hdoc", "tpr_pct_vs_hpp",
                "accuracy_pct_vs_hdoc", "accuracy_pct_vs_hpp",
                "error",
            ]
        )
        for cell in sorted(bundle.cells, key=lambda c: c.key.label()):
            k, s = cell.key, cell.summary
            pcts = [""] * 6
            if s is not None and k.pairing is Pairing.FULL_VS_FULL:
                # Percentage differences against the document-only and
                # paraphrase-only baselines, in that order.
                vs_doc = sibling(cell, Pairing.HDOC_VS_LLMPP)
                vs_pp = sibling(cell, Pairing.HPP_VS_LLMPP)
                if vs_doc:
                    pcts[0] = _pct(s.auroc, vs_doc.auroc)
                    pcts[2] = _pct(s.tpr_at_1pct_fpr, vs_doc.tpr_at_1pct_fpr)
                    pcts[4] = _pct(s.accuracy, vs_doc.accuracy)
                if vs_pp:
                    pcts[1] = _pct(s.auroc, vs_pp.auroc)
                    pcts[3] = _pct(s.tpr_at_1pct_fpr, vs_pp.tpr_at_1pct_fpr)
                    pcts[5] = _pct(s.accuracy, vs_pp.accuracy)
            writer.writerow(
                [
                    k.source, k.watermarked, k.paraphraser, k.round, k.pairing.value, k.detector,
                    _fmt(s.auroc if s else None), _fmt(s.tpr_at_1pct_fpr if s else None),
                    _fmt(s.accuracy if s else None),
                    s.n_pos if s else "", s.n_neg if s else "",
                    _fmt(cell.threshold), *pcts, cell.error or "",
                ]
            )
            if cell.roc:
                roc_path = out / "roc" / f"{k.label()}.csv"
                with open(roc_path, "w", newline="", encoding="utf-8") as rfh:
                    rw = csv.writer(rfh)
                    rw.writerow(["threshold", "tpr", "fpr"])
                    for t, tpr, fpr in cell.roc:
                        rw.writerow([repr(t), _fmt(tpr), _fmt(fpr)])

    with open(out / "similarity.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["paraphraser", "watermarked", "source", "round", "mean_cosine", "stddev", "n"])
        for row in bundle.similarity:
            writer.writerow(
                [
                    row["paraphraser"], row["watermarked"], row["source"], row["round"],
                    _fmt(row["mean_cosine"]), _fmt(row["stddev"]), row["n"],
                ]
            )

    with open(out / "lengths.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["source", "slice", "mean", "min", "max", "count"])
        for row in bundle.lengths:
            writer.writerow(
                [row["source"], row["slice"], _fmt(row["mean"]), row["min"], row["max"], row["count"]]
            )

    digest = hashlib.sha256()
    for path in sorted(out.rglob("*.csv")):
        digest.update(path.relative_to(out).as_posix().encode())
        digest.update(path.read_bytes())
    manifest = {
        "config_hash": bundle.config.config_hash(),
        "global_seed": bundle.config.global_seed,
        "content_hash": digest.hexdigest(),
        "generated_at": time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        "cells": [
            {"cell": c.key.label(), "status": "ok" if c.summary else "failed", "error": c.error}
            for c in sorted(bundle.cells, key=lambda c: c.key.label())
        ],
        "notes": [
            "accuracy thresholds for non-watermark detectors are calibrated on a "
            "seeded 10% split and evaluated on the remaining records",
        ],
    }
    with open(out / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
    return manifest


def run_all(config: ExperimentConfig) -> dict:
    """The whole pipeline: corpus, detection, evaluation, report files."""
    build_hlpc(config)
    for spec in config.sources:
        stage_detect(config, spec)
    bundle = evaluate(config)
    reports = RunPaths(config).reports
    reports.mkdir(parents=True, exist_ok=True)
    save_bundle(bundle, reports / "cells.json")
    return emit_report(bundle, reports)
