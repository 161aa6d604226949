"""wmpb: a desk-scale workbench for detector-vs-paraphrase experiments.

Builds a four-way corpus of human documents, human paraphrases, and
watermarked / plain machine-generated documents with recursive machine
paraphrases, then measures how detection quality moves across the five
human/machine pairings and paraphrase rounds.
"""

__version__ = "0.1.0"

from .corpus import Document, FilterPolicy, Kind, LengthStats, Origin, ParaphrasePair, Source
from .lm import GenerationRequest, MarkovLM, train_markov
from .metrics import DetectionRecord, MetricSummary, accuracy, auroc, confusion, roc_curve, tpr_at_fpr
from .paraphrase import (
    ConservativeConfig,
    DiverseConfig,
    ParaphraseLineage,
    ParaphraserKind,
    ParaphraserSpec,
    condense,
    recursive_paraphrase,
    rewrite_conservative,
    rewrite_diverse,
)
from .runner import ExperimentConfig, Pairing, build_hlpc, run_all
from .simeval import TfidfEmbedder, cosine_similarity, fit_embedder, round_similarity_report
from .watermark import (
    GreenPartition,
    WatermarkParams,
    WatermarkScore,
    apply_bias,
    green_partition,
    is_watermarked,
    score_text,
)

__all__ = [
    "Document", "FilterPolicy", "Kind", "LengthStats", "Origin", "ParaphrasePair", "Source",
    "GenerationRequest", "MarkovLM", "train_markov",
    "DetectionRecord", "MetricSummary", "accuracy", "auroc", "confusion", "roc_curve", "tpr_at_fpr",
    "ConservativeConfig", "DiverseConfig", "ParaphraseLineage", "ParaphraserKind", "ParaphraserSpec",
    "condense", "recursive_paraphrase", "rewrite_conservative", "rewrite_diverse",
    "ExperimentConfig", "Pairing", "build_hlpc", "run_all",
    "TfidfEmbedder", "cosine_similarity", "fit_embedder", "round_similarity_report",
    "GreenPartition", "WatermarkParams", "WatermarkScore", "apply_bias", "green_partition",
    "is_watermarked", "score_text",
]
