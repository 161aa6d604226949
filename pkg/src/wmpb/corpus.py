"""Paraphrase-pair ingestion, filtering, sampling, and document I/O."""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from enum import Enum
from pathlib import Path

from .errors import EmptyInputError, InsufficientDataError, ParseError, SchemaError
from .hashing import SplitMix64
from .tokenizer import count_tokens


class Source(str, Enum):
    MRPC = "MRPC"
    XSUM = "XSUM"
    QQP = "QQP"
    MULTIPIT = "MULTIPIT"
    SYNTH = "SYNTH"


class Origin(str, Enum):
    HUMAN = "HUMAN"
    LLM = "LLM"


class Kind(str, Enum):
    DOC = "DOC"
    PP = "PP"


@dataclass(frozen=True)
class Document:
    """One labeled text unit; the atom every stage consumes and produces."""

    id: str
    source: Source
    origin: Origin
    kind: Kind
    round: int
    text: str
    token_count: int

    def __post_init__(self):
        if self.kind is Kind.DOC and self.round != 0:
            raise ValueError(f"document {self.id}: kind=DOC requires round=0")
        if self.round < 0:
            raise ValueError(f"document {self.id}: round must be >= 0")
        actual = count_tokens(self.text)
        if self.token_count != actual:
            raise ValueError(
                f"document {self.id}: token_count {self.token_count} != tokenizer count {actual}"
            )

    @classmethod
    def make(cls, id: str, source: Source, origin: Origin, kind: Kind, round: int, text: str) -> "Document":
        """Construct with token_count computed by the workbench tokenizer."""
        return cls(id, source, origin, kind, round, text, count_tokens(text))

    def to_json(self) -> dict:
        d = asdict(self)
        d["source"] = self.source.value
        d["origin"] = self.origin.value
        d["kind"] = self.kind.value
        return d


@dataclass(frozen=True)
class ParaphrasePair:
    doc: Document
    pp: Document
    label: int

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"pair label must be 0 or 1, got {self.label}")
        if self.doc.kind is not Kind.DOC or self.pp.kind is not Kind.PP:
            raise ValueError("pair must hold a DOC and a PP document")


@dataclass(frozen=True)
class FilterPolicy:
    """Length and sampling rules applied before any generation happens."""

    min_tokens: int = 10
    min_tokens_long: int = 30
    max_tokens: int = 512
    sample_size: int = 150
    seed: int = 0

    def __post_init__(self):
        if not (0 < self.min_tokens <= self.min_tokens_long < self.max_tokens):
            raise ValueError("need 0 < min_tokens <= min_tokens_long < max_tokens")
        if self.sample_size <= 0:
            raise ValueError("sample_size must be positive")


@dataclass(frozen=True)
class LengthStats:
    mean: float
    min: int
    max: int
    count: int


def _pair_from_record(rec_id: str, text_a: str, text_b: str, label, source: Source, where: str) -> ParaphrasePair:
    if not isinstance(label, int) or isinstance(label, bool) or label not in (0, 1):
        raise SchemaError(f"{where}: label must be 0 or 1, got {label!r}")
    doc = Document.make(f"{rec_id}:doc", source, Origin.HUMAN, Kind.DOC, 0, text_a)
    # Human paraphrases are first-round rewrites of their document.
    pp = Document.make(f"{rec_id}:pp", source, Origin.HUMAN, Kind.PP, 1, text_b)
    return ParaphrasePair(doc, pp, label)


def load_pairs(path: str | Path, format: str = "JSONL", source: Source = Source.SYNTH) -> list[ParaphrasePair]:
    """Load paraphrase pairs from a JSONL or TSV file.

    JSONL: one object per line with keys id, text_a, text_b, label.
    TSV: label, text_a, text_b columns, no header.
    Texts are preserved byte-exactly; token counts are recomputed here.
    """
    path = Path(path)
    fmt = format.upper()
    if fmt not in ("JSONL", "TSV"):
        raise ValueError(f"unknown pair format {format!r}")
    pairs: list[ParaphrasePair] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            where = f"{path.name}:{lineno}"
            if fmt == "JSONL":
                try:
                    obj = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"{where}: invalid JSON ({exc.msg})") from None
                missing = {"id", "text_a", "text_b", "label"} - set(obj)
                if missing:
                    raise SchemaError(f"{where}: missing fields {sorted(missing)}")
                pairs.append(
                    _pair_from_record(str(obj["id"]), obj["text_a"], obj["text_b"], obj["label"], source, where)
                )
            else:
                cols = line.split("\t")
                if len(cols) != 3:
                    raise ParseError(f"{where}: expected 3 tab-separated columns, got {len(cols)}")
                try:
                    label = int(cols[0])
                except ValueError:
                    raise SchemaError(f"{where}: label column is not an integer") from None
                pairs.append(
                    _pair_from_record(f"{path.stem}-{lineno:06d}", cols[1], cols[2], label, source, where)
                )
    return pairs


def filter_pairs(pairs: list[ParaphrasePair], policy: FilterPolicy, long_form: bool = False) -> list[ParaphrasePair]:
    """Keep paraphrase pairs (label=1) whose document length is in bounds.

    Length rules apply to the document side only: it is the prompt source.
    """
    lo = policy.min_tokens_long if long_form else policy.min_tokens
    return [
        p
        for p in pairs
        if p.label == 1 and lo <= p.doc.token_count <= policy.max_tokens
    ]


def sample_documents(pairs: list[ParaphrasePair], policy: FilterPolicy) -> tuple[list[Document], list[Document]]:
    """Sample ``sample_size`` aligned (doc, pp) rows, uniformly without replacement."""
    if len(pairs) < policy.sample_size:
        raise InsufficientDataError(
            f"need {policy.sample_size} pairs, have {len(pairs)} "
            f"(short by {policy.sample_size - len(pairs)})"
        )
    rng = SplitMix64(policy.seed)
    chosen = rng.sample_indices(len(pairs), policy.sample_size)
    h_docs = [pairs[i].doc for i in chosen]
    h_pps = [pairs[i].pp for i in chosen]
    return h_docs, h_pps


def token_length_stats(docs: list[Document]) -> LengthStats:
    if not docs:
        raise EmptyInputError("token_length_stats needs at least one document")
    lengths = [d.token_count for d in docs]
    return LengthStats(
        mean=sum(lengths) / len(lengths),
        min=min(lengths),
        max=max(lengths),
        count=len(lengths),
    )


def write_documents(path: str | Path, docs: list[Document], extra: dict[str, dict] | None = None) -> None:
    """Write documents as JSONL; ``extra`` maps doc id -> provenance fields."""
    with open(path, "w", encoding="utf-8") as fh:
        for doc in docs:
            row = doc.to_json()
            if extra and doc.id in extra:
                row.update(extra[doc.id])
            fh.write(json.dumps(row, sort_keys=True) + "\n")


def read_documents(path: str | Path) -> list[Document]:
    docs = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            obj = json.loads(line)
            docs.append(
                Document(
                    id=obj["id"],
                    source=Source(obj["source"]),
                    origin=Origin(obj["origin"]),
                    kind=Kind(obj["kind"]),
                    round=obj["round"],
                    text=obj["text"],
                    token_count=obj["token_count"],
                )
            )
    return docs
