"""Log filtering, context/event windowing and skip-gram word embeddings."""

from __future__ import annotations

import enum
import json
import math
import re
from collections import Counter
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .model import Vector

DEFAULT_CONTEXT_LEN = 30.0
DEFAULT_EVENT_LEN = 10.0


class Severity(enum.IntEnum):
    TRACE = 0
    DEBUG = 1
    INFO = 2
    WARN = 3
    ERROR = 4
    FATAL = 5

    @classmethod
    def parse(cls, name: str) -> "Severity":
        name = name.upper()
        if name == "WARNING":
            return cls.WARN
        if name == "CRITICAL":
            return cls.FATAL
        return cls[name]


@dataclass(frozen=True)
class LogEntry:
    timestamp: float
    severity: Severity
    text: str

    def __post_init__(self):
        if not self.text.strip():
            raise ValueError("log entry text must be non-empty")


@dataclass(frozen=True)
class LogWindow:
    kind: str  # "context" or "event"
    start: float
    length: float
    entries: Tuple[LogEntry, ...] = ()

    @property
    def end(self) -> float:
        return self.start + self.length


# ---------------------------------------------------------------------------
# text cleaning
# ---------------------------------------------------------------------------

STOP_WORDS = frozenset(
    """
    a about above after again against all am an and any are as at be because been
    before being below between both but by can could did do does doing down during
    each few for from further had has have having he her here hers herself him
    himself his how i if in into is it its itself just me more most my myself no
    nor not now of off on once only or other our ours ourselves out over own same
    she should so some such than that the their theirs them themselves then there
    these they this those through to too under until up very was we were what when
    where which while who whom why will with would you your yours yourself
    yourselves
    """.split()
)

_UUID = re.compile(r"[0-9a-f]{8}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{4}-[0-9a-f]{12}")
_IPV4 = re.compile(r"\d{1,3}(?:\.\d{1,3}){3}(?::\d+)?")
_HEX = re.compile(r"0x[0-9a-f]+|[0-9a-f]{8,}")
_NUMBER = re.compile(r"[-+]?\d+(?:[.,]\d+)*(?:e[-+]?\d+)?")
_NON_WORD = re.compile(r"[^a-z0-9]+")


def _noise_token(tok: str) -> bool:
    return bool(
        _UUID.fullmatch(tok) or _IPV4.fullmatch(tok) or _HEX.fullmatch(tok) or _NUMBER.fullmatch(tok)
    )


def filter_text(raw: str) -> str:
    """Lowercase ``raw`` and drop ids, numbers, addresses, punctuation and stop words."""
    out = []
    for tok in raw.lower().split():
        tok = _UUID.sub(" ", tok)
        tok = _IPV4.sub(" ", tok)
        for part in _NON_WORD.split(tok):
            if not part or part in STOP_WORDS or _noise_token(part):
                continue
            out.append(part)
    return " ".join(out)


def tokenize(clean: str) -> List[str]:
    return clean.split()


def entry_tokens(entries: Iterable[LogEntry]) -> List[str]:
    tokens: List[str] = []
    for e in sorted(entries, key=lambda e: e.timestamp):
        tokens.extend(tokenize(filter_text(e.text)))
    return tokens


# ---------------------------------------------------------------------------
# parsing and windows
# ---------------------------------------------------------------------------

_LINE = re.compile(r"^(\S+)\s+(TRACE|DEBUG|INFO|WARN|WARNING|ERROR|FATAL|CRITICAL)\s+(.*\S.*)$", re.IGNORECASE)


def parse_timestamp(text: str) -> float:
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    dt = datetime.fromisoformat(text)
    if dt.tzinfo is None:
        dt = dt.replace(tzinfo=timezone.utc)
    return dt.timestamp()


def format_timestamp(ts: float) -> str:
    return datetime.fromtimestamp(ts, tz=timezone.utc).isoformat(timespec="milliseconds").replace("+00:00", "Z")


def parse_log_lines(lines: Iterable[str]) -> List[LogEntry]:
    """Parse ``<ISO8601> <SEVERITY> <text>`` lines.

    Lines that do not have this shape continue the previous entry (stack
    traces); such lines before the first entry are dropped.
    """
    entries: List[LogEntry] = []
    for line in lines:
        line = line.rstrip("\n")
        m = _LINE.match(line)
        ts = None
        if m:
            try:
                ts = parse_timestamp(m.group(1))
            except ValueError:
                ts = None
        if ts is not None:
            entries.append(LogEntry(ts, Severity.parse(m.group(2)), m.group(3).strip()))
        elif entries and line.strip():
            last = entries[-1]
            entries[-1] = LogEntry(last.timestamp, last.severity, last.text + "\n" + line.strip())
    return entries


def read_log_file(path: Union[str, Path]) -> List[LogEntry]:
    with open(path, encoding="utf-8") as fh:
        return parse_log_lines(fh)


def format_log_line(e: LogEntry) -> str:
    return f"{format_timestamp(e.timestamp)} {e.severity.name} {e.text}"


def extract_windows(
    entries: Sequence[LogEntry],
    context_len: float = DEFAULT_CONTEXT_LEN,
    event_len: float = DEFAULT_EVENT_LEN,
    threshold: Severity = Severity.WARN,
) -> List[Tuple[LogWindow, LogWindow]]:
    """Open a (context, event) window pair at every WARN+ entry.

    A trigger falling inside an already opened context window is suppressed.
    """
    if not (context_len >= event_len > 0):
        raise ValueError("window lengths must satisfy context_len >= event_len > 0")
    ordered = sorted(entries, key=lambda e: e.timestamp)
    pairs = []
    open_until = -math.inf
    for e in ordered:
        if e.severity < threshold or e.timestamp <= open_until:
            continue
        start = e.timestamp
        open_until = start + context_len
        pairs.append((_collect(ordered, "context", start, context_len), _collect(ordered, "event", start, event_len)))
    return pairs


def _collect(ordered: Sequence[LogEntry], kind: str, start: float, length: float) -> LogWindow:
    end = start + length
    return LogWindow(kind, start, length, tuple(e for e in ordered if start <= e.timestamp <= end))


# ---------------------------------------------------------------------------
# embeddings
# ---------------------------------------------------------------------------


@dataclass
class EmbeddingModel:
    dimension: int
    vocabulary: Dict[str, Tuple[float, ...]]
    metadata: Dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("embedding dimension must be >= 1")
        for tok, vec in self.vocabulary.items():
            if len(vec) != self.dimension:
                raise ValueError(f"vector for {tok!r} has length {len(vec)}, expected {self.dimension}")

    def __contains__(self, token: str) -> bool:
        return token in self.vocabulary

    def to_dict(self) -> Dict[str, object]:
        return {
            "dimension": self.dimension,
            "metadata": self.metadata,
            "vocabulary": {k: list(v) for k, v in sorted(self.vocabulary.items())},
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, object]) -> "EmbeddingModel":
        vocab = {str(k): tuple(float(x) for x in v) for k, v in dict(data["vocabulary"]).items()}
        return cls(int(data["dimension"]), vocab, dict(data.get("metadata", {})))

    def save(self, path: Union[str, Path]) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: Union[str, Path]) -> "EmbeddingModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def train_embedding(
    corpus: Sequence[Sequence[str]],
    dimension: int = 3,
    epochs: int = 5,
    context_radius: int = 2,
    negative_samples: int = 5,
    seed: int = 0,
    min_count: int = 2,
    learning_rate: float = 0.025,
    corpus_id: str = "",
) -> EmbeddingModel:
    """Skip-gram with negative sampling, trained by plain sequential SGD.

    Sentences are visited in corpus order every epoch, so a fixed seed gives
    bit-identical vectors.
    """
    if dimension < 1:
        raise ValueError("embedding dimension must be >= 1")
    if epochs < 1 or context_radius < 1 or negative_samples < 0:
        raise ValueError("epochs and context_radius must be >= 1, negative_samples >= 0")
    counts = Counter(tok for sent in corpus for tok in sent)
    words = sorted((w for w, c in counts.items() if c >= min_count), key=lambda w: (-counts[w], w))
    if not words:
        raise ValueError("corpus too small: no token reaches the minimum count")
    index = {w: i for i, w in enumerate(words)}
    sentences = [[index[t] for t in sent if t in index] for sent in corpus]
    sentences = [s for s in sentences if s]

    rng = np.random.default_rng(seed)
    n = len(words)
    w_in = (rng.random((n, dimension)) - 0.5) / dimension
    w_out = np.zeros((n, dimension))

    freq = np.array([counts[w] for w in words], dtype=float) ** 0.75
    cum = np.cumsum(freq / freq.sum())
    cum[-1] = 1.0

    total = max(1, epochs * sum(len(s) for s in sentences))
    step = 0
    labels = np.zeros(negative_samples + 1)
    labels[0] = 1.0
    for _ in range(epochs):
        for sent in sentences:
            for pos, center in enumerate(sent):
                lr = learning_rate * max(1e-4, 1.0 - step / total)
                step += 1
                lo, hi = max(0, pos - context_radius), min(len(sent), pos + context_radius + 1)
                for cpos in range(lo, hi):
                    if cpos == pos:
                        continue
                    ctx = sent[cpos]
                    negs = np.searchsorted(cum, rng.random(negative_samples), side="right")
                    targets = np.concatenate(([ctx], negs))
                    keep = np.ones(len(targets), dtype=bool)
                    keep[1:] = negs != ctx
                    tgt, lab = targets[keep], labels[keep]
                    h = w_in[center]
                    u = w_out[tgt]
                    f = 1.0 / (1.0 + np.exp(-(u @ h)))
                    g = (lab - f) * lr
                    grad_h = g @ u
                    np.add.at(w_out, tgt, np.outer(g, h))
                    w_in[center] = h + grad_h

    vocab = {w: tuple(float(x) for x in w_in[i]) for w, i in index.items()}
    meta = {
        "corpus_id": corpus_id,
        "seed": seed,
        "epochs": epochs,
        "negative_samples": negative_samples,
        "context_radius": context_radius,
        "min_count": min_count,
    }
    return EmbeddingModel(dimension, vocab, meta)


def vectorize_tokens(tokens: Iterable[str], m: EmbeddingModel) -> Vector:
    vecs = [m.vocabulary[t] for t in tokens if t in m.vocabulary]
    if not vecs:
        return Vector((0.0,) * m.dimension)
    # fsum is exactly rounded, so the mean does not depend on token order
    return Vector(tuple(math.fsum(col) / len(vecs) for col in zip(*vecs)))


def vectorize_window(w: LogWindow, m: EmbeddingModel) -> Vector:
    return vectorize_tokens(entry_tokens(w.entries), m)


def window_corpus(entries: Iterable[LogEntry]) -> List[List[str]]:
    """One token list per entry, in timestamp order (training sentences)."""
    out = []
    for e in sorted(entries, key=lambda e: e.timestamp):
        toks = tokenize(filter_text(e.text))
        if toks:
            out.append(toks)
    return out


def out_of_vocabulary_rate(tokens: Sequence[str], m: EmbeddingModel) -> float:
    if not tokens:
        return 0.0
    return sum(1 for t in tokens if t not in m.vocabulary) / len(tokens)
