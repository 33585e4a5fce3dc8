"""Sentence-relevance classification.

Two strategies decide whether a sentence carries process content: a
rule baseline over the dependency tree (subjects must hang off an
imperative verb) and a tfidf + logistic-regression model trained on
labeled sentences.  Externally produced predictions can be loaded from
JSONL instead, keyed by sentence id.
"""

from __future__ import annotations

import hashlib
import json
import math
import re
from dataclasses import dataclass, field
from typing import IO, Iterable, Optional, Sequence, Union

import numpy as np

from .conllu import DepTree, is_verb
from .errors import EmptyCorpus, InputError, LengthMismatch, SingleClassCorpus

DEFAULT_SUBJECT_DEPRELS = frozenset({"sb", "sbp"})
IMPERATIVE_XPOS = "VVIMP"

_URL_RE = re.compile(r"(?:https?://|www\.)\S+", re.IGNORECASE)
_TERM_RE = re.compile(r"\$URL|\w+")

URL_TOKEN = "$URL"


# -- rule baseline ---------------------------------------------------------

def vvimp_relevant(
    tree: DepTree,
    subject_deprels: frozenset[str] = DEFAULT_SUBJECT_DEPRELS,
    imperative_xpos: str = IMPERATIVE_XPOS,
) -> bool:
    """Rule baseline: no subject may hang off a non-imperative verb.

    A sentence without any subject counts as relevant as long as it
    contains a verb at all; verbless sentences are never relevant.
    """
    subjects = [t for t in tree if t.deprel in subject_deprels]
    if not subjects:
        return any(is_verb(t) for t in tree)
    for subj in subjects:
        if subj.head == 0:
            return False
        if tree.token(subj.head).xpos != imperative_xpos:
            return False
    return True


# -- tfidf -----------------------------------------------------------------

def tokenize_terms(text: str) -> list[str]:
    """Lowercased word terms; URLs collapse to the sentinel ``$URL``."""
    replaced = _URL_RE.sub(" $URL ", text)
    return [m if m == URL_TOKEN else m.lower() for m in _TERM_RE.findall(replaced)]


@dataclass(frozen=True)
class LabeledSentence:
    id: str
    text: str
    label: bool


@dataclass
class TfidfModel:
    """Vocabulary plus smoothed idf weights fitted on a corpus."""

    vocabulary: dict[str, int]
    idf: np.ndarray
    doc_count: int

    def transform(self, text: str) -> np.ndarray:
        """L2-normalized tf.idf vector for one document."""
        vec = np.zeros(len(self.vocabulary))
        for term in tokenize_terms(text):
            col = self.vocabulary.get(term)
            if col is not None:
                vec[col] += 1.0
        vec *= self.idf
        norm = np.linalg.norm(vec)
        if norm > 0:
            vec /= norm
        return vec

    def matrix(self, texts: Sequence[str]) -> np.ndarray:
        return np.vstack([self.transform(t) for t in texts])


def fit_tfidf(corpus: Sequence[LabeledSentence]) -> TfidfModel:
    """Fit vocabulary and smoothed idf: ln((1 + N) / (1 + df)) + 1."""
    if not corpus:
        raise EmptyCorpus("cannot fit tfidf on an empty corpus")
    df: dict[str, int] = {}
    for sent in corpus:
        for term in set(tokenize_terms(sent.text)):
            df[term] = df.get(term, 0) + 1
    vocabulary = {term: i for i, term in enumerate(sorted(df))}
    n = len(corpus)
    idf = np.array(
        [math.log((1 + n) / (1 + df[term])) + 1.0 for term in sorted(df)]
    )
    return TfidfModel(vocabulary=vocabulary, idf=idf, doc_count=n)


# -- logistic regression ---------------------------------------------------

@dataclass(frozen=True)
class Hyper:
    learning_rate: float = 1.0
    l2: float = 1e-4
    epochs: int = 300
    seed: int = 0


@dataclass
class LogRegModel:
    weights: np.ndarray
    bias: float
    threshold: float = 0.5
    hyper: Hyper = field(default_factory=Hyper)


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-z))


def logistic_loss(
    x: np.ndarray, y: np.ndarray, w: np.ndarray, b: float, l2: float
) -> float:
    """Mean cross-entropy plus L2 penalty on the weights (not the bias)."""
    p = _sigmoid(x @ w + b)
    eps = 1e-12
    ce = -np.mean(y * np.log(p + eps) + (1 - y) * np.log(1 - p + eps))
    return float(ce + 0.5 * l2 * np.dot(w, w))


def train_logreg(
    corpus: Sequence[LabeledSentence],
    tfidf: TfidfModel,
    hyper: Optional[Hyper] = None,
    threshold: float = 0.5,
) -> LogRegModel:
    """Full-batch gradient descent from zero initialization.

    Deterministic for a given corpus order and hyperparameter set.
    """
    hyper = hyper or Hyper()
    labels = {s.label for s in corpus}
    if labels != {True, False}:
        raise SingleClassCorpus("training corpus must contain both classes")
    x = tfidf.matrix([s.text for s in corpus])
    y = np.array([1.0 if s.label else 0.0 for s in corpus])
    n = len(corpus)
    w = np.zeros(x.shape[1])
    b = 0.0
    for _ in range(hyper.epochs):
        err = _sigmoid(x @ w + b) - y
        grad_w = x.T @ err / n + hyper.l2 * w
        grad_b = float(np.mean(err))
        w -= hyper.learning_rate * grad_w
        b -= hyper.learning_rate * grad_b
    return LogRegModel(weights=w, bias=b, threshold=threshold, hyper=hyper)


@dataclass(frozen=True)
class Prediction:
    probability: float
    relevant: bool


def predict_relevance(
    model: LogRegModel, tfidf: TfidfModel, text: str
) -> Prediction:
    vec = tfidf.transform(text)
    prob = float(_sigmoid(np.array([vec @ model.weights + model.bias]))[0])
    return Prediction(probability=prob, relevant=prob >= model.threshold)


# -- evaluation ------------------------------------------------------------

@dataclass(frozen=True)
class Scores:
    precision: float
    recall: float
    f1: float


def evaluate_f1(
    predictions: Sequence[bool], gold: Sequence[bool]
) -> Scores:
    """Binary precision/recall/F1 with the relevant class as positive."""
    if len(predictions) != len(gold):
        raise LengthMismatch(
            f"{len(predictions)} predictions vs {len(gold)} gold labels"
        )
    tp = sum(1 for p, g in zip(predictions, gold) if p and g)
    fp = sum(1 for p, g in zip(predictions, gold) if p and not g)
    fn = sum(1 for p, g in zip(predictions, gold) if not p and g)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall
        else 0.0
    )
    return Scores(precision=precision, recall=recall, f1=f1)


# -- splitting -------------------------------------------------------------

def split_bucket(sentence_id: str) -> str:
    """Stable 60/20/20 assignment into train/dev/test by id hash."""
    digest = hashlib.md5(sentence_id.encode("utf-8")).hexdigest()
    slot = int(digest, 16) % 10
    if slot < 6:
        return "train"
    if slot < 8:
        return "dev"
    return "test"


def split_corpus(
    corpus: Sequence[LabeledSentence],
) -> dict[str, list[LabeledSentence]]:
    out: dict[str, list[LabeledSentence]] = {"train": [], "dev": [], "test": []}
    for sent in corpus:
        out[split_bucket(sent.id)].append(sent)
    return out


# -- persistence and JSONL -------------------------------------------------

def save_model(tfidf: TfidfModel, model: LogRegModel, path: str) -> None:
    """Write both fitted models as one canonical JSON document."""
    doc = {
        "vocabulary": tfidf.vocabulary,
        "idf": [float(v) for v in tfidf.idf],
        "doc_count": tfidf.doc_count,
        "weights": [float(v) for v in model.weights],
        "bias": float(model.bias),
        "threshold": float(model.threshold),
        "hyper": {
            "learning_rate": model.hyper.learning_rate,
            "l2": model.hyper.l2,
            "epochs": model.hyper.epochs,
            "seed": model.hyper.seed,
        },
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, sort_keys=True, ensure_ascii=False, indent=2)
        fh.write("\n")


def load_model(path: str) -> tuple[TfidfModel, LogRegModel]:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    try:
        tfidf = TfidfModel(
            vocabulary={k: int(v) for k, v in doc["vocabulary"].items()},
            idf=np.array(doc["idf"], dtype=float),
            doc_count=int(doc["doc_count"]),
        )
        model = LogRegModel(
            weights=np.array(doc["weights"], dtype=float),
            bias=float(doc["bias"]),
            threshold=float(doc["threshold"]),
            hyper=Hyper(**doc["hyper"]),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a classifier model file ({exc})") from exc
    if len(model.weights) != len(tfidf.vocabulary):
        raise InputError(f"{path}: weight vector does not match vocabulary")
    return tfidf, model


def load_labeled_jsonl(
    source: Union[str, IO[str], Iterable[str]],
) -> list[LabeledSentence]:
    """Read ``{"id", "text", "label"}`` lines; errors name the line."""
    if isinstance(source, str):
        source = source.splitlines()
    sentences = []
    for lineno, raw in enumerate(source, start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        try:
            obj = json.loads(stripped)
        except json.JSONDecodeError as exc:
            raise InputError(f"line {lineno}: invalid JSON ({exc})") from exc
        try:
            ident, text, label = obj["id"], obj["text"], obj["label"]
        except (KeyError, TypeError) as exc:
            raise InputError(f"line {lineno}: missing field {exc}") from exc
        if not isinstance(text, str) or not text:
            raise InputError(f"line {lineno}: text must be a non-empty string")
        if label not in (0, 1, True, False):
            raise InputError(f"line {lineno}: label must be 0 or 1")
        sentences.append(LabeledSentence(id=str(ident), text=text, label=bool(label)))
    return sentences


def load_predictions_jsonl(
    source: Union[str, IO[str], Iterable[str]],
) -> dict[str, bool]:
    """Read ``{"id", "relevant"}`` lines from an external classifier."""
    if isinstance(source, str):
        source = source.splitlines()
    preds: dict[str, bool] = {}
    for lineno, raw in enumerate(source, start=1):
        stripped = raw.strip()
        if not stripped:
            continue
        try:
            obj = json.loads(stripped)
            ident, relevant = obj["id"], obj["relevant"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise InputError(f"line {lineno}: bad prediction record ({exc})") from exc
        if relevant not in (0, 1, True, False):
            raise InputError(f"line {lineno}: relevant must be 0 or 1")
        preds[str(ident)] = bool(relevant)
    return preds
