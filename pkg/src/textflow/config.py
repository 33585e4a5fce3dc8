"""Pipeline configuration, loadable from a small TOML-style file.

The interpreter environment this targets has no TOML reader in its
standard library, so a minimal reader for the subset the config needs
is included: ``[section]`` tables, strings, booleans, integers, floats
and arrays of strings, with ``#`` comments.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from typing import Any, Optional

from .errors import InputError
from .extract import ExtractionConfig
from .order import OrderingConfig
from .similarity import DEFAULT_STATE_BUDGET

CLASSIFIER_KINDS = ("rule", "logreg", "external")


@dataclass
class PipelineConfig:
    classifier: str = "rule"
    model_path: Optional[str] = None
    predictions_path: Optional[str] = None
    extraction: ExtractionConfig = field(default_factory=ExtractionConfig)
    ordering: OrderingConfig = field(default_factory=OrderingConfig)
    output_formats: tuple[str, ...] = ("json", "pnml", "dot")
    jobs: int = 1
    seed: int = 0
    state_budget: int = DEFAULT_STATE_BUDGET

    def check(self) -> "PipelineConfig":
        if self.classifier not in CLASSIFIER_KINDS:
            raise InputError(
                f"classifier must be one of {CLASSIFIER_KINDS}, "
                f"got {self.classifier!r}"
            )
        if self.classifier == "external" and not self.predictions_path:
            raise InputError(
                "classifier 'external' needs a predictions file"
            )
        if self.classifier == "logreg" and not self.model_path:
            raise InputError("classifier 'logreg' needs a model file")
        if self.jobs < 1:
            raise InputError("jobs must be >= 1")
        return self


# -- TOML-subset reader ------------------------------------------------------

def _parse_scalar(text: str, lineno: int) -> Any:
    text = text.strip()
    if text.startswith('"'):
        if not text.endswith('"') or len(text) < 2:
            raise InputError(f"line {lineno}: unterminated string")
        return text[1:-1]
    if text in ("true", "false"):
        return text == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        pass
    raise InputError(f"line {lineno}: cannot interpret value {text!r}")


def _strip_comment(line: str) -> str:
    out = []
    in_string = False
    for ch in line:
        if ch == '"':
            in_string = not in_string
        if ch == "#" and not in_string:
            break
        out.append(ch)
    return "".join(out)


def parse_toml_subset(text: str) -> dict[str, Any]:
    """Parse flat tables of scalars and string arrays."""
    root: dict[str, Any] = {}
    table = root
    pending_key: Optional[str] = None
    pending_items: list[Any] = []
    pending_line = 0

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip_comment(raw).strip()
        if not line:
            continue
        if pending_key is not None:
            # inside a multi-line array
            closing = line.endswith("]")
            body = line[:-1] if closing else line
            for item in filter(None, (s.strip() for s in body.split(","))):
                pending_items.append(_parse_scalar(item, lineno))
            if closing:
                table[pending_key] = pending_items
                pending_key, pending_items = None, []
            continue
        if line.startswith("["):
            if not line.endswith("]"):
                raise InputError(f"line {lineno}: malformed table header")
            name = line[1:-1].strip()
            if not name:
                raise InputError(f"line {lineno}: empty table name")
            table = root
            for part in name.split("."):
                table = table.setdefault(part, {})
            continue
        if "=" not in line:
            raise InputError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if value.startswith("["):
            if value.endswith("]"):
                body = value[1:-1]
                table[key] = [
                    _parse_scalar(item, lineno)
                    for item in filter(None, (s.strip() for s in body.split(",")))
                ]
            else:
                pending_key, pending_line = key, lineno
                body = value[1:]
                pending_items = [
                    _parse_scalar(item, lineno)
                    for item in filter(None, (s.strip() for s in body.split(",")))
                ]
        else:
            table[key] = _parse_scalar(value, lineno)

    if pending_key is not None:
        raise InputError(f"line {pending_line}: unterminated array")
    return root


def _update_dataclass(instance, values: dict[str, Any], frozen_sets: set[str]):
    updates = {}
    for key, value in values.items():
        if not any(f.name == key for f in dataclasses.fields(instance)):
            raise InputError(f"unknown configuration key {key!r}")
        if key in frozen_sets:
            value = frozenset(value)
        updates[key] = value
    return dataclasses.replace(instance, **updates)


def config_from_dict(data: dict[str, Any]) -> PipelineConfig:
    cfg = PipelineConfig()
    data = dict(data)
    extract_data = data.pop("extract", {})
    order_data = data.pop("order", {})
    if "vvimp_heuristic" in data:
        extract_data.setdefault("use_vvimp_heuristic", data.pop("vvimp_heuristic"))
    extraction = _update_dataclass(
        cfg.extraction,
        extract_data,
        {
            "subject_deprels",
            "object_deprels",
            "modifier_deprels",
            "verb_chain_deprels",
            "particle_deprels",
            "negation_deprels",
            "exists_markers",
            "all_markers",
        },
    )
    ordering = _update_dataclass(
        cfg.ordering,
        order_data,
        {"before_adverbs", "and_adverbs", "and_conjunctions", "or_conjunctions"},
    )
    if "output_formats" in data:
        data["output_formats"] = tuple(data["output_formats"])
    cfg = _update_dataclass(cfg, data, set())
    return dataclasses.replace(cfg, extraction=extraction, ordering=ordering)


def load_config(path: str) -> PipelineConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read config {path}: {exc}") from exc
    try:
        return config_from_dict(parse_toml_subset(text))
    except InputError as exc:
        raise InputError(f"{path}: {exc}") from exc
