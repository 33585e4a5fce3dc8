"""Command-line interface.

Commands: ``train`` a relevance model, ``classify`` sentences,
``extract`` a net from one document, ``compare`` generated against gold
nets, ``pipeline`` for whole corpora.  Exit codes: 0 success, 1 input
error, 2 validation failure.
"""

from __future__ import annotations

import dataclasses
import json
import pathlib
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import click

from . import classify, conllu, petri, pipeline, similarity
from .config import PipelineConfig, load_config
from .errors import InputError, TextflowError, ValidationError


def _read_conllu_file(path: str) -> list[conllu.DepTree]:
    try:
        with open(path, encoding="utf-8") as fh:
            return conllu.parse_conllu(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def _load_pipeline_config(
    config_path: Optional[str],
    classifier: Optional[str],
    model: Optional[str],
    predictions: Optional[str],
    vvimp: Optional[str],
    jobs: Optional[int],
    seed: Optional[int],
) -> PipelineConfig:
    cfg = load_config(config_path) if config_path else PipelineConfig()
    if classifier:
        cfg.classifier = classifier
    if model:
        cfg.model_path = model
    if predictions:
        cfg.predictions_path = predictions
    if vvimp:
        cfg.extraction = dataclasses.replace(
            cfg.extraction, use_vvimp_heuristic=(vvimp == "on")
        )
    if jobs:
        cfg.jobs = jobs
    if seed is not None:
        cfg.seed = seed
    return cfg.check()


def _load_models(cfg: PipelineConfig):
    tfidf = logreg = predictions = None
    if cfg.classifier == "logreg":
        tfidf, logreg = classify.load_model(cfg.model_path)
    elif cfg.classifier == "external":
        try:
            with open(cfg.predictions_path, encoding="utf-8") as fh:
                predictions = classify.load_predictions_jsonl(fh)
        except OSError as exc:
            raise InputError(f"cannot read predictions: {exc}") from exc
    return tfidf, logreg, predictions


def _write(path: pathlib.Path, content: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(content, encoding="utf-8")


def _json_dump(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, indent=2, sort_keys=True) + "\n"


@click.group()
def cli() -> None:
    """Extract workflow nets from dependency-parsed guideline text."""


# -- train --------------------------------------------------------------------

@cli.command()
@click.argument("sentences", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--learning-rate", default=1.0, show_default=True)
@click.option("--l2", default=1e-4, show_default=True)
@click.option("--epochs", default=300, show_default=True)
@click.option("--seed", default=0, show_default=True)
@click.option("--threshold", default=0.5, show_default=True)
def train(sentences, out, learning_rate, l2, epochs, seed, threshold) -> None:
    """Fit tfidf + logistic regression on labeled sentences (JSONL)."""
    with open(sentences, encoding="utf-8") as fh:
        corpus = classify.load_labeled_jsonl(fh)
    parts = classify.split_corpus(corpus)
    if not parts["train"]:
        raise InputError("the train split is empty")
    hyper = classify.Hyper(
        learning_rate=learning_rate, l2=l2, epochs=epochs, seed=seed
    )
    tfidf = classify.fit_tfidf(parts["train"])
    model = classify.train_logreg(parts["train"], tfidf, hyper, threshold)
    classify.save_model(tfidf, model, out)
    for split in ("dev", "test"):
        subset = parts[split]
        if not subset:
            click.echo(f"{split}: empty split")
            continue
        preds = [
            classify.predict_relevance(model, tfidf, s.text).relevant
            for s in subset
        ]
        scores = classify.evaluate_f1(preds, [s.label for s in subset])
        click.echo(
            f"{split}: n={len(subset)} precision={scores.precision:.3f} "
            f"recall={scores.recall:.3f} f1={scores.f1:.3f}"
        )
    click.echo(f"model written to {out}")


# -- classify -------------------------------------------------------------------

@cli.command(name="classify")
@click.argument("document", type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--classifier",
    type=click.Choice(["rule", "logreg", "external"]),
    default="rule",
    show_default=True,
)
@click.option("--model", type=click.Path(exists=True, dir_okay=False))
@click.option("--predictions", type=click.Path(exists=True, dir_okay=False))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False))
def classify_cmd(document, classifier, model, predictions, config_path, out) -> None:
    """Emit per-sentence relevance decisions as JSONL."""
    cfg = _load_pipeline_config(
        config_path, classifier, model, predictions, None, None, None
    )
    tfidf, logreg, preds = _load_models(cfg)
    trees = _read_conllu_file(document)
    lines = []
    for tree in trees:
        record: dict = {"id": pipeline.sentence_key(tree)}
        if cfg.classifier == "logreg":
            result = classify.predict_relevance(logreg, tfidf, tree.text)
            record["relevant"] = int(result.relevant)
            record["probability"] = round(result.probability, 6)
        else:
            record["relevant"] = int(
                pipeline.relevance(tree, cfg, tfidf, logreg, preds)
            )
        lines.append(json.dumps(record, ensure_ascii=False))
    text = "\n".join(lines) + "\n"
    if out:
        _write(pathlib.Path(out), text)
    else:
        click.echo(text, nl=False)


# -- extract --------------------------------------------------------------------

def _process_one(
    path: pathlib.Path,
    out_dir: pathlib.Path,
    cfg: PipelineConfig,
    tfidf,
    logreg,
    preds,
) -> pathlib.Path:
    trees = _read_conllu_file(str(path))
    report = pipeline.analyze_document(
        trees, cfg, name=path.stem, tfidf=tfidf, logreg=logreg, predictions=preds
    )
    net = pipeline.build_net(report)
    stem = out_dir / path.stem
    if "json" in cfg.output_formats:
        _write(
            out_dir / f"{path.stem}.activities.json",
            _json_dump([a.to_json() for a in report.activities()]),
        )
        _write(out_dir / f"{path.stem}.document.json", _json_dump(report.to_json()))
    if "pnml" in cfg.output_formats:
        _write(out_dir / f"{path.stem}.pnml", petri.to_pnml(net))
    if "dot" in cfg.output_formats:
        _write(out_dir / f"{path.stem}.dot", petri.to_dot(net))
    return stem


@cli.command()
@click.argument("document", type=click.Path(exists=True, dir_okay=False))
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option(
    "--classifier", type=click.Choice(["rule", "logreg", "external"])
)
@click.option("--model", type=click.Path(exists=True, dir_okay=False))
@click.option("--predictions", type=click.Path(exists=True, dir_okay=False))
@click.option("--vvimp", type=click.Choice(["on", "off"]))
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
def extract(document, out_dir, classifier, model, predictions, vvimp, config_path):
    """Extract activities and a workflow net from one CoNLL-U document."""
    cfg = _load_pipeline_config(
        config_path, classifier, model, predictions, vvimp, None, None
    )
    tfidf, logreg, preds = _load_models(cfg)
    stem = _process_one(
        pathlib.Path(document), pathlib.Path(out_dir), cfg, tfidf, logreg, preds
    )
    click.echo(f"artifacts written to {stem}.*")


# -- compare --------------------------------------------------------------------

@cli.command()
@click.argument("generated_dir", type=click.Path(exists=True, file_okay=False))
@click.argument("gold_dir", type=click.Path(exists=True, file_okay=False))
@click.option("--out", type=click.Path(dir_okay=False))
@click.option("--state-budget", default=similarity.DEFAULT_STATE_BUDGET)
def compare(generated_dir, gold_dir, out, state_budget) -> None:
    """Score generated nets against gold nets matched by filename."""
    gen_dir, gold = pathlib.Path(generated_dir), pathlib.Path(gold_dir)
    gen_files = {p.name: p for p in sorted(gen_dir.glob("*.pnml"))}
    gold_files = {p.name: p for p in sorted(gold.glob("*.pnml"))}
    for name in sorted(set(gen_files) - set(gold_files)):
        click.echo(f"warning: no gold net for {name}", err=True)
    for name in sorted(set(gold_files) - set(gen_files)):
        click.echo(f"warning: no generated net for {name}", err=True)
    matched = sorted(set(gen_files) & set(gold_files))
    if not matched:
        raise InputError("no matching .pnml files between the directories")
    pairs = []
    for name in matched:
        pairs.append(
            (
                petri.parse_pnml(gen_files[name].read_text(encoding="utf-8")),
                petri.parse_pnml(gold_files[name].read_text(encoding="utf-8")),
            )
        )
    corpus = similarity.compare_corpus(pairs, state_budget)
    doc = {
        "mean": corpus.mean,
        "pairs": [
            {"left": name, "right": name, **report.to_json()}
            for name, report in zip(matched, corpus.reports)
        ],
    }
    text = _json_dump(doc)
    if out:
        _write(pathlib.Path(out), text)
    click.echo(f"mean CFP similarity over {len(matched)} pairs: {corpus.mean:.4f}")


# -- pipeline ---------------------------------------------------------------------

@cli.command(name="pipeline")
@click.argument("source", type=click.Path(exists=True))
@click.option("--out-dir", required=True, type=click.Path(file_okay=False))
@click.option(
    "--classifier", type=click.Choice(["rule", "logreg", "external"])
)
@click.option("--model", type=click.Path(exists=True, dir_okay=False))
@click.option("--predictions", type=click.Path(exists=True, dir_okay=False))
@click.option("--vvimp", type=click.Choice(["on", "off"]))
@click.option("--gold-dir", type=click.Path(exists=True, file_okay=False))
@click.option("--jobs", type=int)
@click.option("--seed", type=int)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False))
@click.pass_context
def pipeline_cmd(
    ctx, source, out_dir, classifier, model, predictions, vvimp, gold_dir,
    jobs, seed, config_path,
) -> None:
    """Run classify + extract + net generation over a corpus."""
    cfg = _load_pipeline_config(
        config_path, classifier, model, predictions, vvimp, jobs, seed
    )
    tfidf, logreg, preds = _load_models(cfg)
    src = pathlib.Path(source)
    files = [src] if src.is_file() else sorted(src.glob("*.conllu"))
    if not files:
        raise InputError(f"no .conllu files under {source}")
    out_path = pathlib.Path(out_dir)

    def run(path: pathlib.Path):
        try:
            _process_one(path, out_path, cfg, tfidf, logreg, preds)
            return path.stem, None
        except ValidationError as exc:
            return path.stem, f"skipped: {exc}"

    if cfg.jobs > 1:
        with ThreadPoolExecutor(max_workers=cfg.jobs) as pool:
            results = list(pool.map(run, files))
    else:
        results = [run(f) for f in files]
    produced = [stem for stem, problem in results if problem is None]
    for stem, problem in results:
        click.echo(f"{stem}: {'ok' if problem is None else problem}")
    if not produced:
        raise ValidationError("no document produced a workflow net")
    if gold_dir:
        ctx.invoke(
            compare,
            generated_dir=str(out_path),
            gold_dir=gold_dir,
            out=str(out_path / "report.json"),
            state_budget=cfg.state_budget,
        )


def main(argv: Optional[list[str]] = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except click.Abort:
        click.echo("aborted", err=True)
        return 1
    except ValidationError as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except TextflowError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    except OSError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
