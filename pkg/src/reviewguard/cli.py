"""Single entry point: every pipeline stage as a subcommand.

Stages communicate through files (JSONL records, JSON reports), so each
one is independently runnable and resumable. Exit codes: 0 success,
1 domain error, 2 usage error.
"""

import csv
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import click

from . import augment as augment_mod
from . import conflict as conflict_mod
from . import datasets as datasets_mod
from . import evalkit as evalkit_mod
from . import features as features_mod
from . import quality as quality_mod
from .annotate import (
    AnnotationRecord,
    AnnotationStore,
    agreement_report,
    annotate_papers,
)
from .corpus import ApiConfig, Store, fetch_venue
from .errors import ConfigError, ReviewGuardError
from .jsonio import append_jsonl, read_jsonl, sha256_file, write_json, write_jsonl
from .llmio import BackendConfig, Client
from .taxonomy import DR, SR


@dataclass
class RunConfig:
    store: str = "store"
    backends: dict = field(default_factory=dict)
    conflict_threshold: float = 3.0
    binoculars_threshold: float = 0.9
    split_ratios: tuple = (0.8, 0.1, 0.1)
    seed: int = 0
    serve_port: int = 8000

    def validate(self) -> None:
        if len(self.split_ratios) != 3 or abs(sum(self.split_ratios) - 1.0) > 1e-9:
            raise ConfigError(f"split_ratios must be 3 values summing to 1: {self.split_ratios}")
        if self.conflict_threshold < 0 or self.binoculars_threshold <= 0:
            raise ConfigError("thresholds must be positive")
        if not isinstance(self.seed, int):
            raise ConfigError("seed must be an integer")

    @classmethod
    def load(cls, path) -> "RunConfig":
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
        known = set(cls.__dataclass_fields__)
        unknown = set(raw) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "split_ratios" in raw:
            raw["split_ratios"] = tuple(raw["split_ratios"])
        config = cls(**raw)
        config.validate()
        return config


@dataclass
class AppContext:
    config: RunConfig
    json_mode: bool = False


def _emit(ctx_obj, data, text: str) -> None:
    if ctx_obj.json_mode:
        click.echo(json.dumps(data, ensure_ascii=False, sort_keys=True))
    else:
        click.echo(text)


def _client(backend_path, call_log=None) -> Client:
    return Client(BackendConfig.from_file(backend_path), call_log=call_log)


def _load_conflict_ids(path) -> list:
    ids = []
    for row in read_jsonl(path):
        if "summary" in row:
            continue
        if row.get("conflicting"):
            ids.append(row["paper_id"])
    return sorted(set(ids))


def _load_annotations(path) -> list:
    return [AnnotationRecord.from_json(row) for row in read_jsonl(path)]


def _machine_annotations(path) -> list:
    """Latest machine-pass record per review from an annotations file."""
    latest: dict = {}
    for record in _load_annotations(path):
        if record.round == 0 and record.source == "llm":
            latest[record.review_id] = record
    return [latest[k] for k in sorted(latest)]


def _load_synthetics(path) -> list:
    return [augment_mod.SyntheticReview.from_json(row) for row in read_jsonl(path)]


@click.group()
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="RunConfig JSON file.")
@click.option("--json", "json_mode", is_flag=True, help="Machine-parseable output.")
@click.option("--seed", type=int, default=None, help="Override the configured seed.")
@click.pass_context
def cli(ctx, config_path, json_mode, seed):
    """Deficient peer-review analysis pipeline."""
    config = RunConfig.load(config_path) if config_path else RunConfig()
    config.validate()
    if seed is not None:
        config.seed = seed
    ctx.obj = AppContext(config=config, json_mode=json_mode)


@cli.command()
@click.option("--venue", required=True)
@click.option("--year", required=True, type=int)
@click.option("--base-url", required=True)
@click.option("--store", "store_path", default=None)
@click.option("--page-limit", type=int, default=100)
@click.option("--cutoff", default=None, help="ISO date; notes created later are skipped.")
@click.option("--resume/--no-resume", default=True)
@click.pass_obj
def ingest(obj, venue, year, base_url, store_path, page_limit, cutoff, resume):
    """Fetch one venue/year from the notes API into the local store."""
    store = Store(store_path or obj.config.store)
    api = ApiConfig(base_url=base_url, page_limit=page_limit, data_cutoff=cutoff)
    n_papers, n_reviews = fetch_venue(store, venue, year, api, resume=resume)
    _emit(obj, {"papers": n_papers, "reviews": n_reviews},
          f"ingested {n_papers} papers, {n_reviews} reviews")


@cli.command("select-conflicts")
@click.option("--threshold", type=float, default=None)
@click.option("--out", "out_path", default="conflicts.jsonl")
@click.option("--store", "store_path", default=None)
@click.pass_obj
def select_conflicts(obj, threshold, out_path, store_path):
    """Flag conflicting papers by the trimmed-consensus divergence rule."""
    store = Store(store_path or obj.config.store)
    theta = obj.config.conflict_threshold if threshold is None else threshold
    results, summary = conflict_mod.select_conflicting(store, threshold=theta)
    rows = [r.to_json() for r in results]
    rows.append({"summary": summary})
    write_jsonl(out_path, rows)
    _emit(obj, summary,
          f"conflicting: {summary['totals']} of {summary['considered']} considered "
          f"(threshold {theta:g}) -> {out_path}")


@cli.command()
@click.option("--input", "input_path", required=True, help="conflicts.jsonl")
@click.option("--backend", "backend_path", required=True)
@click.option("--out", "out_path", default="annotations.jsonl")
@click.option("--store", "store_path", default=None)
@click.option("--char-budget", type=int, default=None)
@click.pass_obj
def annotate(obj, input_path, backend_path, out_path, store_path, char_budget):
    """Run the LLM annotation pass over conflicting papers."""
    store = Store(store_path or obj.config.store)
    paper_ids = _load_conflict_ids(input_path)
    kwargs = {}
    if char_budget is not None:
        kwargs["char_budget"] = char_budget
    with _client(backend_path, call_log="logs/calls.jsonl") as client:
        records, failures = annotate_papers(store, paper_ids, client, **kwargs)
    annotation_store = AnnotationStore(out_path)
    written = annotation_store.extend(records)
    if failures:
        for failure in failures:
            append_jsonl(out_path + ".failures.jsonl", failure)
    _emit(obj, {"records": written, "failures": len(failures)},
          f"annotated {written} reviews ({len(failures)} paper failures) -> {out_path}")


@cli.command()
@click.option("--conflicts", "conflicts_path", required=True)
@click.option("--backend", "backend_path", required=True)
@click.option("--out", "out_path", default="synthetic.jsonl")
@click.option("--store", "store_path", default=None)
@click.option("--min-tokens", type=int, default=augment_mod.DEFAULT_MIN_TOKENS)
@click.option("--overlap-ngram", type=int, default=augment_mod.DEFAULT_OVERLAP_NGRAM)
@click.pass_obj
def augment(obj, conflicts_path, backend_path, out_path, store_path, min_tokens, overlap_ngram):
    """Generate 6 deficient + 1 sufficient synthetic review per conflicting paper."""
    store = Store(store_path or obj.config.store)
    paper_ids = _load_conflict_ids(conflicts_path)
    config = augment_mod.AugmentConfig(min_tokens=min_tokens, overlap_ngram=overlap_ngram)
    with _client(backend_path, call_log="logs/calls.jsonl") as client:
        records, gaps = augment_mod.generate_batch(store, paper_ids, client, config=config)
    write_jsonl(out_path, (r.to_json() for r in records))
    gaps_path = str(Path(out_path).with_suffix("")) + ".gaps.jsonl"
    write_jsonl(gaps_path, gaps)
    reconciled = augment_mod.reconcile_counts(len(paper_ids), len(records), len(gaps))
    if not reconciled:
        raise ReviewGuardError(
            f"count identity broken: 7x{len(paper_ids)} != {len(records)} + {len(gaps)}"
        )
    _emit(obj, {"papers": len(paper_ids), "records": len(records), "gaps": len(gaps)},
          f"generated {len(records)} synthetic reviews for {len(paper_ids)} papers "
          f"({len(gaps)} gaps) -> {out_path}")


@cli.command()
@click.option("--annotations", "annotations_path", required=True)
@click.option("--out", "out_path", default="features.jsonl")
@click.option("--store", "store_path", default=None)
@click.pass_obj
def features(obj, annotations_path, out_path, store_path):
    """Compute structural metrics for every annotated real review."""
    store = Store(store_path or obj.config.store)
    machine = _machine_annotations(annotations_path)
    rows = []
    skipped = 0
    for record in machine:
        review = store.review(record.review_id)
        try:
            rows.append(features_mod.structural_features(review.text, review.review_id).to_json())
        except ReviewGuardError:
            skipped += 1
    write_jsonl(out_path, rows)
    _emit(obj, {"features": len(rows), "skipped": skipped},
          f"computed features for {len(rows)} reviews ({skipped} skipped) -> {out_path}")


@cli.command("structure-report")
@click.option("--annotations", "annotations_path", required=True)
@click.option("--out", "out_path", default="table_structure.json")
@click.option("--store", "store_path", default=None)
@click.pass_obj
def structure_report(obj, annotations_path, out_path, store_path):
    """SR-vs-DR means and rank correlations over the metric battery."""
    store = Store(store_path or obj.config.store)
    samples = []
    for record in _machine_annotations(annotations_path):
        review = store.review(record.review_id)
        try:
            struct = features_mod.structural_features(review.text, review.review_id)
        except ReviewGuardError:
            continue
        metrics = {
            "linsear write formula": struct.linsear_write,
            "sentence count": struct.sentence_count,
            "lexicon count": struct.lexicon_count,
            "syllable count": struct.syllable_count,
            "difficult words": struct.difficult_words,
            "monosyllable count": struct.monosyllable_count,
        }
        if review.rating is not None:
            metrics["rating score"] = review.rating
        if review.confidence is not None:
            metrics["confidence score"] = review.confidence
        samples.append((record.verdict == SR, metrics))
    report = features_mod.structure_report(samples)
    by_metric = {c.metric: c for c in report["correlations"]}
    payload = {
        "scope": report["scope"],
        "easy_word_list_hash": report["easy_word_list_hash"],
        "excluded_missing_metadata": report["excluded_missing_metadata"],
        "rows": [
            {**s.to_json(), **by_metric[s.metric].to_json()}
            for s in report["summaries"]
            if s.metric in by_metric
        ],
    }
    write_json(out_path, payload)
    lines = [
        features_mod.format_report_row(s, by_metric[s.metric])
        + ("" if by_metric[s.metric].displayed() else "  [below display threshold]")
        for s in report["summaries"]
        if s.metric in by_metric
    ]
    _emit(obj, payload, "\n".join(lines) + f"\n-> {out_path}")


@cli.command()
@click.option("--annotations", "annotations_path", required=True)
@click.option("--backend", "backend_path", required=True)
@click.option("--out", "out_path", default="sentiment.json")
@click.option("--store", "store_path", default=None)
@click.pass_obj
def sentiment(obj, annotations_path, backend_path, out_path, store_path):
    """Classify review sentiment and run the per-venue chi-square test."""
    store = Store(store_path or obj.config.store)
    machine = _machine_annotations(annotations_path)
    by_venue: dict = {}
    with _client(backend_path, call_log="logs/calls.jsonl") as client:
        for record in machine:
            review = store.review(record.review_id)
            paper = store.paper(review.paper_id)
            by_venue.setdefault(paper.venue, {"SR": [], "DR": []})[record.verdict].append(
                (review.review_id, review.text)
            )
        result = {}
        csv_rows = []
        for venue in sorted(by_venue):
            labels_by_class = {}
            for cls in (SR, DR):
                labels = quality_mod.classify_sentiment(by_venue[venue][cls], client)
                labels_by_class[cls] = [l for l in labels if isinstance(l, quality_mod.SentimentLabel)]
            table = quality_mod.sentiment_table(labels_by_class)
            percentages = quality_mod.sentiment_percentages(table)
            chi2 = quality_mod.chi_square(table)
            result[venue] = {
                "counts": table,
                "percentages": percentages,
                "chi_square": chi2.to_json(),
                "note": quality_mod.format_chi2_note(chi2),
            }
            for cls, row in zip((SR, DR), percentages):
                csv_rows.append([venue, cls] + [f"{v:.2f}" for v in row])
    write_json(out_path, result)
    _write_csv(Path(out_path).with_suffix(".csv"),
               ["venue", "class", "neg", "neu", "pos"], csv_rows)
    text = "\n".join(f"{venue}: {info['note']}" for venue, info in result.items())
    _emit(obj, result, text + f"\n-> {out_path}")


@cli.command("ai-detect")
@click.option("--scores", "scores_path", default=None,
              help="JSONL of {review_id, tokens: [{lp_observer, ce_cross}]}.")
@click.option("--backend", "backend_path", default=None)
@click.option("--annotations", "annotations_path", default=None)
@click.option("--store", "store_path", default=None)
@click.option("--threshold", type=float, default=None)
@click.option("--out", "out_path", default="ai_detect.jsonl")
@click.option("--temporal-out", "temporal_path", default=None)
@click.pass_obj
def ai_detect(obj, scores_path, backend_path, annotations_path, store_path,
              threshold, out_path, temporal_path):
    """Score reviews with the two-model log-perplexity ratio."""
    theta = obj.config.binoculars_threshold if threshold is None else threshold
    results = []
    if scores_path:
        for row in read_jsonl(scores_path):
            results.append(quality_mod.binoculars_score(
                row["tokens"], review_id=row["review_id"], threshold=theta))
    elif backend_path and annotations_path:
        store = Store(store_path or obj.config.store)
        with _client(backend_path, call_log="logs/calls.jsonl") as client:
            for record in _machine_annotations(annotations_path):
                review = store.review(record.review_id)
                tokens, _ = client.token_logprobs(review.text)
                results.append(quality_mod.binoculars_score(
                    tokens, review_id=review.review_id, threshold=theta))
    else:
        raise ReviewGuardError("need --scores, or --backend with --annotations")
    write_jsonl(out_path, (r.to_json() for r in results))
    n_ai = sum(1 for r in results if r.verdict == "ai-like")
    if temporal_path:
        if not annotations_path:
            raise ReviewGuardError("--temporal-out needs --annotations")
        store = Store(store_path or obj.config.store)
        verdicts = {r.review_id: r.verdict for r in _machine_annotations(annotations_path)}
        papers = {
            rid: store.paper(store.review(rid).paper_id)
            for rid in verdicts
        }
        rows = quality_mod.temporal_ai_counts(results, verdicts, papers)
        write_json(temporal_path, rows)
        _write_csv(Path(temporal_path).with_suffix(".csv"),
                   ["venue", "year", "verdict_class", "ai_like"],
                   [[r["venue"], r["year"], r["verdict_class"], r["ai_like"]] for r in rows])
    _emit(obj, {"scored": len(results), "ai_like": n_ai, "threshold": theta},
          f"scored {len(results)} reviews, {n_ai} ai-like (threshold {theta}) -> {out_path}")


@cli.command()
@click.option("--scored", "scored_path", required=True,
              help="JSONL of {score, is_ai} or {text, is_ai}.")
@click.option("--backend", "backend_path", default=None)
@click.pass_obj
def calibrate(obj, scored_path, backend_path):
    """Pick the detection threshold that maximizes fixture accuracy."""
    examples = []
    rows = list(read_jsonl(scored_path))
    needs_backend = any("score" not in row for row in rows)
    client = _client(backend_path) if needs_backend and backend_path else None
    if needs_backend and client is None:
        raise ReviewGuardError("fixture rows lack scores; provide --backend to score texts")
    try:
        for row in rows:
            if "score" in row:
                examples.append((float(row["score"]), bool(row["is_ai"])))
            else:
                tokens, _ = client.token_logprobs(row["text"])
                result = quality_mod.binoculars_score(tokens)
                examples.append((result.score, bool(row["is_ai"])))
    finally:
        if client is not None:
            client.close()
    best = quality_mod.calibrate_threshold(examples)
    _emit(obj, best,
          f"threshold {best['threshold']:.4f} (accuracy {best['accuracy']:.3f} "
          f"on {len(examples)} fixtures)")


@cli.command()
@click.option("--annotations", "annotations_path", required=True)
@click.option("--synthetic", "synthetic_path", default=None)
@click.option("--backend", "backend_path", required=True)
@click.option("--out", "out_path", default="similarity.json")
@click.option("--store", "store_path", default=None)
@click.pass_obj
def similarity(obj, annotations_path, synthetic_path, backend_path, out_path, store_path):
    """Abstract-to-review embedding similarity distributions per group."""
    store = Store(store_path or obj.config.store)
    pairs = []
    for record in _machine_annotations(annotations_path):
        review = store.review(record.review_id)
        paper = store.paper(review.paper_id)
        group = f"real/{record.verdict}/{paper.venue}"
        pairs.append((group, review.review_id, paper.abstract, review.text))
    if synthetic_path:
        for synthetic in _load_synthetics(synthetic_path):
            paper = store.paper(synthetic.paper_id)
            cls = SR if synthetic.target_category == SR else DR
            group = f"synthetic/{cls}/{paper.venue}"
            pairs.append((group, synthetic.synthetic_id, paper.abstract, synthetic.text))
    with _client(backend_path, call_log="logs/calls.jsonl") as client:
        stats = quality_mod.similarity_distribution(pairs, client)
    payload = {group: s.to_json() for group, s in sorted(stats.items())}
    write_json(out_path, payload)
    _write_csv(Path(out_path).with_suffix(".csv"),
               ["group", "n", "peak_bin_center"],
               [[g, p["n"], p["peak_bin_center"]] for g, p in payload.items()])
    text = "\n".join(
        f"{group}: n={p['n']} peak={p['peak_bin_center']:.2f}" for group, p in payload.items()
    )
    _emit(obj, payload, text + f"\n-> {out_path}")


@cli.command("build-dataset")
@click.option("--regime", required=True,
              type=click.Choice([r.lower() for r in datasets_mod.REGIMES], case_sensitive=False))
@click.option("--annotations", "annotations_path", required=True)
@click.option("--synthetic", "synthetic_path", default=None)
@click.option("--out-dir", "out_dir", required=True)
@click.option("--ratios", default=None, help="Comma-separated, e.g. 0.8,0.1,0.1.")
@click.option("--store", "store_path", default=None)
@click.pass_obj
def build_dataset(obj, regime, annotations_path, synthetic_path, out_dir, ratios, store_path):
    """Assemble one train/test regime with paper-level split hygiene."""
    store = Store(store_path or obj.config.store)
    regime = regime.upper()
    ratio_values = (
        tuple(float(x) for x in ratios.split(",")) if ratios else tuple(obj.config.split_ratios)
    )
    real_examples = [
        datasets_mod.encode_real(store.review(r.review_id), r)
        for r in _machine_annotations(annotations_path)
    ]
    synthetic_examples = (
        [datasets_mod.encode_synthetic(s) for s in _load_synthetics(synthetic_path)]
        if synthetic_path else []
    )
    source_hashes = {"annotations": sha256_file(annotations_path), "store": store.state_digest()}
    if synthetic_path:
        source_hashes["synthetic"] = sha256_file(synthetic_path)
    manifest = datasets_mod.build(
        regime, real_examples, synthetic_examples, out_dir,
        ratios=ratio_values, seed=obj.config.seed, source_hashes=source_hashes,
    )
    hygiene = datasets_mod.leakage_check(out_dir)
    if not hygiene["passed"]:
        raise ReviewGuardError(f"leakage check failed: {hygiene['violations']}")
    _emit(obj, {"manifest": manifest.to_json(), "leakage_check": hygiene},
          f"built {regime} (seed {obj.config.seed}) under {out_dir}; leakage check passed")


@cli.command()
@click.option("--task", required=True, type=click.Choice(["binary", "multilabel"]))
@click.option("--pred", "pred_path", required=True)
@click.option("--gold", "gold_path", required=True)
@click.option("--regime", default="")
@click.option("--out", "out_path", default=None)
@click.pass_obj
def evaluate(obj, task, pred_path, gold_path, regime, out_path):
    """Score external detector predictions with macro P/R/F1."""
    preds = [evalkit_mod.PredictionRecord.from_json(row) for row in read_jsonl(pred_path)]
    gold_examples = [datasets_mod.EncodedExample.from_json(row) for row in read_jsonl(gold_path)]
    if task == "binary":
        gold = {e.example_id: e.binary_target for e in gold_examples}
        report = evalkit_mod.macro_binary(preds, gold, regime=regime)
    else:
        gold = {e.example_id: e.multilabel_target for e in gold_examples}
        report = evalkit_mod.macro_multilabel(preds, gold, regime=regime)
    if out_path:
        write_json(out_path, report.to_json())
    fmt = evalkit_mod.format_metric
    _emit(obj, report.to_json(),
          f"{task} macro P={fmt(report.macro_precision)} R={fmt(report.macro_recall)} "
          f"F1={fmt(report.macro_f1)}"
          + (f" -> {out_path}" if out_path else ""))


@cli.command("regime-report")
@click.option("--report", "report_paths", multiple=True, required=True)
@click.option("--baseline", default="R_R")
@click.option("--out", "out_path", default=None)
@click.pass_obj
def regime_report(obj, report_paths, baseline, out_path):
    """Compare regimes against the baseline with ratio annotations."""
    reports = {}
    for path in report_paths:
        with open(path, encoding="utf-8") as fh:
            report = evalkit_mod.EvalReport.from_json(json.load(fh))
        if not report.regime:
            raise ReviewGuardError(f"report {path} carries no regime label")
        reports[report.regime] = report
    table = evalkit_mod.regime_report(reports, baseline=baseline)
    if out_path:
        write_json(out_path, table)
    lines = []
    for regime in sorted(table["cells"]):
        cells = table["cells"][regime]
        ratios = table["ratios"][regime]
        parts = []
        for metric in table["metrics"]:
            ratio = ratios[metric]
            ratio_text = "n/a" if ratio == "n/a" else f"{ratio:.2f}x"
            flag = " [max]" if table["max_flags"][metric] == regime else ""
            parts.append(f"{metric.split('_')[1]}={evalkit_mod.format_metric(cells[metric])}"
                         f" ({ratio_text}){flag}")
        lines.append(f"{regime}: " + "  ".join(parts))
    _emit(obj, table, "\n".join(lines) + (f"\n-> {out_path}" if out_path else ""))


@cli.command()
@click.option("--annotations", "annotations_path", required=True)
@click.option("--round", "round_", required=True, type=int)
@click.option("--include-machine/--no-machine", default=True)
@click.pass_obj
def agreement(obj, annotations_path, round_, include_machine):
    """Inter-rater agreement report for one validation round."""
    store = AnnotationStore(annotations_path)
    humans = store.for_round(round_) if round_ > 0 else []
    reference = store.machine_pass() if include_machine else None
    if reference is not None and humans:
        wanted = {r.review_id for r in humans}
        reference = [r for r in reference if r.review_id in wanted]
    report = agreement_report(humans, reference=reference, round_label=str(round_))
    pretty = report.to_json()
    _emit(obj, pretty,
          f"round {round_}: averaged Cohen and Fleiss kappa {pretty['summary']} "
          f"over {report.n_items} items"
          + (f" (excluded: {', '.join(report.excluded_categories)})"
             if report.excluded_categories else ""))


@cli.command()
@click.option("--port", type=int, default=None)
@click.option("--host", default="127.0.0.1")
@click.option("--store", "store_path", default=None)
@click.option("--annotations", "annotations_path", default="annotations.jsonl")
@click.option("--rounds", "rounds_path", default=None)
@click.option("--ui-dir", "ui_dir", default=None)
@click.pass_obj
def serve(obj, port, host, store_path, annotations_path, rounds_path, ui_dir):
    """Serve the validation API and UI; prints the bound port first."""
    from . import server as server_mod

    if rounds_path is None:
        rounds_path = str(Path(annotations_path).with_suffix("")) + ".rounds.json"
    server_mod.serve(
        store_path or obj.config.store,
        annotations_path,
        rounds_path,
        host=host,
        port=obj.config.serve_port if port is None else port,
        ui_dir=ui_dir,
    )


def _write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def main(argv=None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
        return 0
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.UsageError as exc:
        exc.show()
        return 2
    except click.ClickException as exc:
        exc.show()
        return exc.exit_code
    except ReviewGuardError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1


if __name__ == "__main__":
    sys.exit(main())
