"""Command-line interface.

Subcommands: verify-data, train-detector, extract, run, grid, sweep, oracle,
report. The data root can come from ``--data-root`` or the
``SUBJCUT_DATA_ROOT`` environment variable. Exit codes: 0 success, 1 check or
experiment failure, 2 usage error.
"""

from __future__ import annotations

import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import click
import numpy as np

from . import corpus, evaluation, extraction, mincut
from .classifiers import IndividualScores, load_model, save_model
from .extraction import Detector, DetectorConfig, ProximityParams
from .features import Vocabulary

EXPECTED_COUNTS = {
    "positive_count": 1000,
    "negative_count": 1000,
    "subjective_count": 5000,
    "objective_count": 5000,
}

QUOTE_NAMES = ("quote.tok.gt9.5000", "subjective.txt")
PLOT_NAMES = ("plot.tok.gt9.5000", "objective.txt")


def fail(message: str, code: int = 1) -> None:
    click.echo(f"subjcut: error: {message}", err=True)
    sys.exit(code)


def resolve_polarity_root(data_root: Path) -> Path:
    """Find the directory holding pos/ and neg/ under a dataset root."""
    for candidate in (data_root, data_root / "txt_sentoken", data_root / "polarity"):
        if (candidate / "pos").is_dir() and (candidate / "neg").is_dir():
            return candidate
    raise corpus.IngestionError(f"no pos/ and neg/ directories under {data_root}")


def resolve_subjectivity_files(data_root: Path) -> tuple[Path, Path]:
    """Find the subjective-snippet and objective-plot files under a root."""
    search_dirs = (data_root, data_root / "rotten_imdb", data_root / "subjectivity")
    quote = plot = None
    for d in search_dirs:
        for name in QUOTE_NAMES:
            if quote is None and (d / name).is_file():
                quote = d / name
        for name in PLOT_NAMES:
            if plot is None and (d / name).is_file():
                plot = d / name
    if quote is None or plot is None:
        raise corpus.IngestionError(f"no sentence corpus files under {data_root}")
    return quote, plot


def _data_root(value: str | None) -> Path:
    if value is None:
        raise click.UsageError("no data root: pass --data-root or set SUBJCUT_DATA_ROOT")
    root = Path(value)
    if not root.is_dir():
        raise click.UsageError(f"data root is not a directory: {root}")
    return root


data_root_option = click.option(
    "--data-root", envvar="SUBJCUT_DATA_ROOT", default=None, help="Dataset root directory."
)
output_dir_option = click.option(
    "--output-dir", default="out", show_default=True, help="Directory for result files."
)


def _ensure_outdir(path: str) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


@click.group()
def main() -> None:
    """Polarity classification on min-cut subjectivity extracts."""


@main.command("verify-data")
@data_root_option
@output_dir_option
def cmd_verify_data(data_root: str | None, output_dir: str) -> None:
    """Check dataset layout and counts; write a manifest."""
    root = _data_root(data_root)
    try:
        pol_root = resolve_polarity_root(root)
        quote, plot = resolve_subjectivity_files(root)
        manifest = corpus.build_manifest(pol_root, quote, plot)
    except corpus.IngestionError as exc:
        raise click.UsageError(str(exc))
    out = _ensure_outdir(output_dir)
    (out / "manifest.json").write_text(manifest.to_json(), encoding="utf-8")
    problems = []
    for field, expected in EXPECTED_COUNTS.items():
        got = getattr(manifest, field)
        if got != expected:
            problems.append(f"{field}: expected {expected}, found {got}")
    for name in manifest.skipped:
        problems.append(f"skipped empty file: {name}")
    if problems:
        for p in problems:
            click.echo(p, err=True)
        fail(f"{len(problems)} dataset problem(s); see above")
    click.echo(f"ok: counts match, manifest written to {out / 'manifest.json'}")


def _load_datasets(root: Path):
    pol_root = resolve_polarity_root(root)
    quote, plot = resolve_subjectivity_files(root)
    documents = corpus.load_polarity_dataset(pol_root)
    sentences = corpus.load_subjectivity_dataset(quote, plot)
    return documents, sentences


@main.command("train-detector")
@data_root_option
@output_dir_option
@click.option("--base", type=click.Choice(["nb", "svm", "both"]), default="both", show_default=True)
@click.option("--alpha", default=1.0, show_default=True, help="NB smoothing.")
@click.option("--regularization", default=1.0, show_default=True, help="SVM penalty C.")
@click.option("--seed", default=0, show_default=True)
@click.option("--min-doc-freq", default=1, show_default=True)
def cmd_train_detector(
    data_root, output_dir, base, alpha, regularization, seed, min_doc_freq
) -> None:
    """Train subjectivity detector model(s) on the sentence corpus."""
    root = _data_root(data_root)
    out = _ensure_outdir(output_dir)
    try:
        quote, plot = resolve_subjectivity_files(root)
        sentences = corpus.load_subjectivity_dataset(quote, plot)
    except corpus.IngestionError as exc:
        raise click.UsageError(str(exc))
    bases = ["nb", "svm"] if base == "both" else [base]
    for b in bases:
        model, vocab = evaluation.train_detector_model(
            sentences, base=b, alpha=alpha, regularization=regularization,
            seed=seed, min_doc_freq=min_doc_freq,
        )
        vocab.save(out / "detector_vocab.tsv")
        save_model(model, out / f"detector_{b}.json")
        click.echo(f"trained {b} detector on {len(sentences)} sentences -> detector_{b}.json")


def _proximity_from_flags(threshold, decay, strength, weight) -> ProximityParams:
    return ProximityParams(
        threshold=threshold, decay=decay, strength=strength, cross_paragraph_weight=weight
    )


def _load_detector(model_dir: Path, base: str, config: DetectorConfig) -> Detector:
    vocab = Vocabulary.load(model_dir / "detector_vocab.tsv")
    model = load_model(model_dir / f"detector_{base}.json", vocab)
    return Detector(model=model, vocab=vocab, config=config)


@main.command("extract")
@data_root_option
@output_dir_option
@click.option("--model-dir", default="out", show_default=True, help="Where trained detectors live.")
@click.option("--base", type=click.Choice(["nb", "svm"]), default="nb", show_default=True)
@click.option("--mode", type=click.Choice(["basic", "graph"]), default="basic", show_default=True)
@click.option("--threshold", default=1, show_default=True, help="Max proximal distance.")
@click.option(
    "--decay",
    type=click.Choice(list(extraction.DECAY_NAMES)),
    default="constant",
    show_default=True,
)
@click.option("--strength", default=0.0, show_default=True, help="Association weight.")
@click.option("--cross-paragraph-weight", default=1.0, show_default=True)
@click.option("--flipped", is_flag=True, help="Emit the objective complement instead.")
def cmd_extract(
    data_root, output_dir, model_dir, base, mode,
    threshold, decay, strength, cross_paragraph_weight, flipped,
) -> None:
    """Write extracts (JSONL plus a mirrored text tree) for every review."""
    root = _data_root(data_root)
    out = _ensure_outdir(output_dir)
    try:
        pol_root = resolve_polarity_root(root)
        documents = corpus.load_polarity_dataset(pol_root)
        proximity = None
        if mode == "graph":
            proximity = _proximity_from_flags(threshold, decay, strength, cross_paragraph_weight)
        detector = _load_detector(
            Path(model_dir), base, DetectorConfig(base=base, mode=mode, proximity=proximity)
        )
    except (corpus.IngestionError, FileNotFoundError) as exc:
        raise click.UsageError(str(exc))
    extracts = []
    for doc in documents:
        selected = detector.select(doc)
        if flipped:
            extracts.append(extraction.extract_objective(doc, selected))
        else:
            extracts.append(extraction.build_extract(doc, selected))
    (out / "extracts.jsonl").write_text(
        extraction.extracts_to_jsonl(extracts), encoding="utf-8"
    )
    by_label = {"positive": "pos", "negative": "neg"}
    for doc, ex in zip(documents, extracts):
        d = out / "extract_text" / by_label[doc.label]
        d.mkdir(parents=True, exist_ok=True)
        (d / f"{doc.id}.txt").write_text(ex.text + "\n", encoding="utf-8")
    rate = extraction.preservation_rate(extracts)
    click.echo(f"wrote {len(extracts)} extracts, mean word preservation {rate:.3f}")


def _config_from_spec(spec: dict) -> evaluation.ExperimentConfig:
    try:
        return evaluation.ExperimentConfig.from_dict(spec)
    except (TypeError, ValueError) as exc:
        raise click.UsageError(
            f"bad experiment spec ({exc}); valid extractors: {', '.join(evaluation.EXTRACTORS)}"
        )


@main.command("run")
@click.option("--spec", "spec_path", required=True, type=click.Path(exists=True, dir_okay=False))
@data_root_option
@output_dir_option
@click.option("--seed", default=None, type=int, help="Override the spec's seed.")
def cmd_run(spec_path, data_root, output_dir, seed) -> None:
    """Run one experiment from a JSON spec file; write report.json and report.txt."""
    root = _data_root(data_root)
    out = _ensure_outdir(output_dir)
    spec = json.loads(Path(spec_path).read_text(encoding="utf-8"))
    config = _config_from_spec(spec)
    if seed is not None:
        config = replace(config, seed=seed)
    try:
        documents, sentences = _load_datasets(root)
    except corpus.IngestionError as exc:
        raise click.UsageError(str(exc))
    detector = None
    if config.extractor in ("basic", "graph", "paragraph", "top_n", "least_n"):
        unit = "paragraph" if config.extractor == "paragraph" else "sentence"
        mode = "graph" if config.extractor == "graph" else "basic"
        detector = evaluation.make_detector(
            sentences,
            DetectorConfig(base=config.detector_base, mode=mode,
                           proximity=config.proximity, unit=unit),
            seed=config.seed,
        )
    report = evaluation.run_experiment(config, documents, detector)
    (out / "report.json").write_text(report.to_json(), encoding="utf-8")
    (out / "report.txt").write_text(report.render_text(), encoding="utf-8")
    click.echo(report.render_text(), nl=False)


@main.command("grid")
@data_root_option
@output_dir_option
@click.option("--base", type=click.Choice(["nb", "svm"]), default="nb", show_default=True)
@click.option("--classifier", type=click.Choice(["nb", "svm"]), default="nb", show_default=True)
@click.option("--thresholds", default="1,2,3", show_default=True)
@click.option("--decays", default="constant,exponential,inverse_square", show_default=True)
@click.option("--strengths", default="", help="Comma floats; default 0.0..1.0 step 0.1.")
@click.option("--weights", default="1.0", show_default=True, help="Cross-paragraph weights.")
@click.option("--seed", default=0, show_default=True)
@click.option("--threads", default=None, type=int,
              help="Parallel grid cells; defaults to the core count.")
def cmd_grid(
    data_root, output_dir, base, classifier, thresholds, decays, strengths, weights, seed, threads
) -> None:
    """Grid-search proximity parameters; write grid.csv and best_report.json."""
    root = _data_root(data_root)
    out = _ensure_outdir(output_dir)
    try:
        documents, sentences = _load_datasets(root)
    except corpus.IngestionError as exc:
        raise click.UsageError(str(exc))
    grid = evaluation.GridSpec(
        thresholds=tuple(int(x) for x in thresholds.split(",")),
        decays=tuple(decays.split(",")),
        strengths=tuple(float(x) for x in strengths.split(",")) if strengths else (),
        cross_paragraph_weights=tuple(float(x) for x in weights.split(",")),
    )
    detector = evaluation.make_detector(
        sentences,
        DetectorConfig(base=base, mode="graph", proximity=ProximityParams(strength=0.0)),
        seed=seed,
    )
    base_config = evaluation.ExperimentConfig(
        extractor="graph", detector_base=base, classifier=classifier, seed=seed,
        proximity=ProximityParams(strength=0.0),
    )
    workers = threads if threads else (os.cpu_count() or 1)
    result = evaluation.grid_search(base_config, documents, detector, grid, max_workers=workers)
    (out / "grid.csv").write_text(result.to_csv(), encoding="utf-8")
    (out / "best_report.json").write_text(result.best.to_json(), encoding="utf-8")
    click.echo(f"best mean accuracy {result.best.mean_accuracy:.4f} "
               f"(oracle-selected over {len(result.cells)} settings)")
    click.echo(result.best.render_text(), nl=False)


@main.command("sweep")
@data_root_option
@output_dir_option
@click.option("--methods", default="top_n,first_n,last_n,least_n", show_default=True)
@click.option("--n-values", default="1,5,10,15,20,30,40", show_default=True)
@click.option("--classifier", type=click.Choice(["nb", "svm", "both"]), default="nb",
              show_default=True)
@click.option("--base", type=click.Choice(["nb", "svm"]), default="nb", show_default=True,
              help="Detector base used for scoring sentences.")
@click.option("--seed", default=0, show_default=True)
def cmd_sweep(data_root, output_dir, methods, n_values, classifier, base, seed) -> None:
    """Accuracy of N-sentence extraction baselines over a range of N."""
    root = _data_root(data_root)
    out = _ensure_outdir(output_dir)
    try:
        documents, sentences = _load_datasets(root)
    except corpus.IngestionError as exc:
        raise click.UsageError(str(exc))
    method_list = tuple(methods.split(","))
    for m in method_list:
        if m not in evaluation.N_EXTRACTORS:
            raise click.UsageError(
                f"unknown method {m!r}; valid: {', '.join(evaluation.N_EXTRACTORS)}"
            )
    detector = evaluation.make_detector(
        sentences, DetectorConfig(base=base, mode="basic"), seed=seed
    )
    classifiers = ("nb", "svm") if classifier == "both" else (classifier,)
    results = evaluation.n_sentence_sweep(
        documents,
        detector,
        methods=method_list,
        n_values=tuple(int(x) for x in n_values.split(",")),
        classifiers=classifiers,
        base_config=evaluation.ExperimentConfig(seed=seed),
    )
    (out / "sweep.csv").write_text(evaluation.sweep_to_csv(results), encoding="utf-8")
    click.echo(f"wrote {len(results)} sweep cells to {out / 'sweep.csv'}")


def _random_instance(rng: np.random.Generator, n_max: int):
    n = int(rng.integers(1, n_max + 1))
    ind = IndividualScores(class1=rng.uniform(0, 1, n), class2=rng.uniform(0, 1, n))
    pairs = {}
    for i in range(n):
        for k in range(i + 1, n):
            if rng.random() < 0.4:
                pairs[(i, k)] = float(rng.uniform(0, 1))
    return ind, mincut.AssociationScores(pairs=pairs)


WORKED_EXAMPLE_IND = IndividualScores(
    class1=np.array([0.8, 0.5, 0.1]), class2=np.array([0.2, 0.5, 0.9])
)
WORKED_EXAMPLE_ASSOC = mincut.AssociationScores(
    pairs={(0, 1): 1.0, (0, 2): 0.1, (1, 2): 0.2}
)


@main.command("oracle")
@click.option("--n-max", default=12, show_default=True)
@click.option("--trials", default=200, show_default=True)
@click.option("--seed", default=0, show_default=True)
def cmd_oracle(n_max, trials, seed) -> None:
    """Check min_cut against brute-force enumeration on random instances."""
    if trials == 0:
        click.echo("warning: 0 trials requested; vacuous pass", err=True)
        click.echo("oracle: pass (0 trials)")
        return
    # the worked 3-item example is always included
    fixture = mincut.min_cut(mincut.build_network(WORKED_EXAMPLE_IND, WORKED_EXAMPLE_ASSOC))
    if fixture.source_side != (0, 1) or abs(fixture.cost - 1.1) > 1e-9:
        fail(f"worked example failed: side={fixture.source_side} cost={fixture.cost}")
    rng = np.random.default_rng(seed)
    for trial in range(trials):
        ind, assoc = _random_instance(rng, n_max)
        got = mincut.min_cut(mincut.build_network(ind, assoc))
        # compare at the scaled-integer level, where equality is exact
        want = mincut.brute_force_min(*mincut.scale_instance(ind, assoc))
        if got.max_flow_value != int(want.cost):
            click.echo(f"counterexample at trial {trial}:", err=True)
            click.echo(f"  class1={ind.class1.tolist()}", err=True)
            click.echo(f"  class2={ind.class2.tolist()}", err=True)
            click.echo(f"  assoc={dict(assoc.pairs)}", err=True)
            click.echo(f"  min_cut flow={got.max_flow_value} side={got.source_side}", err=True)
            click.echo(f"  brute force cost={int(want.cost)} side={want.source_side}", err=True)
            fail("min_cut disagrees with brute force")
    click.echo(f"oracle: pass ({trials} trials, n <= {n_max}, worked example cost 1.1)")


@main.command("report")
@click.argument("report_file", type=click.Path(exists=True, dir_okay=False))
def cmd_report(report_file) -> None:
    """Render a stored JSON report as aligned text."""
    report = evaluation.ExperimentReport.from_json(
        Path(report_file).read_text(encoding="utf-8")
    )
    click.echo(report.render_text(), nl=False)


if __name__ == "__main__":
    main()
