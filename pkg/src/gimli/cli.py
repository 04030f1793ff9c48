"""Command-line entry points: mine, build-dataset, train, evaluate,
classify, serve, seed-demo."""

from __future__ import annotations

import json
import logging
import sys
from pathlib import Path

import click

from .datasets import DatasetExample, DatasetFile, load_dataset, save_dataset
from .demo import load_registry_file, seed_demo
from .evaluation import build_label_matrix, cross_validate, render_table
from .forest import ForestHyperparams, save_model, train
from .links import build_links
from .mining import GitHubClient
from .service import ProjectRegistry, classify_open_issues, create_app, schedule_daily
from .snapshot import ProjectRef, load_snapshot, save_snapshot
from .store import IssueStore
from .taxonomy import labels_for_dataset, load_taxonomy, reference_taxonomy_path
from .text import CleaningConfig, default_stopwords, preprocess
from .tfidf import fit_tfidf, save_tfidf, transform

log = logging.getLogger(__name__)


def _cleaning_config(templates_path: str | None) -> CleaningConfig:
    templates: frozenset[str] = frozenset()
    if templates_path:
        lines = Path(templates_path).read_text("utf-8").splitlines()
        templates = frozenset(l.strip() for l in lines if l.strip())
    return CleaningConfig(stopwords=default_stopwords(), template_lines=templates)


@click.group()
@click.option("--snapshot", type=click.Path(), default=None, help="Default snapshot file.")
@click.option("--taxonomy", type=click.Path(), default=None, help="Taxonomy CSV (defaults to the bundled reference file).")
@click.option("--seed", type=int, default=0, show_default=True, help="Default RNG seed.")
@click.option("-v", "--verbose", is_flag=True, help="Enable debug logging.")
@click.pass_context
def main(ctx, snapshot, taxonomy, seed, verbose):
    """Skill-based open-source issue recommender."""
    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    ctx.obj = {
        "snapshot": snapshot,
        "taxonomy": taxonomy or str(reference_taxonomy_path()),
        "seed": seed,
    }


@main.command()
@click.argument("repo")
@click.option("--out", type=click.Path(), required=True, help="Snapshot output path.")
@click.option("--display-label", default=None, help="Catalog name (defaults to the repo name).")
@click.option("--page-size", type=int, default=100, show_default=True)
@click.option("--include-comments", is_flag=True, help="Also fetch issue comment bodies.")
@click.pass_context
def mine(ctx, repo, out, display_label, page_size, include_comments):
    """Fetch OWNER/NAME issues, pulls, and changed source files."""
    owner, _, name = repo.partition("/")
    if not owner or not name:
        raise click.BadParameter("repository must be OWNER/NAME")
    ref = ProjectRef(owner=owner, name=name, display_label=display_label or name)
    client = GitHubClient(page_size=page_size)
    snapshot = client.mine_snapshot(ref, include_comments=include_comments)
    save_snapshot(snapshot, out)
    click.echo(
        f"mined {len(snapshot.issues)} issues, {len(snapshot.pulls)} pulls, "
        f"{len(snapshot.file_contents)} files -> {out}"
    )


@main.command("build-dataset")
@click.option("--snapshot", "snapshot_path", type=click.Path(exists=True), default=None)
@click.option("--taxonomy", "taxonomy_path", type=click.Path(exists=True), default=None)
@click.option("--out", type=click.Path(), required=True, help="Dataset output path.")
@click.pass_context
def build_dataset(ctx, snapshot_path, taxonomy_path, out):
    """Link merged PRs to closed issues and label them by API domain."""
    snapshot_path = snapshot_path or ctx.obj["snapshot"]
    if not snapshot_path:
        raise click.UsageError("--snapshot is required (globally or per command)")
    taxonomy = load_taxonomy(taxonomy_path or ctx.obj["taxonomy"])
    snapshot = load_snapshot(snapshot_path)
    linked = build_links(snapshot)
    labeled = labels_for_dataset(linked, snapshot, taxonomy)
    dataset = DatasetFile(
        project=snapshot.project,
        label_universe=taxonomy.label_universe,
        examples=[
            DatasetExample(
                number=issue.number,
                title=issue.title,
                body=issue.body,
                url=issue.url,
                labels=labels,
            )
            for issue, labels in labeled.examples
        ],
        dropped_zero_label=labeled.dropped_zero_label,
        link_summary=linked.summary.to_dict(),
    )
    save_dataset(dataset, out)
    summary = {
        **linked.summary.to_dict(),
        "labeled_examples": len(dataset.examples),
        "dropped_zero_label": labeled.dropped_zero_label,
    }
    click.echo(json.dumps(summary, indent=2))


@main.command()
@click.option("--dataset", "dataset_path", type=click.Path(exists=True), required=True)
@click.option("--out-dir", type=click.Path(), required=True, help="Directory for forest.json and tfidf.json.")
@click.option("--seed", type=int, default=None, help="Overrides the global --seed.")
@click.option("--min-df", type=int, default=2, show_default=True)
@click.option("--templates", type=click.Path(exists=True), default=None, help="File of template lines to strip.")
@click.pass_context
def train_cmd(ctx, dataset_path, out_dir, seed, min_df, templates):
    """Train per-label forests on a labeled dataset."""
    seed = seed if seed is not None else ctx.obj["seed"]
    dataset = load_dataset(dataset_path)
    config = _cleaning_config(templates)
    tokens = [preprocess(e.title, e.body, config) for e in dataset.examples]
    tfidf = fit_tfidf(tokens, min_df=min_df, config=config)
    X = [transform(tfidf, t) for t in tokens]

    n = len(dataset.examples)
    positives = {
        label: sum(1 for e in dataset.examples if label in e.labels)
        for label in dataset.label_universe
    }
    trainable = tuple(l for l in dataset.label_universe if 0 < positives[l] < n)
    skipped = [l for l in dataset.label_universe if l not in trainable]
    if skipped:
        log.warning("skipping degenerate labels (all-0 or all-1): %s", skipped)
    Y = build_label_matrix([e.labels for e in dataset.examples], trainable)

    model = train(X, Y, trainable, ForestHyperparams(seed=seed))
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "forest.json").write_bytes(save_model(model))
    (out / "tfidf.json").write_bytes(save_tfidf(tfidf))
    click.echo(
        f"trained {len(trainable)} labels x {model.hyperparams.n_estimators} trees "
        f"on {n} examples ({tfidf.dimension} features) -> {out}"
    )


main.add_command(train_cmd, name="train")


@main.command()
@click.option("--dataset", "dataset_paths", type=click.Path(exists=True), multiple=True, required=True,
              help="Dataset file; pass several to evaluate the combined multi-project corpus.")
@click.option("--seed", type=int, default=None, help="Overrides the global --seed.")
@click.option("--splits", type=int, default=10, show_default=True)
@click.option("--test-fraction", type=float, default=0.1, show_default=True)
@click.option("--min-df", type=int, default=2, show_default=True)
@click.option("--report", type=click.Path(), default=None, help="Write the JSON report here.")
@click.pass_context
def evaluate(ctx, dataset_paths, seed, splits, test_fraction, min_df, report):
    """ShuffleSplit cross-validation with per-fold metrics."""
    seed = seed if seed is not None else ctx.obj["seed"]
    datasets = [load_dataset(p) for p in dataset_paths]
    mode = "one_project" if len(datasets) == 1 else "multi_project"

    universe: list[str] = []
    examples = []
    for ds in datasets:
        for label in ds.label_universe:
            if label not in universe:
                universe.append(label)
        for e in ds.examples:
            examples.append((preprocess(e.title, e.body), e.labels))

    result = cross_validate(
        examples,
        tuple(universe),
        mode=mode,
        project=datasets[0].project if mode == "one_project" else None,
        n_splits=splits,
        test_fraction=test_fraction,
        seed=seed,
        min_df=min_df,
    )
    click.echo(render_table([result]))
    if report:
        Path(report).write_text(json.dumps(result.to_dict(), indent=2), "utf-8")
        click.echo(f"report -> {report}")


@main.command()
@click.option("--registry", "registry_path", type=click.Path(exists=True), required=True)
@click.option("--store", "store_path", type=click.Path(), required=True)
@click.option("--project", "project_label", default=None, help="Only this project (default: all).")
def classify(registry_path, store_path, project_label):
    """One-shot classification of open issues into the store."""
    store = IssueStore(store_path)
    registry = load_registry_file(registry_path, store)
    labels = [project_label] if project_label else registry.labels()
    for label in labels:
        count = classify_open_issues(registry.get(label), store)
        click.echo(f"{label}: {count} open issues classified")


@main.command()
@click.option("--registry", "registry_path", type=click.Path(exists=True), required=True)
@click.option("--store", "store_path", type=click.Path(), required=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--interval", type=float, default=24 * 3600, show_default=True,
              help="Reclassification interval in seconds.")
@click.option("--classify-on-start/--no-classify-on-start", default=True, show_default=True)
def serve(registry_path, store_path, port, host, interval, classify_on_start):
    """Run the recommendation HTTP service."""
    import uvicorn

    store = IssueStore(store_path)
    registry = load_registry_file(registry_path, store)
    if classify_on_start:
        for label in registry.labels():
            try:
                classify_open_issues(registry.get(label), store)
            except Exception as exc:  # noqa: BLE001 - startup classify is best effort
                log.warning("initial classification of %s failed: %s", label, exc)
    scheduler = schedule_daily(registry, store, interval_seconds=interval)
    app = create_app(registry, store, scheduler)
    try:
        uvicorn.run(app, host=host, port=port)
    finally:
        scheduler.stop()


@main.command("seed-demo")
@click.argument("out_dir", type=click.Path())
@click.option("--issues", type=int, default=160, show_default=True)
@click.option("--seed", type=int, default=None, help="Overrides the global --seed.")
@click.pass_context
def seed_demo_cmd(ctx, out_dir, issues, seed):
    """Build three offline demo projects with trained models and a registry."""
    seed = seed if seed is not None else ctx.obj["seed"] or 7
    registry_path = seed_demo(out_dir, issues_per_project=issues, seed=seed)
    click.echo(f"demo ready: gimli serve --registry {registry_path} --store {Path(out_dir) / 'store.db'}")


if __name__ == "__main__":
    sys.exit(main())
