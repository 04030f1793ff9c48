"""Seed a self-contained offline demo: three projects with trained models,
snapshots of open issues, a registry file, and a pre-filled store."""

from __future__ import annotations

import json
from datetime import datetime, timezone
from pathlib import Path

from .evaluation import build_label_matrix
from .forest import ForestHyperparams, save_model, train
from .snapshot import Issue, ProjectRef, ProjectSnapshot, save_snapshot
from .store import IssueStore
from .service import ProjectRegistry, classify_open_issues
from .synth import generate_corpus
from .text import preprocess
from .tfidf import fit_tfidf, save_tfidf, transform

DEMO_PROJECTS = (
    ("demo", "harmonia", "Harmonia"),
    ("demo", "ledgerline", "Ledgerline"),
    ("demo", "packetloom", "Packetloom"),
)


def _issue_url(ref: ProjectRef, number: int) -> str:
    return f"https://github.com/{ref.owner}/{ref.name}/issues/{number}"


def seed_demo(out_dir: str | Path, issues_per_project: int = 160, seed: int = 7) -> Path:
    """Build the demo tree and return the registry path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    registry_entries = []
    store = IssueStore(out / "store.db")
    registry = ProjectRegistry(store)

    for offset, (owner, name, display) in enumerate(DEMO_PROJECTS):
        ref = ProjectRef(owner=owner, name=name, display_label=display)
        corpus, labels = generate_corpus(issues_per_project, seed=seed + offset)
        n_open = max(10, issues_per_project // 8)
        closed, open_part = corpus[:-n_open], corpus[-n_open:]

        tokens = [preprocess(i.title, i.body) for i in closed]
        tfidf = fit_tfidf(tokens, min_df=2)
        X = [transform(tfidf, t) for t in tokens]
        Y = build_label_matrix([i.labels for i in closed], labels)
        model = train(X, Y, labels, ForestHyperparams(seed=seed + offset))

        project_dir = out / name
        project_dir.mkdir(exist_ok=True)
        (project_dir / "forest.json").write_bytes(save_model(model))
        (project_dir / "tfidf.json").write_bytes(save_tfidf(tfidf))

        now = datetime.now(timezone.utc).replace(microsecond=0)
        snapshot = ProjectSnapshot(
            project=ref,
            fetched_at=now,
            issues=[
                Issue(
                    number=i.number,
                    title=i.title,
                    body=i.body,
                    state="open",
                    closed_at=None,
                    url=_issue_url(ref, i.number),
                )
                for i in open_part
            ],
            pulls=[],
            file_contents={},
        )
        save_snapshot(snapshot, project_dir / "snapshot.json")

        registered = registry.register(
            ref,
            model,
            tfidf,
            snapshot_path=project_dir / "snapshot.json",
        )
        classify_open_issues(registered, store)
        registry_entries.append(
            {
                "display_label": display,
                "owner": owner,
                "name": name,
                "snapshot": f"{name}/snapshot.json",
                "forest_model": f"{name}/forest.json",
                "tfidf_model": f"{name}/tfidf.json",
                "threshold": 0.5,
            }
        )

    registry_path = out / "registry.json"
    registry_path.write_text(json.dumps({"projects": registry_entries}, indent=2), "utf-8")
    return registry_path


def load_registry_file(path: str | Path, store: IssueStore) -> ProjectRegistry:
    """Rebuild an in-memory registry from a registry.json written by seed_demo
    (or by hand, same shape)."""
    registry_path = Path(path)
    doc = json.loads(registry_path.read_text("utf-8"))
    registry = ProjectRegistry(store)
    base = registry_path.parent
    for entry in doc["projects"]:
        ref = ProjectRef(
            owner=entry["owner"], name=entry["name"], display_label=entry["display_label"]
        )
        registry.register(
            ref,
            (base / entry["forest_model"]).read_bytes(),
            (base / entry["tfidf_model"]).read_bytes(),
            snapshot_path=base / entry["snapshot"] if entry.get("snapshot") else None,
            threshold=entry.get("threshold", 0.5),
        )
    return registry
