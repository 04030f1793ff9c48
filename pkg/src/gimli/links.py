"""Join merged pull requests to the closed issues they reference.

A reference is either ``#N`` in the PR title/body (N = 1-9 digits, preceded
by nothing, whitespace, or one of ``([{:,;.!?-``) or an issue URL for the
same project. A link enters the dataset only when the referenced issue
exists and is closed, and the PR touched at least one whitelisted source
file; docs-only PRs never contribute.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .snapshot import Issue, ProjectRef, ProjectSnapshot

# evidence kinds, in the priority order used when several match
EVIDENCE_KINDS = ("hash_ref_title", "hash_ref_body", "url_ref_title", "url_ref_body")

_ALLOWED_BEFORE = set(" \t\r\n([{:,;.!?-")

_HASH_REF = re.compile(r"#(\d{1,9})(?!\d)")


def _hash_refs(text: str) -> set[int]:
    refs = set()
    for m in _HASH_REF.finditer(text):
        before = text[m.start() - 1] if m.start() > 0 else None
        if before is None or before in _ALLOWED_BEFORE:
            refs.add(int(m.group(1)))
    return refs


def _url_refs(text: str, project: ProjectRef) -> set[int]:
    pattern = re.compile(
        r"https://github\.com/"
        + re.escape(project.owner)
        + "/"
        + re.escape(project.name)
        + r"/issues/(\d{1,9})",
        re.IGNORECASE,
    )
    return {int(m.group(1)) for m in pattern.finditer(text)}


def extract_issue_refs(text: str, project: ProjectRef) -> set[int]:
    """Issue numbers referenced by ``#N`` tokens or project issue URLs."""
    return _hash_refs(text) | _url_refs(text, project)


@dataclass(frozen=True)
class IssuePrLink:
    issue_number: int
    pr_number: int
    evidence: str  # one of EVIDENCE_KINDS
    source_files: tuple[str, ...]

    def __post_init__(self):
        if self.evidence not in EVIDENCE_KINDS:
            raise ValueError(f"bad evidence kind {self.evidence!r}")


@dataclass(frozen=True)
class LinkSummary:
    merged_prs: int
    admitted_links: int
    dangling_refs: int
    docs_only_exclusions: int
    open_issue_refs: int = 0

    def to_dict(self) -> dict:
        return {
            "merged_prs": self.merged_prs,
            "admitted_links": self.admitted_links,
            "dangling_refs": self.dangling_refs,
            "docs_only_exclusions": self.docs_only_exclusions,
            "open_issue_refs": self.open_issue_refs,
        }


@dataclass
class LinkedDataset:
    project: ProjectRef
    examples: list[tuple[Issue, list[IssuePrLink]]]
    summary: LinkSummary = field(default_factory=lambda: LinkSummary(0, 0, 0, 0))


def _source_files(pr_files: list[str], extensions: tuple[str, ...]) -> tuple[str, ...]:
    return tuple(
        f for f in pr_files if any(f.lower().endswith(ext) for ext in extensions)
    )


def build_links(snapshot: ProjectSnapshot) -> LinkedDataset:
    """Scan merged PRs for issue references and assemble the linked dataset.

    Issues referenced by several PRs aggregate all their links; dangling
    references and docs-only exclusions are counted in the summary, never
    fatal.
    """
    issues = snapshot.issue_by_number()
    by_issue: dict[int, list[IssuePrLink]] = {}
    merged_prs = dangling = docs_only = open_refs = 0

    for pr in snapshot.pulls:
        if not pr.merged:
            continue
        merged_prs += 1
        sources = _source_files(pr.changed_files, snapshot.source_extensions)
        evidence_for: dict[int, str] = {}
        for kind, numbers in (
            ("hash_ref_title", _hash_refs(pr.title)),
            ("hash_ref_body", _hash_refs(pr.body)),
            ("url_ref_title", _url_refs(pr.title, snapshot.project)),
            ("url_ref_body", _url_refs(pr.body, snapshot.project)),
        ):
            for n in numbers:
                evidence_for.setdefault(n, kind)
        for number, evidence in sorted(evidence_for.items()):
            if number == pr.number:  # self-reference
                continue
            issue = issues.get(number)
            if issue is None:
                dangling += 1
                continue
            if issue.state != "closed":
                open_refs += 1
                continue
            if not sources:
                docs_only += 1
                continue
            by_issue.setdefault(number, []).append(
                IssuePrLink(number, pr.number, evidence, sources)
            )

    examples = [(issues[n], links) for n, links in sorted(by_issue.items())]
    summary = LinkSummary(
        merged_prs=merged_prs,
        admitted_links=sum(len(links) for _, links in examples),
        dangling_refs=dangling,
        docs_only_exclusions=docs_only,
        open_issue_refs=open_refs,
    )
    return LinkedDataset(project=snapshot.project, examples=examples, summary=summary)
