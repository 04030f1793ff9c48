"""Shared fixtures: hand-built snapshots and a recorded-response transport."""

from __future__ import annotations

from datetime import datetime, timezone

import pytest

from gimli.mining import HttpResponse
from gimli.snapshot import Issue, ProjectRef, ProjectSnapshot, PullRequest

UTC = timezone.utc


def ts(year=2024, month=1, day=1, hour=12, minute=0, second=0):
    return datetime(year, month, day, hour, minute, second, tzinfo=UTC)


def make_issue(number, state="closed", title="", body="", comments=None):
    return Issue(
        number=number,
        title=title or f"issue {number}",
        body=body,
        state=state,
        closed_at=ts(day=min(number, 28)) if state == "closed" else None,
        url=f"https://github.com/acme/widget/issues/{number}",
        comments=comments or [],
    )


def make_pull(number, merged=True, title="", body="", files=None, commits=None):
    return PullRequest(
        number=number,
        title=title,
        body=body,
        merged=merged,
        changed_files=files or [],
        commit_messages=commits or [],
    )


@pytest.fixture
def project():
    return ProjectRef(owner="acme", name="widget", display_label="Widget")


@pytest.fixture
def snapshot_factory(project):
    def build(issues=(), pulls=(), file_contents=None, ref=None):
        return ProjectSnapshot(
            project=ref or project,
            fetched_at=ts(),
            issues=list(issues),
            pulls=list(pulls),
            file_contents=dict(file_contents or {}),
        )

    return build


class FixtureTransport:
    """Replays recorded responses keyed by (url, page); records every call."""

    def __init__(self):
        self.routes: dict[tuple[str, int], HttpResponse] = {}
        self.calls: list[tuple[str, dict]] = []

    def add_pages(self, url: str, pages: list[list], status: int = 200):
        for i, body in enumerate(pages, start=1):
            self.routes[(url, i)] = HttpResponse(status, {}, body)

    def add(self, url: str, body, status: int = 200, headers=None, page: int = 1):
        self.routes[(url, page)] = HttpResponse(status, dict(headers or {}), body)

    def add_sequence(self, url: str, responses: list[HttpResponse], page: int = 1):
        self.routes[(url, page)] = list(responses)

    def request(self, url: str, params: dict, headers: dict) -> HttpResponse:
        self.calls.append((url, dict(params)))
        self.last_headers = dict(headers)
        page = int(params.get("page", 1))
        entry = self.routes.get((url, page))
        if entry is None:
            return HttpResponse(200, {}, [])
        if isinstance(entry, list):  # sequence: pop until one left
            response = entry.pop(0) if len(entry) > 1 else entry[0]
            return response
        return entry


@pytest.fixture
def transport():
    return FixtureTransport()
