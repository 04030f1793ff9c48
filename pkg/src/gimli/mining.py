"""REST client for mining a project's issues and pull requests.

Downstream stages are offline-first: this module's job is to produce a
``ProjectSnapshot`` once, live or from recorded fixtures. All requests,
across any number of concurrently mined projects, pass through one shared
rate-limit gate; rate-limit responses are retried with exponential backoff
(honoring Retry-After) at most 5 times.
"""

from __future__ import annotations

import base64
import os
import threading
import time
from dataclasses import dataclass, field
from datetime import datetime, timezone
from typing import Callable, Protocol

import requests

from .errors import AuthFailed, NetworkError, RateLimited
from .snapshot import (
    DEFAULT_SOURCE_EXTENSIONS,
    Issue,
    ProjectRef,
    ProjectSnapshot,
    PullRequest,
    parse_timestamp,
)

API_ROOT = "https://api.github.com"
TOKEN_ENV_VAR = "GIMLI_TOKEN"
MAX_RETRIES = 5
BACKOFF_BASE_SECONDS = 1.0


@dataclass
class HttpResponse:
    status: int
    headers: dict[str, str]
    body: object  # decoded JSON

    def header(self, name: str, default: str | None = None) -> str | None:
        for key, value in self.headers.items():
            if key.lower() == name.lower():
                return value
        return default


class Transport(Protocol):
    """Pluggable HTTP layer; tests substitute recorded fixtures."""

    def request(self, url: str, params: dict, headers: dict) -> HttpResponse: ...


class RequestsTransport:
    def __init__(self, timeout: float = 30.0):
        self._session = requests.Session()
        self._timeout = timeout

    def request(self, url: str, params: dict, headers: dict) -> HttpResponse:
        try:
            resp = self._session.get(url, params=params, headers=headers, timeout=self._timeout)
        except requests.RequestException as exc:
            raise NetworkError(url, f"request failed: {exc}") from exc
        body = None
        if resp.content:
            try:
                body = resp.json()
            except ValueError as exc:
                raise NetworkError(url, f"response is not JSON: {exc}") from exc
        return HttpResponse(resp.status_code, dict(resp.headers), body)


class RateBudget:
    """Shared gate: serializes request admission across client threads."""

    def __init__(self, min_interval: float = 0.0, sleep: Callable[[float], None] = time.sleep):
        self._lock = threading.Lock()
        self._sleep = sleep
        self._min_interval = min_interval
        self._last = 0.0

    def acquire(self) -> None:
        with self._lock:
            if self._min_interval > 0:
                wait = self._last + self._min_interval - time.monotonic()
                if wait > 0:
                    self._sleep(wait)
                self._last = time.monotonic()


_default_budget = RateBudget()


def _is_rate_limited(resp: HttpResponse) -> bool:
    if resp.status == 429:
        return True
    # 403 doubles as auth failure and primary/secondary rate limiting
    return resp.status == 403 and (
        resp.header("Retry-After") is not None
        or resp.header("X-RateLimit-Remaining") == "0"
    )


class GitHubClient:
    def __init__(
        self,
        token: str | None = None,
        transport: Transport | None = None,
        page_size: int = 100,
        budget: RateBudget | None = None,
        sleep: Callable[[float], None] = time.sleep,
    ):
        self.token = token if token is not None else os.environ.get(TOKEN_ENV_VAR)
        self.transport = transport or RequestsTransport()
        self.page_size = page_size
        self.budget = budget or _default_budget
        self._sleep = sleep

    def _headers(self) -> dict[str, str]:
        headers = {"Accept": "application/vnd.github.v3+json"}
        if self.token:
            headers["Authorization"] = f"token {self.token}"
        return headers

    def _get(self, url: str, params: dict | None = None) -> HttpResponse:
        params = params or {}
        for attempt in range(MAX_RETRIES + 1):
            self.budget.acquire()
            resp = self.transport.request(url, params, self._headers())
            if _is_rate_limited(resp):
                if attempt == MAX_RETRIES:
                    raise RateLimited(url, f"rate limited after {MAX_RETRIES} retries")
                retry_after = resp.header("Retry-After")
                if retry_after is not None:
                    delay = float(retry_after)
                else:
                    delay = BACKOFF_BASE_SECONDS * (2**attempt)
                self._sleep(delay)
                continue
            if resp.status in (401, 403):
                raise AuthFailed(url, f"authentication failed (HTTP {resp.status})")
            if resp.status == 404:
                return resp
            if resp.status >= 400:
                raise NetworkError(url, f"HTTP {resp.status}")
            return resp
        raise RateLimited(url, "retry loop exhausted")  # pragma: no cover

    def _paginate(self, url: str, params: dict | None = None) -> list:
        """Collect all pages of a list endpoint."""
        items: list = []
        page = 1
        base = dict(params or {})
        while True:
            merged = {**base, "per_page": self.page_size, "page": page}
            resp = self._get(url, merged)
            batch = resp.body or []
            if not isinstance(batch, list):
                raise NetworkError(url, "expected a JSON array")
            items.extend(batch)
            if len(batch) < self.page_size:
                return items
            page += 1

    # -- issues --------------------------------------------------------

    def fetch_issues(
        self, project: ProjectRef, include_comments: bool = False
    ) -> list[Issue]:
        """All issues (open and closed), ascending number.

        The issues endpoint interleaves pull requests; those are dropped
        here and fetched separately.
        """
        url = f"{API_ROOT}/repos/{project.owner}/{project.name}/issues"
        raw = self._paginate(url, {"state": "all"})
        issues = []
        for item in raw:
            if "pull_request" in item:
                continue
            number = item["number"]
            comments: list[str] = []
            if include_comments and item.get("comments", 0):
                comments = self._fetch_comment_bodies(project, number)
            closed_raw = item.get("closed_at")
            issues.append(
                Issue(
                    number=number,
                    title=item.get("title") or "",
                    body=item.get("body") or "",
                    state=item["state"],
                    closed_at=_parse_github_time(closed_raw) if closed_raw else None,
                    url=item.get("html_url") or "",
                    comments=comments,
                )
            )
        issues.sort(key=lambda i: i.number)
        return issues

    def _fetch_comment_bodies(self, project: ProjectRef, number: int) -> list[str]:
        url = f"{API_ROOT}/repos/{project.owner}/{project.name}/issues/{number}/comments"
        return [c.get("body") or "" for c in self._paginate(url)]

    # -- pull requests ---------------------------------------------------

    def fetch_pulls(
        self, project: ProjectRef, include_commit_messages: bool = True
    ) -> list[PullRequest]:
        url = f"{API_ROOT}/repos/{project.owner}/{project.name}/pulls"
        raw = self._paginate(url, {"state": "all"})
        pulls = []
        for item in raw:
            number = item["number"]
            files_url = f"{url}/{number}/files"
            changed = [f["filename"] for f in self._paginate(files_url)]
            commit_messages: list[str] = []
            if include_commit_messages:
                commits_url = f"{url}/{number}/commits"
                commit_messages = [
                    c.get("commit", {}).get("message") or ""
                    for c in self._paginate(commits_url)
                ]
            pulls.append(
                PullRequest(
                    number=number,
                    title=item.get("title") or "",
                    body=item.get("body") or "",
                    merged=item.get("merged_at") is not None,
                    changed_files=changed,
                    commit_messages=commit_messages,
                )
            )
        pulls.sort(key=lambda p: p.number)
        return pulls

    # -- file contents ---------------------------------------------------

    def fetch_file_content(self, project: ProjectRef, path: str) -> str:
        """Current content of a repository file; empty string if deleted."""
        url = f"{API_ROOT}/repos/{project.owner}/{project.name}/contents/{path}"
        resp = self._get(url)
        if resp.status == 404 or resp.body is None:
            return ""
        body = resp.body
        if isinstance(body, dict) and body.get("encoding") == "base64":
            return base64.b64decode(body.get("content", "")).decode("utf-8", "replace")
        if isinstance(body, dict):
            return body.get("content") or ""
        return ""

    # -- orchestration ---------------------------------------------------

    def mine_snapshot(
        self,
        project: ProjectRef,
        source_extensions: tuple[str, ...] = DEFAULT_SOURCE_EXTENSIONS,
        include_comments: bool = False,
    ) -> ProjectSnapshot:
        """Fetch everything the pipeline needs into one snapshot.

        Every changed file matching the source-extension whitelist gets a
        file_contents entry, empty if the file no longer exists.
        """
        issues = self.fetch_issues(project, include_comments=include_comments)
        pulls = self.fetch_pulls(project)
        wanted = sorted(
            {
                path
                for pr in pulls
                for path in pr.changed_files
                if any(path.lower().endswith(ext) for ext in source_extensions)
            }
        )
        contents = {path: self.fetch_file_content(project, path) for path in wanted}
        return ProjectSnapshot(
            project=project,
            fetched_at=datetime.now(timezone.utc).replace(microsecond=0),
            issues=issues,
            pulls=pulls,
            file_contents=contents,
            source_extensions=tuple(source_extensions),
        )


def _parse_github_time(raw: str) -> datetime:
    # the API emits the same second-precision Z-suffixed format we persist
    return parse_timestamp(raw)
