import base64
import json
from pathlib import Path

import pytest
from hypothesis import given, settings, strategies as st

from gimli.errors import AuthFailed, NetworkError, RateLimited
from gimli.mining import GitHubClient, HttpResponse, RateBudget, RequestsTransport

FIXTURES = Path(__file__).parent / "fixtures" / "http"
ISSUES_URL = "https://api.github.com/repos/acme/widget/issues"
PULLS_URL = "https://api.github.com/repos/acme/widget/pulls"


def client(transport, **kwargs):
    kwargs.setdefault("token", None)
    kwargs.setdefault("sleep", lambda _: None)
    return GitHubClient(transport=transport, **kwargs)


def fixture_pages():
    return [json.loads((FIXTURES / f"issues_page{i}.json").read_text()) for i in (1, 2, 3)]


def test_three_page_fixture_yields_all_issues(transport, project):
    pages = fixture_pages()
    oracle_count = sum(len(p) for p in pages)  # count objects in the files
    transport.add_pages(ISSUES_URL, pages)
    issues = client(transport).fetch_issues(project)
    assert len(issues) == oracle_count == 237
    numbers = [i.number for i in issues]
    assert numbers == sorted(numbers)
    assert len(set(numbers)) == len(numbers)  # strictly ascending
    assert issues[4].body == ""  # null body normalized (issue 5 has body null)


def test_zero_issues(transport, project):
    transport.add_pages(ISSUES_URL, [[]])
    assert client(transport).fetch_issues(project) == []


def test_pull_request_items_excluded(transport, project):
    items = [
        {"number": 4, "title": "i4", "body": "", "state": "open",
         "closed_at": None, "html_url": "u4"},
        {"number": 5, "title": "pr", "body": "", "state": "open",
         "closed_at": None, "html_url": "u5", "pull_request": {"url": "x"}},
        {"number": 6, "title": "i6", "body": "", "state": "open",
         "closed_at": None, "html_url": "u6"},
    ]
    transport.add_pages(ISSUES_URL, [items])
    issues = client(transport).fetch_issues(project)
    assert [i.number for i in issues] == [4, 6]


def test_fetch_is_idempotent_on_fixture(transport, project):
    transport.add_pages(ISSUES_URL, fixture_pages())
    c = client(transport)
    assert c.fetch_issues(project) == c.fetch_issues(project)


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=230), st.integers(min_value=1, max_value=100))
def test_pagination_completeness(n_items, page_size):
    from conftest import FixtureTransport

    transport = FixtureTransport()
    items = [
        {"number": k + 1, "title": f"i{k}", "body": "", "state": "open",
         "closed_at": None, "html_url": ""}
        for k in range(n_items)
    ]
    pages = [items[i : i + page_size] for i in range(0, len(items), page_size)] or [[]]
    transport.add_pages(ISSUES_URL, pages)
    issues = client(transport, page_size=page_size).fetch_issues(
        __import__("gimli.snapshot", fromlist=["ProjectRef"]).ProjectRef(
            "acme", "widget", "Widget"
        )
    )
    assert len(issues) == sum(len(p) for p in pages)


def test_pulls_with_files_and_commits(transport, project):
    pulls = []
    for n in range(1, 13):
        pulls.append(
            {
                "number": n,
                "title": f"pr {n}",
                "body": "",
                "merged_at": "2024-01-02T03:04:05Z" if n <= 3 else None,
                "state": "closed",
            }
        )
    transport.add_pages(PULLS_URL, [pulls])
    for n in range(1, 13):
        transport.add_pages(f"{PULLS_URL}/{n}/files", [[{"filename": "src/A.java"},
                                                        {"filename": "docs/x.md"}]])
        transport.add_pages(
            f"{PULLS_URL}/{n}/commits", [[{"commit": {"message": f"commit {n}"}}]]
        )
    result = client(transport).fetch_pulls(project)
    assert len(result) == 12
    assert sum(1 for p in result if p.merged) == 3  # manual count in fixture
    assert result[0].changed_files == ["src/A.java", "docs/x.md"]
    assert result[0].commit_messages == ["commit 1"]
    # unmerged closed PR
    assert result[5].merged is False


def test_rate_limit_retry_after_honored(transport, project):
    delays = []
    limited = HttpResponse(429, {"Retry-After": "3"}, None)
    ok = HttpResponse(200, {}, [])
    transport.add_sequence(ISSUES_URL, [limited, ok])
    c = client(transport, sleep=delays.append)
    assert c.fetch_issues(project) == []
    assert delays == [3.0]


def test_rate_limit_exhausts_after_five_retries(transport, project):
    delays = []
    transport.add(ISSUES_URL, None, status=429)
    with pytest.raises(RateLimited) as err:
        client(transport, sleep=delays.append).fetch_issues(project)
    assert len(delays) == 5
    assert delays == [1.0, 2.0, 4.0, 8.0, 16.0]  # exponential backoff
    assert err.value.url == ISSUES_URL


def test_403_with_remaining_zero_is_rate_limit(transport, project):
    limited = HttpResponse(403, {"X-RateLimit-Remaining": "0"}, None)
    ok = HttpResponse(200, {}, [])
    transport.add_sequence(ISSUES_URL, [limited, ok])
    assert client(transport).fetch_issues(project) == []


def test_plain_403_is_auth_failure(transport, project):
    transport.add(ISSUES_URL, {"message": "forbidden"}, status=403)
    with pytest.raises(AuthFailed) as err:
        client(transport).fetch_issues(project)
    assert err.value.url == ISSUES_URL


def test_401_is_auth_failure(transport, project):
    transport.add(ISSUES_URL, {"message": "bad credentials"}, status=401)
    with pytest.raises(AuthFailed):
        client(transport).fetch_issues(project)


def test_server_error_carries_url(transport, project):
    transport.add(ISSUES_URL, None, status=500)
    with pytest.raises(NetworkError) as err:
        client(transport).fetch_issues(project)
    assert err.value.url == ISSUES_URL


def test_connection_failure_wrapped():
    # unroutable localhost port; no external network involved
    t = RequestsTransport(timeout=0.2)
    with pytest.raises(NetworkError) as err:
        t.request("http://127.0.0.1:9/none", {}, {})
    assert "127.0.0.1" in err.value.url


def test_auth_header_sent_only_with_token(transport, project):
    transport.add_pages(ISSUES_URL, [[]])
    client(transport, token="sekrit").fetch_issues(project)
    assert transport.last_headers["Authorization"] == "token sekrit"
    client(transport, token=None).fetch_issues(project)
    assert "Authorization" not in transport.last_headers


def test_comment_bodies_fetched_when_asked(transport, project):
    items = [{"number": 1, "title": "t", "body": "", "state": "open",
              "closed_at": None, "html_url": "", "comments": 2}]
    transport.add_pages(ISSUES_URL, [items])
    transport.add_pages(
        f"{ISSUES_URL}/1/comments", [[{"body": "first"}, {"body": "second"}]]
    )
    issues = client(transport).fetch_issues(project, include_comments=True)
    assert issues[0].comments == ["first", "second"]
    transport.add_pages(ISSUES_URL, [items])
    issues = client(transport).fetch_issues(project, include_comments=False)
    assert issues[0].comments == []


def test_mine_snapshot_fetches_whitelisted_contents(transport, project):
    issues = [{"number": 1, "title": "t", "body": "", "state": "open",
               "closed_at": None, "html_url": ""}]
    pulls = [{"number": 2, "title": "pr", "body": "", "merged_at": "2024-01-02T03:04:05Z"}]
    transport.add_pages(ISSUES_URL, [issues])
    transport.add_pages(PULLS_URL, [pulls])
    transport.add_pages(
        f"{PULLS_URL}/2/files",
        [[{"filename": "src/A.java"}, {"filename": "README.md"}, {"filename": "old/B.cs"}]],
    )
    transport.add_pages(f"{PULLS_URL}/2/commits", [[]])
    java = base64.b64encode(b"import java.sql.C;").decode()
    transport.add(
        "https://api.github.com/repos/acme/widget/contents/src/A.java",
        {"encoding": "base64", "content": java},
    )
    transport.add(
        "https://api.github.com/repos/acme/widget/contents/old/B.cs",
        {"message": "Not Found"},
        status=404,
    )
    snapshot = client(transport).mine_snapshot(project)
    # every whitelisted changed file has an entry; deleted file maps to ""
    assert snapshot.file_contents == {
        "src/A.java": "import java.sql.C;",
        "old/B.cs": "",
    }
    assert snapshot.pulls[0].changed_files == ["src/A.java", "README.md", "old/B.cs"]


def test_budget_spaces_requests():
    waits = []
    budget = RateBudget(min_interval=0.5, sleep=waits.append)
    budget.acquire()
    budget.acquire()
    assert len(waits) == 1 and 0 < waits[0] <= 0.5
