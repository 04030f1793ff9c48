import pytest
from hypothesis import given, strategies as st

from gimli.errors import DuplicatePrefix, EmptyLabel, MissingFileContent
from gimli.imports import ApiImport
from gimli.links import IssuePrLink, LinkedDataset
from gimli.taxonomy import (
    ApiTaxonomy,
    label_for_name,
    labels_for_dataset,
    load_reference_taxonomy,
    load_taxonomy,
    map_to_domains,
)

from conftest import make_issue


def imp(name, language="java"):
    return ApiImport(raw_statement=f"import {name};", qualified_name=name, language=language)


def write_csv(tmp_path, text):
    path = tmp_path / "tax.csv"
    path.write_text(text)
    return path


def test_load_two_rows(tmp_path):
    tax = load_taxonomy(write_csv(tmp_path, "prefix,label\njava.sql,DB\njavax.swing,UI\n"))
    assert tax.entries == {"java.sql": "DB", "javax.swing": "UI"}
    assert tax.label_universe == ("DB", "UI")


def test_universe_keeps_first_appearance_order(tmp_path):
    tax = load_taxonomy(
        write_csv(tmp_path, "prefix,label\nb,Second\na,First\nc,Second\n")
    )
    assert tax.label_universe == ("Second", "First")


def test_duplicate_prefix_reports_line(tmp_path):
    with pytest.raises(DuplicatePrefix) as err:
        load_taxonomy(write_csv(tmp_path, "prefix,label\njava.sql,DB\njava.sql,IO\n"))
    assert err.value.line == 3
    assert err.value.prefix == "java.sql"


def test_empty_label_reports_line(tmp_path):
    with pytest.raises(EmptyLabel) as err:
        load_taxonomy(write_csv(tmp_path, "prefix,label\njava.sql,\n"))
    assert err.value.line == 2


def test_comment_lines_and_blanks_allowed(tmp_path):
    tax = load_taxonomy(
        write_csv(tmp_path, "# comment\n\nprefix,label\n# another\njava.sql,DB\n")
    )
    assert tax.entries == {"java.sql": "DB"}


def test_missing_header_rejected(tmp_path):
    with pytest.raises(EmptyLabel):
        load_taxonomy(write_csv(tmp_path, "java.sql,DB\n"))


def test_label_with_comma_rejected(tmp_path):
    with pytest.raises(EmptyLabel):
        load_taxonomy(write_csv(tmp_path, 'prefix,label\njava.sql,"DB, stuff"\n'))


def test_reference_taxonomy_has_31_labels():
    tax = load_reference_taxonomy()
    assert len(tax.label_universe) == 31
    for expected in ("User Interface", "Databases", "Utility", "Application"):
        assert expected in tax.label_universe


def test_map_single_import():
    tax = ApiTaxonomy(entries={"java.sql": "DB"}, label_universe=("DB",))
    assert map_to_domains([imp("java.sql.Connection")], tax) == {"DB"}


def test_map_empty_imports():
    tax = ApiTaxonomy(entries={"java.sql": "DB"}, label_universe=("DB",))
    assert map_to_domains([], tax) == frozenset()


def test_longest_prefix_wins():
    tax = ApiTaxonomy(
        entries={"java.sql": "DB", "javax.swing": "UI", "javax": "Utility"},
        label_universe=("DB", "UI", "Utility"),
    )
    got = map_to_domains(
        [imp("java.sql.Connection"), imp("javax.swing.JPanel"), imp("org.unknown.X")],
        tax,
    )
    # javax.swing beats javax by length; org.unknown matches nothing
    assert got == {"DB", "UI"}


def test_separator_alignment():
    tax = ApiTaxonomy(entries={"java.sql": "DB"}, label_universe=("DB",))
    assert label_for_name(tax, "java.sqlx.Thing") is None
    assert label_for_name(tax, "java.sql") == "DB"
    assert label_for_name(tax, "java.sql.Connection") == "DB"


def test_slash_separator_for_include_paths():
    tax = ApiTaxonomy(entries={"QtWidgets": "UI"}, label_universe=("UI",))
    assert label_for_name(tax, "QtWidgets/QApplication") == "UI"
    assert label_for_name(tax, "QtWidgetsX/Other") is None


@given(
    st.lists(st.sampled_from(["java.sql.A", "javax.swing.B", "org.x.C", "java.io.D"]), max_size=8),
    st.lists(st.sampled_from(["java.sql.A", "javax.swing.B", "org.x.C", "java.io.D"]), max_size=8),
)
def test_map_is_monotone(base, extra):
    tax = ApiTaxonomy(
        entries={"java.sql": "DB", "javax.swing": "UI", "java.io": "IO"},
        label_universe=("DB", "UI", "IO"),
    )
    before = map_to_domains([imp(n) for n in base], tax)
    after = map_to_domains([imp(n) for n in base + extra], tax)
    assert before <= after


# -- labels_for_dataset --------------------------------------------------------


def _linked(snapshot_factory, files_by_issue, contents):
    issues = [make_issue(n) for n in files_by_issue]
    snapshot = snapshot_factory(issues=issues, file_contents=contents)
    dataset = LinkedDataset(
        project=snapshot.project,
        examples=[
            (
                issue,
                [IssuePrLink(issue.number, 100 + issue.number, "hash_ref_title",
                             tuple(files_by_issue[issue.number]))],
            )
            for issue in issues
        ],
    )
    return dataset, snapshot


def test_labels_for_dataset_composition(snapshot_factory):
    tax = ApiTaxonomy(
        entries={"java.sql": "DB", "javax.swing": "UI", "QtCore": "Core"},
        label_universe=("DB", "UI", "Core"),
    )
    dataset, snapshot = _linked(
        snapshot_factory,
        {1: ["src/A.java"], 2: ["src/B.java", "ui/C.cpp"], 3: ["src/D.java"]},
        {
            "src/A.java": "import java.sql.Connection;",
            "src/B.java": "import java.sql.Driver;\nimport javax.swing.JPanel;",
            "ui/C.cpp": "#include <QtCore/QTimer>",
            "src/D.java": "import org.nothing.Known;",
        },
    )
    labeled = labels_for_dataset(dataset, snapshot, tax)
    by_number = {issue.number: labels for issue, labels in labeled.examples}
    assert by_number == {1: {"DB"}, 2: {"DB", "UI", "Core"}}
    # issue 3 matched nothing in the taxonomy: dropped and counted
    assert labeled.dropped_zero_label == 1
    assert labeled.label_universe == tax.label_universe


def test_labels_for_dataset_missing_content(snapshot_factory):
    tax = ApiTaxonomy(entries={"java.sql": "DB"}, label_universe=("DB",))
    dataset, snapshot = _linked(snapshot_factory, {1: ["src/A.java"]}, {})
    with pytest.raises(MissingFileContent):
        labels_for_dataset(dataset, snapshot, tax)
