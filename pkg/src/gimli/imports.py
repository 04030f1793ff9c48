"""Import/using/include extraction from Java, C#, and C++ source text.

Line-oriented lexing with comment-state tracking rather than full grammars:
comments are blanked out (strings preserved, line structure kept), then each
line is matched against the language's import form anchored at line start.
Malformed lines are skipped, never fatal.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import UnsupportedLanguage

LANGUAGES = ("java", "csharp", "cpp")

# Extensions fetched by the miner and parsed here.
SOURCE_EXTENSIONS = {
    ".java": "java",
    ".cs": "csharp",
    ".cpp": "cpp",
    ".cc": "cpp",
    ".cxx": "cpp",
    ".h": "cpp",
    ".hpp": "cpp",
}


@dataclass(frozen=True)
class ApiImport:
    raw_statement: str
    qualified_name: str
    language: str


def language_for_path(path: str) -> str | None:
    dot = path.rfind(".")
    if dot == -1:
        return None
    return SOURCE_EXTENSIONS.get(path[dot:].lower())


def _blank_comments(content: str) -> str:
    """Replace // and /* */ comment text with spaces, keeping newlines.

    String and char literals are preserved so quoted include paths survive;
    the same C-family scanner covers all three languages.
    """
    out = list(content)
    n = len(content)
    i = 0
    state = "code"  # code | line | block | dquote | squote
    while i < n:
        ch = content[i]
        if state == "code":
            if ch == "/" and i + 1 < n and content[i + 1] == "/":
                out[i] = out[i + 1] = " "
                state = "line"
                i += 2
                continue
            if ch == "/" and i + 1 < n and content[i + 1] == "*":
                out[i] = out[i + 1] = " "
                state = "block"
                i += 2
                continue
            if ch == '"':
                state = "dquote"
            elif ch == "'":
                state = "squote"
            i += 1
        elif state == "line":
            if ch == "\n":
                state = "code"
            else:
                out[i] = " "
            i += 1
        elif state == "block":
            if ch == "*" and i + 1 < n and content[i + 1] == "/":
                out[i] = out[i + 1] = " "
                state = "code"
                i += 2
                continue
            if ch != "\n":
                out[i] = " "
            i += 1
        elif state == "dquote":
            if ch == "\\" and i + 1 < n:
                i += 2
                continue
            if ch == '"' or ch == "\n":
                state = "code"
            i += 1
        else:  # squote
            if ch == "\\" and i + 1 < n:
                i += 2
                continue
            if ch == "'" or ch == "\n":
                state = "code"
            i += 1
    return "".join(out)


_JAVA_IMPORT = re.compile(
    r"^\s*(import\s+(?:static\s+)?"
    r"([A-Za-z_$][\w$]*(?:\.[A-Za-z_$][\w$]*)*(?:\.\*)?)\s*;)"
)

# `using (resource)` statements and C# 8 `using var x = ...` declarations
# are not imports.
_CSHARP_NOT_IMPORT = re.compile(r"^\s*(?:await\s+)?using\s*(?:\(|var\s)")
_CSHARP_USING = re.compile(
    r"^\s*((?:global\s+)?using\s+(?:static\s+)?"
    r"(?:[A-Za-z_][\w]*\s*=\s*)?(?:global::)?"
    r"([A-Za-z_][\w]*(?:\.[A-Za-z_][\w]*)*)\s*;)"
)

_CPP_INCLUDE = re.compile(r'^\s*(#\s*include\s*(?:<([^<>\n]+)>|"([^"\n]+)"))')


def _strip_separators(name: str) -> str:
    return name.strip("./")


def extract_imports(content: str, language: str) -> list[ApiImport]:
    """All import statements in file order, duplicates preserved."""
    if language not in LANGUAGES:
        raise UnsupportedLanguage(language)
    result = []
    cleaned = _blank_comments(content)
    # raw_statement is sliced from the original line so it is always a
    # verbatim substring of the content, even with comments on the line
    for line, raw_line in zip(cleaned.split("\n"), content.split("\n")):
        if language == "java":
            m = _JAVA_IMPORT.match(line)
            if m:
                name = m.group(2)
                if name.endswith(".*"):
                    name = name[:-2]
                name = _strip_separators(name)
                if name:
                    raw = raw_line[m.start(1) : m.end(1)]
                    result.append(ApiImport(raw, name, language))
        elif language == "csharp":
            if _CSHARP_NOT_IMPORT.match(line):
                continue
            m = _CSHARP_USING.match(line)
            if m:
                name = _strip_separators(m.group(2))
                if name:
                    raw = raw_line[m.start(1) : m.end(1)]
                    result.append(ApiImport(raw, name, language))
        else:
            m = _CPP_INCLUDE.match(line)
            if m:
                name = _strip_separators(m.group(2) or m.group(3))
                if name:
                    raw = raw_line[m.start(1) : m.end(1)]
                    result.append(ApiImport(raw, name, language))
    return result
