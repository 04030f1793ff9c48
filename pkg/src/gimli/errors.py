"""Exception types shared across the package."""


class GimliError(Exception):
    """Base class for all package errors."""


# -- mining ----------------------------------------------------------------

class NetworkError(GimliError):
    def __init__(self, url: str, message: str):
        super().__init__(f"{message} ({url})")
        self.url = url


class RateLimited(NetworkError):
    pass


class AuthFailed(NetworkError):
    pass


# -- snapshot / model files ------------------------------------------------

class SchemaViolation(GimliError):
    """A persisted document does not match its schema.

    ``pointer`` is a JSON pointer to the offending field ("" = document root).
    """

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{message} (at {pointer or '/'})")
        self.pointer = pointer


class VersionMismatch(GimliError):
    def __init__(self, found, expected):
        super().__init__(f"unsupported schema_version {found!r}, expected {expected!r}")
        self.found = found
        self.expected = expected


# -- taxonomy --------------------------------------------------------------

class DuplicatePrefix(GimliError):
    def __init__(self, prefix: str, line: int):
        super().__init__(f"duplicate prefix {prefix!r} at line {line}")
        self.prefix = prefix
        self.line = line


class EmptyLabel(GimliError):
    def __init__(self, line: int, message: str = "empty label"):
        super().__init__(f"{message} at line {line}")
        self.line = line


class UnsupportedLanguage(GimliError):
    def __init__(self, language: str):
        super().__init__(f"unsupported language {language!r}")
        self.language = language


class MissingFileContent(GimliError):
    def __init__(self, path: str):
        super().__init__(f"snapshot has no content for linked source file {path!r}")
        self.path = path


# -- text pipeline ---------------------------------------------------------

class EmptyVocabulary(GimliError):
    pass


# -- forest ----------------------------------------------------------------

class DegenerateLabel(GimliError):
    def __init__(self, label: str, kind: str):
        super().__init__(f"label {label!r} is degenerate: column is {kind}")
        self.label = label
        self.kind = kind


class DimensionMismatch(GimliError):
    pass


# -- evaluation ------------------------------------------------------------

class TooFewSamples(GimliError):
    pass


class ShapeMismatch(GimliError):
    pass


# -- service ---------------------------------------------------------------

class UnknownProject(GimliError):
    def __init__(self, project: str):
        super().__init__(f"unknown project {project!r}")
        self.project = project


class UnknownLabel(GimliError):
    def __init__(self, label: str):
        super().__init__(f"unknown label {label!r}")
        self.label = label


class UnsupportedModel(GimliError):
    def __init__(self, model: str):
        super().__init__(f"unsupported model {model!r}")
        self.model = model


class DuplicateProject(GimliError):
    def __init__(self, project: str):
        super().__init__(f"project {project!r} is already registered")
        self.project = project


class ModelMissing(GimliError):
    pass


class ModelSchemaViolation(GimliError):
    pass


class StoreUnavailable(GimliError):
    pass
