"""Exception types shared across the package.

Every error carries a short machine-readable kind (the class name) used by
the CLI to emit single-line diagnostics.
"""


class SensePrivError(Exception):
    """Base class for all package errors."""

    @property
    def kind(self) -> str:
        return type(self).__name__


class MalformedLine(SensePrivError):
    def __init__(self, line_no: int, detail: str = ""):
        self.line_no = line_no
        self.detail = detail
        super().__init__(f"line {line_no}: {detail}" if detail else f"line {line_no}")


class DimensionMismatch(SensePrivError):
    def __init__(self, found: int, expected: int):
        self.found = found
        self.expected = expected
        super().__init__(f"found dimension {found}, expected {expected}")


class DuplicateToken(SensePrivError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(token)


class EmptyFile(SensePrivError):
    pass


class EmptyStore(SensePrivError):
    pass


class UnknownToken(SensePrivError):
    def __init__(self, token: str):
        self.token = token
        super().__init__(token)


class SampleTooLarge(SensePrivError):
    def __init__(self, requested: int, available: int):
        self.requested = requested
        self.available = available
        super().__init__(f"requested {requested}, vocabulary holds {available}")


class IndexOutOfRange(SensePrivError):
    def __init__(self, index: int, length: int):
        self.index = index
        self.length = length
        super().__init__(f"index {index} outside sequence of length {length}")


class UnknownWord(SensePrivError):
    def __init__(self, word: str):
        self.word = word
        super().__init__(word)


class MissingInventory(SensePrivError):
    pass


class LengthMismatch(SensePrivError):
    def __init__(self, len_x: int, len_y: int):
        super().__init__(f"lengths differ: {len_x} vs {len_y}")


class DegenerateInput(SensePrivError):
    pass


class EmptyInput(SensePrivError):
    pass


class EmptyDatasetAfterFiltering(SensePrivError):
    pass


class NoFeasibleBudget(SensePrivError):
    pass
