"""Token kinds and tokens of the CPLEX LP subset the exporter writes"""

from enum import Enum
from typing import NamedTuple, Optional


class TokenKind(Enum):
    # Single character tokens
    COLON = ":"
    PLUS = "+"
    MINUS = "-"

    # Relation tokens
    LESS_EQUAL = "<="
    GREATER_EQUAL = ">="
    EQUAL = "="

    # Literals
    NUMBER = "NUMBER"
    INFINITY = "inf"

    # Identifiers (variable and row names)
    IDENT = "IDENTIFIER"

    # Section keywords
    MINIMIZE = "minimize"
    MAXIMIZE = "maximize"
    SUBJECT_TO = "subject to"
    BOUNDS = "bounds"
    BINARIES = "binaries"
    GENERALS = "generals"
    FREE = "free"
    END = "end"

    # Misc
    ERROR = "error"
    EOF = "End of File"


SECTION_KINDS = (
    TokenKind.MINIMIZE,
    TokenKind.MAXIMIZE,
    TokenKind.SUBJECT_TO,
    TokenKind.BOUNDS,
    TokenKind.BINARIES,
    TokenKind.GENERALS,
    TokenKind.END,
)

RELATION_KINDS = (TokenKind.LESS_EQUAL, TokenKind.GREATER_EQUAL, TokenKind.EQUAL)


class Position(NamedTuple):
    line: int
    column: int


class Token(NamedTuple):
    """A lexeme and where it starts

    `text` is only kept for names, numbers and error messages. Keywords and
    operators read back as their canonical spelling.
    """

    kind: TokenKind
    position: Position
    text: Optional[str] = None

    @property
    def value(self) -> str:
        return self.text or self.kind.value

    @property
    def line(self) -> int:
        return self.position.line

    @property
    def column(self) -> int:
        return self.position.column

    def __str__(self):
        return self.value
