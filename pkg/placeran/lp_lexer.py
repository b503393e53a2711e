from typing import Optional

from placeran.lp_tokens import Position, Token, TokenKind

# Section keywords of the LP dialect, matched case-insensitively
KEYWORDS = {
    "minimize": TokenKind.MINIMIZE,
    "minimise": TokenKind.MINIMIZE,
    "minimum": TokenKind.MINIMIZE,
    "min": TokenKind.MINIMIZE,
    "maximize": TokenKind.MAXIMIZE,
    "maximise": TokenKind.MAXIMIZE,
    "maximum": TokenKind.MAXIMIZE,
    "max": TokenKind.MAXIMIZE,
    "st": TokenKind.SUBJECT_TO,
    "s.t.": TokenKind.SUBJECT_TO,
    "bounds": TokenKind.BOUNDS,
    "bound": TokenKind.BOUNDS,
    "binaries": TokenKind.BINARIES,
    "binary": TokenKind.BINARIES,
    "bin": TokenKind.BINARIES,
    "generals": TokenKind.GENERALS,
    "general": TokenKind.GENERALS,
    "gen": TokenKind.GENERALS,
    "free": TokenKind.FREE,
    "end": TokenKind.END,
    "inf": TokenKind.INFINITY,
    "infinity": TokenKind.INFINITY,
}

# Two-word keywords: first word -> (second word, kind)
KEYWORD_PAIRS = {
    "subject": ("to", TokenKind.SUBJECT_TO),
    "such": ("that", TokenKind.SUBJECT_TO),
}

# Characters allowed inside names besides letters and digits
NAME_CHARS = set("_.[]{}()!#$%&,;?@'\"|~")


def is_whitespace(char: str) -> bool:
    """Returns whether the given character is whitespace or a newline"""
    return char in (" ", "\t", "\n", "\r")


def is_name_start(char: str) -> bool:
    return char.isalpha() or char in "_[]{}!#$%&?@'\"|~"


def is_name_char(char: str) -> bool:
    return char.isalnum() or char in NAME_CHARS


class Lexer:
    """Converts LP source text into a stream of `Token`s

    Args:
        source: The LP text to tokenize.

    Attributes:
        source: The text being tokenized.
        position: The lexer's position in the source string.
        line: The current line the lexer is on.
        column: The column number the lexer is on.
        start: Where the token being lexed starts.
        next: The next token in the token stream.
    """

    def __init__(self, source: str):
        self.source = source
        self.position = 0
        self.line = 1
        self.column = 1
        self.start = Position(1, 1)

        # The lexer stays one token ahead of the parser.
        self.next = self.lex_token()

    def advance(self) -> Optional[str]:
        """Advances a single position forward and returns the consumed char

        Returns:
            The character, or None at the end of the source string.
        """

        if self.position >= len(self.source):
            return None

        next_char = self.source[self.position]

        if next_char == "\n":
            self.line += 1
            self.column = 1
        else:
            self.column += 1

        self.position += 1

        return next_char

    def peek(self, offset: int = 0) -> Optional[str]:
        """Returns a character ahead of the lexer position without advancing"""

        index = self.position + offset
        if index >= len(self.source):
            return None

        return self.source[index]

    def consume(self, expected: str) -> bool:
        """Advances the lexer if the peeked character is equal to the expected one"""

        if self.peek() == expected:
            self.advance()
            return True

        return False

    def at_end(self) -> bool:
        return self.peek() is None

    def create_token(self, kind: TokenKind, value: Optional[str] = None) -> Token:
        return Token(kind, self.start, value)

    def skip_trivia(self):
        """Skips whitespace, `\\` line comments and `\\* ... *\\` block comments"""

        while not self.at_end():
            char = self.peek()
            if is_whitespace(char):
                self.advance()
            elif char == "\\" and self.peek(1) == "*":
                self.advance()
                self.advance()
                while not self.at_end() and not (self.peek() == "*" and self.peek(1) == "\\"):
                    self.advance()
                self.advance()
                self.advance()
            elif char == "\\":
                while self.peek() != "\n" and not self.at_end():
                    self.advance()
            else:
                return

    def lex_number(self, first_char: str) -> Token:
        """Lexes an integer or decimal number with an optional exponent"""

        value = first_char

        while not self.at_end() and self.peek().isdigit():
            value += self.advance()

        if self.peek() == "." and first_char != ".":
            value += self.advance()
        while not self.at_end() and self.peek().isdigit():
            value += self.advance()

        if self.peek() in ("e", "E"):
            sign = self.peek(1)
            digit = self.peek(2) if sign in ("+", "-") else sign
            if digit is not None and digit.isdigit():
                value += self.advance()
                if sign in ("+", "-"):
                    value += self.advance()
                while not self.at_end() and self.peek().isdigit():
                    value += self.advance()

        if value == ".":
            return self.create_token(TokenKind.ERROR, "Expected digits after '.'")

        return self.create_token(TokenKind.NUMBER, value)

    def lex_name(self, first_char: str) -> Token:
        """Lexes a name, a keyword or a two-word keyword"""

        value = first_char

        while not self.at_end() and is_name_char(self.peek()):
            value += self.advance()

        lowered = value.lower()
        if lowered in KEYWORD_PAIRS:
            second, kind = KEYWORD_PAIRS[lowered]
            saved = (self.position, self.line, self.column)
            while self.peek() in (" ", "\t"):
                self.advance()
            word = ""
            while not self.at_end() and self.peek().isalpha():
                word += self.advance()
            if word.lower() == second:
                return self.create_token(kind, f"{value} {word}")
            self.position, self.line, self.column = saved

        return self.create_token(KEYWORDS.get(lowered, TokenKind.IDENT), value)

    def lex_token(self) -> Token:
        """Returns the next `Token` in the token stream"""

        self.skip_trivia()
        self.start = Position(self.line, self.column)

        next_char = self.advance()
        if next_char is None:
            return self.create_token(TokenKind.EOF)

        if next_char == ":":
            return self.create_token(TokenKind.COLON)
        elif next_char == "+":
            return self.create_token(TokenKind.PLUS)
        elif next_char == "-":
            return self.create_token(TokenKind.MINUS)

        # Relations, with the `=<` and `=>` spellings and strict forms read as non-strict
        elif next_char == "<":
            self.consume("=")
            return self.create_token(TokenKind.LESS_EQUAL)
        elif next_char == ">":
            self.consume("=")
            return self.create_token(TokenKind.GREATER_EQUAL)
        elif next_char == "=":
            if self.consume("<"):
                return self.create_token(TokenKind.LESS_EQUAL)
            if self.consume(">"):
                return self.create_token(TokenKind.GREATER_EQUAL)
            return self.create_token(TokenKind.EQUAL)

        elif next_char.isdigit() or (next_char == "." and (self.peek() or "").isdigit()):
            return self.lex_number(next_char)

        elif is_name_start(next_char):
            return self.lex_name(next_char)

        return self.create_token(TokenKind.ERROR, f"Unknown character {next_char} found")

    def next_token(self) -> Token:
        """Returns the current token and lexes the next one"""

        current = self.next
        self.next = self.lex_token()

        return current
