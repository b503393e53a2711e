import pytest

from placeran.lp_lexer import Lexer
from placeran.lp_tokens import TokenKind


def _tokens(source):
    lexer = Lexer(source)
    tokens = []

    while lexer.next.kind != TokenKind.EOF:
        tokens.append(lexer.next_token())

    return tokens


@pytest.mark.parametrize(
    "data",
    [
        ("10", [TokenKind.NUMBER], "10"),
        ("1.5", [TokenKind.NUMBER], "1.5"),
        (".5", [TokenKind.NUMBER], ".5"),
        ("2e3", [TokenKind.NUMBER], "2e3"),
        ("1.5E-3", [TokenKind.NUMBER], "1.5E-3"),
        ("3e", [TokenKind.NUMBER, TokenKind.IDENT], "3e"),
        ("x_0_1", [TokenKind.IDENT], "x_0_1"),
        ("fix1_0", [TokenKind.IDENT], "fix1_0"),
        ("y_12_f2", [TokenKind.IDENT], "y_12_f2"),
    ],
)
def test_literals(data):
    tokens = _tokens(data[0])

    assert [token.kind for token in tokens] == data[1] and "".join(
        [token.value for token in tokens]
    ) == data[2]


@pytest.mark.parametrize(
    "data",
    [
        (":", [TokenKind.COLON]),
        ("+", [TokenKind.PLUS]),
        ("-", [TokenKind.MINUS]),
        ("<=", [TokenKind.LESS_EQUAL]),
        ("=<", [TokenKind.LESS_EQUAL]),
        ("<", [TokenKind.LESS_EQUAL]),
        (">=", [TokenKind.GREATER_EQUAL]),
        ("=>", [TokenKind.GREATER_EQUAL]),
        (">", [TokenKind.GREATER_EQUAL]),
        ("=", [TokenKind.EQUAL]),
        ("- -", [TokenKind.MINUS, TokenKind.MINUS]),
    ],
)
def test_operators(data):
    assert [token.kind for token in _tokens(data[0])] == data[1]


@pytest.mark.parametrize(
    "data",
    [
        ("Minimize", [TokenKind.MINIMIZE]),
        ("min", [TokenKind.MINIMIZE]),
        ("MAXIMIZE", [TokenKind.MAXIMIZE]),
        ("Subject To", [TokenKind.SUBJECT_TO]),
        ("such that", [TokenKind.SUBJECT_TO]),
        ("st", [TokenKind.SUBJECT_TO]),
        ("s.t.", [TokenKind.SUBJECT_TO]),
        ("Bounds", [TokenKind.BOUNDS]),
        ("Binaries", [TokenKind.BINARIES]),
        ("bin", [TokenKind.BINARIES]),
        ("Generals", [TokenKind.GENERALS]),
        ("free", [TokenKind.FREE]),
        ("inf", [TokenKind.INFINITY]),
        ("Infinity", [TokenKind.INFINITY]),
        ("End", [TokenKind.END]),
    ],
)
def test_keywords(data):
    tokens = _tokens(data[0])

    assert [token.kind for token in tokens] == data[1] and "".join(
        [token.value for token in tokens]
    ) == data[0]


def test_unfinished_keyword_pair():
    tokens = _tokens("subject x")
    assert [token.kind for token in tokens] == [TokenKind.IDENT, TokenKind.IDENT]
    assert [token.value for token in tokens] == ["subject", "x"]


@pytest.mark.parametrize(
    "data",
    [
        ("\\ a line comment\nx", ["x"]),
        ("\\* a block\ncomment *\\ y", ["y"]),
        ("x \\ trailing\n+ y", ["x", "+", "y"]),
    ],
)
def test_comments(data):
    assert [token.value for token in _tokens(data[0])] == data[1]


def test_positions():
    tokens = _tokens("obj: x\n  + 2 y")
    assert [(token.line, token.column) for token in tokens] == [
        (1, 1),
        (1, 4),
        (1, 6),
        (2, 3),
        (2, 5),
        (2, 7),
    ]


def test_misc():
    lexer = Lexer("x * y")
    assert lexer.next_token().kind == TokenKind.IDENT

    error = lexer.next_token()
    assert error.kind == TokenKind.ERROR and error.value == "Unknown character * found"

    assert lexer.next_token().kind == TokenKind.IDENT
    assert lexer.next_token().kind == TokenKind.EOF
