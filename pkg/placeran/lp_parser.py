import math
from pathlib import Path
from typing import Callable, Optional, Union

from placeran.errors import LpSyntaxError
from placeran.expressions import (
    Constraint,
    LinearExpr,
    Relation,
    Sense,
    Term,
    Variable,
    VarKind,
)
from placeran.lp_lexer import Lexer
from placeran.lp_tokens import RELATION_KINDS, SECTION_KINDS, Token, TokenKind
from placeran.program import IntegerProgram

RELATIONS = {
    TokenKind.LESS_EQUAL: Relation.LE,
    TokenKind.GREATER_EQUAL: Relation.GE,
    TokenKind.EQUAL: Relation.EQ,
}

# Repeats of these are reported by the objective parser itself
OBJECTIVE_KINDS = (TokenKind.MINIMIZE, TokenKind.MAXIMIZE)


class Parser:
    """Parses LP text into a symbolic `IntegerProgram`

    Reads the dialect `export_lp` writes: an objective, named rows, bounds,
    binary and general declarations, with `\\` comments anywhere.

    Args:
        source: The LP text to parse.
        filename: The name of the file being parsed, used in errors.

    Attributes:
        lexer: The lexer which is generating the token stream.
        filename: The name of the file being parsed.
        sense: Objective direction found in the file.
        objective: Objective expression found in the file.
        constraints: Rows in file order.
        bounds: Lower and upper bound of every variable given one.
        binaries: Names declared binary.
        generals: Names declared general integer.
        referenced: Every variable name in order of first appearance.
    """

    def __init__(self, source: str, filename: str):
        self.source = source
        self.lexer = Lexer(source)
        self.filename = filename

        self.sense = Sense.MINIMIZE
        self.objective: Optional[LinearExpr] = None
        self.constraints: list[Constraint] = []
        self.bounds: dict[str, tuple[float, float]] = {}
        self.binaries: list[str] = []
        self.generals: list[str] = []
        self.referenced: dict[str, None] = {}

        # Maps each section keyword to the function parsing its body
        self.sections_map: dict[TokenKind, Callable[[Token], None]] = {
            TokenKind.MINIMIZE: self.parse_objective,
            TokenKind.MAXIMIZE: self.parse_objective,
            TokenKind.SUBJECT_TO: self.parse_constraints,
            TokenKind.BOUNDS: self.parse_bounds,
            TokenKind.BINARIES: self.parse_binaries,
            TokenKind.GENERALS: self.parse_generals,
        }

    def advance(self) -> Token:
        return self.lexer.next_token()

    def peek(self) -> Token:
        return self.lexer.next

    def at_section(self) -> bool:
        return self.peek().kind in SECTION_KINDS or self.peek().kind is TokenKind.EOF

    def consume(self, expected: TokenKind, message: str) -> Token:
        """Advances if the peeked token is of the expected kind, otherwise raises"""

        if self.peek().kind != expected:
            self.emit_error(message, self.peek())

        return self.advance()

    def emit_error(self, message: str, token: Token):
        """Raises an `LpSyntaxError` located at the given token"""

        if token.kind is TokenKind.ERROR:
            message = f"{message} ({token.value})"
        raise LpSyntaxError(message, self.filename, token.line, token.column)

    def parse_number(self) -> float:
        """Parses an optionally signed number or infinity"""

        sign = 1.0
        while self.peek().kind in (TokenKind.PLUS, TokenKind.MINUS):
            if self.advance().kind is TokenKind.MINUS:
                sign = -sign

        token = self.advance()
        if token.kind is TokenKind.NUMBER:
            return sign * float(token.value)
        if token.kind is TokenKind.INFINITY:
            return sign * math.inf
        self.emit_error(f"Expected a number, found {token}", token)

    def parse_name(self, message: str) -> Token:
        token = self.consume(TokenKind.IDENT, message)
        self.referenced.setdefault(token.value, None)
        return token

    def parse_term(self, sign: float, first: Optional[Token] = None) -> Union[Term, float]:
        """Parses `[number] name` or a lone number (a constant)"""

        if first is not None:
            self.referenced.setdefault(first.value, None)
            return Term(_number(sign), first.value, first.position)

        if self.peek().kind is TokenKind.NUMBER:
            number = float(self.advance().value)
            if self.peek().kind is not TokenKind.IDENT:
                return sign * number
            token = self.parse_name("Expected a variable name")
            return Term(_number(sign * number), token.value, token.position)

        token = self.parse_name(f"Expected a term, found {self.peek()}")
        return Term(_number(sign), token.value, token.position)

    def parse_expression(self, first: Optional[Token] = None) -> LinearExpr:
        """Parses a sum of terms, starting from an already consumed name if given"""

        position = first.position if first is not None else self.peek().position
        terms: list[Term] = []
        constant = 0.0

        sign = 1.0
        if first is None:
            while self.peek().kind in (TokenKind.PLUS, TokenKind.MINUS):
                if self.advance().kind is TokenKind.MINUS:
                    sign = -sign

        while True:
            term = self.parse_term(sign, first)
            first = None
            if isinstance(term, Term):
                terms.append(term)
            else:
                constant += term

            if self.peek().kind not in (TokenKind.PLUS, TokenKind.MINUS):
                break
            sign = 1.0
            while self.peek().kind in (TokenKind.PLUS, TokenKind.MINUS):
                if self.advance().kind is TokenKind.MINUS:
                    sign = -sign

        return LinearExpr(terms, _number(constant), position)

    def parse_objective(self, keyword: Token):
        if self.objective is not None:
            self.emit_error("Objective given twice", keyword)

        self.sense = Sense.MAXIMIZE if keyword.kind is TokenKind.MAXIMIZE else Sense.MINIMIZE

        first = None
        if self.peek().kind is TokenKind.IDENT:
            first = self.advance()
            if self.peek().kind is TokenKind.COLON:
                self.advance()
                first = None

        if first is None and self.at_section():
            self.objective = LinearExpr()
        else:
            self.objective = self.parse_expression(first)

    def parse_constraint(self):
        name = None
        first = None
        if self.peek().kind is TokenKind.IDENT:
            first = self.advance()
            if self.peek().kind is TokenKind.COLON:
                self.advance()
                name, first = first, None

        expr = self.parse_expression(first)

        if self.peek().kind not in RELATION_KINDS:
            self.emit_error(f"Expected a relation, found {self.peek()}", self.peek())
        relation = RELATIONS[self.advance().kind]
        rhs = self.parse_number() - expr.constant
        expr.constant = 0

        row_name = name.value if name is not None else f"r_{len(self.constraints)}"
        position = name.position if name is not None else expr.position
        self.constraints.append(
            Constraint(row_name, expr, relation, _number(rhs), position=position)
        )

    def parse_constraints(self, keyword: Token):
        while not self.at_section():
            self.parse_constraint()

    def parse_bound(self):
        """Parses `l <= x <= u`, `x <= u`, `x >= l`, `x = v` or `x free`"""

        if self.peek().kind is TokenKind.IDENT:
            token = self.parse_name("Expected a variable name")
            lower, upper = self.bounds.get(token.value, (0.0, math.inf))
            if self.peek().kind is TokenKind.FREE:
                self.advance()
                self.bounds[token.value] = (-math.inf, math.inf)
                return
            if self.peek().kind not in RELATION_KINDS:
                self.emit_error(f"Expected a bound, found {self.peek()}", self.peek())
            relation = RELATIONS[self.advance().kind]
            value = self.parse_number()
            if relation is Relation.LE:
                upper = value
            elif relation is Relation.GE:
                lower = value
            else:
                lower = upper = value
            self.bounds[token.value] = (lower, upper)
            return

        lower = self.parse_number()
        self.consume(TokenKind.LESS_EQUAL, "Expected '<=' after a lower bound")
        token = self.parse_name("Expected a variable name")
        upper = self.bounds.get(token.value, (0.0, math.inf))[1]
        if self.peek().kind is TokenKind.LESS_EQUAL:
            self.advance()
            upper = self.parse_number()
        self.bounds[token.value] = (lower, upper)

    def parse_bounds(self, keyword: Token):
        while not self.at_section():
            self.parse_bound()

    def parse_declared(self) -> str:
        return self.parse_name(f"Expected a variable name, found {self.peek()}").value

    def parse_binaries(self, keyword: Token):
        while not self.at_section():
            self.binaries.append(self.parse_declared())

    def parse_generals(self, keyword: Token):
        while not self.at_section():
            self.generals.append(self.parse_declared())

    def build_variables(self) -> dict[str, Variable]:
        variables: dict[str, Variable] = {}
        for name in self.binaries:
            variables[name] = Variable(name, VarKind.BINARY, 0, 1)
        for name in self.generals:
            lower, upper = self.bounds.get(name, (0.0, math.inf))
            variables[name] = Variable(name, VarKind.GENERAL, _number(lower), _number(upper))
        for name in self.referenced:
            if name not in variables:
                lower, upper = self.bounds.get(name, (0.0, math.inf))
                variables[name] = Variable(
                    name, VarKind.CONTINUOUS, _number(lower), _number(upper)
                )
        return variables

    def parse(self) -> IntegerProgram:
        """Parses the whole file

        Returns:
            The program, without a model and with an unknown stage.
        """

        seen = set()
        while self.peek().kind not in (TokenKind.END, TokenKind.EOF):
            keyword = self.advance()
            handler = self.sections_map.get(keyword.kind)
            if handler is None:
                self.emit_error(f"Expected a section keyword, found {keyword}", keyword)
            if keyword.kind in seen and keyword.kind not in OBJECTIVE_KINDS:
                self.emit_error(f"Section {keyword} given twice", keyword)
            seen.add(keyword.kind)
            handler(keyword)

        if self.objective is None:
            self.emit_error("Missing objective section", self.peek())
        if TokenKind.SUBJECT_TO not in seen:
            self.emit_error("Missing 'Subject To' section", self.peek())

        if self.peek().kind is TokenKind.END:
            self.advance()
        self.consume(TokenKind.EOF, f"Unexpected {self.peek()} after End")

        return IntegerProgram(
            None,
            sense=self.sense,
            objective=self.objective,
            constraints=self.constraints,
            variables=self.build_variables(),
        )


def _number(value: float) -> Union[int, float]:
    """Keeps integral values as ints so re-rendering matches the source"""

    if isinstance(value, float) and value.is_integer():
        return int(value)
    return value


def read_lp(source: str, filename: str = "<string>") -> IntegerProgram:
    return Parser(source, filename).parse()


def load_lp(path: Union[str, Path]) -> IntegerProgram:
    return read_lp(Path(path).read_text(), str(path))
