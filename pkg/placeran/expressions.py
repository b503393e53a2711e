from __future__ import annotations

import math
from enum import Enum
from typing import Iterable, Mapping, Optional

from placeran.lp_tokens import Position
from placeran.placeran_types import Number


class VarKind(Enum):
    BINARY = "binary"
    GENERAL = "general"
    CONTINUOUS = "continuous"


class Relation(Enum):
    LE = "<="
    GE = ">="
    EQ = "="


class Sense(Enum):
    MINIMIZE = "Minimize"
    MAXIMIZE = "Maximize"


class Tag(Enum):
    """Provenance of a constraint row, encoded as the prefix of its name"""

    ASSIGN = "assign"
    LINK_CAPACITY = "link-capacity"
    CR_CAPACITY = "cr-capacity"
    LINK_Y = "link-y"
    LINK_Z = "link-z"
    LINK_D = "link-d"
    FIX_FIRST = "fix-first"
    FIX_SECOND = "fix-second"

    @property
    def prefix(self) -> str:
        return ROW_PREFIXES[self]

    @classmethod
    def from_row_name(cls, name: str) -> Optional[Tag]:
        return PREFIX_TAGS.get(name.split("_", 1)[0])


ROW_PREFIXES = {
    Tag.ASSIGN: "one",
    Tag.LINK_CAPACITY: "bw",
    Tag.CR_CAPACITY: "cpu",
    Tag.LINK_Y: "ly",
    Tag.LINK_Z: "lz",
    Tag.LINK_D: "ld",
    Tag.FIX_FIRST: "fix1",
    Tag.FIX_SECOND: "fix2",
}
PREFIX_TAGS = {prefix: tag for tag, prefix in ROW_PREFIXES.items()}


def format_number(value: Number) -> str:
    """Renders integral values without a fraction, others with `repr`"""

    value = float(value)
    if value.is_integer() and abs(value) < 1e15:
        return str(int(value))
    return repr(value)


class Node:
    """Base class for every node of a program, built or read from a file"""

    def __init__(self, position: Optional[Position] = None):
        self.position = position


class Variable(Node):
    """Represents a decision variable with its domain"""

    def __init__(
        self,
        name: str,
        kind: VarKind = VarKind.BINARY,
        lower: Number = 0,
        upper: Number = 1,
        position: Optional[Position] = None,
    ):
        super().__init__(position)

        self.name = name
        self.kind = kind
        self.lower = lower
        self.upper = upper

    def admits(self, value: Number, tolerance: float = 1e-9) -> bool:
        if value < self.lower - tolerance or value > self.upper + tolerance:
            return False
        if self.kind is VarKind.CONTINUOUS:
            return True
        return abs(value - round(value)) <= tolerance

    def __repr__(self):
        return f"Variable[{self.name}]"

    def __str__(self):
        return self.name


class Term(Node):
    """Represents a coefficient times a variable"""

    def __init__(self, coefficient: Number, name: str, position: Optional[Position] = None):
        super().__init__(position)

        self.coefficient = coefficient
        self.name = name

    def __repr__(self):
        return f"Term[{format_number(self.coefficient)} {self.name}]"

    def __str__(self):
        magnitude = abs(self.coefficient)
        body = self.name if magnitude == 1 else f"{format_number(magnitude)} {self.name}"
        return f"- {body}" if self.coefficient < 0 else body


class LinearExpr(Node):
    """Represents a sum of terms plus a constant"""

    def __init__(
        self,
        terms: Iterable[Term] = (),
        constant: Number = 0,
        position: Optional[Position] = None,
    ):
        super().__init__(position)

        self.terms = list(terms)
        self.constant = constant

    @classmethod
    def of(cls, coefficients: Iterable[tuple[Number, str]]) -> LinearExpr:
        return cls(Term(c, name) for c, name in coefficients)

    def coefficients(self) -> dict[str, Number]:
        merged: dict[str, Number] = {}
        for term in self.terms:
            merged[term.name] = merged.get(term.name, 0) + term.coefficient
        return merged

    def value(self, values: Mapping[str, Number]) -> Number:
        return self.constant + sum(t.coefficient * values.get(t.name, 0) for t in self.terms)

    def __repr__(self):
        return f"LinearExpr[terms: {len(self.terms)} constant: {self.constant}]"

    def __str__(self):
        parts = []
        for i, term in enumerate(self.terms):
            text = str(term)
            if i == 0:
                parts.append(text)
            elif text.startswith("- "):
                parts.append(text)
            else:
                parts.append(f"+ {text}")
        if self.constant or not parts:
            constant = format_number(abs(self.constant))
            if not parts:
                parts.append(format_number(self.constant))
            else:
                parts.append(f"- {constant}" if self.constant < 0 else f"+ {constant}")
        return " ".join(parts)


class Constraint(Node):
    """Represents a named linear row `expr relation rhs` with its provenance"""

    def __init__(
        self,
        name: str,
        expr: LinearExpr,
        relation: Relation,
        rhs: Number,
        tag: Optional[Tag] = None,
        position: Optional[Position] = None,
    ):
        super().__init__(position)

        self.name = name
        self.expr = expr
        self.relation = relation
        self.rhs = rhs
        self.tag = tag if tag is not None else Tag.from_row_name(name)

    def slack(self, values: Mapping[str, Number]) -> float:
        """Signed slack, negative when the row is violated"""

        lhs = self.expr.value(values)
        if self.relation is Relation.LE:
            return self.rhs - lhs
        if self.relation is Relation.GE:
            return lhs - self.rhs
        return -abs(lhs - self.rhs)

    def satisfied(self, values: Mapping[str, Number], tolerance: float = 1e-9) -> bool:
        return self.slack(values) >= -tolerance * max(1.0, abs(self.rhs))

    def __repr__(self):
        tag = self.tag.value if self.tag is not None else "untagged"
        return f"Constraint[{self.name} {tag}]"

    def __str__(self):
        return f"{self.name}: {self.expr} {self.relation.value} {format_number(self.rhs)}"


def ceil_div(count: int, capacity: Optional[int]) -> int:
    """`ceil(count / capacity)`, or the indicator `count > 0` without a capacity"""

    if count <= 0:
        return 0
    if capacity is None:
        return 1
    return math.ceil(count / capacity)
