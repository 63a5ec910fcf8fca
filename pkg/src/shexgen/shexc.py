"""Lexer and recursive-descent parser for the ShExC template subset.

Supported constructs: BASE/PREFIX directives, named shape declarations
(braced bodies and the single-constraint shorthand), triple constraints
with value sets, nested anonymous shapes, shape references (``@``),
labeled triple expressions (``$`` / ``&``), node kinds, datatypes, string
and numeric facets, inverse markers and cardinalities.

On top of plain ShExC, comment lines of the form ``#in: ...`` / ``#out: ...``
inside a top-level shape body declare the shape's input and output
variables; every entry must live in the ``http://exVar/`` namespace.

The IMPORT directive is rejected: merging imported schemas would change
template semantics, so silently ignoring it is not an option.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

from .rdf import Iri, Literal, RDF_TYPE, XSD_DECIMAL, XSD_INTEGER

EXVAR_NS = "http://exVar/"


class Direction(str, enum.Enum):
    IN = "in"
    OUT = "out"


# ---------------------------------------------------------------------------
# Errors


class ShexError(Exception):
    """Base class for all schema-text errors."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.line is not None:
            return f"line {self.line}, column {self.column}: {self.message}"
        return self.message


class ShexSyntaxError(ShexError):
    pass


class UnsupportedDirectiveError(ShexError):
    pass


class UnknownPrefixError(ShexError):
    pass


class NoBaseError(ShexError):
    pass


class DuplicateLabelError(ShexError):
    pass


class UnresolvedReferenceError(ShexError):
    pass


class DuplicateAnnotationError(ShexError):
    pass


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Named:
    iri: Iri


@dataclass(frozen=True)
class Anonymous:
    # Ordinal in document order; stable across re-parses of the same text.
    ordinal: int


ShapeLabel = Union[Named, Anonymous]


@dataclass(frozen=True)
class ExVarRef:
    iri: Iri


ValueSetMember = Union[Iri, Literal, ExVarRef]


@dataclass(frozen=True)
class ValueSet:
    members: tuple[ValueSetMember, ...]


@dataclass(frozen=True)
class NodeKind:
    kind: str  # "iri" | "bnode" | "literal" | "nonliteral"


@dataclass(frozen=True)
class Datatype:
    iri: Iri


@dataclass(frozen=True)
class Facets:
    # (facet keyword, raw argument text) pairs, e.g. ("MINLENGTH", "10").
    entries: tuple[tuple[str, str], ...]


@dataclass(frozen=True)
class ShapeRef:
    target: Iri


@dataclass(frozen=True)
class Cardinality:
    min: int
    max: Optional[int]  # None = unbounded

    @staticmethod
    def default() -> "Cardinality":
        return Cardinality(1, 1)


@dataclass(frozen=True)
class TripleConstraint:
    inverse: bool
    predicate: Iri
    value: "ValueExpr"
    cardinality: Cardinality = field(default_factory=Cardinality.default)


@dataclass(frozen=True)
class ExprRef:
    label: Iri


@dataclass(frozen=True)
class TripleExprGroup:
    items: tuple["GroupItem", ...]


@dataclass(frozen=True)
class LabeledGroup:
    label: Iri
    group: TripleExprGroup


@dataclass(frozen=True)
class NestedShape:
    shape: "ShapeDecl"


ValueExpr = Union[ValueSet, NodeKind, Datatype, Facets, NestedShape, ShapeRef]
GroupItem = Union[TripleConstraint, ExprRef, LabeledGroup]


@dataclass(frozen=True)
class ShapeDecl:
    label: ShapeLabel
    # IO annotations in the order they appeared in the source.
    annotations: tuple[tuple[Direction, tuple[Iri, ...]], ...]
    body: TripleExprGroup

    @property
    def inputs(self) -> tuple[Iri, ...]:
        for direction, entries in self.annotations:
            if direction is Direction.IN:
                return entries
        return ()

    @property
    def outputs(self) -> tuple[Iri, ...]:
        for direction, entries in self.annotations:
            if direction is Direction.OUT:
                return entries
        return ()


@dataclass
class ShexSchema:
    base: Optional[Iri]
    prefixes: dict[str, Iri]
    shapes: tuple[ShapeDecl, ...]
    triple_expr_labels: dict[Iri, TripleExprGroup]
    source: str

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ShexSchema):
            return NotImplemented
        return (
            self.base == other.base
            and self.prefixes == other.prefixes
            and self.shapes == other.shapes
            and self.triple_expr_labels == other.triple_expr_labels
        )


def is_exvar(iri: Iri) -> bool:
    return iri.value.startswith(EXVAR_NS)


# ---------------------------------------------------------------------------
# Lexer


_PUNCT = {
    "{": "LBRACE",
    "}": "RBRACE",
    "[": "LBRACKET",
    "]": "RBRACKET",
    "(": "LPAREN",
    ")": "RPAREN",
    ";": "SEMI",
    ",": "COMMA",
    "@": "AT",
    "&": "AMP",
    "$": "DOLLAR",
    "*": "STAR",
    "+": "PLUS",
    "?": "QUESTION",
}

_WORD_CHARS = set("ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_-:")

_STRING_UNESCAPES = {
    "\\": "\\",
    '"': '"',
    "n": "\n",
    "r": "\r",
    "t": "\t",
    "b": "\b",
    "f": "\f",
}


@dataclass
class Token:
    kind: str
    value: object
    line: int
    column: int


class _Lexer:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0
        self.line = 1
        self.column = 1
        self.at_line_start = True

    def error(self, message: str) -> ShexSyntaxError:
        return ShexSyntaxError(message, self.line, self.column)

    def _peek(self, offset: int = 0) -> str:
        i = self.pos + offset
        return self.text[i] if i < len(self.text) else ""

    def _advance(self, count: int = 1) -> None:
        for _ in range(count):
            if self.pos >= len(self.text):
                return
            if self.text[self.pos] == "\n":
                self.line += 1
                self.column = 1
                self.at_line_start = True
            else:
                self.column += 1
            self.pos += 1

    def tokens(self) -> list[Token]:
        out: list[Token] = []
        while self.pos < len(self.text):
            c = self._peek()
            if c.isspace():
                self._advance()
                continue
            if c == "#":
                tok = self._comment_or_annotation()
                if tok is not None:
                    out.append(tok)
                continue
            self.at_line_start = False
            line, col = self.line, self.column
            if c == "<":
                out.append(Token("IRIREF", self._iriref(), line, col))
            elif c == '"':
                out.append(Token("STRING", self._string(), line, col))
            elif c == "^":
                if self._peek(1) == "^":
                    self._advance(2)
                    out.append(Token("HATHAT", None, line, col))
                else:
                    self._advance()
                    out.append(Token("CARET", None, line, col))
            elif c == "/":
                out.append(Token("REGEX", self._regex(), line, col))
            elif c in _PUNCT:
                self._advance()
                out.append(Token(_PUNCT[c], None, line, col))
            elif c.isdigit() or (c == "-" and self._peek(1).isdigit()):
                out.append(Token("NUMBER", self._number(), line, col))
            elif c in _WORD_CHARS:
                out.append(self._word(line, col))
            else:
                raise self.error(f"unexpected character {c!r}")
        out.append(Token("EOF", None, self.line, self.column))
        return out

    def _comment_or_annotation(self) -> Optional[Token]:
        line, col = self.line, self.column
        line_initial = self.at_line_start
        direction = None
        if line_initial and self.text.startswith("in:", self.pos + 1):
            direction, skip = Direction.IN, len("#in:")
        elif line_initial and self.text.startswith("out:", self.pos + 1):
            direction, skip = Direction.OUT, len("#out:")
        if direction is None:
            # Plain comment: skip to end of line.
            while self.pos < len(self.text) and self._peek() != "\n":
                self._advance()
            return None
        self._advance(skip)
        start = self.pos
        while self.pos < len(self.text) and self._peek() != "\n":
            self._advance()
        raw = self.text[start:self.pos]
        return Token("ANNOT", (direction, raw), line, col)

    def _iriref(self) -> str:
        self._advance()  # consume '<'
        start = self.pos
        while self.pos < len(self.text):
            c = self._peek()
            if c == ">":
                value = self.text[start:self.pos]
                self._advance()
                return value
            if c == "\n" or c == "<":
                raise self.error("unterminated IRI reference")
            self._advance()
        raise self.error("unterminated IRI reference")

    def _string(self) -> tuple[str, Optional[str]]:
        self._advance()  # consume opening quote
        chars: list[str] = []
        while True:
            if self.pos >= len(self.text):
                raise self.error("unterminated string literal")
            c = self._peek()
            if c == "\n":
                raise self.error("unterminated string literal")
            if c == "\\":
                esc = self._peek(1)
                if esc not in _STRING_UNESCAPES:
                    raise self.error(f"unknown string escape \\{esc}")
                chars.append(_STRING_UNESCAPES[esc])
                self._advance(2)
                continue
            if c == '"':
                self._advance()
                break
            chars.append(c)
            self._advance()
        # A language tag binds tightly to its literal: "x"@de, no whitespace.
        language = None
        if self._peek() == "@" and self._peek(1).isalpha():
            self._advance()
            start = self.pos
            while self._peek().isalnum() or self._peek() == "-":
                self._advance()
            language = self.text[start:self.pos]
        return "".join(chars), language

    def _regex(self) -> tuple[str, str]:
        self._advance()  # consume '/'
        chars: list[str] = []
        while True:
            if self.pos >= len(self.text) or self._peek() == "\n":
                raise self.error("unterminated regular expression")
            c = self._peek()
            if c == "\\":
                chars.append(c)
                chars.append(self._peek(1))
                self._advance(2)
                continue
            if c == "/":
                self._advance()
                break
            chars.append(c)
            self._advance()
        start = self.pos
        while self._peek().isalpha():
            self._advance()
        return "".join(chars), self.text[start:self.pos]

    def _number(self) -> str:
        start = self.pos
        if self._peek() == "-":
            self._advance()
        while self._peek().isdigit():
            self._advance()
        if self._peek() == "." and self._peek(1).isdigit():
            self._advance()
            while self._peek().isdigit():
                self._advance()
        return self.text[start:self.pos]

    def _word(self, line: int, col: int) -> Token:
        start = self.pos
        while self._peek() in _WORD_CHARS:
            self._advance()
        word = self.text[start:self.pos]
        if ":" in word:
            prefix, local = word.split(":", 1)
            return Token("PNAME", (prefix, local), line, col)
        return Token("IDENT", word, line, col)


# ---------------------------------------------------------------------------
# Parser


_NODE_KINDS = {"IRI", "BNODE", "LITERAL", "NONLITERAL"}
_STRING_FACETS = {"LENGTH", "MINLENGTH", "MAXLENGTH"}
_NUMERIC_FACETS = {
    "MININCLUSIVE",
    "MAXINCLUSIVE",
    "MINEXCLUSIVE",
    "MAXEXCLUSIVE",
    "TOTALDIGITS",
    "FRACTIONDIGITS",
}
_FACET_KEYWORDS = _STRING_FACETS | _NUMERIC_FACETS


class _Parser:
    def __init__(self, text: str):
        self.source = text
        self.tokens = _Lexer(text).tokens()
        self.pos = 0
        self.base: Optional[Iri] = None
        self.prefixes: dict[str, Iri] = {}
        self.shapes: list[ShapeDecl] = []
        self.shape_labels: dict[Iri, Token] = {}
        self.expr_labels: dict[Iri, TripleExprGroup] = {}
        self.expr_label_tokens: dict[Iri, Token] = {}
        self.anon_counter = 0
        self.pending_shape_refs: list[tuple[Iri, Token]] = []
        self.pending_expr_refs: list[tuple[Iri, Token]] = []

    # -- token helpers

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def expect(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            raise ShexSyntaxError(f"expected {what}, found {self._describe(tok)}", tok.line, tok.column)
        return self.advance()

    @staticmethod
    def _describe(tok: Token) -> str:
        if tok.kind == "EOF":
            return "end of input"
        if tok.kind in ("IDENT", "NUMBER"):
            return repr(tok.value)
        if tok.kind == "PNAME":
            prefix, local = tok.value
            return repr(f"{prefix}:{local}")
        return tok.kind

    # -- IRI resolution

    def _resolve_iriref(self, raw: str, tok: Token) -> Iri:
        try:
            return Iri(raw)
        except ValueError:
            pass  # relative reference, resolved against the base below
        if self.base is None:
            raise NoBaseError(f"relative IRI <{raw}> without a BASE directive", tok.line, tok.column)
        try:
            return Iri(self.base.value + raw)
        except ValueError as exc:
            raise ShexSyntaxError(f"invalid IRI <{raw}>: {exc}", tok.line, tok.column)

    def _expand_pname(self, prefix: str, local: str, tok: Token) -> Iri:
        ns = self.prefixes.get(prefix)
        if ns is None:
            raise UnknownPrefixError(f"unknown prefix {prefix!r}", tok.line, tok.column)
        try:
            return Iri(ns.value + local)
        except ValueError as exc:
            raise ShexSyntaxError(f"invalid prefixed name {prefix}:{local}: {exc}", tok.line, tok.column)

    def _iri_token(self, what: str) -> Iri:
        tok = self.peek()
        if tok.kind == "IRIREF":
            self.advance()
            return self._resolve_iriref(tok.value, tok)
        if tok.kind == "PNAME":
            self.advance()
            prefix, local = tok.value
            return self._expand_pname(prefix, local, tok)
        raise ShexSyntaxError(f"expected {what}, found {self._describe(tok)}", tok.line, tok.column)

    # -- schema

    def parse(self) -> ShexSchema:
        self._parse_directives()
        while self.peek().kind != "EOF":
            self._check_misplaced_directive()
            self.shapes.append(self._parse_shape())
        self._check_references()
        return ShexSchema(
            base=self.base,
            prefixes=self.prefixes,
            shapes=tuple(self.shapes),
            triple_expr_labels=self.expr_labels,
            source=self.source,
        )

    def _parse_directives(self) -> None:
        while True:
            tok = self.peek()
            if tok.kind != "IDENT":
                return
            keyword = str(tok.value).upper()
            if keyword == "IMPORT":
                raise UnsupportedDirectiveError("the IMPORT directive is not supported", tok.line, tok.column)
            if keyword == "BASE":
                self.advance()
                iri_tok = self.expect("IRIREF", "an IRI after BASE")
                try:
                    self.base = Iri(iri_tok.value)
                except ValueError as exc:
                    raise ShexSyntaxError(f"invalid BASE IRI: {exc}", iri_tok.line, iri_tok.column)
            elif keyword == "PREFIX":
                self.advance()
                label_tok = self.peek()
                if label_tok.kind != "PNAME" or label_tok.value[1] != "":
                    raise ShexSyntaxError(
                        f"expected a prefix label ending in ':', found {self._describe(label_tok)}",
                        label_tok.line,
                        label_tok.column,
                    )
                self.advance()
                iri_tok = self.expect("IRIREF", "a namespace IRI after the prefix label")
                self.prefixes[label_tok.value[0]] = self._resolve_iriref(iri_tok.value, iri_tok)
            else:
                return

    def _check_misplaced_directive(self) -> None:
        tok = self.peek()
        if tok.kind != "IDENT":
            return
        keyword = str(tok.value).upper()
        if keyword == "IMPORT":
            raise UnsupportedDirectiveError("the IMPORT directive is not supported", tok.line, tok.column)
        if keyword in ("BASE", "PREFIX"):
            raise ShexSyntaxError("directives must precede shape declarations", tok.line, tok.column)

    # -- shapes

    def _parse_shape(self) -> ShapeDecl:
        tok = self.peek()
        label_iri = self._iri_token("a shape label")
        if label_iri in self.shape_labels:
            raise DuplicateLabelError(f"shape <{label_iri}> is declared twice", tok.line, tok.column)
        self.shape_labels[label_iri] = tok
        annotations: list[tuple[Direction, tuple[Iri, ...]]] = []
        if self.peek().kind == "LBRACE":
            self.advance()
            body = self._parse_group("RBRACE", annotations)
            self.expect("RBRACE", "'}'")
        else:
            body = TripleExprGroup((self._parse_triple_constraint(None),))
        return ShapeDecl(label=Named(label_iri), annotations=tuple(annotations), body=body)

    def _parse_group(
        self,
        end: str,
        annotations: Optional[list[tuple[Direction, tuple[Iri, ...]]]],
    ) -> TripleExprGroup:
        items: list[GroupItem] = []
        self._consume_annotations(annotations)
        while self.peek().kind != end:
            items.append(self._parse_item(annotations))
            self._consume_annotations(annotations)
            if self.peek().kind == "SEMI":
                self.advance()
                self._consume_annotations(annotations)
            else:
                break
        return TripleExprGroup(tuple(items))

    def _consume_annotations(
        self, annotations: Optional[list[tuple[Direction, tuple[Iri, ...]]]]
    ) -> None:
        while self.peek().kind == "ANNOT":
            tok = self.advance()
            direction, raw = tok.value
            if annotations is None:
                raise ShexSyntaxError(
                    "IO annotations are only recognized on top-level shapes", tok.line, tok.column
                )
            if any(d is direction for d, _ in annotations):
                raise DuplicateAnnotationError(
                    f"shape carries a second #{direction.value}: annotation", tok.line, tok.column
                )
            annotations.append((direction, self._parse_annotation_entries(raw, tok)))

    def _parse_annotation_entries(self, raw: str, tok: Token) -> tuple[Iri, ...]:
        entries: dict[Iri, None] = {}
        for chunk in raw.split(","):
            text = chunk.strip()
            if not text:
                raise ShexSyntaxError(
                    f"empty entry in #{tok.value[0].value}: annotation", tok.line, tok.column
                )
            if text.startswith("<") and text.endswith(">"):
                iri = self._resolve_iriref(text[1:-1], tok)
            elif ":" in text and not any(c.isspace() for c in text):
                prefix, local = text.split(":", 1)
                iri = self._expand_pname(prefix, local, tok)
            else:
                raise ShexSyntaxError(
                    f"annotation entry {text!r} is not an IRI or prefixed name", tok.line, tok.column
                )
            if not is_exvar(iri):
                raise ShexSyntaxError(
                    f"annotation entry <{iri}> is outside the {EXVAR_NS} namespace", tok.line, tok.column
                )
            entries.setdefault(iri, None)
        return tuple(entries)

    def _parse_item(
        self, annotations: Optional[list[tuple[Direction, tuple[Iri, ...]]]]
    ) -> GroupItem:
        tok = self.peek()
        if tok.kind == "DOLLAR":
            self.advance()
            label = self._iri_token("a triple-expression label after '$'")
            if label in self.expr_labels:
                raise DuplicateLabelError(
                    f"triple expression <{label}> is declared twice", tok.line, tok.column
                )
            self.expect("LPAREN", "'(' after the triple-expression label")
            group = self._parse_group("RPAREN", annotations)
            self.expect("RPAREN", "')'")
            if not group.items:
                raise ShexSyntaxError(
                    f"labeled triple expression <{label}> must not be empty", tok.line, tok.column
                )
            self.expr_labels[label] = group
            self.expr_label_tokens[label] = tok
            return LabeledGroup(label, group)
        if tok.kind == "AMP":
            self.advance()
            label = self._iri_token("a triple-expression label after '&'")
            self.pending_expr_refs.append((label, tok))
            return ExprRef(label)
        return self._parse_triple_constraint(annotations)

    def _parse_triple_constraint(
        self, annotations: Optional[list[tuple[Direction, tuple[Iri, ...]]]]
    ) -> TripleConstraint:
        inverse = False
        if self.peek().kind == "CARET":
            self.advance()
            inverse = True
        tok = self.peek()
        if tok.kind == "IDENT" and tok.value == "a":
            self.advance()
            predicate = RDF_TYPE
        else:
            predicate = self._iri_token("a predicate")
            if is_exvar(predicate):
                # Existential variables name things, not relations; nothing
                # would ever substitute a predicate position.
                raise ShexSyntaxError(
                    f"existential variable <{predicate}> cannot be used as a predicate",
                    tok.line,
                    tok.column,
                )
        value = self._parse_value_expr()
        cardinality = self._parse_cardinality()
        return TripleConstraint(inverse=inverse, predicate=predicate, value=value, cardinality=cardinality)

    def _parse_value_expr(self) -> ValueExpr:
        tok = self.peek()
        if tok.kind == "LBRACKET":
            return self._parse_value_set()
        if tok.kind == "LBRACE":
            self.advance()
            ordinal = self.anon_counter
            self.anon_counter += 1
            body = self._parse_group("RBRACE", None)
            self.expect("RBRACE", "'}'")
            return NestedShape(ShapeDecl(label=Anonymous(ordinal), annotations=(), body=body))
        if tok.kind == "AT":
            self.advance()
            target = self._iri_token("a shape label after '@'")
            self.pending_shape_refs.append((target, tok))
            return ShapeRef(target)
        if tok.kind == "REGEX":
            return self._parse_facets()
        if tok.kind == "IDENT":
            keyword = str(tok.value).upper()
            if keyword in _NODE_KINDS:
                self.advance()
                return NodeKind(keyword.lower())
            if keyword in _FACET_KEYWORDS:
                return self._parse_facets()
            raise ShexSyntaxError(
                f"expected a node constraint, found {self._describe(tok)}", tok.line, tok.column
            )
        if tok.kind in ("IRIREF", "PNAME"):
            iri = self._iri_token("a datatype IRI")
            if is_exvar(iri):
                # Bare exVar object position, shorthand for a one-member set.
                return ValueSet((ExVarRef(iri),))
            return Datatype(iri)
        raise ShexSyntaxError(
            f"expected a node constraint, found {self._describe(tok)}", tok.line, tok.column
        )

    def _parse_value_set(self) -> ValueSet:
        open_tok = self.expect("LBRACKET", "'['")
        members: list[ValueSetMember] = []
        while self.peek().kind != "RBRACKET":
            tok = self.peek()
            if tok.kind in ("IRIREF", "PNAME"):
                iri = self._iri_token("a value-set member")
                members.append(ExVarRef(iri) if is_exvar(iri) else iri)
            elif tok.kind == "STRING":
                members.append(self._parse_literal())
            elif tok.kind == "NUMBER":
                self.advance()
                raw = str(tok.value)
                datatype = XSD_DECIMAL if "." in raw else XSD_INTEGER
                members.append(Literal(raw, datatype=datatype))
            elif tok.kind == "AT":
                raise ShexSyntaxError(
                    "language-tag value set members are not supported", tok.line, tok.column
                )
            else:
                raise ShexSyntaxError(
                    f"expected a value-set member, found {self._describe(tok)}", tok.line, tok.column
                )
        self.advance()  # consume ']'
        if not members:
            raise ShexSyntaxError("value set must not be empty", open_tok.line, open_tok.column)
        return ValueSet(tuple(members))

    def _parse_literal(self) -> Literal:
        tok = self.expect("STRING", "a string literal")
        lexical, language = tok.value
        if language is not None:
            return Literal(lexical, language=language)
        if self.peek().kind == "HATHAT":
            self.advance()
            dt_tok = self.peek()
            datatype = self._iri_token("a datatype IRI after '^^'")
            if is_exvar(datatype):
                raise ShexSyntaxError(
                    f"existential variable <{datatype}> cannot be used as a datatype",
                    dt_tok.line,
                    dt_tok.column,
                )
            return Literal(lexical, datatype=datatype)
        return Literal(lexical)

    def _parse_facets(self) -> Facets:
        entries: list[tuple[str, str]] = []
        while True:
            tok = self.peek()
            if tok.kind == "REGEX":
                self.advance()
                pattern, flags = tok.value
                entries.append(("PATTERN", f"/{pattern}/{flags}"))
                continue
            if tok.kind == "IDENT" and str(tok.value).upper() in _FACET_KEYWORDS:
                keyword = str(tok.value).upper()
                self.advance()
                arg = self.expect("NUMBER", f"a numeric argument after {keyword}")
                entries.append((keyword, str(arg.value)))
                continue
            break
        return Facets(tuple(entries))

    def _parse_cardinality(self) -> Cardinality:
        tok = self.peek()
        if tok.kind == "STAR":
            self.advance()
            return Cardinality(0, None)
        if tok.kind == "PLUS":
            self.advance()
            return Cardinality(1, None)
        if tok.kind == "QUESTION":
            self.advance()
            return Cardinality(0, 1)
        if tok.kind == "LBRACE":
            self.advance()
            low = self._cardinality_number()
            high = low
            if self.peek().kind == "COMMA":
                self.advance()
                high = self._cardinality_number()
            self.expect("RBRACE", "'}' closing the cardinality")
            if low > high:
                raise ShexSyntaxError(
                    f"cardinality minimum {low} exceeds maximum {high}", tok.line, tok.column
                )
            return Cardinality(low, high)
        return Cardinality.default()

    def _cardinality_number(self) -> int:
        tok = self.expect("NUMBER", "a cardinality bound")
        raw = str(tok.value)
        if "." in raw or raw.startswith("-"):
            raise ShexSyntaxError("cardinality bounds must be non-negative integers", tok.line, tok.column)
        return int(raw)

    # -- post-parse reference checks

    def _check_references(self) -> None:
        for label, tok in self.pending_expr_refs:
            if label not in self.expr_labels:
                raise UnresolvedReferenceError(
                    f"reference &<{label}> does not match any labeled triple expression",
                    tok.line,
                    tok.column,
                )
        for target, tok in self.pending_shape_refs:
            if target not in self.shape_labels:
                raise UnresolvedReferenceError(
                    f"reference @<{target}> does not match any declared shape", tok.line, tok.column
                )
        self._check_expr_cycles()

    def _check_expr_cycles(self) -> None:
        def refs_in(group: TripleExprGroup) -> Iterator[Iri]:
            for item in group.items:
                if isinstance(item, ExprRef):
                    yield item.label
                elif isinstance(item, LabeledGroup):
                    yield from refs_in(item.group)
                elif isinstance(item, TripleConstraint) and isinstance(item.value, NestedShape):
                    yield from refs_in(item.value.shape.body)

        visiting: set[Iri] = set()
        done: set[Iri] = set()

        def visit(label: Iri) -> None:
            if label in done:
                return
            if label in visiting:
                tok = self.expr_label_tokens[label]
                raise ShexSyntaxError(
                    f"triple expression <{label}> references itself", tok.line, tok.column
                )
            visiting.add(label)
            for ref in refs_in(self.expr_labels[label]):
                visit(ref)
            visiting.discard(label)
            done.add(label)

        for label in self.expr_labels:
            visit(label)


# ---------------------------------------------------------------------------
# Public operations


def parse_schema(text: str) -> ShexSchema:
    """Parse ShExC text into a schema; raises a ShexError subclass on bad input."""
    return _Parser(text).parse()


def resolve_term(schema: ShexSchema, token: str) -> Iri:
    """Resolve an ``<iri>`` or ``prefix:local`` token against a parsed schema."""
    if token.startswith("<") and token.endswith(">"):
        raw = token[1:-1]
        try:
            return Iri(raw)
        except ValueError:
            pass
        if schema.base is None:
            raise NoBaseError(f"relative IRI {token} without a BASE directive")
        return Iri(schema.base.value + raw)
    if ":" in token:
        prefix, local = token.split(":", 1)
        ns = schema.prefixes.get(prefix)
        if ns is None:
            raise UnknownPrefixError(f"unknown prefix {prefix!r}")
        return Iri(ns.value + local)
    raise ShexSyntaxError(f"{token!r} is neither an <iri> nor a prefixed name")


def collect_exvars(schema: ShexSchema) -> tuple[Iri, ...]:
    """All exVar IRIs of a schema, deduplicated, in first-occurrence order.

    Occurrences counted: shape labels, value-set members (including the bare
    object-position shorthand) and IO annotation entries. Labeled triple
    expressions are scanned at their definition site only, which is where
    their text lives.
    """
    seen: dict[Iri, None] = {}

    def record(iri: Iri) -> None:
        if is_exvar(iri):
            seen.setdefault(iri, None)

    def walk_group(group: TripleExprGroup) -> None:
        for item in group.items:
            if isinstance(item, LabeledGroup):
                walk_group(item.group)
            elif isinstance(item, TripleConstraint):
                if isinstance(item.value, ValueSet):
                    for member in item.value.members:
                        if isinstance(member, ExVarRef):
                            record(member.iri)
                elif isinstance(item.value, NestedShape):
                    walk_group(item.value.shape.body)

    for shape in schema.shapes:
        if isinstance(shape.label, Named):
            record(shape.label.iri)
        for _, entries in shape.annotations:
            for entry in entries:
                record(entry)
        walk_group(shape.body)
    return tuple(seen)


def flatten_constraints(schema: ShexSchema, group: TripleExprGroup) -> Iterator[TripleConstraint]:
    """Triple constraints of a group in order, with ``&`` references inlined.

    Inlining substitutes the labeled group's items at every use site, so a
    nested anonymous shape inside a reused expression keeps one identity
    (and therefore one skolem) across all sites.
    """
    for item in group.items:
        if isinstance(item, TripleConstraint):
            yield item
        elif isinstance(item, LabeledGroup):
            yield from flatten_constraints(schema, item.group)
        elif isinstance(item, ExprRef):
            yield from flatten_constraints(schema, schema.triple_expr_labels[item.label])


def anonymous_shapes(schema: ShexSchema) -> tuple[ShapeDecl, ...]:
    """Every anonymous nested shape of the schema, in ordinal order."""
    found: dict[int, ShapeDecl] = {}

    def walk_group(group: TripleExprGroup) -> None:
        for item in group.items:
            if isinstance(item, LabeledGroup):
                walk_group(item.group)
            elif isinstance(item, TripleConstraint) and isinstance(item.value, NestedShape):
                shape = item.value.shape
                assert isinstance(shape.label, Anonymous)
                found[shape.label.ordinal] = shape
                walk_group(shape.body)

    for shape in schema.shapes:
        walk_group(shape.body)
    return tuple(found[k] for k in sorted(found))
