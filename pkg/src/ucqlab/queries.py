"""Query AST, textual grammar, parsing and printing.

The grammar mirrors standard rule notation::

    UnionQuery ::= CQ+
    CQ         ::= Name "(" VarList ")" ":-" Atom ("," Atom)* "."
    Atom       ::= Name "(" Term ("," Term)* ")"
    Term       ::= identifier | "'" literal "'"

Identifiers are ``[A-Za-z_][A-Za-z0-9_]*``; whitespace is insignificant and
``%`` starts a line comment.  Identifier terms are variables, quoted terms
are constants.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Union


class QueryError(ValueError):
    """A query is syntactically or semantically ill-formed."""


class QuerySyntaxError(QueryError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


@dataclass(frozen=True, order=True)
class Variable:
    name: str

    def __post_init__(self):
        if not self.name:
            raise QueryError("variable name must be nonempty")

    def __repr__(self):
        return f"Variable({self.name!r})"

    def __str__(self):
        return self.name


@dataclass(frozen=True, order=True)
class Constant:
    value: str

    def __str__(self):
        return f"'{self.value}'"


Term = Union[Variable, Constant]


@dataclass(frozen=True)
class Atom:
    relation: str
    args: tuple[Term, ...]

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> frozenset[Variable]:
        return frozenset(t for t in self.args if isinstance(t, Variable))

    def __str__(self):
        return f"{self.relation}({','.join(str(t) for t in self.args)})"


@dataclass(frozen=True)
class ConjunctiveQuery:
    """A conjunctive query ``name(head_vars) :- body``.

    Duplicate body atoms are collapsed on construction (they are
    semantically idempotent and would spuriously break self-join-freeness).
    """

    head_vars: tuple[Variable, ...]
    body: tuple[Atom, ...]
    name: str = "Q"

    def __post_init__(self):
        if not self.body:
            raise QueryError(f"{self.name}: body must be nonempty")
        seen: set[Atom] = set()
        dedup = []
        for atom in self.body:
            if atom not in seen:
                seen.add(atom)
                dedup.append(atom)
        object.__setattr__(self, "body", tuple(dedup))
        object.__setattr__(self, "head_vars", tuple(self.head_vars))
        arities: dict[str, int] = {}
        for atom in self.body:
            prev = arities.setdefault(atom.relation, atom.arity)
            if prev != atom.arity:
                raise QueryError(
                    f"{self.name}: relation {atom.relation} used with "
                    f"arities {prev} and {atom.arity}"
                )
        body_vars = self.variables()
        for v in self.head_vars:
            if v not in body_vars:
                raise QueryError(
                    f"{self.name}: head variable {v} does not occur in the body"
                )

    def free(self) -> frozenset[Variable]:
        return frozenset(self.head_vars)

    def variables(self) -> frozenset[Variable]:
        out: set[Variable] = set()
        for atom in self.body:
            out |= atom.variables()
        return frozenset(out)

    def existential(self) -> frozenset[Variable]:
        return self.variables() - self.free()

    def relation_symbols(self) -> set[str]:
        return {a.relation for a in self.body}

    def is_boolean(self) -> bool:
        return not self.head_vars

    def __str__(self):
        head = f"{self.name}({','.join(v.name for v in self.head_vars)})"
        return f"{head} :- {', '.join(str(a) for a in self.body)}."


@dataclass(frozen=True)
class UnionQuery:
    """A finite union of CQs sharing the same head-variable tuple."""

    disjuncts: tuple[ConjunctiveQuery, ...]

    def __post_init__(self):
        if not self.disjuncts:
            raise QueryError("a union must contain at least one CQ")
        object.__setattr__(self, "disjuncts", tuple(self.disjuncts))
        first = self.disjuncts[0].head_vars
        for cq in self.disjuncts[1:]:
            if cq.head_vars != first:
                raise QueryError(
                    f"disjunct {cq.name} has head "
                    f"({','.join(v.name for v in cq.head_vars)}), expected "
                    f"({','.join(v.name for v in first)})"
                )

    @property
    def head_vars(self) -> tuple[Variable, ...]:
        return self.disjuncts[0].head_vars

    def __len__(self):
        return len(self.disjuncts)

    def __iter__(self) -> Iterator[ConjunctiveQuery]:
        return iter(self.disjuncts)

    def __str__(self):
        return "\n".join(str(cq) for cq in self.disjuncts)


def is_self_join_free(q: ConjunctiveQuery) -> bool:
    """True iff no relation symbol occurs more than once in the body."""
    return len(q.relation_symbols()) == len(q.body)


# --- parsing ---------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<const>'[^']*')
  | (?P<turnstile>:-)
  | (?P<punct>[(),.])
    """,
    re.VERBOSE,
)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise QuerySyntaxError(
                f"unexpected character {text[pos]!r}", line, pos - line_start + 1
            )
        kind = m.lastgroup
        tok = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, tok, line, pos - line_start + 1))
        for i, ch in enumerate(tok):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0

    def _peek(self) -> _Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _error(self, message: str):
        tok = self._peek()
        if tok is None:
            last = self.tokens[-1] if self.tokens else _Token("", "", 1, 1)
            raise QuerySyntaxError(f"{message}, got end of input", last.line, last.column)
        raise QuerySyntaxError(f"{message}, got {tok.text!r}", tok.line, tok.column)

    def _expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self._peek()
        if tok is None or tok.kind != kind or (text is not None and tok.text != text):
            self._error(f"expected {text or kind}")
        self.i += 1
        return tok

    def _term(self) -> Term:
        tok = self._peek()
        if tok is None:
            self._error("expected a term")
        if tok.kind == "ident":
            self.i += 1
            return Variable(tok.text)
        if tok.kind == "const":
            self.i += 1
            return Constant(tok.text[1:-1])
        self._error("expected a term")

    def _atom(self) -> Atom:
        name = self._expect("ident").text
        self._expect("punct", "(")
        args = [self._term()]
        while self._peek() and self._peek().text == ",":
            self.i += 1
            args.append(self._term())
        self._expect("punct", ")")
        return Atom(name, tuple(args))

    def _cq(self) -> ConjunctiveQuery:
        name_tok = self._expect("ident")
        self._expect("punct", "(")
        head: list[Variable] = []
        if self._peek() and self._peek().text != ")":
            tok = self._expect("ident")
            head.append(Variable(tok.text))
            while self._peek() and self._peek().text == ",":
                self.i += 1
                head.append(Variable(self._expect("ident").text))
        self._expect("punct", ")")
        self._expect("turnstile")
        body = [self._atom()]
        while self._peek() and self._peek().text == ",":
            self.i += 1
            body.append(self._atom())
        self._expect("punct", ".")
        return ConjunctiveQuery(tuple(head), tuple(body), name_tok.text)

    def union(self) -> UnionQuery:
        cqs = [self._cq()]
        while self._peek() is not None:
            cqs.append(self._cq())
        union = UnionQuery(tuple(cqs))
        arities: dict[str, int] = {}
        for cq in cqs:
            for atom in cq.body:
                prev = arities.setdefault(atom.relation, atom.arity)
                if prev != atom.arity:
                    raise QueryError(
                        f"relation {atom.relation} used with arities "
                        f"{prev} and {atom.arity} across the union"
                    )
        return union


def parse_query(text: str) -> UnionQuery:
    """Parse a union of conjunctive queries from rule-notation text."""
    return _Parser(text).union()


def parse_cq(text: str) -> ConjunctiveQuery:
    """Parse a single CQ; errors if the text contains a union."""
    union = parse_query(text)
    if len(union) != 1:
        raise QueryError("expected a single CQ")
    return union.disjuncts[0]


def print_query(q: UnionQuery | ConjunctiveQuery) -> str:
    return str(q)
