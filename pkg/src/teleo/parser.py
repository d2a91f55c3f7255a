"""Recursive-descent parser for TR program source (``.tr`` files)."""

from __future__ import annotations

from typing import List as PyList, Optional

from .errors import (
    DuplicateDefinition,
    ProgramSyntaxError,
    TermSyntaxError,
    UnsupportedFeature,
)
from .lexer import Token, line_col, tokenize
from .syntax import (
    DECLARATION_KINDS,
    AtomDisjunction,
    BinOp,
    Comparison,
    Condition,
    Declaration,
    Expr,
    IntRange,
    Loc,
    NegatedQuery,
    NumberLit,
    Procedure,
    Program,
    Query,
    Rule,
    RuleAction,
    TrueLiteral,
    TypeDef,
    TypeUnion,
    VarRef,
)
from .terms import COMPARISONS, Atom, Term, _TermParser

_KEYWORDS = frozenset({"while", "until", "min", "not", "true"})
_TIMED = {"for": "timed action sequence", "wait": "wait ... repeat action",
          "repeat": "wait ... repeat action"}


class _ProgramParser:
    def __init__(self, source: str):
        self.source = source
        try:
            self.tokens = tokenize(source, comments=True)
        except TermSyntaxError as e:
            line, col = line_col(source, _char_offset(source, e.offset))
            raise ProgramSyntaxError(str(e).rsplit(" at offset", 1)[0], line, col) from None
        self.pos = 0
        self.names: dict[str, Loc] = {}

    # -- token helpers

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.tokens[min(self.pos + k, len(self.tokens) - 1)]

    def loc(self, tok: Optional[Token] = None) -> Loc:
        tok = tok or self.tok
        return Loc(tok.line, tok.col)

    def error(self, message: str, tok: Optional[Token] = None):
        tok = tok or self.tok
        raise ProgramSyntaxError(message, tok.line, tok.col)

    def describe(self, tok: Token) -> str:
        return "end of input" if tok.kind == "eof" else repr(tok.text)

    def is_punct(self, value: str, tok: Optional[Token] = None) -> bool:
        tok = tok or self.tok
        return tok.kind == "punct" and tok.value == value

    def is_name(self, value: str, tok: Optional[Token] = None) -> bool:
        tok = tok or self.tok
        return tok.kind == "name" and tok.value == value

    def expect(self, value: str) -> Token:
        if not self.is_punct(value):
            self.error(f"expected {value!r}, found {self.describe(self.tok)}")
        tok = self.tok
        self.pos += 1
        return tok

    def expect_name(self, what: str) -> Token:
        if self.tok.kind != "name":
            self.error(f"expected {what}, found {self.describe(self.tok)}")
        tok = self.tok
        self.pos += 1
        return tok

    def define(self, name: str, tok: Token):
        if name in self.names:
            raise DuplicateDefinition(name, tok.line, tok.col)
        self.names[name] = self.loc(tok)

    # -- top level

    def program(self) -> Program:
        type_defs, decls, sigs, procs, sig_locs = [], [], {}, {}, {}
        while self.tok.kind != "eof":
            tok = self.tok
            if tok.kind != "name":
                self.error(f"expected a definition, found {self.describe(tok)}")
            nxt = self.peek()
            if self.is_punct("::=", nxt):
                type_defs.append(self.type_def())
            elif tok.value in DECLARATION_KINDS and nxt.kind == "name":
                decls.extend(self.declarations())
            elif self.is_punct(":", nxt):
                name, types = self.proc_sig()
                self.define(name, tok)
                sigs[name] = types
                sig_locs[name] = self.loc(tok)
            elif self.is_punct("(", nxt):
                proc = self.procedure()
                if proc.name in procs:
                    raise DuplicateDefinition(proc.name, tok.line, tok.col)
                procs[proc.name] = proc
            else:
                self.error(f"unexpected {self.describe(nxt)} after {tok.value!r}", nxt)
        return Program(tuple(type_defs), tuple(decls), sigs, procs, sig_locs)

    def type_def(self) -> TypeDef:
        name_tok = self.expect_name("type name")
        self.expect("::=")
        self.define(name_tok.value, name_tok)
        loc = self.loc(name_tok)
        if self.is_punct("("):
            self.pos += 1
            lo = self.integer()
            self.expect("..")
            hi = self.integer()
            self.expect(")")
            if lo > hi:
                self.error(f"empty range ({lo} .. {hi})", name_tok)
            return TypeDef(name_tok.value, IntRange(lo, hi), loc)
        names = [self.expect_name("atom or type name").value]
        sep = None
        while self.tok.kind == "punct" and self.tok.value in ("|", "||"):
            if sep is not None and self.tok.value != sep:
                self.error("cannot mix '|' and '||' in one type definition")
            sep = self.tok.value
            self.pos += 1
            names.append(self.expect_name("atom or type name").value)
        if sep == "||":
            return TypeDef(name_tok.value, TypeUnion(tuple(names)), loc)
        return TypeDef(name_tok.value, AtomDisjunction(tuple(names)), loc)

    def integer(self) -> int:
        if self.tok.kind != "int":
            self.error(f"expected an integer, found {self.describe(self.tok)}")
        v = self.tok.value
        self.pos += 1
        return v

    def type_list(self) -> tuple:
        if self.tok.kind == "name":
            # a single bare type name
            return (self.expect_name("type name").value,)
        self.expect("(")
        types = []
        if not self.is_punct(")"):
            types.append(self.expect_name("type name").value)
            while self.is_punct(","):
                self.pos += 1
                types.append(self.expect_name("type name").value)
        self.expect(")")
        return tuple(types)

    def declarations(self) -> PyList[Declaration]:
        kind = self.expect_name("declaration kind").value
        out = [self.one_declaration(kind)]
        while True:
            if self.is_punct(","):
                self.pos += 1
                out.append(self.one_declaration(kind))
                continue
            # comma-free continuation lines: `name : (types)` not followed by `~>`
            if self.tok.kind == "name" and self.is_punct(":", self.peek()):
                save = self.pos
                try:
                    self.pos += 2
                    self.type_list()
                    continuing = not self.is_punct("~>") and not self.is_punct("<=")
                except ProgramSyntaxError:
                    continuing = False
                self.pos = save
                if continuing:
                    out.append(self.one_declaration(kind))
                    continue
            return out

    def one_declaration(self, kind: str) -> Declaration:
        name_tok = self.expect_name("declared name")
        self.expect(":")
        types = self.type_list()
        if self.is_punct("~>"):
            self.error("procedure signature inside a declaration list")
        self.define(name_tok.value, name_tok)
        return Declaration(kind, name_tok.value, types, self.loc(name_tok))

    def proc_sig(self):
        name_tok = self.expect_name("procedure name")
        self.expect(":")
        types = self.type_list()
        if self.is_punct("<="):
            raise UnsupportedFeature("relation type declaration", name_tok.line, name_tok.col)
        self.expect("~>")
        return name_tok.value, types

    def procedure(self) -> Procedure:
        name_tok = self.expect_name("procedure name")
        self.expect("(")
        params = []
        if not self.is_punct(")"):
            params.append(self.param())
            while self.is_punct(","):
                self.pos += 1
                params.append(self.param())
        self.expect(")")
        if self.is_punct("<=") or self.is_punct("::"):
            raise UnsupportedFeature("relation/function definition", name_tok.line, name_tok.col)
        if len(set(params)) != len(params):
            self.error(f"repeated parameter in {name_tok.value}", name_tok)
        self.expect("{")
        rules = []
        while not self.is_punct("}"):
            if self.tok.kind == "eof":
                self.error(f"unterminated procedure {name_tok.value!r}")
            rules.append(self.rule())
        self.expect("}")
        if not rules:
            self.error(f"procedure {name_tok.value!r} has no rules", name_tok)
        return Procedure(name_tok.value, tuple(params), tuple(rules), self.loc(name_tok))

    def param(self) -> str:
        if self.tok.kind != "var":
            self.error(f"expected a parameter variable, found {self.describe(self.tok)}")
        v = self.tok.value
        self.pos += 1
        return v

    # -- rules

    def rule(self) -> Rule:
        start = self.tok
        guard = self.conditions()
        wc, wt, uc, ut = (), 0, (), 0
        if self.is_name("while"):
            self.pos += 1
            wc, wt = self.continuation_clause("while")
        if self.is_name("until"):
            self.pos += 1
            uc, ut = self.continuation_clause("until")
        if not self.is_punct("~>"):
            self.error(f"expected '~>', found {self.describe(self.tok)}")
        self.pos += 1
        rhs = self.rhs()
        return Rule(guard, rhs, wc, wt, uc, ut, self.loc(start))

    def continuation_clause(self, keyword: str):
        conds: tuple = ()
        t = 0
        if not self.is_name("min"):
            if self.is_punct("~>") or self.is_name("until"):
                self.error(f"empty {keyword} clause")
            conds = self.conditions()
        if self.is_name("min"):
            self.pos += 1
            tok = self.tok
            if tok.kind not in ("int", "float"):
                self.error("expected a number after 'min'")
            if tok.value < 0:
                self.error("minimum time must be non-negative")
            t = tok.value
            self.pos += 1
        return conds, t

    def conditions(self) -> tuple:
        conds = [self.condition()]
        while self.is_punct("&"):
            self.pos += 1
            conds.append(self.condition())
        return tuple(conds)

    def condition(self) -> Condition:
        tok = self.tok
        loc = self.loc(tok)
        if tok.kind == "name":
            if tok.value == "true" and not self.is_punct("(", self.peek()):
                self.pos += 1
                return TrueLiteral(loc)
            if tok.value == "not":
                self.pos += 1
                return NegatedQuery(self.negated_query(), loc)
            if tok.value in _KEYWORDS:
                self.error(f"unexpected keyword {tok.value!r}")
            q = Query(self.predicate(), loc)
            if self.tok.kind == "punct" and self.tok.value in COMPARISONS:
                self.error("comparison operands must be arithmetic expressions")
            return q
        if self.is_punct("(") and self.is_punct(")", self.peek()):
            self.pos += 2
            return TrueLiteral(loc)
        lhs = self.expr()
        op_tok = self.tok
        if op_tok.kind != "punct" or op_tok.value not in COMPARISONS:
            self.error(f"expected a comparison operator, found {self.describe(op_tok)}")
        self.pos += 1
        rhs = self.expr()
        return Comparison(lhs, op_tok.value, rhs, loc)

    def negated_query(self) -> Query:
        tok = self.tok
        if self.is_punct("("):
            self.pos += 1
            inner = self.conditions()
            self.expect(")")
            if len(inner) != 1 or not isinstance(inner[0], Query):
                raise UnsupportedFeature("negation of a conjunction", tok.line, tok.col)
            return inner[0]
        if tok.kind != "name" or tok.value in _KEYWORDS:
            self.error("'not' must be followed by a query")
        return Query(self.predicate(), self.loc(tok))

    def predicate(self) -> Term:
        """Atom or compound whose '(' must directly follow the functor."""
        tok = self.tok
        p = _TermParser(self.source, self.tokens, self.pos)
        nxt = self.peek()
        adjacent = self.is_punct("(", nxt) and nxt.offset == tok.offset + len(tok.text)
        try:
            if adjacent:
                term = p.primary()
            else:
                term = Atom(tok.value)
                p.pos += 1
        except TermSyntaxError as e:
            bad = p.tok
            raise ProgramSyntaxError(str(e).rsplit(" at offset", 1)[0], bad.line, bad.col) from None
        self.pos = p.pos
        return term

    # -- expressions

    def expr(self) -> Expr:
        left = self.term_expr()
        while self.tok.kind == "punct" and self.tok.value in ("+", "-"):
            op = self.tok.value
            self.pos += 1
            left = BinOp(op, left, self.term_expr())
        return left

    def term_expr(self) -> Expr:
        left = self.factor()
        while self.tok.kind == "punct" and self.tok.value in ("*", "/"):
            op = self.tok.value
            self.pos += 1
            left = BinOp(op, left, self.factor())
        return left

    def factor(self) -> Expr:
        tok = self.tok
        if tok.kind in ("int", "float"):
            self.pos += 1
            return NumberLit(tok.value)
        if tok.kind == "var":
            self.pos += 1
            return VarRef(tok.value)
        if self.is_punct("("):
            self.pos += 1
            e = self.expr()
            self.expect(")")
            return e
        self.error(f"expected a number, variable or '(', found {self.describe(tok)}")

    # -- right-hand sides

    def rhs(self) -> RuleAction:
        if self.is_punct("(") and self.is_punct(")", self.peek()):
            self.pos += 2
            self.reject_timed()
            return RuleAction()
        parenthesised = False
        if self.is_punct("("):
            parenthesised = True
            self.pos += 1
        items, locs = [], []
        while True:
            tok = self.tok
            if tok.kind != "name" or tok.value in _KEYWORDS:
                self.error(f"expected an action or procedure call, found {self.describe(tok)}")
            items.append(self.predicate())
            locs.append(self.loc(tok))
            self.reject_timed()
            if self.is_punct(","):
                self.pos += 1
                continue
            break
        if parenthesised:
            self.expect(")")
            self.reject_timed()
        return RuleAction(tuple(items), tuple(locs))

    def reject_timed(self):
        tok = self.tok
        if tok.kind == "name" and tok.value in _TIMED:
            raise UnsupportedFeature(_TIMED[tok.value], tok.line, tok.col)
        if self.is_punct(";"):
            raise UnsupportedFeature("timed action sequence", tok.line, tok.col)


def _char_offset(text: str, byte_offset: int) -> int:
    return len(text.encode("utf-8", "surrogatepass")[:byte_offset].decode("utf-8", "ignore"))


def parse_program(source: str) -> Program:
    """Parse TR source text into a :class:`Program`.

    Raises ProgramSyntaxError (with line/column), UnsupportedFeature or
    DuplicateDefinition.
    """
    try:
        return _ProgramParser(source).program()
    except RecursionError:
        raise ProgramSyntaxError("nesting too deep", 1, 1) from None
