"""Lexer and recursive-descent parser for hyperflow program files.

Grammar (whitespace-insensitive, ``#`` starts a line comment)::

    file      := decl* stmt
    decl      := ("vis" | "hid") IDENT ":" domain ";"
    domain    := "bool" | "{" INT ".." INT "}" | "{" IDENT ("," IDENT)* "}"
    stmt      := choice (";" choice)*
    choice    := atom ("[" expr "]" atom)*
    atom      := "skip" | "abort" | "{" expr "}"
               | IDENT ":=" expr | IDENT ":in" dexpr
               | "reveal" (dexpr | expr)
               | "if" expr "then" stmt ["else" stmt] "fi"
               | "while" expr "do" stmt "od"
               | "[[" decl* stmt "]]"
               | "(" stmt ")"
    dexpr     := "uniform" "{" expr ("," expr)* "}" | "uniform" "{" expr ".." expr "}"
               | "{{" expr "@" expr ("," expr "@" expr)* "}}"
               | "point" "(" expr ")"

Expressions follow the usual precedence: ``or`` < ``and`` < ``not`` <
comparisons < ``+ -`` < ``* / div mod`` < unary minus.
"""

import re
from dataclasses import dataclass
from typing import Any, List, Optional, Set, Tuple

from hyperflow.core.errors import ParseError
from hyperflow.lang.ast import (
    Abort, Assert, AssignHid, AssignVis, BinOp, ChooseHid, ChooseVis, Const, DExpr, Enumerated, Expr, If,
    Neg, Not, PChoice, PointOf, Program, RevealDist, RevealExpr, Scope, Seq, Skip, TupleExpr, Uniform,
    UniformRange, Var, While,
)
from hyperflow.lang.evaluator import constant_value
from hyperflow.lang.space import Domain, Space, VarDecl, Visibility

KEYWORDS = frozenset({
    "vis", "hid", "bool", "skip", "abort", "reveal", "if", "then", "else", "fi", "while", "do", "od",
    "uniform", "point", "div", "mod", "and", "or", "not", "true", "false",
})

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<newline>\n)
  | (?P<comment>\#[^\n]*)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<choose>:in(?![A-Za-z0-9_]))
  | (?P<sym>:=|\[\[|\]\]|\{\{|\}\}|\.\.|!=|<=|>=|[:;,@()\[\]{}+\-*/=<>])
    """,
    re.VERBOSE,
)


@dataclass
class Token:
    kind: str
    text: str
    line: int
    column: int


def tokenize(text: str) -> List[Token]:
    """Split program text into tokens; keywords and symbols use their text as kind."""
    tokens: List[Token] = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = match.lastgroup
        lexeme = match.group()
        column = pos - line_start + 1
        if kind == "newline":
            line += 1
            line_start = match.end()
        elif kind == "int":
            tokens.append(Token("INT", lexeme, line, column))
        elif kind == "ident":
            tokens.append(Token(lexeme if lexeme in KEYWORDS else "IDENT", lexeme, line, column))
        elif kind in ("choose", "sym"):
            tokens.append(Token(lexeme, lexeme, line, column))
        pos = match.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


class Parser:
    """Recursive-descent parser that resolves names while it reads.

    Reads of scope-local variables are checked for definite assignment unless
    locals are implicitly initialised.
    """

    def __init__(self, text: str, implicit_uniform_locals: bool = False):
        self.tokens = tokenize(text)
        self.pos = 0
        self.implicit_uniform_locals = implicit_uniform_locals
        self.space = Space()
        self.locals: Set[str] = set()
        self.initialized: Set[str] = set()
        self.variables_allowed = True

    # Token helpers

    @property
    def current(self) -> Token:
        return self.tokens[self.pos]

    def _error(self, message: str, token: Optional[Token] = None) -> ParseError:
        token = token or self.current
        return ParseError(message, token.line, token.column)

    def _at(self, kind: str) -> bool:
        return self.current.kind == kind

    def _advance(self) -> Token:
        token = self.current
        self.pos += 1
        return token

    def _expect(self, kind: str) -> Token:
        token = self.current
        # Doubled brackets lex greedily; split one when a single is wanted
        if kind in ("]", "}") and token.kind == kind * 2:
            self.tokens[self.pos] = Token(kind, kind, token.line, token.column + 1)
            return Token(kind, kind, token.line, token.column)
        if token.kind != kind:
            found = token.text or "end of input"
            raise self._error(f"expected '{kind}', found '{found}'")
        return self._advance()

    def _expect_double(self, kind: str) -> None:
        if self._at(kind):
            self._advance()
            return
        self._expect(kind[0])
        self._expect(kind[0])

    # Declarations

    def parse_decls(self) -> List[VarDecl]:
        decls = []
        while self._at("vis") or self._at("hid"):
            visibility = Visibility(self._advance().kind)
            name_token = self._expect("IDENT")
            self._expect(":")
            domain = self.parse_domain()
            self._expect(";")
            decls.append(VarDecl(name_token.text, visibility, domain))
        return decls

    def parse_domain(self) -> Domain:
        if self._at("bool"):
            self._advance()
            return Domain.boolean()
        start = self._expect("{")
        try:
            if self._at("IDENT"):
                names = [self._advance().text]
                while self._at(","):
                    self._advance()
                    names.append(self._expect("IDENT").text)
                self._expect("}")
                return Domain.symbols(names)
            lo = self._signed_int()
            self._expect("..")
            hi = self._signed_int()
            self._expect("}")
            return Domain.int_range(lo, hi)
        except ParseError as e:
            if e.line:
                raise
            raise ParseError(e.message, start.line, start.column) from None

    def _signed_int(self) -> int:
        sign = 1
        if self._at("-"):
            self._advance()
            sign = -1
        return sign * int(self._expect("INT").text)

    def _enter_space(self, decls: List[VarDecl], token: Token) -> Space:
        try:
            return self.space.extend(decls)
        except ParseError as e:
            raise ParseError(e.message, token.line, token.column) from None

    # Statements

    def parse_file(self) -> Tuple[Space, Program]:
        start = self.current
        decls = self.parse_decls()
        self.space = self._enter_space(decls, start)
        self.initialized = {d.name for d in decls}
        program = self.parse_stmt()
        self._expect("EOF")
        return self.space, program

    def parse_stmt(self) -> Program:
        items = [self.parse_choice()]
        while self._at(";"):
            self._advance()
            items.append(self.parse_choice())
        program = items[-1]
        for item in reversed(items[:-1]):
            program = Seq(item, program)
        return program

    def parse_choice(self) -> Program:
        before = set(self.initialized)
        program = self.parse_atom()
        while self._at("["):
            self._advance()
            after_left = self.initialized
            self.initialized = set(before)
            prob = self.parse_expr()
            self._expect("]")
            right = self.parse_atom()
            self.initialized = after_left & self.initialized
            program = PChoice(prob, program, right)
        return program

    def parse_atom(self) -> Program:
        token = self.current
        if token.kind == "skip":
            self._advance()
            return Skip()
        if token.kind == "abort":
            self._advance()
            return Abort()
        if token.kind == "{":
            self._advance()
            prob = self.parse_expr()
            self._expect("}")
            return Assert(prob)
        if token.kind == "IDENT":
            return self._parse_assignment()
        if token.kind == "reveal":
            self._advance()
            if self._at_dexpr():
                return RevealDist(self.parse_dexpr())
            return RevealExpr(self.parse_expr())
        if token.kind == "if":
            return self._parse_if()
        if token.kind == "while":
            self._advance()
            prob = self.parse_expr()
            self._expect("do")
            saved = set(self.initialized)
            body = self.parse_stmt()
            self.initialized = saved
            self._expect("od")
            return While(prob, body)
        if token.kind == "[[":
            return self._parse_scope()
        if token.kind == "(":
            self._advance()
            program = self.parse_stmt()
            self._expect(")")
            return program
        found = token.text or "end of input"
        raise self._error(f"expected a statement, found '{found}'")

    def _parse_assignment(self) -> Program:
        name_token = self._advance()
        decl = self.space.lookup(name_token.text)
        if decl is None:
            raise self._error(f"assignment to undeclared variable '{name_token.text}'", name_token)
        visible = decl.visibility is Visibility.VIS
        if self._at(":="):
            self._advance()
            expr = self.parse_expr()
            program = AssignVis(decl.name, expr) if visible else AssignHid(decl.name, expr)
        elif self._at(":in"):
            self._advance()
            dexpr = self.parse_dexpr()
            program = ChooseVis(decl.name, dexpr) if visible else ChooseHid(decl.name, dexpr)
        else:
            raise self._error(f"expected ':=' or ':in' after '{decl.name}'")
        self.initialized.add(decl.name)
        return program

    def _parse_if(self) -> Program:
        self._advance()
        cond = self.parse_expr()
        self._expect("then")
        before = set(self.initialized)
        then = self.parse_stmt()
        after_then = self.initialized
        self.initialized = before
        orelse: Program = Skip()
        if self._at("else"):
            self._advance()
            orelse = self.parse_stmt()
        self.initialized = after_then & self.initialized
        self._expect("fi")
        return If(cond, then, orelse)

    def _parse_scope(self) -> Program:
        start = self._advance()
        decls = self.parse_decls()
        outer_space, outer_locals = self.space, set(self.locals)
        self.space = self._enter_space(decls, start)
        names = {d.name for d in decls}
        self.locals |= names
        if self.implicit_uniform_locals:
            self.initialized |= names
        else:
            self.initialized -= names
        body = self.parse_stmt()
        self._expect_double("]]")
        self.space, self.locals = outer_space, outer_locals
        self.initialized -= names
        return Scope(tuple(decls), body)

    # Distribution expressions

    def _at_dexpr(self) -> bool:
        return self._at("uniform") or self._at("{{") or self._at("point")

    def parse_dexpr(self) -> DExpr:
        if self._at("uniform"):
            self._advance()
            self._expect("{")
            first = self.parse_expr()
            if self._at(".."):
                self._advance()
                hi = self.parse_expr()
                self._expect("}")
                return UniformRange(first, hi)
            items = [first]
            while self._at(","):
                self._advance()
                items.append(self.parse_expr())
            self._expect("}")
            return Uniform(tuple(items))
        if self._at("point"):
            self._advance()
            self._expect("(")
            expr = self.parse_expr()
            self._expect(")")
            return PointOf(expr)
        if self._at("{{"):
            self._advance()
            entries = [self._parse_weighted()]
            while self._at(","):
                self._advance()
                entries.append(self._parse_weighted())
            self._expect_double("}}")
            return Enumerated(tuple(entries))
        raise self._error("expected a distribution expression")

    def _parse_weighted(self) -> Tuple[Expr, Expr]:
        value = self.parse_expr()
        self._expect("@")
        return value, self.parse_expr()

    # Expressions

    def parse_expr(self) -> Expr:
        left = self._parse_and()
        while self._at("or"):
            self._advance()
            left = BinOp("or", left, self._parse_and())
        return left

    def _parse_and(self) -> Expr:
        left = self._parse_not()
        while self._at("and"):
            self._advance()
            left = BinOp("and", left, self._parse_not())
        return left

    def _parse_not(self) -> Expr:
        if self._at("not"):
            self._advance()
            return Not(self._parse_not())
        return self._parse_compare()

    def _parse_compare(self) -> Expr:
        left = self._parse_sum()
        if self.current.kind in ("=", "!=", "<", "<=", ">", ">="):
            op = self._advance().kind
            left = BinOp(op, left, self._parse_sum())
            if self.current.kind in ("=", "!=", "<", "<=", ">", ">="):
                raise self._error("comparisons do not chain; use parentheses")
        return left

    def _parse_sum(self) -> Expr:
        left = self._parse_product()
        while self.current.kind in ("+", "-"):
            op = self._advance().kind
            left = BinOp(op, left, self._parse_product())
        return left

    def _parse_product(self) -> Expr:
        left = self._parse_unary()
        while self.current.kind in ("*", "/", "div", "mod"):
            op = self._advance().kind
            left = BinOp(op, left, self._parse_unary())
        return left

    def _parse_unary(self) -> Expr:
        if self._at("-"):
            self._advance()
            if self._at("INT"):
                return Const(-int(self._advance().text))
            return Neg(self._parse_unary())
        return self._parse_primary()

    def _parse_primary(self) -> Expr:
        token = self.current
        if token.kind == "INT":
            self._advance()
            return Const(int(token.text))
        if token.kind in ("true", "false"):
            self._advance()
            return Const(token.kind == "true")
        if token.kind == "IDENT":
            self._advance()
            return self._resolve(token)
        if token.kind == "(":
            self._advance()
            items = [self.parse_expr()]
            while self._at(","):
                self._advance()
                items.append(self.parse_expr())
            self._expect(")")
            return items[0] if len(items) == 1 else TupleExpr(tuple(items))
        found = token.text or "end of input"
        raise self._error(f"expected an expression, found '{found}'")

    def _resolve(self, token: Token) -> Expr:
        name = token.text
        if self.variables_allowed and self.space.lookup(name) is not None:
            if name in self.locals and name not in self.initialized:
                raise self._error(f"local '{name}' is read before it is assigned", token)
            return Var(name)
        if name in self.space.symbols:
            return Const(name)
        raise self._error(f"unbound identifier '{name}'", token)


def parse(text: str, implicit_uniform_locals: bool = False) -> Tuple[Space, Program]:
    """Parse a program file into its declarations and program."""
    return Parser(text, implicit_uniform_locals).parse_file()


def parse_program(text: str, space: Space, implicit_uniform_locals: bool = False) -> Program:
    """Parse a statement against existing declarations."""
    parser = Parser(text, implicit_uniform_locals)
    parser.space = space
    parser.initialized = {d.name for d in space.decls}
    program = parser.parse_stmt()
    parser._expect("EOF")
    return program


def parse_expression(text: str, space: Space) -> Expr:
    """Parse a single expression against existing declarations."""
    parser = Parser(text)
    parser.space = space
    parser.initialized = {d.name for d in space.decls}
    expr = parser.parse_expr()
    parser._expect("EOF")
    return expr


def parse_value(text: str, space: Space) -> Any:
    """Parse a literal value: integers, rationals, Booleans, symbols and tuples of those."""
    parser = Parser(text)
    parser.space = space
    parser.variables_allowed = False
    expr = parser.parse_expr()
    parser._expect("EOF")
    value = constant_value(expr)
    if value is None:
        raise ParseError(f"'{text}' is not a literal value")
    return value


def parse_space(text: str) -> Space:
    """Parse a block of declarations on its own."""
    parser = Parser(text)
    start = parser.current
    space = parser._enter_space(parser.parse_decls(), start)
    parser._expect("EOF")
    return space
