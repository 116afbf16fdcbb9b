"""Rule AST, the rule-file parser and its normalizing printer.

Grammar (whitespace-insensitive, ``#`` starts a line comment)::

    file     = { rule [ "." ] } ;
    rule     = [ "[" label "]" ] body "->" head ;
    body     = atom { "^" atom } ;
    head     = atom { "^" atom } ;
    atom     = name "(" [ arg { "," arg } ] ")" ;
    arg      = variable | name | string | number | "true" | "false" ;
    name     = ident [ ":" ident ] ;
    ident    = ( letter | digit | "_" ) { letter | digit | "_" } ;
    variable = "?" letter { letter | digit | "_" } ;
    string   = '"' { char | escape } '"' ;
    number   = [ "-" | "+" ] digit { digit } [ "." digit { digit } ] [ exponent ] ;

Rules are delimited by the ``->`` structure itself; a trailing ``.`` or a
blank line may separate them for readability.  Atoms whose name is a
registered built-in become built-in atoms; otherwise arity 1 is a class
atom and arity 2 a property atom.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union

from ..kb import DEFAULT_PREFIX, Literal, Name, Term, Var

class RuleSyntaxError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"line {line}, column {col}: {message}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class ClassAtom:
    cls: Name
    arg: Term

    @property
    def args(self) -> tuple[Term, ...]:
        return (self.arg,)


@dataclass(frozen=True)
class PropertyAtom:
    prop: Name
    subj: Term
    obj: Term

    @property
    def args(self) -> tuple[Term, ...]:
        return (self.subj, self.obj)


@dataclass(frozen=True)
class BuiltinAtom:
    name: Name
    args: tuple[Term, ...]


RuleAtom = Union[ClassAtom, PropertyAtom, BuiltinAtom]


@dataclass(frozen=True)
class Rule:
    label: str
    body: tuple[RuleAtom, ...]
    head: tuple[RuleAtom, ...]
    line: int = field(default=0, compare=False)

    def body_variables(self) -> set[str]:
        return {a.name for atom in self.body for a in atom.args if isinstance(a, Var)}

    def head_variables(self) -> set[str]:
        return {a.name for atom in self.head for a in atom.args if isinstance(a, Var)}


# -- printing -------------------------------------------------------------


def format_name(name: Name) -> str:
    return name.local if name.prefix == DEFAULT_PREFIX else str(name)


def format_term(t: Term) -> str:
    if isinstance(t, Var):
        return f"?{t.name}"
    if isinstance(t, Name):
        return format_name(t)
    if t.kind == "real":
        return repr(t.value)
    if t.kind == "bool":
        return "true" if t.value else "false"
    s = t.value.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n").replace("\t", "\\t")
    return f'"{s}"'


def format_atom(atom: RuleAtom) -> str:
    if isinstance(atom, ClassAtom):
        head = atom.cls
    elif isinstance(atom, PropertyAtom):
        head = atom.prop
    else:
        head = atom.name
    return f"{format_name(head)}({', '.join(format_term(a) for a in atom.args)})"


def format_rule(rule: Rule) -> str:
    text = " ^ ".join(map(format_atom, rule.body)) + " -> " + " ^ ".join(map(format_atom, rule.head))
    return f"[{rule.label}] {text}" if rule.label else text


def format_rules(rules) -> str:
    return "\n\n".join(format_rule(r) for r in rules) + ("\n" if rules else "")


# -- lexing ---------------------------------------------------------------

_TOKEN_SPEC = [
    ("WS", r"[ \t\r\f\v]+"),
    ("NL", r"\n"),
    ("COMMENT", r"#[^\n]*"),
    ("LABEL", r"\[[^\]\n]*\]"),
    ("ARROW", r"->"),
    ("NUMBER", r"[-+]?\d+(?:\.\d+)?(?:[eE][-+]?\d+)?(?![A-Za-z_:\d])"),
    ("VAR", r"\?[A-Za-z][A-Za-z0-9_]*"),
    ("STRING", r'"(?:[^"\\\n]|\\.)*"'),
    ("NAME", r"[A-Za-z0-9_]+(?::[A-Za-z0-9_]+)?"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("COMMA", r","),
    ("CARET", r"\^"),
    ("DOT", r"\."),
]
_MASTER = re.compile("|".join(f"(?P<{n}>{p})" for n, p in _TOKEN_SPEC))
_UNESCAPE = {"n": "\n", "t": "\t", '"': '"', "\\": "\\"}


@dataclass
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start, pos = 1, 0, 0
    while pos < len(text):
        m = _MASTER.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            ch = text[pos]
            hint = "malformed variable" if ch == "?" else f"unexpected character {ch!r}"
            raise RuleSyntaxError(hint, line, col)
        kind = m.lastgroup
        if kind == "NL":
            line += 1
            line_start = m.end()
        elif kind not in ("WS", "COMMENT"):
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("EOF", "", line, pos - line_start + 1))
    return tokens


# -- parsing --------------------------------------------------------------


class _Parser:
    def __init__(self, text: str, registry):
        self.toks = tokenize(text)
        self.i = 0
        self.registry = registry

    def peek(self) -> Token:
        return self.toks[self.i]

    def take(self, kind: str, what: str) -> Token:
        tok = self.peek()
        if tok.kind != kind:
            found = "end of input" if tok.kind == "EOF" else repr(tok.text)
            raise RuleSyntaxError(f"expected {what}, found {found}", tok.line, tok.col)
        self.i += 1
        return tok

    def parse_file(self) -> list[Rule]:
        rules = []
        while self.peek().kind != "EOF":
            if self.peek().kind == "DOT":
                self.i += 1
                continue
            rules.append(self.parse_rule())
        return rules

    def parse_rule(self) -> Rule:
        start = self.peek()
        label = ""
        if start.kind == "LABEL":
            label = start.text[1:-1].strip()
            self.i += 1
        body = []
        if self.peek().kind != "ARROW":
            body = self.parse_atoms()
        arrow = self.take("ARROW", "'->' or '^'")
        head = self.parse_atoms()
        for atom, tok in head:
            if isinstance(atom, BuiltinAtom):
                raise RuleSyntaxError(f"built-in {atom.name} is not allowed in a rule head", tok.line, tok.col)
        rule = Rule(label, tuple(a for a, _ in body), tuple(a for a, _ in head), start.line)
        bound = rule.body_variables()
        for atom, tok in head:
            for a in atom.args:
                if isinstance(a, Var) and a.name not in bound:
                    raise RuleSyntaxError(
                        f"unsafe rule: head variable ?{a.name} does not occur in the body",
                        tok.line, tok.col,
                    )
        if not body:
            raise RuleSyntaxError("rule body is empty", arrow.line, arrow.col)
        return rule

    def parse_atoms(self) -> list[tuple[RuleAtom, Token]]:
        atoms = [self.parse_atom()]
        while self.peek().kind == "CARET":
            self.i += 1
            atoms.append(self.parse_atom())
        return atoms

    def parse_atom(self) -> tuple[RuleAtom, Token]:
        tok = self.take("NAME", "an atom name")
        name = Name.parse(tok.text)
        self.take("LPAREN", "'('")
        args: list[Term] = []
        if self.peek().kind != "RPAREN":
            args.append(self.parse_arg())
            while self.peek().kind == "COMMA":
                self.i += 1
                args.append(self.parse_arg())
        self.take("RPAREN", "',' or ')'")
        return self.build_atom(name, args, tok), tok

    def parse_arg(self) -> Term:
        tok = self.peek()
        self.i += 1
        if tok.kind == "VAR":
            return Var(tok.text[1:])
        if tok.kind == "NUMBER":
            return Literal.of(float(tok.text))
        if tok.kind == "STRING":
            body = re.sub(r"\\(.)", lambda m: _UNESCAPE.get(m.group(1), m.group(1)), tok.text[1:-1])
            return Literal.of(body)
        if tok.kind == "NAME":
            if tok.text in ("true", "false"):
                return Literal.of(tok.text == "true")
            return Name.parse(tok.text)
        found = "end of input" if tok.kind == "EOF" else repr(tok.text)
        raise RuleSyntaxError(f"expected an argument, found {found}", tok.line, tok.col)

    def build_atom(self, name: Name, args: list[Term], tok: Token) -> RuleAtom:
        builtin = self.registry.get(name) if self.registry is not None else None
        if builtin is not None:
            if len(args) not in builtin.arities:
                raise RuleSyntaxError(
                    f"built-in {name} takes {_arity_text(builtin.arities)} arguments, got {len(args)}",
                    tok.line, tok.col,
                )
            return BuiltinAtom(name, tuple(args))
        if self.registry is not None and self.registry.is_builtin_namespace(name.prefix):
            raise RuleSyntaxError(
                f"unknown built-in {name}; registered: {', '.join(self.registry.names())}",
                tok.line, tok.col,
            )
        if len(args) == 1:
            return ClassAtom(name, args[0])
        if len(args) == 2:
            return PropertyAtom(name, args[0], args[1])
        raise RuleSyntaxError(
            f"{name} has arity {len(args)}: not a registered built-in and not a class (1) or property (2) atom",
            tok.line, tok.col,
        )


def _arity_text(arities) -> str:
    a = sorted(arities)
    return str(a[0]) if len(a) == 1 else " or ".join(map(str, a))


def parse_rules(text: str, registry=None) -> list[Rule]:
    """Parse rule text; ``registry`` defaults to the standard built-in registry."""
    if registry is None:
        from .builtins import BuiltinRegistry

        registry = BuiltinRegistry.standard()
    return _Parser(text, registry).parse_file()
