"""
Timbuk text format.

    Ops a:2 b:0
    Automaton A
    States q0 q1
    Final States q0
    Transitions
    b -> q1
    a(q1,q1) -> q0

Rules are written bottom-up, so `a(q1,q1) -> q0` is the top-down transition
<q0, a, q1 q1> and the final states are the initial states of the top-down
automaton. `#` starts a comment; `b() -> q` and state arity annotations such
as `q0:0` are accepted.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from automata.core import RankedAlphabet, TreeAutomaton
from config import logger
from utils.errors import TimbukSyntaxError

_TOKEN = re.compile(
    r"(?P<skip>[ \t\r]+|#[^\n]*)"
    r"|(?P<newline>\n)"
    r"|(?P<arrow>->)"
    r"|(?P<punct>[(),])"
    r"|(?P<word>[^\s(),#]+)"
)
_NAME = re.compile(r"^[^\s(),#:]+$")
_KEYWORDS = ("Ops", "Automaton", "States", "Final", "Transitions")


@dataclass(frozen=True)
class Token:
    text: str
    line: int
    column: int


@dataclass
class TimbukDocument:
    """Parsed document before conversion to an automaton."""

    ops: list[tuple[str, int]] = field(default_factory=list)
    name: str = "A"
    states: list[str] = field(default_factory=list)
    final_states: list[str] = field(default_factory=list)
    # (symbol, children, parent) in bottom-up reading
    transitions: list[tuple[str, tuple[str, ...], str]] = field(default_factory=list)

    def to_automaton(self) -> TreeAutomaton:
        rules = [
            (parent, symbol, children) for symbol, children, parent in self.transitions
        ]
        return TreeAutomaton.from_rules(
            RankedAlphabet.from_pairs(self.ops),
            rules,
            self.final_states,
            states=self.states,
        )


def _tokenize(text: str) -> list[Token]:
    tokens = []
    line, line_start = 1, 0
    position = 0
    while position < len(text):
        match = _TOKEN.match(text, position)
        if match is None:
            raise TimbukSyntaxError(
                f"unexpected character {text[position]!r}",
                line,
                position - line_start + 1,
            )
        kind = match.lastgroup
        if kind == "newline":
            line, line_start = line + 1, match.end()
        elif kind != "skip":
            tokens.append(Token(match.group(), line, match.start() - line_start + 1))
        position = match.end()
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.position = 0
        last = self.tokens[-1] if self.tokens else Token("", 1, 1)
        self.end = Token("<end of input>", last.line, last.column + len(last.text))

    def peek(self) -> Token:
        if self.position < len(self.tokens):
            return self.tokens[self.position]
        return self.end

    def at_end(self) -> bool:
        return self.position >= len(self.tokens)

    def next(self) -> Token:
        token = self.peek()
        self.position += 1
        return token

    def fail(self, message: str, token: Token | None = None):
        token = token or self.peek()
        raise TimbukSyntaxError(message, token.line, token.column)

    def expect(self, text: str) -> Token:
        token = self.next()
        if token.text != text:
            self.fail(f"expected '{text}', found '{token.text}'", token)
        return token

    def name(self, what: str) -> Token:
        token = self.next()
        if self.position > len(self.tokens) or not _NAME.match(token.text):
            self.fail(f"expected {what}, found '{token.text}'", token)
        return token

    def words_until(self, stop: str) -> list[Token]:
        words = []
        while not self.at_end() and self.peek().text != stop:
            token = self.next()
            if token.text in "()," or token.text == "->":
                self.fail(f"unexpected '{token.text}'", token)
            words.append(token)
        return words

    def document(self) -> TimbukDocument:
        doc = TimbukDocument()
        self.expect("Ops")
        ranks: dict[str, int] = {}
        for token in self.words_until("Automaton"):
            symbol, sep, rank = token.text.rpartition(":")
            if not sep or not symbol or not rank.isdigit():
                self.fail(f"expected symbol:rank, found '{token.text}'", token)
            if symbol in ranks:
                self.fail(f"symbol '{symbol}' declared twice", token)
            ranks[symbol] = int(rank)
            doc.ops.append((symbol, int(rank)))
        self.expect("Automaton")
        doc.name = self.name("automaton name").text
        self.expect("States")
        declared: set[str] = set()
        for token in self.words_until("Final"):
            state = token.text.split(":", 1)[0]
            if not state or state in _KEYWORDS:
                self.fail(f"invalid state name '{token.text}'", token)
            if state in declared:
                self.fail(f"state '{state}' declared twice", token)
            declared.add(state)
            doc.states.append(state)
        self.expect("Final")
        self.expect("States")
        for token in self.words_until("Transitions"):
            state = token.text.split(":", 1)[0]
            if state not in declared:
                self.fail(f"undeclared state '{state}'", token)
            if state not in doc.final_states:
                doc.final_states.append(state)
        self.expect("Transitions")
        while not self.at_end():
            doc.transitions.append(self.rule(ranks, declared))
        return doc

    def rule(
        self, ranks: dict[str, int], declared: set[str]
    ) -> tuple[str, tuple[str, ...], str]:
        symbol_token = self.name("symbol")
        if symbol_token.text not in ranks:
            self.fail(f"undeclared symbol '{symbol_token.text}'", symbol_token)
        children: list[str] = []
        if self.peek().text == "(":
            self.next()
            if self.peek().text != ")":
                while True:
                    child = self.name("state")
                    if child.text not in declared:
                        self.fail(f"undeclared state '{child.text}'", child)
                    children.append(child.text)
                    if self.peek().text == ",":
                        self.next()
                        continue
                    break
            self.expect(")")
        rank = ranks[symbol_token.text]
        if len(children) != rank:
            self.fail(
                f"symbol '{symbol_token.text}' has arity {rank} but is applied to "
                f"{len(children)} states",
                symbol_token,
            )
        self.expect("->")
        parent = self.name("state")
        if parent.text not in declared:
            self.fail(f"undeclared state '{parent.text}'", parent)
        return symbol_token.text, tuple(children), parent.text


def read_timbuk_document(text: str) -> TimbukDocument:
    return _Parser(text).document()


def parse_timbuk(text: str) -> TreeAutomaton:
    """
    Parse a Timbuk document into a top-down automaton.

    Raises:
        TimbukSyntaxError: on malformed input, arity mismatches and undeclared
            symbols or states, with the 1-based line and column.
    """
    return read_timbuk_document(text).to_automaton()


def _state_labels(a: TreeAutomaton) -> list[str]:
    labels = [a.name_of(q) for q in range(a.state_count)]
    valid = all(_NAME.match(label) and label not in _KEYWORDS for label in labels)
    if not valid or len(set(labels)) != len(labels):
        labels = [f"q{q}" for q in range(a.state_count)]
    return labels


def serialize_timbuk(a: TreeAutomaton, name: str = "A") -> str:
    """
    Render `a` as Timbuk text.

    States are listed by index and transitions in the automaton's sorted order,
    so equal automata always give identical text.
    """
    labels = _state_labels(a)
    lines = [
        " ".join(["Ops"] + [f"{symbol.name}:{symbol.rank}" for symbol in a.alphabet]),
        "",
        f"Automaton {name}",
        " ".join(["States"] + labels),
        " ".join(["Final", "States"] + [labels[q] for q in sorted(a.initial)]),
        "Transitions",
    ]
    for t in a.transitions:
        symbol = a.alphabet[t.symbol].name
        if t.targets:
            children = ",".join(labels[r] for r in t.targets)
            lines.append(f"{symbol}({children}) -> {labels[t.source]}")
        else:
            lines.append(f"{symbol} -> {labels[t.source]}")
    return "\n".join(lines) + "\n"


def load_timbuk(path: str | Path) -> TreeAutomaton:
    path = Path(path)
    logger.debug(f"reading {path}")
    return parse_timbuk(path.read_text())


def dump_timbuk(a: TreeAutomaton, path: str | Path, name: str = "A") -> None:
    Path(path).write_text(serialize_timbuk(a, name))
