"""Propositional syntax, parsing, model enumeration and consequence relations.

Two consequence relations live here.  The monotonic one is classical
entailment over a finite knowledge base, decided by truth-table model
enumeration (exact, no SAT solver; the whole toolkit operates at desk
scale).  The non-monotonic one is the ranked-default relation over a
stratified knowledge base (alpha_1, ..., alpha_k): an interpretation's
rank is the longest prefix of strata it satisfies, and `S |> b` holds
when the best-ranked models of S u {b} beat the best-ranked models of
S u {not b}.  Both the existential-prefix definition and the rank
criterion are implemented so they can be checked against each other.

Interpretations are plain ints: bit i set means the i-th atom of the
signature is true.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Iterator, Union

DEFAULT_MODEL_CAP = 20


class KBError(Exception):
    """Base class for knowledge-base input errors."""


class ParseError(KBError):
    """Syntax error in KB source, with 1-based line/column position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class UndeclaredAtomError(ParseError):
    pass


class DuplicateAtomError(ParseError):
    pass


class CapExceededError(KBError):
    """Signature too large for an enumeration-based operation."""


# ------------------------------------------------------------------
# Formula syntax tree
# ------------------------------------------------------------------

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: bool


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Iff:
    left: "Formula"
    right: "Formula"


Formula = Union[Var, Const, Not, And, Or, Implies, Iff]

TOP = Const(True)
BOTTOM = Const(False)


def atoms_of(formula: Formula) -> frozenset[str]:
    """All atom names occurring in the formula."""
    if isinstance(formula, Var):
        return frozenset((formula.name,))
    if isinstance(formula, Const):
        return frozenset()
    if isinstance(formula, Not):
        return atoms_of(formula.sub)
    return atoms_of(formula.left) | atoms_of(formula.right)


def conjoin(formulas: Iterable[Formula]) -> Formula:
    """Left-nested conjunction of the given formulas; TOP when empty."""
    result: Formula | None = None
    for f in formulas:
        result = f if result is None else And(result, f)
    return TOP if result is None else result


# Pretty-printing precedence levels; parentheses are emitted only when
# a child binds looser than its context requires.
_PREC = {Iff: 1, Implies: 2, Or: 3, And: 4, Not: 5, Var: 6, Const: 6}


def format_formula(formula: Formula) -> str:
    """Canonical text form, re-parseable with the module grammar."""
    return _fmt(formula, 0)


def _fmt(f: Formula, context: int) -> str:
    prec = _PREC[type(f)]
    if isinstance(f, Var):
        s = f.name
    elif isinstance(f, Const):
        s = "TRUE" if f.value else "FALSE"
    elif isinstance(f, Not):
        s = "!" + _fmt(f.sub, prec)
    elif isinstance(f, And):
        s = f"{_fmt(f.left, prec)} & {_fmt(f.right, prec + 1)}"
    elif isinstance(f, Or):
        s = f"{_fmt(f.left, prec)} | {_fmt(f.right, prec + 1)}"
    elif isinstance(f, Implies):
        # right-associative: the right child may repeat at equal level
        s = f"{_fmt(f.left, prec + 1)} -> {_fmt(f.right, prec)}"
    else:
        s = f"{_fmt(f.left, prec)} <-> {_fmt(f.right, prec + 1)}"
    return f"({s})" if prec < context else s


# ------------------------------------------------------------------
# Signatures and knowledge bases
# ------------------------------------------------------------------

@dataclass(frozen=True)
class Signature:
    """Ordered atom list; the order fixes interpretation bit positions."""

    atoms: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.atoms)) != len(self.atoms):
            raise ValueError("duplicate atom in signature")

    def __len__(self) -> int:
        return len(self.atoms)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"atom {name!r} not in signature") from None

    @property
    def _index(self) -> dict[str, int]:
        cached = self.__dict__.get("_index_cache")
        if cached is None:
            cached = {a: i for i, a in enumerate(self.atoms)}
            self.__dict__["_index_cache"] = cached
        return cached

    def bit(self, name: str) -> int:
        return 1 << self.index(name)

    def mask(self, names: Iterable[str]) -> int:
        m = 0
        for name in names:
            m |= self.bit(name)
        return m

    def names(self, mask: int) -> tuple[str, ...]:
        return tuple(a for i, a in enumerate(self.atoms) if mask >> i & 1)


@dataclass(frozen=True)
class KnowledgeBase:
    signature: Signature
    formulas: tuple[Formula, ...]


@dataclass(frozen=True)
class StratifiedKB:
    """Ranked formula list; strata[0] is the highest-priority stratum."""

    signature: Signature
    strata: tuple[Formula, ...]

    def __post_init__(self):
        if not self.strata:
            raise ValueError("stratified KB needs at least one stratum")


def kb_to_source(kb: KnowledgeBase | StratifiedKB) -> str:
    """Canonical source text; identical KBs serialize identically."""
    lines = ["atoms: " + " ".join(kb.signature.atoms)]
    if isinstance(kb, StratifiedKB):
        lines += [f"stratum: {format_formula(f)}" for f in kb.strata]
    else:
        lines += [f"formula: {format_formula(f)}" for f in kb.formulas]
    return "\n".join(lines) + "\n"


def kb_digest(kb: KnowledgeBase | StratifiedKB) -> str:
    return hashlib.sha256(kb_to_source(kb).encode()).hexdigest()


# ------------------------------------------------------------------
# Parser
#
# Line-oriented source:  one `atoms:` header, then `rule:` / `formula:`
# lines (plain KB) or ordered `stratum:` lines (stratified KB).
# Connectives ! & | -> <->, constants TRUE/FALSE, parentheses.
# Precedence ! > & > | > -> (right-assoc) > <-> ; & | <-> left-assoc.
# ------------------------------------------------------------------

_LINE_RE = re.compile(r"^\s*(atoms|rule|formula|stratum)\s*:\s*(.*)$")
_ATOM_RE = re.compile(r"[A-Za-z0-9_:]+")
_RESERVED = {"TRUE", "FALSE"}


@dataclass(frozen=True)
class _Token:
    kind: str  # 'atom' 'true' 'false' '!' '&' '|' '->' '<->' '(' ')' 'end'
    text: str
    line: int
    column: int


def _tokenize(payload: str, line_no: int, offset: int) -> list[_Token]:
    tokens = []
    i = 0
    while i < len(payload):
        ch = payload[i]
        col = offset + i + 1
        if ch in " \t":
            i += 1
            continue
        if payload.startswith("<->", i):
            tokens.append(_Token("<->", "<->", line_no, col))
            i += 3
        elif payload.startswith("->", i):
            tokens.append(_Token("->", "->", line_no, col))
            i += 2
        elif ch in "!&|()":
            tokens.append(_Token(ch, ch, line_no, col))
            i += 1
        else:
            m = _ATOM_RE.match(payload, i)
            if not m:
                raise ParseError(f"unexpected character {ch!r}", line_no, col)
            word = m.group(0)
            if word == "TRUE":
                tokens.append(_Token("true", word, line_no, col))
            elif word == "FALSE":
                tokens.append(_Token("false", word, line_no, col))
            else:
                tokens.append(_Token("atom", word, line_no, col))
            i = m.end()
    tokens.append(_Token("end", "", line_no, offset + len(payload) + 1))
    return tokens


class _FormulaParser:
    """Recursive-descent parser over a token list."""

    def __init__(self, tokens: list[_Token], declared: set[str]):
        self.tokens = tokens
        self.pos = 0
        self.declared = declared

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def take(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def parse(self) -> Formula:
        f = self.iff()
        tok = self.peek()
        if tok.kind != "end":
            raise ParseError(f"unexpected {tok.text!r}", tok.line, tok.column)
        return f

    def iff(self) -> Formula:
        f = self.implies()
        while self.peek().kind == "<->":
            self.take()
            f = Iff(f, self.implies())
        return f

    def implies(self) -> Formula:
        f = self.disj()
        if self.peek().kind == "->":
            self.take()
            return Implies(f, self.implies())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.peek().kind == "|":
            self.take()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.peek().kind == "&":
            self.take()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.take()
        if tok.kind == "!":
            return Not(self.unary())
        if tok.kind == "(":
            f = self.iff()
            closing = self.take()
            if closing.kind != ")":
                raise ParseError("expected ')'", closing.line, closing.column)
            return f
        if tok.kind == "true":
            return TOP
        if tok.kind == "false":
            return BOTTOM
        if tok.kind == "atom":
            if tok.text not in self.declared:
                raise UndeclaredAtomError(
                    f"undeclared atom {tok.text!r}", tok.line, tok.column
                )
            return Var(tok.text)
        raise ParseError(
            f"expected formula, found {tok.text or 'end of line'!r}",
            tok.line,
            tok.column,
        )


def parse_kb(text: str) -> KnowledgeBase | StratifiedKB:
    """Parse KB source text.

    Returns a StratifiedKB when the body uses `stratum:` lines (their file
    order is the semantic stratum order), a KnowledgeBase otherwise.
    """
    signature: Signature | None = None
    formulas: list[Formula] = []
    strata: list[Formula] = []
    plain_lines = 0

    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        if not line.strip():
            continue
        m = _LINE_RE.match(line)
        if not m:
            col = len(line) - len(line.lstrip()) + 1
            raise ParseError("expected 'atoms:', 'rule:', 'formula:' or "
                             "'stratum:' line", line_no, col)
        keyword, payload = m.group(1), m.group(2)
        payload_offset = m.start(2)

        if keyword == "atoms":
            if signature is not None:
                raise ParseError("duplicate atoms: header", line_no, 1)
            names: list[str] = []
            for tok in _tokenize(payload, line_no, payload_offset):
                if tok.kind == "end":
                    break
                if tok.kind != "atom":
                    if tok.text in _RESERVED:
                        raise ParseError(
                            f"{tok.text} is reserved and cannot name an atom",
                            tok.line, tok.column)
                    raise ParseError(
                        f"bad atom name {tok.text!r}", tok.line, tok.column)
                if tok.text in names:
                    raise DuplicateAtomError(
                        f"duplicate atom {tok.text!r}", tok.line, tok.column)
                names.append(tok.text)
            if not names:
                raise ParseError("empty atoms: header", line_no, 1)
            signature = Signature(tuple(names))
            continue

        if signature is None:
            raise ParseError("atoms: header must come first", line_no, 1)
        parser = _FormulaParser(
            _tokenize(payload, line_no, payload_offset), set(signature.atoms)
        )
        formula = parser.parse()
        if keyword == "stratum":
            strata.append(formula)
        else:
            formulas.append(formula)
            plain_lines += 1
        if strata and plain_lines:
            raise ParseError(
                "cannot mix stratum: with rule:/formula: lines", line_no, 1)

    if signature is None:
        raise ParseError("missing atoms: header", 1, 1)
    if strata:
        return StratifiedKB(signature, tuple(strata))
    return KnowledgeBase(signature, tuple(formulas))


# ------------------------------------------------------------------
# Semantics
# ------------------------------------------------------------------

def evaluate(formula: Formula, omega: int, signature: Signature) -> bool:
    """Classical truth value of the formula under interpretation bits."""
    if isinstance(formula, Var):
        return bool(omega >> signature.index(formula.name) & 1)
    if isinstance(formula, Const):
        return formula.value
    if isinstance(formula, Not):
        return not evaluate(formula.sub, omega, signature)
    if isinstance(formula, And):
        return (evaluate(formula.left, omega, signature)
                and evaluate(formula.right, omega, signature))
    if isinstance(formula, Or):
        return (evaluate(formula.left, omega, signature)
                or evaluate(formula.right, omega, signature))
    if isinstance(formula, Implies):
        return (not evaluate(formula.left, omega, signature)
                or evaluate(formula.right, omega, signature))
    if isinstance(formula, Iff):
        return (evaluate(formula.left, omega, signature)
                == evaluate(formula.right, omega, signature))
    raise TypeError(f"not a formula: {formula!r}")


def interpretations(signature: Signature) -> Iterator[int]:
    return iter(range(1 << len(signature)))


@lru_cache(maxsize=4096)
def enumerate_models(kb: KnowledgeBase,
                     cap: int = DEFAULT_MODEL_CAP) -> tuple[int, ...]:
    """All models of the KB in ascending bitmask order (empty iff inconsistent)."""
    n = len(kb.signature)
    if n > cap:
        raise CapExceededError(
            f"signature has {n} atoms, enumeration cap is {cap}")
    return tuple(
        omega for omega in range(1 << n)
        if all(evaluate(f, omega, kb.signature) for f in kb.formulas)
    )


def entails(kb: KnowledgeBase, antecedent: Iterable[str], head: str) -> bool:
    """Does every model of the KB that satisfies the antecedent atoms satisfy head?

    An empty antecedent asks whether head holds in every model; callers
    that quantify over rules use non-empty antecedents only.
    """
    smask = kb.signature.mask(antecedent)
    hbit = kb.signature.bit(head)
    return all(
        omega & hbit
        for omega in enumerate_models(kb)
        if omega & smask == smask
    )


def rank_mu(theta: StratifiedKB, omega: int) -> int:
    """Length of the longest satisfied stratum prefix (0 when strata[0] fails)."""
    mu = 0
    for stratum in theta.strata:
        if not evaluate(stratum, omega, theta.signature):
            break
        mu += 1
    return mu


@lru_cache(maxsize=1024)
def _mu_table(theta: StratifiedKB) -> tuple[int, ...]:
    return tuple(rank_mu(theta, omega)
                 for omega in range(1 << len(theta.signature)))


def nm_consequence_def(theta: StratifiedKB, antecedent: Iterable[str],
                       head: str) -> bool:
    """Ranked-default consequence via the existential-prefix definition.

    True iff for some prefix of strata, the prefix conjoined with the
    antecedent atoms entails head without also entailing its negation
    (equivalently: the constrained model set is non-empty and all its
    members satisfy head).
    """
    atoms = tuple(antecedent)
    if not atoms:
        raise ValueError("antecedent must be a non-empty atom set")
    sig = theta.signature
    smask = sig.mask(atoms)
    hbit = sig.bit(head)
    mu = _mu_table(theta)
    for i in range(len(theta.strata) + 1):
        candidates = [m for m in range(1 << len(sig))
                      if m & smask == smask and mu[m] >= i]
        if candidates and all(m & hbit for m in candidates):
            return True
    return False


def nm_consequence_rank(theta: StratifiedKB, antecedent: Iterable[str],
                        head: str) -> bool:
    """Ranked-default consequence via the rank-maximum criterion.

    Compares the best rank among interpretations satisfying the
    antecedent plus head against the best rank among those satisfying
    the antecedent plus the negated head (-1 when no such interpretation
    exists, i.e. head is one of the antecedent atoms).
    """
    atoms = tuple(antecedent)
    if not atoms:
        raise ValueError("antecedent must be a non-empty atom set")
    sig = theta.signature
    smask = sig.mask(atoms)
    hbit = sig.bit(head)
    mu = _mu_table(theta)
    m_plus = -1
    m_minus = -1
    for m in range(1 << len(sig)):
        if m & smask != smask:
            continue
        if m & hbit:
            if mu[m] > m_plus:
                m_plus = mu[m]
        elif mu[m] > m_minus:
            m_minus = mu[m]
    return m_plus > m_minus
