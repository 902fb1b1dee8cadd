"""
Epistemic Formula Language

Core constructors: atoms, false, negation, conjunction, belief B_i and the
public announcement [! phi] psi. Everything else (true, |, ->, E, Ehat) is
expanded into the core at parse time.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

from lark import Lark, Transformer, Token
from lark.exceptions import UnexpectedInput, VisitError

from errors import FormulaSyntaxError, UndeclaredIdentifier

# ==============================================================================
# --- AST ---
# ==============================================================================


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Falsum:
    pass


@dataclass(frozen=True)
class Not:
    sub: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Believes:
    agent: str
    sub: "Formula"


@dataclass(frozen=True)
class Announced:
    announcement: "Formula"
    body: "Formula"


Formula = Union[Atom, Falsum, Not, And, Believes, Announced]

FALSE = Falsum()

RESERVED_WORDS = frozenset({"B", "E", "Ehat", "true", "false"})
IDENTIFIER_PATTERN = re.compile(r"^[A-Za-z0-9_]+$")

# n_<agent>_<k>, negative k spelled with a leading m (n_a_m3)
NUMBER_ATOM_PATTERN = re.compile(r"^n_[A-Za-z0-9]+_(m?)(\d+)$")


def is_identifier(name):
    """True for a usable atom/agent/world identifier (not a keyword)."""
    return bool(IDENTIFIER_PATTERN.match(name)) and name not in RESERVED_WORDS


# ==============================================================================
# --- Derived connectives ---
# ==============================================================================

def top():
    return Not(FALSE)


def disjunction(left, right):
    return Not(And(Not(left), Not(right)))


def implication(left, right):
    return Not(And(left, Not(right)))


def conjunction_of(formulas: Iterable[Formula]):
    """Left-associated conjunction; the empty conjunction is true."""
    result = None
    for f in formulas:
        result = f if result is None else And(result, f)
    return top() if result is None else result


def mutual_belief(agents, f):
    """E f: every agent believes f, agents in lexicographic order."""
    return conjunction_of(Believes(agent, f) for agent in sorted(agents))


def mutual_belief_dual(agents, f):
    """Ehat f = ~E~f."""
    return Not(mutual_belief(agents, Not(f)))


# ==============================================================================
# --- Parser ---
# ==============================================================================

GRAMMAR = r"""
?start: implication

?implication: disjunction
    | disjunction "->" implication      -> implies

?disjunction: conjunction
    | disjunction "|" conjunction       -> disjoin

?conjunction: prefix
    | conjunction "&" prefix            -> conjoin

?prefix: primary
    | "~" prefix                        -> negate
    | "B" NAME prefix                   -> believes
    | "E" prefix                        -> everyone
    | "Ehat" prefix                     -> everyone_dual
    | "[" "!" implication "]" prefix    -> announce

?primary: "true"                        -> verum
    | "false"                           -> falsum
    | NAME                              -> atom
    | "(" implication ")"

NAME: /[A-Za-z0-9_]+/

%import common.WS
%ignore WS
"""

_PARSER = Lark(GRAMMAR, parser="lalr")


class _ToFormula(Transformer):
    """Turns the lark tree into core constructors, checking declarations."""

    def __init__(self, agents, atoms):
        super().__init__()
        self.agents = frozenset(agents)
        self.atoms = frozenset(atoms)

    def _position(self, token: Token):
        return f"line {token.line}, column {token.column}"

    def atom(self, children):
        (token,) = children
        if str(token) not in self.atoms:
            raise UndeclaredIdentifier(f"Undeclared atom '{token}'", position=self._position(token))
        return Atom(str(token))

    def verum(self, _):
        return top()

    def falsum(self, _):
        return FALSE

    def negate(self, children):
        return Not(children[0])

    def conjoin(self, children):
        return And(children[0], children[1])

    def disjoin(self, children):
        return disjunction(children[0], children[1])

    def implies(self, children):
        return implication(children[0], children[1])

    def believes(self, children):
        token, sub = children
        if str(token) not in self.agents:
            raise UndeclaredIdentifier(f"Undeclared agent '{token}'", position=self._position(token))
        return Believes(str(token), sub)

    def everyone(self, children):
        return mutual_belief(self.agents, children[0])

    def everyone_dual(self, children):
        return mutual_belief_dual(self.agents, children[0])

    def announce(self, children):
        return Announced(children[0], children[1])


def parse_formula(text, agents, atoms) -> Formula:
    """
    Parses concrete syntax into a core AST over the declared vocabulary.

    Raises FormulaSyntaxError (with position) or UndeclaredIdentifier.
    """
    try:
        tree = _PARSER.parse(text)
    except UnexpectedInput as e:
        line = getattr(e, "line", -1)
        column = getattr(e, "column", -1)
        position = f"line {line}, column {column}" if line and line > 0 else "end of input"
        raise FormulaSyntaxError(f"Cannot parse formula '{text}'", position=position) from e

    try:
        return _ToFormula(agents, atoms).transform(tree)
    except VisitError as e:
        raise e.orig_exc from None


# ==============================================================================
# --- Printer ---
# ==============================================================================

def print_formula(f: Formula) -> str:
    """Canonical text; parse_formula(print_formula(f)) == f."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Falsum):
        return "false"
    if isinstance(f, Not):
        return "~" + print_formula(f.sub)
    if isinstance(f, And):
        return f"({print_formula(f.left)} & {print_formula(f.right)})"
    if isinstance(f, Believes):
        return f"B {f.agent} {print_formula(f.sub)}"
    if isinstance(f, Announced):
        return f"[! {print_formula(f.announcement)}] {print_formula(f.body)}"
    raise TypeError(f"Not a formula: {f!r}")


# ==============================================================================
# --- Measures ---
# ==============================================================================

def modal_depth(f: Formula) -> int:
    if isinstance(f, (Atom, Falsum)):
        return 0
    if isinstance(f, Not):
        return modal_depth(f.sub)
    if isinstance(f, And):
        return max(modal_depth(f.left), modal_depth(f.right))
    if isinstance(f, Believes):
        return 1 + modal_depth(f.sub)
    if isinstance(f, Announced):
        return 1 + max(modal_depth(f.announcement), modal_depth(f.body))
    raise TypeError(f"Not a formula: {f!r}")


def _children(f):
    if isinstance(f, (Not, Believes)):
        return (f.sub,)
    if isinstance(f, And):
        return (f.left, f.right)
    if isinstance(f, Announced):
        return (f.announcement, f.body)
    return ()


def _walk(f):
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(_children(node))


def atoms_of(f: Formula) -> frozenset:
    return frozenset(node.name for node in _walk(f) if isinstance(node, Atom))


def agents_of(f: Formula) -> frozenset:
    return frozenset(node.agent for node in _walk(f) if isinstance(node, Believes))


def is_propositional(f: Formula) -> bool:
    return modal_depth(f) == 0


def number_in_atom(name):
    """The integer encoded by an n_<agent>_<k> atom, or None."""
    match = NUMBER_ATOM_PATTERN.match(name)
    if not match:
        return None
    value = int(match.group(2))
    return -value if match.group(1) else value


def numbers_mentioned(f: Formula) -> int:
    """Largest absolute number named by a number atom in f (0 if none)."""
    numbers = [abs(n) for n in (number_in_atom(a) for a in atoms_of(f)) if n is not None]
    return max(numbers, default=0)
