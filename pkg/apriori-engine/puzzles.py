"""
Puzzle Model Generators

Generated models are referenced from files as `@<name>`:
  @muddy-m0              three muddy children, no announcement yet
  @muddy-<n>             the same for n children
  @consecutive           the actual consecutive-numbers model (point `real`)
  @naturals-from-0       number line where 0 is a natural number
  @naturals-from-1       number line starting from 1
  @integers              number line over all integers

Consecutive-numbers models are infinite; they are cut at pair maximum N.
"""

import re
import string
from itertools import combinations

from errors import ModelFileError
from kripke import KripkeModel

CONSECUTIVE_FAMILY = ("consecutive", "naturals-from-0", "naturals-from-1", "integers")

# ==============================================================================
# --- Frame helpers ---
# ==============================================================================


def add_reflexive_edges(worlds, relations):
    """Adds a loop at every world for every agent"""
    return {agent: set(pairs) | {(w, w) for w in worlds} for agent, pairs in relations.items()}


def add_symmetric_edges(relations):
    """Adds the converse of every pair"""
    return {agent: set(pairs) | {(v, w) for w, v in pairs} for agent, pairs in relations.items()}


# ==============================================================================
# --- Muddy children ---
# ==============================================================================

def muddy_children_model(n=3, name=None):
    """
    The initial muddy children model for n children a, b, c, ...

    A world is named after its muddy children in upper case (`AB`), or `0`
    when nobody is muddy. Child i cannot tell apart worlds differing only in
    its own atom m<i>.
    """
    if not 1 <= n <= 26:
        raise ValueError("muddy children needs between 1 and 26 children")
    agents = tuple(string.ascii_lowercase[:n])
    atoms = tuple(f"m{agent}" for agent in agents)

    def world_name(muddy):
        return "".join(agent.upper() for agent in muddy) or "0"

    muddy_sets = [frozenset(c) for k in range(n + 1) for c in combinations(agents, k)]
    worlds = [world_name(sorted(s)) for s in muddy_sets]
    by_name = dict(zip(worlds, muddy_sets))

    relations = {agent: set() for agent in agents}
    for agent in agents:
        for w in worlds:
            flipped = by_name[w] ^ {agent}
            relations[agent].add((w, world_name(sorted(flipped))))
    relations = add_symmetric_edges(add_reflexive_edges(worlds, relations))

    valuation = {f"m{agent}": frozenset(w for w in worlds if agent in by_name[w]) for agent in agents}
    return KripkeModel(
        name=name or ("M0" if n == 3 else f"M0_{n}"),
        agents=agents,
        atoms=atoms,
        worlds=tuple(worlds),
        relations=relations,
        valuation=valuation,
    )


# ==============================================================================
# --- Consecutive numbers ---
# ==============================================================================

def number_token(k):
    """Spelling of an integer inside identifiers: 3 -> '3', -3 -> 'm3'."""
    return f"m{-k}" if k < 0 else str(k)


def number_atom(agent, k):
    return f"n_{agent}_{number_token(k)}"


def pair_world(x, y, prefix=""):
    return f"{prefix}p{number_token(x)}_{number_token(y)}"


def consecutive_atoms(trunc_n):
    return tuple(number_atom(agent, k) for agent in ("a", "b") for k in range(-trunc_n, trunc_n + 1))


def _line_pairs(lowest, trunc_n):
    """Pairs (x, y): x odd (a's number), y even (b's number), |x - y| = 1, within the window."""
    pairs = []
    for x in range(-trunc_n, trunc_n + 1):
        if x % 2 == 0 or x < lowest:
            continue
        for y in (x - 1, x + 1):
            if y < lowest or abs(y) > trunc_n:
                continue
            pairs.append((x, y))
    return sorted(pairs, key=lambda p: (p[0] + p[1], p[0]))


def _line_parts(pairs, prefix=""):
    worlds = [pair_world(x, y, prefix) for x, y in pairs]
    relations = {"a": set(), "b": set()}
    for (x1, y1), w1 in zip(pairs, worlds):
        for (x2, y2), w2 in zip(pairs, worlds):
            if x1 == x2:
                relations["a"].add((w1, w2))
            if y1 == y2:
                relations["b"].add((w1, w2))
    valuation = {}
    for (x, y), w in zip(pairs, worlds):
        valuation.setdefault(number_atom("a", x), set()).add(w)
        valuation.setdefault(number_atom("b", y), set()).add(w)
    return worlds, relations, valuation


def number_line(lowest, trunc_n, name):
    """An epistemic number line where each agent knows its own number."""
    worlds, relations, valuation = _line_parts(_line_pairs(lowest, trunc_n))
    return KripkeModel(
        name=name,
        agents=("a", "b"),
        atoms=consecutive_atoms(trunc_n),
        worlds=tuple(worlds),
        relations=relations,
        valuation=valuation,
    )


def consecutive_model(trunc_n, a_number=1, b_number=2):
    """
    The actual model: a holds a_number and believes numbers start at 1, b
    holds b_number and believes 0 is natural too.
    """
    a_pairs = _line_pairs(1, trunc_n)
    b_pairs = _line_pairs(0, trunc_n)
    a_worlds, a_relations, a_valuation = _line_parts(a_pairs, prefix="a_")
    b_worlds, b_relations, b_valuation = _line_parts(b_pairs, prefix="b_")

    relations = {agent: a_relations[agent] | b_relations[agent] for agent in ("a", "b")}
    relations["a"] |= {("real", w) for (x, _), w in zip(a_pairs, a_worlds) if x == a_number}
    relations["b"] |= {("real", w) for (_, y), w in zip(b_pairs, b_worlds) if y == b_number}

    valuation = {}
    for part in (a_valuation, b_valuation):
        for atom, holding in part.items():
            valuation.setdefault(atom, set()).update(holding)
    valuation.setdefault(number_atom("a", a_number), set()).add("real")
    valuation.setdefault(number_atom("b", b_number), set()).add("real")

    return KripkeModel(
        name="N",
        agents=("a", "b"),
        atoms=consecutive_atoms(trunc_n),
        worlds=("real",) + tuple(a_worlds) + tuple(b_worlds),
        relations=relations,
        valuation=valuation,
    )


# ==============================================================================
# --- Registry ---
# ==============================================================================

_MUDDY_PATTERN = re.compile(r"^muddy-(m0|\d+)$")


def generate(reference, trunc_n=12):
    """
    Builds the model named by `@<name>`.

    Returns: (KripkeModel, default point or None)
    """
    name = reference[1:] if reference.startswith("@") else reference
    muddy = _MUDDY_PATTERN.match(name)
    if muddy:
        n = 3 if muddy.group(1) == "m0" else int(muddy.group(1))
        return muddy_children_model(n), None
    if name == "consecutive":
        return consecutive_model(trunc_n), "real"
    if name == "naturals-from-0":
        return number_line(0, trunc_n, "nat0"), None
    if name == "naturals-from-1":
        return number_line(1, trunc_n, "nat1"), None
    if name == "integers":
        return number_line(-trunc_n, trunc_n, "int"), None
    raise ModelFileError(f"Unknown generated model '@{name}'")


def is_truncated(reference):
    name = reference[1:] if reference.startswith("@") else reference
    return name in CONSECUTIVE_FAMILY
