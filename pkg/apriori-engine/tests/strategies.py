"""Hypothesis strategies for formulas, models and a~priori update instances."""

from typing import NamedTuple

from hypothesis import strategies as st

import formula as fm
import kripke
from apriori import AprioriUpdate
from kripke import KripkeModel, PointedModel

AGENT_SETS = (("a", "b"), ("a", "b", "c"))
ATOM_SETS = (("p",), ("p", "q"), ("p", "q", "r"))

# ==============================================================================
# --- Formulas ---
# ==============================================================================


def _formula(draw, agents, atoms, depth, size, announcements):
    if size <= 0 or draw(st.integers(0, 3)) == 0:
        if draw(st.integers(0, 5)) == 0:
            return fm.FALSE
        return fm.Atom(draw(st.sampled_from(atoms)))

    kinds = ["not", "and"]
    if depth > 0:
        kinds.append("believes")
        if announcements:
            kinds.append("announce")
    kind = draw(st.sampled_from(kinds))

    if kind == "not":
        return fm.Not(_formula(draw, agents, atoms, depth, size - 1, announcements))
    if kind == "and":
        return fm.And(_formula(draw, agents, atoms, depth, size - 1, announcements),
                      _formula(draw, agents, atoms, depth, size - 1, announcements))
    if kind == "believes":
        return fm.Believes(draw(st.sampled_from(agents)),
                           _formula(draw, agents, atoms, depth - 1, size - 1, announcements))
    return fm.Announced(_formula(draw, agents, atoms, depth - 1, size - 1, announcements),
                        _formula(draw, agents, atoms, depth - 1, size - 1, announcements))


@st.composite
def formulas(draw, agents=("a", "b"), atoms=("p", "q"), max_depth=2, size=3, announcements=True):
    """Random core formulas of modal depth at most max_depth."""
    return _formula(draw, tuple(agents), tuple(atoms), max_depth, size, announcements)


# ==============================================================================
# --- Relations and models ---
# ==============================================================================


@st.composite
def relations_on(draw, worlds):
    """Any binary relation over the worlds."""
    if not worlds:
        return frozenset()
    pair = st.tuples(st.sampled_from(worlds), st.sampled_from(worlds))
    return draw(st.frozensets(pair, max_size=len(worlds) ** 2))


@st.composite
def partial_equivalences(draw, worlds, include=()):
    """A transitive symmetric relation; worlds in `include` are never isolated."""
    blocks = {}
    for w in worlds:
        low = 0 if w in include else -1
        label = draw(st.integers(low, max(0, len(worlds) - 1)))
        if label >= 0:
            blocks.setdefault(label, []).append(w)
    return frozenset((u, v) for block in blocks.values() for u in block for v in block)


@st.composite
def kripke_models(draw, max_worlds=4, agents=("a", "b"), atoms=("p", "q"), prefix="w"):
    n = draw(st.integers(1, max_worlds))
    worlds = tuple(f"{prefix}{i}" for i in range(n))
    return KripkeModel(
        name="random",
        agents=tuple(agents),
        atoms=tuple(atoms),
        worlds=worlds,
        relations={agent: draw(relations_on(worlds)) for agent in agents},
        valuation={p: draw(st.frozensets(st.sampled_from(worlds))) for p in atoms},
    )


@st.composite
def pointed_models(draw, max_worlds=4, agents=("a", "b"), atoms=("p", "q"), prefix="w"):
    model = draw(kripke_models(max_worlds, agents, atoms, prefix))
    return PointedModel(model, draw(st.sampled_from(model.worlds)))


def duplicate_world(pm, world, copy_name):
    """A bisimilar model: `world` gets a twin with the same atoms, successors and predecessors."""
    model = pm.model
    relations = {}
    for agent in model.agents:
        pairs = set(model.relation(agent))
        for w, v in model.relation(agent):
            if w == world:
                pairs.add((copy_name, copy_name if v == world else v))
            if v == world:
                pairs.add((copy_name if w == world else w, copy_name))
        relations[agent] = pairs
    valuation = {p: set(h) | ({copy_name} if world in h else set()) for p, h in model.valuation.items()}
    twin = KripkeModel(model.name, model.agents, model.atoms, model.worlds + (copy_name,), relations, valuation)
    return PointedModel(twin, pm.point)


# ==============================================================================
# --- Update instances ---
# ==============================================================================


class UpdateCase(NamedTuple):
    target: PointedModel
    update: AprioriUpdate


def _component(model, agents, seed):
    """Worlds connected to the seed through the listed agents' relations."""
    found = set(seed)
    frontier = list(seed)
    while frontier:
        w = frontier.pop()
        for agent in agents:
            for v in model.successors(agent, w):
                if v not in found:
                    found.add(v)
                    frontier.append(v)
    return found


@st.composite
def inconsistent_targets(draw, agents, atoms, point_sees_others=False):
    """Introspective target whose point has no arrow for agent a and lies in no cluster."""
    size = draw(st.integers(2 if point_sees_others else 1, 6))
    others = tuple(f"t{i}" for i in range(1, size))
    worlds = ("t0",) + others

    relations = {}
    for agent in agents:
        include = others[:1] if point_sees_others and agent != "a" else ()
        per = draw(partial_equivalences(others, include=include))
        pairs = set(per)
        if agent != "a" and others:
            blocks = sorted({frozenset(v for u2, v in per if u2 == u) for u, _ in per}, key=min)
            if blocks and (point_sees_others or draw(st.booleans())):
                block = draw(st.sampled_from(blocks))
                pairs |= {("t0", v) for v in block}
        relations[agent] = pairs

    model = KripkeModel(
        name="target",
        agents=agents,
        atoms=atoms,
        worlds=worlds,
        relations=relations,
        valuation={p: draw(st.frozensets(st.sampled_from(worlds))) for p in atoms},
    )
    return PointedModel(model, "t0")


@st.composite
def update_instances(draw, point_sees_others=False, cluster_blind_to=None):
    """
    A target and an update for agent a satisfying every precondition.

    The backup is the part of the trial closed under the other agents'
    relations, renamed, with a fresh relation for a and optional extra
    worlds; the map identifies each kept trial world with its copy. With
    `cluster_blind_to=b` the kept part avoids everything b can reach from the
    cluster, so "B a B b false" holds after the update.
    """
    agents = draw(st.sampled_from(AGENT_SETS))
    atoms = draw(st.sampled_from(ATOM_SETS))
    others = tuple(b for b in agents if b != "a")
    target = draw(inconsistent_targets(agents, atoms, point_sees_others))

    trial_worlds = tuple(f"s{i}" for i in range(draw(st.integers(1, 6))))
    trial = KripkeModel(
        name="trial",
        agents=agents,
        atoms=atoms,
        worlds=trial_worlds,
        relations={agent: draw(partial_equivalences(trial_worlds, include=("s0",) if agent == "a" else ()))
                   for agent in agents},
        valuation={p: draw(st.frozensets(st.sampled_from(trial_worlds))) for p in atoms},
    )
    cluster = draw(st.sampled_from(kripke.clusters(trial, "a").clusters))

    forbidden = set()
    if cluster_blind_to is not None:
        seen = set().union(*(trial.successors(cluster_blind_to, u) for u in cluster))
        forbidden = _component(trial, others, seen)
    candidates = [w for w in trial.worlds if w not in forbidden]
    seed = draw(st.lists(st.sampled_from(candidates), unique=True, max_size=3)) if candidates else []
    kept = [w for w in trial.worlds if w in _component(trial, others, seed)]

    extra_count = draw(st.integers(0 if kept else 1, max(1, 6 - len(kept))))
    extras = [f"x{i}" for i in range(extra_count)]
    copy = {w: f"k{w}" for w in kept}
    backup_worlds = tuple(copy[w] for w in kept) + tuple(extras)

    backup_relations = {}
    for agent in agents:
        if agent == "a":
            backup_relations[agent] = draw(partial_equivalences(backup_worlds))
            continue
        pairs = {(copy[w], copy[v]) for w, v in trial.relation(agent) if w in copy and v in copy}
        pairs |= draw(partial_equivalences(tuple(extras)))
        backup_relations[agent] = pairs

    backup_valuation = {}
    for p in atoms:
        holding = {copy[w] for w in kept if w in trial.valuation[p]}
        holding |= draw(st.frozensets(st.sampled_from(extras))) if extras else set()
        backup_valuation[p] = holding

    backup = KripkeModel(
        name="backup",
        agents=agents,
        atoms=atoms,
        worlds=backup_worlds,
        relations=backup_relations,
        valuation=backup_valuation,
    )
    update = AprioriUpdate(agent="a", trial=trial, cluster=cluster, backup=backup, correspondence=copy, name="u")
    return UpdateCase(target, update)
