"""
Kripke Models

Models are immutable: every operation returns a new model. Relations are
explicit sets of (world, world) pairs per agent, and every property check is
a direct quantifier evaluation over those pairs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping, Optional, Tuple

import pandas as pd

import formula as fm
import run_log
from errors import ModelError, NotPartialEquivalence

# ==============================================================================
# --- Model types ---
# ==============================================================================


@dataclass(frozen=True)
class KripkeModel:
    name: str
    agents: Tuple[str, ...]
    atoms: Tuple[str, ...]
    worlds: Tuple[str, ...]
    relations: Mapping[str, frozenset] = field(default_factory=dict)
    valuation: Mapping[str, frozenset] = field(default_factory=dict)
    notes: Tuple[str, ...] = ()

    def __post_init__(self):
        agents = tuple(self.agents)
        atoms = tuple(self.atoms)
        worlds = tuple(self.worlds)
        if not worlds:
            raise ModelError(f"Model '{self.name}' has no worlds")
        if len(set(worlds)) != len(worlds):
            raise ModelError(f"Model '{self.name}' declares a world twice")
        if len(set(agents)) != len(agents) or len(set(atoms)) != len(atoms):
            raise ModelError(f"Model '{self.name}' declares an agent or atom twice")

        declared = set(worlds)
        relations = {}
        for agent, pairs in self.relations.items():
            if agent not in agents:
                raise ModelError(f"Model '{self.name}': relation for undeclared agent '{agent}'")
            pairs = frozenset(pairs)
            for w, v in pairs:
                if w not in declared or v not in declared:
                    raise ModelError(f"Model '{self.name}': {agent}-pair ({w}, {v}) uses an undeclared world")
            relations[agent] = pairs
        for agent in agents:
            relations.setdefault(agent, frozenset())

        valuation = {}
        for atom, holding in self.valuation.items():
            if atom not in atoms:
                raise ModelError(f"Model '{self.name}': valuation for undeclared atom '{atom}'")
            holding = frozenset(holding)
            if not holding <= declared:
                raise ModelError(f"Model '{self.name}': atom '{atom}' true at an undeclared world")
            valuation[atom] = holding
        for atom in atoms:
            valuation.setdefault(atom, frozenset())

        object.__setattr__(self, "agents", agents)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "worlds", worlds)
        object.__setattr__(self, "relations", MappingProxyType(relations))
        object.__setattr__(self, "valuation", MappingProxyType(valuation))
        object.__setattr__(self, "notes", tuple(self.notes))

    def __hash__(self):
        return hash((self.name, self.worlds))

    def __eq__(self, other):
        if not isinstance(other, KripkeModel):
            return NotImplemented
        return (
            self.name == other.name
            and self.agents == other.agents
            and self.atoms == other.atoms
            and self.worlds == other.worlds
            and dict(self.relations) == dict(other.relations)
            and dict(self.valuation) == dict(other.valuation)
            and self.notes == other.notes
        )

    # --- Lookups ---

    @cached_property
    def _successors(self):
        table = {agent: {w: set() for w in self.worlds} for agent in self.agents}
        for agent, pairs in self.relations.items():
            for w, v in pairs:
                table[agent][w].add(v)
        return {agent: {w: frozenset(vs) for w, vs in rows.items()} for agent, rows in table.items()}

    @cached_property
    def _labels(self):
        table = {w: set() for w in self.worlds}
        for atom, holding in self.valuation.items():
            for w in holding:
                table[w].add(atom)
        return {w: frozenset(atoms) for w, atoms in table.items()}

    @cached_property
    def world_set(self):
        return frozenset(self.worlds)

    def successors(self, agent, world):
        """R_agent(world); empty for agents the model does not declare."""
        return self._successors.get(agent, {}).get(world, frozenset())

    def atoms_at(self, world):
        return self._labels[world]

    def relation(self, agent):
        return self.relations.get(agent, frozenset())

    # --- Derived models ---

    def restrict(self, worlds: Iterable[str], name=None):
        """The submodel on `worlds`, keeping declaration order."""
        keep = frozenset(worlds)
        return KripkeModel(
            name=name or self.name,
            agents=self.agents,
            atoms=self.atoms,
            worlds=tuple(w for w in self.worlds if w in keep),
            relations={a: frozenset((w, v) for w, v in pairs if w in keep and v in keep)
                       for a, pairs in self.relations.items()},
            valuation={p: holding & keep for p, holding in self.valuation.items()},
            notes=self.notes,
        )

    def rename(self, rename_world, name=None):
        """Applies an injective world renaming function."""
        mapping = {w: rename_world(w) for w in self.worlds}
        if len(set(mapping.values())) != len(mapping):
            raise ModelError(f"Renaming of '{self.name}' is not injective")
        return KripkeModel(
            name=name or self.name,
            agents=self.agents,
            atoms=self.atoms,
            worlds=tuple(mapping[w] for w in self.worlds),
            relations={a: frozenset((mapping[w], mapping[v]) for w, v in pairs)
                       for a, pairs in self.relations.items()},
            valuation={p: frozenset(mapping[w] for w in holding) for p, holding in self.valuation.items()},
            notes=self.notes,
        )

    def with_notes(self, *notes):
        extra = tuple(n for n in notes if n not in self.notes)
        return KripkeModel(self.name, self.agents, self.atoms, self.worlds,
                           dict(self.relations), dict(self.valuation), self.notes + extra)


@dataclass(frozen=True)
class PointedModel:
    model: KripkeModel
    point: str

    def __post_init__(self):
        if self.point not in self.model.world_set:
            raise ModelError(f"Point '{self.point}' is not a world of model '{self.model.name}'")

    @property
    def worlds(self):
        return self.model.worlds


class _Empty:
    """Sentinel for an agent whose accessibility set at the point is empty."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "Empty"

    def __bool__(self):
        return False


EMPTY = _Empty()


def is_empty(submodel):
    return submodel is EMPTY


# ==============================================================================
# --- Relation algebra ---
# ==============================================================================

def identity(worlds):
    return frozenset((w, w) for w in worlds)


def _index(rel):
    index = {}
    for w, v in rel:
        index.setdefault(w, set()).add(v)
    return index


def compose(rel1, rel2):
    """Q o Q' = {(w, v) | exists u: w Q u and u Q' v}."""
    after = _index(rel2)
    return frozenset((w, v) for w, u in rel1 for v in after.get(u, ()))


def iterate(rel, k, worlds):
    """Q^0 is the identity on `worlds`; Q^(k+1) = Q o Q^k."""
    if k < 0:
        raise ValueError("iteration count must be non-negative")
    result = identity(worlds)
    for _ in range(k):
        result = compose(rel, result)
    return result


def image(rel, sources):
    index = _index(rel)
    out = set()
    for w in sources:
        out |= index.get(w, set())
    return frozenset(out)


def union_relation(model: KripkeModel):
    """R_A: union of all agents' relations."""
    pairs = set()
    for rel in model.relations.values():
        pairs |= rel
    return frozenset(pairs)


def common_closure(model: KripkeModel):
    """R*_A, the reflexive-transitive closure of R_A, iterated to fixpoint."""
    step = union_relation(model)
    closure = identity(model.worlds)
    while True:
        extended = closure | compose(closure, step)
        if extended == closure:
            return closure
        closure = extended


def reachable(model: KripkeModel, sources):
    """Worlds reachable from `sources` along R*_A (sources included)."""
    seen = set(sources)
    frontier = list(seen)
    while frontier:
        w = frontier.pop()
        for agent in model.agents:
            for v in model.successors(agent, w):
                if v not in seen:
                    seen.add(v)
                    frontier.append(v)
    return frozenset(seen)


# ==============================================================================
# --- Frame properties ---
# ==============================================================================

def is_reflexive(rel, worlds):
    return all((w, w) in rel for w in worlds)


def is_symmetric(rel):
    return all((v, w) in rel for w, v in rel)


def is_transitive(rel):
    after = _index(rel)
    return all((w, v) in rel for w, u in rel for v in after.get(u, ()))


def is_euclidean(rel):
    after = _index(rel)
    return all((u, v) in rel for w in after for u in after[w] for v in after[w])


@dataclass(frozen=True)
class AgentFrame:
    reflexive: bool
    transitive: bool
    euclidean: bool
    symmetric: bool

    @property
    def equivalence(self):
        return self.reflexive and self.transitive and self.euclidean

    @property
    def partial_equivalence(self):
        return self.transitive and self.symmetric

    @property
    def introspective(self):
        return self.transitive and self.euclidean


def frame_of(rel, worlds):
    return AgentFrame(
        reflexive=is_reflexive(rel, worlds),
        transitive=is_transitive(rel),
        euclidean=is_euclidean(rel),
        symmetric=is_symmetric(rel),
    )


@dataclass(frozen=True)
class RelationProfile:
    frames: Mapping[str, AgentFrame]

    @property
    def epistemic(self):
        return all(f.equivalence for f in self.frames.values())

    @property
    def quasi_epistemic(self):
        return all(f.partial_equivalence for f in self.frames.values())

    @property
    def introspective(self):
        return all(f.introspective for f in self.frames.values())

    def to_frame(self):
        """Per-agent flags as a yes/no table."""
        columns = ["reflexive", "transitive", "euclidean", "symmetric",
                   "equivalence", "partial_equivalence", "introspective"]
        rows = {agent: {c: "yes" if getattr(frame, c) else "no" for c in columns}
                for agent, frame in self.frames.items()}
        return pd.DataFrame.from_dict(rows, orient="index", columns=columns)

    def summary_lines(self):
        def yes(flag):
            return "yes" if flag else "no"
        return [
            f"epistemic: {yes(self.epistemic)}",
            f"quasi-epistemic: {yes(self.quasi_epistemic)}",
            f"introspective: {yes(self.introspective)}",
        ]


def classify(model: KripkeModel) -> RelationProfile:
    return RelationProfile(
        frames={agent: frame_of(model.relation(agent), model.worlds) for agent in model.agents}
    )


# ==============================================================================
# --- Clusters ---
# ==============================================================================

@dataclass(frozen=True)
class ClusterPartition:
    clusters: Tuple[frozenset, ...]
    isolated: frozenset

    def cluster_of(self, world):
        for cluster in self.clusters:
            if world in cluster:
                return cluster
        return None


def clusters(model: KripkeModel, agent) -> ClusterPartition:
    """
    Splits the worlds into the agent's clusters and isolated worlds.

    Raises NotPartialEquivalence unless the relation is transitive and symmetric.
    """
    rel = model.relation(agent)
    if not (is_transitive(rel) and is_symmetric(rel)):
        raise NotPartialEquivalence(
            f"Relation of '{agent}' in '{model.name}' is not a partial equivalence", agent=agent)

    found = []
    isolated = set()
    placed = set()
    for w in model.worlds:
        if w in placed:
            continue
        if (w, w) not in rel:
            isolated.add(w)
            continue
        cluster = model.successors(agent, w)
        found.append(cluster)
        placed |= cluster
    return ClusterPartition(clusters=tuple(found), isolated=frozenset(isolated))


def clique_clusters(model: KripkeModel, agent):
    """
    Sets U with R(u) = U for every u in U, in order of first world.

    For a partial equivalence these are exactly its clusters; for merely
    introspective frames they are the sets an agent can be placed in.
    """
    found = []
    for w in model.worlds:
        candidate = model.successors(agent, w)
        if w not in candidate or candidate in found:
            continue
        if all(model.successors(agent, u) == candidate for u in candidate):
            found.append(candidate)
    return tuple(found)


# ==============================================================================
# --- Agent submodels ---
# ==============================================================================

def submodel(pm: PointedModel, agent, logger=None):
    """
    The part of the model accessible by `agent`: worlds (R_agent o R*_A)(point).

    Returns EMPTY when R_agent(point) is empty.
    """
    start = pm.model.successors(agent, pm.point)
    if not start:
        return EMPTY
    part = reachable(pm.model, start)
    if pm.point in part:
        (logger or run_log.get_logger()).warn(
            f"Point '{pm.point}' lies inside the part of agent '{agent}'")
    return pm.model.restrict(part, name=f"{pm.model.name}/{agent}")


# ==============================================================================
# --- Bisimulation ---
# ==============================================================================

@dataclass(frozen=True)
class BisimulationResult:
    related: bool
    relation: frozenset

    def __bool__(self):
        return self.related


def _refinement_rounds(m1, m2, agents):
    """
    Naive fixpoint refinement from the atom-equivalence relation.

    Yields (relation, removed) per round; `removed` maps each dropped pair to
    the reason it was dropped.
    """
    current = frozenset(
        (u, v) for u in m1.worlds for v in m2.worlds if m1.atoms_at(u) == m2.atoms_at(v)
    )
    removed = {(u, v): ("atoms",) for u in m1.worlds for v in m2.worlds if (u, v) not in current}
    yield current, removed

    while True:
        removed = {}
        for u, v in current:
            reason = None
            for agent in agents:
                succ_u = m1.successors(agent, u)
                succ_v = m2.successors(agent, v)
                for u2 in sorted(succ_u):
                    if not any((u2, v2) in current for v2 in succ_v):
                        reason = ("forth", agent, u2)
                        break
                if reason:
                    break
                for v2 in sorted(succ_v):
                    if not any((u2, v2) in current for u2 in succ_u):
                        reason = ("back", agent, v2)
                        break
                if reason:
                    break
            if reason:
                removed[(u, v)] = reason
        if not removed:
            return
        current = current - frozenset(removed)
        yield current, removed


def _agents_for(m1, m2, restrict_to):
    if restrict_to is not None:
        return tuple(sorted(restrict_to))
    return tuple(sorted(set(m1.agents) | set(m2.agents)))


def bisimilar(pm1: PointedModel, pm2: PointedModel, restrict_to: Optional[Iterable[str]] = None):
    """Greatest bisimulation between the two models; related iff it links the points."""
    agents = _agents_for(pm1.model, pm2.model, restrict_to)
    relation = frozenset()
    for relation, _ in _refinement_rounds(pm1.model, pm2.model, agents):
        pass
    return BisimulationResult(related=(pm1.point, pm2.point) in relation, relation=relation)


def distinguishing_formula(pm1: PointedModel, pm2: PointedModel):
    """
    A formula true at pm1 and false at pm2, or None when they are bisimilar.

    Built from the refinement rounds: a pair dropped in round k gets a
    separating formula of modal depth k.
    """
    m1, m2 = pm1.model, pm2.model
    agents = _agents_for(m1, m2, None)
    reasons = {}
    for _, removed in _refinement_rounds(m1, m2, agents):
        reasons.update(removed)
    if (pm1.point, pm2.point) not in reasons:
        return None

    memo = {}

    def separate(u, v):
        if (u, v) in memo:
            return memo[(u, v)]
        reason = reasons[(u, v)]
        if reason[0] == "atoms":
            diff = sorted(m1.atoms_at(u) ^ m2.atoms_at(v))[0]
            result = fm.Atom(diff) if diff in m1.atoms_at(u) else fm.Not(fm.Atom(diff))
        elif reason[0] == "forth":
            _, agent, u2 = reason
            witness = fm.conjunction_of(separate(u2, v2) for v2 in sorted(m2.successors(agent, v)))
            result = fm.Not(fm.Believes(agent, fm.Not(witness)))
        else:
            _, agent, v2 = reason
            options = None
            for u2 in sorted(m1.successors(agent, u)):
                piece = separate(u2, v2)
                options = piece if options is None else fm.disjunction(options, piece)
            result = fm.Believes(agent, options if options is not None else fm.FALSE)
        memo[(u, v)] = result
        return result

    return separate(pm1.point, pm2.point)
