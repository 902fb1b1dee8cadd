"""
A~priori Belief Updates

An agent whose beliefs became inconsistent (no accessible world at the point)
grafts a new cluster of worlds taken from a trial model onto the point, plus a
backup model describing how the other agents reason from there. The
correspondence map ties trial worlds to backup worlds.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional, Tuple

import kripke
import run_log
from errors import (
    CoherencyFailure,
    EngineError,
    InvalidUpdate,
    NotIntrospective,
    PointNotInconsistent,
    tag_agent,
)
from kripke import KripkeModel, PointedModel

RELAXED_NOTE = "relaxed-frames"

# ==============================================================================
# --- Update data ---
# ==============================================================================


@dataclass(frozen=True)
class AprioriUpdate:
    agent: str
    trial: KripkeModel
    cluster: frozenset
    backup: KripkeModel
    correspondence: Mapping[str, str] = field(default_factory=dict)
    name: str = "update"
    relaxed: bool = False
    drop_transitivity: bool = False
    drop_euclideanity: bool = False

    def __post_init__(self):
        object.__setattr__(self, "cluster", frozenset(self.cluster))
        object.__setattr__(self, "correspondence", MappingProxyType(dict(self.correspondence)))

    def __hash__(self):
        return hash((self.agent, self.name, self.cluster))

    def cluster_in_order(self):
        return tuple(w for w in self.trial.worlds if w in self.cluster)

    def validate(self, target: Optional[KripkeModel] = None):
        """Lists every broken invariant (empty list when the update is well formed)."""
        problems = []
        trial, backup = self.trial, self.backup

        if target is not None:
            if self.agent not in target.agents:
                problems.append(f"agent '{self.agent}' is not declared in '{target.name}'")
            for label, model in (("trial", trial), ("backup", backup)):
                if set(model.atoms) != set(target.atoms):
                    problems.append(f"{label} atoms differ from the target's")
                if set(model.agents) != set(target.agents):
                    problems.append(f"{label} agents differ from the target's")

        for label, model in (("trial", trial), ("backup", backup)):
            problems.extend(f"{label} {issue}" for issue in self._frame_issues(model))

        if not self.cluster:
            problems.append("cluster is empty")
        elif not self.cluster <= trial.world_set:
            problems.append("cluster names worlds outside the trial model")
        elif self.relaxed:
            if self.cluster not in kripke.clique_clusters(trial, self.agent):
                problems.append(f"cluster is not a closed {self.agent}-clique of the trial model")
        elif not self._frame_issues(trial):
            partition = kripke.clusters(trial, self.agent)
            owner = partition.cluster_of(next(iter(sorted(self.cluster))))
            if owner is None or not self.cluster <= owner:
                problems.append(f"cluster is not inside a single {self.agent}-cluster of the trial model")
            elif owner != self.cluster:
                problems.append(f"cluster is not a maximal {self.agent}-cluster of the trial model")

        for source, target_world in self.correspondence.items():
            if source not in trial.world_set:
                problems.append(f"map source '{source}' is not a trial world")
            if target_world not in backup.world_set:
                problems.append(f"map target '{target_world}' is not a backup world")
        return problems

    def _frame_issues(self, model):
        issues = []
        for agent in model.agents:
            rel = model.relation(agent)
            if not self.relaxed:
                if not kripke.is_transitive(rel) or not kripke.is_symmetric(rel):
                    issues.append(f"relation of '{agent}' is not a partial equivalence")
                continue
            if not self.drop_transitivity and not kripke.is_transitive(rel):
                issues.append(f"relation of '{agent}' is not transitive")
            if not self.drop_euclideanity and not kripke.is_euclidean(rel):
                issues.append(f"relation of '{agent}' is not euclidean")
        return issues


@dataclass(frozen=True)
class Violation:
    condition: str
    witnesses: Tuple[str, ...]
    agent: Optional[str] = None
    atom: Optional[str] = None

    def describe(self):
        parts = [self.condition, "(" + ", ".join(self.witnesses) + ")"]
        if self.agent:
            parts.append(f"agent={self.agent}")
        if self.atom:
            parts.append(f"atom={self.atom}")
        return " ".join(parts)


@dataclass(frozen=True)
class CoherencyReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def passed(self):
        return not self.violations

    def of_condition(self, condition):
        return [v for v in self.violations if v.condition == condition]


class UpdateBatch(dict):
    """Agent -> AprioriUpdate; each entry must belong to its key's agent."""

    def __init__(self, entries=None):
        super().__init__(entries or {})
        for agent, update in self.items():
            if update.agent != agent:
                raise InvalidUpdate(
                    f"Batch entry '{agent}' holds an update for '{update.agent}'", agent=agent)


# ==============================================================================
# --- Coherency ---
# ==============================================================================

def check_coherency(u: AprioriUpdate, atoms=None) -> CoherencyReport:
    """Checks atomic, reasoning and simulation coherency, listing every violation."""
    trial, backup, mapping = u.trial, u.backup, dict(u.correspondence)
    atoms = tuple(atoms) if atoms is not None else trial.atoms
    others = [b for b in sorted(trial.agents) if b != u.agent]
    order = [w for w in trial.worlds if w in mapping]
    violations = []

    # --- atomic: identified worlds agree on every declared atom
    for w in order:
        image = mapping[w]
        for p in atoms:
            if (w in trial.valuation.get(p, ())) != (image in backup.valuation.get(p, ())):
                violations.append(Violation("atomic", (w, image), atom=p))

    # --- reasoning: identification respects every other agent's relation
    for b in others:
        for w in order:
            for v in order:
                here = v in trial.successors(b, w)
                there = mapping[v] in backup.successors(b, mapping[w])
                if here != there:
                    violations.append(Violation("reasoning", (w, v, mapping[w], mapping[v]), agent=b))

    # --- simulation: backup moves of other agents are matched by trial moves
    for b in others:
        for w in order:
            image = mapping[w]
            for target in sorted(backup.successors(b, image)):
                if not any(mapping.get(v) == target for v in trial.successors(b, w)):
                    violations.append(Violation("simulation", (w, image, target), agent=b))

    return CoherencyReport(violations=tuple(violations))


def _fits(trial, backup, mapping, world, image, others):
    """Reasoning coherency of adding world -> image to a reasoning-coherent map."""
    pairs = list(mapping.items()) + [(world, image)]
    for b in others:
        for v, v_image in pairs:
            if (v in trial.successors(b, world)) != (v_image in backup.successors(b, image)):
                return False
            if (world in trial.successors(b, v)) != (image in backup.successors(b, v_image)):
                return False
    return True


def derive_correspondence(trial: KripkeModel, backup: KripkeModel, agent, atoms=None):
    """
    Greedy matching of propositionally equivalent worlds in declaration order.

    Each trial world takes the first unused backup world with the same atoms
    that keeps the map reasoning-coherent for every agent other than `agent`.
    """
    atoms = frozenset(atoms if atoms is not None else trial.atoms)
    others = [b for b in sorted(trial.agents) if b != agent]
    mapping = {}
    used = set()
    for world in trial.worlds:
        label = trial.atoms_at(world) & atoms
        for image in backup.worlds:
            if image in used or backup.atoms_at(image) & atoms != label:
                continue
            if _fits(trial, backup, mapping, world, image, others):
                mapping[world] = image
                used.add(image)
                break
    return mapping


# ==============================================================================
# --- Application ---
# ==============================================================================

def _block_tags(model: KripkeModel, agent):
    """Namespace tags for this agent's next fresh blocks (trial/backup, then trial2/backup2, ...)."""
    generation = 1
    while True:
        suffix = "" if generation == 1 else str(generation)
        trial_tag, backup_tag = f"trial{suffix}", f"backup{suffix}"
        prefixes = (f"{agent}${trial_tag}$", f"{agent}${backup_tag}$")
        if not any(w.startswith(prefixes) for w in model.worlds):
            return trial_tag, backup_tag
        generation += 1


def check_preconditions(pm: PointedModel, u: AprioriUpdate):
    """Raises the error apply_update would raise before building anything."""
    target = pm.model
    if u.agent not in target.agents:
        raise InvalidUpdate(f"Agent '{u.agent}' is not declared in '{target.name}'", agent=u.agent)
    if not kripke.classify(target).introspective:
        raise NotIntrospective(f"Model '{target.name}' is not introspective", agent=u.agent)
    if target.successors(u.agent, pm.point):
        raise PointNotInconsistent(
            f"Agent '{u.agent}' still considers worlds possible at '{pm.point}'", agent=u.agent)
    problems = u.validate(target)
    if problems:
        raise InvalidUpdate(f"Update '{u.name}' is malformed: " + "; ".join(problems), agent=u.agent)
    report = check_coherency(u, target.atoms)
    if not report.passed:
        listed = "; ".join(v.describe() for v in report.violations[:5])
        raise CoherencyFailure(f"Update '{u.name}' is not coherent: {listed}", report, agent=u.agent)
    return report


def apply_update(pm: PointedModel, u: AprioriUpdate, logger=None) -> PointedModel:
    """
    Result of agent u.agent applying u to (M, point).

    Worlds: M's worlds, the cluster (as fresh copies) and the backup (as fresh
    copies). The point sees exactly the cluster for the updating agent; cluster
    worlds see backup worlds for the other agents through the correspondence.
    """
    logger = logger or run_log.get_logger()
    check_preconditions(pm, u)

    target, trial, backup = pm.model, u.trial, u.backup
    a = u.agent
    mapping = dict(u.correspondence)
    trial_tag, backup_tag = _block_tags(target, a)

    cluster = u.cluster_in_order()
    fresh_trial = {w: f"{a}${trial_tag}${w}" for w in cluster}
    fresh_backup = {w: f"{a}${backup_tag}${w}" for w in backup.worlds}

    relations = {}
    for agent in target.agents:
        pairs = set(target.relation(agent))
        pairs |= {(fresh_backup[w], fresh_backup[v]) for w, v in backup.relation(agent)}
        if agent == a:
            pairs |= {(pm.point, fresh_trial[w]) for w in cluster}
            pairs |= {(fresh_trial[w], fresh_trial[v]) for w in cluster for v in cluster}
        else:
            pairs |= {
                (fresh_trial[w], fresh_backup[mapping[v]])
                for w in cluster
                for v in trial.successors(agent, w)
                if v in mapping
            }
        relations[agent] = frozenset(pairs)

    valuation = {}
    for p in target.atoms:
        holding = set(target.valuation[p])
        holding |= {fresh_backup[w] for w in backup.valuation.get(p, ())}
        holding |= {fresh_trial[w] for w in cluster if w in trial.valuation.get(p, ())}
        valuation[p] = frozenset(holding)

    notes = target.notes
    if u.relaxed and RELAXED_NOTE not in notes:
        notes = notes + (RELAXED_NOTE,)
        logger.warn(f"Update '{u.name}' applied with relaxed frame requirements")

    updated = KripkeModel(
        name=target.name,
        agents=target.agents,
        atoms=target.atoms,
        worlds=target.worlds + tuple(fresh_trial[w] for w in cluster) + tuple(fresh_backup[w] for w in backup.worlds),
        relations=relations,
        valuation=valuation,
        notes=notes,
    )
    logger.log(f"✓ {a} applied '{u.name}': +{len(cluster)} cluster, +{len(backup.worlds)} backup worlds")
    return PointedModel(updated, pm.point)


def apply_batch(pm: PointedModel, batch, logger=None) -> PointedModel:
    """
    Simultaneous private updates by several agents.

    Every precondition is checked against the original model first; then the
    updates are applied in lexicographic agent order.
    """
    batch = batch if isinstance(batch, UpdateBatch) else UpdateBatch(batch)
    for agent in sorted(batch):
        try:
            check_preconditions(pm, batch[agent])
        except EngineError as e:
            raise tag_agent(e, agent)

    result = pm
    for agent in sorted(batch):
        result = apply_update(result, batch[agent], logger=logger)
    return result


def prune_unreachable(pm: PointedModel, logger=None) -> PointedModel:
    """Keeps only the worlds reachable from the point (optional GC pass)."""
    keep = kripke.reachable(pm.model, {pm.point})
    dropped = len(pm.model.worlds) - len(keep)
    if not dropped:
        return pm
    if logger is not None:
        logger.log(f"Pruned {dropped} unreachable world(s)")
    return PointedModel(pm.model.restrict(keep), pm.point)
