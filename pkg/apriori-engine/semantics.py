"""
Truth and Announcements

Formulas are evaluated bottom-up into truth sets (the worlds where they hold).
Public announcements restrict a model to a truth set; private announcements
do the same inside one agent's part of the model only.
"""

from __future__ import annotations

import formula as fm
import kripke
import run_log
from errors import AnnouncementFalseAtPoint, EmptySubmodel, UndeclaredIdentifier
from kripke import KripkeModel, PointedModel


def check_vocabulary(model: KripkeModel, f):
    """Raises UndeclaredIdentifier if f mentions something the model lacks."""
    missing_atoms = sorted(fm.atoms_of(f) - set(model.atoms))
    if missing_atoms:
        raise UndeclaredIdentifier(f"Atom '{missing_atoms[0]}' is not declared in model '{model.name}'")
    missing_agents = sorted(fm.agents_of(f) - set(model.agents))
    if missing_agents:
        raise UndeclaredIdentifier(f"Agent '{missing_agents[0]}' is not declared in model '{model.name}'")


def extension(model: KripkeModel, f, _cache=None) -> frozenset:
    """The set of worlds of `model` where f holds."""
    cache = {} if _cache is None else _cache
    if f in cache:
        return cache[f]

    if isinstance(f, fm.Atom):
        result = model.valuation.get(f.name, frozenset())
    elif isinstance(f, fm.Falsum):
        result = frozenset()
    elif isinstance(f, fm.Not):
        result = model.world_set - extension(model, f.sub, cache)
    elif isinstance(f, fm.And):
        result = extension(model, f.left, cache) & extension(model, f.right, cache)
    elif isinstance(f, fm.Believes):
        holds = extension(model, f.sub, cache)
        result = frozenset(w for w in model.worlds if model.successors(f.agent, w) <= holds)
    elif isinstance(f, fm.Announced):
        # [phi]psi: worlds failing phi, plus phi-worlds where psi holds after restricting to phi
        survivors = extension(model, f.announcement, cache)
        if survivors:
            inner = extension(model.restrict(survivors), f.body)
            result = (model.world_set - survivors) | (survivors & inner)
        else:
            result = model.world_set
    else:
        raise TypeError(f"Not a formula: {f!r}")

    cache[f] = result
    return result


def evaluate(pm: PointedModel, f) -> bool:
    check_vocabulary(pm.model, f)
    return pm.point in extension(pm.model, f)


def restrict_by(model: KripkeModel, f, name=None):
    """The unpointed restriction M|f, or None when no world satisfies f."""
    check_vocabulary(model, f)
    survivors = extension(model, f)
    if not survivors:
        return None
    return model.restrict(survivors, name=name)


def public_announce(pm: PointedModel, f) -> PointedModel:
    """
    (M|f, point): keeps the worlds satisfying f.

    Raises AnnouncementFalseAtPoint if the point fails f.
    """
    check_vocabulary(pm.model, f)
    survivors = extension(pm.model, f)
    if pm.point not in survivors:
        raise AnnouncementFalseAtPoint(
            f"'{fm.print_formula(f)}' is false at the point '{pm.point}'")
    return PointedModel(pm.model.restrict(survivors), pm.point)


def private_announce(pm: PointedModel, agents, f, logger=None) -> PointedModel:
    """
    Announces f inside each listed agent's part, treating the part as the whole model.

    Worlds of a part failing f there are deleted from the full model together
    with every arrow touching them. The point is never deleted.
    """
    logger = logger or run_log.get_logger()
    check_vocabulary(pm.model, f)

    parts = {}
    removed = set()
    for agent in sorted(agents):
        part = kripke.submodel(pm, agent, logger=logger)
        if kripke.is_empty(part):
            raise EmptySubmodel(f"Part of agent '{agent}' is empty", agent=agent)
        parts[agent] = part.world_set
        removed |= part.world_set - extension(part, f)

    owners = sorted(parts)
    for i, first in enumerate(owners):
        for second in owners[i + 1:]:
            if parts[first] & parts[second]:
                logger.warn(f"Parts of agents '{first}' and '{second}' overlap")

    if pm.point in removed:
        logger.warn(f"Point '{pm.point}' fails '{fm.print_formula(f)}' inside an agent's part; kept")
        removed.discard(pm.point)

    if not removed:
        return pm
    return PointedModel(pm.model.restrict(pm.model.world_set - removed), pm.point)
