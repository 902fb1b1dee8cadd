"""
Update Synthesis

Trial-and-error search for an a~priori update that makes an inconsistent
agent consistent again. Candidates are built from master models, explicit
a~priori assumptions (formulas) and previously rejected assumptions, then
checked one by one in a fixed order.
"""

from __future__ import annotations

import fnmatch
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Tuple

import pandas as pd

import apriori
import formula as fm
import kripke
import model_io
import run_log
import semantics
from errors import (
    CandidateBudgetExceeded,
    CoherencyFailure,
    EngineError,
    InvalidUpdate,
    ModelFileError,
    NotPartialEquivalence,
    PointNotInconsistent,
)
from kripke import PointedModel

# --- CONFIGURATION ---
SOURCE_KINDS = ("master-models", "apb-variation", "apb-negated-history", "relaxed-frames")
DEFAULT_SOURCE_ORDER = ("apb-variation", "apb-negated-history", "master-models")
DEFAULT_BUDGET = 200

ACCEPTED = "accepted"
REJECT_COHERENCY = "coherency"
REJECT_TRIGGER = "trigger-unsatisfiable"
REJECT_INCONSISTENT = "still-inconsistent"

# ==============================================================================
# --- Problem types ---
# ==============================================================================


@dataclass(frozen=True)
class CandidateSource:
    kind: str
    masters: Tuple[kripke.KripkeModel, ...]
    apb_pool: Tuple = ()
    rejected_history: Tuple = ()

    def __post_init__(self):
        if self.kind not in SOURCE_KINDS:
            raise ValueError(f"Unknown candidate source '{self.kind}'")
        if not self.masters:
            raise ValueError(f"Source '{self.kind}' needs at least one master model")
        object.__setattr__(self, "masters", tuple(self.masters))
        object.__setattr__(self, "apb_pool", tuple(self.apb_pool))
        object.__setattr__(self, "rejected_history", tuple(self.rejected_history))


@dataclass(frozen=True)
class SynthesisProblem:
    target: PointedModel
    agent: str
    sources: Tuple[CandidateSource, ...] = ()
    trigger: Optional[object] = None
    max_candidates: int = DEFAULT_BUDGET
    observable: Tuple[str, ...] = ()
    name: str = "synth"

    def __post_init__(self):
        object.__setattr__(self, "sources", tuple(self.sources))
        object.__setattr__(self, "observable", tuple(self.observable))
        if self.max_candidates < 1:
            raise ValueError("max_candidates must be positive")

    def check(self):
        if self.target.model.successors(self.agent, self.target.point):
            raise PointNotInconsistent(
                f"Agent '{self.agent}' is not inconsistent at '{self.target.point}'", agent=self.agent)


@dataclass(frozen=True)
class Candidate:
    id: str
    source: str
    update: apriori.AprioriUpdate

    def describe(self):
        cluster = ",".join(self.update.cluster_in_order())
        return f"trial={self.update.trial.name} cluster={{{cluster}}} backup={self.update.backup.name}"


@dataclass(frozen=True)
class TraceEntry:
    candidate_id: str
    source: str
    description: str
    reason: str

    @property
    def accepted(self):
        return self.reason == ACCEPTED


@dataclass(frozen=True)
class SynthesisOutcome:
    status: str
    update: Optional[apriori.AprioriUpdate] = None
    trace: Tuple[TraceEntry, ...] = ()
    notes: Tuple[str, ...] = ()
    result: Optional[PointedModel] = field(default=None, compare=False)

    @property
    def succeeded(self):
        return self.status == "success"

    def rejected(self):
        return [entry for entry in self.trace if not entry.accepted]


# ==============================================================================
# --- Candidate generation ---
# ==============================================================================

def _restrictions(masters, formulas, label):
    out = []
    for model in masters:
        for i, f in enumerate(formulas, start=1):
            restricted = semantics.restrict_by(model, f, name=f"{model.name}|{label}{i}")
            if restricted is not None:
                out.append(restricted)
    return out


def _target_parts(problem, logger):
    """Nonempty parts of the other agents: the last commonly considered model."""
    parts = []
    seen = set()
    for other in sorted(problem.target.model.agents):
        if other == problem.agent:
            continue
        part = kripke.submodel(problem.target, other, logger=logger)
        if kripke.is_empty(part) or part.world_set in seen:
            continue
        seen.add(part.world_set)
        parts.append(part)
    return parts


def _models_for(source, problem, logger):
    """(trials, backups) for one source, in enumeration order."""
    if source.kind in ("master-models", "relaxed-frames"):
        return list(source.masters), list(source.masters)

    backups = (
        _target_parts(problem, logger)
        + list(source.masters)
        + _restrictions(source.masters, source.apb_pool, "apb")
        + _restrictions(source.masters, source.rejected_history, "rejected")
    )
    if source.kind == "apb-variation":
        return _restrictions(source.masters, source.apb_pool, "apb"), backups

    # apb-negated-history: APB' & ~APB for each rejected APB
    pool = source.apb_pool or (fm.top(),)
    trials = []
    for model in source.masters:
        for i, new in enumerate(pool, start=1):
            for j, old in enumerate(source.rejected_history, start=1):
                restricted = semantics.restrict_by(
                    model, fm.And(new, fm.Not(old)), name=f"{model.name}|apb{i}-rejected{j}")
                if restricted is not None:
                    trials.append(restricted)
    return trials, backups


def _matching_clusters(trial, problem, relaxed):
    """The agent's clusters in the trial that look like the point on observable atoms."""
    if relaxed:
        found = kripke.clique_clusters(trial, problem.agent)
    else:
        try:
            found = kripke.clusters(trial, problem.agent).clusters
        except NotPartialEquivalence:
            return []
    observable = frozenset(problem.observable)
    seen = problem.target.model.atoms_at(problem.target.point) & observable
    matching = [c for c in found if all(trial.atoms_at(w) & observable == seen for w in c)]
    return sorted(matching, key=min)


def generate_candidates(problem: SynthesisProblem, logger=None):
    """Deterministic stream of candidates: source, master, formula, cluster order."""
    logger = logger or run_log.Logger()
    counter = 0
    for source in problem.sources:
        relaxed = source.kind == "relaxed-frames"
        trials, backups = _models_for(source, problem, logger)
        for trial in trials:
            clusters = _matching_clusters(trial, problem, relaxed)
            if not clusters:
                continue
            for backup in backups:
                mapping = apriori.derive_correspondence(trial, backup, problem.agent, problem.target.model.atoms)
                for cluster in clusters:
                    counter += 1
                    candidate_id = f"c{counter:03d}"
                    update = apriori.AprioriUpdate(
                        agent=problem.agent,
                        trial=trial,
                        cluster=cluster,
                        backup=backup,
                        correspondence=mapping,
                        name=f"{problem.name}_{candidate_id}",
                        relaxed=relaxed,
                    )
                    yield Candidate(id=candidate_id, source=source.kind, update=update)


# ==============================================================================
# --- Acceptance ---
# ==============================================================================

def accept(candidate, problem: SynthesisProblem, logger=None):
    """
    Checks one candidate.

    Returns: (accepted, reason, resulting pointed model or None)
    """
    logger = logger or run_log.Logger()
    update = candidate.update if isinstance(candidate, Candidate) else candidate
    agent, point = problem.agent, problem.target.point

    try:
        result = apriori.apply_update(problem.target, update, logger=logger)
    except (InvalidUpdate, CoherencyFailure, NotPartialEquivalence):
        return False, REJECT_COHERENCY, None

    if problem.trigger is not None:
        if not semantics.evaluate(result, problem.trigger):
            return False, REJECT_TRIGGER, None
        cluster_worlds = result.model.successors(agent, point)
        if not cluster_worlds & semantics.extension(result.model, problem.trigger):
            return False, REJECT_INCONSISTENT, None
        result = semantics.private_announce(result, [agent], problem.trigger, logger=logger)

    if not result.model.successors(agent, point):
        return False, REJECT_INCONSISTENT, None
    return True, ACCEPTED, result


def synthesize(problem: SynthesisProblem, logger=None, workers=1) -> SynthesisOutcome:
    """
    Runs candidates through accept in enumeration order; first success wins.

    With workers > 1, chunks of candidates are evaluated speculatively in a
    thread pool and committed in order.
    """
    logger = logger or run_log.Logger()
    problem.check()
    logger.log(f"🚀 Synthesis '{problem.name}' for agent {problem.agent}")

    trace = []
    notes = []
    stream = generate_candidates(problem, logger)
    chunk_size = max(1, workers)
    examined = 0

    executor = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    try:
        while True:
            chunk = []
            try:
                for candidate in stream:
                    if examined >= problem.max_candidates:
                        raise CandidateBudgetExceeded(
                            f"Candidate budget of {problem.max_candidates} exceeded")
                    examined += 1
                    chunk.append(candidate)
                    if len(chunk) == chunk_size:
                        break
            except CandidateBudgetExceeded as e:
                notes.append(str(e))
                logger.warn(str(e))
                stream = iter(())

            if not chunk:
                break

            if executor is not None:
                verdicts = list(executor.map(lambda c: accept(c, problem, logger), chunk))
            else:
                verdicts = [accept(c, problem, logger) for c in chunk]

            for candidate, (ok, reason, result) in zip(chunk, verdicts):
                trace.append(TraceEntry(candidate.id, candidate.source, candidate.describe(), reason))
                logger.log(f"{'✓' if ok else '✗'} {candidate.id} {candidate.describe()}: {reason}")
                if ok:
                    return SynthesisOutcome("success", candidate.update, tuple(trace), tuple(notes), result)
    finally:
        if executor is not None:
            executor.shutdown(wait=True)

    logger.log(f"❌ Synthesis '{problem.name}' exhausted after {len(trace)} candidate(s)")
    return SynthesisOutcome("exhausted", None, tuple(trace), tuple(notes), None)


def render_trace(outcome: SynthesisOutcome):
    rows = [
        {"candidate": e.candidate_id, "source": e.source, "candidate details": e.description, "verdict": e.reason}
        for e in outcome.trace
    ]
    return pd.DataFrame(rows, columns=["candidate", "source", "candidate details", "verdict"])


# ==============================================================================
# --- Problem files ---
# ==============================================================================

def parse_problem_lines(lines, source="<problem>", base_dir=".", settings=None, logger=None):
    settings = settings or {}
    agent = None
    target_ref = point = None
    trigger_text = None
    pre_announce = False
    master_refs = []
    apb_texts = []
    rejected_texts = []
    observable_patterns = []
    budget = DEFAULT_BUDGET
    order = None
    relaxed = bool(settings.get("relaxed_frames", False))

    def fail(lineno, message):
        raise ModelFileError(f"{source}:{lineno}: {message}")

    for lineno, line in enumerate(lines, start=1):
        words = model_io.tokenize(line, source, lineno)
        if not words:
            continue
        keyword, args = words[0], words[1:]
        if keyword == "synth":
            if len(args) != 2 or args[0] != "for":
                fail(lineno, "expected: synth for <agent>")
            agent = args[1]
        elif keyword == "target":
            if len(args) != 3 or args[1] != "point":
                fail(lineno, "expected: target <model> point <world>")
            target_ref, point = args[0], args[2]
        elif keyword == "trigger":
            if len(args) != 1:
                fail(lineno, 'expected: trigger "<formula>"')
            trigger_text = args[0]
        elif keyword == "pre-announce":
            pre_announce = True
        elif keyword == "masters":
            master_refs.extend(args)
        elif keyword == "apb":
            apb_texts.extend(args)
        elif keyword == "rejected":
            rejected_texts.extend(args)
        elif keyword == "observable":
            observable_patterns.extend(args)
        elif keyword == "budget":
            if len(args) != 1 or not args[0].isdigit() or int(args[0]) < 1:
                fail(lineno, "expected: budget <positive integer>")
            budget = int(args[0])
        elif keyword == "heuristics":
            unknown = [kind for kind in args if kind not in SOURCE_KINDS]
            if unknown or not args:
                fail(lineno, f"unknown heuristics {unknown}")
            order = tuple(args)
        elif keyword == "relaxed":
            relaxed = True
        else:
            fail(lineno, f"unknown directive '{keyword}'")

    if agent is None or target_ref is None:
        raise ModelFileError(f"{source}: a problem needs 'synth for' and 'target' lines")

    model, _, _ = model_io.resolve_model(target_ref, base_dir, settings)
    target = PointedModel(model, point)
    vocabulary = (model.agents, model.atoms)

    trigger = fm.parse_formula(trigger_text, *vocabulary) if trigger_text is not None else None
    if pre_announce:
        if trigger is None:
            raise ModelFileError(f"{source}: 'pre-announce' needs a trigger")
        target = semantics.public_announce(target, trigger)

    masters = [model_io.resolve_model(ref, base_dir, settings)[0] for ref in master_refs]
    apb_pool = tuple(fm.parse_formula(text, *vocabulary) for text in apb_texts)
    history = tuple(fm.parse_formula(text, *vocabulary) for text in rejected_texts)

    observable = []
    for pattern in observable_patterns:
        hits = [atom for atom in model.atoms if fnmatch.fnmatchcase(atom, pattern)]
        if not hits:
            raise ModelFileError(f"{source}: observable '{pattern}' matches no atom")
        observable.extend(atom for atom in hits if atom not in observable)

    kinds = list(order or DEFAULT_SOURCE_ORDER)
    if relaxed and "relaxed-frames" not in kinds:
        kinds.append("relaxed-frames")
    sources = []
    if masters:
        for kind in kinds:
            if kind == "apb-variation" and not apb_pool:
                continue
            if kind == "apb-negated-history" and not history:
                continue
            sources.append(CandidateSource(kind, tuple(masters), apb_pool, history))

    name = os.path.splitext(os.path.basename(source))[0].replace("-", "_") or "synth"
    return SynthesisProblem(
        target=target,
        agent=agent,
        sources=tuple(sources),
        trigger=trigger,
        max_candidates=budget,
        observable=tuple(observable),
        name=name,
    )


def load_problem(path, settings=None, logger=None):
    """Reads a .synth problem file."""
    try:
        return parse_problem_lines(model_io.read_lines(path), source=path,
                                   base_dir=os.path.dirname(path) or ".", settings=settings, logger=logger)
    except EngineError:
        raise
    except ValueError as e:
        raise ModelFileError(f"{path}: {e}") from e
