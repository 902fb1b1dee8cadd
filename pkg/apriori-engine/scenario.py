"""
Scenario Runner

A .kms scenario is a line-oriented script run against one current pointed
model:

    scenario <name>
    load <file> [as <alias>]
    point [<alias>] <world>
    assert "<formula>"            refute "<formula>"
    announce "<formula>"          private <agent>[,<agent>...] "<formula>"
    apriori <agent> <update-file>
    apriori-batch <agent>:<update-file> ...
    synth <problem-file> expect <success|exhausted>
    worlds <n>
    expect-error <kind>           (applies to the next step)
    gc

Paths are relative to the scenario file.
"""

from __future__ import annotations

import glob
import os
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Optional, Tuple

import apriori
import formula as fm
import model_io
import run_log
import semantics
import synthesis
from errors import EngineError, ModelFileError, ScenarioError, TruncationMarginError
from kripke import PointedModel
from settings import default_settings

# --- CONFIGURATION ---
CORPUS_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), "scenarios")

CORPUS_ORDER = (
    "mcp_standard",
    "mcp_apb2",
    "mcp_simultaneous",
    "mcp_all_clean",
    "consecutive_success",
    "consecutive_failure",
    "synthesis_mcp",
    "synthesis_consecutive",
)

# keyword -> (min args, max args or None)
STEP_ARITY = {
    "load": (1, 3),
    "point": (1, 2),
    "assert": (1, 1),
    "refute": (1, 1),
    "announce": (1, 1),
    "private": (2, 2),
    "apriori": (2, 2),
    "apriori-batch": (1, None),
    "synth": (3, 3),
    "worlds": (1, 1),
    "expect-error": (1, 1),
    "gc": (0, 0),
}

# ==============================================================================
# --- Scenario data ---
# ==============================================================================


@dataclass(frozen=True)
class Step:
    index: int
    lineno: int
    kind: str
    args: Tuple[str, ...]

    def describe(self):
        shown = " ".join(f'"{a}"' if " " in a else a for a in self.args)
        return f"{self.kind} {shown}".strip()


@dataclass(frozen=True)
class Scenario:
    name: str
    steps: Tuple[Step, ...]
    source: str = "<scenario>"
    base_dir: str = "."


@dataclass(frozen=True)
class StepVerdict:
    index: int
    lineno: int
    step: str
    passed: bool
    detail: str = ""


@dataclass
class RunReport:
    name: str
    verdicts: list = field(default_factory=list)
    passed: bool = True
    final: Optional[PointedModel] = None
    log: str = ""

    def failures(self):
        return [v for v in self.verdicts if not v.passed]


# ==============================================================================
# --- Parsing ---
# ==============================================================================

def _check_step(keyword, args, source, lineno):
    if keyword not in STEP_ARITY:
        raise ModelFileError(f"{source}:{lineno}: unknown step '{keyword}'")
    low, high = STEP_ARITY[keyword]
    if len(args) < low or (high is not None and len(args) > high):
        raise ModelFileError(f"{source}:{lineno}: wrong number of arguments for '{keyword}'")
    if keyword == "load" and len(args) not in (1, 3):
        raise ModelFileError(f"{source}:{lineno}: expected: load <file> [as <alias>]")
    if keyword == "load" and len(args) == 3 and args[1] != "as":
        raise ModelFileError(f"{source}:{lineno}: expected: load <file> as <alias>")
    if keyword == "synth" and (args[1] != "expect" or args[2] not in ("success", "exhausted")):
        raise ModelFileError(f"{source}:{lineno}: expected: synth <file> expect <success|exhausted>")
    if keyword == "worlds" and not args[0].isdigit():
        raise ModelFileError(f"{source}:{lineno}: expected: worlds <n>")
    if keyword == "apriori-batch":
        for entry in args:
            agent, _, path = entry.partition(":")
            if not agent or not path:
                raise ModelFileError(f"{source}:{lineno}: batch entries are <agent>:<file>")


def parse_scenario_lines(lines, source="<scenario>", base_dir="."):
    name = None
    steps = []
    for lineno, line in enumerate(lines, start=1):
        words = model_io.tokenize(line, source, lineno)
        if not words:
            continue
        keyword, args = words[0], tuple(words[1:])
        if keyword == "scenario":
            if len(args) != 1:
                raise ModelFileError(f"{source}:{lineno}: expected: scenario <name>")
            name = args[0]
            continue
        _check_step(keyword, args, source, lineno)
        steps.append(Step(index=len(steps) + 1, lineno=lineno, kind=keyword, args=args))

    if steps and steps[-1].kind == "expect-error":
        raise ModelFileError(f"{source}: 'expect-error' must be followed by a step")
    if name is None:
        name = os.path.splitext(os.path.basename(source))[0]
    return Scenario(name=name, steps=tuple(steps), source=source, base_dir=base_dir)


def parse_scenario(path):
    """Reads a .kms file."""
    return parse_scenario_lines(model_io.read_lines(path), source=path,
                                base_dir=os.path.dirname(path) or ".")


def discover_scenarios(directory):
    """All .kms files of a directory, sorted by file name."""
    paths = sorted(glob.glob(os.path.join(directory, "*.kms")))
    return [parse_scenario(p) for p in paths]


def load_corpus(directory=CORPUS_DIR):
    """The bundled scenarios in corpus order; extra files follow by name."""
    found = {s.name: s for s in discover_scenarios(directory)}
    ordered = [found.pop(name) for name in CORPUS_ORDER if name in found]
    return ordered + [found[name] for name in sorted(found)]


# ==============================================================================
# --- Execution ---
# ==============================================================================

class _Runner:
    """Executes one scenario's steps against a current pointed model."""

    def __init__(self, scenario, settings, logger):
        self.scenario = scenario
        self.settings = settings
        self.logger = logger
        self.models = {}
        self.current = None
        self.truncated = False

    def path(self, relative):
        if os.path.isabs(relative):
            return relative
        return os.path.join(self.scenario.base_dir, relative)

    def require_model(self):
        if self.current is None:
            raise ScenarioError("No model loaded and pointed yet")
        return self.current

    def parse(self, text):
        model = self.require_model().model
        return fm.parse_formula(text, model.agents, model.atoms)

    def check_margin(self, f):
        if not self.truncated:
            return
        trunc_n = self.settings["trunc_n"]
        needed = fm.modal_depth(f) + fm.numbers_mentioned(f)
        if needed > trunc_n - 2:
            raise TruncationMarginError(
                f"'{fm.print_formula(f)}' needs depth + numbers {needed} > N - 2 = {trunc_n - 2}")

    def after_update(self):
        if self.settings.get("gc_unreachable"):
            self.current = apriori.prune_unreachable(self.current, logger=self.logger)

    # --- steps ---

    def step_load(self, step):
        reference = step.args[0]
        alias = step.args[2] if len(step.args) == 3 else reference
        model, point, truncated = model_io.resolve_model(
            reference if reference.startswith("@") else self.path(reference), ".", self.settings)
        self.models[alias] = model
        self.truncated = self.truncated or truncated
        self.current = PointedModel(model, point) if point is not None else None
        return f"loaded '{model.name}' ({len(model.worlds)} worlds)"

    def step_point(self, step):
        if len(step.args) == 2:
            alias, world = step.args
            if alias not in self.models:
                raise ScenarioError(f"Unknown model alias '{alias}'")
            model = self.models[alias]
        else:
            (world,) = step.args
            if self.current is not None:
                model = self.current.model
            elif len(self.models) == 1:
                model = next(iter(self.models.values()))
            else:
                raise ScenarioError("'point' needs a loaded model")
        if world not in model.world_set:
            raise ScenarioError(f"World '{world}' is not in model '{model.name}'")
        self.current = PointedModel(model, world)
        return f"point {world}"

    def step_assert(self, step, expected=True):
        f = self.parse(step.args[0])
        self.check_margin(f)
        verdict = semantics.evaluate(self.current, f)
        if verdict != expected:
            raise AssertionError(f"'{step.args[0]}' is {'true' if verdict else 'false'} at '{self.current.point}'")
        return "true" if verdict else "false"

    def step_refute(self, step):
        return self.step_assert(step, expected=False)

    def step_announce(self, step):
        self.current = semantics.public_announce(self.current, self.parse(step.args[0]))
        return f"{len(self.current.model.worlds)} worlds left"

    def step_private(self, step):
        agents = [a for a in step.args[0].split(",") if a]
        self.current = semantics.private_announce(self.current, agents, self.parse(step.args[1]),
                                                  logger=self.logger)
        return f"{len(self.current.model.worlds)} worlds left"

    def step_apriori(self, step):
        agent, path = step.args
        update = model_io.load_update(self.path(path), self.settings)
        if update.agent != agent:
            raise ScenarioError(f"Update '{update.name}' belongs to '{update.agent}', not '{agent}'")
        self.current = apriori.apply_update(self.require_model(), update, logger=self.logger)
        self.after_update()
        return f"{len(self.current.model.worlds)} worlds"

    def step_apriori_batch(self, step):
        batch = {}
        for entry in step.args:
            agent, _, path = entry.partition(":")
            if agent in batch:
                raise ScenarioError(f"Agent '{agent}' appears twice in the batch")
            batch[agent] = model_io.load_update(self.path(path), self.settings)
        self.current = apriori.apply_batch(self.require_model(), apriori.UpdateBatch(batch), logger=self.logger)
        self.after_update()
        return f"{len(self.current.model.worlds)} worlds"

    def step_synth(self, step):
        problem = synthesis.load_problem(self.path(step.args[0]), self.settings, logger=self.logger)
        outcome = synthesis.synthesize(problem, logger=self.logger,
                                       workers=self.settings.get("synth_workers", 1))
        if outcome.status != step.args[2]:
            raise AssertionError(f"synthesis ended '{outcome.status}', expected '{step.args[2]}'")
        return f"{outcome.status} after {len(outcome.trace)} candidate(s)"

    def step_worlds(self, step):
        count = len(self.require_model().model.worlds)
        if count != int(step.args[0]):
            raise AssertionError(f"model has {count} worlds, expected {step.args[0]}")
        return f"{count} worlds"

    def step_gc(self, step):
        self.current = apriori.prune_unreachable(self.require_model(), logger=self.logger)
        return f"{len(self.current.model.worlds)} worlds"

    def execute(self, step):
        if step.kind not in ("load", "point", "synth"):
            self.require_model()
        handler = getattr(self, "step_" + step.kind.replace("-", "_"))
        return handler(step)


def run(scenario: Scenario, settings=None, logger=None) -> RunReport:
    """
    Runs the steps in order. The first failing step ends the scenario.

    Returns: RunReport
    """
    settings = settings or default_settings()
    logger = logger or run_log.Logger()
    runner = _Runner(scenario, settings, logger)
    report = RunReport(name=scenario.name)
    logger.log(f"🚀 Scenario '{scenario.name}' ({len(scenario.steps)} steps)")

    expected_kind = None
    for step in scenario.steps:
        label = f"step {step.index} (line {step.lineno})"
        if step.kind == "expect-error":
            expected_kind = step.args[0]
            continue

        try:
            detail = runner.execute(step)
            error = None
        except EngineError as e:
            error = e
        except (OSError, ValueError) as e:
            error = ModelFileError(str(e))
        except AssertionError as e:
            verdict = StepVerdict(step.index, step.lineno, step.describe(), False, str(e))
            report.verdicts.append(verdict)
            logger.log(f"❌ {label} {step.describe()}: {e}", level="ERROR")
            report.passed = False
            break

        if expected_kind is not None:
            if error is not None and error.kind == expected_kind:
                passed, detail = True, f"raised {error.kind} as expected"
            elif error is not None:
                passed, detail = False, f"raised {error.kind}, expected {expected_kind}: {error}"
            else:
                passed, detail = False, f"expected error {expected_kind}, step succeeded"
            expected_kind = None
        elif error is not None:
            passed, detail = False, f"{error.kind}: {error}"
        else:
            passed = True

        report.verdicts.append(StepVerdict(step.index, step.lineno, step.describe(), passed, detail))
        if not passed:
            logger.log(f"❌ {label} {step.describe()}: {detail}", level="ERROR")
            report.passed = False
            break
        logger.log(f"✅ {label} {step.describe()}: {detail}")

    report.final = runner.current
    logger.log(f"{'✅' if report.passed else '❌'} Scenario '{scenario.name}' "
               f"{'passed' if report.passed else 'failed'}")
    report.log = logger.get_logs()
    return report


def run_corpus(scenarios, settings=None, workers=None):
    """
    Runs independent scenarios in a thread pool.

    Returns: list of RunReport in the order of `scenarios`
    """
    settings = settings or default_settings()
    workers = workers or settings.get("corpus_workers", 1)
    scenarios = list(scenarios)
    reports = [None] * len(scenarios)

    with ThreadPoolExecutor(max_workers=max(1, workers)) as executor:
        futures = {executor.submit(run, s, settings, run_log.Logger()): i for i, s in enumerate(scenarios)}
        for future in as_completed(futures):
            reports[futures[future]] = future.result()
    return reports
