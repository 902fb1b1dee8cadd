"""
apriori-engine command line

    python cli.py check models/m0.km
    python cli.py eval models/m0.km ABC "ma & mb & mc"
    python cli.py run --corpus
    python cli.py export-dot models/m0.km m0.dot --point A
    python cli.py synth problems/mcp_a.synth --emit found.kmu

Exit codes: 0 success/true, 1 false/failed/exhausted, 2 usage or file errors.
"""

import argparse
import sys
from datetime import datetime

import dot_export
import formula as fm
import kripke
import model_io
import run_log
import scenario
import semantics
import synthesis
from errors import EngineError
from kripke import PointedModel
from settings import load_settings

EXIT_OK = 0
EXIT_FALSE = 1
EXIT_USAGE = 2


def print_step_header(step_num, title):
    print(f"\n{'='*60}")
    print(f"STEP {step_num}: {title}")
    print(f"{'='*60}")


def _load_pointed(reference, settings, world=None):
    model, point, _ = model_io.resolve_model(reference, ".", settings)
    point = world or point
    if point is None:
        raise EngineError(f"No world given and '{reference}' declares no point")
    return PointedModel(model, point)


# ==============================================================================
# --- Verbs ---
# ==============================================================================

def cmd_check(args, settings):
    model, point, _ = model_io.resolve_model(args.model, ".", settings)
    profile = kripke.classify(model)
    print(f"Model '{model.name}': {len(model.worlds)} worlds, agents {', '.join(model.agents)}")
    if point is not None:
        print(f"Point: {point}")
    print(profile.to_frame().to_string())
    print()
    for line in profile.summary_lines():
        print(line)
    print("✅ Model parsed")
    return EXIT_OK


def cmd_eval(args, settings):
    if len(args.terms) == 1:
        world, text = None, args.terms[0]
    elif len(args.terms) == 2:
        world, text = args.terms
    else:
        raise EngineError("expected: eval <model> [<world>] <formula>")
    pm = _load_pointed(args.model, settings, world)
    f = fm.parse_formula(text, pm.model.agents, pm.model.atoms)
    verdict = semantics.evaluate(pm, f)
    print(f"{fm.print_formula(f)} at {pm.point}: {'true' if verdict else 'false'}")
    return EXIT_OK if verdict else EXIT_FALSE


def _print_report(report, verbose):
    mark = "✅" if report.passed else "❌"
    print(f"{mark} {report.name}: {sum(v.passed for v in report.verdicts)}/{len(report.verdicts)} steps passed")
    for v in report.failures():
        print(f"   ❌ step {v.index} (line {v.lineno}) {v.step}: {v.detail}")
    if verbose:
        print(report.log)


def cmd_run(args, settings):
    start_time = datetime.now()
    if args.corpus:
        scenarios = scenario.load_corpus()
    elif args.scenario:
        scenarios = [scenario.parse_scenario(args.scenario)]
    else:
        raise EngineError("expected a scenario file or --corpus")

    print_step_header(1, f"Running {len(scenarios)} scenario(s)")
    workers = args.workers or settings["corpus_workers"]
    reports = scenario.run_corpus(scenarios, settings, workers=workers)
    for report in reports:
        _print_report(report, args.verbose)

    passed = sum(r.passed for r in reports)
    duration = datetime.now() - start_time
    print(f"\n{'='*60}")
    print(f"{'✅' if passed == len(reports) else '❌'} {passed}/{len(reports)} scenario(s) passed")
    print(f"   Time taken: {duration.total_seconds():.1f} seconds")
    print(f"{'='*60}\n")
    return EXIT_OK if passed == len(reports) else EXIT_FALSE


def cmd_export_dot(args, settings):
    model, point, _ = model_io.resolve_model(args.model, ".", settings)
    point = args.point or point
    dot_export.write_dot(model, args.out, point)
    print(f"✅ Wrote {args.out} ({len(model.worlds)} nodes, {len(dot_export.edge_list(model))} edges)")
    return EXIT_OK


def cmd_synth(args, settings):
    logger = run_log.Logger(echo=args.verbose)
    problem = synthesis.load_problem(args.problem, settings, logger=logger)

    print_step_header(1, f"Searching updates for agent {problem.agent}")
    outcome = synthesis.synthesize(problem, logger=logger, workers=settings["synth_workers"])
    trace = synthesis.render_trace(outcome)
    if not trace.empty:
        print(trace.to_string(index=False))
    for note in outcome.notes:
        print(f"⚠️ {note}")

    print_step_header(2, "Result")
    if not outcome.succeeded:
        print(f"❌ Exhausted after {len(outcome.trace)} candidate(s)")
        return EXIT_FALSE
    print(f"✅ Accepted {outcome.trace[-1].candidate_id}: {outcome.trace[-1].description}")
    if args.emit:
        model_io.write_update(outcome.update, args.emit)
        print(f"✅ Update written to {args.emit}")
    return EXIT_OK


# ==============================================================================
# --- Entry point ---
# ==============================================================================

def build_parser():
    parser = argparse.ArgumentParser(description="A~priori belief update engine")
    parser.add_argument("--trunc-n", type=int, help="Consecutive-numbers truncation bound")
    parser.add_argument("--relaxed-frames", action="store_true", default=None, help="Relaxed frame mode")
    parser.add_argument("--gc-unreachable", action="store_true", default=None,
                        help="Prune unreachable worlds after updates")
    parser.add_argument("--env-file", help="Settings file (default: apriori.env)")
    verbs = parser.add_subparsers(dest="verb", required=True)

    check = verbs.add_parser("check", help="Classify a model's relations")
    check.add_argument("model")
    check.set_defaults(handler=cmd_check)

    evaluate = verbs.add_parser("eval", help="Evaluate a formula at a world")
    evaluate.add_argument("model")
    evaluate.add_argument("terms", nargs="+", metavar="[world] formula")
    evaluate.set_defaults(handler=cmd_eval)

    run = verbs.add_parser("run", help="Run a scenario or the bundled corpus")
    run.add_argument("scenario", nargs="?")
    run.add_argument("--corpus", action="store_true", help="Run every bundled scenario")
    run.add_argument("--workers", type=int, help="Thread pool size")
    run.add_argument("--verbose", "-v", action="store_true", help="Print run logs")
    run.set_defaults(handler=cmd_run)

    export = verbs.add_parser("export-dot", help="Write a Graphviz file")
    export.add_argument("model")
    export.add_argument("out")
    export.add_argument("--point", help="World drawn with a doubled border")
    export.set_defaults(handler=cmd_export_dot)

    synth = verbs.add_parser("synth", help="Search for an a~priori update")
    synth.add_argument("problem")
    synth.add_argument("--emit", help="Write the accepted update to this .kmu file")
    synth.add_argument("--verbose", "-v", action="store_true", help="Print the search log")
    synth.set_defaults(handler=cmd_synth)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    overrides = {
        "trunc_n": args.trunc_n,
        "relaxed_frames": args.relaxed_frames,
        "gc_unreachable": args.gc_unreachable,
    }
    try:
        settings = load_settings(args.env_file, overrides)
        return args.handler(args, settings)
    except (OSError, ValueError) as e:
        print(f"❌ {e}")
        return EXIT_USAGE
    except EngineError as e:
        print(f"❌ {e.kind}: {e}")
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
