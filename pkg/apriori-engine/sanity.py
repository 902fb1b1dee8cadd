import os
import sys

HERE = os.path.dirname(os.path.abspath(__file__))


def run_checks():
    """Smoke test of the installation. Returns True when every step passed."""

    # 1. Check Imports
    print("1. Checking libraries...")
    try:
        import dotenv
        import lark
        import pandas
        print("   ✅ Libraries found.")
    except ImportError as e:
        print(f"   ❌ MISSING LIBRARY: {e}")
        print("   Run: pip install -r requirements.txt")
        return False

    # 2. Check Engine Modules
    print("2. Checking engine modules...")
    try:
        import formula
        import model_io
        import scenario
        import semantics
        from kripke import PointedModel
        print("   ✅ Engine modules imported successfully.")
    except ImportError as e:
        print(f"   ❌ FAILED to import engine: {e}")
        return False

    # 3. Evaluate A Formula
    print("3. Evaluating a formula on the bundled muddy children model...")
    model, _ = model_io.load_model(os.path.join(HERE, "models", "m0.km"))
    f = formula.parse_formula("ma & mb & mc", model.agents, model.atoms)
    if not semantics.evaluate(PointedModel(model, "ABC"), f):
        print("   ❌ 'ma & mb & mc' should hold at ABC")
        return False
    print("   ✅ Formula evaluated.")

    # 4. Run Corpus
    print("4. Running scenario corpus...")
    try:
        reports = scenario.run_corpus(scenario.load_corpus(os.path.join(HERE, "scenarios")))
    except Exception as e:
        print(f"\n❌ CRASHED: {e}")
        import traceback
        traceback.print_exc()
        return False

    failed = [r.name for r in reports if not r.passed]
    if failed:
        print(f"\n❌ FAILED: {', '.join(failed)}")
        return False
    print(f"\n✅ SUCCESS: {len(reports)} scenarios passed.")
    return True


if __name__ == "__main__":
    sys.exit(0 if run_checks() else 1)
