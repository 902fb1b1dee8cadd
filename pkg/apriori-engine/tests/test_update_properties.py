"""
Update Properties

Random targets and updates satisfying every precondition of apply_update,
checked against the guarantees an a~priori update gives.
"""

from hypothesis import HealthCheck, assume, given, settings
from hypothesis import strategies as st

import apriori
import formula as fm
import kripke
import run_log
import semantics
from kripke import PointedModel

from strategies import formulas, update_instances

PROPERTY_SETTINGS = settings(max_examples=500, deadline=None,
                             suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])


def quiet():
    return run_log.Logger(echo=False)


def fresh_cluster(case):
    return [f"a$trial${w}" for w in case.update.cluster_in_order()]


# ==============================================================================
# --- Consistency restored ---
# ==============================================================================

@PROPERTY_SETTINGS
@given(update_instances(), st.data())
def test_update_result_guarantees(case, data):
    target, u = case
    model = target.model
    result = apriori.apply_update(target, u, logger=quiet())

    assert kripke.classify(result.model).introspective

    fact = data.draw(formulas(atoms=model.atoms, max_depth=0, size=4))
    assert semantics.evaluate(result, fact) == semantics.evaluate(target, fact)

    phi = data.draw(formulas(agents=model.agents, atoms=model.atoms, max_depth=2))
    for b in model.agents:
        if b == "a":
            continue
        belief = fm.Believes(b, phi)
        assert semantics.evaluate(result, belief) == semantics.evaluate(target, belief)

    inconsistent = fm.Believes("a", fm.FALSE)
    assert semantics.evaluate(target, inconsistent)
    assert not semantics.evaluate(result, inconsistent)


# ==============================================================================
# --- What the new beliefs depend on ---
# ==============================================================================

@PROPERTY_SETTINGS
@given(update_instances(), st.data())
def test_own_beliefs_come_from_the_cluster(case, data):
    target, u = case
    result = apriori.apply_update(target, u, logger=quiet())
    psi = data.draw(formulas(agents=("a",), atoms=target.model.atoms, max_depth=2))

    after = semantics.evaluate(result, fm.Believes("a", psi))
    everywhere = all(semantics.evaluate(PointedModel(u.trial, w), psi) for w in u.cluster)
    somewhere = any(semantics.evaluate(PointedModel(u.trial, w), fm.Believes("a", psi)) for w in u.cluster)
    assert after == everywhere == somewhere


@PROPERTY_SETTINGS
@given(update_instances(), st.data())
def test_backup_worlds_keep_their_truths(case, data):
    target, u = case
    result = apriori.apply_update(target, u, logger=quiet())
    world = data.draw(st.sampled_from(u.backup.worlds))
    phi = data.draw(formulas(agents=target.model.agents, atoms=target.model.atoms, max_depth=2))

    standalone = semantics.evaluate(PointedModel(u.backup, world), phi)
    grafted = semantics.evaluate(PointedModel(result.model, f"a$backup${world}"), phi)
    assert standalone == grafted


# ==============================================================================
# --- Private re-announcements ---
# ==============================================================================

@PROPERTY_SETTINGS
@given(update_instances(), st.data())
def test_triggered_update_recovers_consistency(case, data):
    target, u = case
    model = target.model
    phi = data.draw(formulas(agents=model.agents, atoms=model.atoms, max_depth=2))
    if not semantics.evaluate(target, phi):
        phi = fm.Not(phi)

    restricted = semantics.public_announce(target, phi)
    result = apriori.apply_update(restricted, u, logger=quiet())
    satisfied = semantics.extension(result.model, phi)
    if not satisfied & set(fresh_cluster(case)):
        return
    recovered = semantics.private_announce(result, ["a"], phi, logger=quiet())
    assert recovered.model.successors("a", recovered.point)


@PROPERTY_SETTINGS
@given(update_instances(point_sees_others=True, cluster_blind_to="b"), st.data())
def test_news_for_b_leaves_a_unmoved(case, data):
    target, u = case
    model = target.model
    phi = data.draw(formulas(agents=model.agents, atoms=model.atoms, max_depth=2))
    if not semantics.evaluate(target, fm.Believes("b", phi)):
        phi = fm.Not(phi)
    assume(semantics.evaluate(target, fm.Believes("b", phi)))
    statement = fm.Believes("b", phi)

    restricted = semantics.public_announce(target, statement)
    result = apriori.apply_update(restricted, u, logger=quiet())
    assert semantics.evaluate(result, fm.Believes("a", fm.Believes("b", fm.FALSE)))

    told = semantics.private_announce(result, ["a"], statement, logger=quiet())
    for _ in range(5):
        psi = data.draw(formulas(agents=("a", "b"), atoms=model.atoms, max_depth=2))
        belief = fm.Believes("a", psi)
        assert semantics.evaluate(told, belief) == semantics.evaluate(result, belief)
