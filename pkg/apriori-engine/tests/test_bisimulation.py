from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

import formula as fm
import kripke
import semantics
from kripke import KripkeModel, PointedModel

from strategies import duplicate_world, formulas, pointed_models


def test_model_is_bisimilar_to_itself(m0):
    pm = PointedModel(m0, "AB")
    result = kripke.bisimilar(pm, pm)
    assert result
    assert kripke.identity(m0.worlds) <= result.relation


def test_clique_collapses_to_one_reflexive_world():
    clique = KripkeModel("two", ("a", "b"), ("p",), ("u", "v"),
                         relations={"a": {(x, y) for x in "uv" for y in "uv"}, "b": {("u", "u")}},
                         valuation={"p": {"u", "v"}})
    loop = KripkeModel("one", ("a", "b"), ("p",), ("w",), relations={"a": {("w", "w")}}, valuation={"p": {"w"}})
    assert kripke.bisimilar(PointedModel(clique, "u"), PointedModel(loop, "w"), restrict_to={"a"})
    assert not kripke.bisimilar(PointedModel(clique, "u"), PointedModel(loop, "w"))


def test_distinguishing_formula_for_m0_worlds(m0):
    pm1, pm2 = PointedModel(m0, "A"), PointedModel(m0, "0")
    f = kripke.distinguishing_formula(pm1, pm2)
    assert semantics.evaluate(pm1, f)
    assert not semantics.evaluate(pm2, f)
    assert kripke.distinguishing_formula(pm1, pm1) is None


def _pair(data):
    pm1 = data.draw(pointed_models(max_worlds=4, prefix="u"))
    if data.draw(st.booleans()):
        twin = duplicate_world(pm1, data.draw(st.sampled_from(pm1.model.worlds)), "dup")
        return pm1, twin
    return pm1, data.draw(pointed_models(max_worlds=4, prefix="v"))


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.data())
def test_bisimilar_points_agree_and_others_are_separated(data):
    pm1, pm2 = _pair(data)
    if kripke.bisimilar(pm1, pm2):
        for _ in range(50):
            f = data.draw(formulas(max_depth=3, size=4))
            assert semantics.evaluate(pm1, f) == semantics.evaluate(pm2, f)
    else:
        f = kripke.distinguishing_formula(pm1, pm2)
        assert f is not None
        assert fm.modal_depth(f) <= len(pm1.model.worlds) * len(pm2.model.worlds)
        assert semantics.evaluate(pm1, f)
        assert not semantics.evaluate(pm2, f)


@settings(max_examples=100, deadline=None)
@given(st.data())
def test_duplicated_world_is_bisimilar(data):
    pm = data.draw(pointed_models(max_worlds=4))
    world = data.draw(st.sampled_from(pm.model.worlds))
    twin = duplicate_world(pm, world, "dup")
    assert kripke.bisimilar(pm, twin)
    if world == pm.point:
        assert kripke.bisimilar(pm, PointedModel(twin.model, "dup"))


def test_small_formula_search_separates_two_world_models():
    # every depth-1 belief over p
    m1 = KripkeModel("m1", ("a",), ("p",), ("u", "v"), relations={"a": {("u", "v")}}, valuation={"p": {"v"}})
    m2 = KripkeModel("m2", ("a",), ("p",), ("u", "v"), relations={"a": {("u", "u")}}, valuation={"p": {"v"}})
    pm1, pm2 = PointedModel(m1, "u"), PointedModel(m2, "u")
    assert not kripke.bisimilar(pm1, pm2)
    candidates = [fm.Believes("a", x) for x in (fm.Atom("p"), fm.Not(fm.Atom("p")), fm.FALSE)]
    separating = [f for f in candidates if semantics.evaluate(pm1, f) != semantics.evaluate(pm2, f)]
    assert fm.Believes("a", fm.Atom("p")) in separating
