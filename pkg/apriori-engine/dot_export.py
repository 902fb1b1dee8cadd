"""
DOT Export

Graphviz text for a Kripke model. Worlds are nodes labeled with their true
atoms; the designated point gets a doubled border. Pairs related both ways by
the same agents are drawn as one bidirectional edge.
"""

from errors import ModelError
from kripke import KripkeModel


def _quote(text):
    return '"{}"'.format(text.replace('"', '\\"'))


def _agents_on(model, w, v):
    return tuple(agent for agent in sorted(model.agents) if v in model.successors(agent, w))


def edge_list(model: KripkeModel):
    """
    Edges as (source, target, agents, bidirectional), deterministic order.
    """
    worlds = sorted(model.worlds)
    edges = []
    for i, w in enumerate(worlds):
        loop = _agents_on(model, w, w)
        if loop:
            edges.append((w, w, loop, False))
        for v in worlds[i + 1:]:
            forth = _agents_on(model, w, v)
            back = _agents_on(model, v, w)
            if forth and forth == back:
                edges.append((w, v, forth, True))
                continue
            if forth:
                edges.append((w, v, forth, False))
            if back:
                edges.append((v, w, back, False))
    return edges


def to_dot(model: KripkeModel, point=None):
    """Yields the DOT text line by line."""
    yield "digraph {}".format(_quote(model.name)) + " {\n"
    yield "  node [shape=ellipse];\n"
    for w in sorted(model.worlds):
        atoms = ",".join(p for p in model.atoms if w in model.valuation[p])
        extra = " peripheries=2" if w == point else ""
        yield "  {} [label={}{}];\n".format(_quote(w), _quote(f"{w}\\n{{{atoms}}}"), extra)
    for source, target, agents, both in edge_list(model):
        extra = " dir=both" if both else ""
        yield "  {} -> {} [label={}{}];\n".format(_quote(source), _quote(target), _quote(",".join(agents)), extra)
    yield "}\n"


def write_dot(model: KripkeModel, path, point=None):
    if point is not None and point not in model.world_set:
        raise ModelError(f"World '{point}' is not in model '{model.name}'")
    with open(path, "w", encoding="utf-8") as f:
        f.writelines(to_dot(model, point))
    return path
