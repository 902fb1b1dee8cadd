"""
Model and Update Files

.km   one Kripke model, line oriented, `#` starts a comment
.kmu  one a~priori update; trial/backup are `.km` paths (relative to the
      update file), `@generated` models, or inline `model <name>` ... `end`
      blocks inside the update file
"""

import os
import re
import shlex

import apriori
import formula
import puzzles
from errors import ModelError, ModelFileError
from kripke import KripkeModel

WORLD_PATTERN = re.compile(r"^[^\s#\"']+$")
NAME_PATTERN = re.compile(r"^[A-Za-z0-9_]+$")

# ==============================================================================
# --- Tokenizing ---
# ==============================================================================

def tokenize(line, source, lineno):
    """Splits one line into words; quoted strings stay whole, `#` ends the line."""
    try:
        return shlex.split(line, comments=True)
    except ValueError as e:
        raise ModelFileError(f"{source}:{lineno}: {e}") from e


def read_lines(path):
    if not os.path.isfile(path):
        raise FileNotFoundError(f"File not found: {path}")
    with open(path, "r", encoding="utf-8") as f:
        return f.read().splitlines()

# ==============================================================================
# --- .km models ---
# ==============================================================================

class _ModelBuilder:
    """Accumulates .km directives; `build()` produces the KripkeModel."""

    def __init__(self, source):
        self.source = source
        self.name = None
        self.agents = []
        self.atoms = []
        self.worlds = []
        self.valuation = {}
        self.relations = {}
        self.point = None

    def fail(self, lineno, message):
        raise ModelFileError(f"{self.source}:{lineno}: {message}")

    def _agents_for(self, lineno, word):
        if word == "all":
            return list(self.agents)
        if word not in self.agents:
            self.fail(lineno, f"undeclared agent '{word}'")
        return [word]

    def _world(self, lineno, word):
        if word not in self.worlds:
            self.fail(lineno, f"undeclared world '{word}'")
        return word

    def feed(self, words, lineno):
        keyword, args = words[0], words[1:]

        if keyword == "model":
            if len(args) != 1 or not NAME_PATTERN.match(args[0]):
                self.fail(lineno, "expected: model <name>")
            self.name = args[0]
        elif keyword in ("agents", "atoms"):
            if not args:
                self.fail(lineno, f"expected: {keyword} <id>...")
            for word in args:
                if not formula.is_identifier(word):
                    self.fail(lineno, f"invalid identifier '{word}'")
            target = self.agents if keyword == "agents" else self.atoms
            target.extend(args)
            if keyword == "agents":
                for agent in args:
                    self.relations.setdefault(agent, set())
        elif keyword == "world":
            if not args or not WORLD_PATTERN.match(args[0]):
                self.fail(lineno, "expected: world <id> [<atom>...]")
            if args[0] in self.worlds:
                self.fail(lineno, f"world '{args[0]}' declared twice")
            self.worlds.append(args[0])
            for atom in args[1:]:
                if atom not in self.atoms:
                    self.fail(lineno, f"undeclared atom '{atom}'")
                self.valuation.setdefault(atom, set()).add(args[0])
        elif keyword in ("edge", "arrow"):
            if len(args) != 3:
                self.fail(lineno, f"expected: {keyword} <agent> <w1> <w2>")
            w1, w2 = self._world(lineno, args[1]), self._world(lineno, args[2])
            for agent in self._agents_for(lineno, args[0]):
                self.relations[agent].add((w1, w2))
                if keyword == "edge":
                    self.relations[agent].add((w2, w1))
        elif keyword == "reflexive":
            if len(args) != 1:
                self.fail(lineno, "expected: reflexive all | reflexive <agent>")
            for agent in self._agents_for(lineno, args[0]):
                self.relations[agent] |= {(w, w) for w in self.worlds}
        elif keyword == "loops":
            if len(args) < 2:
                self.fail(lineno, "expected: loops <agent|all> <world>...")
            listed = [self._world(lineno, w) for w in args[1:]]
            for agent in self._agents_for(lineno, args[0]):
                self.relations[agent] |= {(w, w) for w in listed}
        elif keyword == "point":
            if len(args) != 1:
                self.fail(lineno, "expected: point <world>")
            self.point = self._world(lineno, args[0])
        else:
            self.fail(lineno, f"unknown directive '{keyword}'")

    def build(self):
        if self.name is None:
            raise ModelFileError(f"{self.source}: missing 'model <name>' line")
        try:
            return KripkeModel(
                name=self.name,
                agents=tuple(self.agents),
                atoms=tuple(self.atoms),
                worlds=tuple(self.worlds),
                relations=self.relations,
                valuation=self.valuation,
            )
        except ModelError as e:
            raise ModelFileError(f"{self.source}: {e.message}") from e


def parse_model_lines(lines, source="<model>", first_lineno=1):
    """
    Parses .km text.

    Returns: (KripkeModel, declared point or None)
    """
    builder = _ModelBuilder(source)
    for offset, line in enumerate(lines):
        lineno = first_lineno + offset
        words = tokenize(line, source, lineno)
        if words:
            builder.feed(words, lineno)
    return builder.build(), builder.point


def resolve_model(reference, base_dir, settings=None, inline=None):
    """
    Loads a model referenced from a file.

    Returns: (KripkeModel, default point or None, truncated flag)
    """
    trunc_n = (settings or {}).get("trunc_n", 12)
    if reference.startswith("@"):
        model, point = puzzles.generate(reference, trunc_n)
        return model, point, puzzles.is_truncated(reference)
    if inline and reference in inline:
        model, point = inline[reference]
        return model, point, False
    path = reference if os.path.isabs(reference) else os.path.join(base_dir, reference)
    model, point = load_model(path)
    return model, point, False


def load_model(path):
    """Reads a .km file. Returns: (KripkeModel, declared point or None)"""
    return parse_model_lines(read_lines(path), source=path)


def format_model(model: KripkeModel, point=None):
    """Model as .km lines; every pair is written as a directed arrow."""
    lines = [f"model {model.name}", "agents " + " ".join(model.agents), "atoms " + " ".join(model.atoms)]
    for w in model.worlds:
        lines.append(" ".join(["world", w] + [p for p in model.atoms if w in model.valuation[p]]))
    order = {w: i for i, w in enumerate(model.worlds)}
    for agent in model.agents:
        for w, v in sorted(model.relation(agent), key=lambda pair: (order[pair[0]], order[pair[1]])):
            lines.append(f"arrow {agent} {w} {v}")
    if point is not None:
        lines.append(f"point {point}")
    return lines

# ==============================================================================
# --- .kmu updates ---
# ==============================================================================

def _split_inline_blocks(lines, source):
    """Separates inline `model <name>` ... `end` blocks from update directives."""
    directives = []
    blocks = {}
    current = None
    for lineno, line in enumerate(lines, start=1):
        words = tokenize(line, source, lineno)
        if current is not None:
            if words == ["end"]:
                name, start, body = current
                blocks[name] = parse_model_lines(body, source=source, first_lineno=start)
                current = None
            else:
                current[2].append(line)
            continue
        if not words:
            continue
        if words[0] == "model":
            if len(words) != 2:
                raise ModelFileError(f"{source}:{lineno}: expected: model <name>")
            current = (words[1], lineno, [line])
            continue
        directives.append((lineno, words))
    if current is not None:
        raise ModelFileError(f"{source}: inline model '{current[0]}' has no 'end'")
    return directives, blocks


def parse_update_lines(lines, source="<update>", base_dir=".", settings=None):
    settings = settings or {}
    directives, blocks = _split_inline_blocks(lines, source)

    name = agent = trial_ref = backup_ref = None
    cluster = []
    mapping = {}
    auto_map = False
    no_map = False
    relaxed = bool(settings.get("relaxed_frames", False))
    drop_transitivity = drop_euclideanity = False

    for lineno, words in directives:
        keyword, args = words[0], words[1:]
        if keyword == "update":
            if len(args) != 3 or args[1] != "for":
                raise ModelFileError(f"{source}:{lineno}: expected: update <name> for <agent>")
            name, agent = args[0], args[2]
        elif keyword in ("trial", "backup"):
            if len(args) != 1:
                raise ModelFileError(f"{source}:{lineno}: expected: {keyword} <model>")
            if keyword == "trial":
                trial_ref = args[0]
            else:
                backup_ref = args[0]
        elif keyword == "cluster":
            if not args:
                raise ModelFileError(f"{source}:{lineno}: expected: cluster <world>...")
            cluster.extend(args)
        elif keyword == "map":
            if args == ["auto"]:
                auto_map = True
            elif args == ["none"]:
                no_map = True
            elif len(args) == 2:
                if args[0] in mapping:
                    raise ModelFileError(f"{source}:{lineno}: '{args[0]}' mapped twice")
                mapping[args[0]] = args[1]
            else:
                raise ModelFileError(f"{source}:{lineno}: expected: map <trial-world> <backup-world> | map auto")
        elif keyword == "relaxed":
            relaxed = True
            for flag in args:
                if flag == "drop-transitivity":
                    drop_transitivity = True
                elif flag == "drop-euclideanity":
                    drop_euclideanity = True
                else:
                    raise ModelFileError(f"{source}:{lineno}: unknown relaxation '{flag}'")
        else:
            raise ModelFileError(f"{source}:{lineno}: unknown directive '{keyword}'")

    if name is None or trial_ref is None or backup_ref is None or not cluster:
        raise ModelFileError(f"{source}: an update needs 'update', 'trial', 'cluster' and 'backup' lines")

    trial, _, _ = resolve_model(trial_ref, base_dir, settings, blocks)
    backup, _, _ = resolve_model(backup_ref, base_dir, settings, blocks)
    if no_map:
        if mapping or auto_map:
            raise ModelFileError(f"{source}: 'map none' cannot be combined with other map lines")
    elif auto_map or not mapping:
        if mapping:
            raise ModelFileError(f"{source}: 'map auto' cannot be combined with explicit map lines")
        mapping = apriori.derive_correspondence(trial, backup, agent)

    return apriori.AprioriUpdate(
        agent=agent,
        trial=trial,
        cluster=frozenset(cluster),
        backup=backup,
        correspondence=mapping,
        name=name,
        relaxed=relaxed,
        drop_transitivity=drop_transitivity,
        drop_euclideanity=drop_euclideanity,
    )


def load_update(path, settings=None):
    """Reads a .kmu file into an AprioriUpdate (models resolved, map derived if needed)."""
    return parse_update_lines(read_lines(path), source=path,
                              base_dir=os.path.dirname(path) or ".", settings=settings)


def format_update(u):
    """A self-contained .kmu text: trial and backup written as inline blocks."""
    trial_name, backup_name = f"{u.name}_trial", f"{u.name}_backup"
    lines = [f"update {u.name} for {u.agent}", f"trial {trial_name}",
             "cluster " + " ".join(u.cluster_in_order()), f"backup {backup_name}"]
    for w in u.trial.worlds:
        if w in u.correspondence:
            lines.append(f"map {w} {u.correspondence[w]}")
    if not u.correspondence:
        lines.append("map none")
    if u.relaxed:
        flags = [flag for flag, on in (("drop-transitivity", u.drop_transitivity),
                                       ("drop-euclideanity", u.drop_euclideanity)) if on]
        lines.append(" ".join(["relaxed"] + flags))
    lines.append("")
    for block_name, model in ((trial_name, u.trial), (backup_name, u.backup)):
        block = format_model(model)
        block[0] = f"model {block_name}"
        lines.extend(block + ["end", ""])
    return "\n".join(lines)


def write_update(u, path):
    with open(path, "w", encoding="utf-8") as f:
        f.write(format_update(u))
    return path
