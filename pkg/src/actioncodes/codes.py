"""Action codes: prefix-free translations between two alphabets.

A code maps abstract labels to non-empty words of concrete labels.  No code
word may be a prefix of another, so a concrete run can be decoded into at
most one abstract action.  The same data can be viewed as a deterministic
tree whose non-root leaves carry the abstract labels; both views are
implemented here together with the conversions between them and Kleisli
composition of codes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .errors import AlphabetMismatch, EmptyCodeWord, InvalidTree, PrefixClash
from .lts import Label, Lts, Word, is_deterministic, render_word, structural_predicates

__all__ = ["CodeMap", "CodeTree", "to_tree", "to_map", "compose"]


def _is_prefix(u: Word, w: Word) -> bool:
    return len(u) <= len(w) and w[: len(u)] == u


@dataclass(frozen=True)
class CodeMap:
    """Map form of an action code: abstract label -> non-empty concrete word.

    ``source`` is the concrete alphabet the words are written in, ``target``
    the abstract alphabet the keys are drawn from; ``target`` may strictly
    contain the domain.  Construction validates non-emptiness and
    prefix-freeness and canonically sorts the entries.
    """

    source: frozenset[Label]
    target: frozenset[Label]
    entries: tuple[tuple[Label, Word], ...]

    def __init__(self, source, target, entries):
        object.__setattr__(self, "source", frozenset(source))
        object.__setattr__(self, "target", frozenset(target))
        normalized = tuple(
            sorted(((b, tuple(w)) for b, w in entries), key=lambda e: str(e[0]))
        )
        object.__setattr__(self, "entries", normalized)
        self._validate()
        object.__setattr__(self, "_map", dict(self.entries))

    def _validate(self):
        seen: set[Label] = set()
        for b, word in self.entries:
            if b not in self.target:
                raise AlphabetMismatch(f"abstract label {b} is not in the target alphabet")
            if b in seen:
                raise ValueError(f"duplicate entry for abstract label {b}")
            seen.add(b)
            if not word:
                raise EmptyCodeWord(b)
            for a in word:
                if a not in self.source:
                    raise AlphabetMismatch(f"letter {a} of the word for {b} is not in the source alphabet")
        # Sorting words lexicographically makes any prefix pair adjacent.
        by_word = sorted(self.entries, key=lambda e: tuple(str(a) for a in e[1]))
        for (b1, w1), (b2, w2) in zip(by_word, by_word[1:]):
            if _is_prefix(w1, w2):
                raise PrefixClash(b1, b2)

    @property
    def mapping(self) -> Mapping[Label, Word]:
        return dict(self._map)

    @property
    def domain(self) -> frozenset[Label]:
        return frozenset(b for b, _ in self.entries)

    @property
    def image(self) -> frozenset[Word]:
        return frozenset(w for _, w in self.entries)

    def word_for(self, b: Label) -> Word:
        return self._map[b]

    def __contains__(self, b: Label) -> bool:
        return b in self._map

    def __len__(self) -> int:
        return len(self.entries)

    def __repr__(self) -> str:
        inner = ", ".join(f"{b}->{render_word(w)}" for b, w in self.entries)
        return f"CodeMap({inner})"


@dataclass(frozen=True)
class CodeTree:
    """Tree form of an action code.

    The carrier is a deterministic, tree-shaped, grounded LTS over the
    concrete alphabet; every non-root leaf carries a distinct abstract label
    and the root carries none.
    """

    tree: Lts
    leaf_labels: tuple[tuple[str, Label], ...]
    abstract: frozenset[Label]

    def __init__(self, tree, leaf_labels, abstract):
        object.__setattr__(self, "tree", tree)
        normalized = tuple(sorted((str(q), lab) for q, lab in dict(leaf_labels).items()))
        normalized = tuple((q, lab) for q, lab in normalized)
        object.__setattr__(self, "leaf_labels", normalized)
        object.__setattr__(self, "abstract", frozenset(abstract))
        self._validate()
        object.__setattr__(self, "_labels", dict(self.leaf_labels))

    def _validate(self):
        report = structural_predicates(self.tree)
        if not is_deterministic(self.tree):
            raise InvalidTree("carrier is not deterministic")
        if not report.tree_shaped:
            raise InvalidTree("carrier is not tree-shaped")
        if not report.grounded:
            raise InvalidTree("carrier is not grounded")
        if set(self.tree.states) != self.tree.reachable():
            raise InvalidTree("carrier has unreachable states")
        root = self.tree.initial
        labeled = {q for q, _ in self.leaf_labels}
        expected = set(report.leaves) - {root}
        if labeled != expected:
            raise InvalidTree(
                "labeled states must be exactly the non-root leaves "
                f"(labeled {sorted(labeled)}, leaves {sorted(expected)})"
            )
        labels = [lab for _, lab in self.leaf_labels]
        if len(set(labels)) != len(labels):
            raise InvalidTree("leaf labeling is not injective")
        for lab in labels:
            if lab not in self.abstract:
                raise InvalidTree(f"leaf label {lab} is not in the abstract alphabet")

    @property
    def root(self) -> str:
        return self.tree.initial

    @property
    def leaves(self) -> frozenset[str]:
        return frozenset(q for q, _ in self.leaf_labels)

    def label_of(self, leaf: str) -> Label:
        return self._labels[leaf]

    def is_leaf(self, node: str) -> bool:
        return not self.tree.out(node)

    def __repr__(self) -> str:
        return f"CodeTree(nodes={len(self.tree.states)}, leaves={len(self.leaf_labels)})"


def _node_names(words: Iterable[Word]) -> dict[Word, str]:
    """Readable, collision-checked names for the prefix set of some words."""
    prefixes: set[Word] = {()}
    for w in words:
        for i in range(1, len(w) + 1):
            prefixes.add(w[:i])
    names: dict[Word, str] = {}
    taken: dict[str, Word] = {}
    for w in sorted(prefixes, key=lambda w: (len(w), tuple(str(a) for a in w))):
        name = render_word(w)
        if name in taken:
            raise ValueError(
                f"node name {name!r} is ambiguous; symbols containing '.' "
                "cannot be used in tree node names"
            )
        taken[name] = w
        names[w] = name
    return names


def to_tree(code: CodeMap) -> CodeTree:
    """The unique grounded tree form of a map-based code.

    Nodes are the prefixes of the code words (the empty prefix is the root),
    edges extend a prefix by one letter, and the node of a complete code
    word becomes a leaf labeled with its abstract label.
    """
    words = [w for _, w in code.entries]
    names = _node_names(words)
    transitions = []
    for w, name in names.items():
        if w:
            transitions.append((names[w[:-1]], w[-1], name))
    ordered = [
        names[w] for w in sorted(names, key=lambda w: (len(w), tuple(str(a) for a in w)))
    ]
    tree = Lts(ordered, names[()], transitions, code.source)
    leaf_labels = [(names[w], b) for b, w in code.entries]
    return CodeTree(tree, leaf_labels, code.target)


def to_map(tree: CodeTree) -> CodeMap:
    """Recover the map form: each labeled leaf contributes its access word."""
    words: dict[str, Word] = {tree.root: ()}
    todo = [tree.root]
    while todo:
        q = todo.pop()
        for a, dst in tree.tree.out(q):
            words[dst] = words[q] + (a,)
            todo.append(dst)
    entries = [(lab, words[leaf]) for leaf, lab in tree.leaf_labels]
    return CodeMap(tree.tree.alphabet, tree.abstract, entries)


def compose(r: CodeMap, s: CodeMap) -> CodeMap:
    """Kleisli composition: translate each word of ``s`` through ``r``.

    ``r`` translates the intermediate alphabet into the concrete one and
    ``s`` the abstract alphabet into the intermediate one.  An entry of the
    result exists only when every letter of the ``s``-word lies in the
    domain of ``r``.  Prefix-freeness of the result is a theorem, but it is
    re-checked defensively by the constructor.
    """
    if not s.source <= r.target:
        raise AlphabetMismatch(
            "intermediate alphabets disagree: the source of the outer code "
            "must lie within the target of the inner code"
        )
    entries = []
    for c, word in s.entries:
        if all(b in r for b in word):
            flat: list[Label] = []
            for b in word:
                flat.extend(r.word_for(b))
            entries.append((c, tuple(flat)))
    return CodeMap(r.source, s.target, entries)
