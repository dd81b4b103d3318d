"""Core model: labels, finite labeled transition systems, structural checks.

A labeled transition system (LTS) is a rooted directed graph whose edges
carry action labels; a Mealy machine is the special case where every label
is an input/output pair.  Everything here is immutable after construction
and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple

from .errors import AlphabetMismatch

__all__ = [
    "Label",
    "Word",
    "Lts",
    "CompatRel",
    "StructuralReport",
    "reachable_states",
    "is_deterministic",
    "traces_up_to",
    "has_trace",
    "structural_predicates",
    "render_word",
]


@dataclass(frozen=True)
class Label:
    """An action label: an atomic symbol, or a Mealy input/output pair.

    Mealy labels render as ``input/output``, so ``/`` is reserved and may not
    occur inside a symbol; whitespace is forbidden because the CLI formats
    are line- and space-delimited.
    """

    symbol: str
    output: str | None = None

    def __post_init__(self):
        parts = (self.symbol,) if self.output is None else (self.symbol, self.output)
        for part in parts:
            if not part or "/" in part or any(ch.isspace() for ch in part):
                raise ValueError(
                    f"bad symbol {part!r}: symbols are non-empty and contain "
                    "no whitespace and no '/'"
                )

    @property
    def is_mealy(self) -> bool:
        return self.output is not None

    @property
    def input(self) -> str:
        """First component; for a Mealy label this is the input symbol."""
        return self.symbol

    @classmethod
    def parse(cls, text: str) -> "Label":
        """Parse ``a`` as an atomic label and ``i/o`` as a Mealy label."""
        if "/" in text:
            left, _, right = text.partition("/")
            return cls(left, right)
        return cls(text)

    def __str__(self) -> str:
        return self.symbol if self.output is None else f"{self.symbol}/{self.output}"

    def __repr__(self) -> str:
        return f"Label({str(self)!r})"


#: A word is a finite (possibly empty) sequence of labels.
Word = tuple[Label, ...]

Transition = tuple[str, Label, str]


def render_word(word: Word) -> str:
    """Join a word's labels with ``.`` (empty word renders as ``ε``)."""
    return ".".join(str(a) for a in word) if word else "ε"


def _same_variant(labels: Iterable[Label]) -> bool:
    kinds = {a.is_mealy for a in labels}
    return len(kinds) <= 1


@dataclass(frozen=True)
class Lts:
    """A finite labeled transition system with an explicit alphabet.

    The alphabet may strictly contain the labels used on transitions:
    concretization and the completeness check quantify over labels that no
    transition carries.  Duplicate transitions are collapsed (the transition
    relation is a set).
    """

    states: tuple[str, ...]
    initial: str
    transitions: frozenset[Transition]
    alphabet: frozenset[Label]

    def __init__(self, states, initial, transitions, alphabet):
        ordered: list[str] = []
        seen = set()
        for q in states:
            if q not in seen:
                seen.add(q)
                ordered.append(q)
        object.__setattr__(self, "states", tuple(ordered))
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "transitions", frozenset(transitions))
        object.__setattr__(self, "alphabet", frozenset(alphabet))
        self._validate()
        out: dict[str, list[tuple[Label, str]]] = {q: [] for q in self.states}
        for src, label, dst in self.transitions:
            out[src].append((label, dst))
        for q in out:
            out[q].sort(key=lambda e: (str(e[0]), e[1]))
        object.__setattr__(self, "_out", out)
        object.__setattr__(self, "_reach", None)

    def _validate(self):
        if not self.states:
            raise ValueError("an LTS needs at least one state")
        if self.initial not in self.states:
            raise ValueError(f"initial state {self.initial!r} is not a state")
        if not _same_variant(self.alphabet):
            raise ValueError("alphabet mixes atomic and Mealy labels")
        state_set = set(self.states)
        for src, label, dst in self.transitions:
            if src not in state_set or dst not in state_set:
                raise ValueError(f"transition {src}-{label}->{dst} leaves the state set")
            if label not in self.alphabet:
                raise ValueError(f"transition label {label} is not in the alphabet")

    # -- queries ----------------------------------------------------------

    def out(self, state: str) -> tuple[tuple[Label, str], ...]:
        """Outgoing (label, target) edges of a state, in a fixed order."""
        return tuple(self._out[state])

    def succ(self, state: str, label: Label) -> tuple[str, ...]:
        return tuple(dst for a, dst in self._out[state] if a == label)

    def enables(self, state: str, label: Label) -> bool:
        return any(a == label for a, _ in self._out[state])

    def out_labels(self, state: str) -> tuple[Label, ...]:
        seen: list[Label] = []
        for a, _ in self._out[state]:
            if a not in seen:
                seen.append(a)
        return tuple(seen)

    def word_targets(self, state: str, word: Word) -> frozenset[str]:
        """All states reachable from ``state`` by a run spelling ``word``."""
        current = {state}
        for label in word:
            current = {dst for q in current for dst in self.succ(q, label)}
            if not current:
                break
        return frozenset(current)

    @property
    def is_mealy(self) -> bool:
        return any(a.is_mealy for a in self.alphabet)

    @property
    def inputs(self) -> frozenset[str]:
        return frozenset(a.symbol for a in self.alphabet if a.is_mealy)

    @property
    def outputs(self) -> frozenset[str]:
        return frozenset(a.output for a in self.alphabet if a.is_mealy)

    def reachable(self) -> frozenset[str]:
        cached = self._reach
        if cached is None:
            todo = [self.initial]
            seen = {self.initial}
            while todo:
                q = todo.pop()
                for _, dst in self._out[q]:
                    if dst not in seen:
                        seen.add(dst)
                        todo.append(dst)
            cached = frozenset(seen)
            object.__setattr__(self, "_reach", cached)
        return cached

    def __repr__(self) -> str:
        return (
            f"Lts(states={len(self.states)}, transitions={len(self.transitions)}, "
            f"alphabet={len(self.alphabet)}, initial={self.initial!r})"
        )


@dataclass(frozen=True)
class CompatRel:
    """A reflexive compatibility relation over an alphabet.

    ``identity`` relates every label to itself only; ``same-input`` relates
    Mealy labels with equal input symbol; ``explicit`` wraps a caller-supplied
    set of pairs (closed reflexively).  The relation parameterizes both
    determinism checks and the concretization operator.
    """

    kind: str
    carrier: frozenset[Label]
    pairs: frozenset[tuple[Label, Label]] = frozenset()

    IDENTITY = "identity"
    SAME_INPUT = "same-input"
    EXPLICIT = "explicit"

    @classmethod
    def identity(cls, alphabet: Iterable[Label]) -> "CompatRel":
        return cls(cls.IDENTITY, frozenset(alphabet))

    @classmethod
    def same_input(cls, alphabet: Iterable[Label]) -> "CompatRel":
        carrier = frozenset(alphabet)
        if not all(a.is_mealy for a in carrier):
            raise ValueError("same-input relation needs Mealy labels")
        return cls(cls.SAME_INPUT, carrier)

    @classmethod
    def explicit(
        cls, alphabet: Iterable[Label], pairs: Iterable[tuple[Label, Label]]
    ) -> "CompatRel":
        carrier = frozenset(alphabet)
        closed = set(pairs) | {(a, a) for a in carrier}
        for a, b in closed:
            if a not in carrier or b not in carrier:
                raise ValueError(f"pair ({a}, {b}) leaves the carrier alphabet")
        return cls(cls.EXPLICIT, carrier, frozenset(closed))

    @classmethod
    def by_name(cls, name: str, alphabet: Iterable[Label]) -> "CompatRel":
        if name == cls.IDENTITY:
            return cls.identity(alphabet)
        if name == cls.SAME_INPUT:
            return cls.same_input(alphabet)
        raise ValueError(f"unknown relation name {name!r}")

    def holds(self, a: Label, b: Label) -> bool:
        if self.kind == self.IDENTITY:
            return a == b
        if self.kind == self.SAME_INPUT:
            return a.symbol == b.symbol
        return (a, b) in self.pairs

    def related(self, a: Label) -> tuple[Label, ...]:
        """All labels b with (a, b) in the relation, sorted for determinism."""
        if self.kind == self.IDENTITY:
            return (a,)
        if self.kind == self.SAME_INPUT:
            return tuple(sorted((b for b in self.carrier if b.symbol == a.symbol), key=str))
        return tuple(sorted((b for x, b in self.pairs if x == a), key=str))


class StructuralReport(NamedTuple):
    tree_shaped: bool
    grounded: bool
    leaves: frozenset[str]


def reachable_states(m: Lts) -> frozenset[str]:
    """States reachable from the initial state (always includes it)."""
    return m.reachable()


def is_deterministic(m: Lts, rel: CompatRel | None = None) -> bool:
    """Whether two compatible transitions from a state always coincide.

    With the identity relation this is plain determinism; with the same-input
    relation on a Mealy machine it is output determinism (one output and one
    successor per state and input).
    """
    if rel is None:
        rel = CompatRel.identity(m.alphabet)
    if rel.carrier != m.alphabet:
        raise AlphabetMismatch("relation carrier must be the machine's alphabet")
    by_state: dict[str, list[tuple[Label, str]]] = {}
    for src, label, dst in m.transitions:
        by_state.setdefault(src, []).append((label, dst))
    for edges in by_state.values():
        for a, p in edges:
            for b, q in edges:
                if rel.holds(a, b) and not (a == b and p == q):
                    return False
    return True


def traces_up_to(m: Lts, k: int) -> set[Word]:
    """All traces of length at most ``k``; always contains the empty word."""
    if k < 0:
        raise ValueError("k must be non-negative")
    result: set[Word] = {()}
    frontier: dict[Word, frozenset[str]] = {(): frozenset({m.initial})}
    for _ in range(k):
        extended: dict[Word, frozenset[str]] = {}
        for word, states in frontier.items():
            by_label: dict[Label, set[str]] = {}
            for q in states:
                for a, dst in m.out(q):
                    by_label.setdefault(a, set()).add(dst)
            for a, targets in by_label.items():
                extended[word + (a,)] = frozenset(targets)
        if not extended:
            break
        result.update(extended)
        frontier = extended
    return result


def has_trace(m: Lts, word: Word) -> bool:
    """Whether some run from the initial state spells ``word``."""
    return bool(m.word_targets(m.initial, word))


def structural_predicates(m: Lts) -> StructuralReport:
    """Tree shape, groundedness, and the leaf set of the reachable part.

    The reachable part is a tree when every reachable state is reached by
    exactly one transition sequence; it is grounded when every reachable
    state has a path to some leaf (a state without outgoing transitions).
    """
    reach = m.reachable()
    in_degree = {q: 0 for q in reach}
    for src, _, dst in m.transitions:
        if src in reach and dst in reach:
            in_degree[dst] += 1
    tree_shaped = in_degree[m.initial] == 0 and all(
        d == 1 for q, d in in_degree.items() if q != m.initial
    )
    leaves = frozenset(q for q in reach if not m.out(q))
    # Backward closure from the leaves decides groundedness.
    preds: dict[str, set[str]] = {q: set() for q in reach}
    for src, _, dst in m.transitions:
        if src in reach and dst in reach:
            preds[dst].add(src)
    can_ground = set(leaves)
    todo = list(leaves)
    while todo:
        q = todo.pop()
        for p in preds[q]:
            if p not in can_ground:
                can_ground.add(p)
                todo.append(p)
    grounded = can_ground == set(reach)
    return StructuralReport(tree_shaped, grounded, leaves)
