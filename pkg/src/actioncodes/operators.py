"""The three operators a code induces on systems, and the completeness check.

Contraction collapses every complete code-word run of a concrete system into
one abstract transition.  Refinement expands each abstract transition into
its code-word path, sharing prefixes so determinism survives.  Concretization
does the same but routes every run that leaves the code into an absorbing
chaos state, which makes it the over-approximating counterpart of refinement.
"""

from __future__ import annotations

from collections import deque
from typing import NamedTuple

from .codes import CodeMap, to_tree
from .errors import AlphabetMismatch
from .lts import CompatRel, Label, Lts, Word
from .simulation import find_simulation

__all__ = [
    "CHAOS",
    "MODE_RHO",
    "MODE_GAMMA",
    "composite_name",
    "contract",
    "refine",
    "concretize",
    "IncompletenessWitness",
    "is_icomplete",
    "vertical_check",
]

CHAOS = "χ"

MODE_RHO = "rho"
MODE_GAMMA = "gamma"


def composite_name(state: str, word: Word) -> str:
    """Canonical id for a (state, pending word) pair in an operator output."""
    inner = ".".join(str(a) for a in word)
    return f"{state}⟨{inner}⟩"


class _Namer:
    """Checks that composite state names stay injective within one output."""

    def __init__(self):
        self.taken: dict[str, object] = {}

    def name(self, key: object, text: str) -> str:
        owner = self.taken.setdefault(text, key)
        if owner != key:
            raise ValueError(
                f"composite state name {text!r} is ambiguous; symbols "
                "containing '.' are not supported in operator outputs"
            )
        return text


def contract(code: CodeMap, m: Lts) -> Lts:
    """Contract a concrete system into the abstract alphabet of the code.

    States are the concrete states reachable through complete code-word runs
    from the initial state; each run spelling the word of an abstract label
    b yields one b-transition.  Runs to distinct endpoints yield distinct
    b-successors, so a nondeterministic source may produce a
    nondeterministic contraction.
    """
    if not m.alphabet <= code.source:
        raise AlphabetMismatch("machine alphabet must lie within the code's source alphabet")
    states = [m.initial]
    seen = {m.initial}
    transitions: list[tuple[str, Label, str]] = []
    idx = 0
    while idx < len(states):
        q = states[idx]
        idx += 1
        for b, word in code.entries:
            for q2 in sorted(m.word_targets(q, word)):
                transitions.append((q, b, q2))
                if q2 not in seen:
                    seen.add(q2)
                    states.append(q2)
    return Lts(states, m.initial, transitions, code.target)


def refine(code: CodeMap, n: Lts) -> Lts:
    """Expand each abstract transition of ``n`` into its code-word path.

    A state pairs an abstract state q with a pending concrete word w that
    lies strictly below some code word of a label enabled at q; paths for
    different labels share their common prefixes.  Abstract transitions
    whose label is outside the code's domain contribute nothing.  Only the
    reachable part is built.
    """
    if not n.alphabet <= code.target:
        raise AlphabetMismatch("machine alphabet must lie within the code's target alphabet")
    namer = _Namer()
    initial_key = (n.initial, ())
    names: dict[tuple[str, Word], str] = {
        initial_key: namer.name(initial_key, composite_name(n.initial, ()))
    }
    order = [names[initial_key]]
    todo = deque([initial_key])
    transitions: list[tuple[str, Label, str]] = []
    while todo:
        q, w = todo.popleft()
        src = names[(q, w)]
        targets: list[tuple[Label, tuple[str, Word]]] = []
        for b, word in code.entries:
            if not n.enables(q, b):
                continue
            if len(w) < len(word) and word[: len(w)] == w:
                a = word[len(w)]
                if len(w) + 1 == len(word):
                    # The letter completes the word: jump in the abstract system.
                    for q2 in n.succ(q, b):
                        targets.append((a, (q2, ())))
                else:
                    targets.append((a, (q, w + (a,))))
        for a, key in targets:
            if key not in names:
                names[key] = namer.name(key, composite_name(key[0], key[1]))
                order.append(names[key])
                todo.append(key)
            transitions.append((src, a, names[key]))
    return Lts(order, names[initial_key], transitions, code.source)


def concretize(code: CodeMap, rel: CompatRel, m: Lts) -> Lts:
    """Like refinement, but complete every run outside the code demonically.

    States pair an abstract state with a pending proper prefix of a code
    word.  A letter that can neither extend the prefix nor finish a code
    word, not even up to the compatibility relation, jumps to the chaos
    state, which enables every concrete label forever.  A single chaos state
    is emitted, and only if it is reachable.
    """
    if not m.alphabet <= code.target:
        raise AlphabetMismatch("machine alphabet must lie within the code's target alphabet")
    if rel.carrier != code.source:
        raise AlphabetMismatch("relation carrier must be the code's source alphabet")
    source = sorted(code.source, key=str)
    prefixes: set[Word] = {()}
    complete: dict[Word, Label] = {}
    for b, word in code.entries:
        complete[word] = b
        for i in range(1, len(word)):
            prefixes.add(word[:i])

    namer = _Namer()
    initial_key: object = (m.initial, ())
    names: dict[object, str] = {
        initial_key: namer.name(initial_key, composite_name(m.initial, ()))
    }
    order = [names[initial_key]]
    todo = deque([initial_key])
    transitions: list[tuple[str, Label, str]] = []

    def visit(key: object, text: str) -> str:
        if key not in names:
            names[key] = namer.name(key, text)
            order.append(names[key])
            todo.append(key)
        return names[key]

    while todo:
        key = todo.popleft()
        if key == CHAOS:
            for a in source:
                transitions.append((names[CHAOS], a, names[CHAOS]))
            continue
        q, w = key
        src = names[key]
        for a in source:
            wa = w + (a,)
            if wa in prefixes:
                transitions.append((src, a, visit((q, wa), composite_name(q, wa))))
            elif wa in complete:
                for q2 in sorted(m.succ(q, complete[wa])):
                    transitions.append((src, a, visit((q2, ()), composite_name(q2, ()))))
            if all(
                w + (a2,) not in prefixes and w + (a2,) not in complete
                for a2 in rel.related(a)
            ):
                transitions.append((src, a, visit(CHAOS, CHAOS)))
    return Lts(order, names[initial_key], transitions, code.source)


class IncompletenessWitness(NamedTuple):
    """Where completeness fails: at machine state ``state`` aligned with code
    node ``node``, the code enables ``enabled`` but not the related label
    ``missing`` that the machine can perform."""

    state: str
    node: str
    enabled: Label
    missing: Label


def is_icomplete(
    code: CodeMap, rel: CompatRel, m: Lts
) -> tuple[bool, IncompletenessWitness | None]:
    """Whether the code covers, up to the relation, everything ``m`` can do.

    The decision explores pairs of a machine state and a code-tree node in
    lockstep: both start at their roots, advance together on letters the
    tree knows, and the node resets to the root whenever a code word
    completes.  At every reachable pair, any machine transition related to
    some edge of the node must itself be an edge of the node.  The pair
    space is finite, so the exploration terminates.
    """
    if not m.alphabet <= code.source:
        raise AlphabetMismatch("machine alphabet must lie within the code's source alphabet")
    if rel.carrier != code.source:
        raise AlphabetMismatch("relation carrier must be the code's source alphabet")
    tree = to_tree(code)
    node_edges: dict[str, dict[Label, str]] = {
        q: {a: dst for a, dst in tree.tree.out(q)} for q in tree.tree.states
    }
    root = tree.root
    start = (m.initial, root)
    seen = {start}
    todo = deque([start])
    while todo:
        q, node = todo.popleft()
        edges = node_edges[node]
        for a in sorted(edges, key=str):
            for a2 in rel.related(a):
                if m.enables(q, a2) and a2 not in edges:
                    return False, IncompletenessWitness(q, node, a, a2)
        for a, child in sorted(edges.items(), key=lambda e: str(e[0])):
            nxt = root if tree.is_leaf(child) else child
            for q2 in m.succ(q, a):
                pair = (q2, nxt)
                if pair not in seen:
                    seen.add(pair)
                    todo.append(pair)
    return True, None


def vertical_check(
    m: Lts, n: Lts, code: CodeMap, mode: str, rel: CompatRel | None = None
) -> bool:
    """Compare a concrete system against an abstract one through the code.

    Mode ``rho`` asks for a simulation of ``m`` by the refinement of ``n``;
    mode ``gamma`` for a simulation of ``m`` by the concretization of ``n``.
    The first is the stricter relation of the two.
    """
    if mode == MODE_RHO:
        return find_simulation(m, refine(code, n)) is not None
    if mode == MODE_GAMMA:
        if rel is None:
            rel = CompatRel.identity(code.source)
        return find_simulation(m, concretize(code, rel, n)) is not None
    raise ValueError(f"unknown mode {mode!r}")
