"""Adaptors: translating between an abstract learner/tester and a concrete SUT.

Given a code over Mealy labels, an adaptor answers each abstract input by
steering the system under test through the code tree, choosing concrete
inputs from a winning strategy of the induced two-player game (the SUT picks
the outputs) until a leaf carrying the requested abstract input is reached.
The module also builds the explicit composed process of an adaptor with a
SUT model, whose hidden synchronizations let the learner-visible behavior be
compared against the contraction of the SUT model.
"""

from __future__ import annotations

import os
import random
import select
import socket
import subprocess
from collections import deque
from typing import Iterable, NamedTuple, Sequence

from .codes import CodeTree, to_map
from .errors import (
    CodeIncomplete,
    NotDeterminate,
    NotWinning,
    SutProtocolError,
)
from .lts import CompatRel, Label, Lts, is_deterministic
from .operators import contract
from .simulation import find_delay_simulation

__all__ = [
    "TAU",
    "WinningTable",
    "solve_winning",
    "DeterminacyWitness",
    "is_determinate",
    "is_output_deterministic",
    "is_input_enabled",
    "InProcessSut",
    "ExternalSut",
    "AdaptorSession",
    "AdaptorRun",
    "run_adaptor",
    "format_transcript",
    "split_io",
    "adaptor_composition",
    "check_adaptor_theorem",
]

TAU = Label("τ")


def _require_mealy_tree(tree: CodeTree) -> None:
    if not all(a.is_mealy for a in tree.tree.alphabet):
        raise ValueError("adaptor codes need Mealy labels on the tree")
    if not all(lab.is_mealy for _, lab in tree.leaf_labels):
        raise ValueError("adaptor codes need Mealy leaf labels")


def _depth_order(tree: CodeTree) -> list[str]:
    """Tree nodes ordered deepest first, so children precede parents."""
    depth = {tree.root: 0}
    todo = deque([tree.root])
    while todo:
        q = todo.popleft()
        for _, dst in tree.tree.out(q):
            depth[dst] = depth[q] + 1
            todo.append(dst)
    return sorted(depth, key=lambda q: (-depth[q], q))


class WinningTable:
    """For each tree node and abstract input: the concrete inputs that force
    the play into a leaf carrying that abstract input.

    Labeled leaves win their own abstract input without any input; they are
    recorded separately since no concrete input is attached to them.
    """

    def __init__(
        self,
        winners: dict[tuple[str, str], tuple[str, ...]],
        leaf_wins: frozenset[tuple[str, str]] = frozenset(),
    ):
        self._winners = {k: tuple(sorted(v)) for k, v in winners.items() if v}
        self._leaf_wins = frozenset(leaf_wins)

    def winning_inputs(self, node: str, abstract_input: str) -> tuple[str, ...]:
        return self._winners.get((node, abstract_input), ())

    def is_winning(self, node: str, abstract_input: str) -> bool:
        return (node, abstract_input) in self._leaf_wins or bool(
            self.winning_inputs(node, abstract_input)
        )

    def unique_input(self, node: str, abstract_input: str) -> str | None:
        inputs = self.winning_inputs(node, abstract_input)
        if not inputs:
            return None
        if len(inputs) > 1:
            raise ValueError(
                f"node {node!r} has several winning inputs for "
                f"{abstract_input!r}: {inputs}"
            )
        return inputs[0]

    def multi_winner_pairs(self) -> tuple[tuple[str, str], ...]:
        return tuple(sorted(k for k, v in self._winners.items() if len(v) > 1))

    def items(self):
        return sorted(self._winners.items())


def solve_winning(tree: CodeTree) -> WinningTable:
    """Evaluate the adaptor game bottom-up over the code tree.

    A labeled leaf wins exactly the abstract input it carries.  An internal
    node wins an abstract input with concrete input i when it has an i-edge
    and every i-successor wins that abstract input.
    """
    _require_mealy_tree(tree)
    abstract_inputs = sorted({lab.symbol for _, lab in tree.leaf_labels})
    winning: dict[tuple[str, str], set[str]] = {}
    leaf_wins: set[tuple[str, str]] = set()
    is_win: dict[tuple[str, str], bool] = {}
    labels = dict(tree.leaf_labels)
    for node in _depth_order(tree):
        edges = tree.tree.out(node)
        for x in abstract_inputs:
            if not edges:
                won = node in labels and labels[node].symbol == x
                if won:
                    leaf_wins.add((node, x))
                is_win[(node, x)] = won
                continue
            by_input: dict[str, list[str]] = {}
            for a, dst in edges:
                by_input.setdefault(a.symbol, []).append(dst)
            winners = {
                i
                for i, children in by_input.items()
                if all(is_win[(c, x)] for c in children)
            }
            if winners:
                winning[(node, x)] = winners
            is_win[(node, x)] = bool(winners)
    return WinningTable(
        {k: tuple(v) for k, v in winning.items()}, frozenset(leaf_wins)
    )


class DeterminacyWitness(NamedTuple):
    node: str
    abstract_input: str
    first_input: str
    second_input: str


def is_determinate(tree: CodeTree) -> tuple[bool, DeterminacyWitness | None]:
    """Whether each node offers at most one concrete input per abstract input.

    Fails when two edges with different concrete inputs both lead to
    subtrees containing a leaf with the same abstract input; the witness
    names the node, the shared abstract input, and the two concrete inputs.
    """
    _require_mealy_tree(tree)
    labels = dict(tree.leaf_labels)
    reachable_inputs: dict[str, frozenset[str]] = {}
    for node in _depth_order(tree):
        found = set()
        if node in labels:
            found.add(labels[node].symbol)
        for _, dst in tree.tree.out(node):
            found |= reachable_inputs[dst]
        reachable_inputs[node] = frozenset(found)
    for node in sorted(tree.tree.states):
        by_input: dict[str, set[str]] = {}
        for a, dst in tree.tree.out(node):
            by_input.setdefault(a.symbol, set()).update(reachable_inputs[dst])
        inputs = sorted(by_input)
        for idx, i1 in enumerate(inputs):
            for i2 in inputs[idx + 1 :]:
                shared = by_input[i1] & by_input[i2]
                if shared:
                    x = sorted(shared)[0]
                    return False, DeterminacyWitness(node, x, i1, i2)
    return True, None


def is_output_deterministic(m: Lts) -> bool:
    """One output and one successor per state and input."""
    return is_deterministic(m, CompatRel.same_input(m.alphabet))


def is_input_enabled(m: Lts) -> bool:
    """Every state accepts every input of the alphabet."""
    inputs = m.inputs
    return all(
        any(a.symbol == i for a, _ in m.out(q)) for q in m.states for i in inputs
    )


# -- SUT endpoints ----------------------------------------------------------


class InProcessSut:
    """A SUT backend driven by an in-memory Mealy machine.

    The machine must be input enabled.  When a state offers several outputs
    for an input, the choice is resolved by a scripted list of output
    symbols while it lasts, then by a seeded pseudo-random pick, so sessions
    are reproducible.
    """

    def __init__(self, machine: Lts, seed: int = 0, script: Sequence[str] | None = None):
        if not all(a.is_mealy for a in machine.alphabet):
            raise ValueError("in-process SUT needs a Mealy machine")
        if not is_input_enabled(machine):
            raise ValueError("in-process SUT machine must be input enabled")
        self.machine = machine
        self._rng = random.Random(seed)
        self._script = deque(script or ())
        self._state = machine.initial
        self._pending: str | None = None

    @property
    def state(self) -> str:
        return self._state

    def send(self, symbol: str) -> None:
        options = sorted(
            ((a, dst) for a, dst in self.machine.out(self._state) if a.symbol == symbol),
            key=lambda e: (str(e[0]), e[1]),
        )
        if not options:
            raise SutProtocolError(f"machine rejects input {symbol!r} in state {self._state!r}")
        if self._script:
            wanted = self._script.popleft()
            matching = [e for e in options if e[0].output == wanted]
            if not matching:
                raise SutProtocolError(
                    f"scripted output {wanted!r} is not enabled for input "
                    f"{symbol!r} in state {self._state!r}"
                )
            label, nxt = matching[0]
        else:
            label, nxt = self._rng.choice(options)
        self._state = nxt
        self._pending = label.output

    def receive(self) -> str:
        if self._pending is None:
            raise SutProtocolError("receive() called before send()")
        out, self._pending = self._pending, None
        return out

    def reset(self) -> None:
        self._state = self.machine.initial
        self._pending = None


class ExternalSut:
    """A SUT behind a newline-delimited byte stream (child process or TCP).

    The adaptor writes one input symbol per line; the SUT answers with one
    output symbol per line.  The literal line ``RESET`` asks the SUT to
    return to its initial state and expects no reply.
    """

    def __init__(self, write, read_some, close, timeout: float = 5.0):
        self._write = write
        self._read_some = read_some
        self._close = close
        self.timeout = timeout
        self._buffer = b""

    @classmethod
    def spawn(cls, command: Sequence[str], timeout: float = 5.0) -> "ExternalSut":
        proc = subprocess.Popen(
            list(command),
            stdin=subprocess.PIPE,
            stdout=subprocess.PIPE,
            bufsize=0,
        )

        def write(data: bytes) -> None:
            proc.stdin.write(data)
            proc.stdin.flush()

        def read_some(deadline: float) -> bytes:
            ready, _, _ = select.select([proc.stdout], [], [], deadline)
            if not ready:
                raise SutProtocolError("timed out waiting for the SUT process")
            chunk = os.read(proc.stdout.fileno(), 4096)
            if not chunk:
                raise SutProtocolError("SUT process closed its output stream")
            return chunk

        def close() -> None:
            try:
                proc.stdin.close()
            except OSError:
                pass
            proc.terminate()
            try:
                proc.wait(timeout=2)
            except subprocess.TimeoutExpired:
                proc.kill()
                proc.wait()

        return cls(write, read_some, close, timeout)

    @classmethod
    def connect(cls, host: str, port: int, timeout: float = 5.0) -> "ExternalSut":
        sock = socket.create_connection((host, port), timeout=timeout)

        def write(data: bytes) -> None:
            sock.sendall(data)

        def read_some(deadline: float) -> bytes:
            sock.settimeout(deadline)
            try:
                chunk = sock.recv(4096)
            except socket.timeout as exc:
                raise SutProtocolError("timed out waiting for the SUT socket") from exc
            if not chunk:
                raise SutProtocolError("SUT closed the connection")
            return chunk

        return cls(write, read_some, sock.close, timeout)

    def send(self, symbol: str) -> None:
        self._write((symbol + "\n").encode("utf-8"))

    def receive(self) -> str:
        while b"\n" not in self._buffer:
            self._buffer += self._read_some(self.timeout)
        line, _, self._buffer = self._buffer.partition(b"\n")
        symbol = line.decode("utf-8").strip()
        if not symbol or any(ch.isspace() for ch in symbol) or "/" in symbol:
            raise SutProtocolError(f"malformed output symbol {line!r} from the SUT")
        return symbol

    def reset(self) -> None:
        self._write(b"RESET\n")

    def close(self) -> None:
        self._close()

    def __enter__(self) -> "ExternalSut":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


# -- the adaptor runtime ----------------------------------------------------


class AdaptorRun(NamedTuple):
    outputs: tuple[str, ...]
    transcript: tuple[tuple, ...]


def format_transcript(events: Iterable[tuple]) -> list[str]:
    lines = []
    for event in events:
        if event[0] == "SUT":
            lines.append(f"SUT {event[1]}/{event[2]}")
        else:
            lines.append(f"{event[0]} {event[1]}")
    return lines


class AdaptorSession:
    """One adaptor in front of one SUT endpoint.

    Each abstract input restarts the code tree at its root and walks down:
    send the unique winning concrete input, read the SUT's output, follow
    the corresponding edge.  The leaf reached carries the abstract
    input/output pair whose output component is returned to the caller.
    Not safe for concurrent use from several threads.
    """

    def __init__(self, tree: CodeTree, sut):
        _require_mealy_tree(tree)
        ok, witness = is_determinate(tree)
        if not ok:
            raise NotDeterminate(witness)
        self.tree = tree
        self.sut = sut
        self.table = solve_winning(tree)
        self.transcript: list[tuple] = []

    def apply(self, abstract_input: str) -> str:
        tree = self.tree
        if not self.table.is_winning(tree.root, abstract_input):
            raise NotWinning(abstract_input)
        self.transcript.append(("IN", abstract_input))
        node = tree.root
        while not tree.is_leaf(node):
            concrete = self.table.unique_input(node, abstract_input)
            assert concrete is not None, "loop invariant: node is winning"
            self.sut.send(concrete)
            observed = self.sut.receive()
            self.transcript.append(("SUT", concrete, observed))
            step = Label(concrete, observed)
            targets = tree.tree.succ(node, step)
            if not targets:
                raise CodeIncomplete(node, concrete, observed)
            node = targets[0]
        leaf_label = tree.label_of(node)
        assert leaf_label.symbol == abstract_input
        self.transcript.append(("OUT", leaf_label.output))
        return leaf_label.output


def run_adaptor(tree: CodeTree, sut, abstract_inputs: Iterable[str]) -> AdaptorRun:
    """Run a whole session and collect outputs plus the full transcript."""
    session = AdaptorSession(tree, sut)
    outputs = [session.apply(x) for x in abstract_inputs]
    return AdaptorRun(tuple(outputs), tuple(session.transcript))


# -- explicit process composition -------------------------------------------


def _emission(y: str) -> Label:
    return Label(f"{y}!")


def _learner_alphabet(abstract: Iterable[Label]) -> frozenset[Label]:
    xs = sorted({lab.symbol for lab in abstract})
    ys = sorted({lab.output for lab in abstract})
    labels = [Label(x) for x in xs] + [_emission(y) for y in ys] + [TAU]
    if len(set(labels)) != len(labels):
        raise ValueError("abstract input/output symbols collide after namespacing")
    return frozenset(labels)


def split_io(m: Lts) -> Lts:
    """Two-phase view of a Mealy machine with inputs and outputs separated.

    Every state first accepts any input of the alphabet, then emits one of
    the outputs the machine allows for it; emissions are namespaced with a
    trailing ``!`` so inputs and outputs cannot collide.
    """
    if not all(a.is_mealy for a in m.alphabet):
        raise ValueError("split_io needs a Mealy machine")
    xs = sorted(m.inputs)
    alphabet = _learner_alphabet(m.alphabet)
    states: list[str] = []
    transitions: list[tuple[str, Label, str]] = []
    taken: set[str] = set()

    def add_state(name: str) -> str:
        if name in taken:
            raise ValueError(f"state name {name!r} collides in the split view")
        taken.add(name)
        states.append(name)
        return name

    for q in m.states:
        add_state(q)
    for q in m.states:
        for x in xs:
            mid = add_state(f"{q}?{x}")
            transitions.append((q, Label(x), mid))
            for a, dst in m.out(q):
                if a.symbol == x:
                    transitions.append((mid, _emission(a.output), dst))
    return Lts(states, m.initial, transitions, alphabet)


def adaptor_composition(tree: CodeTree, m: Lts) -> Lts:
    """The composed process of an adaptor for the code and a SUT model.

    States pair an adaptor phase with a SUT state: idle at the tree root,
    descending towards a leaf for a pending abstract input, or waiting for
    the SUT's output after forwarding a concrete input.  Synchronizations on
    concrete inputs and outputs are hidden as ``τ``; abstract inputs and
    namespaced output emissions stay visible.
    """
    _require_mealy_tree(tree)
    if not all(a.is_mealy for a in m.alphabet):
        raise ValueError("the SUT model must be a Mealy machine")
    ok, witness = is_determinate(tree)
    if not ok:
        raise NotDeterminate(witness)
    table = solve_winning(tree)
    for _, lab in tree.leaf_labels:
        if not table.is_winning(tree.root, lab.symbol):
            raise NotWinning(lab.symbol)
    if not is_input_enabled(m):
        raise ValueError("the SUT model must be input enabled")

    xs = sorted({a.symbol for a in tree.abstract})
    alphabet = _learner_alphabet(tree.abstract)
    labels = dict(tree.leaf_labels)

    start = ("P", m.initial)
    names: dict[tuple, str] = {}
    taken: set[str] = set()
    order: list[str] = []

    def visit(key: tuple) -> str:
        if key not in names:
            if key[0] == "P":
                text = f"P∥{key[1]}"
            elif key[0] == "Q":
                text = f"Q({key[1]},{key[2]})∥{key[3]}"
            else:
                text = f"R({key[1]},{key[2]})∥{key[3]}?{key[4]}"
            if text in taken:
                raise ValueError(f"composition state name {text!r} collides")
            taken.add(text)
            names[key] = text
            order.append(text)
            todo.append(key)
        return names[key]

    todo: deque[tuple] = deque()
    transitions: list[tuple[str, Label, str]] = []
    visit(start)
    while todo:
        key = todo.popleft()
        src = names[key]
        if key[0] == "P":
            _, q = key
            for x in xs:
                transitions.append((src, Label(x), visit(("Q", tree.root, x, q))))
        elif key[0] == "Q":
            _, node, x, q = key
            if tree.is_leaf(node):
                if node in labels:
                    y = labels[node].output
                    transitions.append((src, _emission(y), visit(("P", q))))
                continue
            inputs = table.winning_inputs(node, x)
            if not inputs:
                continue
            i = inputs[0]
            transitions.append((src, TAU, visit(("R", node, x, q, i))))
        else:
            _, node, x, q, i = key
            for a, child in tree.tree.out(node):
                if a.symbol != i:
                    continue
                for q2 in m.succ(q, a):
                    transitions.append((src, TAU, visit(("Q", child, x, q2))))
    return Lts(order, names[start], transitions, alphabet)


def check_adaptor_theorem(tree: CodeTree, m: Lts) -> bool:
    """Whether the composed adaptor/SUT process and the contraction of the
    SUT model delay-simulate each other (hidden moves absorbed)."""
    composed = adaptor_composition(tree, m)
    learner_view = split_io(contract(to_map(tree), m))
    return (
        find_delay_simulation(composed, learner_view, TAU) is not None
        and find_delay_simulation(learner_view, composed, TAU) is not None
    )
