"""A small gallery of machines and codes used by the docs, fixtures, and tests.

Each value is transcribed by hand once; the test suite re-derives every
machine that an operator can produce and compares up to isomorphism of the
reachable parts, so a transcription slip cannot pass silently.
"""

from __future__ import annotations

from .codes import CodeMap
from .lts import Label, Lts

__all__ = [
    "choice_machine",
    "octal_choice_nondet",
    "octal_choice_det",
    "square_machine",
    "ascii_fragment_code",
    "octal_letters_code",
    "coffee_code",
    "double_press_code",
    "double_press_contraction",
    "split_press_code",
    "split_press_contraction",
    "letter_loops",
    "letter_loops_refined",
    "double_press_concretization",
    "shared_input_code",
    "chaos_inner_code",
    "chaos_outer_code",
    "chaos_machine",
    "FIXTURES",
]


def _lts(states, initial, triples, alphabet):
    return Lts(
        states,
        initial,
        [(src, Label.parse(t), dst) for src, t, dst in triples],
        [Label.parse(t) for t in alphabet],
    )


def _code(source, target, entries):
    return CodeMap(
        [Label.parse(t) for t in source],
        [Label.parse(t) for t in target],
        [(Label.parse(b), tuple(Label.parse(a) for a in w)) for b, w in entries],
    )


def choice_machine() -> Lts:
    """One state offering exactly the two inputs a and b."""
    return _lts(
        ["q0", "q1", "q2"],
        "q0",
        [("q0", "a", "q1"), ("q0", "b", "q2")],
        ["a", "b"],
    )


def octal_choice_nondet() -> Lts:
    """The a/b choice expanded per transition: the first octal digit is a guess."""
    return _lts(
        ["q0", "q1", "q2", "q3", "q4", "q5", "q6"],
        "q0",
        [
            ("q0", "1", "q1"),
            ("q0", "1", "q2"),
            ("q1", "4", "q3"),
            ("q2", "4", "q4"),
            ("q3", "1", "q5"),
            ("q4", "2", "q6"),
        ],
        ["1", "2", "4"],
    )


def octal_choice_det() -> Lts:
    """The a/b choice expanded with shared prefixes: the choice happens last."""
    return _lts(
        ["q0", "q1", "q2", "q3", "q4"],
        "q0",
        [
            ("q0", "1", "q1"),
            ("q1", "4", "q2"),
            ("q2", "1", "q3"),
            ("q2", "2", "q4"),
        ],
        ["1", "2", "4"],
    )


def square_machine() -> Lts:
    """Four states in a square; input b yields 1 exactly after an odd a-streak.

    Inputs {a, b}, outputs {0, 1}; the only 1 appears on b in the state
    reached by a from an odd position.
    """
    return _lts(
        ["q0", "q1", "q2", "q3"],
        "q0",
        [
            ("q0", "b/0", "q1"),
            ("q0", "a/0", "q3"),
            ("q1", "a/0", "q2"),
            ("q1", "b/0", "q0"),
            ("q2", "b/0", "q1"),
            ("q2", "a/0", "q3"),
            ("q3", "a/0", "q2"),
            ("q3", "b/1", "q0"),
        ],
        ["a/0", "a/1", "b/0", "b/1"],
    )


def ascii_fragment_code() -> CodeMap:
    """Octal ASCII encodings of the five letters of the word 'Mealy'."""
    return _code(
        ["1", "4", "5", "7"],
        ["M", "e", "a", "l", "y"],
        [
            ("M", ["1", "1", "5"]),
            ("e", ["1", "4", "5"]),
            ("a", ["1", "4", "1"]),
            ("l", ["1", "5", "4"]),
            ("y", ["1", "7", "1"]),
        ],
    )


def octal_letters_code() -> CodeMap:
    """Octal ASCII encodings of just the letters a and b."""
    return _code(
        ["1", "2", "4"],
        ["a", "b"],
        [("a", ["1", "4", "1"]), ("b", ["1", "4", "2"])],
    )


def coffee_code() -> CodeMap:
    """Getting a drink from a coffee machine, with up to three interventions.

    The abstract pair reports the drink ordered and how many interventions
    (adding water or beans, emptying the waste tray) were needed.
    """
    inputs = ["switch_on", "add_water", "add_beans", "remove_waste", "coffee", "espresso"]
    outputs = ["ready", "need_water", "need_beans", "tray_full", "coffee", "espresso"]
    source = [f"{i}/{o}" for i in inputs for o in outputs]
    on = "switch_on/need_water"
    water = "add_water/need_beans"
    beans = "add_beans/tray_full"
    serve = {"coffee": "coffee/coffee", "espresso": "espresso/espresso"}
    prefixes = {
        "0": ["switch_on/ready"],
        "1": [on, "add_water/ready"],
        "2": [on, water, "add_beans/ready"],
        "3": [on, water, beans, "remove_waste/ready"],
    }
    entries = [
        (f"{drink}/{count}", path + [serve[drink]])
        for count, path in prefixes.items()
        for drink in ("coffee", "espresso")
    ]
    target = [b for b, _ in entries]
    return _code(source, target, entries)


def double_press_code() -> CodeMap:
    """Each abstract step doubles a key press: A is a twice, B is b twice."""
    return _code(
        ["a/0", "a/1", "b/0", "b/1"],
        ["A/0", "B/0"],
        [("A/0", ["a/0", "a/0"]), ("B/0", ["b/0", "b/0"])],
    )


def double_press_contraction() -> Lts:
    """The square machine seen through the double-press code."""
    return _lts(
        ["q0", "q2"],
        "q0",
        [
            ("q0", "A/0", "q2"),
            ("q0", "B/0", "q0"),
            ("q2", "A/0", "q2"),
            ("q2", "B/0", "q0"),
        ],
        ["A/0", "B/0"],
    )


def split_press_code() -> CodeMap:
    """B is a single b press; C is an a press remembered through a b press."""
    return _code(
        ["a/0", "a/1", "b/0", "b/1"],
        ["B/0", "C/0", "C/1"],
        [
            ("B/0", ["b/0"]),
            ("C/0", ["a/0", "b/0"]),
            ("C/1", ["a/0", "b/1"]),
        ],
    )


def split_press_contraction() -> Lts:
    """The square machine seen through the split-press code."""
    return _lts(
        ["q0", "q1"],
        "q0",
        [
            ("q0", "B/0", "q1"),
            ("q0", "C/1", "q0"),
            ("q1", "B/0", "q0"),
            ("q1", "C/0", "q1"),
        ],
        ["B/0", "C/0", "C/1"],
    )


def letter_loops() -> Lts:
    """One state looping on the letters M and a."""
    return _lts(
        ["q0"],
        "q0",
        [("q0", "M", "q0"), ("q0", "a", "q0")],
        ["M", "e", "a", "l", "y"],
    )


def letter_loops_refined() -> Lts:
    """The letter loops expanded into their octal ASCII digit paths."""
    return _lts(
        ["r0", "r1", "r2", "r3"],
        "r0",
        [
            ("r0", "1", "r1"),
            ("r1", "1", "r2"),
            ("r1", "4", "r3"),
            ("r2", "5", "r0"),
            ("r3", "1", "r0"),
        ],
        ["1", "4", "5", "7"],
    )


def double_press_concretization() -> Lts:
    """The double-press contraction made concrete again, chaos included.

    Runs that leave the code (an unexpected output, or the wrong second
    press) fall into the absorbing chaos state.
    """
    chaos = [("chi", t, "chi") for t in ("a/0", "a/1", "b/0", "b/1")]
    return _lts(
        ["q0e", "q0a", "q0b", "q2e", "q2a", "q2b", "chi"],
        "q0e",
        [
            ("q0e", "a/0", "q0a"),
            ("q0e", "b/0", "q0b"),
            ("q0a", "a/0", "q2e"),
            ("q0a", "b/0", "chi"),
            ("q0a", "b/1", "chi"),
            ("q0b", "b/0", "q0e"),
            ("q0b", "a/0", "chi"),
            ("q0b", "a/1", "chi"),
            ("q2e", "a/0", "q2a"),
            ("q2e", "b/0", "q2b"),
            ("q2a", "a/0", "q2e"),
            ("q2a", "b/0", "chi"),
            ("q2a", "b/1", "chi"),
            ("q2b", "b/0", "q0e"),
            ("q2b", "a/0", "chi"),
            ("q2b", "a/1", "chi"),
        ]
        + chaos,
        ["a/0", "a/1", "b/0", "b/1"],
    )


def shared_input_code() -> CodeMap:
    """Two concrete inputs decode to the same abstract input: not determinate."""
    return _code(
        ["a/0", "b/0"],
        ["0/A", "0/B"],
        [("0/A", ["a/0"]), ("0/B", ["b/0"])],
    )


def chaos_inner_code() -> CodeMap:
    """A single abstract letter that doubles the single concrete letter."""
    return _code(["a"], ["b"], [("b", ["a", "a"])])


def chaos_outer_code() -> CodeMap:
    """A code that is undefined everywhere."""
    return _code(["b"], ["c"], [])


def chaos_machine() -> Lts:
    """A single state with no transitions."""
    return _lts(["q0"], "q0", [], ["c"])


#: Fixture file name -> constructor, for the committed golden documents.
FIXTURES = {
    "choice.lts.json": choice_machine,
    "octal-choice-nondet.lts.json": octal_choice_nondet,
    "octal-choice-det.lts.json": octal_choice_det,
    "square.mealy.json": square_machine,
    "ascii-fragment.code.json": ascii_fragment_code,
    "octal-letters.code.json": octal_letters_code,
    "coffee.code.json": coffee_code,
    "double-press.code.json": double_press_code,
    "double-press-contraction.mealy.json": double_press_contraction,
    "split-press.code.json": split_press_code,
    "split-press-contraction.mealy.json": split_press_contraction,
    "letter-loops.lts.json": letter_loops,
    "letter-loops-refined.lts.json": letter_loops_refined,
    "double-press-concretization.mealy.json": double_press_concretization,
    "shared-input.code.json": shared_input_code,
    "chaos-inner.code.json": chaos_inner_code,
    "chaos-outer.code.json": chaos_outer_code,
    "chaos-machine.lts.json": chaos_machine,
}


def write_fixtures(directory) -> list[str]:
    """Write every gallery value as a canonical document; returns the names."""
    import pathlib

    from .codes import CodeMap as _CM
    from .documents import code_to_document, dumps, lts_to_document

    directory = pathlib.Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, build in sorted(FIXTURES.items()):
        value = build()
        doc = code_to_document(value) if isinstance(value, _CM) else lts_to_document(value)
        (directory / name).write_text(dumps(doc), encoding="utf-8")
        written.append(name)
    return written
