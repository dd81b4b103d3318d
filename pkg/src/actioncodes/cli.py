"""Command-line interface.

Exit codes: 0 success or PASS, 1 check FAIL, 2 malformed input or validation
error (with a machine-readable ``ERROR`` line on stderr), 3 no winning
strategy for a requested abstract input, 4 the SUT produced an output the
code has no edge for.
"""

from __future__ import annotations

import argparse
import shlex
import sys
from pathlib import Path

from .adaptor import (
    AdaptorSession,
    ExternalSut,
    InProcessSut,
    check_adaptor_theorem,
    format_transcript,
    is_determinate,
    solve_winning,
)
from .codes import CodeMap, compose, to_map, to_tree
from .documents import (
    DocumentError,
    code_from_document,
    code_to_document,
    dumps,
    loads,
    lts_from_document,
    lts_to_document,
    tree_from_document,
    tree_to_document,
)
from .errors import (
    ActionCodesError,
    CodeIncomplete,
    NotDeterminate,
    NotWinning,
)
from .generate import gen_code, gen_lts, gen_mealy, mealy_alphabet
from .lts import CompatRel, Label, Lts, is_deterministic
from .operators import concretize, contract, is_icomplete, refine
from .simulation import find_isomorphism_reachable, find_simulation

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_BAD_INPUT = 2
EXIT_NOT_WINNING = 3
EXIT_CODE_INCOMPLETE = 4


def _read(path: str) -> dict:
    try:
        return loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise DocumentError(f"cannot read {path}: {exc}") from exc


def _load_lts(path: str) -> Lts:
    return lts_from_document(_read(path))


def _load_code(path: str) -> CodeMap:
    return code_from_document(_read(path))


def _emit(doc: dict, out: str | None) -> None:
    text = dumps(doc)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _stats(m: Lts) -> None:
    print(f"states {len(m.states)} transitions {len(m.transitions)}", file=sys.stderr)


def _rel(name: str, code: CodeMap) -> CompatRel:
    return CompatRel.by_name(name, code.source)


# -- operator verbs ---------------------------------------------------------


def _cmd_contract(args) -> int:
    code = _load_code(args.code)
    machine = _load_lts(args.machine)
    result = contract(code, machine)
    _emit(lts_to_document(result), args.out)
    if args.stats:
        _stats(result)
    return EXIT_OK


def _cmd_refine(args) -> int:
    code = _load_code(args.code)
    machine = _load_lts(args.machine)
    result = refine(code, machine)
    _emit(lts_to_document(result), args.out)
    if args.stats:
        _stats(result)
    return EXIT_OK


def _cmd_concretize(args) -> int:
    code = _load_code(args.code)
    machine = _load_lts(args.machine)
    result = concretize(code, _rel(args.rel, code), machine)
    _emit(lts_to_document(result), args.out)
    if args.stats:
        _stats(result)
    return EXIT_OK


def _cmd_compose(args) -> int:
    inner = _load_code(args.inner)
    outer = _load_code(args.outer)
    _emit(code_to_document(compose(inner, outer)), args.out)
    return EXIT_OK


def _cmd_to_tree(args) -> int:
    _emit(tree_to_document(to_tree(_load_code(args.code))), args.out)
    return EXIT_OK


def _cmd_to_map(args) -> int:
    _emit(code_to_document(to_map(tree_from_document(_read(args.tree)))), args.out)
    return EXIT_OK


def _cmd_gen(args) -> int:
    if args.what == "lts":
        value = gen_lts(args.seed, args.states, args.labels, args.deterministic)
        doc = lts_to_document(value)
    elif args.what == "mealy":
        value = gen_mealy(
            args.seed,
            args.states,
            args.inputs,
            args.outputs,
            input_enabled=args.input_enabled,
            output_deterministic=args.output_deterministic,
        )
        doc = lts_to_document(value)
    else:
        if args.mealy:
            import string

            target = [
                Label(string.ascii_uppercase[k], str(j))
                for k in range(args.abstract)
                for j in range(args.outputs)
            ]
            source = mealy_alphabet(args.inputs, args.outputs)
            code = gen_code(args.seed, source, target, args.abstract, args.maxlen)
        else:
            code = gen_code(
                args.seed, args.labels, args.abstract, args.abstract, args.maxlen
            )
        doc = code_to_document(code)
    _emit(doc, args.out)
    return EXIT_OK


# -- check verbs -------------------------------------------------------------


def _verdict(ok: bool, lines: list[str]) -> int:
    print("PASS" if ok else "FAIL")
    for line in lines:
        print(line)
    return EXIT_OK if ok else EXIT_FAIL


def _check_simulation(args) -> int:
    left, right = _load_lts(args.left), _load_lts(args.right)
    witness = find_simulation(left, right)
    lines = [f"pair {q} {p}" for q, p in witness] if witness else []
    return _verdict(witness is not None, lines)


def _check_isomorphism(args) -> int:
    left, right = _load_lts(args.left), _load_lts(args.right)
    mapping = find_isomorphism_reachable(left, right)
    lines = (
        [f"map {q} {p}" for q, p in sorted(mapping.items())] if mapping else []
    )
    return _verdict(mapping is not None, lines)


def _check_icomplete(args) -> int:
    code = _load_code(args.code)
    machine = _load_lts(args.machine)
    ok, witness = is_icomplete(code, _rel(args.rel, code), machine)
    lines = []
    if witness:
        lines.append(
            f"witness state={witness.state} node={witness.node} "
            f"enabled={witness.enabled} missing={witness.missing}"
        )
    return _verdict(ok, lines)


def _check_winning(args) -> int:
    tree = to_tree(_load_code(args.code))
    table = solve_winning(tree)
    wanted = [args.abstract_input] if args.abstract_input else sorted(
        {lab.symbol for _, lab in tree.leaf_labels}
    )
    lines = []
    ok = True
    for x in wanted:
        if table.is_winning(tree.root, x):
            inputs = ",".join(table.winning_inputs(tree.root, x))
            lines.append(f"winning {x} {inputs}")
        else:
            ok = False
            lines.append(f"not-winning {x}")
    return _verdict(ok, lines)


def _check_determinate(args) -> int:
    tree = to_tree(_load_code(args.code))
    ok, witness = is_determinate(tree)
    lines = []
    if witness:
        lines.append(
            f"witness node={witness.node} input={witness.abstract_input} "
            f"first={witness.first_input} second={witness.second_input}"
        )
    return _verdict(ok, lines)


def _check_galois_refinement(args) -> int:
    """Adjunction between refinement and contraction on one instance."""
    code = _load_code(args.code)
    abstract = _load_lts(args.abstract)
    concrete = _load_lts(args.concrete)
    left = find_simulation(refine(code, abstract), concrete) is not None
    right = find_simulation(abstract, contract(code, concrete)) is not None
    over_domain = all(
        a in code.domain for _, a, _ in abstract.transitions
    )
    det = is_deterministic(concrete)
    ok = True
    lines = [
        f"refinement-simulated {left}",
        f"contraction-simulated {right}",
        f"abstract-over-domain {over_domain}",
        f"concrete-deterministic {det}",
    ]
    if over_domain and left and not right:
        ok = False
        lines.append("violated left-to-right")
    if det and right and not left:
        ok = False
        lines.append("violated right-to-left")
    return _verdict(ok, lines)


def _check_galois_concretization(args) -> int:
    """Adjunction between contraction and concretization on one instance."""
    code = _load_code(args.code)
    concrete = _load_lts(args.concrete)
    abstract = _load_lts(args.abstract)
    rel = _rel(args.rel, code)
    complete, witness = is_icomplete(code, rel, concrete)
    lines = [f"icomplete {complete}"]
    if not complete:
        lines.append(
            f"witness state={witness.state} node={witness.node} "
            f"enabled={witness.enabled} missing={witness.missing}"
        )
        return _verdict(False, lines)
    left = find_simulation(contract(code, concrete), abstract) is not None
    right = find_simulation(concrete, concretize(code, rel, abstract)) is not None
    lines += [f"contraction-simulated {left}", f"concretization-simulated {right}"]
    return _verdict(left == right, lines)


def _check_insertion(args) -> int:
    code = _load_code(args.code)
    abstract = _load_lts(args.abstract)
    used = {a for _, a, _ in abstract.transitions}
    if not used <= code.domain:
        print("FAIL")
        print("machine uses labels outside the code domain")
        return EXIT_FAIL
    rel = _rel(args.rel, code)
    back = contract(code, concretize(code, rel, abstract))
    mapping = find_isomorphism_reachable(abstract, back)
    lines = [f"map {q} {p}" for q, p in sorted(mapping.items())] if mapping else []
    return _verdict(mapping is not None, lines)


def _check_compose_alpha(args) -> int:
    inner = _load_code(args.inner)
    outer = _load_code(args.outer)
    machine = _load_lts(args.machine)
    composed = contract(compose(inner, outer), machine)
    stacked = contract(outer, contract(inner, machine))
    mapping = find_isomorphism_reachable(composed, stacked)
    lines = [f"map {q} {p}" for q, p in sorted(mapping.items())] if mapping else []
    return _verdict(mapping is not None, lines)


def _check_compose_rho(args) -> int:
    inner = _load_code(args.inner)
    outer = _load_code(args.outer)
    machine = _load_lts(args.machine)
    letters = {b for _, w in outer.entries for b in w}
    if not letters <= inner.domain:
        print("FAIL")
        print("outer code words use letters outside the inner code domain")
        return EXIT_FAIL
    composed = refine(compose(inner, outer), machine)
    stacked = refine(inner, refine(outer, machine))
    mapping = find_isomorphism_reachable(composed, stacked)
    lines = [f"map {q} {p}" for q, p in sorted(mapping.items())] if mapping else []
    return _verdict(mapping is not None, lines)


def _check_gamma_noncompose(args) -> int:
    """Concretization does not commute with composition: non-isomorphic but
    mutually similar on the given instance."""
    inner = _load_code(args.inner)
    outer = _load_code(args.outer)
    machine = _load_lts(args.machine)
    rel_inner = CompatRel.identity(inner.source)
    rel_outer = CompatRel.identity(outer.source)
    composed = concretize(compose(inner, outer), rel_inner, machine)
    stacked = concretize(inner, rel_inner, concretize(outer, rel_outer, machine))
    iso = find_isomorphism_reachable(composed, stacked)
    forward = find_simulation(composed, stacked) is not None
    backward = find_simulation(stacked, composed) is not None
    lines = [
        f"isomorphic {iso is not None}",
        f"simulated-forward {forward}",
        f"simulated-backward {backward}",
    ]
    return _verdict(iso is None and forward and backward, lines)


def _check_adaptor_theorem(args) -> int:
    tree = to_tree(_load_code(args.code))
    machine = _load_lts(args.machine)
    ok = check_adaptor_theorem(tree, machine)
    return _verdict(ok, [])


# -- the adaptor verb --------------------------------------------------------


def _cmd_adaptor(args) -> int:
    code = _load_code(args.code)
    tree = to_tree(code)
    if args.inputs:
        text = Path(args.inputs).read_text(encoding="utf-8")
    else:
        text = sys.stdin.read()
    requested = [line.strip() for line in text.splitlines() if line.strip()]

    table = solve_winning(tree)
    for x in sorted(set(requested)):
        if not table.is_winning(tree.root, x):
            print(f"ERROR NotWinning {x}", file=sys.stderr)
            return EXIT_NOT_WINNING

    sut = None
    try:
        if args.sut_file:
            machine = _load_lts(args.sut_file)
            script = None
            if args.script:
                script = [
                    line.strip()
                    for line in Path(args.script).read_text(encoding="utf-8").splitlines()
                    if line.strip()
                ]
            sut = InProcessSut(machine, seed=args.seed, script=script)
        elif args.sut_exec:
            sut = ExternalSut.spawn(shlex.split(args.sut_exec), timeout=args.timeout)
            sut.reset()
        else:
            host, _, port = args.sut_tcp.rpartition(":")
            sut = ExternalSut.connect(host, int(port), timeout=args.timeout)
            sut.reset()

        session = AdaptorSession(tree, sut)
        printed = 0
        for x in requested:
            session.apply(x)
            for line in format_transcript(session.transcript[printed:]):
                print(line)
            printed = len(session.transcript)
        return EXIT_OK
    finally:
        if isinstance(sut, ExternalSut):
            sut.close()


# -- argument parsing ---------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="actioncodes",
        description="Action codes: contraction, refinement, concretization, "
        "law checking, and a learner/tester adaptor.",
    )
    sub = parser.add_subparsers(dest="verb", required=True)

    def add_out(p):
        p.add_argument("--out", help="write the result document here instead of stdout")

    for verb, handler in (("contract", _cmd_contract), ("refine", _cmd_refine)):
        p = sub.add_parser(verb, help=f"{verb} a machine through a code")
        p.add_argument("--code", required=True)
        p.add_argument("--stats", action="store_true")
        add_out(p)
        p.add_argument("machine")
        p.set_defaults(handler=handler)

    p = sub.add_parser("concretize", help="concretize a machine through a code")
    p.add_argument("--code", required=True)
    p.add_argument("--rel", default="identity", choices=["identity", "same-input"])
    p.add_argument("--stats", action="store_true")
    add_out(p)
    p.add_argument("machine")
    p.set_defaults(handler=_cmd_concretize)

    p = sub.add_parser("compose", help="compose two codes (inner then outer)")
    add_out(p)
    p.add_argument("inner")
    p.add_argument("outer")
    p.set_defaults(handler=_cmd_compose)

    p = sub.add_parser("to-tree", help="tree form of a code document")
    add_out(p)
    p.add_argument("code")
    p.set_defaults(handler=_cmd_to_tree)

    p = sub.add_parser("to-map", help="map form of a tree document")
    add_out(p)
    p.add_argument("tree")
    p.set_defaults(handler=_cmd_to_map)

    p = sub.add_parser("gen", help="seeded random machines and codes")
    p.add_argument("what", choices=["lts", "mealy", "code"])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--states", type=int, default=4)
    p.add_argument("--labels", type=int, default=2)
    p.add_argument("--inputs", type=int, default=2)
    p.add_argument("--outputs", type=int, default=2)
    p.add_argument("--abstract", type=int, default=3)
    p.add_argument("--maxlen", type=int, default=3)
    p.add_argument("--deterministic", action="store_true")
    p.add_argument("--input-enabled", action="store_true")
    p.add_argument("--output-deterministic", action="store_true")
    p.add_argument("--mealy", action="store_true", help="generate a Mealy code")
    add_out(p)
    p.set_defaults(handler=_cmd_gen)

    check = sub.add_parser("check", help="decide a law on given instances")
    checks = check.add_subparsers(dest="what", required=True)

    p = checks.add_parser("simulation")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(handler=_check_simulation)

    p = checks.add_parser("isomorphism")
    p.add_argument("left")
    p.add_argument("right")
    p.set_defaults(handler=_check_isomorphism)

    p = checks.add_parser("icomplete")
    p.add_argument("--code", required=True)
    p.add_argument("--rel", default="identity", choices=["identity", "same-input"])
    p.add_argument("machine")
    p.set_defaults(handler=_check_icomplete)

    p = checks.add_parser("winning")
    p.add_argument("--code", required=True)
    p.add_argument("--for", dest="abstract_input")
    p.set_defaults(handler=_check_winning)

    p = checks.add_parser("determinate")
    p.add_argument("--code", required=True)
    p.set_defaults(handler=_check_determinate)

    p = checks.add_parser("galois1", help="refinement/contraction adjunction")
    p.add_argument("--code", required=True)
    p.add_argument("abstract")
    p.add_argument("concrete")
    p.set_defaults(handler=_check_galois_refinement)

    p = checks.add_parser("galois2", help="contraction/concretization adjunction")
    p.add_argument("--code", required=True)
    p.add_argument("--rel", default="identity", choices=["identity", "same-input"])
    p.add_argument("concrete")
    p.add_argument("abstract")
    p.set_defaults(handler=_check_galois_concretization)

    p = checks.add_parser("insertion")
    p.add_argument("--code", required=True)
    p.add_argument("--rel", default="identity", choices=["identity", "same-input"])
    p.add_argument("abstract")
    p.set_defaults(handler=_check_insertion)

    p = checks.add_parser("compose-alpha")
    p.add_argument("inner")
    p.add_argument("outer")
    p.add_argument("machine")
    p.set_defaults(handler=_check_compose_alpha)

    p = checks.add_parser("compose-rho")
    p.add_argument("inner")
    p.add_argument("outer")
    p.add_argument("machine")
    p.set_defaults(handler=_check_compose_rho)

    p = checks.add_parser("gamma-noncompose")
    p.add_argument("inner")
    p.add_argument("outer")
    p.add_argument("machine")
    p.set_defaults(handler=_check_gamma_noncompose)

    p = checks.add_parser("adaptor-theorem")
    p.add_argument("--code", required=True)
    p.add_argument("machine")
    p.set_defaults(handler=_check_adaptor_theorem)

    p = sub.add_parser("adaptor", help="run an adaptor in front of a SUT")
    p.add_argument("--code", required=True)
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--sut-file", help="in-process SUT from a Mealy document")
    group.add_argument("--sut-exec", help="spawn a SUT process speaking the line protocol")
    group.add_argument("--sut-tcp", help="connect to HOST:PORT speaking the line protocol")
    p.add_argument("--seed", type=int, default=0, help="output choice seed (in-process)")
    p.add_argument("--script", help="file of scripted SUT outputs (in-process)")
    p.add_argument("--inputs", help="abstract inputs, one per line (default stdin)")
    p.add_argument("--timeout", type=float, default=5.0)
    p.set_defaults(handler=_cmd_adaptor)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except NotWinning as exc:
        print(f"ERROR NotWinning {exc.abstract_input}", file=sys.stderr)
        return EXIT_NOT_WINNING
    except CodeIncomplete as exc:
        print(
            f"ERROR CodeIncomplete node={exc.node} input={exc.concrete_input} "
            f"output={exc.observed_output}",
            file=sys.stderr,
        )
        return EXIT_CODE_INCOMPLETE
    except NotDeterminate as exc:
        w = exc.witness
        print(
            f"ERROR NotDeterminate node={w[0]} input={w[1]} first={w[2]} second={w[3]}",
            file=sys.stderr,
        )
        return EXIT_BAD_INPUT
    except (DocumentError, ActionCodesError, ValueError) as exc:
        print(f"ERROR {type(exc).__name__} {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
