"""Shared helpers: brute-force oracles and instance construction."""

from __future__ import annotations

import itertools
import random
from pathlib import Path

import pytest

from actioncodes.codes import CodeTree
from actioncodes.lts import Label, Lts

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


# -- brute-force oracles -----------------------------------------------------


def brute_force_simulated(m: Lts, n: Lts) -> bool:
    """Enumerate every relation over the reachable parts that contains the
    initial pair and check the transfer property directly."""
    reach_m = sorted(m.reachable())
    reach_n = sorted(n.reachable())
    pairs = [(q, p) for q in reach_m for p in reach_n]
    initial = (m.initial, n.initial)
    rest = [pr for pr in pairs if pr != initial]
    for bits in itertools.product((False, True), repeat=len(rest)):
        relation = {initial} | {pr for pr, bit in zip(rest, bits) if bit}
        if _is_sim_closed(m, n, relation):
            return True
    return False


def _is_sim_closed(m: Lts, n: Lts, relation: set[tuple[str, str]]) -> bool:
    for q, p in relation:
        for a, q2 in m.out(q):
            if not any((q2, p2) in relation for p2 in n.succ(p, a)):
                return False
    return True


def brute_force_delay_simulated(m: Lts, n: Lts, tau: Label) -> bool:
    """Relation enumeration against the delay transfer property."""
    reach_m = sorted(m.reachable())
    reach_n = sorted(n.reachable())

    def closure(p):
        seen = {p}
        todo = [p]
        while todo:
            r = todo.pop()
            for dst in n.succ(r, tau):
                if dst not in seen:
                    seen.add(dst)
                    todo.append(dst)
        return seen

    clo = {p: closure(p) for p in reach_n}
    pairs = [(q, p) for q in reach_m for p in reach_n]
    initial = (m.initial, n.initial)
    rest = [pr for pr in pairs if pr != initial]
    for bits in itertools.product((False, True), repeat=len(rest)):
        relation = {initial} | {pr for pr, bit in zip(rest, bits) if bit}
        ok = True
        for q, p in relation:
            for a, q2 in m.out(q):
                if a == tau:
                    matched = any((q2, p2) in relation for p2 in clo[p])
                else:
                    matched = any(
                        (q2, p2) in relation
                        for p1 in clo[p]
                        for p2 in n.succ(p1, a)
                    )
                if not matched:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def observable_traces(m: Lts, k: int, tau: Label) -> set[tuple[Label, ...]]:
    """Traces of visible labels up to length k, absorbing hidden moves."""

    def closure(states):
        seen = set(states)
        todo = list(states)
        while todo:
            q = todo.pop()
            for dst in m.succ(q, tau):
                if dst not in seen:
                    seen.add(dst)
                    todo.append(dst)
        return frozenset(seen)

    result: set[tuple[Label, ...]] = {()}
    frontier = {(): closure({m.initial})}
    for _ in range(k):
        advanced = {}
        for word, states in frontier.items():
            by_label: dict[Label, set[str]] = {}
            for q in states:
                for a, dst in m.out(q):
                    if a != tau:
                        by_label.setdefault(a, set()).add(dst)
            for a, targets in by_label.items():
                advanced[word + (a,)] = closure(targets)
        if not advanced:
            break
        result.update(advanced)
        frontier = advanced
    return result


def brute_force_isomorphic(m: Lts, n: Lts) -> bool:
    """Try every bijection between the reachable parts."""
    reach_m = sorted(m.reachable())
    reach_n = sorted(n.reachable())
    if len(reach_m) != len(reach_n):
        return False
    labels = sorted(m.alphabet | n.alphabet, key=str)
    for image in itertools.permutations(reach_n):
        mapping = dict(zip(reach_m, image))
        if mapping[m.initial] != n.initial:
            continue
        ok = True
        for q in reach_m:
            for a in labels:
                if {mapping[d] for d in m.succ(q, a) if d in mapping} != set(
                    n.succ(mapping[q], a)
                ):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return True
    return False


def brute_force_winning(tree: CodeTree, node: str, abstract_input: str) -> bool:
    """Direct recursive reading of the winning definition."""
    labels = dict(tree.leaf_labels)
    edges = tree.tree.out(node)
    if not edges:
        return node in labels and labels[node].symbol == abstract_input
    by_input: dict[str, list[str]] = {}
    for a, dst in edges:
        by_input.setdefault(a.symbol, []).append(dst)
    return any(
        all(brute_force_winning(tree, child, abstract_input) for child in children)
        for children in by_input.values()
    )


# -- instance construction ----------------------------------------------------


def all_small_machines(states: int, labels: int) -> list[Lts]:
    """Every machine with the given state and label count (all transition sets)."""
    alphabet = [Label(s) for s in "ab"[:labels]]
    ids = [f"q{k}" for k in range(states)]
    slots = [(q, a, p) for q in ids for a in alphabet for p in ids]
    machines = []
    for bits in itertools.product((False, True), repeat=len(slots)):
        chosen = [t for t, bit in zip(slots, bits) if bit]
        machines.append(Lts(ids, ids[0], chosen, alphabet))
    return machines


def sub_machine(rng: random.Random, m: Lts, keep: float = 0.6) -> Lts:
    """Drop transitions at random; the result is simulated by the original."""
    kept = [t for t in sorted(m.transitions, key=str) if rng.random() < keep]
    return Lts(m.states, m.initial, kept, m.alphabet)


def add_noise(rng: random.Random, m: Lts, extra: int = 2) -> Lts:
    """Add random transitions; the result simulates the original."""
    states = list(m.states)
    alphabet = sorted(m.alphabet, key=str)
    added = list(m.transitions)
    for _ in range(extra):
        added.append((rng.choice(states), rng.choice(alphabet), rng.choice(states)))
    return Lts(m.states, m.initial, added, m.alphabet)


def relabel(m: Lts, prefix: str = "s") -> Lts:
    """An isomorphic copy with fresh state names."""
    mapping = {q: f"{prefix}{k}" for k, q in enumerate(m.states)}
    return Lts(
        [mapping[q] for q in m.states],
        mapping[m.initial],
        [(mapping[a], lab, mapping[b]) for a, lab, b in m.transitions],
        m.alphabet,
    )


@pytest.fixture
def rng():
    return random.Random(20260810)
