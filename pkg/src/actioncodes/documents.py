"""Canonical JSON documents for machines and codes.

One schema-versioned JSON family covers plain systems, Mealy machines, and
codes.  Serialization is canonical: alphabets, states, transitions, and code
entries are sorted lexicographically and the key order is fixed, so
serialize-parse round-trips are byte-identical on canonical input and
serializing a parsed document is idempotent.
"""

from __future__ import annotations

import json
from typing import Any

from .codes import CodeMap, CodeTree
from .lts import Label, Lts, Word

__all__ = [
    "LTS_SCHEMA",
    "CODE_SCHEMA",
    "TREE_SCHEMA",
    "DocumentError",
    "lts_to_document",
    "lts_from_document",
    "code_to_document",
    "code_from_document",
    "tree_to_document",
    "tree_from_document",
    "dumps",
    "loads",
]

LTS_SCHEMA = "actioncodes/lts-v1"
CODE_SCHEMA = "actioncodes/code-v1"
TREE_SCHEMA = "actioncodes/tree-v1"


class DocumentError(ValueError):
    """A document does not parse into a well-formed value."""


def _labels_sorted(labels) -> list[str]:
    return sorted(str(a) for a in labels)


def lts_to_document(m: Lts) -> dict[str, Any]:
    kind = "mealy" if m.is_mealy else "lts"
    return {
        "schema": LTS_SCHEMA,
        "kind": kind,
        "alphabet": _labels_sorted(m.alphabet),
        "states": sorted(m.states),
        "initial": m.initial,
        "transitions": sorted([src, str(a), dst] for src, a, dst in m.transitions),
    }


def _expect(doc: dict, key: str, schema: str):
    if key not in doc:
        raise DocumentError(f"{schema} document is missing the {key!r} field")
    return doc[key]


def lts_from_document(doc: dict[str, Any]) -> Lts:
    if _expect(doc, "schema", "lts") != LTS_SCHEMA:
        raise DocumentError(f"unsupported schema {doc.get('schema')!r}")
    kind = _expect(doc, "kind", "lts")
    if kind not in ("lts", "mealy"):
        raise DocumentError(f"unknown kind {kind!r}")
    try:
        alphabet = [Label.parse(t) for t in _expect(doc, "alphabet", "lts")]
        transitions = [
            (src, Label.parse(t), dst)
            for src, t, dst in _expect(doc, "transitions", "lts")
        ]
        m = Lts(
            _expect(doc, "states", "lts"),
            _expect(doc, "initial", "lts"),
            transitions,
            alphabet,
        )
    except (ValueError, TypeError) as exc:
        raise DocumentError(str(exc)) from exc
    if alphabet and m.is_mealy != (kind == "mealy"):
        raise DocumentError(f"kind {kind!r} does not match the labels")
    return m


def code_to_document(code: CodeMap) -> dict[str, Any]:
    return {
        "schema": CODE_SCHEMA,
        "source_alphabet": _labels_sorted(code.source),
        "target_alphabet": _labels_sorted(code.target),
        "entries": sorted(
            [str(b), [str(a) for a in w]] for b, w in code.entries
        ),
    }


def code_from_document(doc: dict[str, Any]) -> CodeMap:
    if _expect(doc, "schema", "code") != CODE_SCHEMA:
        raise DocumentError(f"unsupported schema {doc.get('schema')!r}")
    try:
        source = [Label.parse(t) for t in _expect(doc, "source_alphabet", "code")]
        target = [Label.parse(t) for t in _expect(doc, "target_alphabet", "code")]
        entries: list[tuple[Label, Word]] = [
            (Label.parse(b), tuple(Label.parse(a) for a in w))
            for b, w in _expect(doc, "entries", "code")
        ]
        return CodeMap(source, target, entries)
    except (ValueError, TypeError) as exc:
        if isinstance(exc, DocumentError):
            raise
        raise DocumentError(str(exc)) from exc


def tree_to_document(tree: CodeTree) -> dict[str, Any]:
    return {
        "schema": TREE_SCHEMA,
        "abstract_alphabet": _labels_sorted(tree.abstract),
        "leaf_labels": sorted([leaf, str(lab)] for leaf, lab in tree.leaf_labels),
        "tree": lts_to_document(tree.tree),
    }


def tree_from_document(doc: dict[str, Any]) -> CodeTree:
    if _expect(doc, "schema", "tree") != TREE_SCHEMA:
        raise DocumentError(f"unsupported schema {doc.get('schema')!r}")
    try:
        carrier = lts_from_document(_expect(doc, "tree", "tree"))
        abstract = [Label.parse(t) for t in _expect(doc, "abstract_alphabet", "tree")]
        leaf_labels = [
            (leaf, Label.parse(t)) for leaf, t in _expect(doc, "leaf_labels", "tree")
        ]
        return CodeTree(carrier, leaf_labels, abstract)
    except (ValueError, TypeError) as exc:
        if isinstance(exc, DocumentError):
            raise
        raise DocumentError(str(exc)) from exc


_KEY_ORDER = {
    LTS_SCHEMA: ["schema", "kind", "alphabet", "states", "initial", "transitions"],
    CODE_SCHEMA: ["schema", "source_alphabet", "target_alphabet", "entries"],
    TREE_SCHEMA: ["schema", "abstract_alphabet", "leaf_labels", "tree"],
}


def dumps(doc: dict[str, Any]) -> str:
    """Serialize a document with a fixed key order and a trailing newline."""
    schema = doc.get("schema")
    order = _KEY_ORDER.get(schema)
    if order is None:
        raise DocumentError(f"cannot serialize unknown schema {schema!r}")
    missing = [k for k in order if k not in doc]
    extra = [k for k in doc if k not in order]
    if missing or extra:
        raise DocumentError(f"bad document shape (missing {missing}, extra {extra})")
    ordered = {k: doc[k] for k in order}
    return json.dumps(ordered, indent=2, ensure_ascii=False) + "\n"


def loads(text: str) -> dict[str, Any]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError("top-level JSON value must be an object")
    return doc
