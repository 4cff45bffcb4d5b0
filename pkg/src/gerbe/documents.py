"""Canonical document serialization for every object the tools exchange.

A document is one JSON object with exactly three fields: ``kind``,
``version`` and ``payload``.  Serialization is canonical (sorted keys,
two-space indentation, trailing newline) so equal values produce
byte-identical files.  Tuple-indexed cocycle components are flattened to
blocks mapping comma-joined indices to element indices.

Structure references inside a payload are either inline sub-documents or
strings naming another document file; :func:`load` resolves path strings
relative to the referring file.  :func:`to_document` always embeds
inline, which keeps exported artifacts hermetic.

Class tables are export-only documents: they capture counts,
representatives and the optional product table, but reconstructing a
queryable table requires re-running the classification.
"""

from __future__ import annotations

import json
import os

import numpy as np

from .classify import ClassTable
from .cocycles import (
    AbelianObstruction,
    Bundle1Cocycle,
    Coboundary1,
    Coboundary2,
    Coboundary3,
    Gerbe2Cocycle,
    TcmCoboundary2,
    TcmGerbe2Cocycle,
    TwoGerbe3Cocycle,
)
from .crossed import (
    CrossedModule,
    CrossedModuleMorphism,
    TwoCrossedModule,
    TwoCrossedModuleMorphism,
    cm_morphism_verify,
    tcm_morphism_verify,
)
from .groups import FiniteGroup, GroupAction, GroupHom
from .lifting import ExtensionContext, LiftContext, TwistContext
from .nerves import Nerve, NerveMap, nerve_map_verify
from .report import StructuralError, UnsupportedOperation

DOCUMENT_VERSION = 1

KNOWN_KINDS = (
    "group",
    "nerve",
    "nerve-map",
    "crossed-module",
    "two-crossed-module",
    "crossed-module-morphism",
    "two-crossed-module-morphism",
    "cocycle",
    "coboundary",
    "obstruction",
    "class-table",
    "context",
)

__all__ = [
    "DOCUMENT_VERSION",
    "KNOWN_KINDS",
    "Document",
    "parse",
    "serialize",
    "to_document",
    "from_document",
    "load",
    "save",
]


class Document:
    """A parsed document: a kind tag, a format version and a JSON payload."""

    def __init__(self, kind: str, payload: dict, version: int = DOCUMENT_VERSION):
        self.kind = kind
        self.version = version
        self.payload = payload

    def __eq__(self, other):
        return (
            isinstance(other, Document)
            and (self.kind, self.version, self.payload)
            == (other.kind, other.version, other.payload)
        )

    def __repr__(self):
        return f"<Document kind={self.kind!r} version={self.version}>"


def parse(data) -> Document:
    """Parse document bytes (or text); errors carry line and column."""
    if isinstance(data, bytes):
        try:
            data = data.decode("utf-8")
        except UnicodeDecodeError as err:
            raise StructuralError(f"document is not valid UTF-8: {err}") from None
    try:
        raw = json.loads(data)
    except json.JSONDecodeError as err:
        raise StructuralError(
            f"parse error at line {err.lineno} column {err.colno}: {err.msg}"
        ) from None
    if not isinstance(raw, dict):
        raise StructuralError("document must be a single top-level object")
    extra = sorted(set(raw) - {"kind", "version", "payload"})
    missing = sorted({"kind", "version", "payload"} - set(raw))
    if missing:
        raise StructuralError(f"document is missing fields: {', '.join(missing)}")
    if extra:
        raise StructuralError(f"document has unknown fields: {', '.join(extra)}")
    kind, version, payload = raw["kind"], raw["version"], raw["payload"]
    if kind not in KNOWN_KINDS:
        raise StructuralError(f"unknown document kind {kind!r}")
    if version != DOCUMENT_VERSION:
        raise StructuralError(
            f"unsupported document version {version!r} (expected {DOCUMENT_VERSION})"
        )
    if not isinstance(payload, dict):
        raise StructuralError("document payload must be an object")
    return Document(kind, payload, version)


def serialize(doc: Document) -> bytes:
    """Canonical bytes for a document: sorted keys, indent 2, one trailing
    newline."""
    if not isinstance(doc, Document):
        raise StructuralError("serialize: expected a Document")
    if doc.kind not in KNOWN_KINDS:
        raise StructuralError(f"unknown document kind {doc.kind!r}")
    body = {"kind": doc.kind, "version": doc.version, "payload": doc.payload}
    return (json.dumps(body, sort_keys=True, indent=2) + "\n").encode("utf-8")


# -- encoding -----------------------------------------------------------------------


def _int_rows(matrix) -> list[list[int]]:
    return [[int(x) for x in row] for row in np.asarray(matrix)]


def _int_row(vector) -> list[int]:
    return [int(x) for x in np.asarray(vector)]


def _embed(obj) -> dict:
    d = to_document(obj)
    return {"kind": d.kind, "version": d.version, "payload": d.payload}


def _group_payload(g: FiniteGroup) -> dict:
    payload = {"order": g.order, "table": _int_rows(g.table)}
    if g.labels != [str(i) for i in range(g.order)]:
        payload["labels"] = list(g.labels)
    return payload


def _nerve_payload(n: Nerve) -> dict:
    n.ensure_valid()
    return {
        "indexCount": n.index_count,
        "maximal": [list(s) for s in n.maximal_simplices()],
    }


def _block(component: dict) -> dict:
    return {",".join(str(i) for i in t): int(v) for t, v in component.items()}


def _cm_payload(cm: CrossedModule) -> dict:
    return {
        "L": _embed(cm.L),
        "M": _embed(cm.M),
        "d1": _int_row(cm.d1.mapping),
        "actM": _int_rows(cm.actM.act),
    }


def _tcm_payload(t: TwoCrossedModule) -> dict:
    return {
        "L": _embed(t.L),
        "M": _embed(t.M),
        "N": _embed(t.N),
        "d1": _int_row(t.d1.mapping),
        "d2": _int_row(t.d2.mapping),
        "actNM": _int_rows(t.actNM.act),
        "actNL": _int_rows(t.actNL.act),
        "peiffer": _int_rows(t.peiffer),
    }


def _cocycle_payload(c) -> dict:
    payload = {
        "level": c.level,
        "structure": _embed(c.structure),
        "nerve": _embed(c.nerve),
    }
    for name, _ in c.components:
        payload[name] = _block(getattr(c, name))
    return payload


def _coboundary_payload(w, names) -> dict:
    payload = {
        "level": w.level,
        "structure": _embed(w.structure),
        "nerve": _embed(w.nerve),
    }
    for name in names:
        payload[name] = _block(getattr(w, name))
    return payload


def _class_table_payload(t: ClassTable) -> dict:
    payload = {
        "level": t.level,
        "structure": _embed(t.structure),
        "nerve": _embed(t.nerve),
        "classCount": t.class_count,
        "cocycleCount": t.cocycle_count,
        "classSizes": [int(s) for s in t.class_sizes],
        "representatives": [_embed(r) for r in t.representatives],
    }
    if t.product_table is not None:
        payload["productTable"] = [[int(x) for x in row] for row in t.product_table]
    return payload


def _int_key_map(mapping: dict) -> dict:
    return {str(int(k)): int(v) for k, v in mapping.items()}


_ENCODERS = {}


def _encoder(tp):
    def register(fn):
        _ENCODERS[tp] = fn
        return fn

    return register


@_encoder(FiniteGroup)
def _enc_group(g):
    return Document("group", _group_payload(g))


@_encoder(Nerve)
def _enc_nerve(n):
    return Document("nerve", _nerve_payload(n))


@_encoder(NerveMap)
def _enc_nerve_map(f):
    return Document(
        "nerve-map",
        {
            "source": _embed(f.source),
            "target": _embed(f.target),
            "vertexMap": list(f.vertex_map),
        },
    )


@_encoder(CrossedModule)
def _enc_cm(cm):
    return Document("crossed-module", _cm_payload(cm))


@_encoder(TwoCrossedModule)
def _enc_tcm(t):
    return Document("two-crossed-module", _tcm_payload(t))


@_encoder(CrossedModuleMorphism)
def _enc_cm_morphism(f):
    return Document(
        "crossed-module-morphism",
        {
            "source": _embed(f.source),
            "target": _embed(f.target),
            "lam": _int_row(f.lam.mapping),
            "kap": _int_row(f.kap.mapping),
        },
    )


@_encoder(TwoCrossedModuleMorphism)
def _enc_tcm_morphism(f):
    return Document(
        "two-crossed-module-morphism",
        {
            "source": _embed(f.source),
            "target": _embed(f.target),
            "lam": _int_row(f.lam.mapping),
            "mu": _int_row(f.mu.mapping),
            "nu": _int_row(f.nu.mapping),
        },
    )


for _cls in (Bundle1Cocycle, Gerbe2Cocycle, TcmGerbe2Cocycle, TwoGerbe3Cocycle):
    _ENCODERS[_cls] = lambda c: Document("cocycle", _cocycle_payload(c))


@_encoder(AbelianObstruction)
def _enc_obstruction(o):
    return Document(
        "obstruction",
        {
            "group": _embed(o.abelian_group),
            "nerve": _embed(o.nerve),
            "a": _block(o.a),
        },
    )


@_encoder(Coboundary1)
def _enc_cob1(w):
    return Document("coboundary", _coboundary_payload(w, ("l",)))


@_encoder(Coboundary2)
def _enc_cob2(w):
    return Document("coboundary", _coboundary_payload(w, ("m", "l")))


@_encoder(TcmCoboundary2)
def _enc_tcm_cob2(w):
    return Document("coboundary", _coboundary_payload(w, ("m", "l")))


@_encoder(Coboundary3)
def _enc_cob3(w):
    return Document("coboundary", _coboundary_payload(w, ("b",)))


@_encoder(ClassTable)
def _enc_class_table(t):
    return Document("class-table", _class_table_payload(t))


@_encoder(LiftContext)
def _enc_lift_context(ctx):
    return Document(
        "context",
        {
            "variant": "lift",
            "structure": _embed(ctx.cm),
            "sections": {"pi1": _int_row(ctx.section_pi1)},
        },
    )


@_encoder(ExtensionContext)
def _enc_extension_context(ctx):
    return Document(
        "context",
        {
            "variant": "extension",
            "structure": _embed(ctx.tcm),
            "sections": {
                "pi1": _int_row(ctx.section_pi1),
                "pi2": _int_row(ctx.section_pi2),
                "d2": _int_key_map(ctx.section_d2),
            },
        },
    )


@_encoder(TwistContext)
def _enc_twist_context(ctx):
    return Document(
        "context",
        {
            "variant": "twist",
            "structure": _embed(ctx.cm),
            "sections": {
                "pi2": _int_row(ctx.section_pi2),
                "delta": _int_key_map(ctx.section_delta),
            },
        },
    )


def to_document(obj) -> Document:
    """Encode a supported in-memory value as a document."""
    encoder = _ENCODERS.get(type(obj))
    if encoder is None:
        raise StructuralError(f"no document encoding for {type(obj).__name__}")
    return encoder(obj)


# -- decoding -----------------------------------------------------------------------


def _field(payload: dict, name: str, kinds, what: str):
    if name not in payload:
        raise StructuralError(f"{what}: missing field {name!r}")
    value = payload[name]
    expected = kinds if isinstance(kinds, tuple) else (kinds,)
    if not isinstance(value, expected):
        raise StructuralError(f"{what}: field {name!r} has the wrong type")
    return value


def _resolve(ref, base_dir, kinds: tuple[str, ...], what: str):
    """An inline sub-document or a path string, decoded to an object."""
    if isinstance(ref, str):
        if base_dir is None:
            raise StructuralError(
                f"{what}: path reference {ref!r} needs a base directory (use load)"
            )
        return _load_kinds(os.path.join(base_dir, ref), kinds, base_dir_required=what)
    if isinstance(ref, dict):
        doc = parse(json.dumps(ref))
        if doc.kind not in kinds:
            raise StructuralError(
                f"{what}: embedded document has kind {doc.kind!r}, "
                f"expected one of {', '.join(kinds)}"
            )
        return from_document(doc, base_dir=base_dir)
    raise StructuralError(f"{what}: expected an inline document or a path string")


def _load_kinds(path, kinds, base_dir_required):
    obj_doc = parse(_read(path))
    if obj_doc.kind not in kinds:
        raise StructuralError(
            f"{base_dir_required}: file {path!r} has kind {obj_doc.kind!r}, "
            f"expected one of {', '.join(kinds)}"
        )
    return from_document(obj_doc, base_dir=os.path.dirname(path) or ".")


def _read(path) -> bytes:
    try:
        with open(path, "rb") as fh:
            return fh.read()
    except OSError as err:
        raise StructuralError(f"cannot read document {path!r}: {err}") from None


def _as_int_array(value, what: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=np.int64)
    except (TypeError, ValueError, OverflowError):
        raise StructuralError(f"{what}: expected a rectangular integer array") from None
    return arr


def _dec_group(payload, base_dir):
    order = _field(payload, "order", int, "group document")
    table = _field(payload, "table", list, "group document")
    labels = payload.get("labels")
    g = FiniteGroup(_as_int_array(table, "group document"), labels)
    if g.order != order:
        raise StructuralError(
            f"group document: order field {order} does not match the table"
        )
    return g


def _dec_nerve(payload, base_dir):
    count = _field(payload, "indexCount", int, "nerve document")
    maximal = _field(payload, "maximal", list, "nerve document")
    return Nerve.from_maximal(count, maximal).ensure_valid()


def _dec_nerve_map(payload, base_dir):
    source = _resolve(payload.get("source"), base_dir, ("nerve",), "nerve map document")
    target = _resolve(payload.get("target"), base_dir, ("nerve",), "nerve map document")
    vm = _field(payload, "vertexMap", list, "nerve map document")
    f = NerveMap(source, target, vm)
    nerve_map_verify(f).require_valid()
    return f


def _dec_cm(payload, base_dir):
    L = _resolve(payload.get("L"), base_dir, ("group",), "crossed module document")
    M = _resolve(payload.get("M"), base_dir, ("group",), "crossed module document")
    what = "crossed module document"
    d1 = _as_int_array(_field(payload, "d1", list, what), what)
    act = _as_int_array(_field(payload, "actM", list, what), what)
    cm = CrossedModule(L, M, GroupHom(L, M, d1), GroupAction(M, L, act))
    return cm.ensure_valid()


def _dec_tcm(payload, base_dir):
    what = "two-crossed module document"
    L = _resolve(payload.get("L"), base_dir, ("group",), what)
    M = _resolve(payload.get("M"), base_dir, ("group",), what)
    N = _resolve(payload.get("N"), base_dir, ("group",), what)
    t = TwoCrossedModule(
        L,
        M,
        N,
        GroupHom(L, M, _as_int_array(_field(payload, "d1", list, what), what)),
        GroupHom(M, N, _as_int_array(_field(payload, "d2", list, what), what)),
        GroupAction(N, M, _as_int_array(_field(payload, "actNM", list, what), what)),
        GroupAction(N, L, _as_int_array(_field(payload, "actNL", list, what), what)),
        _as_int_array(_field(payload, "peiffer", list, what), what),
    )
    return t.ensure_valid()


def _dec_cm_morphism(payload, base_dir):
    what = "crossed module morphism document"
    source = _resolve(payload.get("source"), base_dir, ("crossed-module",), what)
    target = _resolve(payload.get("target"), base_dir, ("crossed-module",), what)
    f = CrossedModuleMorphism(
        source,
        target,
        GroupHom(source.L, target.L, _as_int_array(_field(payload, "lam", list, what), what)),
        GroupHom(source.M, target.M, _as_int_array(_field(payload, "kap", list, what), what)),
    )
    cm_morphism_verify(f).require_valid()
    return f


def _dec_tcm_morphism(payload, base_dir):
    what = "two-crossed module morphism document"
    source = _resolve(payload.get("source"), base_dir, ("two-crossed-module",), what)
    target = _resolve(payload.get("target"), base_dir, ("two-crossed-module",), what)
    f = TwoCrossedModuleMorphism(
        source,
        target,
        GroupHom(source.L, target.L, _as_int_array(_field(payload, "lam", list, what), what)),
        GroupHom(source.M, target.M, _as_int_array(_field(payload, "mu", list, what), what)),
        GroupHom(source.N, target.N, _as_int_array(_field(payload, "nu", list, what), what)),
    )
    tcm_morphism_verify(f).require_valid()
    return f


def _parse_block(block, what: str) -> dict:
    if not isinstance(block, dict):
        raise StructuralError(f"{what}: component block must be an object")
    out = {}
    for key, value in block.items():
        try:
            t = tuple(int(piece) for piece in key.split(","))
        except ValueError:
            raise StructuralError(f"{what}: bad tuple key {key!r}") from None
        if not isinstance(value, int):
            raise StructuralError(f"{what}: value at {key!r} must be an integer")
        out[t] = value
    return out


_COCYCLE_LEVELS = {
    "bundle1": (Bundle1Cocycle, ("crossed-module",)),
    "gerbe2": (Gerbe2Cocycle, ("crossed-module",)),
    "tcm-gerbe2": (TcmGerbe2Cocycle, ("two-crossed-module",)),
    "two-gerbe3": (TwoGerbe3Cocycle, ("two-crossed-module",)),
}


def _dec_cocycle(payload, base_dir):
    level = _field(payload, "level", str, "cocycle document")
    entry = _COCYCLE_LEVELS.get(level)
    if entry is None:
        raise StructuralError(f"cocycle document: unknown level {level!r}")
    cls, structure_kinds = entry
    what = f"{level} cocycle document"
    structure = _resolve(payload.get("structure"), base_dir, structure_kinds, what)
    nerve = _resolve(payload.get("nerve"), base_dir, ("nerve",), what)
    blocks = [
        _parse_block(_field(payload, name, dict, what), what)
        for name, _ in cls.components
    ]
    return cls(structure, nerve, *blocks)


_COBOUNDARY_LEVELS = {
    "bundle1": (Coboundary1, ("crossed-module",), ("l",)),
    "gerbe2": (Coboundary2, ("crossed-module",), ("m", "l")),
    "tcm-gerbe2": (TcmCoboundary2, ("two-crossed-module",), ("m", "l")),
    "degree-3": (Coboundary3, ("two-crossed-module", "group"), ("b",)),
}


def _dec_coboundary(payload, base_dir):
    level = _field(payload, "level", str, "coboundary document")
    entry = _COBOUNDARY_LEVELS.get(level)
    if entry is None:
        raise StructuralError(f"coboundary document: unknown level {level!r}")
    cls, structure_kinds, names = entry
    what = f"{level} coboundary document"
    structure = _resolve(payload.get("structure"), base_dir, structure_kinds, what)
    nerve = _resolve(payload.get("nerve"), base_dir, ("nerve",), what)
    blocks = [_parse_block(_field(payload, name, dict, what), what) for name in names]
    return cls(structure, nerve, *blocks)


def _dec_obstruction(payload, base_dir):
    what = "obstruction document"
    group = _resolve(payload.get("group"), base_dir, ("group",), what)
    nerve = _resolve(payload.get("nerve"), base_dir, ("nerve",), what)
    return AbelianObstruction(group, nerve, _parse_block(_field(payload, "a", dict, what), what))


def _dec_context(payload, base_dir):
    variant = _field(payload, "variant", str, "context document")
    sections = _field(payload, "sections", dict, "context document")
    if variant == "lift":
        cm = _resolve(payload.get("structure"), base_dir, ("crossed-module",), "context document")
        return LiftContext(cm, section_pi1=sections.get("pi1"))
    if variant == "extension":
        tcm = _resolve(
            payload.get("structure"), base_dir, ("two-crossed-module",), "context document"
        )
        d2 = sections.get("d2")
        return ExtensionContext(
            tcm,
            section_pi1=sections.get("pi1"),
            section_pi2=sections.get("pi2"),
            section_d2=None if d2 is None else {int(k): v for k, v in d2.items()},
        )
    if variant == "twist":
        cm = _resolve(payload.get("structure"), base_dir, ("crossed-module",), "context document")
        delta = sections.get("delta")
        return TwistContext(
            cm,
            section_pi2=sections.get("pi2"),
            section_delta=None if delta is None else {int(k): v for k, v in delta.items()},
        )
    raise StructuralError(f"context document: unknown variant {variant!r}")


def _dec_class_table(payload, base_dir):
    raise UnsupportedOperation(
        "class-table documents are export-only; re-run the classification to query one"
    )


_DECODERS = {
    "group": _dec_group,
    "nerve": _dec_nerve,
    "nerve-map": _dec_nerve_map,
    "crossed-module": _dec_cm,
    "two-crossed-module": _dec_tcm,
    "crossed-module-morphism": _dec_cm_morphism,
    "two-crossed-module-morphism": _dec_tcm_morphism,
    "cocycle": _dec_cocycle,
    "coboundary": _dec_coboundary,
    "obstruction": _dec_obstruction,
    "context": _dec_context,
    "class-table": _dec_class_table,
}


def from_document(doc: Document, base_dir=None):
    """Decode a document to the in-memory value it describes.

    ``base_dir`` anchors path references; :func:`load` supplies it
    automatically.  Semantic validation runs through the owning module's
    constructors and verifiers.
    """
    if not isinstance(doc, Document):
        raise StructuralError("from_document: expected a Document")
    if doc.kind not in _DECODERS:
        raise StructuralError(f"unknown document kind {doc.kind!r}")
    return _DECODERS[doc.kind](doc.payload, base_dir)


def load(path):
    """Read, parse and decode one document file."""
    doc = parse(_read(path))
    return from_document(doc, base_dir=os.path.dirname(path) or ".")


def save(obj, path) -> bytes:
    """Encode a value and write its canonical bytes; returns the bytes."""
    data = serialize(to_document(obj))
    with open(path, "wb") as fh:
        fh.write(data)
    return data
