"""
JSON documents: a versioned envelope around one payload.

    {"format_version": "1",
     "chart": {"dim": N, "names": [...], "jet": {"n": n, "m": m} | null},
     "payload_kind": "distribution" | "pfaffian" | "diffeo_pair" | "word" | "verdict" | "flag_report",
     "payload": {...}}

Rationals are strings ``"p/q"``; a polynomial is a list of
``[coefficient, exponent-vector]`` pairs in descending graded-lex order.
"""
from __future__ import annotations

import json
import re
from typing import Any

from .errors import InputError
from .exterior import Chart, DiffeoPair, Distribution, OneForm, PfaffianSystem, VectorField
from .jets import JetSpec, ProlongationLetter, ProlongationWord
from .poly import Polynomial, as_rational

__all__ = [
    "FORMAT_VERSION",
    "PAYLOAD_KINDS",
    "chart_from_json",
    "chart_to_json",
    "dumps",
    "envelope",
    "load_document",
    "parse_document",
    "poly_from_json",
    "poly_to_json",
    "rational_to_json",
]

FORMAT_VERSION = "1"
PAYLOAD_KINDS = ("distribution", "pfaffian", "diffeo_pair", "word", "verdict", "flag_report")


def rational_to_json(q) -> str:
    q = as_rational(q)
    return f"{q.numerator}/{q.denominator}"


def rational_from_json(s) -> Any:
    if isinstance(s, bool) or not isinstance(s, (str, int)):
        raise InputError(f"rational expected as a 'p/q' string, got {s!r}")
    try:
        return as_rational(s)
    except (ValueError, ZeroDivisionError):
        raise InputError(f"bad rational {s!r}") from None


def poly_to_json(p: Polynomial) -> list:
    return [[rational_to_json(c), list(e)] for e, c in p.terms()]


def poly_from_json(data, nvars: int) -> Polynomial:
    if not isinstance(data, list):
        raise InputError("polynomial must be a list of [coefficient, exponents] pairs")
    terms = {}
    for item in data:
        if not (isinstance(item, list) and len(item) == 2 and isinstance(item[1], list)):
            raise InputError(f"bad polynomial term {item!r}")
        exps = item[1]
        if len(exps) != nvars or not all(isinstance(e, int) and not isinstance(e, bool) and e >= 0
                                         for e in exps):
            raise InputError(f"exponent vector {exps!r} does not match chart dimension {nvars}")
        key = tuple(exps)
        if key in terms:
            raise InputError(f"repeated monomial {exps!r}")
        terms[key] = rational_from_json(item[0])
    return Polynomial(nvars, terms)


def chart_to_json(chart: Chart) -> dict:
    jet = None if chart.jet is None else {"n": chart.jet[0], "m": chart.jet[1]}
    return {"dim": chart.dim, "names": list(chart.names), "jet": jet}


def chart_from_json(data) -> Chart:
    if not isinstance(data, dict) or "names" not in data:
        raise InputError("chart must be an object with 'names'")
    names = data["names"]
    if not isinstance(names, list) or not all(isinstance(s, str) for s in names):
        raise InputError("chart names must be a list of strings")
    if "dim" in data and data["dim"] != len(names):
        raise InputError(f"chart dim {data['dim']} does not match {len(names)} names")
    jet = data.get("jet")
    if jet is not None:
        try:
            jet = (int(jet["n"]), int(jet["m"]))
        except (KeyError, TypeError, ValueError):
            raise InputError("chart jet must be {'n': int, 'm': int}") from None
    return Chart(tuple(names), jet)


def envelope(chart: Chart | None, kind: str, payload: dict) -> dict:
    if kind not in PAYLOAD_KINDS:
        raise ValueError(f"unknown payload kind {kind!r}")
    return {"format_version": FORMAT_VERSION,
            "chart": None if chart is None else chart_to_json(chart),
            "payload_kind": kind,
            "payload": payload}


_SCALAR_ARRAY = re.compile(r"\[\s*((?:(?:\"[^\"]*\"|-?[\w./]+)\s*,\s*)*(?:\"[^\"]*\"|-?[\w./]+))\s*\]")


_TERM = re.compile(r'\[\s*("[^"]*"),\s*(\[[^\[\]]*\])\s*\]')


def dumps(doc: dict) -> str:
    """Indented JSON with arrays of scalars kept on one line."""
    text = json.dumps(doc, indent=2, ensure_ascii=False)
    text = _SCALAR_ARRAY.sub(lambda mt: "[" + re.sub(r",\s+", ", ", mt.group(1)) + "]", text)
    text = _TERM.sub(r'[\1, \2]', text)
    return text + "\n"


# -- payloads ----------------------------------------------------------------------

def fields_to_json(fields) -> list:
    return [[poly_to_json(c) for c in f.components] for f in fields]


def distribution_document(D: Distribution) -> dict:
    payload = {"generators": fields_to_json(D.generators)}
    return envelope(D.chart, "distribution", payload)


def pfaffian_document(I: PfaffianSystem) -> dict:
    return envelope(I.chart, "pfaffian", {"generators": fields_to_json(I.generators)})


def diffeo_document(pair: DiffeoPair) -> dict:
    return envelope(pair.chart, "diffeo_pair", {
        "forward": [poly_to_json(p) for p in pair.forward],
        "backward": [poly_to_json(p) for p in pair.backward],
        "base_point": [rational_to_json(v) for v in pair.base_point],
    })


def word_to_json(word: ProlongationWord) -> dict:
    return {"spec": {"n": word.spec.n, "m": word.spec.m},
            "letters": [{"kind": l.kind, "c": [rational_to_json(v) for v in l.c]} for l in word.letters],
            "text": str(word)}


def word_from_json(data) -> ProlongationWord:
    try:
        spec = JetSpec(int(data["spec"]["n"]), int(data["spec"]["m"]))
        letters = tuple(ProlongationLetter(l["kind"], tuple(rational_from_json(v) for v in l["c"]))
                        for l in data["letters"])
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed word payload: {exc}") from None
    return ProlongationWord(spec, letters)


def _field_list(data, chart: Chart, cls):
    if not isinstance(data, dict) or not isinstance(data.get("generators"), list):
        raise InputError("payload must contain a 'generators' list")
    out = []
    for k, g in enumerate(data["generators"]):
        if not isinstance(g, list) or len(g) != chart.dim:
            raise InputError(f"generator {k} must have {chart.dim} components")
        out.append(cls(chart, [poly_from_json(c, chart.dim) for c in g]))
    return out


def parse_document(doc) -> tuple[str, Any]:
    """Validate an envelope and build the in-memory object it describes."""
    if not isinstance(doc, dict):
        raise InputError("document must be a JSON object")
    if doc.get("format_version") != FORMAT_VERSION:
        raise InputError(f"unsupported format_version {doc.get('format_version')!r}")
    kind = doc.get("payload_kind")
    if kind not in PAYLOAD_KINDS:
        raise InputError(f"unknown payload_kind {kind!r}")
    payload = doc.get("payload")
    if kind == "word":
        return kind, word_from_json(payload)
    chart = chart_from_json(doc.get("chart"))
    if kind == "distribution":
        return kind, Distribution(chart, _field_list(payload, chart, VectorField))
    if kind == "pfaffian":
        return kind, PfaffianSystem(chart, _field_list(payload, chart, OneForm))
    if kind == "diffeo_pair":
        try:
            fwd = [poly_from_json(p, chart.dim) for p in payload["forward"]]
            bwd = [poly_from_json(p, chart.dim) for p in payload["backward"]]
            base = [rational_from_json(v) for v in payload.get("base_point", ["0"] * chart.dim)]
        except (KeyError, TypeError):
            raise InputError("diffeo_pair payload needs 'forward' and 'backward'") from None
        return kind, DiffeoPair(chart, fwd, bwd, base)
    return kind, payload


def load_document(path: str) -> tuple[str, Any]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc.msg} at line {exc.lineno}") from None
    return parse_document(doc)
