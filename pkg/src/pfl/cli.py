"""
Command-line interface ``pfl``.

Reports go to standard output (and to ``--out`` when given); diagnostics go
to standard error only.  Exit codes for ``classify``: 0 canonical
equivalent, 10 extended Kumpera-Ruiz, 20 rejected; 2 means the input was
unusable for any command.
"""
from __future__ import annotations

import argparse
import sys
import time

from . import __version__
from .bryant import decide_corank_one_involutive
from .contact import CANONICAL, EXTENDED_KR, classify_contact, classify_pfaffian
from .errors import InputError, InternalError, PflError
from .exterior import Distribution, annihilator, kernel, pushforward
from .flags import derived_flag, derived_flag_forms, lie_flag
from .jets import JetSpec, ProlongationWord, generate_kumpera_ruiz
from .parallel import thread_count
from .poly import parse_point
from .reduction import kr_reduce
from .serialize import (distribution_document, dumps, envelope, fields_to_json, load_document,
                        poly_to_json, rational_to_json, word_to_json)

EXIT_OK = 0
EXIT_EXTENDED = 10
EXIT_REJECTED = 20
EXIT_INPUT = 2
EXIT_INTERNAL = 3

STATUS_EXIT = {CANONICAL: EXIT_OK, EXTENDED_KR: EXIT_EXTENDED}


def _emit(doc: dict, out: str | None, echo: bool = True) -> None:
    text = dumps(doc)
    if out:
        try:
            with open(out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            raise InputError(f"cannot write {out}: {exc.strerror}") from None
    if echo:
        sys.stdout.write(text)


def _base(args, chart):
    if args.at is None:
        return chart.origin()
    try:
        return parse_point(args.at, chart.dim)
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"--at: {exc}") from None


def _as_distribution(kind, obj) -> Distribution:
    if kind == "distribution":
        return obj
    if kind == "pfaffian":
        return kernel(obj)
    raise InputError(f"expected a distribution or pfaffian document, got {kind}")


def _level_json(lvl) -> dict:
    return {"generators": lvl.generator_count, "generic_rank": lvl.generic_rank,
            "rank_at_base": lvl.rank_at_base}


def _report_json(report) -> dict:
    return {"kind": report.kind, "levels": [_level_json(l) for l in report.levels],
            "base_point": [rational_to_json(v) for v in report.base_point],
            "stabilized": report.stabilized, "full": report.full}


def _witness_json(w: dict, with_fields: bool) -> dict:
    out = {"kind": w["kind"]}
    for key in ("L", "C", "B"):
        d = w.get(key)
        if d is not None:
            entry = {"generic_rank": d.generic_rank, "generators": len(d.generators)}
            if with_fields:
                entry["fields"] = fields_to_json(d.generators)
            out[key] = entry
    return out


def _verdict_json(v, with_witnesses: bool) -> dict:
    body = {
        "mode": v.mode,
        "status": v.status,
        "n": v.n,
        "m": v.m,
        "derived_ranks": v.derived_ranks,
        "derived_ranks_at_base": v.derived_ranks_at_base,
        "lie_ranks_at_base": v.lie_ranks_at_base,
        "corank_one_witness_per_level": v.corank_one_witness_per_level,
        "failure_reason": v.failure_reason,
    }
    if v.mode == "pfaffian":
        body["engel_rank_one"] = v.engel_rank_one
        body["cartan_ranks"] = v.cartan_ranks
    if with_witnesses:
        body["witnesses"] = {str(k): _witness_json(w, True) for k, w in sorted(v.witnesses.items())}
    return body


def _size_stats(fields) -> dict:
    terms = sum(len(c) for f in fields for c in f.components)
    deg = max((c.degree() for f in fields for c in f.components if c), default=0)
    return {"generators": len(fields), "terms": terms, "max_degree": deg}


# -- commands --------------------------------------------------------------------

def cmd_generate(args) -> int:
    spec = JetSpec.parse(args.spec)
    word = ProlongationWord.parse(args.word, spec) if args.word else ProlongationWord.canonical(spec)
    D = generate_kumpera_ruiz(word)
    doc = distribution_document(D)
    doc["payload"]["word"] = word_to_json(word)
    _emit(doc, args.out, echo=not args.out)
    return EXIT_OK


def _bryant_body(D, base, with_witnesses: bool) -> tuple[dict, int]:
    cv = decide_corank_one_involutive(D, base)
    body = {"mode": "bryant", "exists": cv.exists, "r0": cv.r0, "char_rank_ok": cv.char_rank_ok,
            "engel_rank_one": cv.engel_rank_one, "B_involutive": cv.B_involutive,
            "has_L_witness": cv.L_witness is not None, "detail": cv.detail}
    if with_witnesses:
        body["witnesses"] = _witness_json({"kind": "bryant", "L": cv.L_witness, "B": cv.B,
                                           "C": cv.characteristic}, True)
    return body, (EXIT_OK if cv.exists else EXIT_REJECTED)


def cmd_classify(args) -> int:
    kind, obj = load_document(args.input)
    if kind not in ("distribution", "pfaffian"):
        raise InputError(f"classify needs a distribution or pfaffian document, got {kind}")
    chart = obj.chart
    base = _base(args, chart)
    t0 = time.perf_counter()
    if args.mode == "bryant":
        body, code = _bryant_body(_as_distribution(kind, obj), base, args.witnesses)
    else:
        if args.mode == "pfaffian":
            I = obj if kind == "pfaffian" else annihilator(obj, base)
            v = classify_pfaffian(I, base)
        else:
            v = classify_contact(_as_distribution(kind, obj), base)
        body = _verdict_json(v, args.witnesses)
        code = STATUS_EXIT.get(v.status, EXIT_REJECTED)
    body["base_point"] = [rational_to_json(x) for x in base]
    body["size"] = _size_stats(obj.generators)
    if args.timing:
        body["timing_seconds"] = round(time.perf_counter() - t0, 6)
        body["threads"] = thread_count()
    _emit(envelope(chart, "verdict", body), args.out)
    return code


def cmd_pushforward(args) -> int:
    kind, D = load_document(args.input)
    if kind != "distribution":
        raise InputError(f"pushforward needs a distribution document, got {kind}")
    dkind, pair = load_document(args.diffeo)
    if dkind != "diffeo_pair":
        raise InputError(f"second argument must be a diffeo_pair document, got {dkind}")
    D.chart.check(pair.chart)
    _emit(distribution_document(pushforward(D, pair)), args.out, echo=not args.out)
    return EXIT_OK


def cmd_reduce(args) -> int:
    kind, D = load_document(args.input)
    if kind != "distribution":
        raise InputError(f"reduce needs a distribution document, got {kind}")
    base = _base(args, D.chart)
    red = kr_reduce(D.generators, base)
    trace = []
    for t in red.levels:
        entry = {"level": t.level, "branch": t.branch, "c": [rational_to_json(x) for x in t.c],
                 "mu_at_base": [[rational_to_json(x) for x in row] for row in t.mu_at_base]}
        if t.note:
            entry["note"] = t.note
        if args.witnesses:
            entry["mu"] = [[{"num": poly_to_json(x.num), "den": poly_to_json(x.den)} for x in row] for row in t.mu]
        trace.append(entry)
    payload = word_to_json(red.word)
    payload["trace"] = trace
    payload["base_point"] = [rational_to_json(x) for x in red.base]
    _emit(envelope(D.chart, "word", payload), args.out)
    return EXIT_OK


def cmd_flags(args) -> int:
    kind, obj = load_document(args.input)
    base = _base(args, obj.chart)
    reports = []
    if kind == "pfaffian":
        rep, _ = derived_flag_forms(obj, base, args.max_level)
        reports.append(_report_json(rep))
    elif kind == "distribution":
        if args.kind in ("derived", "both"):
            reports.append(_report_json(derived_flag(obj, base, args.max_level)[0]))
        if args.kind in ("lie", "both"):
            reports.append(_report_json(lie_flag(obj, base, args.max_level)[0]))
    else:
        raise InputError(f"flags needs a distribution or pfaffian document, got {kind}")
    _emit(envelope(obj.chart, "flag_report", {"reports": reports}), args.out)
    return EXIT_OK


def cmd_bryant(args) -> int:
    kind, obj = load_document(args.input)
    D = _as_distribution(kind, obj)
    base = _base(args, D.chart)
    body, code = _bryant_body(D, base, args.witnesses)
    body["base_point"] = [rational_to_json(x) for x in base]
    _emit(envelope(D.chart, "verdict", body), args.out)
    return code


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="pfl", description="Flags, Engel ranks and contact-system "
                                "classification for polynomial distributions.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, at=True, echo=True):
        sp.add_argument("--format", choices=["json"], default="json", help="output format")
        sp.add_argument("--out", metavar="PATH", help="also write the document to PATH" if echo
                        else "write the document to PATH instead of stdout")
        if at:
            sp.add_argument("--at", metavar="A1,...,AN", help="base point (default: origin)")

    g = sub.add_parser("generate", help="write an extended Kumpera-Ruiz normal form")
    g.add_argument("--spec", required=True, metavar="n,m")
    g.add_argument("--word", help='letters such as "R(0,0) S(1/2,0)"; default all R(0)')
    common(g, at=False, echo=False)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("classify", help="classify a distribution or Pfaffian system")
    c.add_argument("input")
    mode = c.add_mutually_exclusive_group()
    mode.add_argument("--contact", dest="mode", action="store_const", const="contact",
                      help="contact-system classifier on a distribution (default)")
    mode.add_argument("--pfaffian", dest="mode", action="store_const", const="pfaffian",
                      help="Pfaffian-side classifier on a system of 1-forms")
    mode.add_argument("--bryant", dest="mode", action="store_const", const="bryant",
                      help="corank-one involutive subdistribution test")
    c.set_defaults(mode="contact")
    c.add_argument("--witnesses", action="store_true", help="include witness distributions")
    c.add_argument("--timing", action="store_true", help="include wall-clock timing (non-deterministic)")
    common(c)
    c.set_defaults(func=cmd_classify)

    pf = sub.add_parser("pushforward", help="push a distribution forward by a verified polynomial pair")
    pf.add_argument("input")
    pf.add_argument("diffeo")
    common(pf, at=False, echo=False)
    pf.set_defaults(func=cmd_pushforward)

    r = sub.add_parser("reduce", help="recover the prolongation word of an iterated Weber form")
    r.add_argument("input")
    r.add_argument("--witnesses", action="store_true", help="include the full mu matrices")
    common(r)
    r.set_defaults(func=cmd_reduce)

    f = sub.add_parser("flags", help="derived and Lie flag rank profiles")
    f.add_argument("input")
    f.add_argument("--kind", choices=["derived", "lie", "both"], default="both")
    f.add_argument("--max-level", type=int, default=None)
    common(f)
    f.set_defaults(func=cmd_flags)

    b = sub.add_parser("bryant", help="corank-one involutive subdistribution test")
    b.add_argument("input")
    b.add_argument("--witnesses", action="store_true")
    common(b)
    b.set_defaults(func=cmd_bryant)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        thread_count()
        return args.func(args)
    except InternalError as exc:
        print(f"pfl: internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except (PflError, ValueError, ZeroDivisionError) as exc:
        print(f"pfl: error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
