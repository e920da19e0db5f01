"""Command surface: normalize, equal, residue, specialize, gamma, sw,
validate-op, suite, run.

Exit codes: 0 success / equal / pass, 1 unequal / fail, 2 usage or
domain error.  Output is human text by default and byte-deterministic
JSON with --json.  The seed resolves --seed, then MK_SEED, then the
config file, then 0.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .dsl import (
    parse_chain,
    parse_config,
    parse_field,
    parse_place,
    parse_presentation,
    parse_script,
    parse_unit,
)
from .errors import EngineError
from .kchain import equal, nf_text, normal_form, residue, specialize, support
from .operations import (
    DiagonalForm,
    OperationSpec,
    divided_power,
    sw_classes,
    sw_identities_check,
    validate_operation_spec,
)
from .suite import (
    PROFILES,
    SuiteProfile,
    render_report_files,
    report_human_text,
    report_json_bytes,
    run_suite,
)
from .tower import uniformizer


def _emit(payload: dict, human: str, as_json: bool) -> None:
    if as_json:
        sys.stdout.write(json.dumps(payload, separators=(",", ":")) + "\n")
    else:
        sys.stdout.write(human if human.endswith("\n") else human + "\n")


def _field_from(args, cfg) -> "TowerField":
    text = args.field or cfg.get("field")
    if not text:
        raise EngineError("no field given: pass --field or set one in the config file")
    return parse_field(text)


def _seed_from(args, cfg) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("MK_SEED")
    if env is not None:
        return int(env)
    if "seed" in cfg:
        return int(cfg["seed"])
    return 0


def cmd_normalize(args, cfg) -> int:
    field = _field_from(args, cfg)
    chain = parse_chain(args.expr, field)
    nf = normal_form(chain)
    payload = {"field": field.json_header(), "expr": chain.text(), "normal_form": nf.to_json(), "zero": nf.is_zero()}
    _emit(payload, nf_text(nf, field), args.json)
    return 0


def cmd_equal(args, cfg) -> int:
    field = _field_from(args, cfg)
    lhs = parse_chain(args.lhs, field)
    rhs = parse_chain(args.rhs, field)
    eq = equal(lhs, rhs)
    _emit(
        {"field": field.json_header(), "lhs": lhs.text(), "rhs": rhs.text(), "equal": eq},
        "equal" if eq else "not equal",
        args.json,
    )
    return 0 if eq else 1


def cmd_residue(args, cfg) -> int:
    field = _field_from(args, cfg)
    chain = parse_chain(args.expr, field)
    place = parse_place(args.at, field)
    out = residue(chain, place)
    _emit(
        {
            "field": field.json_header(),
            "expr": chain.text(),
            "at": place.text(field),
            "residue": out.to_json(),
        },
        out.text(),
        args.json,
    )
    return 0


def cmd_specialize(args, cfg) -> int:
    field = _field_from(args, cfg)
    chain = parse_chain(args.expr, field)
    place = parse_place(args.at, field)
    if args.uniformizer:
        pi = parse_unit(args.uniformizer, field)
    else:
        pi = uniformizer(field, place)
    out = specialize(chain, place, pi)
    _emit(
        {
            "field": field.json_header(),
            "expr": chain.text(),
            "at": place.text(field),
            "uniformizer": pi.text(),
            "specialization": out.to_json(),
        },
        out.text(),
        args.json,
    )
    return 0


def cmd_gamma(args, cfg) -> int:
    field = _field_from(args, cfg)
    pres = parse_presentation(args.pres, field)
    out = divided_power(args.n, pres)
    _emit(
        {
            "field": field.json_header(),
            "presentation": pres.text(),
            "n": args.n,
            "result": out.to_json(),
            "normal_form": normal_form(out).to_json(),
        },
        out.text(),
        args.json,
    )
    return 0


def cmd_sw(args, cfg) -> int:
    field = _field_from(args, cfg)
    entries = tuple(parse_unit(part.strip(), field) for part in args.form.split(",") if part.strip())
    form = DiagonalForm(field, entries)
    classes = sw_classes(form)
    report = sw_identities_check(form)
    payload = {
        "field": field.json_header(),
        "form": [u.text() for u in form.entries],
        "classes": {str(k): c.to_json() for k, c in enumerate(classes)},
        "identities": report,
    }
    lines = [f"w_{k} = {c.text()}" for k, c in enumerate(classes)]
    lines += [f"{name}: {'pass' if ok else 'FAIL'}" for name, ok in report.items()]
    _emit(payload, "\n".join(lines), args.json)
    return 0 if all(report.values()) else 1


def _coeff_chain(text: str, field):
    """An operation coefficient: a chain expression, or a bare integer
    for degree-0 classes (the grammar's chains start in degree 1)."""
    try:
        k = int(text)
    except ValueError:
        return parse_chain(text, field)
    from .kchain import KChain, Symbol

    return KChain(field, 0, {Symbol(()): k})


def cmd_validate_op(args, cfg) -> int:
    with open(args.op_spec, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    field = parse_field(raw["field"])
    if "mode" in raw:
        wanted = None if raw["mode"] == "integral" else int(raw["mode"])
        if field.mode is None and wanted is not None:
            from .tower import make_tower

            field = make_tower(field.base, field.vars, wanted)
        elif field.mode != wanted:
            raise EngineError("op-spec mode disagrees with the field declaration")
    coeffs = {}
    for r, text in raw["coeffs"].items():
        coeffs[int(r)] = _coeff_chain(str(text).strip(), field)
    spec = OperationSpec.build(field, int(raw["i"]), coeffs)
    violations = validate_operation_spec(spec)
    payload = {"spec": spec.to_json(), "ok": not violations, "violations": violations}
    human = "ok" if not violations else "\n".join(violations)
    _emit(payload, human, args.json)
    return 0 if not violations else 1


def cmd_suite(args, cfg) -> int:
    field = _field_from(args, cfg)
    profile = SuiteProfile(
        name=args.profile or cfg.get("profile", "all"),
        field=field,
        source_degree=args.i,
        cases=args.cases if args.cases is not None else int(cfg.get("cases", 100)),
        seed=_seed_from(args, cfg),
        laws=tuple(cfg[f"profile.{args.profile}"].split(",")) if args.profile and f"profile.{args.profile}" in cfg else (),
    )
    report = run_suite(profile)
    if args.report_dir:
        render_report_files(report, args.report_dir)
    if args.json:
        sys.stdout.buffer.write(report_json_bytes(report))
    else:
        sys.stdout.write(report_human_text(report))
    return 0 if report["ok"] else 1


def cmd_run(args, cfg) -> int:
    with open(args.script, "r", encoding="utf-8") as fh:
        script = parse_script(fh.read())
    field = script.field
    worst = 0
    for stmt in script.statements:
        head = stmt[0]
        if head == "let":
            continue
        if head == "normalize":
            nf = normal_form(stmt[1])
            sys.stdout.write(f"normalize {stmt[1].text()}:\n{nf_text(nf, field)}\n")
        elif head == "equal":
            eq = equal(stmt[1], stmt[2])
            sys.stdout.write(f"equal: {'yes' if eq else 'no'}\n")
            worst = max(worst, 0 if eq else 1)
        elif head == "residue":
            sys.stdout.write(f"residue at {stmt[2].text(field)}: {residue(stmt[1], stmt[2]).text()}\n")
        elif head == "specialize":
            pi = stmt[3] if stmt[3] is not None else uniformizer(field, stmt[2])
            out = specialize(stmt[1], stmt[2], pi)
            sys.stdout.write(f"specialize at {stmt[2].text(field)}: {out.text()}\n")
        elif head == "gamma":
            sys.stdout.write(f"gamma_{stmt[1]}: {divided_power(stmt[1], stmt[2]).text()}\n")
        elif head == "support":
            places = support(stmt[1])
            names = ", ".join(pl.text(field) for pl in places) or "(empty)"
            sys.stdout.write(f"support: {names}\n")
    return worst


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="mk",
        description="Exact symbol calculus in Milnor K-theory of finite fields and rational function towers.",
    )
    ap.add_argument("--config", help="key = value config file (default field, seed, cases)")
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, field=True):
        if field:
            p.add_argument("--field", help='e.g. "GF(5)(t,u) mod 2"')
        p.add_argument("--json", action="store_true", help="machine-readable output")

    p = sub.add_parser("normalize", help="normal form of a chain")
    common(p)
    p.add_argument("--expr", required=True)
    p.set_defaults(fn=cmd_normalize)

    p = sub.add_parser("equal", help="decide equality of two chains")
    common(p)
    p.add_argument("--lhs", required=True)
    p.add_argument("--rhs", required=True)
    p.set_defaults(fn=cmd_equal)

    p = sub.add_parser("residue", help="residue map at a place of the top variable")
    common(p)
    p.add_argument("--expr", required=True)
    p.add_argument("--at", required=True, help='"t=0", "t=g^2" or "inf"')
    p.set_defaults(fn=cmd_residue)

    p = sub.add_parser("specialize", help="specialization map at a place")
    common(p)
    p.add_argument("--expr", required=True)
    p.add_argument("--at", required=True)
    p.add_argument("--uniformizer", help="local parameter (defaults to the canonical one)")
    p.set_defaults(fn=cmd_specialize)

    p = sub.add_parser("gamma", help="divided power of a presentation")
    common(p)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--pres", required=True, help='e.g. "[{t,u}; {t,v}]"')
    p.set_defaults(fn=cmd_gamma)

    p = sub.add_parser("sw", help="Stiefel-Whitney classes of a diagonal form")
    common(p)
    p.add_argument("--form", required=True, help='comma-separated units, e.g. "t, u, g^2 * v"')
    p.set_defaults(fn=cmd_sw)

    p = sub.add_parser("validate-op", help="check an operation spec file")
    common(p, field=False)
    p.add_argument("--op-spec", required=True, help="JSON file {field, mode, i, coeffs}")
    p.set_defaults(fn=cmd_validate_op)

    p = sub.add_parser("suite", help="run a seeded property-law profile")
    common(p)
    p.add_argument("--profile", help=f"one of: {', '.join(sorted(PROFILES))}")
    p.add_argument("--i", type=int, default=2, help="source degree for divided-power laws")
    p.add_argument("--cases", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--report-dir", help="write report.json, laws.csv and laws.png here")
    p.set_defaults(fn=cmd_suite)

    p = sub.add_parser("run", help="execute a script file")
    p.add_argument("script")
    p.set_defaults(fn=cmd_run)

    return ap


_VALUE_OPTIONS = {
    "--field", "--expr", "--lhs", "--rhs", "--at", "--uniformizer", "--pres",
    "--form", "--op-spec", "--profile", "--report-dir", "--config",
}


def _merge_value_options(argv: list[str]) -> list[str]:
    """Join '--opt value' into '--opt=value' so values may start with '-'."""
    out = []
    i = 0
    while i < len(argv):
        tok = argv[i]
        if tok in _VALUE_OPTIONS and i + 1 < len(argv):
            out.append(f"{tok}={argv[i + 1]}")
            i += 2
        else:
            out.append(tok)
            i += 1
    return out


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(_merge_value_options(list(sys.argv[1:] if argv is None else argv)))
    cfg = {}
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                cfg = parse_config(fh.read())
        except OSError as exc:
            sys.stderr.write(f"error: cannot read config: {exc}\n")
            return 2
    try:
        return args.fn(args, cfg)
    except EngineError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
