"""Command-line entry point: validate, synthesize, check, explain, catalog.

Exit codes: 0 success, 1 domain failure (violations, infeasibility, conflict
found), 2 usage or parse error, 3 solver timeout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import documents
from .documents import DocumentError, canonical_dumps
from .explain import ExplainRequest, explain, render
from .model import validate_catalog
from .solver import SolverTimeout
from .synthesis import Design, Infeasibility, SynthesisError, check_design, synthesize

EXIT_OK = 0
EXIT_DOMAIN = 1
EXIT_USAGE = 2
EXIT_TIMEOUT = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="archforge",
        description="Constraint-based synthesis and explanation of networked-system architectures",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, query=True):
        p.add_argument(
            "-c",
            "--catalog",
            action="append",
            required=True,
            help="catalog document; repeatable, later files merge into earlier ones",
        )
        if query:
            p.add_argument("-q", "--query", required=True, help="query document")
        p.add_argument("--output", help="write the result document to this path")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--seed", type=int, default=0, help="engine seed (runs are deterministic)")
        p.add_argument(
            "--budget-seconds", type=float, default=30.0, help="solver wall-clock budget"
        )

    p_validate = sub.add_parser("validate", help="validate catalog (and query) structure")
    common(p_validate, query=False)
    p_validate.add_argument("-q", "--query", required=False)

    p_synth = sub.add_parser("synthesize", help="produce an optimal feasible design")
    common(p_synth)

    p_check = sub.add_parser("check", help="re-verify a design without the solver")
    common(p_check)
    p_check.add_argument("--design", required=True, help="design document to check")

    p_explain = sub.add_parser("explain", help="why is the preferred system not selected?")
    common(p_explain)
    p_explain.add_argument("--design", required=True, help="base design document")
    p_explain.add_argument("--workload", required=True)
    p_explain.add_argument("--role", required=True)
    p_explain.add_argument("--prefer", required=True, help="the system expected instead")
    p_explain.add_argument(
        "--objective", default=None, help="ordering to consult (defaults to the role's first)"
    )
    p_explain.add_argument(
        "--flex",
        action="append",
        default=[],
        help="role or device id allowed to change; repeatable",
    )
    p_explain.add_argument(
        "--summarizer",
        action="store_true",
        help="send the structured explanation to the configured summarizer",
    )

    p_catalog = sub.add_parser("catalog", help="inspect catalog contents")
    catalog_sub = p_catalog.add_subparsers(dest="catalog_command", required=True)
    p_list = catalog_sub.add_parser("list", help="list systems, roles, hardware, orderings")
    common(p_list, query=False)
    p_show = catalog_sub.add_parser("show", help="show one entity as canonical JSON")
    common(p_show, query=False)
    p_show.add_argument("entity", help="system, role, hardware, or schema id")

    return parser


def _load(args, need_query: bool):
    catalog = documents.load_catalog([Path(p) for p in args.catalog])
    query = None
    if getattr(args, "query", None):
        query = documents.load_query(Path(args.query))
    elif need_query:
        raise DocumentError("query", "a query document is required")
    return catalog, query


def _emit(args, text_output: str, doc) -> None:
    if args.output:
        documents.write_document(args.output, doc)
    if args.format == "json":
        sys.stdout.write(canonical_dumps(doc))
    else:
        sys.stdout.write(text_output)


def _design_text(design: Design) -> str:
    lines = []
    lines.append("** Systems deployed **")
    for w, assignments in sorted(design.systems.items()):
        lines.append(f"{w} -")
        for i, (role_id, system_id) in enumerate(sorted(assignments.items()), start=1):
            lines.append(f"{i}. {role_id} role: {system_id}")
    lines.append("")
    lines.append("** Other values **")
    lines.append(f"Total cost = {float(design.total_cost):g}")
    lines.append("")
    lines.append("** Hardware assignments **")
    for device_id, hw_id in sorted(design.hardware.items()):
        lines.append(f"{device_id} = {hw_id}")
    if design.warnings:
        lines.append("")
        lines.append("** Warnings **")
        for source, text in design.warnings:
            lines.append(f"{source}: {text}")
    if design.dropped_optional:
        lines.append("")
        lines.append("** Dropped optional constraints **")
        for cid in design.dropped_optional:
            lines.append(cid)
    return "\n".join(lines) + "\n"


def cmd_validate(args) -> int:
    catalog, query = _load(args, need_query=False)
    report = validate_catalog(catalog, query)
    doc = {
        "kepler-spec": documents.VERSION,
        "violations": [
            {"code": v.code, "subject": v.subject, "message": v.message}
            for v in report.sorted()
        ],
    }
    text = f"{len(report.violations)} violations\n" + "".join(
        f"  {v}\n" for v in report.sorted()
    )
    _emit(args, text, doc)
    return EXIT_OK if report.ok else EXIT_DOMAIN


def cmd_synthesize(args) -> int:
    catalog, query = _load(args, need_query=True)
    out = synthesize(catalog, query, budget_seconds=args.budget_seconds)
    if isinstance(out, Infeasibility):
        doc = {
            "kepler-spec": documents.VERSION,
            "infeasible": True,
            "core": [
                {"track": t, "kind": o.kind, "label": o.label} for t, o in out.core
            ],
        }
        text = "infeasible; conflicting assertions:\n" + "".join(
            f"  [{o.kind}] {o.label or t}\n" for t, o in out.core
        )
        _emit(args, text, doc)
        return EXIT_DOMAIN
    doc = documents.design_to_json(out)
    _emit(args, _design_text(out), doc)
    return EXIT_OK


def cmd_check(args) -> int:
    catalog, query = _load(args, need_query=True)
    design = documents.design_from_json(documents.read_json(args.design), args.design)
    violations = check_design(catalog, query, design)
    doc = {"kepler-spec": documents.VERSION, "violations": violations}
    text = f"{len(violations)} violations\n" + "".join(f"  {v}\n" for v in violations)
    _emit(args, text, doc)
    return EXIT_OK if not violations else EXIT_DOMAIN


def cmd_explain(args) -> int:
    catalog, query = _load(args, need_query=True)
    design = documents.design_from_json(documents.read_json(args.design), args.design)
    objective = args.objective
    if objective is None:
        # default: the first ordering axis that actually ranks the preference
        covering = sorted(
            {
                o.objective
                for o in catalog.orderings
                if args.prefer in (o.subject, o.object)
            }
        )
        objective = covering[0] if covering else "latency"
    request = ExplainRequest(
        workload=args.workload,
        role=args.role,
        preferred=args.prefer,
        objective=objective,
        flexible=frozenset(args.flex),
    )
    explanation = explain(catalog, query, design, request, budget_seconds=args.budget_seconds)
    doc = documents.explanation_to_json(explanation)
    text = render(explanation, "SUMMARIZER" if args.summarizer else "TEMPLATE")
    _emit(args, text, doc)
    return EXIT_OK if explanation.outcome in ("ALTERNATIVE", "ALREADY_OPTIMAL") else EXIT_DOMAIN


def cmd_catalog(args) -> int:
    catalog, _ = _load(args, need_query=False)
    if args.catalog_command == "list":
        doc = {
            "kepler-spec": documents.VERSION,
            "systems": {
                s.id: {"roles": list(s.roles), "solves": list(s.solves)}
                for _, s in sorted(catalog.systems.items())
            },
            "roles": sorted(catalog.roles),
            "hardware": sorted(catalog.hardware),
            "schemas": sorted(catalog.schemas),
            "objectives": sorted(catalog.objectives),
            "orderings": len(catalog.orderings),
        }
        lines = []
        for kind in ("systems", "roles", "hardware", "schemas", "objectives"):
            names = doc[kind] if isinstance(doc[kind], list) else sorted(doc[kind])
            lines.append(f"{kind} ({len(names)}): " + ", ".join(names))
        lines.append(f"orderings: {doc['orderings']} entries")
        _emit(args, "\n".join(lines) + "\n", doc)
        return EXIT_OK
    entity = args.entity
    full = documents.catalog_to_json(catalog)
    for section in ("systems", "roles", "hardware", "schemas", "objectives"):
        for item in full.get(section, []):
            if item.get("id") == entity:
                _emit(args, canonical_dumps(item), item)
                return EXIT_OK
    sys.stderr.write(f"no catalog entity named {entity!r}\n")
    return EXIT_DOMAIN


def run(argv: list[str]) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    handlers = {
        "validate": cmd_validate,
        "synthesize": cmd_synthesize,
        "check": cmd_check,
        "explain": cmd_explain,
        "catalog": cmd_catalog,
    }
    try:
        return handlers[args.command](args)
    except SolverTimeout:
        sys.stderr.write("solver budget exhausted; result unknown\n")
        return EXIT_TIMEOUT
    except (DocumentError, SynthesisError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_DOMAIN if isinstance(exc, SynthesisError) else EXIT_USAGE
    except Exception as exc:  # pragma: no cover - surfaced for operators
        sys.stderr.write(f"internal error: {exc}\n")
        raise


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
