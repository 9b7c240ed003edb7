"""Command-line interface.

Exit status contract: 0 success/proved, 1 not proved (or audit violations),
2 input error, 3 resource limit tripped.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import catalogs
from .core import GeometryError, format_fact
from .engine import (
    EngineConfig,
    EngineError,
    Limits,
    Problem,
    Rule,
    compile_rule,
    load_problem,
    prepare_rules,
    prove,
    saturate,
)
from .fof import FofError, print_unit
from .oracle import (
    ConstructionRecipe,
    Model,
    OracleError,
    RNG_NAME,
    check_facts,
    model_satisfies,
    parse_model_file,
    sample_model,
)
from .prooftrace import TraceError, lemma_unit, register_lemma, verify_trace_report
from .render import (
    RenderError,
    TemplateCatalog,
    parse_structured,
    render_natural,
    render_structured,
    render_table,
)

EXIT_PROVED = 0
EXIT_NOT_PROVED = 1
EXIT_INPUT_ERROR = 2
EXIT_LIMIT = 3

DEFAULT_SEED = 1729


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--rules", action="append", metavar="NAME|FILE",
                        help="rule catalog (embedded name or .ax file); repeatable (default: year7)")
    parser.add_argument("--lemma-file", action="append", metavar="FILE",
                        help="catalog of previously proved lemma rules; repeatable")
    parser.add_argument("--all-pairs", action="store_true",
                        help="enumerate transversals over all point pairs, not only known lines")
    parser.add_argument("--eqangle-exchange", action="store_true",
                        help="add the angle exchange law to the eqangle symmetry group")
    parser.add_argument("--no-eqtrans", action="store_true",
                        help="do not add the structural angle-chaining rule")
    parser.add_argument("--max-facts", type=int, default=None)
    parser.add_argument("--max-firings", type=int, default=None)
    parser.add_argument("--time-budget", type=float, default=None, metavar="SECONDS")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--config", metavar="FILE", help="JSON config file; flags win over it")


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--format", choices=("table", "prose", "structured"), default=None)
    parser.add_argument("--out", metavar="FILE", help="write the rendering here instead of stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geodd",
        description="Rule-based geometry theorem prover over a deductive fact database.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prove", help="decide a conjecture and render its proof trace")
    p.add_argument("problem", metavar="PROBLEM.p")
    _add_common(p)
    _add_output(p)

    p = sub.add_parser("saturate", help="saturate a problem and dump fixpoint statistics and facts")
    p.add_argument("problem", metavar="PROBLEM.p")
    _add_common(p)
    p.add_argument("--facts", action="store_true", help="also list every derived fact")

    p = sub.add_parser("check", help="audit a fixpoint or a stored trace against numeric models")
    p.add_argument("input", metavar="PROBLEM.p|TRACE.json")
    _add_common(p)
    p.add_argument("--models", type=int, default=None, metavar="N", help="number of sampled models")
    p.add_argument("--model-file", metavar="FILE", help="explicit coordinates instead of sampling")

    p = sub.add_parser("render", help="re-render a stored structured trace")
    p.add_argument("trace", metavar="TRACE.json")
    _add_common(p)
    _add_output(p)

    p = sub.add_parser("lemma", help="prove a problem and append it to a catalog as a lemma rule")
    p.add_argument("problem", metavar="PROBLEM.p")
    p.add_argument("--name", required=True, help="name for the lemma rule")
    p.add_argument("--append-to", required=True, metavar="CATALOG.ax")
    _add_common(p)

    return parser


class _Run:
    """Options resolved from config file plus flags (flags win)."""

    def __init__(self, args: argparse.Namespace):
        file_cfg: dict = {}
        if getattr(args, "config", None):
            with open(args.config, "r", encoding="ascii") as fh:
                file_cfg = json.load(fh)
        limits_cfg = file_cfg.get("limits", {})

        def pick(flag, key, default):
            if flag is not None:
                return flag
            return file_cfg.get(key, default)

        defaults = Limits()
        self.selectors: list[str] = list(args.rules or file_cfg.get("rules", ["year7"]))
        self.lemma_files: list[str] = list(
            getattr(args, "lemma_file", None) or file_cfg.get("lemma_files", [])
        )
        self.limits = Limits(
            max_facts=pick(args.max_facts, None, limits_cfg.get("max_facts", defaults.max_facts)),
            max_firings=pick(
                args.max_firings, None, limits_cfg.get("max_firings", defaults.max_firings)
            ),
            time_budget=pick(
                args.time_budget, None, limits_cfg.get("time_budget", defaults.time_budget)
            ),
        )
        self.config = EngineConfig(
            all_pairs_enumeration=bool(args.all_pairs or file_cfg.get("all_pairs", False)),
            eqangle_exchange=bool(args.eqangle_exchange or file_cfg.get("eqangle_exchange", False)),
            include_eqtrans=not (args.no_eqtrans or file_cfg.get("no_eqtrans", False)),
        )
        self.seed = pick(args.seed, "seed", DEFAULT_SEED)
        self.format = pick(getattr(args, "format", None), "format", "table")
        self.out = getattr(args, "out", None)

    def load_rules(self, problem: Problem | None = None) -> list[Rule]:
        rules: list[Rule] = []
        for selector in self.selectors:
            source = "builtin" if selector in catalogs.EMBEDDED else "file"
            rules.extend(compile_rule(u, source=source) for u in catalogs.load_catalog(selector))
        for path in self.lemma_files:
            rules.extend(compile_rule(u, source="lemma") for u in catalogs.load_catalog(path))
        if problem is not None:
            rules.extend(compile_rule(u, source="file") for u in problem.rule_units)
        return rules

    def catalog_identity(self, rules) -> dict:
        return {"selectors": self.selectors + self.lemma_files, "rules": [r.label for r in rules]}

    def config_dict(self) -> dict:
        return {
            "all_pairs": self.config.all_pairs_enumeration,
            "eqangle_exchange": self.config.eqangle_exchange,
            "eqtrans": self.config.include_eqtrans,
            "limits": {
                "max_facts": self.limits.max_facts,
                "max_firings": self.limits.max_firings,
                "time_budget": self.limits.time_budget,
            },
            "rng": RNG_NAME,
            "seed": self.seed,
        }


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="ascii") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(trace, run: _Run, rules) -> str:
    if run.format == "prose":
        templates = TemplateCatalog()
        templates.validate(rules)
        return render_natural(trace, templates)
    if run.format == "structured":
        return render_structured(trace, run.catalog_identity(rules), run.config_dict())
    return render_table(trace)


def _cmd_prove(args) -> int:
    run = _Run(args)
    problem = load_problem(args.problem)
    rules = prepare_rules(run.load_rules(problem), run.config)
    result = prove(problem, rules, run.limits, run.config)
    if result.fixpoint.limit:
        print(f"limit tripped: {result.fixpoint.limit}; saturation is incomplete", file=sys.stderr)
        return EXIT_LIMIT
    if not result.proved:
        missing = ", ".join(format_fact(f, problem.points) for f in result.missing)
        print(f"Not proved: {missing}.", file=sys.stderr)
        print(f"Advice: {result.advice}", file=sys.stderr)
        return EXIT_NOT_PROVED
    print(f"Proved: {problem.name} "
          f"({result.fixpoint.stats.firings} rule firings, {len(result.fixpoint.db)} facts).")
    _emit(_render(result.trace, run, rules), run.out)
    return EXIT_PROVED


def _cmd_saturate(args) -> int:
    run = _Run(args)
    problem = load_problem(args.problem)
    rules = prepare_rules(run.load_rules(problem), run.config)
    fp = saturate(problem.hypotheses, rules, run.limits, run.config, problem.points)
    stats = fp.stats
    print(f"exhausted: {fp.exhausted}" + (f" (limit: {fp.limit})" if fp.limit else ""))
    print(f"facts: {len(fp.db)}   pops: {stats.pops}   instantiations: {stats.matched}   "
          f"firings: {stats.firings}   trivial injected: {stats.injected}")
    print("facts by predicate: " + ", ".join(f"{k}={v}" for k, v in sorted(stats.facts_by_kind.items())))
    print("firings by rule: " + ", ".join(f"{k}={v}" for k, v in sorted(stats.firings_by_rule.items())))
    print(f"elapsed: {stats.elapsed:.3f}s")
    if args.facts:
        for i, fact in enumerate(fp.db.facts):
            prov = fp.db.provenance[i]
            label = {"hypothesis": "hyp.", "trivial": "trivial"}.get(prov.origin, prov.label)
            print(f"  {format_fact(fact, problem.points)}  [{label}]")
    return EXIT_PROVED if fp.exhausted else EXIT_LIMIT


def _infer_recipe(problem: Problem, seed: int) -> ConstructionRecipe:
    names = problem.points.names()
    if len(problem.hypotheses) == 1 and problem.hypotheses[0].kind in ("parallelogram", "rectangle"):
        fact = problem.hypotheses[0]
        return ConstructionRecipe(
            kind=fact.kind,
            point_names=tuple(problem.points.name_of(p) for p in fact.points),
            seed=seed,
        )
    return ConstructionRecipe(kind="freePoints", point_names=names, seed=seed)


def _sample_models(problem: Problem, count: int, seed: int, ndgs=()) -> list[Model]:
    models: list[Model] = []
    attempt = 0
    while len(models) < count:
        if attempt > 50 * count + 1000:
            raise OracleError("could not sample enough models satisfying the hypotheses")
        recipe = _infer_recipe(problem, seed + attempt)
        attempt += 1
        model = sample_model(recipe)
        if model_satisfies(model, problem.hypotheses, ndgs):
            models.append(model)
    return models


def _cmd_check(args) -> int:
    run = _Run(args)
    if args.input.endswith(".json"):
        with open(args.input, "r", encoding="ascii") as fh:
            trace, _doc = parse_structured(fh.read())
        rules = prepare_rules(run.load_rules(), run.config)
        ok, message = verify_trace_report(trace, rules)
        print(f"trace check: {'ok' if ok else 'FAILED: ' + message}")
        facts = list(trace.hypotheses) + [f for s in trace.steps for f in s.new_facts]
        problem = Problem(points=trace.points, hypotheses=trace.hypotheses,
                          goals=trace.goals, rule_units=[], name="trace")
        ndgs = trace.ndg_set
        if not ok:
            return EXIT_NOT_PROVED
    else:
        problem = load_problem(args.input)
        rules = prepare_rules(run.load_rules(problem), run.config)
        fp = saturate(problem.hypotheses, rules, run.limits, run.config, problem.points)
        if fp.limit:
            print(f"limit tripped: {fp.limit}", file=sys.stderr)
            return EXIT_LIMIT
        facts = list(fp.db.facts)
        ndgs = sorted(
            {ndg for firing in fp.db.firings for ndg in firing.ndgs}, key=lambda f: f.sort_key()
        )
    if args.model_file:
        with open(args.model_file, "r", encoding="ascii") as fh:
            models = [parse_model_file(fh.read(), problem.points)]
        for model in models:
            if not model_satisfies(model, problem.hypotheses, ndgs):
                print("model does not satisfy the hypotheses and ndg conditions", file=sys.stderr)
                return EXIT_INPUT_ERROR
    else:
        models = _sample_models(problem, args.models or 100, run.seed, ndgs)
    violations = check_facts(models, facts)
    print(f"audited {len(facts)} facts against {len(models)} models "
          f"({RNG_NAME}, seed {run.seed}): {len(violations)} violations")
    for fact, idx in violations:
        print(f"  VIOLATION {format_fact(fact, problem.points)} on model {idx}")
    return EXIT_PROVED if not violations else EXIT_NOT_PROVED


def _cmd_render(args) -> int:
    run = _Run(args)
    with open(args.trace, "r", encoding="ascii") as fh:
        trace, doc = parse_structured(fh.read())
    if run.format == "structured":
        text = render_structured(trace, doc.get("catalog"), doc.get("config"))
    elif run.format == "prose":
        templates = TemplateCatalog()
        rules = prepare_rules(run.load_rules(), run.config)
        templates.validate(rules)
        text = render_natural(trace, templates)
    else:
        text = render_table(trace)
    _emit(text, run.out)
    return EXIT_PROVED


def _cmd_lemma(args) -> int:
    run = _Run(args)
    problem = load_problem(args.problem)
    rules = prepare_rules(run.load_rules(problem), run.config)
    result = prove(problem, rules, run.limits, run.config)
    if result.fixpoint.limit:
        print(f"limit tripped: {result.fixpoint.limit}", file=sys.stderr)
        return EXIT_LIMIT
    if not result.proved:
        print(f"Not proved; nothing appended. Advice: {result.advice}", file=sys.stderr)
        return EXIT_NOT_PROVED
    rule = register_lemma(args.name, problem, result.trace, rules)
    text = print_unit(lemma_unit(rule))
    with open(args.append_to, "a", encoding="ascii") as fh:
        fh.write(text + "\n")
    print(f"Proved and appended rule {args.name!r} to {args.append_to}.")
    return EXIT_PROVED


_COMMANDS = {
    "prove": _cmd_prove,
    "saturate": _cmd_saturate,
    "check": _cmd_check,
    "render": _cmd_render,
    "lemma": _cmd_lemma,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (FofError, EngineError, GeometryError, RenderError, TraceError, OracleError,
            OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
