"""Proof traces: backward extraction from goals, ndg collection, lemmas,
and an independent trace checker.

The checker deliberately re-implements premise matching on its own (sharing
only the core symmetry machinery) so that a bug in the saturation matcher
cannot hide itself.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .core import (
    Fact,
    GeometryError,
    PointTable,
    Symmetries,
    canon,
    format_fact,
    is_reflexive_trivial,
    make_fact,
    orbit_tuples,
)
from .engine import EngineError, Fixpoint, Problem, Rule, query
from .fof import Atom, QuantifiedHorn, SourceUnit, Term


class TraceError(ValueError):
    pass


@dataclass
class ProofStep:
    kind: str  # rule | lemma | trivial
    label: str
    rule_name: str | None
    new_facts: tuple[Fact, ...]
    used_facts: tuple[Fact, ...]
    ndgs: tuple[Fact, ...]
    subst: dict[str, int] = field(default_factory=dict)
    position: int = 0  # insertion index of the earliest produced fact


@dataclass
class ProofTrace:
    hypotheses: list[Fact]
    steps: list[ProofStep]
    goals: list[Fact]
    ndg_set: list[Fact]
    points: PointTable
    syms: Symmetries


def extract_trace(fixpoint: Fixpoint, goals) -> ProofTrace:
    """Backward reachability from the goals over recorded provenance.

    Only facts that feed a goal appear; steps come out in derivation order,
    which is already topological. Every fact keeps its first derivation.
    """
    db = fixpoint.db
    goal_handles = []
    for goal in goals:
        handle = query(db, goal)
        if handle is None:
            raise TraceError(f"goal {format_fact(goal, db.points)} is not in the fixpoint")
        goal_handles.append(handle)

    needed_hyps: set[int] = set()
    needed_trivial: set[int] = set()
    needed_firings: set[int] = set()
    stack = list(goal_handles)
    seen: set[int] = set()
    while stack:
        handle = stack.pop()
        if handle in seen:
            continue
        seen.add(handle)
        prov = db.provenance[handle]
        if prov.origin == "hypothesis":
            needed_hyps.add(handle)
        elif prov.origin == "trivial":
            needed_trivial.add(handle)
        else:
            firing = db.firings[prov.firing]
            if firing.index not in needed_firings:
                needed_firings.add(firing.index)
                stack.extend(firing.premise_handles)

    steps: list[ProofStep] = []
    for handle in sorted(needed_trivial):
        steps.append(
            ProofStep(
                kind="trivial",
                label="trivial",
                rule_name=None,
                new_facts=(db.facts[handle],),
                used_facts=(),
                ndgs=(),
                position=handle,
            )
        )
    for index in sorted(needed_firings):
        firing = db.firings[index]
        rule = firing.rule
        steps.append(
            ProofStep(
                kind="lemma" if rule.source == "lemma" else "rule",
                label=rule.label,
                rule_name=rule.name,
                new_facts=tuple(db.facts[h] for h in firing.new_handles),
                used_facts=tuple(db.facts[h] for h in firing.premise_handles),
                ndgs=firing.ndgs,
                subst=dict(firing.subst),
                position=min(firing.new_handles),
            )
        )
    steps.sort(key=lambda s: s.position)

    trace = ProofTrace(
        hypotheses=[db.facts[h] for h in sorted(needed_hyps)],
        steps=steps,
        goals=[db.facts[h] for h in goal_handles],
        ndg_set=[],
        points=db.points,
        syms=db.syms,
    )
    trace.ndg_set = collect_ndgs(trace)
    return trace


def collect_ndgs(trace: ProofTrace) -> list[Fact]:
    """Deduplicated, deterministically sorted union of all step provisos."""
    out: set[Fact] = set()
    for step in trace.steps:
        for ndg in step.ndgs:
            out.add(canon(ndg, trace.syms))
    return sorted(out, key=lambda f: f.sort_key())


def register_lemma(name: str, problem: Problem, trace: ProofTrace, existing_rules=()) -> Rule:
    """Re-register a proved theorem as a single rule carrying its provisos."""
    for rule in existing_rules:
        if rule.name == name:
            raise EngineError(f"a rule named {name!r} already exists")
    syms = trace.syms
    known = {canon(f, syms) for f in problem.hypotheses}
    for step in trace.steps:
        known.update(canon(f, syms) for f in step.new_facts)
    for goal in problem.goals:
        if canon(goal, syms) not in known:
            raise EngineError(f"trace does not prove {format_fact(goal, problem.points)}")

    hyp_points = sorted({p for f in problem.hypotheses for p in f.points})
    var_names: dict[int, str] = {}
    taken: set[str] = set()
    for pid in hyp_points:
        base = problem.points.name_of(pid)
        candidate = base if base[0].isupper() else base[0].upper() + base[1:]
        if not candidate[0].isupper() or candidate in taken:
            candidate = f"V{pid}"
        var_names[pid] = candidate
        taken.add(candidate)

    def atom_of(fact: Fact) -> Atom:
        try:
            return Atom(fact.kind, tuple(Term(var_names[p]) for p in fact.points))
        except KeyError:
            raise EngineError(
                f"{format_fact(fact, problem.points)} mentions a point outside the hypotheses"
            ) from None

    premises = tuple(atom_of(f) for f in problem.hypotheses)
    conclusions = tuple(atom_of(f) for f in problem.goals)
    ndg = tuple(atom_of(f) for f in trace.ndg_set)
    variables = tuple(var_names[p] for p in hyp_points)
    return Rule(
        name=name,
        label=name,
        variables=variables,
        premises=premises,
        ndg_premises=ndg,
        conclusions=conclusions,
        enum_vars=(),
        enum_pairs=(),
        source="lemma",
    )


def lemma_unit(rule: Rule) -> SourceUnit:
    """The lemma as a parseable axiom unit (for appending to a catalog file)."""
    formula = QuantifiedHorn(rule.variables, rule.premises, rule.ndg_premises, rule.conclusions)
    return SourceUnit(rule.name, "axiom", formula, "<lemma>")


# --- independent checking -----------------------------------------------------


def _check_unify(atom: Atom, pts, theta: dict[str, int], points: PointTable):
    out = dict(theta)
    for term, p in zip(atom.args, pts):
        if term.is_var:
            bound = out.get(term.name)
            if bound is None:
                out[term.name] = p
            elif bound != p:
                return None
        else:
            pid = points.id_of(term.name)
            if pid is None or pid != p:
                return None
    return out


def _check_ground(atom: Atom, theta: dict[str, int], points: PointTable):
    pts = []
    for term in atom.args:
        p = theta.get(term.name) if term.is_var else points.id_of(term.name)
        if p is None:
            return None
        pts.append(p)
    return tuple(pts)


def _step_follows(step: ProofStep, rule: Rule, syms: Symmetries, points: PointTable) -> bool:
    """Does some substitution take the rule from usedFacts to newFacts?"""
    if len(step.used_facts) != len(rule.premises):
        return False
    want_ndgs = {canon(f, syms) for f in step.ndgs}
    new_facts = [canon(f, syms) for f in step.new_facts]

    def cover_conclusions(i: int, theta: dict[str, int]) -> bool:
        if i == len(new_facts):
            grounded: set[Fact] = set()
            for atom in rule.ndg_premises:
                pts = _check_ground(atom, theta, points)
                if pts is None:
                    return False
                try:
                    grounded.add(canon(make_fact(atom.predicate, pts), syms))
                except GeometryError:
                    return False
            return grounded == want_ndgs
        target = new_facts[i]
        for atom in rule.conclusions:
            if atom.predicate != target.kind:
                continue
            for variant in orbit_tuples(target, syms):
                t2 = _check_unify(atom, variant, theta, points)
                if t2 is not None and cover_conclusions(i + 1, t2):
                    return True
        return False

    def match_premises(i: int, theta: dict[str, int]) -> bool:
        if i == len(rule.premises):
            return cover_conclusions(0, theta)
        atom = rule.premises[i]
        fact = step.used_facts[i]
        if fact.kind != atom.predicate:
            return False
        for variant in orbit_tuples(fact, syms):
            t2 = _check_unify(atom, variant, theta, points)
            if t2 is not None and match_premises(i + 1, t2):
                return True
        return False

    return match_premises(0, {})


def verify_trace(trace: ProofTrace, rules) -> bool:
    ok, _ = verify_trace_report(trace, rules)
    return ok


def verify_trace_report(trace: ProofTrace, rules) -> tuple[bool, str]:
    """Independent re-check of every step; names the first bad step on failure."""
    syms = trace.syms
    points = trace.points
    by_name = {r.name: r for r in rules}
    by_label = {r.label: r for r in rules}
    known = {canon(f, syms) for f in trace.hypotheses}
    for i, step in enumerate(trace.steps, start=1):
        where = f"step {i} ({step.label})"
        for fact in step.used_facts:
            if canon(fact, syms) not in known:
                return False, f"{where}: uses unknown fact {format_fact(fact, points)}"
        if not step.new_facts:
            return False, f"{where}: produces nothing"
        if step.kind == "trivial":
            if step.used_facts or step.ndgs:
                return False, f"{where}: trivial steps take no premises"
            if not all(is_reflexive_trivial(canon(f, syms)) for f in step.new_facts):
                return False, f"{where}: fact is not reflexively trivial"
        else:
            rule = by_name.get(step.rule_name or "") or by_label.get(step.label)
            if rule is None:
                return False, f"{where}: unknown rule"
            if not _step_follows(step, rule, syms, points):
                return False, f"{where}: newFacts do not follow from usedFacts by {rule.label}"
        known.update(canon(f, syms) for f in step.new_facts)
    for goal in trace.goals:
        if canon(goal, syms) not in known:
            return False, f"goal {format_fact(goal, points)} is not covered"
    return True, "ok"
