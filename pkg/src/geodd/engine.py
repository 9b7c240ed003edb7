"""Forward-chaining saturation over a canonical fact database.

The engine keeps a FIFO worklist of newly derived facts. Popping a fact
matches it against every rule premise (under all argument symmetries);
completed joins are de-duplicated per premise combination and applied with
deterministic, combination-determined conclusions. Saturation stops when the
worklist drains (the fixpoint) or a limit trips.
"""

from __future__ import annotations

import itertools
import time
from bisect import bisect_left
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from . import catalogs
from .core import (
    Fact,
    GeometryError,
    PointTable,
    Symmetries,
    canon,
    is_reflexive_trivial,
    make_fact,
    make_symmetries,
    orbit_keyed,
    orbit_tuples,
)
from .fof import Atom, FofError, SourceUnit, parse_units, resolve_includes

ADVICE_NOT_PROVED = (
    "the goal is not in the saturated database; the rule-based method is not "
    "complete, so the conjecture may still hold -- try a decision procedure "
    "(e.g. the area method)"
)

_LINE_SLOT_KINDS = {
    "para": ((0, 1), (2, 3)),
    "perp": ((0, 1), (2, 3)),
    "rightangle": ((0, 1), (2, 3)),
    "eqangle": ((0, 1), (2, 3), (4, 5), (6, 7)),
}


class EngineError(ValueError):
    """Rule compilation or problem composition error."""


class _LimitStop(Exception):
    def __init__(self, which: str):
        self.which = which


@dataclass(frozen=True)
class Limits:
    max_facts: int = 100_000
    max_firings: int = 1_000_000
    time_budget: float = 10.0

    def __post_init__(self):
        if self.max_facts <= 0 or self.max_firings <= 0 or self.time_budget <= 0:
            raise EngineError("limits must be positive")


@dataclass(frozen=True)
class EngineConfig:
    all_pairs_enumeration: bool = False
    eqangle_exchange: bool = False
    include_eqtrans: bool = True


@dataclass(frozen=True)
class Rule:
    """A compiled Horn rule over the geometric predicates."""

    name: str
    label: str
    variables: tuple[str, ...]
    premises: tuple[Atom, ...]
    ndg_premises: tuple[Atom, ...]
    conclusions: tuple[Atom, ...]
    enum_vars: tuple[str, ...]
    enum_pairs: tuple[tuple[str, str], ...]
    source: str = "file"  # builtin | file | lemma


def compile_rule(unit: SourceUnit, source: str = "file", allow_enumeration: bool = True) -> Rule:
    """Classify a parsed axiom unit's variables and build the Rule."""
    if unit.role != "axiom":
        raise EngineError(f"unit {unit.name!r} is a {unit.role}, not a rule axiom")
    f = unit.formula
    if not f.premises:
        raise EngineError(f"rule {unit.name!r} needs at least one positive premise")
    premise_vars = {t.name for a in f.premises for t in a.args if t.is_var}
    needed = {t.name for a in (*f.conclusions, *f.ndg_premises) for t in a.args if t.is_var}
    enum = tuple(v for v in f.variables if v in needed and v not in premise_vars)
    if enum and not allow_enumeration:
        raise EngineError(
            f"rule {unit.name!r}: conclusion variable(s) {', '.join(enum)} are not bound "
            "by any premise and enumeration is disabled"
        )
    if len(enum) % 2:
        raise EngineError(
            f"rule {unit.name!r}: enumeration variables must pair up into lines, got {enum}"
        )
    pairs = tuple((enum[i], enum[i + 1]) for i in range(0, len(enum), 2))
    return Rule(
        name=unit.name,
        label=catalogs.label_for(unit.name),
        variables=f.variables,
        premises=f.premises,
        ndg_premises=f.ndg_premises,
        conclusions=f.conclusions,
        enum_vars=enum,
        enum_pairs=pairs,
        source=source,
    )


def _builtin_eqtrans() -> Rule:
    units, _ = parse_units(catalogs.YEAR7_TEXT, "<builtin:year7>")
    unit = next(u for u in units if u.name == "eqtrans")
    return compile_rule(unit, source="builtin")


_EQTRANS: Rule | None = None


def eqtrans_rule() -> Rule:
    global _EQTRANS
    if _EQTRANS is None:
        _EQTRANS = _builtin_eqtrans()
    return _EQTRANS


def prepare_rules(rules, config: EngineConfig) -> tuple[Rule, ...]:
    """Validate name uniqueness and append the structural eqtrans rule.

    The same rule arriving twice (say via a problem's include and --rules)
    is fine; two different rules under one name are not.
    """
    out: list[Rule] = []
    by_name: dict[str, Rule] = {}
    for rule in rules:
        prior = by_name.get(rule.name)
        if prior is None:
            by_name[rule.name] = rule
            out.append(rule)
            continue
        same = (
            prior.variables == rule.variables
            and prior.premises == rule.premises
            and prior.ndg_premises == rule.ndg_premises
            and prior.conclusions == rule.conclusions
        )
        if not same:
            raise EngineError(f"rule name {rule.name!r} is defined twice, differently")
    if config.include_eqtrans and "eqtrans" not in by_name:
        out.append(eqtrans_rule())
    return tuple(out)


# --- fact database -----------------------------------------------------------


@dataclass
class Provenance:
    origin: str  # hypothesis | rule | lemma | trivial
    rule: str | None = None
    label: str | None = None
    firing: int | None = None


@dataclass
class Firing:
    """One applied rule instantiation (at least one novel conclusion)."""

    index: int
    rule: Rule
    subst: dict[str, int]
    premise_handles: tuple[int, ...]
    ndgs: tuple[Fact, ...]
    new_handles: tuple[int, ...]
    injected_handles: tuple[int, ...]


class FactDatabase:
    """Insertion-ordered canonical facts with per-kind and per-point indexes."""

    def __init__(self, points: PointTable, syms: Symmetries):
        self.points = points
        self.syms = syms
        self.facts: list[Fact] = []
        self.provenance: list[Provenance] = []
        self.firings: list[Firing] = []
        self._handles: dict[Fact, int] = {}
        self.by_kind: dict[str, list[int]] = {}
        self.by_kind_point: dict[tuple[str, int], list[int]] = {}
        self.lines: set[tuple[int, int]] = set()
        self._limit_facts: int | None = None

    def __contains__(self, fact: Fact) -> bool:
        return fact in self._handles

    def __len__(self) -> int:
        return len(self.facts)

    def handle_of(self, fact: Fact) -> int | None:
        return self._handles.get(fact)

    def insert(self, fact: Fact, prov: Provenance) -> int:
        """Store a canonical fact; returns the existing handle on duplicates."""
        existing = self._handles.get(fact)
        if existing is not None:
            return existing
        if self._limit_facts is not None and len(self.facts) >= self._limit_facts:
            raise _LimitStop("maxFacts")
        handle = len(self.facts)
        self.facts.append(fact)
        self.provenance.append(prov)
        self._handles[fact] = handle
        self.by_kind.setdefault(fact.kind, []).append(handle)
        for p in set(fact.points):
            self.by_kind_point.setdefault((fact.kind, p), []).append(handle)
        self.lines.update(_lines_of(fact))
        return handle

    def sorted_lines(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.lines))


def _lines_of(fact: Fact):
    slots = _LINE_SLOT_KINDS.get(fact.kind)
    p = fact.points
    if slots is not None:
        for a, b in slots:
            yield (p[a], p[b]) if p[a] < p[b] else (p[b], p[a])
    elif fact.kind in ("parallelogram", "rectangle", "coll"):
        # quadrilaterals contribute edges and diagonals; coll all its pairs
        for a, b in itertools.combinations(sorted(set(p)), 2):
            yield (a, b)


def known_lines(db: FactDatabase) -> set[tuple[int, int]]:
    """Point pairs usable as lines: every line slot plus quad edges/diagonals."""
    out: set[tuple[int, int]] = set()
    for fact in db.facts:
        out.update(_lines_of(fact))
    return out


# --- matching ----------------------------------------------------------------


@dataclass(frozen=True)
class Instantiation:
    rule: Rule
    premise_facts: tuple[Fact, ...]
    enum_binding: tuple[tuple[int, int], ...]
    subst: dict[str, int] = field(compare=False, hash=False, default_factory=dict)
    ndgs: tuple[Fact, ...] = ()
    conclusions: tuple[Fact, ...] = ()


def _resolve_const(name: str, points: PointTable) -> int | None:
    return points.id_of(name)


@lru_cache(maxsize=8192)
def _atom_plan(atom: Atom) -> tuple[tuple[bool, str], ...]:
    """(is_var, name) per argument slot, precomputed for the match loops."""
    return tuple((t.is_var, t.name) for t in atom.args)


def _unify(atom: Atom, pts, theta: dict[str, int], points: PointTable) -> dict[str, int] | None:
    out = theta
    copied = False
    for (is_var, name), p in zip(_atom_plan(atom), pts):
        if is_var:
            bound = out.get(name)
            if bound is None:
                if not copied:
                    out = dict(out)
                    copied = True
                out[name] = p
            elif bound != p:
                return None
        else:
            cid = _resolve_const(name, points)
            if cid is None or cid != p:
                return None
    return out


def _variant_span(fact: Fact, atom: Atom, theta: dict[str, int], syms, points: PointTable):
    """Orbit variants of ``fact`` agreeing with every already-bound slot.

    Bound slots (variables in ``theta`` plus constants) are bisected against
    a keyed ordering of the orbit, so candidates with incompatible bound
    points cost O(log |orbit|) instead of a scan.
    """
    bound: list[tuple[int, int]] = []
    unbound: list[int] = []
    for i, (is_var, name) in enumerate(_atom_plan(atom)):
        p = theta.get(name) if is_var else _resolve_const(name, points)
        if p is None:
            if not is_var:
                return ()  # unresolved constant: unmatchable
            unbound.append(i)
        else:
            bound.append((i, p))
    if not bound:
        return orbit_tuples(fact, syms)
    keyorder = tuple(i for i, _ in bound) + tuple(unbound)
    keys, variants = orbit_keyed(fact.kind, fact.points, syms, keyorder)
    prefix = tuple(p for _, p in bound)
    lo = bisect_left(keys, prefix)
    hi = bisect_left(keys, prefix[:-1] + (prefix[-1] + 1,))
    return variants[lo:hi]


def _ground(atom: Atom, theta: dict[str, int], points: PointTable):
    pts = []
    for term in atom.args:
        if term.is_var:
            p = theta.get(term.name)
        else:
            p = _resolve_const(term.name, points)
        if p is None:
            return None
        pts.append(p)
    return tuple(pts)


def _first_assignment(rule: Rule, facts, syms: Symmetries, points: PointTable):
    """First variant assignment unifying every premise with its given fact."""
    n = len(rule.premises)

    def walk(i: int, theta: dict[str, int]):
        if i == n:
            return theta
        atom = rule.premises[i]
        fact = facts[i]
        if fact.kind != atom.predicate:
            return None
        for variant in orbit_tuples(fact, syms):
            t2 = _unify(atom, variant, theta, points)
            if t2 is not None:
                result = walk(i + 1, t2)
                if result is not None:
                    return result
        return None

    return walk(0, {})


def instantiate(rule: Rule, facts, enum_binding, syms: Symmetries, points: PointTable) -> Instantiation | None:
    """Deterministic ground application of a rule to one premise combination.

    Content depends only on the combination (plus enum binding), never on
    how the join discovered it. Returns None when the combination does not
    actually satisfy the premises, when a proviso cannot be stated (it would
    be degenerate, hence unsatisfiable), or when no conclusion survives.
    """
    theta = _first_assignment(rule, facts, syms, points)
    if theta is None:
        return None
    for (v1, v2), line in zip(rule.enum_pairs, enum_binding):
        theta[v1], theta[v2] = line
    ndgs = []
    for atom in rule.ndg_premises:
        pts = _ground(atom, theta, points)
        if pts is None:
            return None
        try:
            ndgs.append(canon(make_fact(atom.predicate, pts), syms))
        except GeometryError:
            return None
    conclusions: list[Fact] = []
    for atom in rule.conclusions:
        pts = _ground(atom, theta, points)
        if pts is None:
            return None
        try:
            fact = canon(make_fact(atom.predicate, pts), syms)
        except GeometryError:
            continue  # degenerate conclusion: nothing to assert
        if fact not in conclusions:
            conclusions.append(fact)
    if not conclusions:
        return None
    return Instantiation(
        rule=rule,
        premise_facts=tuple(facts),
        enum_binding=tuple(enum_binding),
        subst=theta,
        ndgs=tuple(ndgs),
        conclusions=tuple(conclusions),
    )


def _enum_bindings(rule: Rule, lines) -> list[tuple[tuple[int, int], ...]]:
    if not rule.enum_pairs:
        return [()]
    return [binding for binding in itertools.product(lines, repeat=len(rule.enum_pairs))]


def _candidate_handles(db: FactDatabase, atom: Atom, theta: dict[str, int]) -> list[int]:
    """Index-backed candidate selection: narrowest per-point list if any arg is bound."""
    kind = atom.predicate
    best: list[int] | None = None
    for term in atom.args:
        pid = theta.get(term.name) if term.is_var else _resolve_const(term.name, db.points)
        if term.is_var and pid is None:
            continue
        if pid is None:
            return []  # unresolved constant: the premise can never match
        lst = db.by_kind_point.get((kind, pid), [])
        if best is None or len(lst) < len(best):
            best = lst
    if best is not None:
        return best
    return db.by_kind.get(kind, [])


def match_new(rule: Rule, new_handle: int, db: FactDatabase, lines, config: EngineConfig | None = None):
    """All de-duplicated instantiations of ``rule`` that use the new fact.

    Every positive premise is matched under the full symmetry orbit of the
    candidate fact; a ground missing premise that is reflexively trivial is
    supplied for injection. Instantiations are keyed by the premise fact
    combination plus enumeration binding. Non-degeneracy premises are
    instantiated but never looked up.
    """
    syms = db.syms
    new_fact = db.facts[new_handle]
    premises = rule.premises
    n = len(premises)
    out: list[Instantiation] = []
    seen: set = set()
    bindings = _enum_bindings(rule, lines)
    if not bindings:
        return out

    chosen: list[Fact | None] = [None] * n

    def extend(order_pos: int, order: list[int], theta: dict[str, int]):
        if order_pos == n:
            combo = tuple(chosen)  # all slots filled
            for binding in bindings:
                key = (combo, binding)
                if key in seen:
                    continue
                seen.add(key)
                inst = instantiate(rule, combo, binding, syms, db.points)
                if inst is not None:
                    out.append(inst)
            return
        idx = order[order_pos]
        atom = premises[idx]
        if idx == order[0]:
            source_facts = (new_fact,)
        else:
            grounded = _ground(atom, theta, db.points)
            if grounded is not None:
                try:
                    fact = canon(make_fact(atom.predicate, grounded), syms)
                except GeometryError:
                    return
                if fact in db or is_reflexive_trivial(fact):
                    chosen[idx] = fact
                    extend(order_pos + 1, order, theta)
                    chosen[idx] = None
                return
            source_facts = tuple(db.facts[h] for h in _candidate_handles(db, atom, theta))
        for fact in source_facts:
            if fact.kind != atom.predicate:
                continue
            for variant in _variant_span(fact, atom, theta, syms, db.points):
                t2 = _unify(atom, variant, theta, db.points)
                if t2 is not None:
                    chosen[idx] = fact
                    extend(order_pos + 1, order, t2)
                    chosen[idx] = None

    for p_star in range(n):
        if premises[p_star].predicate != new_fact.kind:
            continue
        order = [p_star] + [i for i in range(n) if i != p_star]
        extend(0, order, {})
    return out


def inject_trivial(db: FactDatabase, fact: Fact) -> int | None:
    """Add a reflexive fact needed by a join; None when not reflexive."""
    if not is_reflexive_trivial(fact):
        return None
    return db.insert(fact, Provenance(origin="trivial"))


# --- saturation ----------------------------------------------------------------


@dataclass
class Stats:
    pops: int = 0
    matched: int = 0
    firings: int = 0
    injected: int = 0
    facts_by_kind: dict[str, int] = field(default_factory=dict)
    firings_by_rule: dict[str, int] = field(default_factory=dict)
    elapsed: float = 0.0


@dataclass
class Fixpoint:
    db: FactDatabase
    stats: Stats
    exhausted: bool
    limit: str | None = None


def saturate(hypotheses, rules, limits: Limits | None = None, config: EngineConfig | None = None, points: PointTable | None = None) -> Fixpoint:
    """Semi-naive closure of the hypotheses under the rules (FIFO worklist)."""
    limits = limits or Limits()
    config = config or EngineConfig()
    points = points if points is not None else PointTable()
    syms = make_symmetries(config.eqangle_exchange)
    active = prepare_rules(rules, config)
    db = FactDatabase(points, syms)
    db._limit_facts = limits.max_facts
    stats = Stats()
    started = time.monotonic()
    limit: str | None = None
    enum_kinds = {a.predicate for r in active if r.enum_pairs for a in r.premises}

    def all_pair_lines():
        ids = range(len(points))
        return tuple(itertools.combinations(ids, 2))

    try:
        for h in hypotheses:
            db.insert(canon(h, syms), Provenance(origin="hypothesis"))
        work: deque[int] = deque(range(len(db.facts)))
        while work:
            if time.monotonic() - started > limits.time_budget:
                raise _LimitStop("timeBudget")
            handle = work.popleft()
            stats.pops += 1
            lines_before = len(db.lines)
            lines = all_pair_lines() if config.all_pairs_enumeration else db.sorted_lines()
            for rule in active:
                for inst in match_new(rule, handle, db, lines, config):
                    stats.matched += 1
                    if stats.matched > limits.max_firings:
                        raise _LimitStop("maxFirings")
                    if all(c in db for c in inst.conclusions):
                        continue
                    injected = []
                    for fact in inst.premise_facts:
                        if fact not in db:
                            ih = inject_trivial(db, fact)
                            if ih is None:  # pragma: no cover - guarded at match time
                                break
                            injected.append(ih)
                            work.append(ih)
                            stats.injected += 1
                    premise_handles = tuple(db.handle_of(f) for f in inst.premise_facts)
                    if any(h is None for h in premise_handles):  # pragma: no cover
                        continue
                    origin = "lemma" if rule.source == "lemma" else "rule"
                    firing_index = len(db.firings)
                    new_handles = []
                    for fact in inst.conclusions:
                        if fact in db:
                            continue
                        ch = db.insert(
                            fact,
                            Provenance(origin=origin, rule=rule.name, label=rule.label, firing=firing_index),
                        )
                        new_handles.append(ch)
                        work.append(ch)
                    if not new_handles:
                        continue
                    db.firings.append(
                        Firing(
                            index=firing_index,
                            rule=rule,
                            subst=inst.subst,
                            premise_handles=premise_handles,
                            ndgs=inst.ndgs,
                            new_handles=tuple(new_handles),
                            injected_handles=tuple(injected),
                        )
                    )
                    stats.firings += 1
                    stats.firings_by_rule[rule.label] = stats.firings_by_rule.get(rule.label, 0) + 1
            if len(db.lines) > lines_before and enum_kinds and not config.all_pairs_enumeration:
                for kind in sorted(enum_kinds):
                    work.extend(db.by_kind.get(kind, ()))
    except _LimitStop as stop:
        limit = stop.which
    stats.elapsed = time.monotonic() - started
    for fact in db.facts:
        stats.facts_by_kind[fact.kind] = stats.facts_by_kind.get(fact.kind, 0) + 1
    return Fixpoint(db=db, stats=stats, exhausted=limit is None, limit=limit)


def query(db: FactDatabase, goal: Fact) -> int | None:
    """Handle of the canonical form of ``goal`` if present."""
    return db.handle_of(canon(goal, db.syms))


# --- problems and proving -----------------------------------------------------


@dataclass
class Problem:
    points: PointTable
    hypotheses: list[Fact]
    goals: list[Fact]
    rule_units: list[SourceUnit]
    name: str = "problem"
    origin: str = "<input>"


def load_problem_text(text: str, origin: str = "<input>", loader=None) -> Problem:
    units, directives = parse_units(text, origin)
    if loader is None:
        def loader(path):
            with open(path, "r", encoding="ascii") as fh:
                return fh.read()
    import posixpath

    units = resolve_includes(units, directives, posixpath.dirname(origin) or ".", loader)
    conjectures = [u for u in units if u.role == "conjecture"]
    if len(conjectures) != 1:
        raise FofError(
            f"a problem needs exactly one conjecture, found {len(conjectures)}", origin
        )
    conjecture = conjectures[0]
    points = PointTable()
    hypotheses: list[Fact] = []
    rule_units: list[SourceUnit] = []

    def ground_atom(atom: Atom, theta: dict[str, str]) -> Fact:
        pts = tuple(points.intern(theta.get(t.name, t.name)) for t in atom.args)
        try:
            return make_fact(atom.predicate, pts)
        except GeometryError as exc:
            raise FofError(str(exc), origin) from None

    for unit in units:
        if unit.role != "axiom":
            continue
        if unit.formula.variables:
            rule_units.append(unit)
        else:
            if unit.formula.ndg_premises or unit.formula.premises:
                raise FofError(
                    f"ground axiom {unit.name!r} must be a plain fact", unit.origin, unit.line
                )
            for atom in unit.formula.conclusions:
                hypotheses.append(ground_atom(atom, {}))

    # Skolemize the conjecture: each quantified variable names a fresh point.
    theta = {v: v for v in conjecture.formula.variables}
    for v in conjecture.formula.variables:
        points.intern(v)
    if conjecture.formula.ndg_premises:
        raise FofError("negated premises are not allowed in a conjecture", conjecture.origin)
    for atom in conjecture.formula.premises:
        hypotheses.append(ground_atom(atom, theta))
    goals = [ground_atom(atom, theta) for atom in conjecture.formula.conclusions]
    if not hypotheses:
        raise FofError("problem has no hypotheses", origin)
    return Problem(
        points=points,
        hypotheses=hypotheses,
        goals=goals,
        rule_units=rule_units,
        name=conjecture.name,
        origin=origin,
    )


def load_problem(path: str) -> Problem:
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    return load_problem_text(text, origin=path)


@dataclass
class ProofResult:
    proved: bool
    fixpoint: Fixpoint
    goals: list[Fact]
    trace: object | None = None  # ProofTrace, built by prooftrace
    missing: list[Fact] = field(default_factory=list)
    advice: str | None = None


def prove(problem: Problem, rules, limits: Limits | None = None, config: EngineConfig | None = None) -> ProofResult:
    """Saturate and decide the conjecture by membership; extract a trace on success."""
    from .prooftrace import extract_trace

    fixpoint = saturate(problem.hypotheses, rules, limits, config, problem.points)
    missing = [g for g in problem.goals if query(fixpoint.db, g) is None]
    if missing or fixpoint.limit:
        return ProofResult(
            proved=False,
            fixpoint=fixpoint,
            goals=problem.goals,
            missing=missing,
            advice=ADVICE_NOT_PROVED if not fixpoint.limit else None,
        )
    trace = extract_trace(fixpoint, problem.goals)
    return ProofResult(proved=True, fixpoint=fixpoint, goals=problem.goals, trace=trace)
