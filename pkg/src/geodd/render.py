"""Trace renderers: the four-column derivation table, natural-language prose
driven by per-rule sentence templates, and a versioned machine format.
"""

from __future__ import annotations

import hashlib
import json
import re
from dataclasses import dataclass, field

from .core import Fact, GeometryError, PointTable, make_fact, make_symmetries
from .prooftrace import ProofStep, ProofTrace

STRUCTURED_FORMAT = "geodd-trace/1"


class RenderError(ValueError):
    pass


def fact_text(fact: Fact, points: PointTable) -> str:
    return f"{fact.kind}({','.join(points.name_of(p) for p in fact.points)})"


def parse_fact_text(text: str, points: PointTable, intern: bool = False) -> Fact:
    m = re.fullmatch(r"\s*([a-z]+)\(([^()]*)\)\s*", text)
    if not m:
        raise RenderError(f"bad fact syntax: {text!r}")
    kind, args = m.group(1), [a.strip() for a in m.group(2).split(",")]
    pts = []
    for name in args:
        pid = points.intern(name) if intern else points.id_of(name)
        if pid is None:
            raise RenderError(f"unknown point {name!r} in {text!r}")
        pts.append(pid)
    try:
        return make_fact(kind, pts)
    except GeometryError as exc:
        raise RenderError(str(exc)) from None


# --- the derivation table ------------------------------------------------------


def render_table(trace: ProofTrace) -> str:
    """Monospaced four-column table; the known-facts column is cumulative,
    so a fact shows up there only the first time a step uses it."""
    points = trace.points
    headers = ("New Facts", "Rules", "Already Known Facts", "ndg.")
    rows: list[tuple[list[str], list[str], list[str], list[str]]] = []
    rows.append(([fact_text(f, points) for f in trace.hypotheses], ["by hyp."], [], []))
    shown: set[Fact] = set()
    for step in trace.steps:
        used = []
        for fact in step.used_facts:
            if fact not in shown:
                shown.add(fact)
                used.append(fact_text(fact, points))
        rows.append(
            (
                [fact_text(f, points) for f in step.new_facts],
                [step.label],
                used,
                [f"~{fact_text(f, points)}" for f in step.ndgs],
            )
        )
    widths = [len(h) for h in headers]
    for row in rows:
        for i, cell in enumerate(row):
            for line in cell:
                widths[i] = max(widths[i], len(line))
    sep = "-+-".join("-" * w for w in widths)

    def emit(cells) -> list[str]:
        height = max(1, *(len(c) for c in cells))
        out = []
        for k in range(height):
            parts = [
                (cells[i][k] if k < len(cells[i]) else "").ljust(widths[i]) for i in range(4)
            ]
            out.append(" | ".join(parts).rstrip())
        return out

    lines = emit([[h] for h in headers])
    lines.append(sep)
    for row in rows:
        lines.extend(emit(row))
        lines.append(sep)
    return "\n".join(lines) + "\n"


# --- natural language ----------------------------------------------------------

STRUCTURAL_LABELS = {"eqtrans", "trivial"}

DEFAULT_TEMPLATES = {
    "R1": "Since the lines {line:A,B} and {line:D,C} are parallel and the lines {line:A,D} and {line:B,C} are parallel, {poly:A,B,C,D} is a parallelogram.",
    "R1a": "{poly:A,B,C,D} is a parallelogram, so the lines {line:A,B} and {line:D,C} are parallel.",
    "R1b": "{poly:A,B,C,D} is a parallelogram, so the lines {line:A,D} and {line:B,C} are parallel.",
    "D40": "Since the lines {line:A,B} and {line:C,D} are parallel, the angles {angle:A,B,P,Q} and {angle:C,D,P,Q} are equal.",
    "D61": "Since the triangles {tri:A,B,C} and {tri:P,Q,R} are similar and {seg:A,B} = {seg:P,Q}, by the a.s.a. criterion of equality the triangles {tri:A,B,C} and {tri:P,Q,R} are equal.",
    "R4": "Since {seg:A,B} = {seg:P,Q}, {seg:A,C} = {seg:P,R} and {seg:B,C} = {seg:Q,R}, the triangles {tri:A,B,C} and {tri:P,Q,R} are equal.",
    "R4a": "The triangles {tri:A,B,C} and {tri:P,Q,R} are equal, so {seg:A,B} = {seg:P,Q}.",
    "R4b": "The triangles {tri:A,B,C} and {tri:P,Q,R} are equal, so {seg:A,C} = {seg:P,R}.",
    "R4c": "The triangles {tri:A,B,C} and {tri:P,Q,R} are equal, so {seg:B,C} = {seg:Q,R}.",
    "R5": "Since the angles {angle:D,A,A,B}, {angle:A,B,B,C}, {angle:B,C,C,D} and {angle:C,D,D,A} are all right angles, {poly:A,B,C,D} is a rectangle.",
    "R5a": "{poly:A,B,C,D} is a rectangle, so the angle {angle:D,A,A,B} is a right angle.",
    "R5b": "{poly:A,B,C,D} is a rectangle, so the angle {angle:A,B,B,C} is a right angle.",
    "R5c": "{poly:A,B,C,D} is a rectangle, so the angle {angle:B,C,C,D} is a right angle.",
    "R5d": "{poly:A,B,C,D} is a rectangle, so the angle {angle:C,D,D,A} is a right angle.",
    "R5e": "{poly:A,B,C,D} is a rectangle, so the lines {line:A,B} and {line:D,C} are parallel.",
    "R5f": "{poly:A,B,C,D} is a rectangle, so the lines {line:A,D} and {line:B,C} are parallel.",
    "R6": "The angle {angle:A,B,B,C} is a right angle, so the lines {line:A,B} and {line:B,C} are perpendicular.",
    "D9": "Two lines perpendicular to a third line are parallel: {line:A,B} and {line:C,D} are both perpendicular to {line:E,F}, so {line:A,B} and {line:C,D} are parallel.",
    "R8": "The angles {angle:A,B,B,C} and {angle:D,E,E,F} are right angles with {seg:A,B} = {seg:D,E} and {seg:B,C} = {seg:E,F}, so the hypotenuses satisfy {seg:A,C} = {seg:D,F}.",
    "D58": "Since the angles {angle:A,B,B,C} and {angle:P,Q,Q,R} are equal and the angles {angle:A,C,B,C} and {angle:P,R,Q,R} are equal, the triangles {tri:A,B,C} and {tri:P,Q,R} are similar.",
    "eqtrans": "The angles {angle:A1,A2,B1,B2} and {angle:E1,E2,F1,F2} are both equal to {angle:C1,C2,D1,D2}, hence equal to each other.",
}

_LEMMA_TEMPLATE = "By {label} (proved earlier), since {premises}, we get {conclusions}."


@dataclass
class TemplateCatalog:
    """Sentence template per rule label; validated against the active rules."""

    templates: dict[str, str] = field(default_factory=lambda: dict(DEFAULT_TEMPLATES))

    def validate(self, rules) -> None:
        missing = []
        for rule in rules:
            if rule.label in self.templates:
                continue
            if rule.source == "lemma":
                self.templates[rule.label] = _LEMMA_TEMPLATE
            else:
                missing.append(rule.label)
        if missing:
            raise RenderError(f"no sentence template for rule(s): {', '.join(sorted(missing))}")

    def for_label(self, label: str) -> str:
        try:
            return self.templates[label]
        except KeyError:
            raise RenderError(f"no sentence template for rule {label!r}") from None


def _angle_name(p1: str, p2: str, p3: str, p4: str) -> str:
    """Three-letter vertex form when the two lines share a point, else the
    full-angle bracket form."""
    l1, l2 = {p1, p2}, {p3, p4}
    shared = l1 & l2
    if len(shared) == 1:
        v = shared.pop()
        a = (l1 - {v}).pop()
        b = (l2 - {v}).pop()
        return f"{a}{v}{b}"
    return f"[{p1}{p2},{p3}{p4}]"


_SLOT_RE = re.compile(r"\{(pt|seg|line|tri|poly|angle):([A-Za-z0-9_,]+)\}")


def _fill_template(template: str, subst: dict[str, int], points: PointTable) -> str:
    def repl(m: re.Match) -> str:
        kind, raw = m.group(1), m.group(2).split(",")
        try:
            names = [points.name_of(subst[v]) for v in raw]
        except KeyError as exc:
            raise RenderError(f"template slot variable {exc} is unbound") from None
        if kind == "pt":
            return names[0]
        if kind in ("seg", "line"):
            return "".join(names)
        if kind in ("tri", "poly"):
            return "[" + "".join(names) + "]"
        return _angle_name(*names)

    return _SLOT_RE.sub(repl, template)


def natural_fact(fact: Fact, points: PointTable) -> str:
    n = [points.name_of(p) for p in fact.points]
    kind = fact.kind
    if kind == "coll":
        return f"{n[0]}, {n[1]} and {n[2]} are collinear"
    if kind == "para":
        return f"{n[0]}{n[1]} is parallel to {n[2]}{n[3]}"
    if kind == "perp":
        return f"{n[0]}{n[1]} is perpendicular to {n[2]}{n[3]}"
    if kind == "cong":
        return f"{n[0]}{n[1]} = {n[2]}{n[3]}"
    if kind == "rightangle":
        return f"the angle {_angle_name(*n)} is a right angle"
    if kind == "eqangle":
        return f"the angles {_angle_name(*n[:4])} and {_angle_name(*n[4:])} are equal"
    if kind == "simtri":
        return f"the triangles [{''.join(n[:3])}] and [{''.join(n[3:])}] are similar"
    if kind == "contri":
        return f"the triangles [{''.join(n[:3])}] and [{''.join(n[3:])}] are equal"
    if kind == "parallelogram":
        return f"[{''.join(n)}] is a parallelogram"
    if kind == "rectangle":
        return f"[{''.join(n)}] is a rectangle"
    raise RenderError(f"unknown predicate {kind!r}")  # pragma: no cover


def _lemma_sentence(step: ProofStep, points: PointTable) -> str:
    premises = "; ".join(natural_fact(f, points) for f in step.used_facts) or "the hypotheses"
    conclusions = "; ".join(natural_fact(f, points) for f in step.new_facts)
    return _LEMMA_TEMPLATE.format(label=step.label, premises=premises, conclusions=conclusions)


def render_natural(trace: ProofTrace, templates: TemplateCatalog | None = None) -> str:
    """One sentence per substantive step; eqtrans and trivial-injection steps
    fold into the next sentence as a parenthetical note."""
    templates = templates or TemplateCatalog()
    points = trace.points
    paragraphs = [
        "Assume: " + "; ".join(natural_fact(f, points) for f in trace.hypotheses) + "."
    ]
    if not trace.steps:
        paragraphs.append("Nothing to derive: the conclusion is a hypothesis.")
    pending: list[str] = []
    sentences: list[str] = []
    for step in trace.steps:
        if step.label in STRUCTURAL_LABELS:
            if step.label == "trivial":
                pending.append(
                    "using the trivial equality " + "; ".join(fact_text(f, points) for f in step.new_facts)
                )
            else:
                pending.append(
                    "chaining equal angles to get " + "; ".join(fact_text(f, points) for f in step.new_facts)
                )
            continue
        if step.kind == "lemma":
            sentence = _lemma_sentence(step, points)
        else:
            sentence = _fill_template(templates.for_label(step.label), step.subst, points)
        if pending:
            note = " (" + "; ".join(pending) + ")"
            sentence = sentence[:-1] + note + "." if sentence.endswith(".") else sentence + note
            pending = []
        sentences.append(f"By rule {step.label}: {sentence}" if step.kind != "lemma" else sentence)
    if pending:
        sentences.append("(" + "; ".join(pending) + ")")
    paragraphs.extend(sentences)
    paragraphs.append(
        "Therefore " + "; ".join(natural_fact(f, points) for f in trace.goals) + "."
    )
    if trace.ndg_set:
        nd = "; ".join("it is not the case that " + natural_fact(f, points) for f in trace.ndg_set)
        paragraphs.append(f"Non-degeneracy conditions assumed with the hypotheses: {nd}.")
    return "\n".join(paragraphs) + "\n"


# --- structured format ----------------------------------------------------------


def config_hash(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True).encode("ascii")).hexdigest()


def render_structured(trace: ProofTrace, catalog: dict | None = None, config: dict | None = None) -> str:
    points = trace.points
    config = config or {}
    doc = {
        "format": STRUCTURED_FORMAT,
        "points": list(points.names()),
        "hypotheses": [fact_text(f, points) for f in trace.hypotheses],
        "goals": [fact_text(f, points) for f in trace.goals],
        "steps": [
            {
                "kind": step.kind,
                "rule": step.rule_name,
                "label": step.label,
                "substitution": {v: points.name_of(p) for v, p in sorted(step.subst.items())},
                "used": [fact_text(f, points) for f in step.used_facts],
                "new": [fact_text(f, points) for f in step.new_facts],
                "ndgs": [{"negated": True, "atom": fact_text(f, points)} for f in step.ndgs],
            }
            for step in trace.steps
        ],
        "ndg_set": [{"negated": True, "atom": fact_text(f, points)} for f in trace.ndg_set],
        "catalog": catalog or {},
        "config": config,
        "config_hash": config_hash(config),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def parse_structured(text: str) -> tuple[ProofTrace, dict]:
    """Rebuild a trace from the machine format; returns (trace, document)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RenderError(f"not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or doc.get("format") != STRUCTURED_FORMAT:
        raise RenderError(
            f"unknown trace format {doc.get('format')!r} (expected {STRUCTURED_FORMAT!r})"
        )
    points = PointTable()
    for name in doc.get("points", []):
        points.intern(name)
    syms = make_symmetries(bool(doc.get("config", {}).get("eqangle_exchange", False)))

    def fact(s: str) -> Fact:
        return parse_fact_text(s, points)

    steps = []
    for i, raw in enumerate(doc.get("steps", [])):
        subst = {v: points.id_of(n) for v, n in raw.get("substitution", {}).items()}
        if any(p is None for p in subst.values()):
            raise RenderError(f"step {i + 1}: substitution names an unknown point")
        steps.append(
            ProofStep(
                kind=raw.get("kind", "rule"),
                label=raw["label"],
                rule_name=raw.get("rule"),
                new_facts=tuple(fact(s) for s in raw.get("new", [])),
                used_facts=tuple(fact(s) for s in raw.get("used", [])),
                ndgs=tuple(fact(e["atom"]) for e in raw.get("ndgs", [])),
                subst=subst,
                position=i,
            )
        )
    trace = ProofTrace(
        hypotheses=[fact(s) for s in doc.get("hypotheses", [])],
        steps=steps,
        goals=[fact(s) for s in doc.get("goals", [])],
        ndg_set=[fact(e["atom"]) for e in doc.get("ndg_set", [])],
        points=points,
        syms=syms,
    )
    return trace, doc
