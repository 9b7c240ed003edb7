"""Built-in rule catalogs and catalog file loading.

The ``year7`` catalog carries the parallelogram/rectangle/triangle rules
(R1-R8 plus the database rules D9, D40, D58, D61) together with the
structural angle-chaining rule ``eqtrans``. Two source listings circulate
with unbalanced parentheses (ruleD9 and ruleD58); the embedded text ships
them balanced, while the parser keeps rejecting the raw variants.
"""

from __future__ import annotations

import os

from .fof import FofError, SourceUnit, parse_units, resolve_includes

YEAR7_TEXT = """\
% year7 rule catalog: quadrilateral and triangle rules in the FOF subset.

fof(ruleR1,axiom,(![A,B,C,D] :
           (para(A,B,D,C) & para(A,D,B,C) => parallelogram(A,B,C,D)) )).
fof(ruleR1a,axiom,(![A,B,C,D] :
           (parallelogram(A,B,C,D) => para(A,B,D,C)) )).
fof(ruleR1b,axiom,(![A,B,C,D] :
           (parallelogram(A,B,C,D) => para(A,D,B,C)) )).

% Alternate interior angles of parallels cut by a transversal.
fof(ruleD40,axiom,(![A,B,C,D,P,Q] :
            (para(A,B,C,D) => eqangle(A,B,P,Q,C,D,P,Q)) )).

% Similar triangles with one pair of congruent corresponding sides.
fof(rulerD61,axiom,(![A,B,C,P,Q,R] :
             (simtri(A,B,C,P,Q,R) & cong(A,B,P,Q) => contri(A,B,C,P,Q,R)) )).

fof(ruleR4,axiom,(![A,B,C,P,Q,R] :
           (cong(A,B,P,Q) & cong(A,C,P,R) & cong(B,C,Q,R)
           => contri(A,B,C,P,Q,R)) )).
fof(ruleR4a,axiom,(![A,B,C,P,Q,R] :
           (contri(A,B,C,P,Q,R) => cong(A,B,P,Q) ) )).
fof(ruleR4b,axiom,(![A,B,C,P,Q,R] :
           (contri(A,B,C,P,Q,R) => cong(A,C,P,R)) )).
fof(ruleR4c,axiom,(![A,B,C,P,Q,R] :
           (contri(A,B,C,P,Q,R) => cong(B,C,Q,R)) )).

fof(ruleR5,axiom,(![A,B,C,D] :
           (rightangle(D,A,A,B) & rightangle(A,B,B,C) &
            rightangle(B,C,C,D) & rightangle(C,D,D,A)
           => rectangle(A,B,C,D)) )).
fof(ruleR5a,axiom,(![A,B,C,D] :
           (rectangle(A,B,C,D) => rightangle(D,A,A,B)) )).
fof(ruleR5b,axiom,(![A,B,C,D] :
           (rectangle(A,B,C,D) => rightangle(A,B,B,C)) )).
fof(ruleR5c,axiom,(![A,B,C,D] :
           (rectangle(A,B,C,D) => rightangle(B,C,C,D)) )).
fof(ruleR5d,axiom,(![A,B,C,D] :
           (rectangle(A,B,C,D) => rightangle(C,D,D,A)) )).
fof(ruleR5e,axiom,(![A,B,C,D] :
           (rectangle(A,B,C,D) => para(A,B,D,C)) )).
fof(ruleR5f,axiom,(![A,B,C,D] :
           (rectangle(A,B,C,D) => para(A,D,B,C)) )).

fof(ruleR6,axiom,(![A,B,C] :
           (rightangle(A,B,B,C) => perp(A,B,B,C)) )).

% Two lines perpendicular to a third line are parallel.
fof(ruleD9,axiom,(![A,B,C,D,E,F] :
           (perp(A,B,E,F) & perp(C,D,E,F) => para(A,B,C,D)) )).

% Right triangles with two equal legs have equal hypotenuses.
fof(ruleR8,axiom,(![A,B,C,D,E,F] :
            (rightangle(A,B,B,C) & rightangle(D,E,E,F) &
             cong(A,B,D,E) & cong(B,C,E,F) => cong(A,C,D,F)) )).

fof(ruleD58,axiom,(![A,B,C,P,Q,R] :
            ((eqangle(A,B,B,C,P,Q,Q,R) & eqangle(A,C,B,C,P,R,Q,R) &
             ~coll(A,B,C)) => simtri(A,B,C,P,Q,R)) )).

% Structural closure: equal full angles chain through a shared angle.
fof(eqtrans,axiom,(![A1,A2,B1,B2,C1,C2,D1,D2,E1,E2,F1,F2] :
            (eqangle(A1,A2,B1,B2,C1,C2,D1,D2) & eqangle(C1,C2,D1,D2,E1,E2,F1,F2)
            => eqangle(A1,A2,B1,B2,E1,E2,F1,F2)) )).
"""

# Display labels for trace and rendering output, keyed by unit name.
RULE_LABELS = {
    "ruleR1": "R1",
    "ruleR1a": "R1a",
    "ruleR1b": "R1b",
    "ruleD40": "D40",
    "rulerD61": "D61",
    "ruleR4": "R4",
    "ruleR4a": "R4a",
    "ruleR4b": "R4b",
    "ruleR4c": "R4c",
    "ruleR5": "R5",
    "ruleR5a": "R5a",
    "ruleR5b": "R5b",
    "ruleR5c": "R5c",
    "ruleR5d": "R5d",
    "ruleR5e": "R5e",
    "ruleR5f": "R5f",
    "ruleR6": "R6",
    "ruleD9": "D9",
    "ruleR8": "R8",
    "ruleD58": "D58",
    "eqtrans": "eqtrans",
}

EMBEDDED = {"year7": YEAR7_TEXT}

CATALOG_DIR_ENV = "GEODD_CATALOG_DIR"


def label_for(unit_name: str) -> str:
    label = RULE_LABELS.get(unit_name)
    if label:
        return label
    for prefix in ("rule", "ruler"):
        if unit_name.startswith(prefix) and unit_name[len(prefix) :][:1].isupper():
            return unit_name[len(prefix) :]
    return unit_name


def _load_file(path: str) -> list[SourceUnit]:
    with open(path, "r", encoding="ascii") as fh:
        text = fh.read()
    units, directives = parse_units(text, path)
    return resolve_includes(units, directives, os.path.dirname(path) or ".", _read_text)


def _read_text(path: str) -> str:
    with open(path, "r", encoding="ascii") as fh:
        return fh.read()


def load_catalog(selector: str) -> list[SourceUnit]:
    """Catalog units by embedded name, catalog-directory name, or file path.

    Catalogs may only hold rules: conjecture units and ground fact units are
    rejected here (they belong in problem files).
    """
    if selector in EMBEDDED:
        units, directives = parse_units(EMBEDDED[selector], f"<builtin:{selector}>")
        units = resolve_includes(units, directives, ".", _read_text)
    else:
        path = selector
        if not os.path.exists(path):
            env_dir = os.environ.get(CATALOG_DIR_ENV)
            if env_dir:
                candidate = os.path.join(env_dir, selector)
                if not os.path.exists(candidate) and not selector.endswith(".ax"):
                    candidate = os.path.join(env_dir, selector + ".ax")
                path = candidate
        if not os.path.exists(path):
            raise FofError(f"no such catalog: {selector!r}")
        units = _load_file(path)
    for unit in units:
        if unit.role == "conjecture":
            raise FofError(
                f"conjecture unit {unit.name!r} is not allowed in a rule catalog",
                unit.origin,
                unit.line,
            )
        if not unit.formula.variables:
            raise FofError(
                f"ground fact unit {unit.name!r} belongs in a problem file, not a catalog",
                unit.origin,
                unit.line,
            )
    return units
