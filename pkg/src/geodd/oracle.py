"""Numeric evaluation of geometric predicates on planar coordinate models.

Random models act as a soundness audit for the saturation engine: every
derived fact must hold, within tolerance, on every sampled model of the
hypotheses. A clean audit is evidence, never a proof.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Fact, GeometryError, PointTable

RNG_NAME = "PCG64"  # numpy's default_rng bit generator, recorded in reports
DEFAULT_EPS = 1e-9
DEFAULT_MARGIN = 1e-3
_RESAMPLE_BUDGET = 1000


class OracleError(ValueError):
    """Model/fact mismatch: missing coordinates or a zero-length line."""


@dataclass
class Model:
    """Planar coordinates per point id, with a relative tolerance."""

    coords: dict[int, tuple[float, float]]
    tolerance: float = DEFAULT_EPS

    def scale(self) -> float:
        xs = [c[0] for c in self.coords.values()]
        ys = [c[1] for c in self.coords.values()]
        if not xs:
            return 1.0
        span = max(max(xs) - min(xs), max(ys) - min(ys))
        return span * span if span > 0 else 1.0


@dataclass
class ConstructionRecipe:
    """Seeded generator for models of one of the corpus constructions."""

    kind: str  # parallelogram | rectangle | freePoints
    point_names: tuple[str, ...]
    seed: int
    degeneracy_margin: float = DEFAULT_MARGIN

    def __post_init__(self) -> None:
        if self.kind not in ("parallelogram", "rectangle", "freePoints"):
            raise OracleError(f"unknown recipe kind {self.kind!r}")
        if self.degeneracy_margin <= 0:
            raise OracleError("degeneracy margin must be positive")
        if self.kind in ("parallelogram", "rectangle") and len(self.point_names) != 4:
            raise OracleError(f"{self.kind} recipe needs 4 points")


def _xy(model: Model, pid: int) -> tuple[float, float]:
    try:
        return model.coords[pid]
    except KeyError:
        raise OracleError(f"point id {pid} has no coordinates") from None


def _dir(model: Model, a: int, b: int) -> tuple[float, float]:
    ax, ay = _xy(model, a)
    bx, by = _xy(model, b)
    dx, dy = bx - ax, by - ay
    if dx == 0.0 and dy == 0.0:
        raise OracleError(f"zero-length line through point ids {a},{b}")
    return dx, dy


def _sq_dist(model: Model, a: int, b: int) -> float:
    ax, ay = _xy(model, a)
    bx, by = _xy(model, b)
    return (bx - ax) ** 2 + (by - ay) ** 2


def _line_angle(model: Model, a: int, b: int) -> float:
    dx, dy = _dir(model, a, b)
    return math.atan2(dy, dx) % math.pi


def _wrapped_mod_pi(x: float) -> float:
    return abs(math.remainder(x, math.pi))


def eval_fact(model: Model, fact: Fact) -> bool:
    """Truth of one fact on one model, tolerances relative to model scale."""
    eps = model.tolerance
    scale = model.scale()
    p = fact.points
    kind = fact.kind

    if kind == "coll":
        ax, ay = _xy(model, p[0])
        bx, by = _xy(model, p[1])
        cx, cy = _xy(model, p[2])
        cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
        return abs(cross) <= eps * scale
    if kind == "para":
        d1 = _dir(model, p[0], p[1])
        d2 = _dir(model, p[2], p[3])
        return abs(d1[0] * d2[1] - d1[1] * d2[0]) <= eps * scale
    if kind in ("perp", "rightangle"):
        d1 = _dir(model, p[0], p[1])
        d2 = _dir(model, p[2], p[3])
        return abs(d1[0] * d2[0] + d1[1] * d2[1]) <= eps * scale
    if kind == "cong":
        return abs(_sq_dist(model, p[0], p[1]) - _sq_dist(model, p[2], p[3])) <= eps * scale
    if kind == "eqangle":
        t1 = _line_angle(model, p[0], p[1])
        t2 = _line_angle(model, p[2], p[3])
        t3 = _line_angle(model, p[4], p[5])
        t4 = _line_angle(model, p[6], p[7])
        return _wrapped_mod_pi((t2 - t1) - (t4 - t3)) <= eps
    if kind == "simtri":
        s = (_sq_dist(model, p[0], p[1]), _sq_dist(model, p[0], p[2]), _sq_dist(model, p[1], p[2]))
        t = (_sq_dist(model, p[3], p[4]), _sq_dist(model, p[3], p[5]), _sq_dist(model, p[4], p[5]))
        tol = eps * scale * scale
        return abs(s[0] * t[1] - s[1] * t[0]) <= tol and abs(s[0] * t[2] - s[2] * t[0]) <= tol
    if kind == "contri":
        pairs = ((p[0], p[1], p[3], p[4]), (p[0], p[2], p[3], p[5]), (p[1], p[2], p[4], p[5]))
        return all(
            abs(_sq_dist(model, a, b) - _sq_dist(model, c, d)) <= eps * scale for a, b, c, d in pairs
        )
    if kind == "parallelogram":
        a, b, c, d = p
        return eval_fact(model, Fact("para", (a, b, d, c))) and eval_fact(
            model, Fact("para", (a, d, b, c))
        )
    if kind == "rectangle":
        a, b, c, d = p
        corners = ((d, a, a, b), (a, b, b, c), (b, c, c, d), (c, d, d, a))
        return all(eval_fact(model, Fact("rightangle", q)) for q in corners)
    raise GeometryError(f"unknown predicate {kind!r}")


def _non_degenerate(coords: list[tuple[float, float]], margin: float) -> bool:
    """Every point triple spans a triangle with |cross| above the margin."""
    n = len(coords)
    xs = [c[0] for c in coords]
    ys = [c[1] for c in coords]
    span = max(max(xs) - min(xs), max(ys) - min(ys)) if n > 1 else 0.0
    if span <= 0:
        return n <= 1
    scale = span * span
    for i in range(n):
        for j in range(i + 1, n):
            for k in range(j + 1, n):
                ax, ay = coords[i]
                bx, by = coords[j]
                cx, cy = coords[k]
                cross = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
                if abs(cross) <= margin * scale:
                    return False
    return True


def sample_model(recipe: ConstructionRecipe, tolerance: float = DEFAULT_EPS) -> Model:
    """Deterministic-in-seed model satisfying the recipe's defining facts exactly."""
    rng = np.random.default_rng(recipe.seed)
    n = len(recipe.point_names)
    for _ in range(_RESAMPLE_BUDGET):
        if recipe.kind == "parallelogram":
            a, b, c = (rng.uniform(0.0, 10.0, size=2) for _ in range(3))
            d = a + c - b
            coords = [a, b, c, d]
        elif recipe.kind == "rectangle":
            a = rng.uniform(0.0, 10.0, size=2)
            phi = rng.uniform(0.0, 2.0 * math.pi)
            u = np.array([math.cos(phi), math.sin(phi)])
            up = np.array([-u[1], u[0]])
            s = rng.uniform(1.0, 10.0)
            t = rng.uniform(1.0, 10.0)
            b = a + s * u
            c = b + t * up
            d = a + t * up
            coords = [a, b, c, d]
        else:
            coords = [rng.uniform(0.0, 10.0, size=2) for _ in range(n)]
        pts = [(float(c[0]), float(c[1])) for c in coords]
        if _non_degenerate(pts, recipe.degeneracy_margin):
            return Model({i: pts[i] for i in range(n)}, tolerance)
    raise OracleError(
        f"resample budget exhausted for {recipe.kind} recipe (margin {recipe.degeneracy_margin})"
    )


def model_satisfies(model: Model, hypotheses, ndg_atoms=()) -> bool:
    """Hypotheses all true and every non-degeneracy atom false."""
    return all(eval_fact(model, f) for f in hypotheses) and not any(
        eval_fact(model, f) for f in ndg_atoms
    )


def check_facts(models, facts) -> list[tuple[Fact, int]]:
    """(fact, model index) pairs where evaluation fails, sorted."""
    violations = []
    for idx, model in enumerate(models):
        for fact in facts:
            if not eval_fact(model, fact):
                violations.append((fact, idx))
    violations.sort(key=lambda v: (v[0].sort_key(), v[1]))
    return violations


def check_fixpoint(models, fixpoint) -> list[tuple[Fact, int]]:
    facts = fixpoint.db.facts if hasattr(fixpoint, "db") else list(fixpoint)
    return check_facts(models, facts)


def parse_model_file(text: str, points: PointTable, tolerance: float = DEFAULT_EPS) -> Model:
    """One point per line: ``NAME X Y``; ``#`` starts a comment line."""
    coords: dict[int, tuple[float, float]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 3:
            raise OracleError(f"model file line {lineno}: expected 'NAME X Y', got {raw!r}")
        name, xs, ys = parts
        pid = points.id_of(name)
        if pid is None:
            raise OracleError(f"model file line {lineno}: unknown point {name!r}")
        try:
            xy = (float(xs), float(ys))
        except ValueError:
            raise OracleError(f"model file line {lineno}: bad coordinates {raw!r}") from None
        if pid in coords:
            raise OracleError(f"model file line {lineno}: duplicate point {name!r}")
        coords[pid] = xy
    return Model(coords, tolerance)


def format_model(model: Model, points: PointTable) -> str:
    lines = [f"# geodd model ({RNG_NAME} audit format)"]
    for pid in sorted(model.coords):
        x, y = model.coords[pid]
        lines.append(f"{points.name_of(pid)} {x!r} {y!r}")
    return "\n".join(lines) + "\n"
