"""Scenario files: flat key = value text with a versioned schema tag.

A scenario pins everything a run needs: the space (alphabet, optional
transition rows, metric rate), the cocycle pair source (seeded or file), the
hidden conjugacy used to twist B, perturbation for negative controls, anchor
policy, and pipeline parameters.  Runs are fully deterministic given the seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np

from cocycle_rigidity.cocycles import Cocycle, load_generator
from cocycle_rigidity.symbolic import Point, ShiftSpace

SCHEMA = "scenario/1"


@dataclass
class Scenario:
    seed: int = 0
    alphabet: int = 2
    lam: float = math.log(2.0)
    transition: str = ""  # rows of 0/1 joined by ';', empty = full shift
    dim: int = 2
    window_radius: int = 0
    gen_source: str = "seeded"  # seeded | file:<path>
    gen_scale: float = 0.02
    twist_source: str = "none"  # none | seeded | file:<path>
    twist_radius: int = 0
    twist_scale: float = 0.3
    perturb: float = 0.0
    anchor: str = "fixed"  # fixed | period:<n> | point:<literal>
    horizon: int = 8
    tol: float = 1e-6
    samples: int = 100
    max_period: int = 6

    def to_text(self):
        lines = [f"schema = {SCHEMA}"]
        for f in fields(self):
            key = "lambda" if f.name == "lam" else f.name
            v = getattr(self, f.name)
            if isinstance(v, float):
                lines.append(f"{key} = {v:.17g}")
            else:
                lines.append(f"{key} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        pairs = {}
        for raw in text.splitlines():
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"bad scenario line: {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            pairs[key] = value
        if pairs.pop("schema", None) != SCHEMA:
            raise ValueError(f"scenario file must declare 'schema = {SCHEMA}'")
        known = {f.name for f in fields(cls)}
        kwargs = {}
        for key, value in pairs.items():
            key = "lam" if key == "lambda" else key
            if key not in known:
                raise ValueError(f"unknown scenario key {key!r}")
            default = getattr(cls(), key)
            if isinstance(default, bool):
                kwargs[key] = value.lower() in ("1", "true", "yes")
            elif isinstance(default, int):
                kwargs[key] = int(value)
            elif isinstance(default, float):
                kwargs[key] = float(value)
            else:
                kwargs[key] = value
        return cls(**kwargs)

    @classmethod
    def load(cls, path):
        with open(path) as fh:
            return cls.from_text(fh.read())

    def save(self, path):
        with open(path, "w") as fh:
            fh.write(self.to_text())


@dataclass
class Build:
    scenario: Scenario
    space: ShiftSpace
    a: Cocycle
    b: Cocycle
    witness: object  # WindowGenerator or None: conjugating Q at periodic points
    anchor: Point
    anchor_period: int
    rng: np.random.Generator


def _build_space(sc):
    transition = None
    if sc.transition:
        rows = [[int(c) for c in row] for row in sc.transition.split(";")]
        transition = rows
    return ShiftSpace(sc.alphabet, sc.lam, transition)


def _resolve_anchor(space, sc):
    if sc.anchor == "fixed":
        return space.smallest_fixed_point(), 1
    if sc.anchor.startswith("period:"):
        n = int(sc.anchor.split(":", 1)[1])
        pts = [p for p in space.periodic_points(n) if p.word_period == n * space.step]
        if not pts:
            raise ValueError(f"no point of exact period {n}")
        return min(pts, key=lambda p: p.window(0, n * space.step)), n
    if sc.anchor.startswith("point:"):
        p = Point.parse(sc.anchor.split(":", 1)[1])
        space.require_admissible(p)
        for n in range(1, space.enumeration_cap):
            if space.shift(p, n) == p:
                return p, n
        raise ValueError("anchor literal is not periodic")
    raise ValueError(f"bad anchor spec {sc.anchor!r}")


def build(sc):
    """Instantiate the scenario: space, cocycle pair, witness, anchor."""
    from cocycle_rigidity.sampling import random_generator
    from cocycle_rigidity.rigidity import synthesize_cohomologous

    space = _build_space(sc)
    gen_seq, twist_seq, run_seq = np.random.SeedSequence(sc.seed).spawn(3)
    anchor, anchor_period = _resolve_anchor(space, sc)

    if sc.gen_source == "seeded":
        gen = random_generator(
            space, np.random.default_rng(gen_seq), sc.dim, sc.window_radius, sc.gen_scale
        )
    elif sc.gen_source.startswith("file:"):
        gen = load_generator(sc.gen_source.split(":", 1)[1])
    else:
        raise ValueError(f"bad gen_source {sc.gen_source!r}")
    a = Cocycle(space, gen)

    witness = None
    if sc.twist_source == "none":
        b = a
    elif sc.twist_source in ("seeded",) or sc.twist_source.startswith("file:"):
        if sc.twist_source == "seeded":
            # the hidden conjugacy must be Id on the anchor orbit's windows:
            # an anchored reconstruction P(anchor) = Id forces A(anchor) = B(anchor)
            orbit_words = {
                space.shift(anchor, j).window(-sc.twist_radius, sc.twist_radius + 1)
                for j in range(anchor_period)
            }
            witness = random_generator(
                space,
                np.random.default_rng(twist_seq),
                sc.dim,
                sc.twist_radius,
                sc.twist_scale,
                identity_words=orbit_words,
            )
        else:
            witness = load_generator(sc.twist_source.split(":", 1)[1])
        b = synthesize_cohomologous(a, witness)
    else:
        raise ValueError(f"bad twist_source {sc.twist_source!r}")

    if sc.perturb:
        if sc.twist_source != "none":
            raise ValueError("perturb requires twist_source = none")
        table = {w: np.array(m) for w, m in a.generator.table.items()}
        target = anchor.window(-a.radius, a.radius + 1)
        table[target] = np.array(table[target])
        table[target][0, 0] += sc.perturb
        from cocycle_rigidity.cocycles import WindowGenerator

        b = Cocycle(space, WindowGenerator(a.dim, a.radius, table))

    return Build(
        scenario=sc,
        space=space,
        a=a,
        b=b,
        witness=witness,
        anchor=anchor,
        anchor_period=anchor_period,
        rng=np.random.default_rng(run_seq),
    )
