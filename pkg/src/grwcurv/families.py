"""Named graph presets, random parameter sweeps and the JSON graph format.

A graph file looks like::

    {
      "fiber_dim": 2,
      "warp": "steady_state",
      "grid": {"extents": [[-1, 1], [-1, 1]], "shape": [32, 32]},
      "height": {"family": "bump", "params": {"t0": 0.0, "amplitude": 0.05}},
      "orientation": "same"
    }

``grid`` may instead give ``origin``, ``spacing`` and ``shape``.  ``height`` is
either a named family with parameters or a nested list of node values in C
order matching ``shape``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigurationError
from .geometry import OPPOSITE, SAME, GraphHypersurface, make_warp


def _r2(X):
    return sum(x * x for x in X)


def slice_height(t0=0.0, **_):
    return lambda *X: np.full(X[0].shape, float(t0))


def bowl_height(t0=0.0, a=0.05, **_):
    return lambda *X: t0 + a * _r2(X)


def bump_height(t0=0.0, amplitude=0.05, width=1.0, **_):
    return lambda *X: t0 + amplitude * np.exp(-_r2(X) / width ** 2)


def ramp_height(t0=0.0, slope=0.1, direction=None, **_):
    def f(*X):
        d = np.zeros(len(X)) if direction is None else np.asarray(direction, dtype=float)
        if direction is None:
            d[0] = 1.0
        d = d / np.linalg.norm(d)
        return t0 + slope * sum(di * x for di, x in zip(d, X))
    return f


def cosine_height(t0=0.0, amplitude=0.01, freq=1.0, **_):
    def f(*X):
        out = np.ones_like(X[0])
        for x in X:
            out = out * np.cos(freq * x)
        return t0 + amplitude * out
    return f


def trig_height(t0=0.0, amplitudes=(0.01,), wavevectors=((1.0, 0.0),), phases=(0.0,), **_):
    def f(*X):
        out = np.full(X[0].shape, float(t0))
        for a, kv, ph in zip(amplitudes, wavevectors, phases):
            out = out + a * np.cos(sum(k * x for k, x in zip(kv, X)) + ph)
        return out
    return f


HEIGHTS = {
    "slice": slice_height,
    "bowl": bowl_height,
    "bump": bump_height,
    "dome": bump_height,
    "ramp": ramp_height,
    "cosine": cosine_height,
    "trig": trig_height,
}


@dataclass
class GraphSample:
    family: str
    index: int
    params: dict
    extents: list
    shape: tuple
    t0: float                      # reference level for the over-slice hypothesis
    orientations: tuple = (SAME, OPPOSITE)

    def height(self):
        return HEIGHTS[self.family](**self.params)

    def build(self, warp: str = "steady_state") -> GraphHypersurface:
        n = len(self.shape)
        return GraphHypersurface.from_function(make_warp(warp, n), self.height(), self.extents, self.shape)

    def describe(self) -> dict:
        return {"family": self.family, "index": self.index, "params": self.params,
                "extents": self.extents, "shape": list(self.shape), "t0": self.t0}


def _box(L, n):
    return [[-float(L), float(L)] for _ in range(n)]


def sample_family(family: str, count: int, n: int = 2, seed: int = 0, nodes: int = 20) -> list:
    """``count`` random members of a preset family on ``nodes^n`` grids.

    Parameter ranges keep the graphs spacelike in the steady-state model except
    for deliberately steep ramps, which exercise the rejection path.  ``dome``
    is the low bump on a small patch whose curvature has the sign pattern the
    positive-curvature audit needs.
    """
    rng = np.random.default_rng(seed)
    shape = (nodes,) * n
    out = []
    for i in range(count):
        if family == "slice":
            t0 = float(rng.uniform(-2.0, 1.0))
            p, L, ref = {"t0": t0}, 1.0, t0
        elif family == "bowl":
            t0 = float(rng.uniform(-0.5, 0.5))
            p = {"t0": t0, "a": float(rng.uniform(0.02, 0.2))}
            L, ref = float(rng.uniform(0.3, 1.0)), t0
        elif family == "bump":
            t0 = float(rng.uniform(-0.5, 0.5))
            p = {"t0": t0, "amplitude": float(rng.uniform(-0.1, 0.1)), "width": float(rng.uniform(0.5, 1.5))}
            L = float(rng.uniform(0.5, 1.0))
            ref = t0 + min(0.0, p["amplitude"])
        elif family == "dome":
            t0 = float(rng.uniform(-1.2, -0.8))
            p = {"t0": t0, "amplitude": float(rng.uniform(0.1, 0.15)), "width": 1.0}
            L, ref = float(rng.uniform(0.2, 0.3)), t0
        elif family == "ramp":
            t0 = float(rng.uniform(-0.5, 0.5))
            ang = rng.uniform(0, 2 * np.pi)
            d = [float(np.cos(ang)), float(np.sin(ang))] + [0.0] * (n - 2)
            # every seventh ramp is steeper than the light cone allows
            slope = float(rng.uniform(2.0, 3.0)) if i % 7 == 6 else float(rng.uniform(0.05, 0.4))
            p = {"t0": t0, "slope": slope, "direction": d}
            # reference at the centre: half the patch lies below the level
            L, ref = float(rng.uniform(0.3, 1.0)), t0
        elif family == "trig":
            t0 = float(rng.uniform(-0.5, 0.5))
            m = 3
            p = {"t0": t0,
                 "amplitudes": rng.uniform(0.0, 0.02, m).tolist(),
                 "wavevectors": rng.uniform(-2.0, 2.0, (m, n)).tolist(),
                 "phases": rng.uniform(0, 2 * np.pi, m).tolist()}
            L, ref = 1.0, t0 - sum(p["amplitudes"])
        else:
            raise ConfigurationError(f"unknown family {family!r}; choose from {sorted(FAMILIES)}")
        out.append(GraphSample(family, i, p, _box(L, n), shape, float(ref)))
    return out


FAMILIES = ("slice", "bowl", "bump", "dome", "ramp", "trig")
SWEEP_MIX = {"slice": 15, "bowl": 20, "bump": 20, "dome": 20, "ramp": 15, "trig": 10}


def sweep(count: int = 100, n: int = 2, seed: int = 0, nodes: int = 20) -> list:
    """Mixed sweep over all presets in the ``SWEEP_MIX`` proportions."""
    total = sum(SWEEP_MIX.values())
    counts = {k: v * count // total for k, v in SWEEP_MIX.items()}
    counts["bowl"] += count - sum(counts.values())
    out = []
    for j, (fam, c) in enumerate(counts.items()):
        out.extend(sample_family(fam, c, n, seed * 1000 + j, nodes))
    return out


# ---------------------------------------------------------------------------
# JSON graph files


@dataclass
class GraphSpec:
    graph: GraphHypersurface
    orientation: str = SAME
    t0: float | None = None
    source: dict = field(default_factory=dict)


def graph_from_dict(d: dict) -> GraphSpec:
    try:
        n = int(d["fiber_dim"])
        grid = d["grid"]
        shape = tuple(int(s) for s in grid["shape"])
        height = d["height"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigurationError(f"malformed graph description: {exc}") from None
    if len(shape) != n:
        raise ConfigurationError("grid shape must have fiber_dim entries")
    warp = make_warp(d.get("warp", "steady_state"), n)
    if "extents" in grid:
        extents = [tuple(map(float, e)) for e in grid["extents"]]
    elif "origin" in grid and "spacing" in grid:
        extents = [(float(o), float(o) + float(h) * (N - 1))
                   for o, h, N in zip(grid["origin"], grid["spacing"], shape)]
    else:
        raise ConfigurationError("grid needs extents, or origin and spacing")
    if len(extents) != n:
        raise ConfigurationError("grid extents must have fiber_dim entries")
    orientation = d.get("orientation", SAME)
    if orientation not in (SAME, OPPOSITE):
        raise ConfigurationError(f"orientation must be {SAME!r} or {OPPOSITE!r}")
    if isinstance(height, dict):
        fam = height.get("family")
        if fam not in HEIGHTS:
            raise ConfigurationError(f"unknown height family {fam!r}")
        func = HEIGHTS[fam](**height.get("params", {}))
        graph = GraphHypersurface.from_function(warp, func, extents, shape)
    else:
        u = np.asarray(height, dtype=float)
        if u.shape != shape:
            raise ConfigurationError(f"height array shape {u.shape} does not match grid {shape}")
        spacing = tuple((b - a) / (N - 1) for (a, b), N in zip(extents, shape))
        graph = GraphHypersurface(warp, u, spacing, tuple(a for a, _ in extents))
    t0 = d.get("t0")
    return GraphSpec(graph, orientation, None if t0 is None else float(t0), d)


def load_graph(path) -> GraphSpec:
    try:
        d = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"{path}: not valid JSON ({exc})") from None
    return graph_from_dict(d)
