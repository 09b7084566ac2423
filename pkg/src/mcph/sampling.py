"""Realizations of the parent PPP, the MCP and the holed MCP in a ball window.

Parents are drawn in the inflated ball ``b(o, W + R)`` so that every cluster
able to reach ``b(o, W)`` is present; a hole only removes points within
``r0 < R`` of its centre, so the same inflation is enough for exact thinning
inside the window.

Randomness comes from counter-based Philox generators keyed by
``(master_seed, stream...)``. A realization consumes one stream, so trials
can be farmed out to any number of workers without changing results.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DomainError
from .geometry import ball_volume, sample_uniform_ball, sample_uniform_shell
from .params import ProcessParams, SamplerMode


def make_rng(seed, *stream):
    """Philox generator for substream ``stream`` of ``seed``."""
    ss = np.random.SeedSequence(int(seed), spawn_key=tuple(int(s) for s in stream))
    return np.random.Generator(np.random.Philox(ss))


@dataclass
class Realization:
    parents: np.ndarray          # (n, 3)
    offspring: np.ndarray        # (m, 3)
    parent_index: np.ndarray     # (m,) int
    thinned: np.ndarray          # (m,) bool
    window_radius: float

    @property
    def retained(self):
        return self.offspring[~self.thinned]

    def in_window(self, points=None):
        pts = self.offspring if points is None else points
        return np.linalg.norm(pts, axis=1) <= self.window_radius

    def to_csv(self, fh=None):
        """Write ``kind,x,y,z,parent_index,thinned`` rows (9 significant digits)."""
        own = fh is None
        fh = io.StringIO() if own else fh
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["kind", "x", "y", "z", "parent_index", "thinned"])
        for p in self.parents:
            w.writerow(["parent", *(f"{c:.9g}" for c in p), -1, 0])
        for p, k, t in zip(self.offspring, self.parent_index, self.thinned):
            w.writerow(["offspring", *(f"{c:.9g}" for c in p), int(k), int(t)])
        if own:
            return fh.getvalue()

    @classmethod
    def from_csv(cls, fh, window_radius):
        parents, offspring, idx, thin = [], [], [], []
        for row in csv.DictReader(fh):
            xyz = [float(row["x"]), float(row["y"]), float(row["z"])]
            if row["kind"] == "parent":
                parents.append(xyz)
            elif row["kind"] == "offspring":
                offspring.append(xyz)
                idx.append(int(row["parent_index"]))
                thin.append(row["thinned"] == "1")
            else:
                raise DomainError(f"unknown row kind {row['kind']!r}")
        return cls(
            np.array(parents, dtype=float).reshape(-1, 3),
            np.array(offspring, dtype=float).reshape(-1, 3),
            np.array(idx, dtype=np.int64),
            np.array(thin, dtype=bool),
            float(window_radius),
        )


def sample_ppp_ball(lambda_p, W, rng):
    """Homogeneous PPP of intensity ``lambda_p`` restricted to ``b(o, W)``; shape ``(n, 3)``."""
    if not W > 0:
        raise DomainError(f"W must be positive, got {W}")
    if lambda_p < 0:
        raise DomainError(f"lambda_p must be >= 0, got {lambda_p}")
    n = rng.poisson(lambda_p * ball_volume(W))
    if n == 0:
        return np.empty((0, 3))
    return sample_uniform_ball(np.zeros(3), W, rng, size=n)


def draw_clusters(params: ProcessParams, W, mode, rng):
    """Parents in ``b(o, W + R)`` and their unthinned offspring candidates.

    Returns ``(parents, offspring, parent_index)``. This is the random part
    of :func:`sample_realization`; thinning is deterministic given it.
    """
    mode = SamplerMode(mode)
    if not W > 0:
        raise DomainError(f"W must be positive, got {W}")
    R, r0 = params.R, params.r0
    parents = sample_ppp_ball(params.lambda_p, W + R, rng)
    mean = params.M2 if mode is SamplerMode.MCPH_SELFHOLE else params.M1
    counts = rng.poisson(mean, size=len(parents))
    parent_index = np.repeat(np.arange(len(parents)), counts)
    m = len(parent_index)
    inner = r0 if mode is SamplerMode.MCPH_SELFHOLE else 0.0
    if m:
        offsets = sample_uniform_shell(np.zeros(3), inner, R, rng, size=m)
        offspring = parents[parent_index] + offsets
    else:
        offspring = np.empty((0, 3))
    return parents, offspring, parent_index


def hole_mask(parents, points, r0, tree=None):
    """True where a point lies strictly within ``r0`` of some parent."""
    if r0 <= 0 or len(parents) == 0 or len(points) == 0:
        return np.zeros(len(points), dtype=bool)
    tree = cKDTree(parents) if tree is None else tree
    nearest, _ = tree.query(points, k=1, distance_upper_bound=r0)
    return nearest < r0


def sample_realization(params: ProcessParams, W, mode, rng) -> Realization:
    """One realization observed through ``b(o, W)``.

    MCP: Poisson(M1) offspring per parent, uniform in ``b(x, R)``.
    MCPH_EXACT: the same candidates, each flagged as thinned when strictly
    closer than ``r0`` to any parent (points exactly at ``r0`` are kept).
    MCPH_SELFHOLE: Poisson(M2) offspring per parent, uniform in the shell
    ``b(x, R) \\ b(x, r0)``; nothing is thinned.

    Offspring outside ``b(o, W)`` are kept; use :meth:`Realization.in_window`.
    """
    mode = SamplerMode(mode)
    parents, offspring, parent_index = draw_clusters(params, W, mode, rng)
    if mode is SamplerMode.MCPH_EXACT:
        thinned = hole_mask(parents, offspring, params.r0)
    else:
        thinned = np.zeros(len(offspring), dtype=bool)
    return Realization(parents, offspring, parent_index, thinned, float(W))


def derive_m2(M1, r0, R, apply_overlap_correction=False, lambda_p=0.0):
    """Mean retained count after removing the own hole, optionally scaled for other holes."""
    if not 0 <= r0 < R:
        raise DomainError(f"need 0 <= r0 < R, got r0={r0}, R={R}")
    m2 = M1 * (1.0 - r0**3 / R**3)
    if apply_overlap_correction:
        factor = 1.0 - lambda_p * ball_volume(r0)
        if not factor > 0:
            raise DomainError(f"overlap correction factor {factor} <= 0")
        m2 *= factor
    return m2
