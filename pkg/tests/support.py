"""Shared helpers for the test suite: scripted RNG playback and tiny specs."""

from __future__ import annotations

import numpy as np

from ieco_mco.rng import Bounds, mantegna_sigma
from ieco_mco.problems.core import ProblemSpec


class ScriptedRng:
    """Plays back queued draws so hand-computed examples are exact.

    Only the methods the update rules actually call are implemented. A queue
    underrun raises IndexError, which makes an unexpected extra draw visible.
    """

    def __init__(self, normals=(), uniforms=(), pairs=()):
        self._normals = list(normals)
        self._uniforms = list(uniforms)
        self._pairs = list(pairs)

    def normal(self, size=None):
        if size is None:
            return float(self._normals.pop(0))
        return np.array([float(self._normals.pop(0)) for _ in range(int(size))])

    def uniform(self, low=0.0, high=1.0, size=None):
        if size is None:
            return low + (high - low) * float(self._uniforms.pop(0))
        vals = [float(self._uniforms.pop(0)) for _ in range(int(np.prod(size)))]
        return low + (high - low) * np.asarray(vals).reshape(size)

    def integers(self, low, high=None, size=None):
        raise NotImplementedError("scripted integers not needed")

    def choice_distinct(self, n, k):
        pair = self._pairs.pop(0)
        if len(pair) != k:
            raise ValueError("scripted pair has wrong length")
        return np.asarray(pair, dtype=int)


def levy_script(values, beta=1.5):
    """Normal-draw queue that makes levy_sample emit ``values`` (v fixed at 1).

    levy_sample draws the u vector first, then the v vector; with v = 1 the
    output is (value / sigma) * sigma, exact to one ulp.
    """
    sigma = mantegna_sigma(beta)
    values = np.atleast_1d(np.asarray(values, dtype=float))
    return [v / sigma for v in values] + [1.0] * values.size


class CountingEvaluator:
    """Minimal evaluator for driving step() directly; counts evaluations."""

    def __init__(self, fn):
        self.fn = fn
        self.used = 0

    def evaluate(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        self.used += X.shape[0]
        f = np.asarray(self.fn(X), dtype=float)
        return f, f.copy(), np.ones(X.shape[0], dtype=bool), X.copy()


def sphere_spec(dim, low=-100.0, high=100.0, name="sphere-plain"):
    """Unconstrained sphere with no shift, for harness-level tests."""

    def batch(X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        return (X ** 2).sum(axis=1)

    return ProblemSpec(
        name=name, dimension=dim, bounds=Bounds.cube(low, high, dim),
        objective=lambda x: float(batch(x)[0]), batch_objective=batch,
        category="unimodal", known_target=0.0,
        target_note="analytic optimum at the origin",
        known_point=np.zeros(dim),
    )
