"""Three-stage educational-competition update rules and the iteration step.

The population is split each iteration into school agents (the best fraction
G of the population by fitness) and students (the rest). Iterations cycle
through three stages -- primary, middle, high -- and each stage has one
update rule for schools and one for students:

    primary school   X + w * (Xmean_i - X) .* Levy(D)
    primary student  X + w * (close(X) - X) * randn          (scalar randn)
    middle school    X + (Xbest - Xmean) * exp(fes/fes_max - 1) .* Levy(D)
    middle student   X - w*close(X) - P * (E * w * close(X) - X)
    high school      X + (Xbest - Xmean)*randn1 - (Xworst - Xmean)*randn2
    high student     X - P * (E * Xbest - X)

with w = 0.1 * ln(2 - fes/fes_max), P = 4 * randn * (1 - fes/fes_max) drawn
once per iteration, and the per-student gain E = (pi/P) * (fes/fes_max) when
the student's talent draw exceeds the threshold Th, else 1. close(X) is the
school position nearest to the student (ties to the lowest index). New
positions are clamped to the box and survive per agent only when they improve
on the parent.

Variants swap the school rule for a covariance operator estimated from the
elite archive: the full variant uses the Gaussian operator in the primary
stage, the shifted operator in the middle stage and the differencing operator
in the high stage, while each single-operator ablation applies its one
operator in all three stages. Students always use the plain rules. Until the
archive holds enough entries for a usable model the school update falls back
to the plain stage rule.

Per-iteration draw order (one shared stream): the scalar for P; school
updates in fitness order, each consuming its own draws; then student updates
in fitness order; then any draws made by constraint handling during
evaluation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from . import covariance as cov
from .rng import Bounds, BudgetExhaustedError, RngStream, clamp, levy_sample

# |P| floor when computing E = (pi/P) * (fes/fes_max); P = 0 is treated as +0.
TALENT_GAIN_P_FLOOR = 1e-12


class Stage(enum.Enum):
    PRIMARY = 1
    MIDDLE = 2
    HIGH = 3


class Variant(enum.Enum):
    """Optimizer variants: the base algorithm, three single-operator
    ablations, and the full multi-operator variant."""

    ECO = "ECO"
    GECO = "GECO"
    SECO = "SECO"
    DECO = "DECO"
    IECO_MCO = "IECO-MCO"

    @classmethod
    def from_label(cls, label: str) -> "Variant":
        norm = label.strip().upper().replace("_", "-")
        for v in cls:
            if v.value == norm:
                return v
        raise ValueError("unknown variant %r (expected one of %s)"
                         % (label, ", ".join(v.value for v in cls)))

    @property
    def label(self):
        return self.value


# Which covariance operator a variant applies at a given stage.
_OPERATOR_TABLE = {
    Variant.GECO: {Stage.PRIMARY: "gaussian", Stage.MIDDLE: "gaussian", Stage.HIGH: "gaussian"},
    Variant.SECO: {Stage.PRIMARY: "shift", Stage.MIDDLE: "shift", Stage.HIGH: "shift"},
    Variant.DECO: {Stage.PRIMARY: "differential", Stage.MIDDLE: "differential",
                   Stage.HIGH: "differential"},
    Variant.IECO_MCO: {Stage.PRIMARY: "gaussian", Stage.MIDDLE: "shift",
                       Stage.HIGH: "differential"},
}


@dataclass(frozen=True)
class AlgorithmParams:
    """Behavioral parameters.

    h    : talent threshold Th in (0, 1)
    g1   : school fraction in the primary stage
    g2   : school fraction in the middle and high stages
    s    : elite archive capacity; None means 20 * dimension
    elite_weight : fitness weight in the combined elite score
    """

    variant: Variant = Variant.IECO_MCO
    h: float = 0.5
    g1: float = 0.4
    g2: float = 0.5
    s: Optional[int] = None
    elite_weight: float = cov.DEFAULT_ELITE_WEIGHT

    def __post_init__(self):
        if not 0.0 < self.h < 1.0:
            raise ValueError("h must lie in (0, 1)")
        for name, g in (("g1", self.g1), ("g2", self.g2)):
            if not 0.0 < g < 1.0:
                raise ValueError("%s must lie in (0, 1)" % name)
        if self.s is not None and self.s < 1:
            raise ValueError("archive capacity must be at least 1")
        if not 0.0 <= self.elite_weight <= 1.0:
            raise ValueError("elite_weight must lie in [0, 1]")

    @classmethod
    def for_variant(cls, variant) -> "AlgorithmParams":
        """Published defaults: base algorithm uses smaller school fractions."""
        if not isinstance(variant, Variant):
            variant = Variant.from_label(str(variant))
        if variant is Variant.ECO:
            return cls(variant=variant, h=0.5, g1=0.2, g2=0.1)
        return cls(variant=variant, h=0.5, g1=0.4, g2=0.5)

    def archive_capacity(self, dim: int) -> int:
        return self.s if self.s is not None else 20 * dim

    def school_fraction(self, stage: Stage) -> float:
        return self.g1 if stage is Stage.PRIMARY else self.g2

    def uses_archive(self) -> bool:
        return self.variant is not Variant.ECO

    def with_variant(self, variant: Variant) -> "AlgorithmParams":
        return replace(self, variant=variant)


def stage_of(iteration: int) -> Stage:
    """Iterations cycle primary, middle, high with period 3 (1-based)."""
    if iteration < 1:
        raise ValueError("iteration numbering starts at 1")
    return (Stage.PRIMARY, Stage.MIDDLE, Stage.HIGH)[(iteration - 1) % 3]


def school_count(fraction: float, n: int) -> int:
    """Number of school agents: round half up, never below 1."""
    return max(1, int(math.floor(fraction * n + 0.5)))


def omega(fes: float, fes_max: float) -> float:
    """Learning-rate schedule w = 0.1 * ln(2 - fes/fes_max), decreasing."""
    if fes_max <= 0:
        raise ValueError("fes_max must be positive")
    if fes < 0 or fes > fes_max:
        raise ValueError("fes must lie in [0, fes_max]")
    return 0.1 * math.log(2.0 - fes / fes_max)


@dataclass(frozen=True)
class StageContext:
    """Per-iteration scalars shared by the update rules."""

    stage: Stage
    fes: int
    fes_max: int
    omega: float
    p: float
    th: float

    @classmethod
    def draw(cls, stage: Stage, fes: int, fes_max: int, th: float, rng: RngStream):
        """Build the context, consuming the single per-iteration randn for P."""
        return cls(stage=stage, fes=fes, fes_max=fes_max,
                   omega=omega(fes, fes_max),
                   p=4.0 * float(rng.normal()) * (1.0 - fes / fes_max),
                   th=th)

    def progress(self) -> float:
        return self.fes / self.fes_max


def talent_gain(ctx: StageContext, talent_draw: float) -> float:
    """E = (pi/P) * (fes/fes_max) above the threshold, else 1; |P| floored."""
    if talent_draw <= ctx.th:
        return 1.0
    p = ctx.p
    if abs(p) < TALENT_GAIN_P_FLOOR:
        p = math.copysign(TALENT_GAIN_P_FLOOR, p if p != 0.0 else 1.0)
    return (math.pi / p) * ctx.progress()


@dataclass(frozen=True)
class Agent:
    position: np.ndarray
    fitness: float


@dataclass(frozen=True)
class PopulationStats:
    """Best/worst copies and the population mean position."""

    best: Agent
    worst: Agent
    mean: np.ndarray


class Population:
    """Positions with ranking fitness, kept sorted ascending by fitness.

    ``fitness`` is the scalar the algorithm ranks on; for constrained
    problems it is the penalized value, and ``objective``/``feasible`` retain
    the raw readings for reporting. For unconstrained problems the three
    arrays are fitness, fitness, all-True.
    """

    def __init__(self, positions, fitness, objective=None, feasible=None):
        self.positions = np.atleast_2d(np.asarray(positions, dtype=float)).copy()
        self.fitness = np.asarray(fitness, dtype=float).copy()
        if self.positions.shape[0] != self.fitness.shape[0]:
            raise ValueError("positions and fitness lengths differ")
        self.objective = (self.fitness.copy() if objective is None
                          else np.asarray(objective, dtype=float).copy())
        self.feasible = (np.ones(self.size, dtype=bool) if feasible is None
                         else np.asarray(feasible, dtype=bool).copy())
        self.sort()

    @property
    def size(self):
        return self.positions.shape[0]

    @property
    def dim(self):
        return self.positions.shape[1]

    def sort(self):
        order = np.argsort(self.fitness, kind="stable")
        self.positions = self.positions[order]
        self.fitness = self.fitness[order]
        self.objective = self.objective[order]
        self.feasible = self.feasible[order]

    def stats(self) -> PopulationStats:
        return PopulationStats(
            best=Agent(self.positions[0].copy(), float(self.fitness[0])),
            worst=Agent(self.positions[-1].copy(), float(self.fitness[-1])),
            mean=self.positions.mean(axis=0),
        )

    def copy(self) -> "Population":
        return Population(self.positions, self.fitness, self.objective, self.feasible)


def closest_school(position, school_positions) -> int:
    """Index of the school at minimum Euclidean distance (ties: lowest)."""
    schools = np.atleast_2d(np.asarray(school_positions, dtype=float))
    diff = schools - np.asarray(position, dtype=float)
    return int(np.argmin((diff * diff).sum(axis=1)))


# ----------------------------------------------------------------- updates

def primary_school_update(position, school_mean, ctx, rng, bounds=None):
    """X + w * (Xmean_i - X) .* Levy(D)."""
    position = np.asarray(position, dtype=float)
    school_mean = np.asarray(school_mean, dtype=float)
    step_vec = ctx.omega * (school_mean - position) * levy_sample(position.shape[0], rng)
    new = position + step_vec
    return clamp(new, bounds) if bounds is not None else new


def primary_student_update(position, school_positions, ctx, rng, bounds=None):
    """X + w * (close(X) - X) * randn with one scalar normal draw."""
    position = np.asarray(position, dtype=float)
    schools = np.atleast_2d(np.asarray(school_positions, dtype=float))
    close = schools[closest_school(position, schools)]
    new = position + ctx.omega * (close - position) * float(rng.normal())
    return clamp(new, bounds) if bounds is not None else new


def middle_school_update(position, stats: PopulationStats, ctx, rng, bounds=None):
    """X + (Xbest - Xmean) * exp(fes/fes_max - 1) .* Levy(D)."""
    position = np.asarray(position, dtype=float)
    decay = math.exp(ctx.progress() - 1.0)
    step_vec = (stats.best.position - stats.mean) * decay * levy_sample(position.shape[0], rng)
    new = position + step_vec
    return clamp(new, bounds) if bounds is not None else new


def middle_student_update(position, school_positions, ctx, rng, bounds=None):
    """X - w*close(X) - P * (E * w * close(X) - X); talent drawn per call."""
    position = np.asarray(position, dtype=float)
    schools = np.atleast_2d(np.asarray(school_positions, dtype=float))
    close = schools[closest_school(position, schools)]
    e = talent_gain(ctx, float(rng.uniform()))
    new = position - ctx.omega * close - ctx.p * (e * ctx.omega * close - position)
    return clamp(new, bounds) if bounds is not None else new


def high_school_update(position, stats: PopulationStats, ctx, rng, bounds=None):
    """X + (Xbest - Xmean)*randn1 - (Xworst - Xmean)*randn2 (two scalars)."""
    position = np.asarray(position, dtype=float)
    r1 = float(rng.normal())
    r2 = float(rng.normal())
    new = (position + (stats.best.position - stats.mean) * r1
           - (stats.worst.position - stats.mean) * r2)
    return clamp(new, bounds) if bounds is not None else new


def high_student_update(position, stats: PopulationStats, ctx, rng, bounds=None):
    """X - P * (E * Xbest - X); talent drawn per call."""
    position = np.asarray(position, dtype=float)
    e = talent_gain(ctx, float(rng.uniform()))
    new = position - ctx.p * (e * stats.best.position - position)
    return clamp(new, bounds) if bounds is not None else new


# -------------------------------------------------------------------- step

def _school_means(pop: Population, k: int) -> np.ndarray:
    """Per-school mean of the students currently assigned to it by close().

    Schools with no assigned students fall back to the population mean.
    """
    schools = pop.positions[:k]
    pop_mean = pop.positions.mean(axis=0)
    means = np.tile(pop_mean, (k, 1))
    students = pop.positions[k:]
    if students.shape[0] == 0:
        return means
    diff = students[:, None, :] - schools[None, :, :]
    assign = np.argmin((diff * diff).sum(axis=2), axis=1)
    for i in range(k):
        mask = assign == i
        if mask.any():
            means[i] = students[mask].mean(axis=0)
    return means


def step(pop: Population, params: AlgorithmParams, ctx: StageContext,
         archive: Optional[cov.EliteArchive], rng: RngStream, evaluator,
         bounds: Bounds) -> Population:
    """One full iteration: propose, evaluate, select greedily, archive elites.

    ``evaluator`` must expose ``evaluate(X) -> (fitness, objective, feasible,
    positions)`` and own the evaluation budget; the iteration needs exactly
    ``pop.size`` base evaluations (constraint handling may spend more).
    Raises :class:`BudgetExhaustedError` when the base cost does not fit.
    """
    n = pop.size
    if ctx.fes + n > ctx.fes_max:
        raise BudgetExhaustedError(
            "iteration needs %d evaluations but only %d remain"
            % (n, ctx.fes_max - ctx.fes))
    pop.sort()
    stats = pop.stats()
    k = school_count(params.school_fraction(ctx.stage), n)

    model = None
    operator = None
    if (params.uses_archive() and archive is not None
            and len(archive) >= cov.min_model_entries(pop.dim)):
        model = cov.estimate(archive)
        operator = _OPERATOR_TABLE[params.variant][ctx.stage]

    new_positions = np.empty_like(pop.positions)
    schools = pop.positions[:k]

    if operator is None and ctx.stage is Stage.PRIMARY:
        means = _school_means(pop, k)
    for i in range(k):
        pos = pop.positions[i]
        if operator == "gaussian":
            new_positions[i] = cov.gaussian_operator(pos, model, rng, bounds)
        elif operator == "shift":
            new_positions[i] = cov.shift_operator(pos, model, stats.best.position, rng, bounds)
        elif operator == "differential":
            others = np.concatenate((pop.positions[:i], pop.positions[i + 1:]))
            new_positions[i] = cov.differential_operator(
                pos, model, others, stats.best.position, stats.worst.position, rng, bounds)
        elif ctx.stage is Stage.PRIMARY:
            new_positions[i] = primary_school_update(pos, means[i], ctx, rng, bounds)
        elif ctx.stage is Stage.MIDDLE:
            new_positions[i] = middle_school_update(pos, stats, ctx, rng, bounds)
        else:
            new_positions[i] = high_school_update(pos, stats, ctx, rng, bounds)

    for j in range(k, n):
        pos = pop.positions[j]
        if ctx.stage is Stage.PRIMARY:
            new_positions[j] = primary_student_update(pos, schools, ctx, rng, bounds)
        elif ctx.stage is Stage.MIDDLE:
            new_positions[j] = middle_student_update(pos, schools, ctx, rng, bounds)
        else:
            new_positions[j] = high_student_update(pos, stats, ctx, rng, bounds)

    child_fit, child_obj, child_feas, child_pos = evaluator.evaluate(new_positions)

    improved = child_fit < pop.fitness
    pop.positions[improved] = child_pos[improved]
    pop.fitness[improved] = child_fit[improved]
    pop.objective[improved] = child_obj[improved]
    pop.feasible[improved] = child_feas[improved]
    pop.sort()

    if params.uses_archive() and archive is not None:
        idx = cov.elite_indices(pop.fitness, pop.positions,
                                pop.positions[0], k, params.elite_weight)
        archive.push(pop.positions[idx], pop.fitness[idx])
    return pop
