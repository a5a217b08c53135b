"""Experiment harness: budgets, independent runs, batches, persistence.

A run is fully determined by its :class:`RunConfig`. The evaluation budget
is owned by an :class:`Evaluator`, which charges one evaluation per objective
call (constraint resampling included) and never lets the total exceed
``fes_max``. Batches derive one seed per (algorithm, problem, run) cell from
the base seed and a stable 64-bit hash, so cells are reproducible in
isolation and identical whether executed serially or in a process pool.

Persisted layout under an output directory:

- ``results.csv``: algorithm, problem, D, run, seed, best_fitness,
  evaluations_used, wall_time
- ``solutions.csv``: best objective/violation/feasibility and position per run
- ``traces/<algorithm>__<problem>__r<run>.txt``: ``fes best_so_far`` lines
- ``summary.csv``: best/mean/std of best_fitness per (algorithm, problem)
- ``meta.json``: schema version, creation date, config hash, dimensions

Record equality ignores wall_time (the only non-deterministic field).
"""

from __future__ import annotations

import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from . import covariance as cov
from .problems import (
    DEFAULT_VIOLATION_TOL,
    PenaltyPolicy,
    constrained_evaluate,
    make_problem,
    stable_seed,
)
from .problems.core import ProblemSpec
from .rng import (
    Bounds,
    BudgetExhaustedError,
    ChaosInitConfig,
    RngStream,
    init_population,
)
from .stages import (
    AlgorithmParams,
    Population,
    Stage,
    StageContext,
    Variant,
    school_count,
    stage_of,
    step,
)

SCHEMA_VERSION = 1
_MASK64 = (1 << 64) - 1
DEFAULT_POPULATION = 30
DEFAULT_FES_MULT = 3000


class SchemaMismatchError(ValueError):
    """Persisted results were written under a different schema version."""


def derive_seed(base_seed: int, algorithm: str, problem: str, run: int) -> int:
    """Per-cell seed: base_seed XOR a stable hash of the cell coordinates."""
    return (int(base_seed) ^ stable_seed(algorithm, problem, str(int(run)))) & _MASK64


@dataclass(frozen=True)
class RunConfig:
    """Everything a single run needs; no ambient entropy."""

    algorithm: str
    problem: str
    seed: int
    dimension: int = 10
    n: int = DEFAULT_POPULATION
    fes_max: Optional[int] = None        # None -> 3000 * dimension
    trace_stride: Optional[int] = None   # None -> n
    instance_seed: int = 0
    max_resamples: int = 100
    violation_tolerance: float = DEFAULT_VIOLATION_TOL
    chaos_seed: Optional[float] = None

    def __post_init__(self):
        Variant.from_label(self.algorithm)
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.n < 5:
            raise ValueError("population size must be at least 5")
        if self.fes_max is not None and self.fes_max < 2 * self.n:
            raise ValueError("fes_max must be at least 2 * n")
        if self.trace_stride is not None and self.trace_stride < 1:
            raise ValueError("trace_stride must be positive")

    def resolved_fes_max(self, dimension: int) -> int:
        fes = self.fes_max if self.fes_max is not None else DEFAULT_FES_MULT * dimension
        if fes < 2 * self.n:
            raise ValueError("fes_max must be at least 2 * n")
        return int(fes)


class Evaluator:
    """Budget-charging objective evaluator with constraint handling.

    ``evaluate(X)`` returns (fitness, objective, feasible, positions); the
    positions may differ from the input for constrained problems, where
    infeasible candidates are resampled inside the box. Resampling draws come
    from the run's single RNG stream, after the iteration's update draws.
    """

    def __init__(self, spec: ProblemSpec, fes_max: int,
                 policy: Optional[PenaltyPolicy] = None,
                 rng: Optional[RngStream] = None):
        self.spec = spec
        self.fes_max = int(fes_max)
        self.policy = policy if policy is not None else PenaltyPolicy()
        self.rng = rng
        self.used = 0

    @property
    def remaining(self) -> int:
        return self.fes_max - self.used

    def evaluate(self, X: np.ndarray):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        n = X.shape[0]
        if self.used + n > self.fes_max:
            raise BudgetExhaustedError(
                "evaluating %d candidates would exceed the budget (%d of %d used)"
                % (n, self.used, self.fes_max))
        if not self.spec.is_constrained:
            objective = self.spec.batch(X)
            self.used += n
            return objective.copy(), objective, np.ones(n, dtype=bool), X

        if self.rng is None:
            raise ValueError("constrained evaluation needs an RNG stream")
        fitness = np.empty(n)
        objective = np.empty(n)
        feasible = np.empty(n, dtype=bool)
        positions = np.array(X, dtype=float)
        for i in range(n):
            pending = n - i - 1
            extra = self.fes_max - self.used - 1 - pending
            out = constrained_evaluate(self.spec, X[i], self.policy, self.rng,
                                       extra_cap=extra)
            self.used += out.evaluations
            fitness[i] = out.fitness
            objective[i] = out.objective
            feasible[i] = out.feasible
            positions[i] = out.position
        return fitness, objective, feasible, positions


@dataclass
class RunRecord:
    """Outcome of one independent run.

    Equality ignores ``wall_time``; every other field must match exactly.
    """

    algorithm: str
    problem: str
    dimension: int
    run: int
    seed: int
    best_position: np.ndarray
    best_fitness: float
    best_objective: float
    best_violation: float
    feasible: bool
    trace: List[Tuple[int, float]]
    evaluations_used: int
    wall_time: float = 0.0

    def __eq__(self, other):
        if not isinstance(other, RunRecord):
            return NotImplemented
        return (self.algorithm == other.algorithm
                and self.problem == other.problem
                and self.dimension == other.dimension
                and self.run == other.run
                and self.seed == other.seed
                and np.array_equal(self.best_position, other.best_position)
                and self.best_fitness == other.best_fitness
                and self.best_objective == other.best_objective
                and self.best_violation == other.best_violation
                and self.feasible == other.feasible
                and self.trace == other.trace
                and self.evaluations_used == other.evaluations_used)

    __hash__ = None


class ResultSet:
    """Runs indexed by (algorithm, problem, run) plus batch metadata."""

    def __init__(self, records: Dict[Tuple[str, str, int], RunRecord],
                 metadata: Optional[dict] = None):
        self.records = dict(records)
        self.metadata = dict(metadata or {})

    @property
    def algorithms(self) -> List[str]:
        found = sorted({k[0] for k in self.records})
        listed = self.metadata.get("algorithms")
        return list(listed) if listed else found

    @property
    def problems(self) -> List[str]:
        found = sorted({k[1] for k in self.records})
        listed = self.metadata.get("problems")
        return list(listed) if listed else found

    @property
    def run_count(self) -> int:
        runs = {k[2] for k in self.records}
        return (max(runs) + 1) if runs else 0

    def __len__(self):
        return len(self.records)

    def __eq__(self, other):
        if not isinstance(other, ResultSet):
            return NotImplemented
        drop = ("created_at",)
        mine = {k: v for k, v in self.metadata.items() if k not in drop}
        theirs = {k: v for k, v in other.metadata.items() if k not in drop}
        return self.records == other.records and mine == theirs

    __hash__ = None

    def validate_rectangular(self):
        runs = sorted({k[2] for k in self.records})
        expect = list(range(len(runs)))
        if runs != expect:
            raise ValueError("run indices are not contiguous from 0")
        for a in self.algorithms:
            for p in self.problems:
                for r in expect:
                    if (a, p, r) not in self.records:
                        raise ValueError("missing cell (%s, %s, run %d)" % (a, p, r))

    def to_matrix(self, problems: Optional[Sequence[str]] = None,
                  algorithms: Optional[Sequence[str]] = None) -> np.ndarray:
        """best_fitness array of shape (problems, algorithms, runs)."""
        self.validate_rectangular()
        probs = list(problems) if problems else self.problems
        algs = list(algorithms) if algorithms else self.algorithms
        runs = self.run_count
        out = np.empty((len(probs), len(algs), runs))
        for i, p in enumerate(probs):
            for j, a in enumerate(algs):
                for r in range(runs):
                    out[i, j, r] = self.records[(a, p, r)].best_fitness
        return out

    def summary(self) -> List[dict]:
        """Best/mean/std of best_fitness per (algorithm, problem) cell."""
        rows = []
        for a in self.algorithms:
            for p in self.problems:
                vals = np.array([rec.best_fitness for (aa, pp, _), rec
                                 in sorted(self.records.items())
                                 if aa == a and pp == p])
                if vals.size == 0:
                    continue
                rows.append({
                    "algorithm": a, "problem": p,
                    "best": float(vals.min()), "mean": float(vals.mean()),
                    "std": float(vals.std()),
                })
        return rows


def _resolve_params(label: str) -> AlgorithmParams:
    return AlgorithmParams.for_variant(Variant.from_label(label))


def run_single(cfg: RunConfig, problem: Optional[ProblemSpec] = None,
               run_index: int = 0) -> RunRecord:
    """Execute one run; deterministic in ``cfg`` alone."""
    t0 = time.perf_counter()
    spec = problem if problem is not None else make_problem(
        cfg.problem, cfg.dimension, cfg.instance_seed)
    dim = spec.dimension
    fes_max = cfg.resolved_fes_max(dim)
    params = _resolve_params(cfg.algorithm)
    rng = RngStream(cfg.seed)
    policy = PenaltyPolicy(cfg.max_resamples, cfg.violation_tolerance)
    ev = Evaluator(spec, fes_max, policy=policy, rng=rng)

    X0 = init_population(ChaosInitConfig(n=cfg.n, x0=cfg.chaos_seed),
                         spec.bounds, rng)
    fit, obj, feas, X0 = ev.evaluate(X0)
    pop = Population(X0, fit, obj, feas)

    archive = None
    if params.uses_archive():
        archive = cov.EliteArchive(params.archive_capacity(dim))

    stride = cfg.trace_stride if cfg.trace_stride is not None else cfg.n
    trace: List[Tuple[int, float]] = [(ev.used, float(pop.fitness[0]))]

    iteration = 1
    while ev.used + cfg.n <= fes_max:
        ctx = StageContext.draw(stage_of(iteration), ev.used, fes_max,
                                params.h, rng)
        pop = step(pop, params, ctx, archive, rng, ev, spec.bounds)
        if ev.used - trace[-1][0] >= stride:
            trace.append((ev.used, float(pop.fitness[0])))
        iteration += 1
    if trace[-1][0] != ev.used:
        trace.append((ev.used, float(pop.fitness[0])))

    best_position = pop.positions[0].copy()
    best_violation = (spec.violation(best_position)
                      if spec.is_constrained else 0.0)
    return RunRecord(
        algorithm=cfg.algorithm, problem=spec.name, dimension=dim,
        run=run_index, seed=cfg.seed,
        best_position=best_position,
        best_fitness=float(pop.fitness[0]),
        best_objective=float(pop.objective[0]),
        best_violation=float(best_violation),
        feasible=bool(pop.feasible[0]),
        trace=trace, evaluations_used=ev.used,
        wall_time=time.perf_counter() - t0,
    )


def _run_cell(args) -> Tuple[Tuple[str, str, int], RunRecord]:
    cfg, alg, prob, run = args
    rec = run_single(cfg, run_index=run)
    return (alg, prob, run), rec


def config_hash(payload: dict) -> str:
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def run_batch(algorithms: Sequence[str], problems: Sequence[str], runs: int,
              base_seed: int, dimension: int = 10, n: int = DEFAULT_POPULATION,
              fes_max: Optional[int] = None, fes_mult: int = DEFAULT_FES_MULT,
              instance_seed: int = 0, trace_stride: Optional[int] = None,
              max_resamples: int = 100,
              violation_tolerance: float = DEFAULT_VIOLATION_TOL,
              jobs: int = 1) -> ResultSet:
    """Independent runs over the (algorithm, problem, run) grid.

    Seeds come from :func:`derive_seed`, so permuting the grid or switching
    between serial and parallel execution cannot change any record.
    """
    algorithms = list(dict.fromkeys(algorithms))
    problems = list(dict.fromkeys(problems))
    if runs < 1:
        raise ValueError("runs must be at least 1")
    for label in algorithms:
        Variant.from_label(label)

    dims = {}
    names = {}
    for prob in problems:
        spec = make_problem(prob, dimension, instance_seed)
        names[prob] = spec.name
        dims[spec.name] = spec.dimension

    tasks = []
    for alg in algorithms:
        for prob in problems:
            for run in range(runs):
                cfg = RunConfig(
                    algorithm=alg, problem=prob,
                    seed=derive_seed(base_seed, alg, names[prob], run),
                    dimension=dimension, n=n,
                    fes_max=(fes_max if fes_max is not None
                             else fes_mult * dims[names[prob]]),
                    trace_stride=trace_stride, instance_seed=instance_seed,
                    max_resamples=max_resamples,
                    violation_tolerance=violation_tolerance,
                )
                tasks.append((cfg, alg, names[prob], run))

    records: Dict[Tuple[str, str, int], RunRecord] = {}
    if jobs <= 1:
        for task in tasks:
            key, rec = _run_cell(task)
            records[key] = rec
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for key, rec in pool.map(_run_cell, tasks, chunksize=1):
                records[key] = rec

    payload = {
        "schema_version": SCHEMA_VERSION,
        "algorithms": algorithms, "problems": [names[p] for p in problems],
        "runs": runs, "base_seed": base_seed, "dimension": dimension,
        "n": n, "fes_max": fes_max, "fes_mult": fes_mult,
        "instance_seed": instance_seed, "trace_stride": trace_stride,
        "max_resamples": max_resamples,
        "violation_tolerance": violation_tolerance,
        "dimensions": dims,
    }
    metadata = dict(payload)
    metadata["config_hash"] = config_hash(payload)
    metadata["created_at"] = datetime.now(timezone.utc).isoformat()
    return ResultSet(records, metadata)


# ------------------------------------------------------------- persistence

def _cell_filename(algorithm: str, problem: str, run: int) -> str:
    return "%s__%s__r%03d.txt" % (algorithm, problem, run)


def persist(results: ResultSet, out_dir) -> Path:
    """Write the result set under ``out_dir``; returns the directory path."""
    out = Path(out_dir)
    (out / "traces").mkdir(parents=True, exist_ok=True)

    keys = sorted(results.records)
    with open(out / "results.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["algorithm", "problem", "D", "run", "seed",
                    "best_fitness", "evaluations_used", "wall_time"])
        for key in keys:
            r = results.records[key]
            w.writerow([r.algorithm, r.problem, r.dimension, r.run, r.seed,
                        repr(r.best_fitness), r.evaluations_used,
                        repr(r.wall_time)])

    with open(out / "solutions.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["algorithm", "problem", "run", "best_objective",
                    "best_violation", "feasible", "best_position"])
        for key in keys:
            r = results.records[key]
            w.writerow([r.algorithm, r.problem, r.run, repr(r.best_objective),
                        repr(r.best_violation), int(r.feasible),
                        " ".join(repr(float(v)) for v in r.best_position)])

    for key in keys:
        r = results.records[key]
        path = out / "traces" / _cell_filename(*key)
        with open(path, "w") as fh:
            for fes, best in r.trace:
                fh.write("%d %s\n" % (fes, repr(best)))

    with open(out / "summary.csv", "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["algorithm", "problem", "best", "mean", "std"])
        for row in results.summary():
            w.writerow([row["algorithm"], row["problem"], repr(row["best"]),
                        repr(row["mean"]), repr(row["std"])])

    meta = dict(results.metadata)
    meta.setdefault("schema_version", SCHEMA_VERSION)
    with open(out / "meta.json", "w") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return out


def load(out_dir) -> ResultSet:
    """Rebuild a :class:`ResultSet` persisted by :func:`persist`."""
    out = Path(out_dir)
    with open(out / "meta.json") as fh:
        metadata = json.load(fh)
    version = metadata.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaMismatchError(
            "results were written with schema %r; this build reads %d"
            % (version, SCHEMA_VERSION))

    solutions = {}
    with open(out / "solutions.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["algorithm"], row["problem"], int(row["run"]))
            solutions[key] = row

    records: Dict[Tuple[str, str, int], RunRecord] = {}
    with open(out / "results.csv", newline="") as fh:
        for row in csv.DictReader(fh):
            key = (row["algorithm"], row["problem"], int(row["run"]))
            sol = solutions[key]
            trace = []
            with open(out / "traces" / _cell_filename(*key)) as tfh:
                for line in tfh:
                    fes_s, best_s = line.split()
                    trace.append((int(fes_s), float(best_s)))
            records[key] = RunRecord(
                algorithm=key[0], problem=key[1], dimension=int(row["D"]),
                run=key[2], seed=int(row["seed"]),
                best_position=np.array([float(v) for v in
                                        sol["best_position"].split()]),
                best_fitness=float(row["best_fitness"]),
                best_objective=float(sol["best_objective"]),
                best_violation=float(sol["best_violation"]),
                feasible=bool(int(sol["feasible"])),
                trace=trace,
                evaluations_used=int(row["evaluations_used"]),
                wall_time=float(row["wall_time"]),
            )
    return ResultSet(records, metadata)


def export_trace(results: ResultSet, problem: str,
                 algorithms: Optional[Sequence[str]] = None):
    """Mean-over-runs best-so-far per algorithm on a shared FEs grid.

    Returns (grid, {algorithm: series}); each series is non-increasing and
    the grid spans from the earliest to the latest recorded evaluation count.
    """
    algs = list(algorithms) if algorithms else results.algorithms
    runs = results.run_count
    cells = {}
    for a in algs:
        cell = []
        for r in range(runs):
            key = (a, problem, r)
            if key not in results.records:
                raise KeyError("no record for algorithm %r on problem %r run %d"
                               % (a, problem, r))
            cell.append(results.records[key].trace)
        cells[a] = cell

    grid = sorted({fes for cell in cells.values()
                   for tr in cell for fes, _ in tr})
    if not grid:
        raise ValueError("no trace data for problem %r" % problem)
    grid = np.array(grid, dtype=int)

    series = {}
    for a in algs:
        acc = np.zeros(len(grid))
        for tr in cells[a]:
            fes = np.array([f for f, _ in tr])
            best = np.array([b for _, b in tr])
            idx = np.searchsorted(fes, grid, side="right") - 1
            idx = np.clip(idx, 0, len(fes) - 1)
            acc += best[idx]
        series[a] = acc / runs
    return grid, series
