"""Derivative-free global optimizers for the non-convex, non-smooth sizing
objective, plus Pareto-front generation and a solver benchmark harness.

All solvers share the same contract: box bounds with an optional per-
dimension integer mask (integer dimensions are rounded at evaluation time
and in reported points), a hard evaluation budget, stall-based early
termination, and full determinism for a given seed.  The reported best
value is always a fresh re-evaluation of the reported best point.
"""

from __future__ import annotations

import csv
import json
import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .errors import InputDataError

STALL_ITERS = 50
STALL_TOL = 1e-6


@dataclass(frozen=True)
class SearchSpace:
    """Box-constrained search space with integer-dimension flags."""

    lower: np.ndarray
    upper: np.ndarray
    integer_mask: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lower", np.asarray(self.lower, dtype=float))
        object.__setattr__(self, "upper", np.asarray(self.upper, dtype=float))
        object.__setattr__(self, "integer_mask",
                           np.asarray(self.integer_mask, dtype=bool))
        if not (len(self.lower) == len(self.upper) == len(self.integer_mask)):
            raise InputDataError("search-space vectors must share one length")
        if np.any(self.lower > self.upper):
            raise InputDataError("lower bounds exceed upper bounds")

    @property
    def dim(self) -> int:
        return len(self.lower)

    def round_point(self, x: np.ndarray) -> np.ndarray:
        x = np.clip(x, self.lower, self.upper)
        out = x.copy()
        out[self.integer_mask] = np.round(out[self.integer_mask])
        return out


@dataclass
class SolverReport:
    solver: str
    best_point: np.ndarray
    best_value: float
    runtime_s: float
    evaluations: int
    overall: float = field(init=False)

    def __post_init__(self):
        self.overall = self.runtime_s * self.best_value

    def as_dict(self) -> dict:
        return {
            "solver": self.solver,
            "best_point": [float(v) for v in self.best_point],
            "best_value": float(self.best_value),
            "runtime_s": float(self.runtime_s),
            "evaluations": int(self.evaluations),
            "overall": float(self.overall),
        }


class _Evaluator:
    """Budget-tracking wrapper that rounds integer dimensions."""

    def __init__(self, objective, space: SearchSpace, max_evals: int):
        self.objective = objective
        self.space = space
        self.max_evals = max_evals
        self.count = 0

    @property
    def exhausted(self) -> bool:
        return self.count >= self.max_evals

    def __call__(self, x) -> float:
        self.count += 1
        return float(self.objective(self.space.round_point(np.asarray(x, dtype=float))))


def _report(name, ev: _Evaluator, best_x, t0) -> SolverReport:
    best_x = ev.space.round_point(np.asarray(best_x, dtype=float))
    value = float(ev.objective(best_x))  # re-evaluate: no stale caching
    return SolverReport(name, best_x, value, time.perf_counter() - t0, ev.count)


def pso_minimize(objective, space: SearchSpace, swarm_size: int = 30,
                 omega: float = 0.729, c1: float = 1.49445,
                 c2: float = 1.49445, max_evals: int = 2000,
                 seed: int = 0, x0=None) -> SolverReport:
    """Particle swarm with inertia-weight velocity update
    v <- w*v + c1*r1*(pbest - x) + c2*r2*(gbest - x)."""
    if max_evals < swarm_size:
        raise InputDataError("max_evals must cover at least one swarm sweep")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    ev = _Evaluator(objective, space, max_evals)
    lo, hi = space.lower, space.upper
    span = hi - lo

    x = lo + rng.uniform(size=(swarm_size, space.dim)) * span
    if x0 is not None:
        x[0] = np.clip(x0, lo, hi)
    v = rng.uniform(-1, 1, size=(swarm_size, space.dim)) * span * 0.1
    fx = np.array([ev(xi) for xi in x])
    pbest, fpbest = x.copy(), fx.copy()
    g = int(np.argmin(fpbest))
    gbest, fgbest = pbest[g].copy(), fpbest[g]

    stall = 0
    while not ev.exhausted and stall < STALL_ITERS:
        r1 = rng.uniform(size=(swarm_size, space.dim))
        r2 = rng.uniform(size=(swarm_size, space.dim))
        v = omega * v + c1 * r1 * (pbest - x) + c2 * r2 * (gbest - x)
        x = np.clip(x + v, lo, hi)
        prev_best = fgbest
        for i in range(swarm_size):
            if ev.exhausted:
                break
            fi = ev(x[i])
            if fi < fpbest[i]:
                fpbest[i] = fi
                pbest[i] = x[i].copy()
                if fi < fgbest:
                    fgbest = fi
                    gbest = x[i].copy()
        if prev_best - fgbest <= STALL_TOL * max(abs(prev_best), 1e-12):
            stall += 1
        else:
            stall = 0
    return _report("pso", ev, gbest, t0)


def ga_minimize(objective, space: SearchSpace, population: int = 50,
                crossover_rate: float = 0.8, mutation_rate: float = 0.1,
                penalty_weight: float = 1e3, max_evals: int = 2000,
                seed: int = 0, x0=None) -> SolverReport:
    """Genetic algorithm: tournament selection, blend crossover, gaussian
    mutation.  Fitness = objective + penalty_weight * bound violation (the
    similarity/parity term of the full fitness form is omitted; candidates
    are clipped so the penalty is normally zero)."""
    if max_evals < population:
        raise InputDataError("max_evals must cover the initial population")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    ev = _Evaluator(objective, space, max_evals)
    lo, hi = space.lower, space.upper
    span = np.where(hi > lo, hi - lo, 1.0)

    def fitness(xi):
        violation = np.sum(np.maximum(lo - xi, 0) + np.maximum(xi - hi, 0))
        return ev(np.clip(xi, lo, hi)) + penalty_weight * violation

    pop = lo + rng.uniform(size=(population, space.dim)) * (hi - lo)
    if x0 is not None:
        pop[0] = np.clip(x0, lo, hi)
    fit = np.array([fitness(p) for p in pop])
    best_i = int(np.argmin(fit))
    best_x, best_f = pop[best_i].copy(), fit[best_i]

    stall = 0
    while not ev.exhausted and stall < STALL_ITERS:
        children = np.empty_like(pop)
        for k in range(population):
            i, j = rng.integers(population, size=2)
            a = pop[i] if fit[i] <= fit[j] else pop[j]
            i, j = rng.integers(population, size=2)
            b = pop[i] if fit[i] <= fit[j] else pop[j]
            if rng.uniform() < crossover_rate:
                alpha = rng.uniform(-0.25, 1.25, size=space.dim)
                child = alpha * a + (1 - alpha) * b
            else:
                child = a.copy()
            mutate = rng.uniform(size=space.dim) < mutation_rate
            child = np.where(mutate, child + rng.normal(0, 0.15, space.dim) * span, child)
            children[k] = np.clip(child, lo, hi)
        prev_best = best_f
        for k in range(population):
            if ev.exhausted:
                break
            fk = fitness(children[k])
            # steady-state elitism: child replaces current worst if better
            worst = int(np.argmax(fit))
            if fk < fit[worst]:
                fit[worst] = fk
                pop[worst] = children[k]
            if fk < best_f:
                best_f = fk
                best_x = children[k].copy()
        if prev_best - best_f <= STALL_TOL * max(abs(prev_best), 1e-12):
            stall += 1
        else:
            stall = 0
    return _report("ga", ev, best_x, t0)


def sa_minimize(objective, space: SearchSpace, t_initial: float = 1.0,
                cooling: float = 0.95, steps_per_temp: int = 20,
                max_evals: int = 2000, seed: int = 0,
                schedule: str = "geometric", x0=None) -> SolverReport:
    """Simulated annealing: worse moves accepted with probability
    exp(-dE/T); geometric cooling by default, the (slow) logarithmic
    schedule behind ``schedule='log'``."""
    if t_initial <= 0:
        raise InputDataError("t_initial must be positive")
    if not 0 < cooling < 1:
        raise InputDataError("cooling factor must be in (0, 1)")
    if schedule not in ("geometric", "log"):
        raise InputDataError("schedule must be 'geometric' or 'log'")
    t0_clock = time.perf_counter()
    rng = np.random.default_rng(seed)
    ev = _Evaluator(objective, space, max_evals)
    lo, hi = space.lower, space.upper
    span = np.where(hi > lo, hi - lo, 1.0)

    x = lo + rng.uniform(size=space.dim) * (hi - lo) if x0 is None else np.clip(x0, lo, hi)
    fx = ev(x)
    best_x, best_f = x.copy(), fx
    temp = t_initial
    outer = 0
    while not ev.exhausted:
        outer += 1
        for _ in range(steps_per_temp):
            if ev.exhausted:
                break
            cand = np.clip(x + rng.normal(0, 0.1, space.dim) * span, lo, hi)
            fc = ev(cand)
            de = fc - fx
            if de <= 0 or rng.uniform() < np.exp(-de / temp):
                x, fx = cand, fc
                if fx < best_f:
                    best_x, best_f = x.copy(), fx
        if schedule == "geometric":
            temp = cooling * temp
        else:
            temp = t_initial / np.log(outer + np.e)
    return _report("sa", ev, best_x, t0_clock)


def sa_acceptance_probability(delta_e: float, temperature: float) -> float:
    """Metropolis acceptance: 1 for downhill moves, exp(-dE/T) otherwise."""
    if temperature <= 0:
        raise InputDataError("temperature must be positive")
    if delta_e <= 0:
        return 1.0
    return float(np.exp(-delta_e / temperature))


def pattern_search_minimize(objective, space: SearchSpace,
                            initial_mesh=None, mesh_tol: float = 1e-6,
                            expand: float = 2.0, contract: float = 0.5,
                            max_evals: int = 2000, x0=None,
                            seed: int | None = None) -> SolverReport:
    """Compass (direct pattern) search: poll +/- mesh along each axis,
    expand on success, contract on failure, stop when the mesh falls below
    tolerance.  Integer dimensions poll in whole steps and never shrink
    below a unit mesh."""
    if mesh_tol <= 0:
        raise InputDataError("mesh_tol must be positive")
    t0 = time.perf_counter()
    ev = _Evaluator(objective, space, max_evals)
    lo, hi = space.lower, space.upper
    span = np.where(hi > lo, hi - lo, 1.0)
    integer = space.integer_mask

    if x0 is not None:
        x = np.clip(np.asarray(x0, dtype=float), lo, hi)
    elif seed is not None:
        x = lo + np.random.default_rng(seed).uniform(size=space.dim) * (hi - lo)
    else:
        x = (lo + hi) / 2.0
    x = space.round_point(x)  # polls must stay on the integer lattice
    mesh = np.asarray(initial_mesh, dtype=float) if initial_mesh is not None else span / 4.0
    mesh = np.where(integer, np.maximum(np.round(mesh), 1.0), mesh)
    fx = ev(x)
    cont = ~integer

    while not ev.exhausted:
        improved = False
        for d in range(space.dim):
            for sign in (1.0, -1.0):
                if ev.exhausted:
                    break
                cand = x.copy()
                cand[d] = np.clip(cand[d] + sign * mesh[d], lo[d], hi[d])
                if cand[d] == x[d]:
                    continue
                fc = ev(cand)
                if fc < fx:
                    x, fx = cand, fc
                    improved = True
                    break
        if improved:
            mesh = np.where(cont, np.minimum(mesh * expand, span), mesh)
            continue
        cont_done = not np.any(cont) or np.all(mesh[cont] < mesh_tol)
        int_done = not np.any(integer) or np.all(mesh[integer] <= 1.0)
        if cont_done and int_done:
            break
        mesh = np.where(cont, mesh * contract, mesh)
        mesh = np.where(integer, np.maximum(np.round(mesh * contract), 1.0), mesh)
    return _report("pattern_search", ev, x, t0)


def _integer_polish(ev: _Evaluator, space: SearchSpace, x, fx):
    """Local +-1 neighborhood descent on integer dimensions."""
    integer_dims = np.nonzero(space.integer_mask)[0]
    if integer_dims.size == 0:
        return x, fx
    x = space.round_point(np.asarray(x, dtype=float))
    improved = True
    while improved and not ev.exhausted:
        improved = False
        for d in integer_dims:
            for step in (1.0, -1.0):
                cand = x.copy()
                cand[d] = np.clip(cand[d] + step, space.lower[d], space.upper[d])
                if cand[d] == x[d] or ev.exhausted:
                    continue
                fc = ev(cand)
                if fc < fx:
                    x, fx = cand, fc
                    improved = True
    return x, fx


def multistart_minimize(objective, space: SearchSpace, n_starts: int = 25,
                        max_evals: int = 2000, seed: int = 0,
                        x0=None) -> SolverReport:
    """Uniform random restarts, each refined by a Nelder-Mead simplex
    search (bounds enforced), with an integer neighborhood polish on masked
    dimensions.  Approximates multiple-start/global search solvers."""
    if n_starts < 1:
        raise InputDataError("n_starts must be >= 1")
    t0 = time.perf_counter()
    rng = np.random.default_rng(seed)
    ev = _Evaluator(objective, space, max_evals)
    lo, hi = space.lower, space.upper
    bounds = list(zip(lo, hi))
    per_start = max(max_evals // n_starts, 10)

    starts = [lo + rng.uniform(size=space.dim) * (hi - lo) for _ in range(n_starts)]
    if x0 is not None:
        starts[0] = np.clip(x0, lo, hi)
    best_x, best_f = None, np.inf
    for s in starts:
        if ev.exhausted:
            break
        budget = min(per_start, ev.max_evals - ev.count)
        res = minimize(ev, s, method="Nelder-Mead", bounds=bounds,
                       options={"maxfev": budget, "xatol": 1e-6, "fatol": 1e-9})
        x, fx = _integer_polish(ev, space, res.x, float(res.fun))
        if fx < best_f:
            best_x, best_f = x, fx
    return _report("multistart", ev, best_x, t0)


SOLVERS = {
    "pso": pso_minimize,
    "ga": ga_minimize,
    "sa": sa_minimize,
    "ps": pattern_search_minimize,
    "ms": multistart_minimize,
}


def solver_benchmark(objective, space: SearchSpace, solvers=("pso", "ga", "sa", "ps", "ms"),
                     seed: int = 0, max_evals: int = 2000,
                     solver_params: dict | None = None) -> list[SolverReport]:
    """Run each solver under an identical evaluation budget and rank by the
    overall metric (runtime x best value, lower is better)."""
    if not solvers:
        raise InputDataError("at least one solver required")
    solver_params = solver_params or {}
    reports = []
    for name in solvers:
        if name not in SOLVERS:
            raise InputDataError(f"unknown solver {name!r}; pick from {sorted(SOLVERS)}")
        kwargs = dict(solver_params.get(name, {}))
        kwargs.setdefault("max_evals", max_evals)
        kwargs.setdefault("seed", seed)
        reports.append(SOLVERS[name](objective, space, **kwargs))
    reports.sort(key=lambda r: r.overall)
    return reports


def benchmark_to_csv(reports: list[SolverReport], path):
    with open(path, "w", newline="\n", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["solver", "runtime_s", "min_obj", "overall", "best_point"])
        for r in reports:
            writer.writerow([r.solver, f"{r.runtime_s:.4f}", f"{r.best_value:.6f}",
                             f"{r.overall:.4f}",
                             " ".join(f"{v:g}" for v in r.best_point)])


def benchmark_to_json(reports: list[SolverReport], path):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump([r.as_dict() for r in reports], fh, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# Multiobjective search (nondominated sorting + crowding distance)
# ---------------------------------------------------------------------------

def dominates(a: np.ndarray, b: np.ndarray) -> bool:
    """True if objective vector a Pareto-dominates b (all <=, one <)."""
    return bool(np.all(a <= b) and np.any(a < b))


def _nondominated_sort(values: np.ndarray) -> list[np.ndarray]:
    n = len(values)
    dominated_by = [[] for _ in range(n)]
    dom_count = np.zeros(n, dtype=int)
    for i in range(n):
        for j in range(i + 1, n):
            if dominates(values[i], values[j]):
                dominated_by[i].append(j)
                dom_count[j] += 1
            elif dominates(values[j], values[i]):
                dominated_by[j].append(i)
                dom_count[i] += 1
    fronts = []
    current = np.nonzero(dom_count == 0)[0]
    while current.size:
        fronts.append(current)
        nxt = []
        for i in current:
            for j in dominated_by[i]:
                dom_count[j] -= 1
                if dom_count[j] == 0:
                    nxt.append(j)
        current = np.array(sorted(set(nxt)), dtype=int)
    return fronts


def _crowding_distance(values: np.ndarray) -> np.ndarray:
    n, m = values.shape
    dist = np.zeros(n)
    for k in range(m):
        order = np.argsort(values[:, k])
        vmin, vmax = values[order[0], k], values[order[-1], k]
        dist[order[0]] = dist[order[-1]] = np.inf
        if vmax - vmin < 1e-15:
            continue
        for idx in range(1, n - 1):
            dist[order[idx]] += (values[order[idx + 1], k] - values[order[idx - 1], k]) / (vmax - vmin)
    return dist


def pareto_front(objectives, space: SearchSpace, population: int = 40,
                 generations: int = 40, seed: int = 0):
    """Evolutionary multiobjective search (nondominated sorting + crowding
    distance selection).  ``objectives`` maps a point to a vector of values
    to minimize.  Returns a list of (point, values) pairs that is strictly
    mutually non-dominated."""
    if population < 4:
        raise InputDataError("population must be >= 4")
    rng = np.random.default_rng(seed)
    lo, hi = space.lower, space.upper
    span = np.where(hi > lo, hi - lo, 1.0)

    def evaluate(x):
        vals = np.asarray(objectives(space.round_point(x)), dtype=float)
        if vals.ndim != 1 or len(vals) < 2:
            raise InputDataError("objectives must return a vector of >= 2 values")
        return vals

    pop = lo + rng.uniform(size=(population, space.dim)) * (hi - lo)
    vals = np.array([evaluate(p) for p in pop])

    for _ in range(generations):
        children = np.empty_like(pop)
        for k in range(population):
            i, j = rng.integers(population, size=2)
            a = pop[i] if rng.uniform() < 0.5 else pop[j]
            i, j = rng.integers(population, size=2)
            b = pop[i] if rng.uniform() < 0.5 else pop[j]
            alpha = rng.uniform(-0.1, 1.1, size=space.dim)
            child = alpha * a + (1 - alpha) * b
            mutate = rng.uniform(size=space.dim) < 0.2
            child = np.where(mutate, child + rng.normal(0, 0.1, space.dim) * span, child)
            children[k] = np.clip(child, lo, hi)
        child_vals = np.array([evaluate(c) for c in children])

        all_pop = np.vstack([pop, children])
        all_vals = np.vstack([vals, child_vals])
        fronts = _nondominated_sort(all_vals)
        keep = []
        for front in fronts:
            if len(keep) + len(front) <= population:
                keep.extend(front.tolist())
            else:
                dist = _crowding_distance(all_vals[front])
                order = front[np.argsort(-dist)]
                keep.extend(order[: population - len(keep)].tolist())
                break
        keep = np.array(keep, dtype=int)
        pop, vals = all_pop[keep], all_vals[keep]

    # final strict filter: drop any dominated or duplicate member
    rounded = np.array([space.round_point(p) for p in pop])
    result = []
    for i in range(len(pop)):
        if any(dominates(vals[j], vals[i]) for j in range(len(pop)) if j != i):
            continue
        if any(np.allclose(rounded[i], r) and np.allclose(vals[i], v)
               for r, v in result):
            continue
        result.append((rounded[i], vals[i]))
    return result
