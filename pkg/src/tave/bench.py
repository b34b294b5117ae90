"""Randomized benchmark campaigns with planted solutions.

Four scenarios pair M-tensors (``zeta * I - C``) with general random tensors:

======  ===========================  ============================
name    A                            B
======  ===========================  ============================
MM      M-tensor, C ~ U[0, 1)        M-tensor, C ~ U[-1, 1)
MG      M-tensor, C ~ U[0, 2)        general, U[-1, 0)
GM      general, U[-1, 0)            M-tensor, C ~ U[-0.5, 0.5)
GG      general, U[0, 1)             general, U[-4, 1)
======  ===========================  ============================

Both tensors are semi-symmetrized after drawing.  ``x*`` is drawn from
``U[-1, 1)^n`` and ``b = A x*^{p-1} + B |x*|^{q-1}``, so every instance has at
least one solution.

Randomness: each trial uses its own ``numpy.random.Generator`` backed by the
PCG64 bit generator and seeded with ``SeedSequence([seed, trial_index])``.
Trials are therefore independent of one another and of execution order.
Draw order inside a trial is: A's entries, B's entries, then ``x*``.

Means (iterations, time, terminal error) are taken over successful trials.
"""

from __future__ import annotations

import json
import math
import time
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from .solver import SolverConfig, Status, TaveProblem, residual, solve
from .tensor_core import DenseTensor, contract_to_vector, semi_symmetrize, unit_tensor

__all__ = [
    "SCENARIOS",
    "BenchmarkStats",
    "ScenarioSpec",
    "TrialResult",
    "emit_table",
    "generate_instance",
    "m_tensor_from",
    "make_m_tensor",
    "planted_residual",
    "run_campaign",
    "run_trials",
    "summarize",
    "trial_rng",
]

# (A kind, A range, B kind, B range); kind "M" means zeta*I - C with C drawn from the range
SCENARIOS = {
    "MM": ("M", (0.0, 1.0), "M", (-1.0, 1.0)),
    "MG": ("M", (0.0, 2.0), "G", (-1.0, 0.0)),
    "GM": ("G", (-1.0, 0.0), "M", (-0.5, 0.5)),
    "GG": ("G", (0.0, 1.0), "G", (-4.0, 1.0)),
}


def trial_rng(seed: int, trial_index: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, trial_index])))


def make_m_tensor(m: int, n: int, entry_low: float, entry_high: float, epsilon: float,
                  rng: np.random.Generator) -> DenseTensor:
    """``zeta * I - C`` with ``C ~ U[entry_low, entry_high)`` and
    ``zeta = (1 + epsilon) * max_i sum_{i2..im} c[i, i2, ..., im]``."""
    if not entry_low < entry_high:
        raise ValueError(f"need entry_low < entry_high, got {entry_low}, {entry_high}")
    C = rng.uniform(entry_low, entry_high, size=(n,) * m)
    return m_tensor_from(C, epsilon)


def m_tensor_from(C, epsilon: float) -> DenseTensor:
    C = np.asarray(C, dtype=float)
    n, m = C.shape[0], C.ndim
    zeta = (1 + epsilon) * C.reshape(n, -1).sum(axis=1).max()
    return DenseTensor(zeta * unit_tensor(m, n).array - C)


@dataclass(frozen=True)
class ScenarioSpec:
    scenario: str
    p: int
    q: int
    n: int
    trials: int = 100
    epsilon: float = 0.1
    seed: int = 0
    solver: SolverConfig = field(default_factory=SolverConfig)

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; expected one of "
                             + ", ".join(SCENARIOS))
        if self.p < 2 or self.q < 2:
            raise ValueError(f"orders must be >= 2, got p={self.p}, q={self.q}")
        if self.n < 1:
            raise ValueError(f"n must be >= 1, got {self.n}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")

    @classmethod
    def from_dict(cls, obj: dict) -> ScenarioSpec:
        known = {"scenario", "p", "q", "n", "trials", "epsilon", "seed", "tol", "max_iter"}
        unknown = set(obj) - known
        if unknown:
            raise ValueError(f"unknown campaign field(s): {', '.join(sorted(unknown))}")
        for key in ("scenario", "p", "q", "n"):
            if key not in obj:
                raise ValueError(f"campaign spec is missing field '{key}'")
        for key in ("p", "q", "n", "trials", "seed", "max_iter"):
            if key in obj and not (isinstance(obj[key], int) and not isinstance(obj[key], bool)):
                raise ValueError(f"campaign field '{key}' must be an integer")
        solver = SolverConfig(tol=float(obj.get("tol", 1e-5)),
                              max_iter=int(obj.get("max_iter", 2000)))
        return cls(scenario=obj["scenario"], p=obj["p"], q=obj["q"], n=obj["n"],
                   trials=obj.get("trials", 100), epsilon=float(obj.get("epsilon", 0.1)),
                   seed=obj.get("seed", 0), solver=solver)

    def to_dict(self) -> dict:
        return {"scenario": self.scenario, "p": self.p, "q": self.q, "n": self.n,
                "trials": self.trials, "epsilon": self.epsilon, "seed": self.seed,
                "tol": self.solver.tol, "max_iter": self.solver.max_iter}


def _draw(kind: str, rng_range, m: int, n: int, epsilon: float, rng) -> DenseTensor:
    low, high = rng_range
    if kind == "M":
        return make_m_tensor(m, n, low, high, epsilon, rng)
    return DenseTensor(rng.uniform(low, high, size=(n,) * m))


def generate_instance(spec: ScenarioSpec, trial_index: int,
                      symmetrize=semi_symmetrize) -> tuple[TaveProblem, np.ndarray]:
    """Draw trial ``trial_index`` of ``spec``: the problem and its planted solution.

    ``symmetrize`` may be swapped for :func:`tave.tensor_core.symmetrize` to
    use full instead of semi-symmetrization.
    """
    rng = trial_rng(spec.seed, trial_index)
    a_kind, a_range, b_kind, b_range = SCENARIOS[spec.scenario]
    A = symmetrize(_draw(a_kind, a_range, spec.p, spec.n, spec.epsilon, rng))
    B = symmetrize(_draw(b_kind, b_range, spec.q, spec.n, spec.epsilon, rng))
    x_star = rng.uniform(-1.0, 1.0, size=spec.n)
    b = contract_to_vector(A, x_star) + contract_to_vector(B, np.abs(x_star))
    return TaveProblem(A, B, b, symmetrize=False), x_star


@dataclass(frozen=True)
class TrialResult:
    trial_index: int
    status: Status
    iterations: int
    err: float
    seconds: float

    @property
    def success(self) -> bool:
        return self.status is Status.CONVERGED


@dataclass(frozen=True)
class BenchmarkStats:
    trials: int
    successes: int
    success_rate: float
    mean_iter: float
    k_min: int | None
    k_max: int | None
    mean_time: float
    t_min: float
    t_max: float
    mean_err: float
    failures_by_cause: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        # NaN means "no successful trial"; JSON has no NaN, so it becomes null
        return {k: (None if isinstance(v, float) and math.isnan(v) else v)
                for k, v in asdict(self).items()}

    @classmethod
    def from_dict(cls, obj: dict) -> BenchmarkStats:
        obj = dict(obj)
        for key in ("mean_iter", "mean_time", "mean_err"):
            if obj.get(key) is None:
                obj[key] = math.nan
        return cls(**obj)

    def same_counts(self, other: BenchmarkStats) -> bool:
        """Equality ignoring the wall-clock fields."""
        def strip(s):
            return replace(s, mean_time=0.0, t_min=0.0, t_max=0.0)
        return strip(self) == strip(other)


def run_trials(spec: ScenarioSpec, start_at_planted: bool = False) -> list[TrialResult]:
    """Generate and solve every trial of ``spec``.

    The start point is ``spec.solver.x0`` (all ones by default), or each
    trial's planted ``x*`` when ``start_at_planted`` is set.
    """
    results = []
    for k in range(spec.trials):
        P, x_star = generate_instance(spec, k)
        cfg = replace(spec.solver, x0=x_star) if start_at_planted else spec.solver
        start = time.perf_counter()
        report = solve(P, cfg)
        seconds = time.perf_counter() - start
        results.append(TrialResult(k, report.status, report.iterations,
                                   report.final_residual, seconds))
    return results


def summarize(results: list[TrialResult]) -> BenchmarkStats:
    results = sorted(results, key=lambda r: r.trial_index)
    ok = [r for r in results if r.success]
    failures: dict[str, int] = {}
    for r in results:
        if not r.success:
            failures[r.status.value] = failures.get(r.status.value, 0) + 1
    times = [r.seconds for r in results]
    nan = math.nan
    return BenchmarkStats(
        trials=len(results),
        successes=len(ok),
        success_rate=len(ok) / len(results),
        mean_iter=float(np.mean([r.iterations for r in ok])) if ok else nan,
        k_min=min(r.iterations for r in ok) if ok else None,
        k_max=max(r.iterations for r in ok) if ok else None,
        mean_time=float(np.mean([r.seconds for r in ok])) if ok else nan,
        t_min=min(times),
        t_max=max(times),
        mean_err=float(np.mean([r.err for r in ok])) if ok else nan,
        failures_by_cause=dict(sorted(failures.items())),
    )


def run_campaign(spec: ScenarioSpec) -> BenchmarkStats:
    """Solve ``spec.trials`` planted instances from ``x0 = ones`` and aggregate."""
    return summarize(run_trials(spec))


def planted_residual(spec: ScenarioSpec, trial_index: int) -> float:
    P, x_star = generate_instance(spec, trial_index)
    return float(np.linalg.norm(residual(P, x_star)))


# -- table output ------------------------------------------------------------

TABLE_COLUMNS = ("Iter. (k_min / k_max)", "Time (t_min / t_max)", "Err", "SR")


def _config_label(spec: ScenarioSpec) -> str:
    if spec.p == spec.q:
        return f"({spec.p}, {spec.n})"
    return f"({spec.p}, {spec.q}, {spec.n})"


def _cells(stats: BenchmarkStats) -> list[str]:
    if stats.successes:
        it = f"{stats.mean_iter:.2f} ({stats.k_min} / {stats.k_max})"
        err = f"{stats.mean_err:.1e}"
        tm = f"{stats.mean_time:.2f} ({stats.t_min:.2f} / {stats.t_max:.2f})"
    else:
        it, err = "- (- / -)", "-"
        tm = f"- ({stats.t_min:.2f} / {stats.t_max:.2f})"
    return [it, tm, err, f"{stats.success_rate:.2f}"]


def emit_table(grid, fmt: str = "markdown") -> str:
    """Render ``[(ScenarioSpec, BenchmarkStats), ...]`` as ``tsv``, ``json`` or ``markdown``.

    One row per configuration: the ``(m, n)`` or ``(p, q, n)`` label, then
    mean iterations with ``(k_min / k_max)`` to 2 decimals, mean time with
    ``(t_min / t_max)``, mean Err in scientific notation with 2 significant
    digits, and SR to 2 decimals.  Rows are grouped by scenario; in markdown
    each scenario block is its own table with a 5-column header.  Averages
    cover successful trials only.
    """
    grid = list(grid)
    if not grid:
        raise ValueError("nothing to render: empty grid")
    if fmt == "json":
        return json.dumps([{"spec": s.to_dict(), "stats": st.to_dict()} for s, st in grid],
                          indent=2)
    if fmt == "tsv":
        lines = ["\t".join(("scenario", "config") + TABLE_COLUMNS)]
        for spec, stats in grid:
            lines.append("\t".join([spec.scenario, _config_label(spec)] + _cells(stats)))
        return "\n".join(lines) + "\n"
    if fmt == "markdown":
        blocks = []
        for scenario in dict.fromkeys(s.scenario for s, _ in grid):
            rows = [(s, st) for s, st in grid if s.scenario == scenario]
            head = "(m, n)" if all(s.p == s.q for s, _ in rows) else "(p, q, n)"
            lines = [f"Scenario {scenario}", "",
                     "| " + " | ".join((head,) + TABLE_COLUMNS) + " |",
                     "|" + "---|" * (len(TABLE_COLUMNS) + 1)]
            for spec, stats in rows:
                lines.append("| " + " | ".join([_config_label(spec)] + _cells(stats)) + " |")
            blocks.append("\n".join(lines))
        return "\n\n".join(blocks) + "\n\nMeans over successful trials only.\n"
    raise ValueError(f"unknown format {fmt!r}; expected tsv, json or markdown")
