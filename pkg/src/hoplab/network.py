"""Finite-N network simulation through the explicit solution.

The dynamics

    dV = -leak V dt + (1/sqrt(N)) J V dt + noise dB,   V(0) ~ nu0^(x N)

are linear, so trajectories are evaluated from the closed-form solution

    V(t) = exp(-leak t) e^{tJ/sqrt(N)} [ V0 + noise * S(t) ],
    S(t) = int_0^t exp(leak s) e^{-sJ/sqrt(N)} dB(s),

rather than by time stepping the SDE: the deterministic flow carries no
discretization error, and the only approximation is the left-endpoint
refinement of the stochastic integral, controlled by ``TimeGrid.substeps``.
Matrix exponential actions use the truncated Taylor series with an adaptive,
ratio-certified stopping rule.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError, NumericalError
from .laws import EntryLaw, InitialLaw, SeedSpec, sample_initial, sample_matrix

DEFAULT_ACTION_TOL = 1e-10
_MAX_ENSEMBLE_VALUES = 2 * 10**8


@dataclass(frozen=True)
class TimeGrid:
    """Strictly increasing output times starting at 0, plus the noise refinement."""

    times: tuple
    substeps: int = 1

    def __post_init__(self):
        times = tuple(float(t) for t in self.times)
        object.__setattr__(self, "times", times)
        if not times or times[0] != 0.0:
            raise DomainError("the time grid must start at 0")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise DomainError("the time grid must be strictly increasing")
        if self.substeps < 1:
            raise DomainError(f"substeps must be >= 1, got {self.substeps}")

    @property
    def horizon(self) -> float:
        return self.times[-1]


@dataclass(frozen=True)
class ModelParams:
    """Complete configuration of one finite network."""

    n: int
    leak: float
    noise: float
    entry_law: EntryLaw
    initial_law: InitialLaw
    grid: TimeGrid

    def __post_init__(self):
        if self.n < 1:
            raise DomainError(f"network size must be >= 1, got {self.n}")
        if self.noise < 0:
            raise DomainError(f"noise amplitude must be >= 0, got {self.noise}")
        if not math.isfinite(self.leak):
            raise DomainError(f"leak rate must be finite, got {self.leak}")


@dataclass
class TrajectoryEnsemble:
    """Tracked-coordinate trajectories over independent disorder replicas.

    ``values`` has shape (replicas, coords, times); the full network state is
    transient, only tracked coordinates are stored.
    """

    params: ModelParams
    coords: tuple
    seeds: SeedSpec
    values: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return np.asarray(self.params.grid.times)

    @property
    def n_replicas(self) -> int:
        return self.values.shape[0]


def operator_norm_estimate(J: np.ndarray, iterations: int = 20) -> float:
    """Largest-singular-value estimate by power iteration on J^T J.

    Only used to size the hard cap on the series length; correctness of the
    matrix action never depends on it.
    """
    n = J.shape[0]
    v = np.ones(n) / math.sqrt(n)
    for _ in range(iterations):
        w = J.T @ (J @ v)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return 0.0
        v = w / norm
    return float(np.linalg.norm(J @ v))


def _series_cap(tau: float, n: int, norm_estimate: float) -> int:
    return int(10.0 * (1.0 + abs(tau) * norm_estimate / math.sqrt(n)) + 64.0)


def _series_action(J, scale: float, v, tol: float, cap: int) -> np.ndarray:
    """Unchecked core of the truncated-series action; see matrix_action_exp."""
    total = v.copy()
    w = v
    prev_norm = math.sqrt(w @ w)
    if prev_norm == 0.0:
        return total
    for l in range(1, cap + 1):
        w = (scale / l) * (J @ w)
        total += w
        norm = math.sqrt(w @ w)
        if norm == 0.0:
            return total
        if norm <= 0.5 * prev_norm and norm <= tol * math.sqrt(total @ total):
            return total
        prev_norm = norm
    raise NumericalError(
        f"matrix exponential action did not converge: scale={scale}, n={len(v)}, "
        f"cap={cap}, last term norm {prev_norm:.3e}"
    )


def matrix_action_exp(
    J: np.ndarray,
    tau: float,
    v: np.ndarray,
    tol: float = DEFAULT_ACTION_TOL,
    norm_estimate: float | None = None,
) -> np.ndarray:
    """exp((tau / sqrt(N)) J) @ v by the truncated Taylor series.

    Terms follow w_{l+1} = (tau / ((l+1) sqrt(N))) J w_l; summation stops once
    the newest term is below ``tol`` times the partial sum AND at most half the
    previous term, which bounds the omitted tail geometrically.
    """
    if not (0.0 < tol < 1.0):
        raise DomainError(f"tolerance must lie in (0, 1), got {tol}")
    J = np.asarray(J, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if J.ndim != 2 or J.shape[0] != J.shape[1]:
        raise DomainError(f"J must be square, got shape {J.shape}")
    if v.shape != (J.shape[0],):
        raise DomainError(f"v must conform to J, got {v.shape} vs {J.shape}")
    n = J.shape[0]
    if norm_estimate is None:
        norm_estimate = operator_norm_estimate(J)
    return _series_action(J, tau / math.sqrt(n), v, tol, _series_cap(tau, n, norm_estimate))


def _exp_action_on_grid(J, v, times, tol, norm_estimate):
    """exp((t/sqrt(N)) J) @ v for every grid time t in one shared series pass.

    Evaluates the same truncated Taylor series as ``matrix_action_exp`` with
    the stopping rule applied at the largest time, where the tail is largest;
    terms for earlier times are the same vectors scaled by (t/T)^l <= 1.
    """
    n = J.shape[0]
    m = len(times)
    horizon = times[-1]
    out = np.tile(v, (m, 1)).astype(np.float64)
    if horizon == 0.0 or np.linalg.norm(v) == 0.0:
        return out
    ratios = np.asarray(times) / horizon
    powers = np.ones(m)
    scale = horizon / math.sqrt(n)
    cap = int(10.0 * (1.0 + horizon * norm_estimate / math.sqrt(n)) + 64.0)
    w = v.astype(np.float64)
    prev_norm = np.linalg.norm(w)
    for l in range(1, cap + 1):
        w = (scale / l) * (J @ w)
        powers = powers * ratios
        out += powers[:, None] * w[None, :]
        norm = np.linalg.norm(w)
        if norm == 0.0:
            return out
        if norm <= tol * np.linalg.norm(out[-1]) and norm <= 0.5 * prev_norm:
            return out
        prev_norm = norm
    raise NumericalError(
        f"grid matrix exponential action did not converge: horizon={horizon}, n={n}, cap={cap}"
    )


def evolve_noiseless(
    J: np.ndarray,
    v0: np.ndarray,
    times,
    leak: float,
    tol: float = DEFAULT_ACTION_TOL,
    norm_estimate: float | None = None,
) -> np.ndarray:
    """Noise-free trajectory exp(-leak t) e^{tJ/sqrt(N)} v0 on the grid.

    Returns shape (n_times, N).
    """
    times = tuple(float(t) for t in times)
    if norm_estimate is None:
        norm_estimate = operator_norm_estimate(J)
    flow = _exp_action_on_grid(J, np.asarray(v0, dtype=np.float64), times, tol, norm_estimate)
    decay = np.exp(-leak * np.asarray(times))
    return decay[:, None] * flow


def evolve_noisy(
    J: np.ndarray,
    v0: np.ndarray,
    params: ModelParams,
    noise_rng: np.random.Generator,
    tol: float = DEFAULT_ACTION_TOL,
    norm_estimate: float | None = None,
) -> np.ndarray:
    """Trajectory with Brownian forcing on the grid, shape (n_times, N).

    The stochastic integral S(t) is accumulated by left-endpoint sums over the
    grid intervals refined by ``substeps``; each summand applies the inverse
    flow to the Brownian increment.  Weak bias per substep is O(step^(3/2)),
    checked by the self-convergence test.
    """
    if params.noise == 0.0:
        return evolve_noiseless(J, v0, params.grid.times, params.leak, tol, norm_estimate)
    times = params.grid.times
    n = params.n
    if norm_estimate is None:
        norm_estimate = operator_norm_estimate(J)
    J = np.asarray(J, dtype=np.float64)
    v0 = np.asarray(v0, dtype=np.float64)
    sqrt_n = math.sqrt(n)
    cap = _series_cap(params.grid.horizon, n, norm_estimate)
    out = np.empty((len(times), n))
    out[0] = v0
    integral = np.zeros(n)
    for k in range(1, len(times)):
        left, right = times[k - 1], times[k]
        step = (right - left) / params.grid.substeps
        sqrt_step = math.sqrt(step)
        increments = noise_rng.standard_normal((params.grid.substeps, n))
        for i in range(params.grid.substeps):
            u = left + i * step
            integral += math.exp(params.leak * u) * _series_action(
                J, -u / sqrt_n, sqrt_step * increments[i], tol, cap
            )
        forced = v0 + params.noise * integral
        out[k] = math.exp(-params.leak * right) * _series_action(
            J, right / sqrt_n, forced, tol, cap
        )
    return out


def _replica_trajectory(params: ModelParams, seed: SeedSpec, replica: int, tol: float) -> np.ndarray:
    J = sample_matrix(params.n, params.entry_law, seed, replica)
    v0 = sample_initial(params.n, params.initial_law, seed, replica)
    norm_estimate = operator_norm_estimate(J)
    if params.noise == 0.0:
        return evolve_noiseless(J, v0, params.grid.times, params.leak, tol, norm_estimate)
    rng = seed.stream("brownian", replica)
    return evolve_noisy(J, v0, params, rng, tol, norm_estimate)


def run_ensemble(
    params: ModelParams,
    coords,
    n_replicas: int,
    seed: SeedSpec,
    tol: float = DEFAULT_ACTION_TOL,
    threads: int = 1,
) -> TrajectoryEnsemble:
    """Independent replicas with fresh disorder, initial state and noise each.

    Results are a pure function of (params, coords, n_replicas, seed, tol) and
    do not depend on ``threads`` or scheduling.
    """
    coords = tuple(int(c) for c in coords)
    if n_replicas < 1:
        raise DomainError(f"need at least one replica, got {n_replicas}")
    if not coords:
        raise DomainError("need at least one tracked coordinate")
    if any(c < 1 or c > params.n for c in coords):
        raise DomainError(f"coords must lie in 1..{params.n}, got {coords}")
    n_times = len(params.grid.times)
    if n_replicas * len(coords) * n_times > _MAX_ENSEMBLE_VALUES:
        raise CapacityError(
            f"ensemble of {n_replicas} x {len(coords)} x {n_times} values exceeds the memory budget"
        )
    values = np.empty((n_replicas, len(coords), n_times))
    idx = np.asarray(coords) - 1

    def work(replica: int) -> None:
        trajectory = _replica_trajectory(params, seed, replica, tol)
        values[replica] = trajectory[:, idx].T

    if threads <= 1:
        for r in range(n_replicas):
            work(r)
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(work, range(n_replicas)))
    return TrajectoryEnsemble(params=params, coords=coords, seeds=seed, values=values)
