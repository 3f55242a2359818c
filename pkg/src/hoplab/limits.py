"""Closed-form covariances of the mean-field limit and exact-in-law samplers.

As the network grows, a single coordinate of the potential converges in law to

    V(t) = exp(-leak t) [ V0 + noise * OU(t) + F(t) + noise * G(t) ]

with four mutually independent pieces:

* V0            -- one draw from the initial law,
* OU(t)         -- int_0^t exp(leak s) dB(s), a Gaussian martingale,
* F(t)          -- the coupling fluctuation driven by the initial condition,
  a centered Gaussian process with cov  phi0 * (I0(2 sigma sqrt(st)) - 1),
* G(t)          -- the coupling fluctuation driven by the Brownian noise,
  a centered Gaussian process with cov
  int_0^s exp(2 leak u) (I0(2 sigma sqrt((t-u)(s-u))) - 1) du   (s <= t).

F is sampled exactly through its series representation
``sqrt(phi0) * sum_l (sigma t)^l / l! * g_l`` with shared standard Gaussians
``g_l`` (path coherence across grid times, truncation by omitted-variance
budget).  OU and G are sampled exactly on the grid through a positive
semidefinite factorization of their covariance matrices.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, NumericalError
from .laws import InitialLaw, SeedSpec
from .quadrature import DEFAULT_QUAD_TOL, adaptive_simpson
from .special import i0, i0m1

DEFAULT_FLUCT_VAR_TOL = 1e-12
_PSD_JITTER = 1e-10


@dataclass(frozen=True)
class LimitParams:
    """Parameters of the limit process.

    ``init_mean`` and ``init_msq`` are the mean and raw second moment of the
    initial law; ``noise`` is the Brownian amplitude.
    """

    leak: float
    sigma: float
    noise: float = 0.0
    init_mean: float = 0.0
    init_msq: float = 1.0

    def __post_init__(self):
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise DomainError(f"sigma must be positive, got {self.sigma}")
        if self.noise < 0:
            raise DomainError(f"noise amplitude must be >= 0, got {self.noise}")
        if self.init_msq < self.init_mean**2 - 1e-15:
            raise DomainError("second moment below squared mean is impossible")


def limit_params_for(leak: float, sigma: float, noise: float, initial_law: InitialLaw) -> LimitParams:
    return LimitParams(
        leak=leak,
        sigma=sigma,
        noise=noise,
        init_mean=initial_law.mean,
        init_msq=initial_law.second_moment,
    )


def _check_times(s: float, t: float) -> None:
    if s < 0 or t < 0:
        raise DomainError(f"times must be nonnegative, got s={s}, t={t}")


def fluctuation_cov(s: float, t: float, params: LimitParams) -> float:
    """Covariance of the initial-condition coupling fluctuation F."""
    _check_times(s, t)
    return params.init_msq * i0m1(2.0 * params.sigma * math.sqrt(s * t))


def potential_cov(s: float, t: float, params: LimitParams) -> float:
    """Covariance of the noise-free limit potential exp(-leak t)(V0 + F(t))."""
    _check_times(s, t)
    decay = math.exp(-params.leak * (s + t))
    return decay * (
        params.init_msq * i0(2.0 * params.sigma * math.sqrt(s * t)) - params.init_mean**2
    )


def drift_cov(s: float, t: float, params: LimitParams) -> float:
    """Covariance of the Gaussian drift process of the limit dynamics."""
    _check_times(s, t)
    return params.init_msq * params.sigma**2 * i0(2.0 * params.sigma * math.sqrt(s * t))


def ou_cov(s: float, t: float, leak: float, amplitude: float) -> float:
    """Covariance of amplitude * int_0^t exp(leak u) dB(u)."""
    _check_times(s, t)
    m = min(s, t)
    if abs(leak) * m < 1e-8:
        return amplitude**2 * m
    return amplitude**2 * math.expm1(2.0 * leak * m) / (2.0 * leak)


def noise_kernel(t: float, s: float, leak: float, order: int) -> float:
    """exp(leak s) (t - s)^order / order!  for 0 <= s <= t, order >= 1."""
    if order < 1:
        raise DomainError(f"kernel order must be >= 1, got {order}")
    if not (0 <= s <= t):
        raise DomainError(f"need 0 <= s <= t, got s={s}, t={t}")
    return math.exp(leak * s) * (t - s) ** order / math.factorial(order)


def noise_kernel_energy(t: float, leak: float, order: int, tol: float = DEFAULT_QUAD_TOL) -> float:
    """int_0^t noise_kernel(t, s)^2 ds by adaptive quadrature."""
    if order < 1:
        raise DomainError(f"kernel order must be >= 1, got {order}")
    if t < 0:
        raise DomainError(f"time must be nonnegative, got {t}")
    if t == 0.0:
        return 0.0
    fact_sq = math.factorial(order) ** 2
    return adaptive_simpson(
        lambda u: math.exp(2.0 * leak * u) * (t - u) ** (2 * order) / fact_sq, 0.0, t, tol
    )


def noise_fluctuation_cov(s: float, t: float, params: LimitParams, tol: float = DEFAULT_QUAD_TOL) -> float:
    """Covariance of the Brownian-driven coupling fluctuation G (symmetrized)."""
    _check_times(s, t)
    lo, hi = min(s, t), max(s, t)
    if lo == 0.0:
        return 0.0
    sigma2 = 2.0 * params.sigma
    leak2 = 2.0 * params.leak
    return adaptive_simpson(
        lambda u: math.exp(leak2 * u) * i0m1(sigma2 * math.sqrt((hi - u) * (lo - u))),
        0.0,
        lo,
        tol,
    )


def noise_fluctuation_var(t: float, params: LimitParams, tol: float = DEFAULT_QUAD_TOL) -> float:
    """Variance of G at time t (the s = t diagonal of its covariance)."""
    return noise_fluctuation_cov(t, t, params, tol)


def potential_cov_with_noise(s: float, t: float, params: LimitParams, tol: float = DEFAULT_QUAD_TOL) -> float:
    """Full covariance of the limit potential including the Brownian pieces."""
    base = potential_cov(s, t, params)
    if params.noise == 0.0:
        return base
    decay = math.exp(-params.leak * (s + t))
    extra = ou_cov(s, t, params.leak, params.noise) + params.noise**2 * noise_fluctuation_cov(
        s, t, params, tol
    )
    return base + decay * extra


def increment_cov(t1: float, t2: float, t3: float, t4: float, cov) -> float:
    """Cov[X(t2)-X(t1), X(t4)-X(t3)] from a covariance function by bilinearity."""
    return cov(t2, t4) - cov(t2, t3) - cov(t1, t4) + cov(t1, t3)


@dataclass
class CovarianceGrid:
    """A process covariance evaluated on a time grid, with PSD factorization."""

    times: np.ndarray
    matrix: np.ndarray
    kind: str = ""

    @classmethod
    def from_kernel(cls, times, cov, kind: str = "") -> "CovarianceGrid":
        times = np.asarray(times, dtype=np.float64)
        m = len(times)
        mat = np.empty((m, m))
        for i in range(m):
            for j in range(i, m):
                mat[i, j] = mat[j, i] = cov(times[i], times[j])
        return cls(times=times, matrix=mat, kind=kind)

    def factor(self, jitter: float = _PSD_JITTER) -> np.ndarray:
        """L with L @ L.T equal to the matrix up to clipped jitter eigenvalues."""
        sym = 0.5 * (self.matrix + self.matrix.T)
        eigvals, eigvecs = np.linalg.eigh(sym)
        floor = -jitter * max(np.trace(sym), np.finfo(float).tiny)
        if eigvals.min() < floor:
            raise NumericalError(
                f"covariance grid {self.kind or '?'} is not PSD: most negative "
                f"eigenvalue {eigvals.min():.3e} below jitter floor {floor:.3e}"
            )
        return eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))

    def to_csv_rows(self):
        """Export rows (s, t, value, kind) covering the upper triangle."""
        for i, s in enumerate(self.times):
            for j in range(i, len(self.times)):
                yield (float(s), float(self.times[j]), float(self.matrix[i, j]), self.kind)


def fluctuation_series_length(params: LimitParams, horizon: float, var_tol: float) -> int:
    """Smallest L with omitted series variance phi0 * sum_{l>L} (sigma T)^{2l}/(l!)^2 <= var_tol."""
    if var_tol <= 0:
        raise DomainError(f"var_tol must be positive, got {var_tol}")
    if params.init_msq == 0.0 or horizon == 0.0:
        return 0
    x = (params.sigma * horizon) ** 2
    term = x  # l = 1 term
    l = 1
    while True:
        nxt = term * x / (l + 1) ** 2
        q = x / (l + 2) ** 2
        if q < 1.0 and params.init_msq * nxt / (1.0 - q) <= var_tol:
            return l
        term = nxt
        l += 1
        if l > 100_000:  # pragma: no cover
            raise NumericalError("fluctuation series truncation did not certify")


def sample_fluctuation(
    times,
    params: LimitParams,
    rng: np.random.Generator,
    n_replicas: int,
    var_tol: float | None = None,
) -> np.ndarray:
    """Paths of the coupling fluctuation F on a grid, exact in law up to var_tol.

    One set of i.i.d. standard Gaussians per replica is shared across all grid
    times, so each row is a coherent path.  Returns shape (n_replicas, n_times).
    """
    times = np.asarray(times, dtype=np.float64)
    if np.any(times < 0):
        raise DomainError("grid times must be nonnegative")
    if var_tol is None:
        var_tol = DEFAULT_FLUCT_VAR_TOL * max(params.init_msq, 1.0)
    horizon = float(times.max()) if len(times) else 0.0
    length = fluctuation_series_length(params, horizon, var_tol)
    if length == 0:
        return np.zeros((n_replicas, len(times)))
    # coeff[l-1, k] = sqrt(phi0) sigma^l t_k^l / l!
    coeff = np.empty((length, len(times)))
    row = np.full(len(times), math.sqrt(params.init_msq))
    for l in range(1, length + 1):
        row = row * (params.sigma * times) / l
        coeff[l - 1] = row
    draws = rng.standard_normal((n_replicas, length))
    return draws @ coeff


@dataclass
class LimitPaths:
    """Replicated limit-process paths on a grid, one block per coordinate.

    ``values`` has shape (replicas, coords, times).  Component arrays are kept
    for diagnostics and tests.
    """

    times: np.ndarray
    coords: tuple
    values: np.ndarray
    params: LimitParams
    seeds: SeedSpec
    components: dict = field(default_factory=dict)

    @property
    def n_replicas(self) -> int:
        return self.values.shape[0]


def sample_limit_paths(
    times,
    params: LimitParams,
    initial_law: InitialLaw,
    seed: SeedSpec,
    n_replicas: int,
    n_coords: int = 1,
    var_tol: float | None = None,
    quad_tol: float = DEFAULT_QUAD_TOL,
) -> LimitPaths:
    """Sample the limit potential on a grid, exactly in law.

    The four independent pieces (initial condition, OU integral, both coupling
    fluctuations) come from separate streams; distinct coordinates use
    distinct stream addresses and are therefore i.i.d. by construction.
    """
    times = np.asarray(times, dtype=np.float64)
    if np.any(times < 0):
        raise DomainError("grid times must be nonnegative")
    if abs(initial_law.mean - params.init_mean) > 1e-12 or abs(
        initial_law.second_moment - params.init_msq
    ) > 1e-12:
        raise DomainError("initial law moments disagree with the limit parameters")
    m = len(times)
    values = np.empty((n_replicas, n_coords, m))
    components: dict = {"initial": [], "fluct": [], "ou": [], "noise_fluct": []}
    decay = np.exp(-params.leak * times)

    ou_factor = noise_factor = None
    if params.noise > 0.0:
        ou_factor = CovarianceGrid.from_kernel(
            times, lambda s, t: ou_cov(s, t, params.leak, 1.0), kind="ou"
        ).factor()
        noise_factor = CovarianceGrid.from_kernel(
            times,
            lambda s, t: noise_fluctuation_cov(s, t, params, quad_tol),
            kind="noise_fluct",
        ).factor()

    for c in range(n_coords):
        v0 = initial_law.sample(seed.stream("limit_initial", 0, c), n_replicas)
        fluct = sample_fluctuation(
            times, params, seed.stream("limit_fluct", 0, c), n_replicas, var_tol
        )
        total = v0[:, None] + fluct
        if params.noise > 0.0:
            ou = seed.stream("limit_ou", 0, c).standard_normal((n_replicas, m)) @ ou_factor.T
            nf = (
                seed.stream("limit_noise_fluct", 0, c).standard_normal((n_replicas, m))
                @ noise_factor.T
            )
            total = total + params.noise * (ou + nf)
            components["ou"].append(ou)
            components["noise_fluct"].append(nf)
        values[:, c, :] = decay[None, :] * total
        components["initial"].append(v0)
        components["fluct"].append(fluct)

    components = {k: np.stack(v, axis=1) for k, v in components.items() if v}
    return LimitPaths(
        times=times,
        coords=tuple(range(1, n_coords + 1)),
        values=values,
        params=params,
        seeds=seed,
        components=components,
    )
