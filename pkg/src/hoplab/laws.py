"""Coupling-entry and initial-condition laws, and the seeding discipline.

Entry laws are centered and bounded with exact raw-moment tables; three kinds
are shipped so that both vanishing and nonvanishing odd moments get exercised:

* ``rademacher``         -- +/- sigma with equal probability,
* ``uniform``            -- uniform on [-sqrt(3) sigma, +sqrt(3) sigma],
* ``two_point_asymmetric`` -- value ratio*sigma with probability 1/(1+ratio^2)
  and -sigma/ratio otherwise (mean 0, variance sigma^2, third moment
  sigma^3 (ratio^2-1)/ratio).

Initial laws have compact support and expose their mean and second moment.

Random streams are derived counter-style from ``(role, replica, coordinate)``
so that parallel generation is order-independent and every draw is a pure
function of the root seed and its address.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import CapacityError, DomainError

# Stream roles.  The first three address the finite-network simulation; the
# ``limit_*`` roles give the limit-process sampler its own independent pieces.
ROLE_IDS = {
    "couplings": 0,
    "initial": 1,
    "brownian": 2,
    "limit_initial": 3,
    "limit_fluct": 4,
    "limit_ou": 5,
    "limit_noise_fluct": 6,
}

_MAX_MATRIX_BYTES = 4 * 2**30  # 4 GiB cap on a single coupling matrix


@dataclass(frozen=True)
class SeedSpec:
    """Root seed plus the pure derivation of per-(role, replica, coord) streams."""

    root: int

    def __post_init__(self):
        if not (0 <= int(self.root) < 2**64):
            raise DomainError(f"root seed must be a 64-bit unsigned integer, got {self.root}")

    def stream(self, role: str, replica: int, coord: int = 0) -> np.random.Generator:
        """Independent, reproducible generator for one (role, replica, coord)."""
        if role not in ROLE_IDS:
            raise DomainError(f"unknown stream role {role!r}")
        if replica < 0 or coord < 0:
            raise DomainError("replica and coord indices must be nonnegative")
        seq = np.random.SeedSequence(entropy=int(self.root), spawn_key=(ROLE_IDS[role], int(replica), int(coord)))
        return np.random.default_rng(seq)


@dataclass(frozen=True)
class EntryLaw:
    """Centered bounded law for the coupling-matrix entries, variance sigma^2."""

    kind: str
    sigma: float
    ratio: float = 2.0  # two_point_asymmetric only

    def __post_init__(self):
        if self.kind not in ("rademacher", "uniform", "two_point_asymmetric"):
            raise DomainError(f"unknown entry law kind {self.kind!r}")
        if not (self.sigma > 0 and math.isfinite(self.sigma)):
            raise DomainError(f"sigma must be positive and finite, got {self.sigma}")
        if self.kind == "two_point_asymmetric":
            if not (self.ratio > 0 and math.isfinite(self.ratio)):
                raise DomainError(f"ratio must be positive, got {self.ratio}")
            if self.ratio == 1.0:
                raise DomainError("ratio=1 makes the two-point law symmetric; use rademacher")

    @property
    def is_symmetric(self) -> bool:
        return self.kind in ("rademacher", "uniform")

    @property
    def bound(self) -> float:
        """Maximum absolute value of the support."""
        if self.kind == "rademacher":
            return self.sigma
        if self.kind == "uniform":
            return math.sqrt(3.0) * self.sigma
        return max(self.ratio * self.sigma, self.sigma / self.ratio)

    def moment(self, k: int) -> float:
        """Exact k-th raw moment."""
        if k < 0 or k != int(k):
            raise DomainError(f"moment order must be a nonnegative integer, got {k}")
        k = int(k)
        if k == 0:
            return 1.0
        if k == 1:  # centered by construction, exact for every kind
            return 0.0
        if k == 2:  # variance sigma^2 by construction, exact for every kind
            return self.sigma**2
        if self.kind == "rademacher":
            return self.sigma**k if k % 2 == 0 else 0.0
        if self.kind == "uniform":
            a = math.sqrt(3.0) * self.sigma
            return a**k / (k + 1) if k % 2 == 0 else 0.0
        a = self.ratio * self.sigma
        b = self.sigma / self.ratio
        p = 1.0 / (1.0 + self.ratio**2)
        return p * a**k + (1.0 - p) * (-b) ** k

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == "rademacher":
            return self.sigma * (2.0 * rng.integers(0, 2, size=size) - 1.0)
        if self.kind == "uniform":
            a = math.sqrt(3.0) * self.sigma
            return rng.uniform(-a, a, size=size)
        a = self.ratio * self.sigma
        b = self.sigma / self.ratio
        p = 1.0 / (1.0 + self.ratio**2)
        return np.where(rng.random(size=size) < p, a, -b)


@dataclass(frozen=True)
class InitialLaw:
    """Compact-support law of a single initial coordinate.

    Kinds: ``point_mass`` (delta at ``value``), ``uniform`` on [low, high],
    ``two_point`` (+/- ``value`` with equal probability).
    """

    kind: str
    value: float = 1.0
    low: float = 0.0
    high: float = 1.0

    def __post_init__(self):
        if self.kind not in ("point_mass", "uniform", "two_point"):
            raise DomainError(f"unknown initial law kind {self.kind!r}")
        if self.kind == "uniform" and not (self.high > self.low):
            raise DomainError(f"uniform law needs low < high, got [{self.low}, {self.high}]")
        if self.kind == "two_point" and self.value <= 0:
            raise DomainError(f"two_point magnitude must be positive, got {self.value}")

    @property
    def mean(self) -> float:
        return self.moment(1)

    @property
    def second_moment(self) -> float:
        return self.moment(2)

    @property
    def bound(self) -> float:
        if self.kind == "point_mass":
            return abs(self.value)
        if self.kind == "uniform":
            return max(abs(self.low), abs(self.high))
        return self.value

    @property
    def is_symmetric(self) -> bool:
        if self.kind == "two_point":
            return True
        if self.kind == "point_mass":
            return self.value == 0.0
        return self.low == -self.high

    def moment(self, k: int) -> float:
        if k < 0 or k != int(k):
            raise DomainError(f"moment order must be a nonnegative integer, got {k}")
        k = int(k)
        if k == 0:
            return 1.0
        if self.kind == "point_mass":
            return self.value**k
        if self.kind == "uniform":
            return (self.high ** (k + 1) - self.low ** (k + 1)) / ((k + 1) * (self.high - self.low))
        return self.value**k if k % 2 == 0 else 0.0

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        if self.kind == "point_mass":
            return np.full(size, float(self.value))
        if self.kind == "uniform":
            return rng.uniform(self.low, self.high, size=size)
        return self.value * (2.0 * rng.integers(0, 2, size=size) - 1.0)


def moment(law, k: int) -> float:
    """Exact k-th raw moment of an EntryLaw or InitialLaw."""
    return law.moment(k)


def sample_matrix(n: int, law: EntryLaw, seed: SeedSpec, replica: int) -> np.ndarray:
    """n x n i.i.d. coupling matrix, bit-reproducible given (seed, replica, n)."""
    if n < 1:
        raise DomainError(f"matrix size must be >= 1, got {n}")
    if n * n * 8 > _MAX_MATRIX_BYTES:
        raise CapacityError(f"coupling matrix of size {n} exceeds the memory budget")
    rng = seed.stream("couplings", replica)
    return law.sample(rng, (n, n)).astype(np.float64, copy=False)


def sample_initial(n: int, law: InitialLaw, seed: SeedSpec, replica: int) -> np.ndarray:
    """Length-n i.i.d. initial state, independent of the couplings stream."""
    if n < 1:
        raise DomainError(f"vector size must be >= 1, got {n}")
    rng = seed.stream("initial", replica)
    return law.sample(rng, n).astype(np.float64, copy=False)
