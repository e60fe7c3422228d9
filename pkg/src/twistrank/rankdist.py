"""Symplectic/unitary rank distributions and the rank-transition operator.

Everything here exploits the identity q^epsilon = p, valid in both
flavors (q = p, epsilon = 1 and q = p^2, epsilon = 1/2), so q^(i+epsilon)
and q^(1-epsilon) are always exact integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gf import FieldParams

# Infinite products and series are truncated once a factor differs from 1
# by less than this; the surviving error is far below every tolerance used.
PRODUCT_EPS = 1e-16

R_MAX_DEFAULT = 64


def leading_constant(field: FieldParams) -> float:
    """prod_{i>=0} (1 + q^(-i-epsilon))^(-1), the mass at rank 0."""
    q, p = field.q, field.p
    value = 1.0
    i = 0
    while True:
        t = 1.0 / (p * q**i)  # q^(-i-epsilon)
        if t < PRODUCT_EPS:
            return value
        value /= 1.0 + t
        i += 1


def dist_value(field: FieldParams, r: int) -> float:
    """Probability of rank r under the stationary distribution."""
    if r < 0:
        raise ValueError("rank must be non-negative")
    q = field.q
    up = float(q // field.p)  # q^(1-epsilon)
    value = leading_constant(field)
    for i in range(1, r + 1):
        value *= up / (q**i - 1)
    return value


def expected_rank(field: FieldParams) -> float:
    """sum_{i>=0} 1/(1 + q^(i+epsilon))."""
    q, p = field.q, field.p
    total = 0.0
    i = 0
    while True:
        t = 1.0 / (1.0 + p * q**i)
        if t < PRODUCT_EPS:
            return total
        total += t
        i += 1


def qr_moment(field: FieldParams) -> float:
    """The q^r-moment in closed form: 1 + q^(1-epsilon)."""
    return 1.0 + field.q // field.p


def qr_moment_by_series(field: FieldParams, r_max: int = R_MAX_DEFAULT) -> float:
    """The q^r-moment by direct summation of q^r * D(r)."""
    dist = stationary_distribution(field, r_max)
    q = float(field.q)
    return float(sum(q**r * dr for r, dr in enumerate(dist.probs)))


def beta(field: FieldParams) -> float:
    """prod_{i>=0} (1 - q^(-i-epsilon)) / (1 + q^(-i-epsilon))."""
    q, p = field.q, field.p
    value = 1.0
    i = 0
    while True:
        t = 1.0 / (p * q**i)
        if t < PRODUCT_EPS:
            return value
        value *= (1.0 - t) / (1.0 + t)
        i += 1


def odd_mass(field: FieldParams) -> float:
    """Total mass on odd ranks, (1 - beta)/2."""
    return (1.0 - beta(field)) / 2.0


def odd_mass_by_series(field: FieldParams, r_max: int = R_MAX_DEFAULT) -> float:
    dist = stationary_distribution(field, r_max)
    return float(dist.probs[1::2].sum())


def markov_entry(field: FieldParams, r: int, s: int) -> float:
    """One-step transition probability from rank r to rank s."""
    if r < 0 or s < 0:
        raise ValueError("ranks must be non-negative")
    q, p = field.q, field.p
    qr = q ** (-r) if r else 1.0
    if s == r - 1:
        return 1.0 - qr
    if s == r:
        return (1.0 - 1.0 / p) * qr
    if s == r + 1:
        return qr / p
    return 0.0


def markov_entry_exact(field: FieldParams, r: int, s: int) -> Fraction:
    """Exact rational transition probability, for cross-checks."""
    if r < 0 or s < 0:
        raise ValueError("ranks must be non-negative")
    q, p = field.q, field.p
    qr = Fraction(1, q**r)
    if s == r - 1:
        return 1 - qr
    if s == r:
        return (1 - Fraction(1, p)) * qr
    if s == r + 1:
        return qr / p
    return Fraction(0)


def stationary_weight_exact(field: FieldParams, r: int) -> Fraction:
    """Unnormalized stationary weight prod_{i=1..r} q^(1-epsilon)/(q^i - 1)."""
    q = field.q
    up = q // field.p
    w = Fraction(1)
    for i in range(1, r + 1):
        w *= Fraction(up, q**i - 1)
    return w


@dataclass(frozen=True)
class MarkovOperator:
    """Tridiagonal rank-transition operator, truncated at R_max."""

    field: FieldParams
    r_max: int = R_MAX_DEFAULT

    def entry(self, r: int, s: int) -> float:
        return markov_entry(self.field, r, s)

    def _coefficients(self):
        q, p = self.field.q, self.field.p
        ranks = np.arange(self.r_max + 1, dtype=np.float64)
        qr = np.power(float(q), -ranks)
        down = 1.0 - qr
        stay = (1.0 - 1.0 / p) * qr
        up = qr / p
        return down, stay, up


@dataclass
class RankDistribution:
    """Probability vector over ranks 0..R_max plus a certified tail bound.

    Instances are treated as immutable; every operation returns a new one.
    """

    field: FieldParams
    probs: np.ndarray
    tail_bound: float = 0.0

    def __post_init__(self):
        self.probs = np.asarray(self.probs, dtype=np.float64)
        if self.probs.ndim != 1 or len(self.probs) == 0:
            raise ValueError("probs must be a non-empty vector")
        if (self.probs < 0).any():
            raise ValueError("probabilities must be non-negative")

    @property
    def r_max(self) -> int:
        return len(self.probs) - 1

    def total_mass(self) -> float:
        return float(self.probs.sum())


def stationary_distribution(field: FieldParams, r_max: int = R_MAX_DEFAULT) -> RankDistribution:
    """The stationary distribution truncated at r_max, with tail bound.

    Mass above r_max is dominated by the geometric series with ratio
    q^(1-epsilon)/(q^(r_max+1) - 1) starting from D(r_max).
    """
    if r_max < 0:
        raise ValueError("r_max must be non-negative")
    q = field.q
    up = float(q // field.p)
    probs = np.empty(r_max + 1, dtype=np.float64)
    probs[0] = leading_constant(field)
    for r in range(1, r_max + 1):
        probs[r] = probs[r - 1] * up / (q**r - 1)
    rho = up / (q ** (r_max + 1) - 1)
    tail = probs[r_max] * rho / (1.0 - rho)
    return RankDistribution(field=field, probs=probs, tail_bound=float(tail))


def point_mass(field: FieldParams, r: int, r_max: int = R_MAX_DEFAULT) -> RankDistribution:
    if not 0 <= r <= r_max:
        raise ValueError("point mass must sit inside [0, r_max]")
    probs = np.zeros(r_max + 1, dtype=np.float64)
    probs[r] = 1.0
    return RankDistribution(field=field, probs=probs)


def apply(dist: RankDistribution, op: MarkovOperator) -> RankDistribution:
    """One application of the operator; overflow past R_max feeds the tail."""
    if dist.field != op.field:
        raise ValueError("distribution and operator live over different fields")
    if dist.r_max != op.r_max:
        raise ValueError("distribution and operator use different truncation ranks")
    down, stay, up = op._coefficients()
    probs = dist.probs
    out = probs * stay
    out[:-1] += probs[1:] * down[1:]
    out[1:] += probs[:-1] * up[:-1]
    leaked = float(probs[-1] * up[-1])
    return RankDistribution(field=dist.field, probs=out, tail_bound=dist.tail_bound + leaked)


def tv_distance(a: RankDistribution, b: RankDistribution) -> float:
    """Half the L1 distance between two probability vectors."""
    n = max(len(a.probs), len(b.probs))
    pa = np.zeros(n)
    pb = np.zeros(n)
    pa[: len(a.probs)] = a.probs
    pb[: len(b.probs)] = b.probs
    return 0.5 * float(np.abs(pa - pb).sum())


def power_iterate(
    initial: RankDistribution, op: MarkovOperator, k: int
) -> tuple[RankDistribution, list[float]]:
    """initial * M^k, plus the total-variation distance to the stationary
    distribution reported after every step."""
    if k < 0:
        raise ValueError("iteration count must be non-negative")
    target = stationary_distribution(initial.field, initial.r_max)
    dist = initial
    trace = []
    for _ in range(k):
        dist = apply(dist, op)
        trace.append(tv_distance(dist, target))
    return dist, trace


def shift(dist: RankDistribution, r0: int) -> RankDistribution:
    """Shift all mass up by r0 ranks, extending the support to keep it all."""
    if r0 < 0:
        raise ValueError("shift must be non-negative")
    if r0 == 0:
        return RankDistribution(field=dist.field, probs=dist.probs.copy(), tail_bound=dist.tail_bound)
    probs = np.concatenate([np.zeros(r0), dist.probs])
    return RankDistribution(field=dist.field, probs=probs, tail_bound=dist.tail_bound)
