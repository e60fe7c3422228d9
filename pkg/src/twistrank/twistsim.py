"""Stochastic simulator of the fan-structure twisting process.

A sample is a rank walk: each ramified place first tosses the Frobenius
coin (localization vanishes with probability q^(-r)), then draws a
character whose Kummer line may or may not match the transverse line.
The marginal one-step law equals the rank-transition operator exactly.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.stats import chi2 as _chi2

from .gf import FieldParams
from .spaces import LocalPlane, build_local_plane, fiber_size, kummer_line_of_character

# Samples are split into fixed-size chunks, each driven by its own
# counter-derived substream; merging chunk counts is order-independent,
# so results do not depend on the worker count. Changing this constant
# changes simulation output for a given seed.
CHUNK_SAMPLES = 1 << 14


class CapExceeded(RuntimeError):
    """Raised when a stratum count would exceed the configured cap."""


@dataclass(frozen=True)
class ShiftMode:
    """Rank shift applied after the walk.

    kind 'notfd' adds the constant contributor dimension r_gamma;
    kind 'fd' models the regime where every rank is offset by one.
    """

    kind: str
    r_gamma: int = 0

    def __post_init__(self):
        if self.kind not in ("notfd", "fd"):
            raise ValueError(f"unknown shift mode {self.kind!r}")
        if self.kind == "notfd" and self.r_gamma < 0:
            raise ValueError("r_gamma must be non-negative")
        if self.kind == "fd" and self.r_gamma != 0:
            raise ValueError("the 'fd' mode carries no r_gamma")

    @property
    def offset(self) -> int:
        return self.r_gamma if self.kind == "notfd" else 1

    @classmethod
    def parse(cls, text: str) -> "ShiftMode":
        text = text.strip().lower()
        if text == "fd":
            return cls("fd")
        if text == "notfd":
            return cls("notfd", 0)
        if text.startswith("notfd:"):
            try:
                return cls("notfd", int(text.split(":", 1)[1]))
            except ValueError:
                raise ValueError(f"bad shift spec {text!r}: expected notfd:<int>") from None
        raise ValueError(f"bad shift spec {text!r}: expected 'fd' or 'notfd:<int>'")

    def __str__(self) -> str:
        return "fd" if self.kind == "fd" else f"notfd:{self.r_gamma}"


@dataclass(frozen=True)
class PlaceModel:
    """Synthetic places: rational-prime norms with a B/P0/P1 label each."""

    norms: np.ndarray
    labels: np.ndarray  # 0 = B, 1 = P0, 2 = P1
    p1_density: float
    seed: int

    LABELS = ("B", "P0", "P1")

    def __len__(self) -> int:
        return len(self.norms)

    def places(self):
        for norm, lab in zip(self.norms, self.labels):
            yield int(norm), self.LABELS[lab]

    def p1_norms(self) -> np.ndarray:
        return self.norms[self.labels == 2]


def primes_up_to(x: int) -> np.ndarray:
    """All primes <= x by a numpy sieve."""
    if x < 2:
        return np.array([], dtype=np.int64)
    sieve = np.ones(x + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, int(x**0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.nonzero(sieve)[0].astype(np.int64)


def build_place_model(x: float, p1_density: float, seed: int, n_bad: int = 0) -> PlaceModel:
    """Places with norms the rational primes <= x; non-B places are P1
    with probability p1_density under the seeded generator."""
    if x < 2:
        raise ValueError("x must be at least 2")
    if not 0 < p1_density <= 1:
        raise ValueError("p1_density must lie in (0, 1]")
    if n_bad < 0:
        raise ValueError("n_bad must be non-negative")
    norms = primes_up_to(int(x))
    labels = np.zeros(len(norms), dtype=np.int8)
    rng = np.random.default_rng(seed)
    coins = rng.random(len(norms))
    labels[coins < p1_density] = 2
    labels[coins >= p1_density] = 1
    labels[:n_bad] = 0
    return PlaceModel(norms=norms, labels=labels, p1_density=p1_density, seed=seed)


@dataclass(frozen=True)
class FanLadder:
    """The norm-threshold family L_1, L_2, ... built from L(Y) = Y^a.

    L_1(X) = L(X) and L_{i+1}(X) = max(L(prod_{j<=i} L_j(X)), X * L_i(X)).
    Values beyond double range saturate to infinity, which only loosens
    thresholds that are already astronomically large.
    """

    stand_in_exponent: float

    def __post_init__(self):
        if self.stand_in_exponent < 1:
            raise ValueError("ladder exponent must be >= 1")

    def _base(self, y: float) -> float:
        try:
            return y**self.stand_in_exponent
        except OverflowError:
            return math.inf

    def levels(self, x: float, depth: int) -> list[float]:
        if x < 1:
            raise ValueError("x must be >= 1")
        if depth < 1:
            raise ValueError("depth must be >= 1")
        out: list[float] = []
        prod = 1.0
        for i in range(depth):
            if i == 0:
                level = self._base(x)
            else:
                level = max(self._base(prod), x * out[-1])
            out.append(level)
            prod = prod * level
        return out

    def level(self, i: int, x: float) -> float:
        return self.levels(x, i)[-1]


def fan_ladder(stand_in_exponent: float) -> FanLadder:
    return FanLadder(stand_in_exponent=stand_in_exponent)


def step_rank_closed_form(r: int, field: FieldParams, rng: np.random.Generator,
                          y: float | None = None) -> int:
    """One rank step: Frobenius coin at q^(-r), then the 1/p line match.

    With finite y the coin probability is perturbed uniformly within
    +-1/y (clamped to [0, 1]); at rank 0 localization vanishes always,
    so the coin is exact there and the walk never goes below 0.
    """
    if r < 0:
        raise ValueError("rank must be non-negative")
    p0 = field.q ** (-r) if r else 1.0
    if y is not None:
        if y <= 0:
            raise ValueError("y must be positive")
        p0 = min(max(p0 + (2.0 * rng.random() - 1.0) / y, 0.0), 1.0)
        if r == 0:
            p0 = 1.0
    if rng.random() >= p0:
        return r - 1
    if rng.random() < 1.0 / field.p:
        return r + 1
    return r


_PLANES: dict[FieldParams, LocalPlane] = {}


def _plane(field: FieldParams) -> LocalPlane:
    plane = _PLANES.get(field)
    if plane is None:
        plane = _PLANES[field] = build_local_plane(field)
    return plane


def step_rank_micro_model(r: int, field: FieldParams, n: int,
                          rng: np.random.Generator) -> int:
    """One rank step through the local-plane geometry.

    Draws the transverse isotropic line V (unramified when the Frobenius
    coin fails, uniform among ramified lines otherwise) and a totally
    ramified character; the rank rises exactly when the character's
    Kummer line equals V. Marginally identical to the closed form.
    """
    if r < 0:
        raise ValueError("rank must be non-negative")
    plane = _plane(field)
    p = field.p
    p0 = field.q ** (-r) if r else 1.0
    t_zero = rng.random() < p0
    if t_zero:
        v = plane.ramified_lines[int(rng.integers(p))]
    else:
        v = plane.unramified_line
    n_chars = p * fiber_size(p, n)
    kummer = kummer_line_of_character(plane, int(rng.integers(n_chars)), n, p)
    if not t_zero:
        return r - 1
    return r + 1 if kummer == v else r


def micro_transition_law(field: FieldParams, r: int, n: int, exact: bool = True) -> dict:
    """Exhaustive one-step law of the micro model at rank r.

    Enumerates every (coin, V, character) outcome with its weight; with
    exact=True the weights are rationals and the result must equal the
    operator entries exactly.
    """
    if r < 0:
        raise ValueError("rank must be non-negative")
    plane = build_local_plane(field)
    p, q = field.p, field.q
    n_chars = p * fiber_size(p, n)
    if exact:
        pt0 = Fraction(1, q**r)
        w_v = Fraction(1, p)
        w_f = Fraction(1, n_chars)
        zero = Fraction(0)
    else:
        pt0 = q ** (-r) if r else 1.0
        w_v = 1.0 / p
        w_f = 1.0 / n_chars
        zero = 0.0
    law: dict[int, object] = {}

    def add(s, w):
        law[s] = law.get(s, zero) + w

    for f in range(n_chars):
        kummer = kummer_line_of_character(plane, f, n, p)
        if r >= 1:
            add(r - 1, (1 - pt0) * w_f)
        for v in plane.ramified_lines:
            add(r + 1 if kummer == v else r, pt0 * w_v * w_f)
    return {s: w for s, w in law.items() if w != zero}


@dataclass(frozen=True)
class SimConfig:
    """Configuration of one simulation run.

    The walk is n-independent (character fibers are balanced), so n is
    carried only for bookkeeping surfaces. chebotarev_y = None means the
    exact-probability regime.
    """

    field: FieldParams
    n: int = 1
    k: int = 0
    samples: int = 1
    seed: int = 0
    shift_mode: ShiftMode = ShiftMode("notfd", 0)
    chebotarev_y: float | None = None
    initial: tuple[float, ...] | None = None
    threads: int = 1

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.k < 0:
            raise ValueError("k must be non-negative")
        if self.samples < 1:
            raise ValueError("samples must be >= 1")
        if self.chebotarev_y is not None and self.chebotarev_y <= 0:
            raise ValueError("chebotarev_y must be positive")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")
        if self.initial is not None:
            arr = np.asarray(self.initial, dtype=np.float64)
            if arr.ndim != 1 or len(arr) == 0 or (arr < 0).any():
                raise ValueError("initial law must be a non-negative vector")
            if abs(arr.sum() - 1.0) > 1e-9:
                raise ValueError("initial law must sum to 1")


@dataclass(frozen=True)
class EmpiricalDistribution:
    """Observed rank counts from a simulation run."""

    counts: np.ndarray
    total: int

    def __post_init__(self):
        if int(self.counts.sum()) != self.total:
            raise ValueError("counts do not sum to the stated total")

    def probs(self) -> np.ndarray:
        return self.counts / self.total

    def tv_against(self, reference: np.ndarray) -> float:
        n = max(len(self.counts), len(reference))
        a = np.zeros(n)
        b = np.zeros(n)
        a[: len(self.counts)] = self.probs()
        b[: len(reference)] = reference
        return 0.5 * float(np.abs(a - b).sum())

    def chi2_against(self, reference: np.ndarray, min_expected: float = 5.0):
        """Goodness-of-fit statistic against expected probabilities.

        Bins are pooled from the top until each expected count reaches
        min_expected; structurally empty bins (zero expectation and zero
        observation) are dropped. Returns (statistic, dof, p_value).
        """
        n = max(len(self.counts), len(reference))
        observed = np.zeros(n)
        expected = np.zeros(n)
        observed[: len(self.counts)] = self.counts
        expected[: len(reference)] = np.asarray(reference) * self.total
        keep = ~((expected == 0) & (observed == 0))
        observed, expected = observed[keep], expected[keep]
        if (expected == 0).any():
            raise ValueError("observed mass on a zero-probability rank")
        # pool the sparse upper tail
        while len(expected) > 2 and expected[-1] < min_expected:
            expected[-2] += expected[-1]
            observed[-2] += observed[-1]
            expected, observed = expected[:-1], observed[:-1]
        stat = float(((observed - expected) ** 2 / expected).sum())
        dof = len(expected) - 1
        if dof == 0:
            # a single bin carries all the mass on both sides
            return stat, 0, 1.0
        return stat, dof, float(_chi2.sf(stat, dof))


def _simulate_chunk(config: SimConfig, chunk_index: int, size: int, n_ranks: int) -> np.ndarray:
    rng = np.random.default_rng(
        np.random.SeedSequence(entropy=config.seed, spawn_key=(chunk_index,))
    )
    if config.initial is None:
        ranks = np.zeros(size, dtype=np.int64)
    else:
        law = np.asarray(config.initial, dtype=np.float64)
        ranks = rng.choice(len(law), size=size, p=law / law.sum())
    q = float(config.field.q)
    inv_p = 1.0 / config.field.p
    y = config.chebotarev_y
    for _ in range(config.k):
        u_coin = rng.random(size)
        u_line = rng.random(size)
        p0 = np.power(q, -ranks.astype(np.float64))
        if y is not None:
            u_pert = rng.random(size)
            p0 = np.clip(p0 + (2.0 * u_pert - 1.0) / y, 0.0, 1.0)
            p0[ranks == 0] = 1.0
        t_zero = u_coin < p0
        ranks = np.where(t_zero, np.where(u_line < inv_p, ranks + 1, ranks), ranks - 1)
    ranks += config.shift_mode.offset
    return np.bincount(ranks, minlength=n_ranks)


def simulate(config: SimConfig) -> EmpiricalDistribution:
    """Run the rank walk for every sample and return the rank counts.

    Output depends only on (seed, samples, k, field, shift, y, initial);
    in particular it is identical for every thread count.
    """
    top_initial = len(config.initial) - 1 if config.initial is not None else 0
    n_ranks = top_initial + config.k + config.shift_mode.offset + 1
    sizes = [
        min(CHUNK_SAMPLES, config.samples - start)
        for start in range(0, config.samples, CHUNK_SAMPLES)
    ]
    if config.threads == 1:
        parts = [_simulate_chunk(config, i, m, n_ranks) for i, m in enumerate(sizes)]
    else:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            parts = list(
                pool.map(lambda im: _simulate_chunk(config, im[0], im[1], n_ranks),
                         enumerate(sizes))
            )
    counts = np.zeros(n_ranks, dtype=np.int64)
    for part in parts:
        counts += part
    return EmpiricalDistribution(counts=counts, total=config.samples)


def _binomial(n: int, k: int) -> int:
    return math.comb(n, k) if 0 <= k <= n else 0


def strata_cardinality(model: PlaceModel, ladder: FanLadder, k: int, x: float,
                       cap: int = 10**15) -> int:
    """Number of squarefree k-tuples of P1 places whose i-th smallest norm
    stays below the i-th ladder threshold at X = x.

    The model's place list is the counting universe, so it must extend to
    the top threshold for the count to be meaningful.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if k == 0:
        return 1
    p1 = np.sort(model.p1_norms())
    if _binomial(len(p1), k) > cap:
        raise CapExceeded(
            f"stratum count bound C({len(p1)}, {k}) exceeds the cap {cap}; "
            "raise the cap or shrink the place model"
        )
    thresholds = ladder.levels(x, k)
    # valid[m](t) = number of m-subsets of the first t places obeying the
    # first m thresholds; a place enters as the m-th pick only if its norm
    # is under thresholds[m-1].
    current = np.ones(len(p1) + 1, dtype=np.int64)
    for m in range(1, k + 1):
        usable = p1 < thresholds[m - 1]
        contrib = np.where(usable, current[:-1], 0)
        current = np.concatenate(([0], np.cumsum(contrib)))
    return int(current[-1])


def strata_cardinality_ratio(model: PlaceModel, ladder: FanLadder, k: int, x: float,
                             cap: int = 10**15) -> float:
    """|D_k(X)| / |D_{k+1}(X)| over the model's place universe."""
    numerator = strata_cardinality(model, ladder, k, x, cap)
    denominator = strata_cardinality(model, ladder, k + 1, x, cap)
    if denominator == 0:
        raise ValueError(f"stratum k={k + 1} is empty at x={x}; enlarge the model")
    return numerator / denominator
