"""Closed-form density and rank-growth bound calculators.

Each calculator recomputes its product or series directly (independently
of the distribution code paths) so the two routes can certify each other;
reports carry a formula string because equivalent product forms with
shifted indices are the main source of silent errors here.
"""

from __future__ import annotations

from dataclasses import dataclass

from . import rankdist
from .gf import FieldParams, Flavor, build_field, is_prime
from .rankdist import PRODUCT_EPS


@dataclass(frozen=True)
class BoundReport:
    name: str
    p: int
    flavor: Flavor
    value: float
    formula: str


def fermat_unsolvable_density(p: int) -> float:
    """Lower bound for the density of twisted Fermat equations of degree p
    with no solutions: prod_{i>=1} (1 + p^(-i))^(-1)."""
    if not is_prime(p) or p < 3:
        raise ValueError(f"the Fermat bound needs an odd prime, got {p}")
    value = 1.0
    i = 1
    while True:
        t = float(p) ** (-i)
        if t < PRODUCT_EPS:
            return value
        value /= 1.0 + t
        i += 1


def rank_zero_density_bound(field: FieldParams) -> float:
    """Density of rank-zero twists, certified above 1 - q^(1-eps)/(q-1)."""
    value = rankdist.dist_value(field, 0)
    q = field.q
    floor_bound = 1.0 - (q // field.p) / (q - 1)
    if not value > floor_bound:
        raise ArithmeticError(
            f"rank-zero density {value} fails its certified floor {floor_bound}"
        )
    return value


def avg_rank_bound(field: FieldParams, deg_k: int) -> float:
    """Average-rank bound [K:Q] * sum_{i>=0} 1/(1 + q^(i+eps))."""
    if deg_k < 1:
        raise ValueError("the field degree must be >= 1")
    return deg_k * rankdist.expected_rank(field)


def no_growth_proportion_bound(p: int, field: FieldParams) -> float:
    """Lower bound for the proportion of degree-p cyclic extensions with
    no rank growth: D(0) when p = 2, else (p-1)(D(0) - (p-2)/(p-1))."""
    if field.p != p:
        raise ValueError("twist degree p must match the field's characteristic")
    d0 = rankdist.dist_value(field, 0)
    if p == 2:
        return d0
    return max(0.0, (p - 1) * (d0 - (p - 2) / (p - 1)))


def odd_rank_proportion(p: int) -> float:
    """Proportion of twists with odd rank, (1 - beta)/2 with
    beta = prod_{i>=1} (1 - p^(-i))/(1 + p^(-i))."""
    if not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    b = 1.0
    i = 1
    while True:
        t = float(p) ** (-i)
        if t < PRODUCT_EPS:
            return (1.0 - b) / 2.0
        b *= (1.0 - t) / (1.0 + t)
        i += 1


def reports(p: int, deg_k: int = 1) -> list[BoundReport]:
    """All bound reports for one prime, both flavors where applicable."""
    out = []
    if p >= 3:
        out.append(
            BoundReport(
                name="fermat_unsolvable_density",
                p=p,
                flavor=Flavor.SYMPLECTIC,
                value=fermat_unsolvable_density(p),
                formula="prod_{i>=1} (1+p^-i)^-1",
            )
        )
    for flavor in (Flavor.SYMPLECTIC, Flavor.UNITARY):
        field = build_field(p, flavor)
        out.append(
            BoundReport(
                name="rank_zero_density",
                p=p,
                flavor=flavor,
                value=rank_zero_density_bound(field),
                formula="prod_{i>=0} (1+q^(-i-eps))^-1 > 1 - q^(1-eps)/(q-1)",
            )
        )
        out.append(
            BoundReport(
                name="avg_rank_bound",
                p=p,
                flavor=flavor,
                value=avg_rank_bound(field, deg_k),
                formula=f"{deg_k} * sum_{{i>=0}} 1/(1+q^(i+eps))",
            )
        )
        out.append(
            BoundReport(
                name="no_growth_proportion",
                p=p,
                flavor=flavor,
                value=no_growth_proportion_bound(p, field),
                formula="D(0) if p=2 else (p-1)(D(0)-(p-2)/(p-1))",
            )
        )
    out.append(
        BoundReport(
            name="odd_rank_proportion",
            p=p,
            flavor=Flavor.SYMPLECTIC,
            value=odd_rank_proportion(p),
            formula="(1-beta)/2, beta = prod_{i>=1} (1-p^-i)/(1+p^-i)",
        )
    )
    return out
