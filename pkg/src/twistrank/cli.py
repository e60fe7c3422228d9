"""Command-line frontend.

Data goes to stdout (or --out), diagnostics to stderr; the exit code is
zero exactly when no error occurred. Printed values for a fixed command
line are byte-identical across runs.
"""

from __future__ import annotations

import argparse
import sys
from decimal import ROUND_DOWN, Decimal

from . import bounds as bounds_mod
from . import rankdist, twistsim
from .gf import Flavor, build_field, is_prime
from .records import OutputRecord
from .spaces import build_local_plane, fiber_size
from .twistsim import CapExceeded, ShiftMode, SimConfig

TABLE_PRIMES = (2, 3, 5, 7, 11, 13)

DEFAULT_SIEVE_CAP = 50_000_000


class ConfigError(ValueError):
    """Malformed simulation config document."""


def fmt_trunc4(value: float) -> str:
    """Truncate toward zero to 4 decimals (the reference-table convention)."""
    return str(Decimal(repr(float(value))).quantize(Decimal("0.0001"), rounding=ROUND_DOWN))


def fmt(value: float) -> str:
    return f"{float(value):.12g}"


def _parse_prime(text: str) -> int:
    p = int(text)
    if not is_prime(p):
        raise ValueError(f"p must be prime, got {p}")
    return p


def _parse_prime_list(text: str) -> list[int]:
    return [_parse_prime(tok) for tok in text.split(",") if tok.strip()]


def _parse_y(text: str) -> float | None:
    if text.strip().lower() == "exact":
        return None
    y = float(text)
    if y <= 0:
        raise ValueError(f"--y must be positive or 'exact', got {text!r}")
    return y


def cmd_table(p_list) -> OutputRecord:
    """The grid of rank-0 mass, odd mass, and mean rank per prime and flavor."""
    rows = []
    for p in p_list:
        for stat, func in (
            ("rank0", lambda f: rankdist.dist_value(f, 0)),
            ("odd", rankdist.odd_mass),
            ("mean", rankdist.expected_rank),
        ):
            for flavor in (Flavor.SYMPLECTIC, Flavor.UNITARY):
                field = build_field(p, flavor)
                rows.append((f"{stat} {flavor.value} p={p}", fmt_trunc4(func(field))))
    params = {"p": ",".join(str(p) for p in p_list)}
    return OutputRecord(command="table", params=params, rows=rows)


def cmd_dist(p: int, flavor: Flavor, r_max: int) -> OutputRecord:
    field = build_field(p, flavor)
    rows = [(f"D({r})", fmt(rankdist.dist_value(field, r))) for r in range(r_max + 1)]
    params = {"p": str(p), "flavor": flavor.value, "rmax": str(r_max)}
    return OutputRecord(command="dist", params=params, rows=rows)


def cmd_moments(p: int, flavor: Flavor) -> OutputRecord:
    field = build_field(p, flavor)
    rows = [
        ("expected_rank", fmt(rankdist.expected_rank(field))),
        ("qr_moment_formula", fmt(rankdist.qr_moment(field))),
        ("qr_moment_series", fmt(rankdist.qr_moment_by_series(field))),
        ("odd_mass", fmt(rankdist.odd_mass(field))),
        ("beta", fmt(rankdist.beta(field))),
    ]
    params = {"p": str(p), "flavor": flavor.value}
    return OutputRecord(command="moments", params=params, rows=rows)


def cmd_bounds(p: int, deg_k: int = 1) -> OutputRecord:
    rows = []
    for report in bounds_mod.reports(p, deg_k):
        label = f"{report.name}[{report.flavor.value}]"
        rows.append((label, fmt(report.value)))
        rows.append((label + ".formula", report.formula))
    params = {"p": str(p), "degK": str(deg_k)}
    return OutputRecord(command="bounds", params=params, rows=rows)


def cmd_isotropic(p: int, flavor: Flavor, n: int) -> OutputRecord:
    field = build_field(p, flavor)
    plane = build_local_plane(field)

    def coords(line):
        return "(" + ", ".join(str(v) for v in line.basis[0]) + ")"

    rows = [
        ("lines_total", str(p + 1)),
        ("fiber_size", str(fiber_size(p, n))),
        ("unramified", coords(plane.unramified_line)),
    ]
    rows += [(f"ramified[{i}]", coords(line)) for i, line in enumerate(plane.ramified_lines)]
    params = {"p": str(p), "flavor": flavor.value, "n": str(n)}
    return OutputRecord(command="isotropic", params=params, rows=rows)


def cmd_simulate(config: SimConfig) -> OutputRecord:
    empirical = twistsim.simulate(config)
    offset = config.shift_mode.offset
    walked = rankdist.point_mass(config.field, 0, r_max=config.k)
    operator = rankdist.MarkovOperator(config.field, r_max=config.k)
    for _ in range(config.k):
        walked = rankdist.apply(walked, operator)
    reference = rankdist.shift(walked, offset)
    tv = empirical.tv_against(reference.probs)
    stat, dof, pvalue = empirical.chi2_against(reference.probs)
    params = {
        "p": str(config.field.p),
        "flavor": config.field.flavor.value,
        "n": str(config.n),
        "k": str(config.k),
        "samples": str(config.samples),
        "seed": str(config.seed),
        "shift": str(config.shift_mode),
        "y": "exact" if config.chebotarev_y is None else fmt(config.chebotarev_y),
        "threads": str(config.threads),
    }
    rows = [
        ("tv", fmt(tv)),
        ("chi2", fmt(stat)),
        ("chi2_dof", str(dof)),
        ("chi2_pvalue", fmt(pvalue)),
    ]
    emp = empirical.probs()
    n_ranks = max(len(emp), len(reference.probs))
    for r in range(n_ranks):
        count = int(empirical.counts[r]) if r < len(empirical.counts) else 0
        ref = reference.probs[r] if r < len(reference.probs) else 0.0
        e = emp[r] if r < len(emp) else 0.0
        rows.append((f"count({r})", str(count)))
        rows.append((f"emp({r})", fmt(e)))
        rows.append((f"ref({r})", fmt(ref)))
    return OutputRecord(command="simulate", params=params, rows=rows)


def cmd_ladder(x: float, exponent: float, depth: int, k: int | None = None,
               density: float = 1.0, seed: int = 0, cap: int = 10**15,
               sieve_cap: int = DEFAULT_SIEVE_CAP) -> OutputRecord:
    ladder = twistsim.fan_ladder(exponent)
    levels = ladder.levels(x, depth)
    params = {"x": fmt(x), "exponent": fmt(exponent), "depth": str(depth)}
    rows = [(f"L{i + 1}", fmt(level)) for i, level in enumerate(levels)]
    if k is not None:
        top = ladder.levels(x, k + 1)[-1]
        if not top <= sieve_cap:
            raise CapExceeded(
                f"stratum k={k + 1} needs places up to {top:.3g}, beyond the "
                f"sieve cap {sieve_cap}; lower x or k, or raise --sieve-cap"
            )
        model = twistsim.build_place_model(top, density, seed)
        d_k = twistsim.strata_cardinality(model, ladder, k, x, cap)
        d_k1 = twistsim.strata_cardinality(model, ladder, k + 1, x, cap)
        params.update({"k": str(k), "density": fmt(density), "seed": str(seed)})
        rows.append((f"D_{k}", str(d_k)))
        rows.append((f"D_{k + 1}", str(d_k1)))
        if d_k1 == 0:
            raise ValueError(f"stratum k={k + 1} is empty at x={x}; enlarge x")
        rows.append(("ratio", fmt(d_k / d_k1)))
    return OutputRecord(command="ladder", params=params, rows=rows)


SIM_CONFIG_FIELDS = ("p", "flavor", "n", "k", "samples", "seed", "shift", "y", "threads")


def load_sim_config(path: str) -> dict[str, str]:
    """Parse the flat key=value config document for the simulator."""
    options: dict[str, str] = {}
    try:
        with open(path, encoding="utf-8") as handle:
            lines = handle.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in SIM_CONFIG_FIELDS:
            raise ConfigError(
                f"{path}:{lineno}: unknown field {key!r} "
                f"(known fields: {', '.join(SIM_CONFIG_FIELDS)})"
            )
        if not value:
            raise ConfigError(f"{path}:{lineno}: field {key!r} has no value")
        options[key] = value
    return options


def _build_sim_config(args) -> SimConfig:
    options = load_sim_config(args.config) if args.config else {}

    def pick(flag_value, key, default):
        if flag_value is not None:
            return flag_value
        return options.get(key, default)

    try:
        p = _parse_prime(str(pick(args.p, "p", 2)))
        flavor = Flavor.parse(str(pick(args.flavor, "flavor", "sym")))
        n = int(pick(args.n, "n", 1))
        k = int(pick(args.k, "k", 0))
        samples = int(pick(args.samples, "samples", 10000))
        seed = int(pick(args.seed, "seed", 0))
        shift = ShiftMode.parse(str(pick(args.shift, "shift", "notfd:0")))
        y = _parse_y(str(pick(args.y, "y", "exact")))
        threads = int(pick(args.threads, "threads", 1))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    field = build_field(p, flavor)
    return SimConfig(field=field, n=n, k=k, samples=samples, seed=seed,
                     shift_mode=shift, chebotarev_y=y, threads=threads)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="twistrank",
        description="Rank statistics of twist families: distributions, bounds, "
                    "isotropic structures, and Monte Carlo simulation.",
    )
    parser.add_argument("--format", choices=("csv", "json", "table"), default="table",
                        help="output encoding (default: table)")
    parser.add_argument("--out", metavar="PATH", default=None,
                        help="write output to PATH instead of stdout")
    sub = parser.add_subparsers(dest="cmd", required=True)

    sp = sub.add_parser("table", help="the rank-0/odd/mean grid per prime and flavor")
    sp.add_argument("--p", default=",".join(str(p) for p in TABLE_PRIMES),
                    help="comma-separated primes (default: 2,3,5,7,11,13)")

    sp = sub.add_parser("dist", help="tabulate the rank distribution")
    sp.add_argument("--p", required=True)
    sp.add_argument("--flavor", required=True)
    sp.add_argument("--rmax", type=int, default=10)

    sp = sub.add_parser("moments", help="moments and odd mass of the distribution")
    sp.add_argument("--p", required=True)
    sp.add_argument("--flavor", required=True)

    sp = sub.add_parser("bounds", help="density and rank-growth bounds")
    sp.add_argument("--p", required=True)
    sp.add_argument("--degK", type=int, default=1)

    sp = sub.add_parser("simulate", help="run the twisting rank-walk simulator")
    sp.add_argument("config", nargs="?", default=None,
                    help="flat key=value config document")
    sp.add_argument("--p", default=None)
    sp.add_argument("--flavor", default=None)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--samples", type=int, default=None)
    sp.add_argument("--seed", type=int, default=None)
    sp.add_argument("--shift", default=None, help="notfd:<r> or fd")
    sp.add_argument("--y", default=None, help="positive float or 'exact'")
    sp.add_argument("--threads", type=int, default=None)

    sp = sub.add_parser("isotropic", help="list the isotropic lines of the local plane")
    sp.add_argument("--p", required=True)
    sp.add_argument("--flavor", required=True)
    sp.add_argument("--n", type=int, default=1)

    sp = sub.add_parser("ladder", help="norm-threshold ladder and stratum counts")
    sp.add_argument("--x", type=float, required=True)
    sp.add_argument("--exponent", type=float, default=2.0)
    sp.add_argument("--depth", type=int, default=5)
    sp.add_argument("--k", type=int, default=None)
    sp.add_argument("--density", type=float, default=1.0)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--cap", type=int, default=10**15)
    sp.add_argument("--sieve-cap", type=int, default=DEFAULT_SIEVE_CAP)
    return parser


def _dispatch(args) -> OutputRecord:
    if args.cmd == "table":
        return cmd_table(_parse_prime_list(args.p))
    if args.cmd == "dist":
        return cmd_dist(_parse_prime(args.p), Flavor.parse(args.flavor), args.rmax)
    if args.cmd == "moments":
        return cmd_moments(_parse_prime(args.p), Flavor.parse(args.flavor))
    if args.cmd == "bounds":
        return cmd_bounds(_parse_prime(args.p), args.degK)
    if args.cmd == "simulate":
        return cmd_simulate(_build_sim_config(args))
    if args.cmd == "isotropic":
        return cmd_isotropic(_parse_prime(args.p), Flavor.parse(args.flavor), args.n)
    if args.cmd == "ladder":
        return cmd_ladder(args.x, args.exponent, args.depth, args.k,
                          args.density, args.seed, args.cap, args.sieve_cap)
    raise ValueError(f"unknown command {args.cmd!r}")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        record = _dispatch(args)
    except (ValueError, ArithmeticError, CapExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = record.render(args.format)
    if args.out:
        try:
            with open(args.out, "w", encoding="utf-8") as handle:
                handle.write(text)
        except OSError as exc:
            print(f"error: cannot write {args.out!r}: {exc}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
