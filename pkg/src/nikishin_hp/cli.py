"""Batch experiment runner.

Ingests a JSON experiment description, realizes the measures, builds the
system, runs solver sweeps, and emits CSV/JSON reports plus a content-hashed
moment cache.  Exit code 0 means every requested check passed its tolerance;
validation problems exit 2 with a machine-readable JSON error on stderr and
check failures exit 1.

Config schema (numbers may be JSON numbers or decimal strings):

    {
      "precision_bits": 256,
      "system": [
        {"kind": "legendre-density", "interval": [-1, 0], "node_count": 16,
         "density_scale": 1},
        {"kind": "jacobi-density", "interval": [1, 3], "node_count": 16,
         "alpha": -0.5, "beta": -0.5, "density_scale": 1},
        {"kind": "atoms", "interval": [-1, 1], "nodes": [-1, 1],
         "weights": [0.5, 0.5], "sign": 1}
      ],
      "perturbations": [{"num_coeffs": [1], "den_coeffs": [-5, 1]}, null],
      "sweep": {"shape": "diagonal", "k_min": 4, "k_max": 12, "step": 2},
      "grid": {"radius_factor": 4, "circle_points": 64, "segment_points": 16},
      "checks": ["chile", "ratio44", "orthogonality", "sign_changes",
                 "pole_attraction", "type2"],
      "output_dir": "out",
      "pole_eps": 0.25,
      "order_deficit": 0,
      "max_index_spread": 0
    }

"sweep" may also be an explicit list of multi-indices ([[4,4],[6,6]]) or [];
"grid" may be {"points": [[re, im], ...]}.  Poles and coefficient lists are
ascending-degree.  NIKISHIN_HP_PRECISION overrides the default precision when
neither the flag nor the config pins it.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import os
import sys as _sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from mpmath import mp, mpc, mpf

from .algebra import LaurentTail, RationalFn
from .analysis import (
    EvalGrid,
    convergence_row,
    estimate_rate,
    first_level_remainder_values,
    pole_attraction,
    sign_changes,
)
from .hermite_pade import (
    MultiIndex,
    RationalPerturbation,
    check_orthogonality,
    perturbed_reduce,
    solve_type1,
    solve_type1_perturbed,
    solve_type2,
)
from .measures import Interval, MeasureSpec, moments
from .nikishin import (
    SystemSpec,
    build_system,
    check_chain_identity,
    check_ratio_identity,
)
from .precision import DEFAULT_PRECISION_BITS, noise_floor, set_precision

ENV_PRECISION = "NIKISHIN_HP_PRECISION"
KNOWN_CHECKS = ("chile", "ratio44", "orthogonality", "sign_changes", "pole_attraction", "type2")
CACHE_FILENAME = "moments.cache.json"


class ConfigError(Exception):
    def __init__(self, code: str, detail: str):
        super().__init__(detail)
        self.code = code
        self.detail = detail


def _num(x) -> mpf:
    if isinstance(x, str):
        return mpf(x)
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ConfigError("validate", f"expected a number, got {x!r}")
    return mpf(x)


@dataclass
class ExperimentConfig:
    precision_bits: int
    system: SystemSpec
    perturbation_coeffs: Optional[tuple]  # ((num, den) ascending-degree, ...) or None
    sweep: tuple
    grid: dict
    checks: tuple
    output_dir: Path
    pole_eps: mpf
    order_deficit: int = 0
    max_index_spread: Optional[int] = None
    warnings: tuple = field(default_factory=tuple)


def parse_config(raw: dict, override_precision: Optional[int] = None) -> ExperimentConfig:
    """Validate the raw JSON dict into an ExperimentConfig.

    Precision resolution: explicit override > config > NIKISHIN_HP_PRECISION >
    default.  The ambient precision is set before any numeric parsing.
    """
    if not isinstance(raw, dict):
        raise ConfigError("validate", "config root must be an object")
    precision = override_precision
    if precision is None:
        precision = raw.get("precision_bits")
    if precision is None:
        precision = os.environ.get(ENV_PRECISION)
    if precision is None:
        precision = DEFAULT_PRECISION_BITS
    try:
        precision = set_precision(int(precision))
    except (TypeError, ValueError) as exc:
        raise ConfigError("validate", f"bad precision_bits: {exc}") from exc

    warnings = []
    try:
        specs = [_parse_measure(d) for d in raw.get("system", [])]
        system = SystemSpec(specs)
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError("validate", f"bad system: {exc}") from exc
    m = system.m

    pert_raw = raw.get("perturbations", [])
    pert_coeffs = None
    if pert_raw:
        if len(pert_raw) != m:
            raise ConfigError("validate", "perturbations must list one entry per generator")
        pert_coeffs = []
        for entry in pert_raw:
            if entry is None:
                pert_coeffs.append(((mpf(0),), (mpf(1),)))
                continue
            try:
                num = tuple(_num(c) for c in entry["num_coeffs"])
                den = tuple(_num(c) for c in entry["den_coeffs"])
            except (KeyError, TypeError) as exc:
                raise ConfigError("validate", f"bad perturbation entry: {exc}") from exc
            pert_coeffs.append((num, den))
        pert_coeffs = tuple(pert_coeffs)

    sweep_raw = raw.get("sweep", [])
    try:
        sweep = _parse_sweep(sweep_raw, m)
    except (ValueError, TypeError, KeyError) as exc:
        raise ConfigError("validate", f"bad sweep: {exc}") from exc

    spread_cap = raw.get("max_index_spread")
    if spread_cap is not None:
        for n in sweep:
            if n.spread > int(spread_cap):
                warnings.append(
                    f"multi-index {tuple(n)} exceeds the declared spread bound "
                    f"{spread_cap}; the ratio limits assume a bounded spread"
                )

    checks = tuple(raw.get("checks", []))
    for c in checks:
        if c not in KNOWN_CHECKS:
            raise ConfigError("validate", f"unknown check {c!r}; known: {KNOWN_CHECKS}")

    grid = raw.get("grid", {})
    if not isinstance(grid, dict):
        raise ConfigError("validate", "grid must be an object")

    out_dir = raw.get("output_dir", "out")

    # last two intervals touching undermines the bounded-gap hypothesis
    if m >= 2:
        a, b = system.measures[-2].interval, system.measures[-1].interval
        lo, hi = (a, b) if a.a <= b.a else (b, a)
        if hi.a == lo.b:
            warnings.append(
                "the last two intervals touch; the ratio limits then require a "
                "moment-growth (determinacy) condition on the last generator"
            )

    return ExperimentConfig(
        precision_bits=precision,
        system=system,
        perturbation_coeffs=pert_coeffs,
        sweep=sweep,
        grid=grid,
        checks=checks,
        output_dir=Path(out_dir),
        pole_eps=_num(raw.get("pole_eps", 0.25)),
        order_deficit=int(raw.get("order_deficit", 0)),
        max_index_spread=spread_cap,
        warnings=tuple(warnings),
    )


def _parse_measure(d: dict) -> MeasureSpec:
    kind = d["kind"]
    interval = Interval(_num(d["interval"][0]), _num(d["interval"][1]))
    if kind == "atoms":
        return MeasureSpec(
            kind="atoms",
            interval=interval,
            nodes=tuple(_num(x) for x in d["nodes"]),
            weights=tuple(_num(w) for w in d["weights"]),
            sign=int(d.get("sign", 1)),
        )
    return MeasureSpec(
        kind=kind,
        interval=interval,
        node_count=int(d["node_count"]),
        alpha=_num(d["alpha"]) if "alpha" in d else None,
        beta=_num(d["beta"]) if "beta" in d else None,
        density_scale=_num(d.get("density_scale", 1)),
    )


def _parse_sweep(sweep_raw, m: int):
    if isinstance(sweep_raw, dict):
        if sweep_raw.get("shape") != "diagonal":
            raise ValueError(f"unknown sweep shape {sweep_raw.get('shape')!r}")
        k_min = int(sweep_raw["k_min"])
        k_max = int(sweep_raw["k_max"])
        step = int(sweep_raw.get("step", 2))
        mm = int(sweep_raw.get("m", m))
        if mm != m:
            raise ValueError("sweep m does not match the system size")
        if k_min < 1 or step < 1 or k_max < k_min:
            raise ValueError("diagonal sweep requires 1 <= k_min <= k_max and step >= 1")
        return tuple(MultiIndex.diagonal(m, k) for k in range(k_min, k_max + 1, step))
    sweep = tuple(MultiIndex(entry) for entry in sweep_raw)
    for n in sweep:
        if len(n) != m:
            raise ValueError(f"multi-index {tuple(n)} does not match the {m}-generator system")
    return sweep


# ---------------------------------------------------------------------------
# moment cache
# ---------------------------------------------------------------------------


def _mpf_triple(x: mpf):
    sign, man, exp, _ = x._mpf_
    return [int(sign), hex(man), int(exp)]


def _mpf_from_triple(t) -> mpf:
    from mpmath.libmp import from_man_exp

    sign, man, exp = int(t[0]), int(t[1], 16), int(t[2])
    x = mp.make_mpf(from_man_exp(man, exp))
    return -x if sign else x


def system_content_hash(sys, precision_bits: int) -> str:
    """Content hash of the realized system at a given precision."""
    payload = {"precision_bits": precision_bits, "generators": []}
    for g in sys.generators:
        payload["generators"].append(
            {
                "nodes": [_mpf_triple(x) for x in g.nodes],
                "weights": [_mpf_triple(w) for w in g.weights],
                "sign": g.sign,
                "support": [_mpf_triple(g.support.a), _mpf_triple(g.support.b)],
            }
        )
    blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _entry_checksum(coeff_triples) -> str:
    blob = json.dumps(coeff_triples, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def cache_lookup(path: Path, system_hash: str, j: int, K: int):
    """Cached moment tail of s_{1,j} with at least K+1 entries, or None.

    Corrupt entries (checksum mismatch, undecodable) count as misses and emit
    a warning on stderr.
    """
    try:
        data = json.loads(path.read_text())
    except (OSError, json.JSONDecodeError):
        return None
    if data.get("system_hash") != system_hash:
        return None
    entry = data.get("entries", {}).get(str(j))
    if entry is None:
        return None
    try:
        coeffs = entry["coeffs"]
        if entry.get("checksum") != _entry_checksum(coeffs):
            print(
                json.dumps({"warning": f"cache entry {j} failed its checksum; recomputing"}),
                file=_sys.stderr,
            )
            return None
        if len(coeffs) < K + 1:
            return None
        return [_mpf_from_triple(t) for t in coeffs]
    except (KeyError, TypeError, ValueError, IndexError):
        print(
            json.dumps({"warning": f"cache entry {j} is corrupt; recomputing"}),
            file=_sys.stderr,
        )
        return None


def cache_store(path: Path, system_hash: str, precision_bits: int, tails: dict):
    data = {
        "version": 1,
        "precision_bits": precision_bits,
        "system_hash": system_hash,
        "entries": {},
    }
    for j, coeffs in tails.items():
        triples = [_mpf_triple(c) for c in coeffs]
        data["entries"][str(j)] = {
            "coeffs": triples,
            "checksum": _entry_checksum(triples),
        }
    path.write_text(json.dumps(data, sort_keys=True))


# ---------------------------------------------------------------------------
# experiment
# ---------------------------------------------------------------------------


@dataclass
class ExperimentResult:
    exit_code: int
    passes: dict
    output_dir: Path
    cache_hits: int
    cache_misses: int
    rows: tuple
    elapsed_s: float


def _fmt(x) -> str:
    """Decimal scientific notation at ceil(0.3 * P) digits."""
    digits = max(3, math.ceil(mp.prec * 0.3))
    if x is None:
        return ""
    x = mpf(x)
    if not mp.isfinite(x):
        return "inf" if x > 0 else "-inf"
    return mp.nstr(x, digits, min_fixed=1, max_fixed=0, strip_zeros=False)


def run_experiment(config: ExperimentConfig, use_cache: bool = True, jobs: int = 1) -> ExperimentResult:
    t_start = time.monotonic()
    set_precision(config.precision_bits)
    for w in config.warnings:
        print(json.dumps({"warning": w}), file=_sys.stderr)

    config.output_dir.mkdir(parents=True, exist_ok=True)
    sys = build_system(config.system)
    m = sys.m
    pert = None
    if config.perturbation_coeffs is not None:
        pert = RationalPerturbation(
            [RationalFn(num, den) for num, den in config.perturbation_coeffs]
        )
        if pert.is_zero:
            pert = None
    if pert is not None:
        pert.validate_against(sys)

    # moment tails through the sweep's largest demand, via the advisory cache
    k_need = 4
    for n in config.sweep:
        k_need = max(k_need, n.total + n.max_part + 4)
    sys_hash = system_content_hash(sys, config.precision_bits)
    cache_path = config.output_dir / CACHE_FILENAME
    hits = misses = 0
    base_tails = []
    for j in range(1, m + 1):
        cached = cache_lookup(cache_path, sys_hash, j, k_need) if use_cache else None
        if cached is not None:
            base_tails.append(LaurentTail(cached[: k_need + 1]))
            hits += 1
        else:
            base_tails.append(moments(sys.chain(1, j), k_need))
            misses += 1
    if use_cache:
        cache_store(
            cache_path,
            sys_hash,
            config.precision_bits,
            {j: base_tails[j - 1].coeffs for j in range(1, m + 1)},
        )

    grid = _build_grid(config, sys, pert)

    solutions = _solve_sweep(config, sys, pert, base_tails, jobs)
    rows = [convergence_row(sys, pert, v, grid) for v in solutions]

    passes = {}
    identities = {"precision_bits": config.precision_bits, "checks": {}}
    tol_half = noise_floor(0.5)
    tol_third = noise_floor(1.0 / 3.0)

    if "chile" in config.checks:
        worst = (mpf(0), mpf(0))
        ok = True
        for j in range(m):
            for z in grid.points[: min(len(grid.points), 24)]:
                r = check_chain_identity(sys, j, z)
                if r.residual > worst[0]:
                    worst = (r.residual, r.scale)
                if r.residual > tol_half * max(r.scale, mpf(1)):
                    ok = False
        passes["chile"] = ok
        identities["checks"]["chile"] = {
            "max_residual": _fmt(worst[0]),
            "scale": _fmt(worst[1]),
            "tolerance_fraction": 0.5,
            "pass": ok,
        }

    if "ratio44" in config.checks:
        if m < 2:
            passes["ratio44"] = True
            identities["checks"]["ratio44"] = {"pass": True, "note": "m=1: no ratios"}
        else:
            from .measures import inverse_measure

            inv = inverse_measure(sys.generators[0])
            worst = (mpf(0), mpf(0))
            ok = True
            for k in range(2, m + 1):
                for z in grid.points[: min(len(grid.points), 24)]:
                    r = check_ratio_identity(sys, k, z, inverse=inv)
                    if r.residual > worst[0]:
                        worst = (r.residual, r.scale)
                    if r.residual > tol_third * max(r.scale, mpf(1)):
                        ok = False
            passes["ratio44"] = ok
            identities["checks"]["ratio44"] = {
                "max_residual": _fmt(worst[0]),
                "scale": _fmt(worst[1]),
                "tolerance_fraction": round(1.0 / 3.0, 6),
                "pass": ok,
            }

    if "orthogonality" in config.checks:
        worst = (mpf(0), mpf(0))
        ok = True
        for v in solutions:
            if pert is not None:
                report = perturbed_reduce(pert, v, sys)
                orth = check_orthogonality(sys, report.reduced)
            else:
                orth = check_orthogonality(sys, v)
            if orth.max_residual > worst[0]:
                worst = (orth.max_residual, orth.scale)
            if orth.max_residual > tol_half * max(orth.scale, mpf(1)):
                ok = False
        passes["orthogonality"] = ok
        identities["checks"]["orthogonality"] = {
            "max_residual": _fmt(worst[0]),
            "scale": _fmt(worst[1]),
            "tolerance_fraction": 0.5,
            "pass": ok,
            "instances": len(solutions),
        }

    if pert is not None:
        # reduction consistency is always reported when a perturbation exists
        worst = (mpf(0), mpf(0))
        ok = True
        for v in solutions:
            report = perturbed_reduce(pert, v, sys)
            if report.max_residual > worst[0]:
                worst = (report.max_residual, report.scale)
            if report.max_residual > tol_half * max(report.scale, mpf(1)):
                ok = False
        passes["reduction"] = ok
        identities["checks"]["reduction"] = {
            "max_residual": _fmt(worst[0]),
            "scale": _fmt(worst[1]),
            "tolerance_fraction": 0.5,
            "pass": ok,
            "instances": len(solutions),
        }

    if "sign_changes" in config.checks:
        ok = True
        observed = []
        for v in solutions:
            required = v.n.total - config.order_deficit - (pert.degree if pert else 0) - 1
            values = first_level_remainder_values(sys, v)
            count = sign_changes(values)
            if count < required:
                count = sign_changes(first_level_remainder_values(sys, v, refine=True))
            observed.append(count)
            if count < required:
                ok = False
        passes["sign_changes"] = ok
        identities["checks"]["sign_changes"] = {
            "counts": observed,
            "pass": ok,
        }

    zero_rows = []
    if "pole_attraction" in config.checks:
        ok = True
        if pert is None:
            identities["checks"]["pole_attraction"] = {"pass": True, "note": "no perturbation"}
            passes["pole_attraction"] = True
        else:
            largest = max(solutions, key=lambda v: v.n.total, default=None)
            for v in solutions:
                for j in range(1, m + 1):
                    rep = pole_attraction(pert, v, j, config.pole_eps, sys.intervals[-1])
                    for zeta, kappa, count in rep.counts:
                        zero_rows.append((v.n, j, zeta, kappa, count))
                        if v is largest and count != kappa:
                            ok = False
                    zero_rows.append((v.n, j, None, None, len(rep.strays)))
                    if v is largest and rep.strays:
                        ok = False
            passes["pole_attraction"] = ok
            identities["checks"]["pole_attraction"] = {
                "pass": ok,
                "eps": _fmt(config.pole_eps),
                "judged_at": list(largest.n) if largest is not None else None,
            }

    if "type2" in config.checks:
        ok = True
        worst_order_gap = 0
        for n in config.sweep:
            v2 = solve_type2(sys, n)
            for j in range(m):
                gap = (n[j] + 1) - v2.residual_orders[j]
                worst_order_gap = max(worst_order_gap, gap)
                if gap > 0:
                    ok = False
        passes["type2"] = ok
        identities["checks"]["type2"] = {
            "pass": ok,
            "worst_order_gap": worst_order_gap,
            "instances": len(config.sweep),
        }

    _write_convergence_csv(config.output_dir / "convergence.csv", sys, rows)
    (config.output_dir / "identities.json").write_text(
        json.dumps(identities, indent=2, sort_keys=True) + "\n"
    )
    if zero_rows:
        _write_zeros_csv(config.output_dir / "zeros.csv", sys, zero_rows)

    exit_code = 0 if all(passes.values()) else 1
    return ExperimentResult(
        exit_code=exit_code,
        passes=passes,
        output_dir=config.output_dir,
        cache_hits=hits,
        cache_misses=misses,
        rows=tuple(rows),
        elapsed_s=time.monotonic() - t_start,
    )


def _build_grid(config: ExperimentConfig, sys, pert) -> EvalGrid:
    g = config.grid
    if "points" in g:
        pts = [mpc(_num(p[0]), _num(p[1])) for p in g["points"]]
        last = sys.intervals[-1]
        poles = pert.poles if pert is not None else ()
        kept = [
            z
            for z in pts
            if last.distance_to(z) > 0
            and all(abs(z - zeta) >= config.pole_eps for zeta, _ in poles)
        ]
        if not kept:
            raise ConfigError(
                "validate",
                "every explicit grid point sits on the last interval or too "
                "close to a perturbation pole",
            )
        return EvalGrid(kept)
    return EvalGrid.default(
        sys,
        pert,
        radius_factor=_num(g.get("radius_factor", 4)),
        circle_points=int(g.get("circle_points", 64)),
        segment_points=int(g.get("segment_points", 16)),
    )


def _solve_one(payload):
    """Worker-pool entry: rebuild precision context and solve one index."""
    (bits, sys, pert, n_parts, M) = payload
    set_precision(bits)
    n = MultiIndex(n_parts)
    if pert is not None:
        return solve_type1_perturbed(sys, pert, n)
    return solve_type1(sys, n, M)


def _solve_sweep(config, sys, pert, base_tails, jobs):
    if not config.sweep:
        return []
    if jobs > 1:
        payloads = [
            (config.precision_bits, sys, pert, tuple(n), config.order_deficit)
            for n in config.sweep
        ]
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_solve_one, payloads))
    out = []
    for n in config.sweep:
        if pert is not None:
            out.append(solve_type1_perturbed(sys, pert, n, base_tails=base_tails))
        else:
            out.append(solve_type1(sys, n, config.order_deficit, base_tails=base_tails))
    return out


def _write_convergence_csv(path: Path, sys, rows):
    m = sys.m
    lines = [f"# written {time.strftime('%Y-%m-%dT%H:%M:%S%z')} (timestamp only; body is deterministic)"]
    header = (
        ["abs_n"]
        + [f"n_{j}" for j in range(1, m + 1)]
        + [f"err_{j}" for j in range(1, m)]
        + ["err_0", "nullity_flag", "precision_used"]
    )
    lines.append(",".join(header))
    for row in rows:
        cells = [str(row.n.total)]
        cells += [str(p) for p in row.n]
        cells += [_fmt(e) for e in row.err]
        cells += [_fmt(row.err0), "1" if row.nullity_flag else "0", str(row.precision_bits)]
        lines.append(",".join(cells))
    totals = [r.n.total for r in rows]
    if len(rows) >= 3 and all(a < b for a, b in zip(totals, totals[1:])):
        rate = estimate_rate(rows)
        cells = ["delta"] + [""] * m
        cells += [_fmt(rate.deltas.get(f"err_{j}")) for j in range(1, m)]
        cells += [_fmt(rate.deltas.get("err_0")), "", ""]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def _write_zeros_csv(path: Path, sys, zero_rows):
    m = sys.m
    lines = [f"# written {time.strftime('%Y-%m-%dT%H:%M:%S%z')} (timestamp only; body is deterministic)"]
    header = (
        ["abs_n"]
        + [f"n_{j}" for j in range(1, m + 1)]
        + ["component", "kind", "zeta_re", "zeta_im", "kappa", "count"]
    )
    lines.append(",".join(header))
    for n, j, zeta, kappa, count in zero_rows:
        cells = [str(n.total)] + [str(p) for p in n] + [str(j)]
        if zeta is None:
            cells += ["census", "", "", "", str(count)]
        else:
            cells += ["pole", _fmt(zeta.real), _fmt(zeta.imag), str(kappa), str(count)]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="nikishin-hp",
        description="Batch experiments: simultaneous rational approximation of "
        "Cauchy transforms over Nikishin systems, with rational perturbations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run an experiment described by a JSON config")
    run.add_argument("config", type=Path)
    run.add_argument("--output-dir", type=Path, default=None)
    run.add_argument("--precision-bits", type=int, default=None)
    run.add_argument(
        "--check",
        action="append",
        dest="checks",
        default=None,
        help="override the config's checks (repeatable)",
    )
    run.add_argument("--no-cache", action="store_true")
    run.add_argument("--jobs", type=int, default=1)
    args = parser.parse_args(argv)

    try:
        text = args.config.read_text()
    except OSError as exc:
        _emit_error("io", str(exc))
        return 2
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        _emit_error("parse", str(exc))
        return 2
    try:
        config = parse_config(raw, override_precision=args.precision_bits)
        if args.output_dir is not None:
            config.output_dir = args.output_dir
        if args.checks is not None:
            for c in args.checks:
                if c not in KNOWN_CHECKS:
                    raise ConfigError("validate", f"unknown check {c!r}")
            config.checks = tuple(args.checks)
        result = run_experiment(config, use_cache=not args.no_cache, jobs=args.jobs)
    except ConfigError as exc:
        _emit_error(exc.code, exc.detail)
        return 2
    except (ValueError, IndexError) as exc:
        _emit_error("validate", str(exc))
        return 2

    summary = {
        "passes": result.passes,
        "cache_hits": result.cache_hits,
        "cache_misses": result.cache_misses,
        "output_dir": str(result.output_dir),
        "elapsed_s": round(result.elapsed_s, 3),
    }
    print(json.dumps(summary, sort_keys=True))
    return result.exit_code


def _emit_error(code: str, detail: str):
    print(json.dumps({"error": code, "detail": detail}), file=_sys.stderr)


if __name__ == "__main__":
    raise SystemExit(main())
