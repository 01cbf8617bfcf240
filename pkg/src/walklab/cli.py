"""Command-line front end.

Subcommands: walk (position distributions), absorb (absorption records and
averaged absorbing times), series (absorption analytics and convergence
diagnostics), exponent (spreading-exponent fits), sweep (preset disorder
comparison table).

Every command accepts --seed/--workers/--format/--output; identical
invocations produce byte-identical output. Environment variables
WALKLAB_SEED and WALKLAB_WORKERS override the built-in defaults; explicit
flags override both. Exit codes: 0 success, 2 invalid configuration,
3 numerical failure.

Disorder specs on the command line are either a preset name
(tableII-binomial, tableII-hypergeometric, tableII-negbinomial,
tableII-geometric) or family:key=value[,key=value...], e.g.
poisson:lambda=1 or binomial:n=2,p=0.5.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
from typing import Optional

import numpy as np

from . import __version__
from .classical import ClassicalWalkConfig, classical_avg_time_term
from .classical import snapshot_distribution as classical_snapshot
from .disorder import TABLE2_PRESETS, DisorderSpec, build_spec, child_seed, sample_realization
from .engine import AbsorberConfig, WalkConfig, coin_by_name
from .engine import snapshot_distribution as quantum_snapshot
from .ensemble import (
    EnsembleConfig,
    disorder_avg_absorb_time,
    disorder_avg_sigma,
    finite_horizon_avg_time,
    fit_exponent,
)
from .errors import ConfigurationError, NumericalError
from .classical import run_classical
from .engine import run_quantum
from .series import (
    DEFAULT_ORDER,
    avg_absorb_time,
    quantum_avg_time_term,
    raabe_estimate,
    total_absorption,
)


def _env_int(name: str, fallback: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return fallback
    try:
        return int(raw)
    except ValueError:
        raise ConfigurationError(f"{name} must be an integer, got {raw!r}") from None


def parse_disorder(text: str) -> DisorderSpec:
    """Parse the CLI disorder grammar: preset name or family:key=value,..."""
    if text in TABLE2_PRESETS:
        return TABLE2_PRESETS[text]
    if ":" not in text:
        presets = ", ".join(TABLE2_PRESETS)
        raise ConfigurationError(
            f"disorder spec {text!r} is neither a preset ({presets}) "
            "nor family:key=value,..."
        )
    family, _, rest = text.partition(":")
    fields = {}
    for item in rest.split(","):
        if "=" not in item:
            raise ConfigurationError(
                f"malformed disorder parameter {item!r} (expected key=value)"
            )
        key, _, value = item.partition("=")
        fields[key.strip()] = value.strip()
    return build_spec(family.strip(), fields)


def _parse_range(text: str) -> tuple[int, int]:
    """Parse LO:HI into a pair of integers."""
    lo, sep, hi = text.partition(":")
    if not sep:
        raise ConfigurationError(f"range {text!r} must look like LO:HI")
    try:
        return int(lo), int(hi)
    except ValueError:
        raise ConfigurationError(f"range bounds must be integers, got {text!r}") from None


def _parse_m1_range(text: str) -> list[int]:
    lo, sep, hi = text.partition("..")
    if not sep:
        raise ConfigurationError(f"m1 range {text!r} must look like A..B")
    try:
        a, b = int(lo), int(hi)
    except ValueError:
        raise ConfigurationError(f"m1 range bounds must be integers, got {text!r}") from None
    if a > b:
        raise ConfigurationError(f"empty m1 range {text!r}")
    return list(range(a, b + 1))


def _parse_int_list(text: str, flag: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ConfigurationError(f"{flag} must be a comma-separated integer list") from None


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return ""
        return repr(float(value))
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def _json_safe(value):
    if isinstance(value, float) and math.isnan(value):
        return None
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return _json_safe(float(value))
    if isinstance(value, np.ndarray):
        return [_json_safe(v) for v in value.tolist()]
    if isinstance(value, (list, tuple)):
        return [_json_safe(v) for v in value]
    if isinstance(value, dict):
        return {k: _json_safe(v) for k, v in value.items()}
    return value


def _render(args, meta: dict, columns: list[str], rows: list[tuple],
            json_key: str = "rows") -> str:
    meta = {"tool": "walklab", "version": __version__, **meta}
    if args.format == "csv":
        lines = [f"# {k}={meta[k]}" for k in sorted(meta)]
        lines.append(",".join(columns))
        for row in rows:
            lines.append(",".join(_cell(v) for v in row))
        return "\n".join(lines) + "\n"
    payload = {
        "meta": _json_safe(meta),
        json_key: [
            {col: _json_safe(v) for col, v in zip(columns, row)} for row in rows
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _write(args, text: str) -> None:
    if args.output and args.output != "-":
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _disorder_meta(spec: Optional[DisorderSpec]) -> str:
    return spec.to_text() if spec is not None else "none"


def _walk_lengths(args, spec: Optional[DisorderSpec]):
    if spec is None:
        return None
    return sample_realization(spec, args.steps, child_seed(args.seed, 0)).lengths


def cmd_walk(args) -> str:
    spec = parse_disorder(args.disorder) if args.disorder else None
    absorber = AbsorberConfig(args.absorber) if args.absorber is not None else None
    snapshots = sorted(set(args.snapshot or [args.steps]))
    lengths = _walk_lengths(args, spec)
    rows = []
    for at in snapshots:
        if args.engine == "quantum":
            amp_l, amp_r = (1.0, 0.0) if args.initial == "L" else (0.0, 1.0)
            dist = quantum_snapshot(
                WalkConfig(
                    steps=args.steps,
                    coin=coin_by_name(args.coin),
                    initial_amp_left=amp_l,
                    initial_amp_right=amp_r,
                    absorber=absorber,
                    step_lengths=lengths,
                ),
                at,
            )
        else:
            dist = classical_snapshot(
                ClassicalWalkConfig(
                    steps=args.steps, absorber=absorber, step_lengths=lengths
                ),
                at,
            )
        for pos, prob in zip(dist.positions.tolist(), dist.probs.tolist()):
            # parity-forbidden and absorbed sites carry exactly zero mass
            if prob != 0.0:
                rows.append((at, pos, float(prob)))
    meta = {
        "command": "walk",
        "engine": args.engine,
        "coin": args.coin if args.engine == "quantum" else "n/a",
        "initial": args.initial if args.engine == "quantum" else "n/a",
        "steps": args.steps,
        "absorber": args.absorber if args.absorber is not None else "none",
        "disorder": _disorder_meta(spec),
        "seed": args.seed,
    }
    return _render(args, meta, ["time", "position", "probability"], rows)


def cmd_absorb(args) -> str:
    spec = parse_disorder(args.disorder) if args.disorder else None
    absorber = AbsorberConfig(args.absorber)
    if spec is None:
        if args.realizations is not None:
            raise ConfigurationError("--realizations requires --disorder")
        if args.engine == "quantum":
            amp_l, amp_r = (1.0, 0.0) if args.initial == "L" else (0.0, 1.0)
            result = run_quantum(
                WalkConfig(
                    steps=args.steps,
                    coin=coin_by_name(args.coin),
                    initial_amp_left=amp_l,
                    initial_amp_right=amp_r,
                    absorber=absorber,
                )
            )
        else:
            result = run_classical(
                ClassicalWalkConfig(steps=args.steps, absorber=absorber)
            )
        record = result.record
        rows = []
        cum = 0.0
        for t in range(1, record.horizon + 1):
            cum += float(record.per_step[t - 1])
            try:
                t_avg = finite_horizon_avg_time(record, t)
            except NumericalError:
                t_avg = float("nan")
            rows.append((t, float(record.per_step[t - 1]), cum, t_avg))
        meta = {
            "command": "absorb",
            "engine": args.engine,
            "coin": args.coin if args.engine == "quantum" else "n/a",
            "initial": args.initial if args.engine == "quantum" else "n/a",
            "steps": args.steps,
            "absorber": args.absorber,
            "disorder": "none",
            "seed": args.seed,
            "cumulative_total": record.cumulative_total,
        }
        return _render(
            args, meta, ["t", "p_t", "cumulative", "avg_time"], rows, "record"
        )
    realizations = args.realizations if args.realizations is not None else 40
    horizons = (
        _parse_int_list(args.horizons, "--horizons")
        if args.horizons
        else list(range(1, args.steps + 1))
    )
    amp_l, amp_r = (1.0, 0.0) if args.initial == "L" else (0.0, 1.0)
    config = EnsembleConfig(
        engine=args.engine,
        steps=args.steps,
        realizations=realizations,
        master_seed=args.seed,
        coin=coin_by_name(args.coin),
        initial_amp_left=amp_l,
        initial_amp_right=amp_r,
        absorber=absorber,
        disorder=spec,
        workers=args.workers,
    )
    curve = disorder_avg_absorb_time(config, horizons)
    rows = [
        (int(n), float(v), float(se), int(inc), int(config.realizations - inc))
        for n, v, se, inc in zip(
            curve.abscissa, curve.values, curve.stderr, curve.included
        )
    ]
    meta = {
        "command": "absorb",
        "engine": args.engine,
        "coin": args.coin if args.engine == "quantum" else "n/a",
        "initial": args.initial if args.engine == "quantum" else "n/a",
        "steps": args.steps,
        "absorber": args.absorber,
        "disorder": _disorder_meta(spec),
        "realizations": realizations,
        "seed": args.seed,
        "total_excluded": int(np.sum(curve.excluded)),
    }
    return _render(
        args,
        meta,
        ["horizon", "avg_time", "stderr", "included", "excluded"],
        rows,
        "curve",
    )


def cmd_series(args) -> str:
    if args.raabe:
        m1 = args.m1 if args.m1 is not None else 2
        if args.raabe == "classical":
            term = classical_avg_time_term(m1)
        else:
            term = quantum_avg_time_term(m1)
        report = raabe_estimate(term, n_max=args.n_max)
        meta = {
            "command": "series",
            "mode": f"raabe-{args.raabe}",
            "m1": m1,
            "n_max": report.n_max,
            "band": report.band,
            "limit": report.limit,
            "verdict": report.verdict,
            "seed": args.seed,
        }
        rows = [(int(n), float(e)) for n, e in report.samples]
        return _render(args, meta, ["n", "ratio_estimate"], rows, "samples")
    if args.m1 is not None and args.m1_range:
        raise ConfigurationError("use either --m1 or --m1-range, not both")
    if args.m1 is not None:
        positions = [args.m1]
    elif args.m1_range:
        positions = _parse_m1_range(args.m1_range)
    else:
        positions = list(range(1, 11))
    rows = []
    for m1 in positions:
        p_total = total_absorption(m1, args.initial, args.T, args.tail)
        t_avg = avg_absorb_time(m1, args.initial, args.T, args.tail)
        rows.append((m1, p_total, t_avg))
    meta = {
        "command": "series",
        "mode": "absorption-table",
        "initial": args.initial,
        "order": args.T,
        "tail": args.tail,
        "seed": args.seed,
    }
    return _render(args, meta, ["m1", "total_absorption", "avg_time"], rows)


def _exponent_fit(args, spec, absorber):
    realizations = args.realizations
    if realizations is None:
        realizations = 200 if spec is not None else 1
    amp_l, amp_r = (1.0, 0.0) if args.initial == "L" else (0.0, 1.0)
    config = EnsembleConfig(
        engine=args.engine,
        steps=args.steps,
        realizations=realizations,
        master_seed=args.seed,
        coin=coin_by_name(args.coin),
        initial_amp_left=amp_l,
        initial_amp_right=amp_r,
        absorber=absorber,
        disorder=spec,
        workers=args.workers,
    )
    curve = disorder_avg_sigma(config)
    t_lo, t_hi = _parse_range(args.t_range)
    return fit_exponent(curve, t_lo, t_hi), realizations


def cmd_exponent(args) -> str:
    spec = parse_disorder(args.disorder) if args.disorder else None
    absorber = AbsorberConfig(args.absorber) if args.absorber is not None else None
    fit, realizations = _exponent_fit(args, spec, absorber)
    meta = {
        "command": "exponent",
        "engine": args.engine,
        "coin": args.coin if args.engine == "quantum" else "n/a",
        "initial": args.initial if args.engine == "quantum" else "n/a",
        "steps": args.steps,
        "absorber": args.absorber if args.absorber is not None else "none",
        "disorder": _disorder_meta(spec),
        "realizations": realizations,
        "t_range": args.t_range,
        "seed": args.seed,
    }
    rows = [
        (
            fit.alpha,
            fit.ci95_halfwidth,
            fit.intercept,
            fit.residual_rms,
            fit.fit_range[0],
            fit.fit_range[1],
            fit.n_points,
        )
    ]
    columns = [
        "alpha", "ci95_halfwidth", "intercept", "residual_rms",
        "t_lo", "t_hi", "n_points",
    ]
    return _render(args, meta, columns, rows, "fit")


def cmd_sweep(args) -> str:
    names = (
        [s.strip() for s in args.presets.split(",")]
        if args.presets
        else list(TABLE2_PRESETS)
    )
    for name in names:
        if name not in TABLE2_PRESETS:
            known = ", ".join(TABLE2_PRESETS)
            raise ConfigurationError(f"unknown preset {name!r} (known: {known})")
    t_lo, t_hi = _parse_range(args.t_range)
    absorber = AbsorberConfig(args.absorber)
    rows = []
    for name in names:
        spec = TABLE2_PRESETS[name]
        mean, var = spec.moments()
        fits = {}
        for label, absorber_cfg in (("with", absorber), ("without", None)):
            config = EnsembleConfig(
                engine="quantum",
                steps=args.steps,
                realizations=args.realizations,
                master_seed=args.seed,
                absorber=absorber_cfg,
                disorder=spec,
                workers=args.workers,
            )
            curve = disorder_avg_sigma(config)
            fits[label] = fit_exponent(curve, t_lo, t_hi)
        rows.append(
            (
                name,
                spec.family,
                mean,
                var,
                spec.classification(),
                fits["with"].alpha,
                fits["with"].ci95_halfwidth,
                fits["without"].alpha,
                fits["without"].ci95_halfwidth,
                fits["with"].alpha - fits["without"].alpha,
            )
        )
    meta = {
        "command": "sweep",
        "engine": "quantum",
        "absorber": args.absorber,
        "realizations": args.realizations,
        "steps": args.steps,
        "t_range": args.t_range,
        "seed": args.seed,
    }
    columns = [
        "preset", "family", "mean", "variance", "classification",
        "alpha_with_absorber", "ci95_with", "alpha_no_absorber", "ci95_without",
        "restoration_gap",
    ]
    return _render(args, meta, columns, rows)


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=None,
                        help="master seed (default: WALKLAB_SEED or 1)")
    parser.add_argument("--workers", type=int, default=None,
                        help="parallel workers (default: WALKLAB_WORKERS or CPU count)")
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--output", default="-",
                        help="output path, or - for stdout")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="walklab",
        description="Quantum and classical random walks with absorbers, "
                    "step-length disorder, and spreading analytics.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("walk", help="position distributions at snapshot times")
    p.add_argument("--engine", choices=("quantum", "classical"), required=True)
    p.add_argument("--coin", default="hadamard")
    p.add_argument("--initial", choices=("L", "R"), default="L")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--absorber", type=int, default=None)
    p.add_argument("--disorder", default=None)
    p.add_argument("--snapshot", type=int, action="append",
                   help="snapshot time (repeatable; default: final step)")
    _add_common(p)
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("absorb", help="absorption record or averaged absorbing time")
    p.add_argument("--engine", choices=("quantum", "classical"), required=True)
    p.add_argument("--coin", default="hadamard")
    p.add_argument("--initial", choices=("L", "R"), default="L")
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--absorber", type=int, required=True)
    p.add_argument("--disorder", default=None)
    p.add_argument("--realizations", type=int, default=None,
                   help="ensemble size (requires --disorder; default 40)")
    p.add_argument("--horizons", default=None,
                   help="comma-separated horizon list (default: every step)")
    _add_common(p)
    p.set_defaults(func=cmd_absorb)

    p = sub.add_parser("series", help="absorption series table or ratio test")
    p.add_argument("--m1", type=int, default=None)
    p.add_argument("--m1-range", dest="m1_range", default=None,
                   help="inclusive range A..B (default 1..10)")
    p.add_argument("--initial", choices=("L", "R"), default="L")
    p.add_argument("--T", dest="T", type=int, default=DEFAULT_ORDER,
                   help="series truncation order")
    p.add_argument("--tail", choices=("power_law", "none"), default="power_law")
    p.add_argument("--raabe", choices=("classical", "quantum"), default=None,
                   help="run the ratio-test estimator instead of the table")
    p.add_argument("--n-max", dest="n_max", type=int, default=10 ** 6)
    _add_common(p)
    p.set_defaults(func=cmd_series)

    p = sub.add_parser("exponent", help="fit the spreading exponent")
    p.add_argument("--engine", choices=("quantum", "classical"), required=True)
    p.add_argument("--coin", default="hadamard")
    p.add_argument("--initial", choices=("L", "R"), default="L")
    p.add_argument("--steps", type=int, default=80)
    p.add_argument("--absorber", type=int, default=None)
    p.add_argument("--disorder", default=None)
    p.add_argument("--realizations", type=int, default=None,
                   help="default: 200 with disorder, 1 without")
    p.add_argument("--t-range", dest="t_range", default="20:80")
    _add_common(p)
    p.set_defaults(func=cmd_exponent)

    p = sub.add_parser("sweep", help="preset disorder comparison table")
    p.add_argument("--presets", default=None,
                   help="comma-separated preset names (default: all)")
    p.add_argument("--absorber", type=int, default=2)
    p.add_argument("--steps", type=int, default=80)
    p.add_argument("--realizations", type=int, default=200)
    p.add_argument("--t-range", dest="t_range", default="20:80")
    _add_common(p)
    p.set_defaults(func=cmd_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.seed is None:
            args.seed = _env_int("WALKLAB_SEED", 1)
        if args.workers is None:
            args.workers = _env_int("WALKLAB_WORKERS", os.cpu_count() or 1)
        if args.workers < 1:
            raise ConfigurationError(f"workers must be >= 1, got {args.workers}")
        text = args.func(args)
        _write(args, text)
    except ConfigurationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
