"""Experiment driver: config parsing, command dispatch, bit-stable CSV output.

Config files are flat ``key = value`` pairs with dotted sections::

    model.nu = 2
    model.nu1 = 1
    model.L = 32
    disorder.kind = uniform
    disorder.lo = 0
    disorder.hi = 1
    realizations = 200
    out = density.csv

Unknown keys are rejected (typo safety) and every config error is reported,
not just the first.  Floats are serialized with repr(), the shortest decimal
that round-trips, so reruns with identical config and seed are byte-identical
regardless of worker count.  Exit codes: 0 success, 1 config error,
2 numerical-margin error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import os
import sys

import numpy as np

from . import __version__
from .bounds import resolvent_scaling_study, standard_sweep
from .ensemble import (
    LambdaGrid,
    bump_function,
    default_grid,
    estimate_bulk_ids,
    estimate_surface_density,
    estimate_surface_functional,
)
from .model import DIRICHLET, PERIODIC, DisorderSpec, SurfaceGeometry, bulk_box
from .spectral import MarginError

__all__ = ["main", "parse_config", "run", "ConfigError"]

COMMANDS = (
    "surface-density",
    "surface-functional",
    "bulk-ids",
    "check-bounds",
    "scaling-study",
)

_MODEL_KEYS = {"model.nu", "model.nu1", "model.W", "model.P", "model.boundary"}
_DISORDER_KEYS = {
    "disorder.kind",
    "disorder.alpha",
    "disorder.lo",
    "disorder.hi",
    "disorder.a",
    "disorder.b",
    "disorder.prob",
    "disorder.values",
    "disorder.weights",
}
_GRID_KEYS = {"grid.a", "grid.b", "grid.n"}
_COMMON_KEYS = {"realizations", "master_seed", "out"}

# allowed key sets per command; required keys are checked separately
_ALLOWED = {
    "surface-density": _COMMON_KEYS | _MODEL_KEYS | _DISORDER_KEYS | _GRID_KEYS | {"model.L"},
    "surface-functional": _COMMON_KEYS
    | _MODEL_KEYS
    | _DISORDER_KEYS
    | _GRID_KEYS
    | {"model.L_list", "g.center", "g.width"},
    "bulk-ids": _COMMON_KEYS
    | {"model.nu", "model.boundary", "model.L"}
    | _DISORDER_KEYS
    | _GRID_KEYS,
    "check-bounds": _COMMON_KEYS,
    "scaling-study": _COMMON_KEYS | _MODEL_KEYS | _DISORDER_KEYS | {"model.L_list", "p", "k", "c"},
}
_REQUIRED = {
    "surface-density": {"model.nu", "model.nu1", "model.L", "disorder.kind", "realizations"},
    "surface-functional": {
        "model.nu",
        "model.nu1",
        "model.L_list",
        "disorder.kind",
        "g.center",
        "g.width",
        "realizations",
    },
    "bulk-ids": {"model.nu", "model.L", "disorder.kind", "realizations"},
    "check-bounds": {"realizations"},
    "scaling-study": {
        "model.nu",
        "model.nu1",
        "model.L_list",
        "disorder.kind",
        "p",
        "k",
        "c",
        "realizations",
    },
}

_DISORDER_PARAM_KEYS = {
    "point-mass": {"disorder.alpha"},
    "uniform": {"disorder.lo", "disorder.hi"},
    "bernoulli": {"disorder.a", "disorder.b", "disorder.prob"},
    "finite-discrete": {"disorder.values", "disorder.weights"},
}

_SCHEMAS = {
    "surface-density": ("lambda", "mean", "variance", "realizations", "L", "W", "P"),
    "surface-functional": ("L", "mu", "mu_plus", "mu_minus", "stderr"),
    "bulk-ids": ("lambda", "N_mean", "N_variance", "realizations", "L"),
    "check-bounds": ("name", "lhs", "rhs", "holds", "slack", "context"),
    "scaling-study": ("L", "p", "k", "mean_qnorm_p", "fit_slope"),
}


class ConfigError(ValueError):
    """Carries the full list of config problems."""

    def __init__(self, errors: list[str]):
        super().__init__("; ".join(errors))
        self.errors = errors


class _Parser:
    """Typed key extraction that accumulates errors instead of raising."""

    def __init__(self, pairs: dict[str, str]):
        self.pairs = pairs
        self.errors: list[str] = []

    def _convert(self, key, conv, type_name):
        raw = self.pairs[key]
        try:
            return conv(raw)
        except ValueError:
            self.errors.append(f"key {key!r}: expected {type_name}, got {raw!r}")
            return None

    def get_int(self, key, default=None, invariant=None, check=None):
        if key not in self.pairs:
            return default
        val = self._convert(key, int, "an integer")
        if val is not None and check is not None and not check(val):
            self.errors.append(f"key {key!r} violates {invariant}: got {val}")
            return None
        return val

    def get_float(self, key, default=None, invariant=None, check=None):
        if key not in self.pairs:
            return default
        val = self._convert(key, float, "a number")
        if val is not None and check is not None and not check(val):
            self.errors.append(f"key {key!r} violates {invariant}: got {val}")
            return None
        return val

    def get_str(self, key, default=None, choices=None):
        if key not in self.pairs:
            return default
        val = self.pairs[key].strip()
        if choices is not None and val not in choices:
            self.errors.append(f"key {key!r} must be one of {sorted(choices)}, got {val!r}")
            return None
        return val

    def get_float_list(self, key):
        if key not in self.pairs:
            return None
        return self._convert(
            key,
            lambda s: tuple(float(tok) for tok in s.split(",")),
            "a comma-separated list of numbers",
        )

    def get_int_list(self, key):
        if key not in self.pairs:
            return None
        return self._convert(
            key,
            lambda s: tuple(int(tok) for tok in s.split(",")),
            "a comma-separated list of integers",
        )


def _split_pairs(text: str) -> tuple[dict[str, str], list[str]]:
    pairs: dict[str, str] = {}
    errors: list[str] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            errors.append(f"line {lineno}: expected 'key = value', got {stripped!r}")
            continue
        key, _, value = stripped.partition("=")
        key, value = key.strip(), value.strip()
        if not key:
            errors.append(f"line {lineno}: empty key")
            continue
        if key in pairs:
            errors.append(f"line {lineno}: duplicate key {key!r}")
            continue
        pairs[key] = value
    return pairs, errors


def _build_disorder(p: _Parser) -> DisorderSpec | None:
    kind = p.get_str("disorder.kind", choices=set(_DISORDER_PARAM_KEYS))
    if kind is None:
        return None
    wanted = _DISORDER_PARAM_KEYS[kind]
    for key in sorted((_DISORDER_KEYS - {"disorder.kind"} - wanted) & p.pairs.keys()):
        p.errors.append(f"key {key!r} is not accepted by disorder.kind = {kind}")
    missing = sorted(wanted - p.pairs.keys())
    if missing:
        p.errors.extend(f"missing required key {k!r} for disorder.kind = {kind}" for k in missing)
        return None
    try:
        if kind == "point-mass":
            alpha = p.get_float("disorder.alpha")
            return DisorderSpec.point_mass(alpha) if alpha is not None else None
        if kind == "uniform":
            lo, hi = p.get_float("disorder.lo"), p.get_float("disorder.hi")
            if lo is None or hi is None:
                return None
            return DisorderSpec.uniform(lo, hi)
        if kind == "bernoulli":
            a = p.get_float("disorder.a")
            b = p.get_float("disorder.b")
            prob = p.get_float("disorder.prob")
            if a is None or b is None or prob is None:
                return None
            return DisorderSpec.bernoulli(a, b, prob)
        values = p.get_float_list("disorder.values")
        weights = p.get_float_list("disorder.weights")
        if values is None or weights is None:
            return None
        return DisorderSpec.finite_discrete(values, weights)
    except ValueError as exc:
        p.errors.append(f"disorder: {exc}")
        return None


class ExperimentConfig:
    """Validated experiment description; construct via parse_config."""

    def __init__(self, command: str, pairs: dict[str, str], **fields):
        self.command = command
        self.pairs = dict(pairs)
        for name, value in fields.items():
            setattr(self, name, value)

    def canonical_text(self) -> str:
        lines = [f"command = {self.command}"]
        lines += [f"{k} = {v}" for k, v in sorted(self.pairs.items())]
        return "\n".join(lines) + "\n"

    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_text().encode()).hexdigest()


def parse_config(
    command: str, text: str, seed_override: int | None = None, out_override: str | None = None
) -> ExperimentConfig:
    """Parse and validate a config document for one command.

    Raises ConfigError carrying every problem found: malformed lines,
    duplicate or unknown keys, missing required keys, type errors, and named
    invariant violations.  ``seed_override``/``out_override`` take effect
    before validation and are reflected in the stored pairs (and therefore in
    the config hash).
    """
    if command not in COMMANDS:
        raise ConfigError([f"unknown command {command!r}; choose from {', '.join(COMMANDS)}"])
    pairs, errors = _split_pairs(text)
    if seed_override is not None:
        pairs["master_seed"] = str(seed_override)
    if out_override is not None:
        pairs["out"] = out_override

    allowed = _ALLOWED[command]
    for key in sorted(pairs.keys() - allowed):
        errors.append(f"unknown key {key!r} for command {command}")
    for key in sorted(_REQUIRED[command] - pairs.keys()):
        errors.append(f"missing required key {key!r} for command {command}")
    if "out" not in pairs:
        errors.append("missing required key 'out' (config key or --out)")

    # typed extraction tolerates missing keys, so structural and value errors
    # can all be collected in one pass
    p = _Parser(pairs)
    p.errors = errors + p.errors
    realizations = p.get_int(
        "realizations", invariant="realizations >= 1", check=lambda v: v >= 1
    )
    master_seed = p.get_int("master_seed", default=0)
    out = pairs.get("out", "")
    fields: dict = {
        "realizations": realizations,
        "master_seed": master_seed,
        "out": out,
    }

    if command != "check-bounds":
        fields["disorder"] = _build_disorder(p)
        fields["nu"] = p.get_int("model.nu", invariant="model.nu >= 1", check=lambda v: v >= 1)
        fields["boundary"] = p.get_str(
            "model.boundary", default=DIRICHLET, choices={DIRICHLET, PERIODIC}
        )

    if command in ("surface-density", "surface-functional", "scaling-study"):
        nu = fields.get("nu")
        fields["nu1"] = p.get_int(
            "model.nu1",
            invariant="1 <= model.nu1 < model.nu",
            check=lambda v: v >= 1 and (nu is None or v < nu),
        )
        fields["W"] = p.get_int("model.W", invariant="model.W >= 0", check=lambda v: v >= 0)
        fields["P"] = p.get_int("model.P", invariant="model.P >= 0", check=lambda v: v >= 0)

    if command in ("surface-density", "bulk-ids"):
        fields["L"] = p.get_int("model.L", invariant="model.L >= 1", check=lambda v: v >= 1)

    if command in ("surface-functional", "scaling-study"):
        l_list = p.get_int_list("model.L_list")
        if l_list is not None and (
            len(l_list) == 0 or any(b <= a for a, b in zip(l_list, l_list[1:])) or l_list[0] < 1
        ):
            p.errors.append(
                f"key 'model.L_list' violates model.L_list ascending with entries >= 1: got {l_list}"
            )
            l_list = None
        fields["L_list"] = l_list

    if command in ("surface-density", "surface-functional", "bulk-ids"):
        grid_a = p.get_float("grid.a")
        grid_b = p.get_float("grid.b")
        grid_n = p.get_int("grid.n", default=513, invariant="grid.n >= 2", check=lambda v: v >= 2)
        if fields.get("disorder") is not None and fields.get("nu") is not None:
            base = default_grid(fields["nu"], fields["disorder"], grid_n or 513)
            a = base.a if grid_a is None else grid_a
            b = base.b if grid_b is None else grid_b
            if not a < b:
                p.errors.append(f"key 'grid.a' violates grid.a < grid.b: got [{a}, {b}]")
            elif grid_n is not None:
                fields["grid"] = LambdaGrid(a, b, grid_n)

    if command == "surface-functional":
        fields["g_center"] = p.get_float("g.center")
        fields["g_width"] = p.get_float(
            "g.width", invariant="g.width > 0", check=lambda v: v > 0
        )
        grid = fields.get("grid")
        center, width = fields["g_center"], fields["g_width"]
        if grid is not None and center is not None and width is not None:
            if center - width < grid.a or center + width > grid.b:
                p.errors.append(
                    "g support must lie inside the grid window: "
                    f"[{center - width}, {center + width}] vs [{grid.a}, {grid.b}]"
                )

    if command == "scaling-study":
        fields["p"] = p.get_float("p", invariant="p > 0", check=lambda v: v > 0)
        fields["k"] = p.get_int("k", invariant="k >= 1", check=lambda v: v >= 1)
        fields["c"] = p.get_float("c")

    if p.errors:
        raise ConfigError(p.errors)
    return ExperimentConfig(command, pairs, **fields)


def _fmt(value) -> str:
    if isinstance(value, bool) or isinstance(value, np.bool_):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _fmt_context(context: dict) -> str:
    return ";".join(f"{k}={_fmt(v)}" for k, v in sorted(context.items()))


def _write_csv(path: str, header: tuple[str, ...], rows) -> None:
    tmp = f"{path}.tmp.{os.getpid()}"
    try:
        with open(tmp, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_manifest(config: ExperimentConfig) -> None:
    _write_csv(
        f"{config.out}.manifest.csv",
        ("config_hash", "master_seed", "version"),
        [(config.config_hash(), _fmt(config.master_seed), __version__)],
    )


def run(config: ExperimentConfig, workers: int = 1) -> int:
    """Execute a parsed config; writes the CSV and its manifest atomically.

    Returns the process exit code: 0, or 2 when a check-bounds sweep found a
    violated bound (the CSV is still written with holds=false rows).
    """
    command = config.command
    rows: list[tuple] = []
    status = 0

    if command == "surface-density":
        geom = SurfaceGeometry.with_defaults(
            config.nu, config.nu1, config.L, config.W, config.P, config.boundary
        )
        res = estimate_surface_density(
            geom, config.disorder, config.grid, config.realizations,
            config.master_seed, workers,
        )
        for lam, mean, var in zip(config.grid.points, res.mean, res.variance):
            rows.append(
                (_fmt(lam), _fmt(mean), _fmt(var), _fmt(config.realizations),
                 _fmt(geom.L), _fmt(geom.W), _fmt(geom.P))
            )

    elif command == "surface-functional":
        geoms = [
            SurfaceGeometry.with_defaults(
                config.nu, config.nu1, L, config.W, config.P, config.boundary
            )
            for L in config.L_list
        ]
        g = bump_function(config.g_center, config.g_width)
        for est in estimate_surface_functional(
            geoms, config.disorder, g, config.realizations, config.master_seed, workers
        ):
            rows.append(
                (_fmt(est.L), _fmt(est.mu), _fmt(est.mu_plus),
                 _fmt(est.mu_minus), _fmt(est.stderr))
            )

    elif command == "bulk-ids":
        box = bulk_box(config.nu, config.L, config.boundary)
        res = estimate_bulk_ids(
            box, config.disorder, config.grid, config.realizations,
            config.master_seed, workers,
        )
        for lam, mean, var in zip(config.grid.points, res.mean, res.variance):
            rows.append(
                (_fmt(lam), _fmt(mean), _fmt(var),
                 _fmt(config.realizations), _fmt(config.L))
            )

    elif command == "check-bounds":
        reports = standard_sweep(
            config.master_seed,
            instances=config.realizations,
            averaging_instances=config.realizations,
            workers=workers,
        )
        for rep in reports:
            rows.append(
                (rep.name, _fmt(rep.lhs), _fmt(rep.rhs), _fmt(rep.holds),
                 _fmt(rep.slack), _fmt_context(rep.context))
            )
        if not all(rep.holds for rep in reports):
            status = 2

    elif command == "scaling-study":
        geoms = [
            SurfaceGeometry.with_defaults(
                config.nu, config.nu1, L, config.W, config.P, config.boundary
            )
            for L in config.L_list
        ]
        study = resolvent_scaling_study(
            geoms, config.disorder, config.p, config.k, config.c,
            config.realizations, config.master_seed, workers,
        )
        for row in study.rows:
            rows.append(
                (_fmt(row.L), _fmt(study.p), _fmt(study.k),
                 _fmt(row.mean_qnorm_p), _fmt(study.fit_slope))
            )

    _write_csv(config.out, _SCHEMAS[command], rows)
    _write_manifest(config)
    return status


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; keep 2 reserved for margin errors."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"config error: {message}", file=sys.stderr)
        raise SystemExit(1)


def main(argv=None) -> int:
    parser = _ArgumentParser(
        prog="ssf-lab",
        description="Spectral shift function laboratory for discrete surface models",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to a key = value config file")
    parser.add_argument("--seed", type=int, default=None, help="override config master_seed")
    parser.add_argument("--out", default=None, help="override config output path")
    parser.add_argument(
        "--workers", type=int, default=1, help="worker threads (never affects output bytes)"
    )
    args = parser.parse_args(argv)

    try:
        with open(args.config) as fh:
            text = fh.read()
    except OSError as exc:
        print(f"config error: cannot read {args.config}: {exc}", file=sys.stderr)
        return 1

    try:
        config = parse_config(args.command, text, args.seed, args.out)
    except ConfigError as exc:
        for err in exc.errors:
            print(f"config error: {err}", file=sys.stderr)
        return 1

    try:
        return run(config, max(1, args.workers))
    except MarginError as exc:
        print(f"numerical margin error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
