"""Command-line front end.

    stgneiting simulate --config run.toml [--seed N] [--out DIR] [--format csv|raw]
    stgneiting validate --config run.toml | --model fig3
    stgneiting oracle   [--draws N]
    stgneiting dimple   --model fig3 --h 10 10

Exit codes: 0 success, 1 a statistical check failed, 2 configuration error,
3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import catalog, oracles
from .io import ConfigError, RunConfig, load_config, write_field, write_manifest
from .model import GridSpec
from .rng import realization_seed
from .simulation import Method, simulate_field
from .validation import (
    VariogramProtocol, detect_dimple, format_comparisons, run_variogram_protocol, write_comparison_csv,
)
from .variograms import ParameterError

EXIT_OK, EXIT_CHECK_FAILED, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 1, 2, 3, 4


@dataclass
class RunResult:
    files: list[Path]
    manifest: Path


def run(config: RunConfig, threads: int | None = None) -> RunResult:
    """Simulate every realization of ``config`` and write fields plus a manifest.

    Realization ``i`` uses seed ``realization_seed(config.seed, i)``, so the
    output does not depend on ``threads``.
    """
    points = config.point_set()
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    ext = ".csv" if config.format == "csv" else ".f64"

    def one(i):
        fld = simulate_field(config.model, config.method, config.p, points,
                             realization_seed(config.seed, i), config.instants, config.eps)
        fld.provenance.update(realization=i, master_seed=config.seed)
        return fld

    files: list[Path] = []
    n_threads = max(1, threads or config.threads)
    with ThreadPoolExecutor(max_workers=n_threads) as pool:
        # single writer: fields are written in order by this thread
        for i, fld in enumerate(pool.map(one, range(config.n_realizations))):
            files += write_field(fld, out / f"{config.prefix}_{i:04d}{ext}", config.format)
    return RunResult(files, write_manifest(out, config, files))


def _apply_overrides(config: RunConfig, args) -> RunConfig:
    changes = {}
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    if getattr(args, "out", None) is not None:
        changes["out_dir"] = args.out
    if getattr(args, "format", None) is not None:
        changes["format"] = args.format
    if getattr(args, "realizations", None) is not None:
        changes["n_realizations"] = args.realizations
    if getattr(args, "threads", None) is not None:
        changes["threads"] = args.threads
    errors = []
    if changes.get("n_realizations", 1) < 1:
        errors.append("--realizations must be >= 1")
    if changes.get("threads", 1) < 1:
        errors.append("--threads must be >= 1")
    if not 0 <= changes.get("seed", 0) < 2 ** 64:
        errors.append("--seed must fit in 64 unsigned bits")
    if errors:
        raise ConfigError(errors)
    return dataclasses.replace(config, **changes)


def _common(p: argparse.ArgumentParser, config_required: bool):
    p.add_argument("--config", required=config_required, help="TOML run configuration")
    p.add_argument("--seed", type=int, help="master seed (overrides the config)")
    p.add_argument("--out", help="output directory")
    p.add_argument("--format", choices=("csv", "raw"))
    p.add_argument("--threads", type=int, help="worker threads")
    p.add_argument("--realizations", type=int, help="number of realizations")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="stgneiting", description="Space-time Gneiting random fields")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="simulate fields and write them to disk")
    _common(sim, config_required=True)

    val = sub.add_parser("validate", help="empirical variograms against theory")
    _common(val, config_required=False)
    val.add_argument("--model", help="catalog model instead of the config's")
    val.add_argument("--method", choices=[m.value for m in Method])
    val.add_argument("--p", type=int)

    orc = sub.add_parser("oracle", help="transform-oracle suites for the samplers")
    orc.add_argument("--draws", type=int, default=100_000)
    orc.add_argument("--seed", type=int, default=0)
    orc.add_argument("--out", help="directory for the text report")

    dim = sub.add_parser("dimple", help="scan u -> C(h, u) for a hole effect")
    dim.add_argument("--config")
    dim.add_argument("--model", help="catalog model name")
    dim.add_argument("--h", type=float, nargs="+", required=True)
    dim.add_argument("--u-max", type=float, default=5.0)
    dim.add_argument("--u-step", type=float, default=0.01)
    return parser


def _cmd_simulate(args) -> int:
    config = _apply_overrides(load_config(args.config), args)
    res = run(config)
    print(f"wrote {len(res.files)} files and {res.manifest}")
    return EXIT_OK


_VALIDATION_GRID = GridSpec((0.0, 0.0), (1.0, 1.0), (60, 60), 0.0, 0.2, 50)


def _cmd_validate(args) -> int:
    if args.config:
        config = _apply_overrides(load_config(args.config), args)
        model, method, p, seed = config.model, config.method, config.p, config.seed
        grid = config.grid or _VALIDATION_GRID
        n = config.n_realizations if args.realizations is None else args.realizations
        out = Path(config.out_dir) if args.out is None else Path(args.out)
    else:
        if not args.model:
            raise ConfigError(["validate: give --config or --model"])
        model = catalog.get_model(args.model)
        method, p, seed, grid = Method.SPECTRAL, 2000, args.seed or 0, _VALIDATION_GRID
        n = args.realizations or 50
        out = Path(args.out) if args.out else None
    if args.model and args.config:
        model = catalog.get_model(args.model)
    if args.method:
        method = Method(args.method)
    if args.p:
        p = args.p
    if n < 2:
        raise ConfigError(["validate: needs at least 2 realizations"])
    res = run_variogram_protocol(model, method, p, grid, n, seed, VariogramProtocol())
    text = f"model: {model.describe()}\nmethod: {method.value}, p={p}, realizations={n}\n"
    text += format_comparisons(res.comparisons)
    print(text, end="")
    if out is not None:
        out.mkdir(parents=True, exist_ok=True)
        write_comparison_csv(out / f"variogram_{method.value}.csv", res.comparisons)
        (out / f"variogram_{method.value}.txt").write_text(text)
    return EXIT_OK if res.passed else EXIT_CHECK_FAILED


def _cmd_oracle(args) -> int:
    cases = oracles.full_suite(args.draws, args.seed)
    text = oracles.summarize(cases)
    print(text, end="")
    if args.out:
        Path(args.out).mkdir(parents=True, exist_ok=True)
        (Path(args.out) / "oracles.txt").write_text(text)
    return EXIT_OK if oracles.suite_passed(cases) else EXIT_CHECK_FAILED


def _cmd_dimple(args) -> int:
    if args.model:
        model = catalog.get_model(args.model)
    elif args.config:
        model = load_config(args.config).model
    else:
        raise ConfigError(["dimple: give --config or --model"])
    if len(args.h) != model.k:
        raise ConfigError([f"dimple: --h needs {model.k} values"])
    u = np.arange(0.0, args.u_max + 0.5 * args.u_step, args.u_step)
    rep = detect_dimple(model, args.h, u)
    print(f"h={args.h} has_dimple={str(rep.has_dimple).lower()} argmax_u={rep.argmax_u:g} "
          f"C(h,0)={rep.c_at_zero:.6g} max C={rep.c_max:.6g}")
    return EXIT_OK


_COMMANDS = {"simulate": _cmd_simulate, "validate": _cmd_validate, "oracle": _cmd_oracle,
             "dimple": _cmd_dimple}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ParameterError, KeyError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) else str(exc)
        print(f"configuration error: {msg}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
