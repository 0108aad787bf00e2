"""Run configuration (TOML), field files and run manifests."""

from __future__ import annotations

import csv
import hashlib
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .fields import FieldRealization
from .model import GneitingModel, GridSpec, MixtureMeasure, SpaceTimePointSet
from .simulation import Method
from .spectral import DEFAULT_EPS
from .substitution import INSTANT_TOL
from .variograms import Family, ParameterError, TABLE, VariogramSpec


class ConfigError(ValueError):
    """Invalid run configuration; ``errors`` names every offending field."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n  " + "\n  ".join(self.errors))


FORMATS = ("csv", "raw")


@dataclass(frozen=True)
class RunConfig:
    model: GneitingModel
    method: Method = Method.SPECTRAL
    p: int = 5000
    seed: int = 0
    eps: float = DEFAULT_EPS
    n_realizations: int = 1
    grid: GridSpec | None = None
    points: SpaceTimePointSet | None = field(default=None, compare=False)
    instants: tuple[float, ...] | None = None
    out_dir: str = "out"
    format: str = "raw"
    prefix: str = "field"
    threads: int = 1

    def point_set(self) -> SpaceTimePointSet:
        return SpaceTimePointSet.from_grid(self.grid) if self.grid is not None else self.points

    def to_dict(self) -> dict:
        d = {
            "model": self.model.to_dict(),
            "simulation": {"method": self.method.value, "p": self.p, "seed": self.seed, "eps": self.eps,
                           "realizations": self.n_realizations},
            "output": {"format": self.format, "prefix": self.prefix},
        }
        if self.instants is not None:
            d["simulation"]["instants"] = list(self.instants)
        if self.grid is not None:
            d["grid"] = self.grid.to_dict()
        else:
            d["points"] = {"n": self.points.n}
        return d


# ------------------------------------------------------------------ parsing

def _take(section: dict, key: str, kind, errors: list, where: str, default=None, required=False):
    if key not in section:
        if required:
            errors.append(f"{where}.{key}: missing")
        return default
    v = section[key]
    try:
        if kind is int:
            if isinstance(v, bool) or not float(v).is_integer():
                raise TypeError
            return int(v)
        if kind is float:
            if isinstance(v, bool):
                raise TypeError
            return float(v)
        if kind is str:
            if not isinstance(v, str):
                raise TypeError
            return v
        if kind is list:
            if not isinstance(v, list):
                raise TypeError
            return v
    except (TypeError, ValueError):
        pass
    errors.append(f"{where}.{key}: expected {kind.__name__}, got {v!r}")
    return default


def _unknown(section: dict, allowed, where: str, errors: list):
    for key in sorted(set(section) - set(allowed)):
        errors.append(f"{where}.{key}: unknown key")


def _parse_mixture(sec: dict, errors: list) -> MixtureMeasure | None:
    kind = _take(sec, "kind", str, errors, "mixture", required=True)
    try:
        if kind == "dirac":
            _unknown(sec, ("kind", "r"), "mixture", errors)
            r = _take(sec, "r", float, errors, "mixture", required=True)
            return None if r is None else MixtureMeasure("dirac", r=r)
        if kind == "sqrt_gamma_half":
            _unknown(sec, ("kind", "c"), "mixture", errors)
            c = _take(sec, "c", float, errors, "mixture", required=True)
            return None if c is None else MixtureMeasure("sqrt_gamma_half", c=c)
        if kind == "tabulated":
            _unknown(sec, ("kind", "atoms"), "mixture", errors)
            atoms = _take(sec, "atoms", list, errors, "mixture", required=True)
            if atoms is None:
                return None
            if not all(isinstance(a, list) and len(a) == 2 for a in atoms):
                errors.append("mixture.atoms: expected a list of [r, weight] pairs")
                return None
            return MixtureMeasure.tabulated(atoms)
    except ParameterError as exc:
        errors.extend(exc.errors)
        return None
    if kind is not None:
        errors.append(f"mixture.kind: unknown kind {kind!r}; choose from ['dirac', 'sqrt_gamma_half', 'tabulated']")
    return None


def _parse_variogram(sec: dict, errors: list) -> VariogramSpec | None:
    fam = _take(sec, "family", str, errors, "variogram", required=True)
    if fam is None:
        return None
    try:
        family = Family(fam)
    except ValueError:
        errors.append(f"variogram.family: unknown family {fam!r}; choose from {[f.value for f in Family]}")
        return None
    params = {k: v for k, v in sec.items() if k not in ("family", "strategy", "id")}
    strategy = _take(sec, "strategy", str, errors, "variogram")
    entry = None
    if family is Family.TABLE_ENTRY:
        entry = _take(sec, "id", str, errors, "variogram", required=True)
        if entry is not None and entry not in TABLE:
            errors.append(f"variogram.id: unknown table entry {entry!r}; choose from {sorted(TABLE)}")
            return None
    elif "id" in sec:
        errors.append("variogram.id: only valid with family = 'table_entry'")
    try:
        return VariogramSpec(family, tuple(params.items()), entry, strategy)
    except ParameterError as exc:
        errors.extend(exc.errors)
    except ValueError:
        errors.append(f"variogram.strategy: unknown strategy {strategy!r}")
    return None


def _parse_grid(sec: dict, k: int | None, errors: list) -> GridSpec | None:
    _unknown(sec, ("origin", "mesh", "shape", "t_origin", "t_mesh", "t_count"), "grid", errors)
    n_err = len(errors)
    shape = _take(sec, "shape", list, errors, "grid", required=True)
    origin = _take(sec, "origin", list, errors, "grid", default=None)
    mesh = _take(sec, "mesh", list, errors, "grid", default=None)
    t_origin = _take(sec, "t_origin", float, errors, "grid", default=0.0)
    t_mesh = _take(sec, "t_mesh", float, errors, "grid", default=1.0)
    t_count = _take(sec, "t_count", int, errors, "grid", default=1)
    if len(errors) > n_err or shape is None:
        return None
    origin = origin if origin is not None else [0.0] * len(shape)
    mesh = mesh if mesh is not None else [1.0] * len(shape)
    if k is not None and len(shape) != k:
        errors.append(f"grid.shape: has {len(shape)} axes, model.k={k}")
        return None
    try:
        return GridSpec(tuple(float(v) for v in origin), tuple(float(v) for v in mesh),
                        tuple(int(v) for v in shape), t_origin, t_mesh, t_count)
    except (TypeError, ValueError) as exc:
        errors.append(f"grid: {exc}")
        return None


def _parse_points(sec: dict, k: int | None, errors: list) -> SpaceTimePointSet | None:
    _unknown(sec, ("coords",), "points", errors)
    coords = _take(sec, "coords", list, errors, "points", required=True)
    if coords is None:
        return None
    try:
        arr = np.asarray(coords, dtype=float)
    except (TypeError, ValueError):
        errors.append("points.coords: expected rows of numbers [x1, ..., xk, t]")
        return None
    if arr.ndim != 2 or arr.shape[0] < 1 or (k is not None and arr.shape[1] != k + 1):
        errors.append(f"points.coords: expected rows of length k+1 = {None if k is None else k + 1}")
        return None
    return SpaceTimePointSet(arr[:, :-1], arr[:, -1])


def parse_config(text: str) -> RunConfig:
    """Parse and validate a TOML run configuration.

    Every problem is collected before raising, so one :class:`ConfigError`
    lists all offending fields.
    """
    try:
        raw = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError([f"syntax: {exc}"]) from None
    errors: list[str] = []
    _unknown(raw, ("model", "simulation", "grid", "points", "output"), "config", errors)

    msec = raw.get("model", {})
    if "model" not in raw:
        errors.append("model: missing section")
    _unknown(msec, ("k", "mixture", "variogram"), "model", errors)
    k = _take(msec, "k", int, errors, "model", required="model" in raw)
    if k is not None and k < 1:
        errors.append(f"model.k={k} must be a positive integer")
        k = None
    mix = _parse_mixture(msec["mixture"], errors) if "mixture" in msec else None
    if "model" in raw and "mixture" not in msec:
        errors.append("model.mixture: missing section")
    var = _parse_variogram(msec["variogram"], errors) if "variogram" in msec else None
    if "model" in raw and "variogram" not in msec:
        errors.append("model.variogram: missing section")

    ssec = raw.get("simulation", {})
    _unknown(ssec, ("method", "p", "seed", "eps", "realizations", "instants"), "simulation", errors)
    method_name = _take(ssec, "method", str, errors, "simulation", default="spectral")
    try:
        method = Method(method_name)
    except ValueError:
        errors.append(f"simulation.method: unknown method {method_name!r}; choose from ['spectral', 'substitution']")
        method = None
    p = _take(ssec, "p", int, errors, "simulation", default=5000)
    if p is not None and p < 1:
        errors.append(f"simulation.p={p} must be >= 1")
    seed = _take(ssec, "seed", int, errors, "simulation", default=0)
    if seed is not None and not 0 <= seed < 2 ** 64:
        errors.append(f"simulation.seed={seed} must fit in 64 unsigned bits")
    eps = _take(ssec, "eps", float, errors, "simulation", default=DEFAULT_EPS)
    if eps is not None and not 0 < eps < 1:
        errors.append(f"simulation.eps={eps:g} outside legal range (0, 1)")
    nreal = _take(ssec, "realizations", int, errors, "simulation", default=1)
    if nreal is not None and nreal < 1:
        errors.append(f"simulation.realizations={nreal} must be >= 1")
    instants = _take(ssec, "instants", list, errors, "simulation")
    if instants is not None:
        try:
            instants = tuple(float(v) for v in instants)
        except (TypeError, ValueError):
            errors.append("simulation.instants: expected a list of numbers")
            instants = None
        else:
            s = sorted(instants)
            if not instants or any(b - a <= INSTANT_TOL for a, b in zip(s, s[1:])):
                errors.append("simulation.instants: must be a non-empty list of distinct times")
            elif not all(math.isfinite(v) for v in s):
                errors.append("simulation.instants: must be finite")

    grid = points = None
    if "grid" in raw and "points" in raw:
        errors.append("config: give either [grid] or [points], not both")
    elif "grid" in raw:
        grid = _parse_grid(raw["grid"], k, errors)
    elif "points" in raw:
        points = _parse_points(raw["points"], k, errors)
    else:
        errors.append("config: a [grid] or [points] section is required")

    osec = raw.get("output", {})
    _unknown(osec, ("dir", "format", "prefix"), "output", errors)
    out_dir = _take(osec, "dir", str, errors, "output", default="out")
    fmt = _take(osec, "format", str, errors, "output", default="raw")
    if fmt is not None and fmt not in FORMATS:
        errors.append(f"output.format: {fmt!r} not one of {list(FORMATS)}")
    prefix = _take(osec, "prefix", str, errors, "output", default="field")

    if mix is not None and method is Method.SPECTRAL and mix.has_atom_at_zero():
        errors.append("model.mixture: has an atom at r = 0, which the spectral method cannot simulate; "
                      "use method = 'substitution'")
    if method is Method.SUBSTITUTION:
        if instants is None:
            errors.append("simulation.instants: required when method = 'substitution'")
        else:
            times = grid.times() if grid is not None else (points.times if points is not None else [])
            inst = np.sort(np.asarray(instants))
            missing = [t for t in np.unique(times) if np.min(np.abs(inst - t)) > INSTANT_TOL]
            if missing:
                errors.append(f"simulation.instants: point times {missing[:5]} are not among the instants")

    if errors:
        raise ConfigError(errors)
    model = GneitingModel(k, mix, var)
    return RunConfig(model, method, p, seed, eps, nreal, grid, points, instants, out_dir, fmt, prefix)


def load_config(path) -> RunConfig:
    return parse_config(Path(path).read_text())


# ------------------------------------------------------------------ writing

def write_field(field: FieldRealization, path, fmt: str = "raw") -> list[Path]:
    """Write ``field`` as csv or raw float64; returns the files written.

    ``path`` is the target file; a raw field also gets ``<path>.json``.
    """
    path = Path(path)
    pts = field.points
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow([f"x{i + 1}" for i in range(pts.k)] + ["t", "value"])
            for xs, t, v in zip(pts.spatial, pts.times, field.values):
                w.writerow([f"{c:.17g}" for c in xs] + [f"{t:.17g}", f"{v:.17g}"])
        return [path]
    if fmt != "raw":
        raise ValueError(f"unknown format {fmt!r}")
    path.write_bytes(np.ascontiguousarray(field.values, dtype="<f8").tobytes())
    sidecar = {
        "format": "raw",
        "dtype": "float64",
        "byte_order": "little",
        "n": pts.n,
        "k": pts.k,
        "order": "time-major, last spatial axis fastest" if pts.grid is not None else "point list",
        "grid": pts.grid.to_dict() if pts.grid is not None else None,
        "provenance": _jsonable(field.provenance),
    }
    if pts.grid is None:
        sidecar["points"] = np.column_stack([pts.spatial, pts.times]).tolist()
    side = path.with_name(path.name + ".json")
    side.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return [path, side]


def read_raw(path) -> tuple[np.ndarray, dict]:
    path = Path(path)
    meta = json.loads(path.with_name(path.name + ".json").read_text())
    values = np.frombuffer(path.read_bytes(), dtype="<f8").astype(float)
    if values.size != meta["n"]:
        raise ValueError(f"{path}: {values.size} values, sidecar says {meta['n']}")
    return values, meta


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(1 << 20), b""):
            h.update(block)
    return h.hexdigest()


def write_manifest(out_dir, config: RunConfig, files) -> Path:
    """Manifest of a run: the normalized config and a checksum per file (no timestamps)."""
    out_dir = Path(out_dir)
    entry = {
        "config": _jsonable(config.to_dict()),
        "model_hash": config.model.digest(),
        "files": [{"name": Path(f).name, "sha256": sha256_file(f)} for f in files],
    }
    path = out_dir / "manifest.json"
    path.write_text(json.dumps(entry, indent=2, sort_keys=True) + "\n")
    return path
