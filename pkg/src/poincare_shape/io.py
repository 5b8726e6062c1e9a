"""Text file formats: surfaces, circle coefficients, deformation lists, run configs, CSV and JSON output.

All input files are YAML. A surface file looks like

    grid: [64, 64]          # optional, even, >= 16
    delta_axis: 0.1         # optional
    modes:
      - {m: 1, n: 0, cos: [2.0, 0.0, 0.0], sin: [0.0, 2.0, 0.0]}
      - {m: 0, n: 1, sin: [0.0, 0.0, 1.0]}

where each entry adds cos(...) * cos + sin(...) * sin with argument 2 pi (m phi + n theta).
"""
from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np
import yaml

from .errors import ConfigError
from .surface import FourierSurface, build_surface

OUTPUT_ENV = "POINCARE_SHAPE_OUTPUT"
DEFAULT_OUTPUT = "poincare_shape_out"


def _load_yaml(path: str | os.PathLike) -> Any:
    try:
        with open(path) as fh:
            return yaml.safe_load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"{path}: file not found") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: not valid YAML ({exc})") from exc


def _vec3(val, where: str) -> np.ndarray:
    try:
        arr = np.asarray(val, dtype=float)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: expected three numbers") from exc
    if arr.shape != (3,):
        raise ConfigError(f"{where}: expected three numbers, got {val!r}")
    return arr


def parse_surface(doc: Any, where: str = "surface") -> tuple[dict, tuple[int, int] | None, float | None]:
    if not isinstance(doc, Mapping) or "modes" not in doc:
        raise ConfigError(f"{where}: expected a mapping with a 'modes' list")
    modes = doc["modes"]
    if not isinstance(modes, list) or not modes:
        raise ConfigError(f"{where}: 'modes' must be a non-empty list")
    coeffs: dict[tuple[int, int], np.ndarray] = {}
    for i, entry in enumerate(modes):
        w = f"{where}: modes[{i}]"
        if not isinstance(entry, Mapping) or "m" not in entry or "n" not in entry:
            raise ConfigError(f"{w}: needs integer keys 'm' and 'n'")
        unknown = set(entry) - {"m", "n", "cos", "sin"}
        if unknown:
            raise ConfigError(f"{w}: unknown keys {sorted(unknown)}")
        try:
            m, n = int(entry["m"]), int(entry["n"])
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"{w}: 'm' and 'n' must be integers") from exc
        cs = np.stack([_vec3(entry.get("cos", [0, 0, 0]), w + ".cos"), _vec3(entry.get("sin", [0, 0, 0]), w + ".sin")])
        coeffs[(m, n)] = coeffs.get((m, n), np.zeros((2, 3))) + cs
    grid = doc.get("grid")
    if grid is not None:
        if isinstance(grid, int):
            grid = (grid, grid)
        try:
            grid = (int(grid[0]), int(grid[1]))
        except (TypeError, ValueError, IndexError) as exc:
            raise ConfigError(f"{where}: 'grid' must be an integer or a pair") from exc
    delta = doc.get("delta_axis")
    return coeffs, grid, (None if delta is None else float(delta))


def load_surface(path: str | os.PathLike, grid: int | tuple[int, int] | None = None) -> FourierSurface:
    coeffs, file_grid, delta = parse_surface(_load_yaml(path), str(path))
    g = grid if grid is not None else (file_grid or (64, 64))
    return build_surface(coeffs, g, delta_axis=delta)


def surface_document(surface: FourierSurface, tol: float = 0.0) -> dict:
    scale = max(np.abs(cs).max() for cs in surface.coeffs.values())
    modes = []
    for (m, n), cs in sorted(surface.coeffs.items()):
        if np.abs(cs).max() <= tol * scale:
            continue
        modes.append({"m": m, "n": n, "cos": [float(x) for x in cs[0]], "sin": [float(x) for x in cs[1]]})
    return {"grid": list(surface.grid_size), "modes": modes}


def save_surface(surface: FourierSurface, path: str | os.PathLike, tol: float = 1e-15) -> None:
    with open(path, "w") as fh:
        yaml.safe_dump(surface_document(surface, tol), fh, default_flow_style=None, sort_keys=False)


def load_circle_coeffs(path: str | os.PathLike) -> tuple[np.ndarray, float | None]:
    """Read mu(theta) = sum_n a_n cos 2pi n theta + b_n sin 2pi n theta (n >= 1).

    File layout: ``{omega: 0.618..., modes: [{n: 1, cos: 1.0, sin: 0.0}, ...]}``; omega is optional.
    Returns centred complex coefficients and omega.
    """
    doc = _load_yaml(path)
    if not isinstance(doc, Mapping) or "modes" not in doc:
        raise ConfigError(f"{path}: expected a mapping with a 'modes' list")
    entries = doc["modes"]
    try:
        ns = [int(e["n"]) for e in entries]
    except (TypeError, KeyError, ValueError) as exc:
        raise ConfigError(f"{path}: every mode needs an integer 'n'") from exc
    if any(n < 1 for n in ns):
        raise ConfigError(f"{path}: mode numbers must be >= 1 (mu has zero average)")
    N = max(ns)
    mu = np.zeros(2 * N + 1, dtype=complex)
    for e, n in zip(entries, ns):
        a, b = float(e.get("cos", 0.0)), float(e.get("sin", 0.0))
        mu[N + n] += 0.5 * (a - 1j * b)
        mu[N - n] += 0.5 * (a + 1j * b)
    omega = doc.get("omega")
    return mu, (None if omega is None else float(omega))


def load_deformations(path: str | os.PathLike) -> list[dict]:
    """A YAML list of deformation specs, or a mapping with a 'deformations' list."""
    doc = _load_yaml(path)
    if isinstance(doc, Mapping) and "deformations" in doc:
        doc = doc["deformations"]
    if isinstance(doc, Mapping):
        doc = [doc]
    if not isinstance(doc, list) or not all(isinstance(d, Mapping) for d in doc):
        raise ConfigError(f"{path}: expected a list of deformation specs")
    return [dict(d) for d in doc]


@dataclass
class RunConfig:
    surface: str | None = None
    grid: int | None = None
    solver_tol: float = 1e-10
    rtol: float = 1e-11
    atol: float = 1e-13
    deformations: list[dict] = field(default_factory=list)
    t_list: tuple[float, ...] = (4e-3, 2e-3, 1e-3)
    output_dir: str = field(default_factory=lambda: os.environ.get(OUTPUT_ENV, DEFAULT_OUTPUT))
    seed: int = 0
    workers: int = 1

    def validate(self) -> "RunConfig":
        for name in ("solver_tol", "rtol", "atol"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be positive")
        if self.grid is not None and (self.grid < 16 or self.grid % 2):
            raise ConfigError("grid must be an even integer >= 16")
        if len(self.t_list) < 3 or any(t <= 0 for t in self.t_list):
            raise ConfigError("t_list needs at least three positive step sizes")
        if self.workers < 1:
            raise ConfigError("workers must be at least 1")
        return self

    @classmethod
    def from_file(cls, path: str | os.PathLike) -> "RunConfig":
        doc = _load_yaml(path) or {}
        if not isinstance(doc, Mapping):
            raise ConfigError(f"{path}: expected a mapping")
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"{path}: unknown keys {sorted(unknown)}")
        doc = dict(doc)
        if "t_list" in doc:
            doc["t_list"] = tuple(float(t) for t in doc["t_list"])
        return cls(**doc)


def fmt(x) -> str:
    return format(float(x), ".17g")


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[float]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating, int, np.integer)) else v for v in row])
    return path


def _jsonable(obj):
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, Mapping):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    return obj


def write_json(path: Path, doc: Mapping) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(_jsonable(doc), fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def schema_path() -> Path:
    return Path(__file__).with_name("schemas") / "summary.schema.json"
