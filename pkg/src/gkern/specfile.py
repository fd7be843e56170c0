"""Kernel-spec files: a small JSON dialect declaring factors and kernels.

A spec file pins everything a run needs: the two factors (sphere
dimension or abelian grid parameters), the kernel (a named family with
parameters, or a sample tensor by file reference), the expansion
truncation, tolerances and the probe seed.  Unknown fields anywhere in
the document are rejected before any computation starts.
"""

import json
import math
import os
from dataclasses import dataclass, replace

import numpy as np

from .abelian import CIRCLE, CYCLIC, REAL_LINE, AbelianGrid, SampledFunction
from .products import SpectralFamily
from .schoenberg import KernelField
from .settings import DEFAULT, NumericSettings
from .special import SphereBasis

__all__ = ["SpecError", "KernelSpec", "load_spec"]


class SpecError(ValueError):
    """Spec-file validation failure; the message names the offending field."""


def _require_keys(obj: dict, allowed: set, required: set, where: str) -> None:
    if not isinstance(obj, dict):
        raise SpecError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise SpecError(f"{where}: unknown field '{sorted(unknown)[0]}'")
    missing = required - set(obj)
    if missing:
        raise SpecError(f"{where}: missing field '{sorted(missing)[0]}'")


_FACTOR_KEYS = {
    "sphere": ({"kind", "d"}, {"d"}),
    "cyclic": ({"kind", "n"}, {"n"}),
    "circle": ({"kind", "n"}, {"n"}),
    "real_line": ({"kind", "step", "half_width"}, {"step", "half_width"}),
}

_FAMILY_KEYS = {
    "separable-gaussian": {"family", "first_scale", "second_scale"},
    "gneiting-cm": {"family", "atoms", "second_scale"},
    "polynomial-in-x": {"family", "coefficients", "table"},
    "samples": {"family", "path"},
    "spectral-family": {"family", "entries"},
}

_COMPONENT_KEYS = {
    "gaussian": ({"type", "scale"}, {"scale"}),
    "character": ({"type", "freq"}, {"freq"}),
    "const": ({"type", "value"}, {"value"}),
    "csv": ({"type", "path"}, {"path"}),
}


@dataclass
class KernelSpec:
    """Validated contents of a kernel-spec file."""

    factors: dict
    kernel: dict
    truncation: int
    settings: NumericSettings
    seed: int
    base_dir: str

    # -- factor construction -------------------------------------------------

    def build_factor(self, which: str):
        decl = self.factors.get(which)
        if decl is None:
            return None
        kind = decl["kind"]
        if kind == "sphere":
            return SphereBasis.create(decl["d"], self.truncation)
        if kind == "cyclic":
            return AbelianGrid.cyclic(decl["n"])
        if kind == "circle":
            return AbelianGrid.circle(decl["n"])
        return AbelianGrid.real_line(decl["step"], decl["half_width"])

    # -- kernel construction --------------------------------------------------

    def build_field(self) -> KernelField:
        first = self.build_factor("first")
        second = self.build_factor("second")
        family = self.kernel["family"]
        if family == "spectral-family":
            raise SpecError("kernel: spectral-family builds a synthesis input, "
                            "use build_spectral_family")
        builder = {
            "separable-gaussian": self._separable_gaussian,
            "gneiting-cm": self._gneiting_cm,
            "polynomial-in-x": self._polynomial,
            "samples": self._samples,
        }[family]
        return builder(first, second)

    def build_spectral_family(self) -> SpectralFamily:
        first = self.build_factor("first")
        second = self.build_factor("second")
        if not isinstance(second, AbelianGrid):
            raise SpecError("factors.second: spectral-family needs an abelian "
                            "second factor")
        entries = self.kernel["entries"]
        count = (first.max_degree + 1 if isinstance(first, SphereBasis)
                 else first.size)
        if len(entries) > count:
            raise SpecError(f"kernel.entries: at most {count} entries for this "
                            f"first factor, got {len(entries)}")
        table = np.zeros((count, second.size), dtype=complex)
        for i, entry in enumerate(entries):
            if entry is None:
                continue
            table[i] = self._component_values(entry, second, f"kernel.entries[{i}]")
        return SpectralFamily(first, second, table)

    def _gaussian_factor(self, factor, scale: float):
        if isinstance(factor, SphereBasis):
            return lambda x: np.exp(scale * (x - 1.0))
        if factor.kind == REAL_LINE:
            return lambda u: np.exp(-(u / scale) ** 2 / 2.0)
        if factor.kind == CIRCLE:
            return lambda u: np.exp(scale * (np.cos(u) - 1.0))
        n = factor.size
        return lambda u: np.exp(scale * (np.cos(2.0 * np.pi * u / n) - 1.0))

    def _separable_gaussian(self, first, second) -> KernelField:
        g1 = self._gaussian_factor(first, float(self.kernel.get("first_scale", 1.0)))
        if second is None:
            return KernelField(first, fn=g1)
        g2 = self._gaussian_factor(second, float(self.kernel.get("second_scale", 1.0)))
        return KernelField(first, second, fn=lambda x, u: g1(x) * g2(u))

    def _gneiting_cm(self, first, second) -> KernelField:
        if not isinstance(first, SphereBasis):
            raise SpecError("kernel: gneiting-cm needs a spherical first factor")
        atoms = self.kernel["atoms"]
        def rho(x):
            theta = np.arccos(np.clip(x, -1.0, 1.0))
            return sum(w * np.exp(-a * theta) for a, w in atoms)
        if second is None:
            return KernelField(first, fn=rho)
        g2 = self._gaussian_factor(second, float(self.kernel.get("second_scale", 1.0)))
        return KernelField(first, second, fn=lambda x, u: rho(x) * g2(u))

    def _component_fn(self, decl: dict, grid: AbelianGrid):
        """A per-degree coefficient function on the second factor, callable
        at arbitrary group elements (grid lookup for CSV samples)."""
        ctype = decl["type"]
        if ctype == "gaussian":
            return self._gaussian_factor(grid, float(decl["scale"]))
        if ctype == "character":
            freq = decl["freq"]
            if grid.kind == CYCLIC:
                return lambda u: np.exp(2j * math.pi * freq * np.asarray(u) / grid.size)
            return lambda u: np.exp(1j * freq * np.asarray(u))
        if ctype == "const":
            value = complex(decl["value"])
            return lambda u: np.full(np.shape(u), value)
        path = os.path.join(self.base_dir, decl["path"])
        samples = SampledFunction.from_csv(grid, path).values

        def lookup(u):
            u = np.asarray(u, dtype=float)
            if grid.kind == CYCLIC:
                idx = np.mod(np.rint(u), grid.size).astype(int)
            elif grid.kind == CIRCLE:
                spacing = 2.0 * math.pi / grid.size
                idx = np.mod(np.rint(u / spacing), grid.size).astype(int)
            else:
                idx = np.rint((u - grid.points[0]) / grid.step).astype(int)
                on_grid = np.abs(grid.points[np.clip(idx, 0, grid.size - 1)] - u) < 1e-9
                if idx.min() < 0 or idx.max() >= grid.size or not np.all(on_grid):
                    raise ValueError("CSV coefficient sampled off its grid")
            return samples[idx]

        return lookup

    def _component_values(self, decl: dict, grid: AbelianGrid, where: str) -> np.ndarray:
        del where
        return np.asarray(self._component_fn(decl, grid)(grid.points), dtype=complex)

    def _polynomial(self, first, second) -> KernelField:
        if not isinstance(first, SphereBasis):
            raise SpecError("kernel: polynomial-in-x needs a spherical first factor")
        if "coefficients" in self.kernel:
            if second is not None:
                raise SpecError("kernel.coefficients: scalar coefficients need a "
                                "trivial second factor; use 'table'")
            coeffs = np.asarray(self.kernel["coefficients"], dtype=float)
            return KernelField(
                first, fn=lambda x: np.polynomial.polynomial.polyval(x, coeffs))
        if second is None:
            raise SpecError("kernel.table: per-degree factors need a second factor")
        rows = {}
        for i, entry in enumerate(self.kernel["table"]):
            _require_keys(entry, {"degree", "factor"}, {"degree", "factor"},
                          f"kernel.table[{i}]")
            deg = entry["degree"]
            if not isinstance(deg, int) or deg < 0:
                raise SpecError(f"kernel.table[{i}].degree: need a nonnegative integer")
            rows[deg] = self._component_fn(entry["factor"], second)

        def fn(x, u):
            x = np.asarray(x, dtype=float)
            out = np.zeros(np.broadcast_shapes(np.shape(x), np.shape(u)), dtype=complex)
            for deg, comp in rows.items():
                out += (x ** deg) * comp(u)
            return out

        return KernelField(first, second, fn=fn)

    def _samples(self, first, second) -> KernelField:
        path = os.path.join(self.base_dir, self.kernel["path"])
        if path.endswith(".csv"):
            if second is not None or isinstance(first, SphereBasis):
                raise SpecError("kernel.path: CSV samples are for a single "
                                "abelian factor")
            return KernelField(first, values=SampledFunction.from_csv(first, path).values)
        values = np.load(path)
        return KernelField(first, second, values=values)


def _validate_factor(decl, where: str) -> None:
    if not isinstance(decl, dict) or "kind" not in decl:
        raise SpecError(f"{where}: expected an object with a 'kind' field")
    kind = decl["kind"]
    if kind not in _FACTOR_KEYS:
        raise SpecError(f"{where}.kind: unknown factor kind '{kind}'")
    allowed, required = _FACTOR_KEYS[kind]
    _require_keys(decl, allowed, required, where)
    for name in ("d", "n"):
        if name in decl and (not isinstance(decl[name], int) or decl[name] < 1):
            raise SpecError(f"{where}.{name}: need a positive integer")
    for name in ("step", "half_width"):
        if name in decl and not (isinstance(decl[name], (int, float)) and decl[name] > 0):
            raise SpecError(f"{where}.{name}: need a positive number")


def _validate_kernel(decl, where: str) -> None:
    if not isinstance(decl, dict) or "family" not in decl:
        raise SpecError(f"{where}: expected an object with a 'family' field")
    family = decl["family"]
    if family not in _FAMILY_KEYS:
        raise SpecError(f"{where}.family: unknown kernel family '{family}'")
    _require_keys(decl, _FAMILY_KEYS[family], {"family"}, where)
    if family == "gneiting-cm":
        atoms = decl.get("atoms")
        if not isinstance(atoms, list) or not atoms:
            raise SpecError(f"{where}.atoms: need a nonempty list of [rate, weight]")
        total = 0.0
        for i, atom in enumerate(atoms):
            if (not isinstance(atom, list) or len(atom) != 2
                    or not all(isinstance(v, (int, float)) for v in atom)):
                raise SpecError(f"{where}.atoms[{i}]: need [rate, weight]")
            if atom[0] < 0 or atom[1] <= 0:
                raise SpecError(f"{where}.atoms[{i}]: rate must be >= 0 and "
                                f"weight > 0")
            total += atom[1]
        if abs(total - 1.0) > 1e-12:
            raise SpecError(f"{where}.atoms: weights must sum to 1, got {total!r}")
    if family == "polynomial-in-x":
        if ("coefficients" in decl) == ("table" in decl):
            raise SpecError(f"{where}: give exactly one of 'coefficients' and 'table'")
    if family == "samples" and not isinstance(decl.get("path"), str):
        raise SpecError(f"{where}.path: need a file path string")
    if family == "spectral-family":
        entries = decl.get("entries")
        if not isinstance(entries, list) or not entries:
            raise SpecError(f"{where}.entries: need a nonempty list")
        for i, entry in enumerate(entries):
            if entry is not None:
                _validate_component(entry, f"{where}.entries[{i}]")
    if family == "polynomial-in-x" and "table" in decl:
        if not isinstance(decl["table"], list) or not decl["table"]:
            raise SpecError(f"{where}.table: need a nonempty list")
        for i, entry in enumerate(decl["table"]):
            if isinstance(entry, dict) and "factor" in entry:
                _validate_component(entry["factor"], f"{where}.table[{i}].factor")


def _validate_component(decl, where: str) -> None:
    if not isinstance(decl, dict) or "type" not in decl:
        raise SpecError(f"{where}: expected an object with a 'type' field")
    ctype = decl["type"]
    if ctype not in _COMPONENT_KEYS:
        raise SpecError(f"{where}.type: unknown component type '{ctype}'")
    allowed, required = _COMPONENT_KEYS[ctype]
    _require_keys(decl, allowed, required, where)


_TOLERANCE_FIELDS = {"quad_tol", "cert_tol", "tail_rel", "boundary_rel",
                     "series_tail_rel"}


def load_spec(path) -> KernelSpec:
    """Parse and validate a kernel-spec file."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise SpecError(f"spec file not found: {path}")
    except json.JSONDecodeError as exc:
        raise SpecError(f"spec file is not valid JSON: {exc}")

    _require_keys(doc, {"factors", "kernel", "truncation", "tolerances", "seed"},
                  {"factors", "kernel"}, "spec")
    factors = doc["factors"]
    _require_keys(factors, {"first", "second"}, {"first"}, "factors")
    _validate_factor(factors["first"], "factors.first")
    if factors.get("second") is not None:
        _validate_factor(factors["second"], "factors.second")
    _validate_kernel(doc["kernel"], "kernel")

    truncation = doc.get("truncation", DEFAULT.max_degree)
    if not isinstance(truncation, int) or truncation < 0:
        raise SpecError("truncation: need a nonnegative integer")

    overrides = doc.get("tolerances", {})
    _require_keys(overrides, _TOLERANCE_FIELDS, set(), "tolerances")
    for name, value in overrides.items():
        if not isinstance(value, (int, float)) or value <= 0:
            raise SpecError(f"tolerances.{name}: need a positive number")
    settings = replace(DEFAULT, **overrides)

    seed = doc.get("seed", 0)
    if not isinstance(seed, int):
        raise SpecError("seed: need an integer")

    return KernelSpec(factors=factors, kernel=doc["kernel"], truncation=truncation,
                      settings=settings, seed=seed,
                      base_dir=os.path.dirname(os.path.abspath(path)))
