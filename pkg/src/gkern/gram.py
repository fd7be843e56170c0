"""Brute-force positive-definiteness oracle.

Builds the Gram matrix of a kernel over a finite point configuration and
inspects its smallest eigenvalue.  The probe is a falsifier: a negative
eigenvalue disproves positive definiteness, a clean pass proves nothing,
so it never upgrades a verdict.
"""

import csv
from dataclasses import dataclass

import numpy as np

from .abelian import CYCLIC, AbelianGrid
from .settings import DEFAULT, NumericSettings

__all__ = ["PointConfig", "gram_matrix", "min_eigenvalue", "randomized_pd_probe", "ProbeResult"]

_HERM_TOL = 1e-12


@dataclass
class PointConfig:
    """A finite configuration of sphere points and/or group elements."""

    sphere_points: np.ndarray | None = None   # (k, d+1) unit vectors
    sphere_points2: np.ndarray | None = None  # second sphere factor, (k, d2+1)
    group_points: np.ndarray | None = None    # (k,) group elements
    group_points2: np.ndarray | None = None   # second group factor
    seed: int | None = None

    def __post_init__(self):
        for pts in (self.sphere_points, self.sphere_points2):
            if pts is None:
                continue
            norms = np.linalg.norm(pts, axis=1)
            if np.max(np.abs(norms - 1.0)) > 1e-12:
                raise ValueError("sphere points must be unit vectors")

    @property
    def size(self) -> int:
        for pts in (self.sphere_points, self.group_points):
            if pts is not None:
                return len(pts)
        raise ValueError("empty configuration")

    def to_csv(self, path) -> None:
        """Persist the configuration for replay."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["kind", "index", "values"])
            if self.seed is not None:
                writer.writerow(["seed", 0, str(self.seed)])
            for name, pts in (("sphere", self.sphere_points),
                              ("sphere2", self.sphere_points2)):
                if pts is not None:
                    for i, p in enumerate(pts):
                        writer.writerow([name, i, " ".join(format(v, ".17g") for v in p)])
            for name, pts in (("group", self.group_points),
                              ("group2", self.group_points2)):
                if pts is not None:
                    for i, u in enumerate(np.atleast_1d(pts)):
                        writer.writerow([name, i, format(float(u), ".17g")])

    @classmethod
    def from_csv(cls, path) -> "PointConfig":
        rows = {"sphere": [], "sphere2": [], "group": [], "group2": []}
        seed = None
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            next(reader)
            for kind, _idx, values in reader:
                if kind == "seed":
                    seed = int(values)
                else:
                    rows[kind].append([float(v) for v in values.split()])
        return cls(
            sphere_points=np.array(rows["sphere"]) if rows["sphere"] else None,
            sphere_points2=np.array(rows["sphere2"]) if rows["sphere2"] else None,
            group_points=np.array(rows["group"]).ravel() if rows["group"] else None,
            group_points2=np.array(rows["group2"]).ravel() if rows["group2"] else None,
            seed=seed,
        )


def _dot_matrix(points: np.ndarray) -> np.ndarray:
    dots = points @ points.T
    return np.clip(dots, -1.0, 1.0)


def _difference_matrix(grid: AbelianGrid, u: np.ndarray) -> np.ndarray:
    diffs = u[:, None] - u[None, :]
    if grid.kind == CYCLIC:
        return np.mod(np.rint(diffs), grid.size)
    return diffs


def gram_matrix(kernel, cfg: PointConfig, grid: AbelianGrid | None = None,
                grid2: AbelianGrid | None = None) -> np.ndarray:
    """Gram matrix of a kernel over a configuration.

    The kernel is called with pairwise dot products for sphere factors and
    pairwise differences for group factors, in configuration order:
    ``kernel(dots)``, ``kernel(diffs)``, ``kernel(dots, diffs)``,
    ``kernel(dots, dots2)`` or ``kernel(diffs, diffs2)``.
    """
    args = []
    if cfg.sphere_points is not None:
        args.append(_dot_matrix(cfg.sphere_points))
    if cfg.sphere_points2 is not None:
        args.append(_dot_matrix(cfg.sphere_points2))
    if cfg.group_points is not None:
        if grid is None:
            raise ValueError("group points require the carrier grid")
        args.append(_difference_matrix(grid, np.atleast_1d(cfg.group_points)))
    if cfg.group_points2 is not None:
        if grid2 is None:
            raise ValueError("second group points require their carrier grid")
        args.append(_difference_matrix(grid2, np.atleast_1d(cfg.group_points2)))
    if not args:
        raise ValueError("empty configuration")
    M = np.asarray(kernel(*args), dtype=complex)
    scale = max(1.0, float(np.max(np.abs(M))))
    if np.max(np.abs(M - M.conj().T)) > _HERM_TOL * scale:
        raise ValueError("kernel produced a non-Hermitian Gram matrix")
    return M


def min_eigenvalue(M: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix."""
    M = np.asarray(M)
    scale = max(1.0, float(np.max(np.abs(M))))
    if np.max(np.abs(M - M.conj().T)) > _HERM_TOL * scale:
        raise ValueError("matrix is not Hermitian")
    return float(np.linalg.eigvalsh(M)[0])


@dataclass
class ProbeResult:
    worst_min_eig: float
    worst_config: PointConfig
    worst_trial: int
    trials: int


def _sphere_sample(rng, n: int, d: int) -> np.ndarray:
    v = rng.standard_normal((n, d + 1))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def randomized_pd_probe(kernel, d: int | None = None, grid: AbelianGrid | None = None,
                        trials: int | None = None, n_points: int | None = None,
                        seed: int = 0, d2: int | None = None,
                        grid2: AbelianGrid | None = None,
                        settings: NumericSettings = DEFAULT) -> ProbeResult:
    """Worst Gram min-eigenvalue over seeded random configurations.

    Sphere points are normalized Gaussian vectors, group points uniform
    over the grid.  When the group carrier has no more elements than a
    configuration holds, every fourth trial enumerates the full group so
    that a negative dual value is always witnessed by an embedded
    circulant.  Each trial draws from ``default_rng([seed, trial])``, so
    runs are reproducible and order-independent.
    """
    if trials is None:
        trials = settings.probe_trials
    if n_points is None:
        n_points = settings.probe_points
    if trials < 1 or n_points < 1:
        raise ValueError("trials and n_points must be >= 1")

    worst = np.inf
    worst_cfg = None
    worst_trial = -1
    for trial in range(trials):
        rng = np.random.default_rng([seed, trial])
        sphere = _sphere_sample(rng, n_points, d) if d is not None else None
        sphere2 = _sphere_sample(rng, n_points, d2) if d2 is not None else None
        group = _group_sample(rng, grid, n_points, trial) if grid is not None else None
        group2 = _group_sample(rng, grid2, n_points, trial) if grid2 is not None else None
        cfg = PointConfig(sphere_points=sphere, sphere_points2=sphere2,
                          group_points=group, group_points2=group2, seed=seed)
        lam = min_eigenvalue(gram_matrix(kernel, cfg, grid, grid2))
        if lam < worst:
            worst, worst_cfg, worst_trial = lam, cfg, trial
    return ProbeResult(worst, worst_cfg, worst_trial, trials)


def _group_sample(rng, grid: AbelianGrid, n_points: int, trial: int) -> np.ndarray:
    if grid.size <= n_points and trial % 4 == 0:
        head = np.asarray(grid.points)
        extra = rng.choice(grid.points, size=n_points - grid.size)
        return np.concatenate([head, extra])
    return rng.choice(grid.points, size=n_points)
