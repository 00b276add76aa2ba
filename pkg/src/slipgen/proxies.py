"""Tsunami-severity proxies of a deformation field.

The sea surface is assumed to move instantaneously with the sea floor, so
the initial perturbation eta equals the vertical displacement over the
offshore points and zero onshore.  Proxies: vertical displacement at a
designated shore point, potential energy of the perturbation, maximum
offshore uplift, and the flooding-depth stand-in (max uplift plus any
shore subsidence).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import ConfigError, DomainError, UnsupportedDistributionError
from .klbasis import KLBasis
from .okada import Deformation, UnitSourceBank, deform

JOULES_PER_PJ = 1.0e15


@dataclass(frozen=True)
class ProxyConfig:
    """Where the shore is and how the energy integral is weighted.

    The offshore region defaults to the half plane x < coast_x; pass
    ``mask_fn(points) -> bool array`` to override.  The shore value is read
    at the grid point nearest (shore_x, shore_y), without interpolation.
    ``strike_extent`` is the along-strike length that scales the energy sum
    of a transect grid to 3-D joules.
    """

    shore_x: float
    shore_y: float = 0.0
    coast_x: float = 75.0e3
    mask_fn: Callable[[np.ndarray], np.ndarray] | None = None
    rho: float = 1000.0
    gravity: float = 9.81
    strike_extent: float = 100.0e3

    def shore_index(self, grid) -> int:
        d2 = (grid.x - self.shore_x) ** 2 + (grid.y - self.shore_y) ** 2
        return int(np.argmin(d2))

    def offshore_mask(self, grid) -> np.ndarray:
        if self.mask_fn is not None:
            mask = np.asarray(self.mask_fn(grid.points), dtype=bool)
            if mask.shape != (grid.n_points,):
                raise ConfigError("mask_fn must return one flag per grid point")
        else:
            mask = grid.x < self.coast_x
        if not np.any(mask):
            raise ConfigError("offshore mask selects no grid points")
        return mask

    def cell_weight(self, grid) -> float:
        """Area weight (m^2) of one grid cell in the energy sum."""
        if grid.dx is None:
            raise ConfigError("grid carries no spacing; cannot weight the energy sum")
        if grid.kind == "line":
            return grid.dx * self.strike_extent
        if grid.dy is None:
            raise ConfigError("mesh grid without dy spacing")
        return grid.dx * grid.dy


@dataclass(frozen=True)
class ProxySet:
    """Proxy quantities of one deformation field."""

    db_shore: float
    energy_pj: float
    eta_max: float
    depth_proxy: float


@dataclass(frozen=True)
class ShoreDensity:
    """Exact normal density of the shore displacement under a Gaussian field.

    The shore displacement is the mean-field value plus a fixed linear
    combination of the expansion coefficients, hence normal with variance
    equal to the squared norm of that coefficient vector ``b``.
    """

    mean: float
    variance: float
    b: np.ndarray

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)

    def pdf(self, x):
        if self.variance == 0.0:
            raise DomainError("point-mass density has no pdf")
        x = np.asarray(x, dtype=float)
        return np.exp(-0.5 * (x - self.mean) ** 2 / self.variance) / math.sqrt(
            2.0 * math.pi * self.variance)


def proxy_table(dz_rows: np.ndarray, grid, cfg: ProxyConfig) -> tuple[np.ndarray, ...]:
    """Proxies for a batch of deformation rows, shape (n, N_B).

    Returns (db_shore, energy_pj, eta_max, depth_proxy) arrays of length n.
    This is the vectorized path the ensemble runner uses.
    """
    dz_rows = np.atleast_2d(np.asarray(dz_rows, dtype=float))
    if dz_rows.shape[1] != grid.n_points:
        raise DomainError("deformation rows do not match the grid size")
    mask = cfg.offshore_mask(grid)
    shore = cfg.shore_index(grid)
    weight = cfg.cell_weight(grid)
    eta = dz_rows[:, mask]
    energy = 0.5 * cfg.rho * cfg.gravity * np.sum(eta**2, axis=1) * weight / JOULES_PER_PJ
    eta_max = np.maximum(0.0, eta.max(axis=1))
    db_shore = dz_rows[:, shore]
    return db_shore, energy, eta_max, eta_max - db_shore


def compute_proxies(deformation: Deformation, cfg: ProxyConfig) -> ProxySet:
    """Proxy quantities of a single deformation field."""
    db, energy, eta_max, depth = proxy_table(deformation.dz[None, :], deformation.grid, cfg)
    return ProxySet(db_shore=float(db[0]), energy_pj=float(energy[0]),
                    eta_max=float(eta_max[0]), depth_proxy=float(depth[0]))


def shore_density(bank: UnitSourceBank, basis: KLBasis, mu, m: int,
                  cfg: ProxyConfig) -> ShoreDensity:
    """Exact shore-displacement density for an m-term Gaussian expansion.

    b_k is the shore value of the deformation of sqrt(lambda_k) v_k for
    modes 1..m (mode 0 skipped, matching the sampling convention).  Only
    defined for Gaussian fields; the lognormal shore value is not a linear
    function of the coefficients.
    """
    if basis.kind != "gaussian":
        raise UnsupportedDistributionError(
            "exact shore density holds for gaussian fields only")
    if m > basis.n - 1:
        raise DomainError("m=%d exceeds the %d usable modes" % (m, basis.n - 1))
    shore = cfg.shore_index(bank.grid)
    mean = float(deform(bank, mu).dz[shore])
    if m > 0:
        row = bank.theta[shore, :]
        b = row @ basis.scaled_modes(np.arange(1, m + 1))
    else:
        b = np.empty(0)
    return ShoreDensity(mean=mean, variance=float(b @ b), b=b)
