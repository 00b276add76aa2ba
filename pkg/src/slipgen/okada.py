"""Vertical surface displacement from rectangular dislocations.

Implements the closed-form half-space solution for a buried rectangular
source (strike-slip and dip-slip components of the vertical displacement at
the free surface), plus a per-fault bank of unit-slip deformation columns.
Deformation for an arbitrary slip vector is the linear combination of those
columns, which is what makes large Monte Carlo ensembles cheap: no
per-realization dislocation evaluations.

Geometry conventions follow :mod:`slipgen.geometry`; internally each patch
is evaluated in its own frame with the along-strike coordinate measured
from the bottom-edge center and the transverse coordinate positive up-dip.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, TruncationError, UnsupportedGeometryError
from .geometry import DeformGrid, FaultModel, SubfaultPatch
from .klbasis import KLBasis

DEFAULT_POISSON = 0.25

_COS_TINY = 1e-10   # below this, use the vertical-fault limit forms
_LOG_TINY = 1e-300  # guard for R + eta underflow on the singular ray


@dataclass(frozen=True)
class Deformation:
    """Vertical displacement field on an observation grid."""

    grid: DeformGrid
    dz: np.ndarray

    def __post_init__(self):
        dz = np.asarray(self.dz, dtype=float)
        if dz.shape != (self.grid.n_points,):
            raise DomainError("dz length %d does not match grid size %d"
                              % (dz.size, self.grid.n_points))
        if not np.all(np.isfinite(dz)):
            raise DomainError("deformation contains non-finite entries")
        object.__setattr__(self, "dz", dz)


@dataclass(frozen=True)
class UnitSourceBank:
    """Unit-slip deformation columns: theta[:, j] is the vertical field of
    1 m of slip on patch j."""

    grid: DeformGrid
    theta: np.ndarray
    fault: FaultModel
    poisson: float = DEFAULT_POISSON

    @property
    def n_columns(self) -> int:
        return self.theta.shape[1]

    def column(self, j: int) -> np.ndarray:
        return self.theta[:, j]


def _uz_strike(xi, eta, q, sd, cd, mf):
    """Vertical displacement kernel for unit strike-slip (one Chinnery corner)."""
    r = np.sqrt(xi**2 + eta**2 + q**2)
    dbar = eta * sd - q * cd
    r_eta = r + eta
    sing = r_eta <= _LOG_TINY
    safe_r_eta = np.where(sing, 1.0, r_eta)
    log_r_eta = np.where(sing, -np.log(r - eta), np.log(safe_r_eta))
    if abs(cd) < _COS_TINY:
        i4 = -mf * q / (r + dbar)
    else:
        i4 = mf * (np.log(r + dbar) - sd * log_r_eta) / cd
    term = np.where(sing, 0.0, dbar * q / (r * safe_r_eta) + q * sd / safe_r_eta)
    return -(term + i4 * sd) / (2.0 * np.pi)


def _uz_dip(xi, eta, q, sd, cd, mf):
    """Vertical displacement kernel for unit dip-slip (one Chinnery corner)."""
    r = np.sqrt(xi**2 + eta**2 + q**2)
    dbar = eta * sd - q * cd
    x = np.sqrt(xi**2 + q**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        atan_q = np.where(q == 0.0, 0.0, np.arctan(xi * eta / (q * r)))
        if abs(cd) < _COS_TINY:
            i5 = -mf * xi * sd / (r + dbar)
        else:
            num = eta * (x + q * cd) + x * (r + x) * sd
            den = xi * (r + x) * cd
            i5 = np.where(xi == 0.0, 0.0, mf * 2.0 / cd * np.arctan(num / np.where(den == 0.0, 1.0, den)))
        r_xi = r + xi
        first = np.where(r_xi <= _LOG_TINY, 0.0, dbar * q / (r * np.where(r_xi <= _LOG_TINY, 1.0, r_xi)))
    return -(first + sd * atan_q - i5 * sd * cd) / (2.0 * np.pi)


def okada_patch(patch: SubfaultPatch, slip: float, grid: DeformGrid,
                poisson: float = DEFAULT_POISSON) -> Deformation:
    """Vertical displacement at the grid points from slip on one patch.

    The result is exactly linear in ``slip``; rake splits the slip into
    strike-slip and dip-slip components.  Grid points that land exactly on a
    removable-singularity ray of the closed form are offset by 1e-6 m.
    """
    if patch.top_depth <= 0:
        raise UnsupportedGeometryError(
            "patch top edge at depth %g m breaks the surface" % patch.top_depth)
    if not math.isfinite(slip):
        raise DomainError("slip must be finite")
    mf = 1.0 - 2.0 * poisson  # mu / (lambda + mu)
    xb, yb, db = patch.bottom_center()
    phi = math.radians(patch.strike)
    delta = math.radians(patch.dip)
    sd, cd = math.sin(delta), math.cos(delta)
    sphi, cphi = math.sin(phi), math.cos(phi)

    xx = grid.x - xb
    yy = grid.y - yb
    along = xx * sphi + yy * cphi
    updip = -(xx * cphi - yy * sphi)
    half_len = 0.5 * patch.length
    degenerate = ((updip * sd - db * cd == 0.0)
                  | (along + half_len == 0.0) | (along - half_len == 0.0))
    if np.any(degenerate):
        along = np.where(degenerate, along + 1e-6, along)
        updip = np.where(degenerate, updip + 1e-6, updip)

    p = updip * cd + db * sd
    q = updip * sd - db * cd
    xi_a = along + half_len
    xi_b = along - half_len
    eta_a = p
    eta_b = p - patch.width

    uz_ss = (_uz_strike(xi_a, eta_a, q, sd, cd, mf)
             - _uz_strike(xi_a, eta_b, q, sd, cd, mf)
             - _uz_strike(xi_b, eta_a, q, sd, cd, mf)
             + _uz_strike(xi_b, eta_b, q, sd, cd, mf))
    uz_ds = (_uz_dip(xi_a, eta_a, q, sd, cd, mf)
             - _uz_dip(xi_a, eta_b, q, sd, cd, mf)
             - _uz_dip(xi_b, eta_a, q, sd, cd, mf)
             + _uz_dip(xi_b, eta_b, q, sd, cd, mf))

    rake = math.radians(patch.rake)
    dz = slip * (math.cos(rake) * uz_ss + math.sin(rake) * uz_ds)
    return Deformation(grid=grid, dz=dz)


def build_bank(fault: FaultModel, grid: DeformGrid,
               poisson: float = DEFAULT_POISSON, workers: int | None = None) -> UnitSourceBank:
    """Unit-source bank: column j is the deformation of 1 m slip on patch j.

    Columns are independent, so construction parallelizes over patches;
    the assembled matrix does not depend on the worker count.
    """
    theta = np.empty((grid.n_points, fault.n))

    def fill(j):
        try:
            theta[:, j] = okada_patch(fault.patches[j], 1.0, grid, poisson).dz
        except UnsupportedGeometryError as exc:
            raise UnsupportedGeometryError("patch %d: %s" % (j, exc)) from None

    if workers is not None and workers > 1 and fault.n > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, range(fault.n)))
    else:
        for j in range(fault.n):
            fill(j)
    return UnitSourceBank(grid=grid, theta=theta, fault=fault, poisson=poisson)


def deform(bank: UnitSourceBank, slip) -> Deformation:
    """Deformation of an arbitrary slip vector as a combination of bank columns."""
    slip = np.asarray(slip, dtype=float)
    if slip.shape != (bank.n_columns,):
        raise DomainError("slip length %d does not match bank with N=%d columns"
                          % (slip.size, bank.n_columns))
    return Deformation(grid=bank.grid, dz=bank.theta @ slip)


def mode_deformations(bank: UnitSourceBank, basis: KLBasis, m: int) -> list[Deformation]:
    """Deformations of the mean field and of modes 1..m (eigenvalue-scaled).

    Element 0 is the mean-slip deformation; element k (k >= 1) is the
    deformation of sqrt(lambda_k) v_k.  A Gaussian realization's deformation
    is then element 0 plus the z-weighted sum of the rest, an (m+1)-term
    linear combination per realization.
    """
    if basis.kind != "gaussian":
        raise DomainError("mode deformations require a gaussian basis")
    if m > basis.n - 1:
        raise TruncationError("m=%d exceeds the %d usable modes" % (m, basis.n - 1))
    out = [deform(bank, basis.mean)]
    if m > 0:
        cols = bank.theta @ basis.scaled_modes(np.arange(1, m + 1))
        out.extend(Deformation(grid=bank.grid, dz=cols[:, k]) for k in range(m))
    return out


def fault_hash(fault: FaultModel) -> str:
    arr = np.array([(p.centroid_x, p.centroid_y, p.depth, p.strike, p.dip,
                     p.rake, p.length, p.width) for p in fault.patches])
    return hashlib.sha256(arr.tobytes()).hexdigest()


def grid_hash(grid: DeformGrid) -> str:
    return hashlib.sha256(np.ascontiguousarray(grid.points).tobytes()).hexdigest()


def save_bank(bank: UnitSourceBank, path) -> None:
    """Cache a bank with fingerprints of the fault and grid it belongs to."""
    np.savez_compressed(path, theta=bank.theta,
                        fault_hash=fault_hash(bank.fault),
                        grid_hash=grid_hash(bank.grid),
                        poisson=bank.poisson)


def load_bank(path, fault: FaultModel, grid: DeformGrid,
              poisson: float = DEFAULT_POISSON) -> UnitSourceBank | None:
    """Load a cached bank; returns None when the fingerprints do not match."""
    try:
        with np.load(path) as data:
            if (str(data["fault_hash"]) != fault_hash(fault)
                    or str(data["grid_hash"]) != grid_hash(grid)
                    or float(data["poisson"]) != poisson):
                return None
            theta = np.array(data["theta"])
    except (OSError, KeyError, ValueError):
        return None
    if theta.shape != (grid.n_points, fault.n):
        return None
    return UnitSourceBank(grid=grid, theta=theta, fault=fault, poisson=poisson)
