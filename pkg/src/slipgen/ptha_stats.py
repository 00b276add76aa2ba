"""Monte Carlo ensembles over the expansion coefficients and their statistics.

An ensemble draws n_s coefficient vectors, realizes slip (Gaussian or
lognormal), turns each realization into a deformation through the unit
source bank, and keeps only the proxy table and the coefficients; slip
vectors and deformations are re-derivable from the seed and are not stored.
Draw j depends only on (seed, j), so results do not depend on how draws are
chunked or parallelized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DegenerateSampleError, DomainError, SaturationError
from .geometry import FaultModel
from .klbasis import KLBasis, ZStream, _EXP_MAX, active_modes, draw_z_block
from .moment import DEFAULT_RIGIDITY, magnitude_to_moment
from .okada import UnitSourceBank, mode_deformations
from .proxies import ProxyConfig, ProxySet, proxy_table

DEFAULT_CHUNK = 2048


@dataclass(frozen=True)
class EnsemblePipeline:
    """Prebuilt pieces an ensemble run needs."""

    fault: FaultModel
    bank: UnitSourceBank
    basis: KLBasis
    proxy: ProxyConfig
    taper: np.ndarray | None = None       # lognormal path only
    target_mw: float | None = None        # lognormal path only
    rigidity: float = DEFAULT_RIGIDITY

    @property
    def kind(self) -> str:
        return self.basis.kind


@dataclass(frozen=True)
class SampleEnsemble:
    """Proxy table and coefficients of n_s Monte Carlo draws."""

    n_s: int
    m: int
    z_rows: np.ndarray
    db_shore: np.ndarray
    energy_pj: np.ndarray
    eta_max: np.ndarray
    depth_proxy: np.ndarray
    seed: int
    kind: str

    def proxy_row(self, i: int) -> ProxySet:
        return ProxySet(db_shore=float(self.db_shore[i]),
                        energy_pj=float(self.energy_pj[i]),
                        eta_max=float(self.eta_max[i]),
                        depth_proxy=float(self.depth_proxy[i]))

    def proxy_column(self, name: str) -> np.ndarray:
        try:
            return getattr(self, name)
        except AttributeError:
            raise DomainError("unknown proxy column %r" % name) from None


@dataclass(frozen=True)
class HazardCurve:
    """Exceedance probability over a uniform grid of threshold levels."""

    levels: np.ndarray
    probabilities: np.ndarray


@dataclass(frozen=True)
class DensityEstimate:
    """Kernel density estimate on a uniform grid.

    1-D: ``grid`` is the evaluation axis and ``values`` its densities.
    2-D: ``grid`` is an (x_axis, y_axis) pair and ``values[i, j]`` the
    density at (x_axis[i], y_axis[j]).
    """

    grid: np.ndarray | tuple[np.ndarray, np.ndarray]
    values: np.ndarray
    bandwidth: float | tuple[float, float]


def run_ensemble(pipeline: EnsemblePipeline, n_s: int, m: int, seed: int,
                 chunk: int = DEFAULT_CHUNK, stream_id: int = 0) -> SampleEnsemble:
    """Draw n_s realizations at truncation m and tabulate their proxies.

    Coefficients come from the counter-based stream, mode 0 skipped; the
    Gaussian path assembles deformations from mode deformations, the
    lognormal path realizes slip and pushes it through the bank.  The result
    is a pure function of (pipeline, n_s, m, seed); the chunk size is a
    performance knob that bounds peak memory.
    """
    if n_s < 0:
        raise DomainError("n_s must be non-negative")
    active = active_modes(m, True, pipeline.basis.n)
    stream = ZStream(seed, stream_id)
    z_rows = np.empty((n_s, m))
    db = np.empty(n_s)
    energy = np.empty(n_s)
    eta_max = np.empty(n_s)
    depth = np.empty(n_s)

    if pipeline.kind == "gaussian":
        parts = mode_deformations(pipeline.bank, pipeline.basis, m)
        base = parts[0].dz
        cols = np.array([p.dz for p in parts[1:]])          # (m, N_B)
    else:
        if pipeline.taper is None or pipeline.target_mw is None:
            raise DomainError("lognormal ensembles need the taper and target magnitude")
        modes_t = pipeline.basis.scaled_modes(active).T      # (m, N)
        areas = pipeline.fault.areas()
        m0_target = magnitude_to_moment(pipeline.target_mw)

    for start in range(0, n_s, chunk):
        count = min(chunk, n_s - start)
        z = draw_z_block(stream, m, start, count)
        z_rows[start:start + count] = z
        if pipeline.kind == "gaussian":
            dz_rows = base[None, :] + z @ cols if m > 0 else np.tile(base, (count, 1))
        else:
            expo = z @ modes_t if m > 0 else np.zeros((count, pipeline.fault.n))
            peak = float(expo.max(initial=0.0))
            if peak > _EXP_MAX:
                raise SaturationError(
                    "draw block at %d: exponent %g overflows exp()" % (start, peak))
            shaped = pipeline.taper[None, :] * np.exp(expo)
            scale = m0_target / (pipeline.rigidity * (shaped @ areas))
            slips = shaped * scale[:, None]
            dz_rows = slips @ pipeline.bank.theta.T
        sl = slice(start, start + count)
        db[sl], energy[sl], eta_max[sl], depth[sl] = proxy_table(
            dz_rows, pipeline.bank.grid, pipeline.proxy)

    return SampleEnsemble(n_s=n_s, m=m, z_rows=z_rows, db_shore=db,
                          energy_pj=energy, eta_max=eta_max, depth_proxy=depth,
                          seed=seed, kind=pipeline.kind)


def exceedance_at(samples, levels) -> np.ndarray:
    """Fraction of samples strictly above each level."""
    samples = np.sort(np.asarray(samples, dtype=float))
    n = samples.size
    if n == 0:
        raise DomainError("exceedance needs at least one sample")
    idx = np.searchsorted(samples, np.asarray(levels, dtype=float), side="right")
    return (n - idx) / n


def hazard_curve(samples, n_levels: int = 200) -> HazardCurve:
    """Exceedance curve on a uniform level grid spanning the sample range."""
    samples = np.asarray(samples, dtype=float)
    if samples.size < 1:
        raise DomainError("hazard curve needs at least one sample")
    if n_levels < 2:
        raise DomainError("n_levels must be at least 2")
    levels = np.linspace(samples.min(), samples.max(), n_levels)
    return HazardCurve(levels=levels, probabilities=exceedance_at(samples, levels))


def z_log_density(z, m: int) -> float:
    """Log density of the first m coefficients under the sampling distribution."""
    z = np.asarray(z, dtype=float).ravel()
    if z.size < m:
        raise DomainError("need at least m=%d coefficients, got %d" % (m, z.size))
    head = z[:m]
    return -0.5 * m * math.log(2.0 * math.pi) - 0.5 * float(head @ head)


def _scott_bandwidth(samples: np.ndarray, d: int) -> float:
    sigma = float(np.std(samples, ddof=1))
    return sigma * samples.size ** (-1.0 / (d + 4))


def _kde_axis(samples: np.ndarray, h: float, n_grid: int) -> np.ndarray:
    return np.linspace(samples.min() - 3.0 * h, samples.max() + 3.0 * h, n_grid)


def _check_kde_input(samples, name: str = "samples") -> np.ndarray:
    samples = np.asarray(samples, dtype=float).ravel()
    if samples.size < 2 or np.ptp(samples) == 0.0:
        raise DegenerateSampleError("%s has fewer than 2 points or zero spread" % name)
    return samples


def kde_1d(samples, n_grid: int = 200) -> DensityEstimate:
    """Gaussian-kernel density estimate with Scott's-rule bandwidth.

    Evaluated on a uniform grid extending 3 bandwidths beyond the sample
    range, so the trapezoidal integral is 1 up to kernel tail truncation.
    """
    samples = _check_kde_input(samples)
    h = _scott_bandwidth(samples, 1)
    grid = _kde_axis(samples, h, n_grid)
    u = (grid[:, None] - samples[None, :]) / h
    values = np.exp(-0.5 * u**2).sum(axis=1) / (samples.size * h * math.sqrt(2.0 * math.pi))
    return DensityEstimate(grid=grid, values=values, bandwidth=h)


def kde_2d(samples_x, samples_y, n_grid: int = 120) -> DensityEstimate:
    """Product-Gaussian-kernel joint density with per-dimension Scott bandwidths."""
    x = _check_kde_input(samples_x, "samples_x")
    y = _check_kde_input(samples_y, "samples_y")
    if x.size != y.size:
        raise DomainError("sample vectors differ in length")
    hx = _scott_bandwidth(x, 2)
    hy = _scott_bandwidth(y, 2)
    gx = _kde_axis(x, hx, n_grid)
    gy = _kde_axis(y, hy, n_grid)
    kx = np.exp(-0.5 * ((gx[:, None] - x[None, :]) / hx) ** 2)
    ky = np.exp(-0.5 * ((gy[:, None] - y[None, :]) / hy) ** 2)
    values = kx @ ky.T / (x.size * 2.0 * math.pi * hx * hy)
    return DensityEstimate(grid=(gx, gy), values=values, bandwidth=(hx, hy))


def extreme_mask(ensemble: SampleEnsemble,
                 predicate: Callable[[ProxySet], bool]) -> np.ndarray:
    """Boolean flag per draw: does its proxy row satisfy the predicate?"""
    return np.fromiter((bool(predicate(ensemble.proxy_row(i))) for i in range(ensemble.n_s)),
                       dtype=bool, count=ensemble.n_s)


def filter_extremes(ensemble: SampleEnsemble, predicate: Callable[[ProxySet], bool],
                    coords=None) -> np.ndarray:
    """Coefficient rows of the draws whose proxies satisfy the predicate.

    ``coords`` selects coefficient columns (0-based position in the active
    set, so column 0 is z_1); by default all m columns are returned.  An
    empty selection is a valid result.
    """
    rows = ensemble.z_rows[extreme_mask(ensemble, predicate)]
    if coords is not None:
        rows = rows[:, np.asarray(coords, dtype=int)]
    return rows
