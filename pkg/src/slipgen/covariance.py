"""Mean slip, correlation/covariance matrices, and lognormal moment matching.

The mean slip is a depth taper scaled to a target magnitude.  The slip
covariance is built as C_hat[i,j] = sigma_i sigma_j C[i,j] with
sigma_i = alpha * mu_i, where C comes from an autocorrelation function of
inter-patch distance (isotropic) or of the strike/dip distance split
(anisotropic).  For lognormal fields the matching Gaussian-space parameters
are obtained by inverting the lognormal moment relations.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateTaperError, DomainError
from .geometry import FaultModel, distance_matrices
from .moment import DEFAULT_RIGIDITY, magnitude_to_moment


@dataclass(frozen=True)
class TaperSpec:
    """Depth taper: 1 far up-dip, 0 at d_max, clamped to 0 below d_max."""

    d_max: float
    steepness: float = 20.0

    def __post_init__(self):
        if not self.d_max > 0:
            raise DomainError("taper d_max must be positive, got %g" % self.d_max)
        if not self.steepness > 0:
            raise DomainError("taper steepness must be positive, got %g" % self.steepness)


@dataclass(frozen=True)
class AcfSpec:
    """Autocorrelation of slip vs. inter-patch distance.

    Give ``r0`` for the isotropic form or the (r_strike, r_dip) pair for
    the anisotropic form; kinds are "exponential" and "gaussian".
    """

    kind: str = "exponential"
    r0: float | None = None
    r_strike: float | None = None
    r_dip: float | None = None

    def __post_init__(self):
        if self.kind not in ("exponential", "gaussian"):
            raise DomainError("ACF kind must be exponential or gaussian, got %r" % self.kind)
        iso = self.r0 is not None
        aniso = self.r_strike is not None or self.r_dip is not None
        if iso == aniso:
            raise DomainError("give either r0 or the (r_strike, r_dip) pair")
        if aniso and (self.r_strike is None or self.r_dip is None):
            raise DomainError("anisotropic ACF needs both r_strike and r_dip")
        for r in (self.r0, self.r_strike, self.r_dip):
            if r is not None and not r > 0:
                raise DomainError("correlation lengths must be positive, got %g" % r)

    @property
    def anisotropic(self) -> bool:
        return self.r0 is None


@dataclass(frozen=True)
class SlipDistribution:
    """Everything needed to sample slip: mean, covariance, and for the
    lognormal kind the matching Gaussian-space parameters."""

    kind: str
    mean: np.ndarray
    cov: np.ndarray
    alpha: float
    mean_scalar: float
    taper: np.ndarray
    gaussian_mean: np.ndarray | None = None
    gaussian_cov: np.ndarray | None = None

    @property
    def sampling_cov(self) -> np.ndarray:
        """The covariance whose eigenmodes drive the K-L expansion."""
        return self.cov if self.kind == "gaussian" else self.gaussian_cov

    @property
    def sampling_mean(self) -> np.ndarray:
        return self.mean if self.kind == "gaussian" else self.gaussian_mean


def taper_value(depth, spec: TaperSpec):
    """Evaluate the depth taper; accepts scalars or arrays.

    tau(d) = 1 - exp(steepness * (d - d_max) / d_max) for d <= d_max and 0
    below, so the profile is near 1 far up-dip and falls to 0 at the
    down-dip edge.
    """
    d = np.minimum(np.asarray(depth, dtype=float), spec.d_max)
    tau = 1.0 - np.exp(spec.steepness * (d - spec.d_max) / spec.d_max)
    if np.ndim(depth) == 0:
        return float(tau)
    return tau


def _mean_scale(fault: FaultModel, tau: np.ndarray, target_mw: float, rigidity: float) -> float:
    weighted = float(fault.areas() @ tau)
    if weighted <= 0:
        raise DegenerateTaperError("taper is zero on every patch")
    return magnitude_to_moment(target_mw) / (rigidity * weighted)


def mean_slip(fault: FaultModel, taper: TaperSpec, target_mw: float,
              rigidity: float = DEFAULT_RIGIDITY) -> np.ndarray:
    """Taper profile scaled so the fault's magnitude equals target_mw exactly."""
    tau = taper_value(fault.depths(), taper)
    return _mean_scale(fault, tau, target_mw, rigidity) * tau


def correlation_matrix(fault: FaultModel, acf: AcfSpec) -> np.ndarray:
    """N-by-N correlation of slip between patch pairs; unit diagonal."""
    d, d_strike, d_dip = distance_matrices(fault)
    if acf.anisotropic:
        if acf.kind == "exponential":
            c = np.exp(-d_strike / acf.r_strike - d_dip / acf.r_dip)
        else:
            c = np.exp(-((d_strike / acf.r_strike) ** 2) - (d_dip / acf.r_dip) ** 2)
    else:
        if acf.kind == "exponential":
            c = np.exp(-d / acf.r0)
        else:
            c = np.exp(-((d / acf.r0) ** 2))
    np.fill_diagonal(c, 1.0)
    return 0.5 * (c + c.T)


def scale_covariance(c: np.ndarray, mu, alpha: float) -> np.ndarray:
    """Covariance with per-patch standard deviation alpha * mu_i."""
    mu = np.asarray(mu, dtype=float)
    if c.shape != (mu.size, mu.size):
        raise DomainError("correlation matrix shape %s does not match mean length %d"
                          % (c.shape, mu.size))
    if alpha < 0:
        raise DomainError("alpha must be non-negative, got %g" % alpha)
    sigma = alpha * mu
    return np.outer(sigma, sigma) * c


def gaussian_params_for_lognormal(mu, cov) -> tuple[np.ndarray, np.ndarray]:
    """Gaussian-space (mean, covariance) whose exponential matches (mu, cov).

    Inverts the lognormal moment relations: the Gaussian covariance entry is
    log(cov_ij / (mu_i mu_j) + 1) and the Gaussian mean is
    log(mu_i) - cov_g_ii / 2, so exponentiated draws recover the requested
    mean and covariance exactly.
    """
    mu = np.asarray(mu, dtype=float)
    cov = np.asarray(cov, dtype=float)
    if np.any(mu <= 0):
        i = int(np.argmin(mu))
        raise DomainError("lognormal mean must be positive everywhere; mu[%d]=%g" % (i, mu[i]))
    ratio = cov / np.outer(mu, mu) + 1.0
    if np.any(ratio <= 0):
        i, j = np.unravel_index(int(np.argmin(ratio)), ratio.shape)
        raise DomainError(
            "covariance too negative for a lognormal at (%d, %d): cov/(mu_i mu_j)+1 = %g"
            % (i, j, ratio[i, j]))
    cov_g = np.log(ratio)
    cov_g = 0.5 * (cov_g + cov_g.T)
    mu_g = np.log(mu) - 0.5 * np.diag(cov_g)
    return mu_g, cov_g


def lognormal_moments(mu_g, cov_g) -> tuple[np.ndarray, np.ndarray]:
    """Forward map: mean and covariance of exp of a Gaussian field."""
    mu_g = np.asarray(mu_g, dtype=float)
    cov_g = np.asarray(cov_g, dtype=float)
    mu = np.exp(mu_g + 0.5 * np.diag(cov_g))
    cov = np.outer(mu, mu) * (np.exp(cov_g) - 1.0)
    return mu, cov


def build_distribution(fault: FaultModel, taper: TaperSpec, acf: AcfSpec, alpha: float,
                       kind: str, target_mw: float,
                       rigidity: float = DEFAULT_RIGIDITY) -> SlipDistribution:
    """Assemble the full slip distribution for a fault and parameter set."""
    if kind not in ("gaussian", "lognormal"):
        raise DomainError("distribution kind must be gaussian or lognormal, got %r" % kind)
    tau = taper_value(fault.depths(), taper)
    scalar = _mean_scale(fault, tau, target_mw, rigidity)
    mu = scalar * tau
    c = correlation_matrix(fault, acf)
    cov = scale_covariance(c, mu, alpha)
    if kind == "gaussian":
        return SlipDistribution(kind=kind, mean=mu, cov=cov, alpha=alpha,
                                mean_scalar=scalar, taper=tau)
    mu_g, cov_g = gaussian_params_for_lognormal(mu, cov)
    return SlipDistribution(kind=kind, mean=mu, cov=cov, alpha=alpha,
                            mean_scalar=scalar, taper=tau,
                            gaussian_mean=mu_g, gaussian_cov=cov_g)
