"""Eigenmode basis of a covariance matrix and truncated-expansion realizations.

A slip realization is mean + sum over active modes of z_k sqrt(lambda_k) v_k
with i.i.d. standard-normal coefficients z_k.  Mode 0 of the matrices built
here is close to a constant profile, so adding it mostly changes the total
slip; sampling therefore skips it by default and "m terms" means modes
1..m.  Pass skip_mode0=False (Gaussian case) to exercise the full
expansion, e.g. for covariance-reproduction checks.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .covariance import SlipDistribution
from .errors import (DegenerateTaperError, DomainError, NotPositiveSemidefiniteError,
                     SaturationError, TruncationError)
from .geometry import FaultModel
from .moment import DEFAULT_RIGIDITY, MomentSpec, magnitude_to_moment, seismic_moment

_EXP_MAX = 700.0  # largest exponent exp() handles in float64


@dataclass(frozen=True)
class KLBasis:
    """Descending eigenvalues and orthonormal eigenvector columns of a covariance."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    mean: np.ndarray
    kind: str = "gaussian"
    fault: FaultModel | None = None

    @property
    def n(self) -> int:
        return self.eigenvalues.size

    def mode(self, k: int) -> np.ndarray:
        return self.eigenvectors[:, k]

    def scaled_modes(self, indices) -> np.ndarray:
        """Columns sqrt(lambda_k) v_k for the given mode indices, shape (N, len(indices))."""
        idx = np.asarray(indices, dtype=int)
        return self.eigenvectors[:, idx] * np.sqrt(self.eigenvalues[idx])


@dataclass(frozen=True)
class Realization:
    """One slip realization and the coefficients that produced it."""

    z: np.ndarray
    m: int
    skip_mode0: bool
    slip: np.ndarray
    mw: float | None = None
    seed_info: tuple[int, int] | None = None


def eigendecompose(cov, mean=None, kind: str = "gaussian",
                   fault: FaultModel | None = None, rel_tol: float = 1e-8) -> KLBasis:
    """Symmetric eigendecomposition with descending eigenvalues.

    The input is symmetrized first.  Eigenvalues in [-rel_tol * lambda_max, 0)
    are clamped to zero; anything more negative raises.  Each eigenvector is
    normalized so its largest-magnitude component is positive; within
    degenerate eigenvalue groups the solver order is preserved.
    """
    cov = np.asarray(cov, dtype=float)
    if cov.ndim != 2 or cov.shape[0] != cov.shape[1]:
        raise DomainError("covariance must be a square matrix, got shape %s" % (cov.shape,))
    sym = 0.5 * (cov + cov.T)
    lam, vec = scipy.linalg.eigh(sym)
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    vec = vec[:, order]
    lam_max = max(float(lam[0]), 0.0)
    if lam[-1] < -rel_tol * max(lam_max, np.finfo(float).tiny):
        raise NotPositiveSemidefiniteError(
            "matrix has eigenvalue %g more negative than -%g * %g"
            % (lam[-1], rel_tol, lam_max))
    lam = np.maximum(lam, 0.0)
    peak = np.argmax(np.abs(vec), axis=0)
    signs = np.sign(vec[peak, np.arange(vec.shape[1])])
    signs[signs == 0] = 1.0
    vec = vec * signs
    if mean is None:
        mean = np.zeros(cov.shape[0])
    return KLBasis(eigenvalues=lam, eigenvectors=vec,
                   mean=np.asarray(mean, dtype=float), kind=kind, fault=fault)


def basis_for(dist: SlipDistribution, fault: FaultModel) -> KLBasis:
    """Eigenmode basis of a slip distribution's sampling covariance."""
    return eigendecompose(dist.sampling_cov, mean=dist.sampling_mean,
                          kind=dist.kind, fault=fault)


def active_modes(m: int, skip_mode0: bool, n: int) -> np.ndarray:
    """Mode indices contributing to an m-term expansion."""
    if m < 0:
        raise TruncationError("truncation must be non-negative, got %d" % m)
    if skip_mode0:
        if m > n - 1:
            raise TruncationError("m=%d terms with mode 0 skipped needs N >= %d" % (m, m + 1))
        return np.arange(1, m + 1)
    if m > n:
        raise TruncationError("m=%d exceeds basis size N=%d" % (m, n))
    return np.arange(0, m)


def _full_z(z, active: np.ndarray, n: int) -> np.ndarray:
    """Coefficient vector of length n with non-active entries zeroed."""
    z = np.asarray(z, dtype=float).ravel()
    if z.size > n:
        raise DomainError("coefficient vector longer than basis size %d" % n)
    full = np.zeros(n)
    full[:z.size] = z
    keep = np.zeros(n, dtype=bool)
    keep[active] = True
    full[~keep] = 0.0
    return full


def realize_gaussian(basis: KLBasis, z, m: int, skip_mode0: bool = True,
                     seed_info: tuple[int, int] | None = None) -> Realization:
    """Gaussian-field realization: mean + sum of active z_k sqrt(lambda_k) v_k.

    ``z`` is indexed by mode number; entries outside the active set are
    ignored (zeroed in the stored coefficient vector).
    """
    if basis.kind != "gaussian":
        raise DomainError("realize_gaussian needs a gaussian basis, got %r" % basis.kind)
    active = active_modes(m, skip_mode0, basis.n)
    zf = _full_z(z, active, basis.n)
    slip = basis.mean + basis.scaled_modes(active) @ zf[active]
    mw = None
    if basis.fault is not None:
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            m0 = seismic_moment(basis.fault, slip, MomentSpec())
        if m0 > 0:
            mw = (2.0 / 3.0) * (np.log10(m0) - 9.05)
    return Realization(z=zf, m=m, skip_mode0=skip_mode0, slip=slip, mw=mw,
                       seed_info=seed_info)


def realize_lognormal(basis: KLBasis, z, m: int, taper, fault: FaultModel,
                      target_mw: float, rigidity: float = DEFAULT_RIGIDITY,
                      seed_info: tuple[int, int] | None = None) -> Realization:
    """Lognormal-field realization with the target magnitude hit exactly.

    Exponentiates the zero-mean expansion over modes 1..m, multiplies by the
    taper profile, and rescales so the seismic moment matches the target.
    Mode 0 is always skipped; the overall scale it would carry is fixed by
    the rescaling instead.
    """
    if basis.kind != "lognormal":
        raise DomainError("realize_lognormal needs a lognormal basis, got %r" % basis.kind)
    taper = np.asarray(taper, dtype=float)
    if not np.any(taper > 0):
        raise DegenerateTaperError("taper is zero on every patch")
    active = active_modes(m, True, basis.n)
    zf = _full_z(z, active, basis.n)
    expo = basis.scaled_modes(active) @ zf[active]
    peak = float(np.max(expo, initial=0.0))
    if peak > _EXP_MAX:
        raise SaturationError("exponent %g overflows exp()" % peak)
    shaped = taper * np.exp(expo)
    m0 = rigidity * float(fault.areas() @ shaped)
    slip = shaped * (magnitude_to_moment(target_mw) / m0)
    return Realization(z=zf, m=m, skip_mode0=True, slip=slip, mw=target_mw,
                       seed_info=seed_info)


class ZStream:
    """Counter-based source of standard-normal coefficient vectors.

    Draws are pure functions of (seed, stream_id, draw index): the same
    triple always yields the same vector, independent of call order or of
    how draws are partitioned across workers.  Reproducibility is guaranteed
    within this implementation, not across libraries.
    """

    def __init__(self, seed: int, stream_id: int = 0):
        if seed < 0 or stream_id < 0:
            raise DomainError("seed and stream_id must be non-negative")
        if stream_id >= 2**32:
            raise DomainError("stream_id must fit in 32 bits")
        self.seed = int(seed)
        self.stream_id = int(stream_id)

    def generator(self, draw_index: int) -> np.random.Generator:
        if draw_index < 0 or draw_index >= 2**32:
            raise DomainError("draw index must fit in 32 bits")
        key = np.array([self.seed & 0xFFFFFFFFFFFFFFFF,
                        (self.stream_id << 32) | draw_index], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


def draw_z(stream: ZStream, n_active: int, draw_index: int = 0) -> np.ndarray:
    """i.i.d. N(0,1) coefficients for one draw of the stream."""
    if n_active < 0:
        raise DomainError("n_active must be non-negative")
    if n_active == 0:
        return np.empty(0)
    return stream.generator(draw_index).standard_normal(n_active)


def draw_z_block(stream: ZStream, n_active: int, start: int, count: int) -> np.ndarray:
    """(count, n_active) matrix with row r equal to draw_z(..., start + r)."""
    out = np.empty((count, n_active))
    for r in range(count):
        out[r] = draw_z(stream, n_active, start + r)
    return out
