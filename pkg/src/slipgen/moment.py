"""Seismic moment, moment magnitude, and rescaling to a target magnitude."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .geometry import FaultModel

DEFAULT_RIGIDITY = 3.55e10  # Pa


@dataclass(frozen=True)
class MomentSpec:
    rigidity: float = DEFAULT_RIGIDITY

    def __post_init__(self):
        if not self.rigidity > 0:
            raise DomainError("rigidity must be positive, got %g" % self.rigidity)


def seismic_moment(fault: FaultModel, slip, spec: MomentSpec = MomentSpec()) -> float:
    """Seismic moment in N*m: rigidity times the area-weighted sum of slip.

    Computed patch by patch, so mixed patch areas are handled consistently.
    Negative slip entries (possible for Gaussian fields) contribute with
    their sign and trigger a warning.
    """
    slip = np.asarray(slip, dtype=float)
    if slip.shape != (fault.n,):
        raise DomainError("slip vector length %d does not match N=%d" % (slip.size, fault.n))
    if np.any(slip < 0):
        warnings.warn("slip vector has negative entries; moment includes them with sign",
                      stacklevel=2)
    return spec.rigidity * float(fault.areas() @ slip)


def moment_magnitude(m0: float) -> float:
    """Moment magnitude Mw = (2/3) (log10(M0) - 9.05)."""
    if not m0 > 0:
        raise DomainError("moment must be positive, got %g" % m0)
    return (2.0 / 3.0) * (math.log10(m0) - 9.05)


def magnitude_to_moment(mw: float) -> float:
    """Inverse of :func:`moment_magnitude`."""
    return 10.0 ** (1.5 * mw + 9.05)


def rescale_to_magnitude(fault: FaultModel, slip, target_mw: float,
                         spec: MomentSpec = MomentSpec()) -> np.ndarray:
    """Multiply a slip vector by the scalar that gives it the target magnitude."""
    slip = np.asarray(slip, dtype=float)
    m0 = seismic_moment(fault, slip, spec)
    if not m0 > 0:
        raise DomainError("cannot rescale a slip vector with non-positive moment (M0=%g)" % m0)
    return slip * (magnitude_to_moment(target_mw) / m0)
