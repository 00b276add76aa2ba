"""Fault discretizations, observation grids, and inter-patch distances.

All coordinates live in a local flat Cartesian frame in meters with x east
and y north.  Strike is measured clockwise from north, so the horizontal
unit vector along strike is (sin(strike), cos(strike)) and the down-dip
horizontal direction is (cos(strike), -sin(strike)).  Patch depth refers to
the patch centroid and is positive downward.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .errors import FormatError, InvalidGeometryError, InvalidGridError

EARTH_RADIUS_M = 6.371e6

# columns required in fault CSV files, after the two position columns
_BODY_COLUMNS = ("depth_m", "strike_deg", "dip_deg", "rake_deg", "length_m", "width_m")


@dataclass(frozen=True)
class SubfaultPatch:
    """One rectangular fault patch with uniform slip in the rake direction."""

    centroid_x: float
    centroid_y: float
    depth: float
    strike: float
    dip: float
    rake: float
    length: float
    width: float

    def __post_init__(self):
        if not self.depth > 0:
            raise InvalidGeometryError("patch depth must be positive, got %g" % self.depth)
        if not self.length > 0 or not self.width > 0:
            raise InvalidGeometryError(
                "patch dimensions must be positive, got length=%g width=%g"
                % (self.length, self.width))
        if not 0.0 < self.dip <= 90.0:
            raise InvalidGeometryError("dip must lie in (0, 90], got %g" % self.dip)

    @property
    def area(self) -> float:
        return self.length * self.width

    @property
    def top_depth(self) -> float:
        """Depth of the up-dip edge."""
        return self.depth - 0.5 * self.width * math.sin(math.radians(self.dip))

    @property
    def bottom_depth(self) -> float:
        """Depth of the down-dip edge."""
        return self.depth + 0.5 * self.width * math.sin(math.radians(self.dip))

    def bottom_center(self) -> tuple[float, float, float]:
        """(x, y, depth) of the midpoint of the down-dip edge."""
        phi = math.radians(self.strike)
        delta = math.radians(self.dip)
        off = 0.5 * self.width * math.cos(delta)
        return (self.centroid_x + off * math.cos(phi),
                self.centroid_y - off * math.sin(phi),
                self.depth + 0.5 * self.width * math.sin(delta))


@dataclass(frozen=True)
class FaultModel:
    """Ordered collection of subfault patches; all slip vectors index against it."""

    patches: tuple[SubfaultPatch, ...]
    label: str = "fault"

    def __post_init__(self):
        if len(self.patches) < 1:
            raise InvalidGeometryError("a fault needs at least one patch")

    @property
    def n(self) -> int:
        return len(self.patches)

    def centroids(self) -> np.ndarray:
        """(N, 3) array of (x, y, depth)."""
        return np.array([(p.centroid_x, p.centroid_y, p.depth) for p in self.patches])

    def depths(self) -> np.ndarray:
        return np.array([p.depth for p in self.patches])

    def dips(self) -> np.ndarray:
        return np.array([p.dip for p in self.patches])

    def areas(self) -> np.ndarray:
        return np.array([p.area for p in self.patches])


@dataclass(frozen=True)
class PatchDistance:
    """Inter-patch separation split into strike and dip components."""

    euclidean: float
    d_strike: float
    d_dip: float


@dataclass(frozen=True)
class DeformGrid:
    """Observation points on the free surface.

    ``points`` has shape (N_B, 2).  For a transect grid (kind="line") all
    y entries are equal and ``dx`` is the spacing; for a mesh grid the
    points are ordered x-fastest and both ``dx`` and ``dy`` are set.
    """

    points: np.ndarray
    kind: str = "line"
    nx: int | None = None
    ny: int | None = None
    dx: float | None = None
    dy: float | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 1:
            raise InvalidGridError("grid points must form an (N_B, 2) array")
        if len(np.unique(pts, axis=0)) != len(pts):
            raise InvalidGridError("grid points must be distinct")
        object.__setattr__(self, "points", pts)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def x(self) -> np.ndarray:
        return self.points[:, 0]

    @property
    def y(self) -> np.ndarray:
        return self.points[:, 1]


def build_1d_fault(width: float, dip: float, top_depth: float, n_patches: int,
                   strike_length: float = 1.0e6, label: str = "fault-1d") -> FaultModel:
    """Discretize a long strike-uniform fault into down-dip strips.

    Each of the ``n_patches`` strips spans the full ``strike_length`` and a
    down-dip extent width/n_patches.  The fault strikes north with the
    up-dip edge projecting to x = 0, dips east, and has rake fixed at 90
    degrees.  The strike midpoint sits at y = 0 so a transect along y = 0
    sees the fault as effectively infinite in strike.
    """
    if n_patches < 1:
        raise InvalidGeometryError("n_patches must be >= 1, got %d" % n_patches)
    if width <= 0 or strike_length <= 0 or top_depth <= 0:
        raise InvalidGeometryError(
            "fault dimensions must be positive, got width=%g strike_length=%g top_depth=%g"
            % (width, strike_length, top_depth))
    delta = math.radians(dip)
    dw = width / n_patches
    patches = []
    for i in range(n_patches):
        downdip = (i + 0.5) * dw
        patches.append(SubfaultPatch(
            centroid_x=downdip * math.cos(delta),
            centroid_y=0.0,
            depth=top_depth + downdip * math.sin(delta),
            strike=0.0,
            dip=dip,
            rake=90.0,
            length=strike_length,
            width=dw,
        ))
    return FaultModel(patches=tuple(patches), label=label)


def _project_lonlat(lon: np.ndarray, lat: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Equirectangular projection about the mean coordinate, in meters."""
    lon0 = float(np.mean(lon))
    lat0 = float(np.mean(lat))
    x = EARTH_RADIUS_M * math.cos(math.radians(lat0)) * np.radians(lon - lon0)
    y = EARTH_RADIUS_M * np.radians(lat - lat0)
    return x, y


def load_fault(path, depth_reference: str = "centroid", label: str | None = None) -> FaultModel:
    """Read a fault CSV file (see the schema in the package README).

    The position columns are either ``x_m,y_m`` (local Cartesian meters) or
    ``lon,lat`` (converted with a single-reference-point equirectangular
    projection).  ``depth_reference`` declares whether the depth column is
    the patch centroid depth ("centroid") or the up-dip edge depth ("top").
    """
    if depth_reference not in ("centroid", "top"):
        raise FormatError("depth_reference must be 'centroid' or 'top', got %r" % depth_reference)
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FormatError("empty fault file", line=1) from None
        header = [h.strip() for h in header]
        if header[:2] == ["x_m", "y_m"]:
            lonlat = False
        elif header[:2] == ["lon", "lat"]:
            lonlat = True
        else:
            raise FormatError("first columns must be x_m,y_m or lon,lat", line=1)
        if tuple(header[2:8]) != _BODY_COLUMNS:
            raise FormatError(
                "columns 3-8 must be %s" % ",".join(_BODY_COLUMNS), line=1)
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) < 8:
                raise FormatError("expected 8 columns, got %d" % len(row), line=lineno)
            try:
                values = [float(c) for c in row[:8]]
            except ValueError as exc:
                raise FormatError(str(exc), line=lineno) from None
            rows.append((lineno, values))
    if not rows:
        raise FormatError("no patch rows in fault file", line=1)

    arr = np.array([v for _, v in rows])
    if lonlat:
        xs, ys = _project_lonlat(arr[:, 0], arr[:, 1])
    else:
        xs, ys = arr[:, 0], arr[:, 1]

    patches = []
    for k, (lineno, _) in enumerate(rows):
        depth = arr[k, 2]
        if depth_reference == "top":
            depth = depth + 0.5 * arr[k, 7] * math.sin(math.radians(arr[k, 4]))
        try:
            patches.append(SubfaultPatch(
                centroid_x=float(xs[k]), centroid_y=float(ys[k]), depth=float(depth),
                strike=float(arr[k, 3] % 360.0), dip=float(arr[k, 4]), rake=float(arr[k, 5]),
                length=float(arr[k, 6]), width=float(arr[k, 7]),
            ))
        except InvalidGeometryError as exc:
            raise InvalidGeometryError("patch %d (line %d): %s" % (k, lineno, exc)) from None
    return FaultModel(patches=tuple(patches), label=label or str(path))


def _split_distance(d_euclid, d_depth, mean_dip_deg):
    """Decompose a separation into dip and strike components.

    Down-dip separation is depth difference divided by sin of the mean dip,
    clamped so the component never exceeds the full distance; the strike
    component takes up the remainder.
    """
    d_dip = d_depth / np.sin(np.radians(mean_dip_deg))
    d_dip = np.minimum(d_dip, d_euclid)
    d_strike = np.sqrt(np.maximum(0.0, d_euclid**2 - d_dip**2))
    return d_strike, d_dip


def patch_distance(fault: FaultModel, i: int, j: int) -> PatchDistance:
    """Euclidean, along-strike, and down-dip distance between patch centroids."""
    pi, pj = fault.patches[i], fault.patches[j]
    d = math.sqrt((pi.centroid_x - pj.centroid_x)**2
                  + (pi.centroid_y - pj.centroid_y)**2
                  + (pi.depth - pj.depth)**2)
    d_strike, d_dip = _split_distance(d, abs(pi.depth - pj.depth), 0.5 * (pi.dip + pj.dip))
    return PatchDistance(euclidean=d, d_strike=float(d_strike), d_dip=float(d_dip))


def distance_matrices(fault: FaultModel) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(euclidean, strike, dip) N-by-N distance matrices for all patch pairs."""
    c = fault.centroids()
    diff = c[:, None, :] - c[None, :, :]
    d = np.sqrt((diff**2).sum(axis=2))
    depths = fault.depths()
    dips = fault.dips()
    mean_dip = 0.5 * (dips[:, None] + dips[None, :])
    d_strike, d_dip = _split_distance(d, np.abs(depths[:, None] - depths[None, :]), mean_dip)
    return d, d_strike, d_dip


def surface_extent(fault: FaultModel) -> tuple[float, float, float, float]:
    """Bounding box (x_min, x_max, y_min, y_max) of all patch corners' surface projection."""
    xs, ys = [], []
    for p in fault.patches:
        phi = math.radians(p.strike)
        delta = math.radians(p.dip)
        sv = np.array([math.sin(phi), math.cos(phi)])
        dv = np.array([math.cos(phi), -math.sin(phi)])
        c = np.array([p.centroid_x, p.centroid_y])
        for a in (-0.5, 0.5):
            for b in (-0.5, 0.5):
                corner = c + a * p.length * sv + b * p.width * math.cos(delta) * dv
                xs.append(corner[0])
                ys.append(corner[1])
    return min(xs), max(xs), min(ys), max(ys)


def build_grid_1d(fault: FaultModel, margin: float, n_points: int) -> DeformGrid:
    """Uniform transect through the fault's strike midpoint.

    Covers the fault's down-dip surface projection plus ``margin`` on each
    side, at the mean strike-midpoint y of the fault (y = 0 for faults from
    :func:`build_1d_fault`).
    """
    if n_points < 2:
        raise InvalidGridError("a transect needs at least 2 points")
    x_min, x_max, _, _ = surface_extent(fault)
    if margin < 0 or x_max - x_min + 2 * margin <= 0:
        raise InvalidGridError("degenerate transect bounds")
    y0 = float(np.mean([p.centroid_y for p in fault.patches]))
    x = np.linspace(x_min - margin, x_max + margin, n_points)
    pts = np.column_stack([x, np.full(n_points, y0)])
    return DeformGrid(points=pts, kind="line", nx=n_points, ny=1,
                      dx=float(x[1] - x[0]), dy=None)


def build_grid_2d(bounds: tuple[float, float, float, float], nx: int, ny: int) -> DeformGrid:
    """Uniform mesh over (x_min, x_max, y_min, y_max), points ordered x-fastest."""
    x_min, x_max, y_min, y_max = bounds
    if nx < 2 or ny < 2:
        raise InvalidGridError("a mesh needs nx, ny >= 2")
    if x_max <= x_min or y_max <= y_min:
        raise InvalidGridError("degenerate mesh bounds")
    x = np.linspace(x_min, x_max, nx)
    y = np.linspace(y_min, y_max, ny)
    xx, yy = np.meshgrid(x, y)
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    return DeformGrid(points=pts, kind="mesh", nx=nx, ny=ny,
                      dx=float(x[1] - x[0]), dy=float(y[1] - y[0]))
