"""Run configuration: JSON schema parsing and pipeline assembly.

A run config is one JSON document naming the fault source, taper, ACF,
distribution, grid, proxy locations, truncation list, sample count, and
seed.  Relative file paths resolve against the config file's directory, so
the bundled example configs work from any working directory.
"""

from __future__ import annotations

import json
import math
import pathlib
from dataclasses import dataclass, field

import numpy as np

from .covariance import AcfSpec, SlipDistribution, TaperSpec, build_distribution
from .errors import ConfigError, DomainError
from .geometry import DeformGrid, FaultModel, build_1d_fault, build_grid_1d, build_grid_2d, load_fault
from .klbasis import KLBasis, basis_for
from .moment import DEFAULT_RIGIDITY
from .okada import (DEFAULT_POISSON, UnitSourceBank, build_bank, fault_hash, grid_hash,
                    load_bank, save_bank)
from .proxies import ProxyConfig
from .ptha_stats import DEFAULT_CHUNK, EnsemblePipeline


@dataclass(frozen=True)
class RunConfig:
    """Validated run parameters; see data/paper_1d.json for the schema."""

    label: str
    fault_kind: str                      # "builtin_1d" | "csv"
    fault_params: dict
    taper: TaperSpec
    acf: AcfSpec
    alpha: float
    distribution: str
    target_mw: float
    rigidity: float
    poisson: float
    grid_params: dict
    proxy: ProxyConfig
    truncations: tuple[int, ...]
    n_samples: int
    n_modes: int
    seed: int
    extreme_depth: float | None
    extreme_energy: float | None
    chunk: int
    base_dir: pathlib.Path


@dataclass
class Pipeline:
    """Everything a command needs, built once from a RunConfig."""

    config: RunConfig
    fault: FaultModel
    dist: SlipDistribution
    basis: KLBasis
    grid: DeformGrid
    bank: UnitSourceBank

    @property
    def ensemble(self) -> EnsemblePipeline:
        return EnsemblePipeline(fault=self.fault, bank=self.bank, basis=self.basis,
                                proxy=self.config.proxy, taper=self.dist.taper,
                                target_mw=self.config.target_mw,
                                rigidity=self.config.rigidity)


def _require(doc: dict, key: str, where: str = "config"):
    if key not in doc:
        raise ConfigError("%s is missing %r" % (where, key))
    return doc[key]


def _number(doc: dict, key: str, where: str, default=None):
    if key not in doc:
        if default is None:
            raise ConfigError("%s is missing %r" % (where, key))
        return default
    value = doc[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError("%s.%s must be a number" % (where, key))
    return float(value)


def load_config(path) -> RunConfig:
    """Parse and validate a JSON run config."""
    path = pathlib.Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc)) from None
    except json.JSONDecodeError as exc:
        raise ConfigError("config %s is not valid JSON: %s" % (path, exc)) from None
    base = path.resolve().parent

    fault_doc = _require(doc, "fault")
    if "builtin_1d" in fault_doc:
        fault_kind = "builtin_1d"
        fp = dict(fault_doc["builtin_1d"])
        for key in ("width_m", "dip_deg", "top_depth_m", "n_patches"):
            _require(fp, key, "fault.builtin_1d")
    elif "csv" in fault_doc:
        fault_kind = "csv"
        fp = {"csv": fault_doc["csv"],
              "depth_reference": fault_doc.get("depth_reference", "centroid")}
        csv_path = base / fp["csv"]
        if not csv_path.exists():
            raise ConfigError("fault file %s does not exist" % csv_path)
        fp["csv"] = str(csv_path)
    else:
        raise ConfigError("fault must give either builtin_1d or csv")

    taper_doc = _require(doc, "taper")
    taper = TaperSpec(d_max=_number(taper_doc, "d_max_m", "taper"),
                      steepness=_number(taper_doc, "steepness", "taper", 20.0))

    acf_doc = _require(doc, "acf")
    kind = acf_doc.get("kind", "exponential")
    if "r0_m" in acf_doc:
        acf = AcfSpec(kind=kind, r0=_number(acf_doc, "r0_m", "acf"))
    else:
        acf = AcfSpec(kind=kind,
                      r_strike=_number(acf_doc, "r_strike_m", "acf"),
                      r_dip=_number(acf_doc, "r_dip_m", "acf"))

    distribution = _require(doc, "distribution")
    if distribution not in ("gaussian", "lognormal"):
        raise ConfigError("distribution must be gaussian or lognormal, got %r" % distribution)

    grid_doc = _require(doc, "grid")
    grid_kind = grid_doc.get("kind", "line")
    if grid_kind == "line":
        gp = {"kind": "line",
              "margin_m": _number(grid_doc, "margin_m", "grid", 100.0e3),
              "n_points": int(_number(grid_doc, "n_points", "grid"))}
    elif grid_kind == "mesh":
        gp = {"kind": "mesh"}
        for key in ("x_min_m", "x_max_m", "y_min_m", "y_max_m"):
            gp[key] = _number(grid_doc, key, "grid")
        gp["nx"] = int(_number(grid_doc, "nx", "grid"))
        gp["ny"] = int(_number(grid_doc, "ny", "grid"))
    else:
        raise ConfigError("grid.kind must be line or mesh, got %r" % grid_kind)

    proxy_doc = _require(doc, "proxy")
    try:
        proxy = ProxyConfig(
            shore_x=_number(proxy_doc, "shore_x_m", "proxy"),
            shore_y=_number(proxy_doc, "shore_y_m", "proxy", 0.0),
            coast_x=_number(proxy_doc, "coast_x_m", "proxy"),
            rho=_number(proxy_doc, "water_density", "proxy", 1000.0),
            gravity=_number(proxy_doc, "gravity", "proxy", 9.81),
            strike_extent=_number(proxy_doc, "strike_extent_m", "proxy", 100.0e3),
        )
    except DomainError as exc:
        raise ConfigError(str(exc)) from None

    truncations = _require(doc, "truncations")
    if (not isinstance(truncations, list) or not truncations
            or not all(isinstance(m, int) and m >= 0 for m in truncations)):
        raise ConfigError("truncations must be a non-empty list of non-negative integers")

    n_samples = int(_number(doc, "n_samples", "config", 20000))
    if n_samples < 1:
        raise ConfigError("n_samples must be >= 1")
    seed = int(_number(doc, "seed", "config", 0))
    if seed < 0:
        raise ConfigError("seed must be non-negative")

    extremes = doc.get("extremes", {})

    return RunConfig(
        label=str(doc.get("label", path.stem)),
        fault_kind=fault_kind,
        fault_params=fp,
        taper=taper,
        acf=acf,
        alpha=_number(doc, "alpha", "config"),
        distribution=distribution,
        target_mw=_number(doc, "target_mw", "config"),
        rigidity=_number(doc, "rigidity_pa", "config", DEFAULT_RIGIDITY),
        poisson=_number(doc, "poisson", "config", DEFAULT_POISSON),
        grid_params=gp,
        proxy=proxy,
        truncations=tuple(truncations),
        n_samples=n_samples,
        n_modes=int(_number(doc, "n_modes", "config", 8)),
        seed=seed,
        extreme_depth=(_number(extremes, "depth_m", "extremes")
                       if "depth_m" in extremes else None),
        extreme_energy=(_number(extremes, "energy_pj", "extremes")
                        if "energy_pj" in extremes else None),
        chunk=int(_number(doc, "chunk", "config", DEFAULT_CHUNK)),
        base_dir=base,
    )


def build_fault(cfg: RunConfig) -> FaultModel:
    if cfg.fault_kind == "builtin_1d":
        fp = cfg.fault_params
        return build_1d_fault(width=fp["width_m"], dip=fp["dip_deg"],
                              top_depth=fp["top_depth_m"], n_patches=int(fp["n_patches"]),
                              strike_length=fp.get("strike_length_m", 1.0e6),
                              label=cfg.label)
    return load_fault(cfg.fault_params["csv"],
                      depth_reference=cfg.fault_params["depth_reference"],
                      label=cfg.label)


def build_grid(cfg: RunConfig, fault: FaultModel) -> DeformGrid:
    gp = cfg.grid_params
    if gp["kind"] == "line":
        return build_grid_1d(fault, gp["margin_m"], gp["n_points"])
    return build_grid_2d((gp["x_min_m"], gp["x_max_m"], gp["y_min_m"], gp["y_max_m"]),
                         gp["nx"], gp["ny"])


def bank_cache_name(fault: FaultModel, grid: DeformGrid, poisson: float) -> str:
    return "bank_%s_%s_p%g.npz" % (fault_hash(fault)[:12], grid_hash(grid)[:12], poisson)


def build_pipeline(cfg: RunConfig, cache_dir=None, workers: int | None = None) -> Pipeline:
    """Build fault, distribution, basis, grid, and bank (honoring a cache dir)."""
    fault = build_fault(cfg)
    max_m = max(cfg.truncations)
    if max_m > fault.n - 1:
        raise ConfigError("truncation %d exceeds the %d usable modes of a %d-patch fault"
                          % (max_m, fault.n - 1, fault.n))
    dist = build_distribution(fault, cfg.taper, cfg.acf, cfg.alpha, cfg.distribution,
                              cfg.target_mw, cfg.rigidity)
    basis = basis_for(dist, fault)
    grid = build_grid(cfg, fault)
    bank = None
    cache_path = None
    if cache_dir is not None:
        cache_path = pathlib.Path(cache_dir) / bank_cache_name(fault, grid, cfg.poisson)
        if cache_path.exists():
            bank = load_bank(cache_path, fault, grid, cfg.poisson)
    if bank is None:
        bank = build_bank(fault, grid, poisson=cfg.poisson, workers=workers)
        if cache_path is not None:
            cache_path.parent.mkdir(parents=True, exist_ok=True)
            save_bank(bank, cache_path)
    return Pipeline(config=cfg, fault=fault, dist=dist, basis=basis, grid=grid, bank=bank)


def bundled_config(name: str) -> pathlib.Path:
    """Path of a packaged example config (e.g. "paper_1d")."""
    here = pathlib.Path(__file__).resolve().parent / "data" / (name + ".json")
    if not here.exists():
        raise ConfigError("no bundled config named %r" % name)
    return here
