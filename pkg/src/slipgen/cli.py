"""Command-line pipeline driver.

Subcommands::

    slipgen modes    --config cfg.json [--out dir] [--workers k] [--seed s]
    slipgen sample   --config cfg.json --count n [...]
    slipgen ensemble --config cfg.json [...]
    slipgen bank     --config cfg.json [...]

Every command is a pure function of (config, seed): re-running writes
byte-identical CSV files, at any worker count.  The unit-source bank is
cached in the output directory and reused whenever fault, grid, and elastic
parameters match.  Exit codes: 0 success, 1 config error, 2 numerical
error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import dataclasses
import pathlib
import sys
import time

import numpy as np

from . import plots
from .config import Pipeline, RunConfig, bank_cache_name, build_pipeline, load_config
from .errors import ConfigError, DegenerateSampleError, NumericalError, SlipgenError
from .klbasis import ZStream, draw_z, realize_gaussian, realize_lognormal
from .okada import deform, fault_hash, grid_hash
from .proxies import shore_density
from .ptha_stats import extreme_mask, hazard_curve, kde_1d, kde_2d, run_ensemble

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NUMERICAL = 2
EXIT_IO = 3

_PROXY_COLUMNS = (("dB_shore", "db_shore"), ("E_PJ", "energy_pj"),
                  ("eta_max", "eta_max"), ("D", "depth_proxy"))


def _fmt(value) -> str:
    """Shortest exact decimal form; stable across runs."""
    return repr(float(value))


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(cell if isinstance(cell, str) else _fmt(cell)
                              for cell in row) + "\n")


def _patch_rows(fault, values):
    c = fault.centroids()
    for i in range(fault.n):
        yield (str(i), c[i, 0], c[i, 1], c[i, 2], values[i])


def _deform_rows(grid, dz):
    if grid.kind == "line":
        for i in range(grid.n_points):
            yield (grid.x[i], dz[i])
    else:
        for i in range(grid.n_points):
            yield (grid.x[i], grid.y[i], dz[i])


def _deform_header(grid):
    return ["x_m", "dz_m"] if grid.kind == "line" else ["x_m", "y_m", "dz_m"]


def cmd_modes(pipe: Pipeline, out: pathlib.Path) -> list[pathlib.Path]:
    """Eigenvalue spectrum and the first n_modes eigenvectors, as CSV + SVG."""
    cfg = pipe.config
    basis = pipe.basis
    written = []

    spec_csv = out / "eigenvalues.csv"
    write_csv(spec_csv, ["k", "lambda"],
              ((str(k), basis.eigenvalues[k]) for k in range(basis.n)))
    written.append(spec_csv)
    plots.plot_eigenvalues(basis.eigenvalues, out / "eigenvalues.svg", title=cfg.label)

    for k in range(min(cfg.n_modes, basis.n)):
        mode_csv = out / ("mode_%03d.csv" % k)
        write_csv(mode_csv, ["patch", "x_m", "y_m", "depth_m", "value"],
                  _patch_rows(pipe.fault, basis.mode(k)))
        written.append(mode_csv)
        svg = out / ("mode_%03d.svg" % k)
        if pipe.grid.kind == "line":
            plots.plot_mode_1d(pipe.fault, basis.mode(k), k, svg, taper=pipe.dist.taper)
        else:
            plots.plot_mode_2d(pipe.fault, basis.mode(k), k, svg)
    return written


def _realize(pipe: Pipeline, z, m):
    if pipe.config.distribution == "gaussian":
        return realize_gaussian(pipe.basis, z, m)
    return realize_lognormal(pipe.basis, z, m, pipe.dist.taper, pipe.fault,
                             pipe.config.target_mw, pipe.config.rigidity)


def cmd_sample(pipe: Pipeline, out: pathlib.Path, count: int) -> list[pathlib.Path]:
    """Slip + deformation files for ``count`` draws at every truncation.

    All truncations of one draw share the same coefficients, so a smaller m
    is literally the truncation of the larger-m realization.
    """
    cfg = pipe.config
    stream = ZStream(cfg.seed)
    n_draw = max(cfg.truncations)
    written = []
    for d in range(count):
        z = draw_z(stream, n_draw, draw_index=d)
        z_by_mode = np.zeros(n_draw + 1)
        z_by_mode[1:] = z                      # mode 0 stays off
        slips, deforms = {}, {}
        for m in cfg.truncations:
            real = _realize(pipe, z_by_mode, m)
            dz = deform(pipe.bank, real.slip).dz
            slips[m], deforms[m] = real.slip, dz
            slip_csv = out / ("sample_d%03d_m%d_slip.csv" % (d, m))
            write_csv(slip_csv, ["patch", "x_m", "y_m", "depth_m", "slip_m"],
                      _patch_rows(pipe.fault, real.slip))
            deform_csv = out / ("sample_d%03d_m%d_deform.csv" % (d, m))
            write_csv(deform_csv, _deform_header(pipe.grid),
                      _deform_rows(pipe.grid, dz))
            written.extend([slip_csv, deform_csv])
        svg = out / ("sample_d%03d.svg" % d)
        label = "%s draw %d" % (cfg.label, d)
        if pipe.grid.kind == "line":
            plots.plot_slip_deform_1d(pipe.fault, pipe.grid, slips, deforms, svg, label)
        else:
            plots.plot_slip_deform_2d(pipe.fault, pipe.grid, slips, deforms, svg, label)
    return written


def _proxy_series(ens):
    return [(name, getattr(ens, attr)) for name, attr in _PROXY_COLUMNS]


def _threshold_predicate(attr, threshold):
    field = {"depth_proxy": "depth_proxy", "energy_pj": "energy_pj"}[attr]
    return lambda proxies: getattr(proxies, field) > threshold


def cmd_ensemble(pipe: Pipeline, out: pathlib.Path) -> list[pathlib.Path]:
    """Monte Carlo proxy tables, densities, hazard curves, and extreme scatters."""
    cfg = pipe.config
    written = []
    skipped = []
    t_start = time.perf_counter()
    ensembles = {}
    for m in cfg.truncations:
        t0 = time.perf_counter()
        ens = run_ensemble(pipe.ensemble, cfg.n_samples, m, cfg.seed, chunk=cfg.chunk)
        ensembles[m] = ens
        print("truncation m=%d: %d draws in %.1f s"
              % (m, cfg.n_samples, time.perf_counter() - t0))

        table_csv = out / ("proxies_m%d.csv" % m)
        header = (["draw_index"] + ["z_%d" % k for k in range(1, m + 1)]
                  + [name for name, _ in _PROXY_COLUMNS])
        write_csv(table_csv, header,
                  ((str(i),) + tuple(ens.z_rows[i]) +
                   (ens.db_shore[i], ens.energy_pj[i], ens.eta_max[i], ens.depth_proxy[i])
                   for i in range(ens.n_s)))
        written.append(table_csv)

        for name, samples in _proxy_series(ens):
            try:
                est = kde_1d(samples)
            except DegenerateSampleError as exc:
                skipped.append("kde %s m=%d: %s" % (name, m, exc))
                continue
            kde_csv = out / ("kde_%s_m%d.csv" % (name, m))
            write_csv(kde_csv, ["x", "density"], zip(est.grid, est.values))
            written.append(kde_csv)

        for yname, yattr in (("E_PJ", "energy_pj"), ("dB_shore", "db_shore")):
            try:
                est = kde_2d(ens.eta_max, getattr(ens, yattr))
            except DegenerateSampleError as exc:
                skipped.append("joint kde eta_max/%s m=%d: %s" % (yname, m, exc))
                continue
            gx, gy = est.grid
            joint_csv = out / ("kde_joint_eta_max_%s_m%d.csv" % (yname, m))
            write_csv(joint_csv, ["x", "y", "density"],
                      ((gx[i], gy[j], est.values[i, j])
                       for i in range(gx.size) for j in range(gy.size)))
            written.append(joint_csv)
            plots.plot_joint(est.grid, est.values,
                             out / ("kde_joint_eta_max_%s_m%d.svg" % (yname, m)),
                             "eta_max (m)", yname, title="%s m=%d" % (cfg.label, m))

        hc = hazard_curve(ens.depth_proxy)
        hazard_csv = out / ("hazard_D_m%d.csv" % m)
        write_csv(hazard_csv, ["level_m", "prob"], zip(hc.levels, hc.probabilities))
        written.append(hazard_csv)

        if cfg.distribution == "gaussian":
            sd = shore_density(pipe.bank, pipe.basis, pipe.dist.mean, m, cfg.proxy)
            if sd.variance > 0:
                span = 4.0 * sd.std
                x = np.linspace(sd.mean - span, sd.mean + span, 200)
                dens_csv = out / ("shore_density_m%d.csv" % m)
                write_csv(dens_csv, ["x", "density"], zip(x, sd.pdf(x)))
                written.append(dens_csv)

        for tag, threshold, attr, unit in (
                ("depth", cfg.extreme_depth, "depth_proxy", "D"),
                ("energy", cfg.extreme_energy, "energy_pj", "E_PJ")):
            if threshold is None or m < 1:
                continue
            mask = extreme_mask(ens, _threshold_predicate(attr, threshold))
            rows = ens.z_rows[mask]
            idx = np.nonzero(mask)[0]
            vals = ens.proxy_column(attr)[mask]
            ex_csv = out / ("extreme_%s_m%d.csv" % (tag, m))
            write_csv(ex_csv,
                      ["draw_index"] + ["z%d" % k for k in range(1, m + 1)] + ["proxy_value"],
                      ((str(idx[i]),) + tuple(rows[i]) + (vals[i],) for i in range(idx.size)))
            written.append(ex_csv)
            if m >= 2:
                plots.plot_extreme_scatter(
                    rows[:, :2], out / ("extreme_%s_m%d.svg" % (tag, m)),
                    title="%s > %g, m=%d (%d events)" % (unit, threshold, m, idx.size))

    for name, attr in _PROXY_COLUMNS:
        curves = []
        for m in cfg.truncations:
            try:
                est = kde_1d(ensembles[m].proxy_column(attr))
            except DegenerateSampleError:
                continue
            curves.append(("m=%d" % m, est.grid, est.values))
        if not curves:
            continue
        exact = None
        if name == "dB_shore" and cfg.distribution == "gaussian":
            sd = shore_density(pipe.bank, pipe.basis, pipe.dist.mean,
                               max(cfg.truncations), cfg.proxy)
            if sd.variance > 0:
                x = np.linspace(sd.mean - 4 * sd.std, sd.mean + 4 * sd.std, 200)
                exact = (x, sd.pdf(x))
        plots.plot_densities(curves, out / ("density_%s.svg" % name), name, exact=exact)

    hazard_plot_curves = []
    for m in cfg.truncations:
        hc = hazard_curve(ensembles[m].depth_proxy)
        hazard_plot_curves.append(("m=%d" % m, hc.levels, hc.probabilities))
    plots.plot_hazard(hazard_plot_curves, out / "hazard_D.svg")

    for line in skipped:
        print("skipped:", line, file=sys.stderr)
    print("ensemble command finished in %.1f s" % (time.perf_counter() - t_start))
    return written


def cmd_bank(pipe: Pipeline, out: pathlib.Path) -> list[pathlib.Path]:
    """Report the cached unit-source bank (building it happened in setup)."""
    path = out / bank_cache_name(pipe.fault, pipe.grid, pipe.config.poisson)
    print("bank: %d columns x %d points" % (pipe.bank.n_columns, pipe.grid.n_points))
    print("fault hash: %s" % fault_hash(pipe.fault))
    print("grid hash:  %s" % grid_hash(pipe.grid))
    print("cache file: %s" % path)
    return [path]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="slipgen",
        description="Random slip realizations, seafloor deformation, and "
                    "tsunami-proxy Monte Carlo statistics.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("modes", "export eigenvalues and eigenmodes"),
                            ("sample", "export slip/deformation realizations"),
                            ("ensemble", "run Monte Carlo ensembles and statistics"),
                            ("bank", "build and cache the unit-source bank")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="JSON run configuration")
        p.add_argument("--out", default="out", help="output directory (default: ./out)")
        p.add_argument("--workers", type=int, default=None,
                       help="worker threads for bank construction")
        p.add_argument("--seed", type=int, default=None, help="override the config seed")
        if name == "sample":
            p.add_argument("--count", type=int, required=True, help="number of draws")
    args = parser.parse_args(argv)

    try:
        cfg = load_config(args.config)
        if args.seed is not None:
            if args.seed < 0:
                raise ConfigError("seed must be non-negative")
            cfg = dataclasses.replace(cfg, seed=args.seed)
        out = pathlib.Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        pipe = build_pipeline(cfg, cache_dir=out, workers=args.workers)
        if args.command == "modes":
            cmd_modes(pipe, out)
        elif args.command == "sample":
            if args.count < 0:
                raise ConfigError("--count must be non-negative")
            cmd_sample(pipe, out, args.count)
        elif args.command == "ensemble":
            cmd_ensemble(pipe, out)
        else:
            cmd_bank(pipe, out)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as exc:
        print("numerical error: %s" % exc, file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return EXIT_IO
    except SlipgenError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
