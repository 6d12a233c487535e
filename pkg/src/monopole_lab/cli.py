"""Batch driver for simulations and verification sweeps.

Configuration is a flat ``key = value`` text file with # comments.  CLI
``key=value`` arguments override file entries, and the dedicated flags
--seed and --out override both.  Every run writes CSV artifacts, a
manifest echoing the resolved configuration together with library
versions and wall time, and a plot script that consumes the CSVs.  CSV
files are comma separated, UTF-8, LF line endings, with floats printed
via repr so identical (config, seed) pairs reproduce identical bytes.

Exit status 0 means every check of the run passed, 1 means a numerical
check failed, 2 means the configuration was unusable.  The environment
variable MONOPOLE_LAB_THREADS caps FFT parallelism in the evolution
engines.
"""

import argparse
import csv
import os
import platform
import sys
import time

import numpy as np
import scipy

from .cone_quadrature import minus_kernel_sweep, plus_kernel_sweep, sweep_max
from .diagonal_system import (
    HalfWaveSolver,
    random_diagonal_state,
    state_max_abs,
)
from .errors import DivergedError
from .fl_norms import (
    NormParams,
    bilinear_sweep,
    embedding_check,
    embedding_constant,
    free_wave_sample,
    gaussian_window,
    homogeneous_factorization_check,
    scaling_check,
)
from .grid_spectral import GridSpec, random_band_limited
from .null_geometry import approach_defects, null_sweep

COMMANDS = (
    "simulate",
    "residuals",
    "verify-null",
    "verify-cone",
    "verify-norms",
    "scaling",
    "probe-bilinear",
)

# key -> (parser, default, description); one flat namespace for all commands
SCHEMA = {
    "n": (int, 32, "grid points per side, power of two"),
    "length": (float, 2.0 * np.pi, "torus side length"),
    "dt": (float, 1e-3, "time step"),
    "seed": (int, 0, "random generator seed"),
    "out": (str, "runs", "output directory"),
    "steps": (int, 200, "evolution steps"),
    "sample_every": (int, 10, "steps between recorded samples"),
    "amplitude": (float, 0.2, "amplitude of random initial data"),
    "kmax": (float, 5.0, "band limit of random data"),
    "lorenz_tol": (float, 1e-8, "gauge constraint threshold"),
    "null_samples": (int, 100000, "frequency pairs in the null sweep"),
    "rtol": (float, 1e-6, "cone quadrature tolerance"),
    "norm_tuples": (int, 20, "factorization tuples to test"),
    "probe_samples": (int, 25, "bilinear probes per (eps, sign)"),
    "n_active": (int, 96, "active modes per probe factor"),
    "probe_n_t": (int, 16, "time lattice size of probe data"),
    "n_t": (int, 256, "time samples of windowed waves"),
    "t_window": (float, 2.0, "half width of the time window"),
    "width": (float, 0.2, "gaussian window width"),
    "eps": (float, 0.125, "estimate parameter eps"),
}


class UsageError(Exception):
    """Configuration or invocation problem; maps to exit status 2."""


class RunConfig:
    """Resolved flat configuration for one command."""

    def __init__(self, command, values):
        if command not in COMMANDS:
            raise UsageError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
        self.command = command
        for key, (_, default, _) in SCHEMA.items():
            setattr(self, key, values.get(key, default))

    def items(self):
        return [(key, getattr(self, key)) for key in SCHEMA]


def load_config(path):
    """Flat key = value file with # comments; returns raw string values."""
    if not os.path.exists(path):
        raise UsageError(f"config file not found: {path}")
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise UsageError(f"{path}:{lineno}: expected key = value, got {text!r}")
            key, raw = (part.strip() for part in text.split("=", 1))
            values[key] = raw
    return values


def _coerce(key, raw):
    if key not in SCHEMA:
        raise UsageError(
            f"unknown config key {key!r}; valid keys: {', '.join(sorted(SCHEMA))}"
        )
    parser = SCHEMA[key][0]
    if isinstance(raw, str):
        try:
            return parser(raw)
        except ValueError:
            raise UsageError(f"invalid value for {key}: {raw!r}") from None
    return raw


def parse_overrides(pairs):
    values = {}
    for pair in pairs:
        if "=" not in pair:
            raise UsageError(f"override must look like key=value, got {pair!r}")
        key, raw = (part.strip() for part in pair.split("=", 1))
        values[key] = raw
    return values


def build_config(command, file_values=None, overrides=None, seed=None, out=None):
    """Merge defaults < config file < key=value overrides < explicit flags."""
    merged = {}
    for source in (file_values or {}, overrides or {}):
        for key, raw in source.items():
            merged[key] = _coerce(key, raw)
    if seed is not None:
        merged["seed"] = int(seed)
    if out is not None:
        merged["out"] = str(out)
    return RunConfig(command, merged)


def _format_cell(value):
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_format_cell(value) for value in row])


def _write_dict_csv(path, rows):
    header = list(rows[0]) if rows else []
    _write_csv(path, header, [[row[key] for key in header] for row in rows])


PLOT_TEMPLATE = '''"""Generated plot script; reads the run's CSVs and saves PNGs."""

import csv
import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

HERE = os.path.dirname(os.path.abspath(__file__))

for name in {csv_names!r}:
    with open(os.path.join(HERE, name), newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    header, data = rows[0], rows[1:]
    if not data:
        continue
    columns = list(zip(*data))
    try:
        x = [float(v) for v in columns[0]]
    except ValueError:
        x = list(range(len(data)))
    fig, ax = plt.subplots()
    for label, column in zip(header[1:], columns[1:]):
        try:
            ax.plot(x, [float(v) for v in column], label=label)
        except ValueError:
            continue
    ax.set_xlabel(header[0])
    ax.legend(fontsize="small")
    fig.savefig(os.path.join(HERE, name.replace(".csv", ".png")), dpi=120)
    plt.close(fig)
'''


def _write_plot_script(out_dir, csv_names):
    path = os.path.join(out_dir, "plot.py")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(PLOT_TEMPLATE.format(csv_names=list(csv_names)))


def _grid_from(config):
    try:
        return GridSpec(config.n, config.length, config.dt)
    except ValueError as err:
        raise UsageError(str(err)) from None


def _run_simulate(config, grid, rng, out_dir):
    state = random_diagonal_state(
        rng, grid, amplitude=config.amplitude, kmax=config.kmax
    )
    solver = HalfWaveSolver(grid)
    rows = [(0, 0.0, float(np.max(np.abs(state.u()))), float(np.max(np.abs(state.v()))))]
    checks = []
    step = 0
    try:
        while step < config.steps:
            chunk = min(config.sample_every, config.steps - step)
            state = solver.evolve(state, chunk)
            step += chunk
            rows.append(
                (
                    step,
                    step * grid.dt,
                    float(np.max(np.abs(state.u()))),
                    float(np.max(np.abs(state.v()))),
                )
            )
        checks.append(("finite_evolution", True, f"max |state| = {state_max_abs(state):.6e}"))
    except DivergedError as err:
        checks.append(("finite_evolution", False, str(err)))
    _write_csv(
        os.path.join(out_dir, "simulate.csv"),
        ("step", "time", "max_abs_u", "max_abs_v"),
        rows,
    )
    return checks, ["simulate.csv"]


def _run_residuals(config, grid, rng, out_dir):
    state = random_diagonal_state(
        rng, grid, amplitude=config.amplitude, kmax=config.kmax
    )
    solver = HalfWaveSolver(grid)
    checks = []
    try:
        _, record = solver.evolve_with_residuals(
            state, config.steps, sample_every=config.sample_every, rows=True
        )
        worst = float(np.max(record.lorenz))
        checks.append(
            (
                "lorenz_constraint",
                worst <= config.lorenz_tol,
                f"max residual {worst:.3e} vs tolerance {config.lorenz_tol:.1e}",
            )
        )
        rows = [
            (t, lor, r1, r2, r3)
            for t, lor, (r1, r2, r3) in zip(record.times, record.lorenz, record.rows)
        ]
    except DivergedError as err:
        checks.append(("lorenz_constraint", False, str(err)))
        rows = []
    _write_csv(
        os.path.join(out_dir, "residuals.csv"),
        ("time", "lorenz", "row_phi", "row_a1", "row_a2"),
        rows,
    )
    return checks, ["residuals.csv"]


def _run_verify_null(config, grid, rng, out_dir):
    sweep = null_sweep(rng, config.null_samples)
    env = sweep.envelopes()
    _write_csv(
        os.path.join(out_dir, "null_envelopes.csv"),
        ("quantity", "value"),
        sorted(env.items()),
    )
    thetas = 2.0 ** -np.arange(1, 12)
    path_rows = []
    worst_defect = 0.0
    for index in range(10):
        base = rng.uniform(0.0, 2.0 * np.pi)
        norms = approach_defects(base, thetas)
        worst_defect = max(worst_defect, float(np.max(norms / thetas)))
        path_rows.extend(
            (index, base, theta, norm) for theta, norm in zip(thetas, norms)
        )
    _write_csv(
        os.path.join(out_dir, "null_paths.csv"),
        ("path", "base_angle", "theta", "symbol_norm"),
        path_rows,
    )
    checks = [
        (
            "symbol_bound",
            np.isfinite(env["c_sym"]) and env["c_sym"] <= 0.5 + 1e-6,
            f"C_sym = {env['c_sym']:.9f}",
        ),
        (
            "angle_comparisons",
            all(np.isfinite(v) for v in env.values())
            and 1.0 <= env["ratio_minus_min"]
            and env["ratio_plus_max"] <= 2.25,
            f"plus in [{env['ratio_plus_min']:.4f}, {env['ratio_plus_max']:.4f}], "
            f"minus in [{env['ratio_minus_min']:.4f}, {env['ratio_minus_max']:.4f}]",
        ),
        (
            "collinear_vanishing",
            worst_defect <= 0.5 + 1e-6,
            f"max symbol_norm/theta = {worst_defect:.6f}",
        ),
    ]
    return checks, ["null_envelopes.csv", "null_paths.csv"]


def _run_verify_cone(config, grid, rng, out_dir):
    plus_rows = plus_kernel_sweep(rtol=config.rtol)
    minus_rows = minus_kernel_sweep(rtol=config.rtol)
    _write_dict_csv(os.path.join(out_dir, "cone_plus.csv"), plus_rows)
    _write_dict_csv(os.path.join(out_dir, "cone_minus.csv"), minus_rows)
    c_plus = sweep_max(plus_rows)
    c_minus = sweep_max(minus_rows)
    split = max(row["split_defect"] for row in minus_rows)
    checks = [
        ("plus_kernel_bound", np.isfinite(c_plus), f"C_I = {c_plus:.9f}"),
        ("minus_kernel_bound", np.isfinite(c_minus), f"C_J = {c_minus:.9f}"),
        ("near_far_split", split <= 1e-6, f"max split defect {split:.3e}"),
    ]
    return checks, ["cone_plus.csv", "cone_minus.csv"]


def _run_verify_norms(config, grid, rng, out_dir):
    rows = []
    worst_defect = 0.0
    embed_ok = True
    for index in range(config.norm_tuples):
        params = NormParams.from_eps(float(rng.uniform(0.02, 0.25)))
        width = float(rng.uniform(0.1, 0.25))
        sign = 1 if rng.uniform() < 0.5 else -1
        field = random_band_limited(rng, grid, config.kmax, shape=())
        window = lambda t, w=width: gaussian_window(t, w)
        lhs, rhs = homogeneous_factorization_check(
            field, window, grid, params, sign, t_window=config.t_window, n_t=config.n_t
        )
        defect = abs(lhs - rhs) / rhs
        worst_defect = max(worst_defect, defect)
        sample = free_wave_sample(
            grid, field, sign, t_window=config.t_window, n_t=config.n_t, window=window
        )
        ratio = embedding_check(sample, grid, params, sign)
        c_emb = embedding_constant(params.b, params.p)
        embed_ok = embed_ok and ratio <= c_emb
        rows.append(
            (index, params.p, params.s, params.b, width, sign, lhs, rhs, defect, ratio, c_emb)
        )
    _write_csv(
        os.path.join(out_dir, "norms.csv"),
        ("tuple", "p", "s", "b", "width", "sign", "lhs", "rhs", "defect", "embed_ratio", "c_emb"),
        rows,
    )
    checks = [
        (
            "factorization_identity",
            worst_defect <= 1e-6,
            f"max relative defect {worst_defect:.3e}",
        ),
        ("embedding_bound", embed_ok, "fixed-time ratio below the embedding constant"),
    ]
    return checks, ["norms.csv"]


def _run_scaling(config, grid, rng, out_dir):
    rows = []
    worst = 0.0
    for p, s in ((2.0, 1.0), (4.0 / 3.0, 3.0 / 4.0), (8.0 / 7.0, 7.0 / 8.0)):
        field = random_band_limited(rng, grid, config.kmax, shape=())
        for lam in (2.0, 4.0):
            measured = scaling_check(field, grid, lam, s, p)
            expected = s + 1.0 - 2.0 / p
            worst = max(worst, abs(measured - expected))
            rows.append((p, s, lam, measured, expected, measured - expected))
    _write_csv(
        os.path.join(out_dir, "scaling.csv"),
        ("p", "s", "lam", "measured", "expected", "defect"),
        rows,
    )
    checks = [("scaling_exponent", worst <= 1e-3, f"max exponent defect {worst:.3e}")]
    return checks, ["scaling.csv"]


def _run_probe_bilinear(config, grid, rng, out_dir):
    rows = bilinear_sweep(
        rng,
        grid,
        (1.0 / 16.0, 1.0 / 8.0, 1.0 / 4.0),
        n_samples=config.probe_samples,
        n_active=config.n_active,
        n_t=config.probe_n_t,
        t_window=config.t_window,
    )
    _write_dict_csv(os.path.join(out_dir, "probe.csv"), rows)
    ratios = np.array([row["ratio"] for row in rows])
    checks = [
        (
            "probe_ratios",
            bool(np.all(np.isfinite(ratios)) and np.all(ratios > 0.0)),
            f"max ratio {ratios.max():.6f} over {ratios.size} probes",
        )
    ]
    return checks, ["probe.csv"]


_RUNNERS = {
    "simulate": _run_simulate,
    "residuals": _run_residuals,
    "verify-null": _run_verify_null,
    "verify-cone": _run_verify_cone,
    "verify-norms": _run_verify_norms,
    "scaling": _run_scaling,
    "probe-bilinear": _run_probe_bilinear,
}


def _write_manifest(out_dir, config, checks, wall_time, status):
    from . import __version__

    path = os.path.join(out_dir, "manifest.txt")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"command = {config.command}\n")
        for key, value in config.items():
            fh.write(f"{key} = {_format_cell(value)}\n")
        fh.write(f"package_version = {__version__}\n")
        fh.write(f"numpy_version = {np.__version__}\n")
        fh.write(f"scipy_version = {scipy.__version__}\n")
        fh.write(f"python_version = {platform.python_version()}\n")
        fh.write(f"wall_time_s = {wall_time:.3f}\n")
        for name, passed, detail in checks:
            fh.write(f"check_{name} = {'PASS' if passed else 'FAIL'} ({detail})\n")
        fh.write(f"status = {status}\n")


def run(config):
    """Execute one command; returns the exit status and writes artifacts."""
    started = time.perf_counter()
    grid = _grid_from(config)
    rng = np.random.default_rng(config.seed)
    out_dir = config.out
    os.makedirs(out_dir, exist_ok=True)
    checks, csv_names = _RUNNERS[config.command](config, grid, rng, out_dir)
    _write_plot_script(out_dir, csv_names)
    status = 0 if all(passed for _, passed, _ in checks) else 1
    _write_manifest(out_dir, config, checks, time.perf_counter() - started, status)
    for name, passed, detail in checks:
        print(f"[{config.command}] {name}: {'PASS' if passed else 'FAIL'} ({detail})")
    return status


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="monopole-lab",
        description="Simulation and verification sweeps for the planar gauge system.",
        epilog="MONOPOLE_LAB_THREADS caps FFT parallelism.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", help="flat key = value configuration file")
    parser.add_argument("--seed", type=int, help="override the seed")
    parser.add_argument("--out", help="override the output directory")
    # key=value overrides may appear anywhere after the command, so the
    # leftovers of parse_known_args play the role of a positional list
    args, overrides = parser.parse_known_args(argv)
    try:
        for item in overrides:
            if item.startswith("-"):
                raise UsageError(f"unrecognized argument {item!r}")
        file_values = load_config(args.config) if args.config else {}
        config = build_config(
            args.command,
            file_values=file_values,
            overrides=parse_overrides(overrides),
            seed=args.seed,
            out=args.out,
        )
        return run(config)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
