"""Command-line entry point: ``frcore {solve,fit,longrange,dispersion,parate}``.

Every command writes plot-ready CSV (LF line endings, energies in cm^-1 with
two decimals) plus a key-value sidecar with run metadata into ``--out``.  On
failure a single ``error=<kind> message=<text>`` line goes to stderr and the
exit status is nonzero.
"""

import argparse
import csv
import hashlib
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Optional, Sequence, Tuple

import numpy as np

from . import __version__
from .fitting import AtomModel, FitProblem, fit_parameters, level_energy
from .grid import build_grid
from .io import (
    find_atom,
    format_j,
    level_label,
    parse_atom_data,
    parse_levels,
    parse_model_file,
    resolve_data_path,
    serialize_model,
)
from .longrange import AtomAsymptote, adiabatic_curves, find_long_range_wells, london_dispersion, pa_rate_ratio
from .units import HARTREE_TO_CM

COMMANDS = ("solve", "fit", "longrange", "dispersion", "parate")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    out: Path = Path("frcore_out")
    model: Optional[str] = None
    levels: Optional[str] = None
    atoms: str = "atoms"
    grid_points: int = 4000
    rmin: float = 1e-5
    rmax: float = 250.0
    free: Tuple[str, ...] = ()
    tolerance: float = 0.01
    max_evaluations: int = 4000
    seed: int = 0
    window: Tuple[float, float] = (18.0, 200.0)
    origin: str = "center_of_gravity"
    atom: Optional[str] = None
    atom_b: Optional[str] = None
    curve_range: Tuple[float, float, int] = (15.0, 400.0, 3851)
    include_c6: bool = False
    separation: Optional[float] = None
    stamp: bool = True  # write a timestamp into the metadata sidecar

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        self.out = Path(self.out)


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def _write_kv(path, items):
    with open(path, "w", newline="") as fh:
        for k, v in items:
            fh.write(f"{k} = {v}\n")


def _cm(x):
    return "" if x is None else f"{x:.2f}"


def _file_hash(path):
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


def _meta(config, extra=()):
    items = [("command", config.command), ("frcore_version", __version__)]
    items += list(extra)
    if config.stamp:
        items.append(("timestamp", datetime.now(timezone.utc).isoformat(timespec="seconds")))
    return items


def _load_model(name):
    if name is None:
        raise ConfigError("--model is required")
    path = resolve_data_path(name)
    parsed = parse_model_file(path)
    if isinstance(parsed, tuple):
        return path, AtomModel(pseudo=parsed[0], cpp=parsed[1])
    return path, AtomModel(model=parsed)


def _load_levels(name):
    if name is None:
        raise ConfigError("--levels is required")
    path = resolve_data_path(name)
    return path, parse_levels(path)


def _grid(config):
    return build_grid(config.rmin, config.rmax, config.grid_points)


def _grid_meta(config):
    return [("grid", f"logarithmic r_min={config.rmin!r} r_max={config.rmax!r} n={config.grid_points}")]


def run_solve(config):
    model_path, model = _load_model(config.model)
    levels_path, levels = _load_levels(config.levels)
    grid = _grid(config)
    rows = []
    for lv in levels:
        e = level_energy(model, lv.n, lv.ell, lv.j, grid) * HARTREE_TO_CM
        rows.append([level_label(lv.n, lv.ell, lv.j), _cm(e), _cm(lv.energy), _cm(e - lv.energy)])
    _write_csv(config.out / "levels.csv", ["level", "computed_cm-1", "experimental_cm-1", "delta_cm-1"], rows)
    meta = [("model", model_path.name), ("model_sha256", _file_hash(model_path)), ("levels", levels_path.name)]
    _write_kv(config.out / "levels.meta.txt", _meta(config, meta + _grid_meta(config)))


def run_fit(config):
    model_path, model = _load_model(config.model)
    levels_path, levels = _load_levels(config.levels)
    free = config.free or tuple(model.parameters())
    problem = FitProblem(
        model,
        free,
        levels,
        grid=_grid(config),
        tolerance=config.tolerance,
        max_evaluations=config.max_evaluations,
        seed=config.seed,
    )
    result = fit_parameters(problem)
    m = result.model
    text = serialize_model(m.model, header=f"fitted from {model_path.name} to {levels_path.name}") if m.model is not None else serialize_model(m.pseudo, m.cpp, header=f"fitted from {model_path.name} to {levels_path.name}")
    (config.out / "fitted_model.txt").write_text(text)
    rows = [
        [level_label(lv.n, lv.ell, lv.j), _cm(lv.energy + r), _cm(lv.energy), _cm(r)]
        for lv, r in zip(levels, result.residuals)
    ]
    _write_csv(config.out / "fit_residuals.csv", ["level", "computed_cm-1", "experimental_cm-1", "delta_cm-1"], rows)
    report = [(k, repr(float(result.parameters[k]))) for k in free]
    report += [
        ("rms_cm-1", f"{result.rms:.6f}"),
        ("converged", str(result.converged).lower()),
        ("iterations", result.iterations),
        ("evaluations", result.evaluations),
        ("seed", config.seed),
        ("model", model_path.name),
        ("model_sha256", _file_hash(model_path)),
        ("levels", levels_path.name),
    ]
    _write_kv(config.out / "fit_report.txt", _meta(config, report + _grid_meta(config)))


def _asymptote(config, label):
    atoms = parse_atom_data(config.atoms)
    name, rec = find_atom(atoms, label)
    return AtomAsymptote.from_atom_data(name, rec, energy_origin=config.origin, include_c6=config.include_c6)


def run_longrange(config):
    if config.atom is None:
        raise ConfigError("--atom is required")
    asym = _asymptote(config, config.atom)
    lo, hi, n = config.curve_range
    R = np.linspace(lo, hi, int(n))
    curves = adiabatic_curves(asym, R)
    report = find_long_range_wells(curves, config.window)
    for b in curves.blocks:
        E = curves.energies[b.label]
        header = ["R_bohr"] + [f"E_{i + 1}_cm-1" for i in range(E.shape[1])]
        rows = [[f"{r:.4f}"] + [_cm(x) for x in e] for r, e in zip(R, E)]
        _write_csv(config.out / f"curves_{asym.label}_{b.label}.csv", header, rows)
    items = [
        ("atom", asym.label),
        ("fine_splitting_cm-1", repr(asym.fine_splitting)),
        ("C3_au", f"{asym.C3:.6f}"),
        ("origin", asym.energy_origin),
        ("include_c6", str(asym.include_c6).lower()),
        ("window_bohr", f"{config.window[0]!r},{config.window[1]!r}"),
    ]
    for b in curves.blocks:
        w = report.wells[b.label]
        if w is None:
            items.append((f"{b.label}.well", "false"))
        else:
            items += [
                (f"{b.label}.well", "true"),
                (f"{b.label}.asymptote", w.asymptote),
                (f"{b.label}.R_min_bohr", f"{w.R_min:.4f}"),
                (f"{b.label}.depth_cm-1", _cm(w.depth)),
            ]
    _write_kv(config.out / "wells.txt", _meta(config, items))


def run_dispersion(config):
    if config.atom is None or config.atom_b is None or config.separation is None:
        raise ConfigError("dispersion needs --a, --b and --R")
    atoms = parse_atom_data(config.atoms)
    (nx, x), (ny, y) = find_atom(atoms, config.atom), find_atom(atoms, config.atom_b)
    v = london_dispersion(
        x["core_polarizability"],
        y["core_polarizability"],
        x["ionization_energy"] / HARTREE_TO_CM,
        y["ionization_energy"] / HARTREE_TO_CM,
        config.separation,
    )
    items = [
        ("a", nx),
        ("b", ny),
        ("R_bohr", repr(config.separation)),
        ("alpha_a_bohr3", repr(x["core_polarizability"])),
        ("alpha_b_bohr3", repr(y["core_polarizability"])),
        ("ionization_a_cm-1", repr(x["ionization_energy"])),
        ("ionization_b_cm-1", repr(y["ionization_energy"])),
        ("dispersion_cm-1", _cm(v)),
    ]
    _write_kv(config.out / "dispersion.txt", _meta(config, items))


def run_parate(config):
    if config.atom is None or config.atom_b is None:
        raise ConfigError("parate needs --a and --b")
    a, b = _asymptote(config, config.atom), _asymptote(config, config.atom_b)
    items = []
    for tag, s in (("a", a), ("b", b)):
        items += [
            (tag, s.label),
            (f"{tag}.wavelength_nm", repr(s.wavelength)),
            (f"{tag}.lifetime_ns", repr(s.lifetime)),
            (f"{tag}.reduced_mass_au", f"{s.reduced_mass:.3f}"),
            (f"{tag}.C3_au", f"{s.C3:.6f}"),
        ]
    items.append(("ratio", f"{pa_rate_ratio(a, b):.4f}"))
    _write_kv(config.out / "parate.txt", _meta(config, items))


RUNNERS = {
    "solve": run_solve,
    "fit": run_fit,
    "longrange": run_longrange,
    "dispersion": run_dispersion,
    "parate": run_parate,
}


def run(config: RunConfig) -> int:
    """Execute one command; return the process exit status."""
    try:
        config.out.mkdir(parents=True, exist_ok=True)
        RUNNERS[config.command](config)
    except (OSError, ValueError, KeyError, RuntimeError) as err:
        msg = str(err).replace("\n", " ")
        print(f"error={type(err).__name__} message={msg}", file=sys.stderr)
        return 1
    return 0


def _pair(text, kind=float):
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError(f"expected two comma-separated values, got {text!r}")
    return tuple(kind(p) for p in parts)


def _curve_range(text):
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected R_min,R_max,points")
    return float(parts[0]), float(parts[1]), int(parts[2])


def build_parser():
    p = argparse.ArgumentParser(prog="frcore", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--out", type=Path, default=Path("frcore_out"))
        sp.add_argument("--no-timestamp", dest="stamp", action="store_false")

    def grid(sp):
        sp.add_argument("--model", required=True, help="model file or vendored name (fr_mp, fr_pp, ...)")
        sp.add_argument("--levels", required=True, help="level file or vendored name")
        sp.add_argument("--grid-points", type=int, default=4000)
        sp.add_argument("--rmin", type=float, default=1e-5)
        sp.add_argument("--rmax", type=float, default=250.0)

    s = sub.add_parser("solve", help="compute binding energies for a level list")
    grid(s)
    common(s)

    f = sub.add_parser("fit", help="fit potential parameters to a level list")
    grid(f)
    f.add_argument("--free", type=lambda t: tuple(x.strip() for x in t.split(",") if x.strip()), default=())
    f.add_argument("--tolerance", type=float, default=0.01)
    f.add_argument("--max-evaluations", type=int, default=4000)
    f.add_argument("--seed", type=int, default=0)
    common(f)

    lr = sub.add_parser("longrange", help="ns+np long-range curves and well report")
    lr.add_argument("--atom", required=True)
    lr.add_argument("--atoms", default="atoms")
    lr.add_argument("--window", type=_pair, default=(18.0, 200.0))
    lr.add_argument("--origin", choices=("center_of_gravity", "p_half"), default="center_of_gravity")
    lr.add_argument("--curve-range", type=_curve_range, default=(15.0, 400.0, 3851))
    lr.add_argument("--c6", dest="include_c6", action="store_true")
    common(lr)

    d = sub.add_parser("dispersion", help="core-core London dispersion energy")
    d.add_argument("--a", dest="atom", required=True)
    d.add_argument("--b", dest="atom_b", required=True)
    d.add_argument("--R", dest="separation", type=float, required=True)
    d.add_argument("--atoms", default="atoms")
    common(d)

    pa = sub.add_parser("parate", help="photoassociation rate ratio of two homonuclear pairs")
    pa.add_argument("--a", dest="atom", required=True)
    pa.add_argument("--b", dest="atom_b", required=True)
    pa.add_argument("--atoms", default="atoms")
    common(pa)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = vars(build_parser().parse_args(argv))
    try:
        config = RunConfig(**args)
    except (TypeError, ValueError) as err:
        print(f"error={type(err).__name__} message={err}", file=sys.stderr)
        return 2
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
