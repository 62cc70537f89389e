"""Fit the Fr core-polarization cutoff radii to the lowest s, p and d levels.

Runs both vendored polarizability series and reports every averaged level.

    python scripts/fit_cpp_radii.py [--points 4000] [--seed 0]
"""

import argparse

from frcore import AtomModel, FitProblem, build_grid, fit_parameters, level_energy, parse_levels, parse_model_file, resolve_data_path
from frcore.io import level_label
from frcore.units import HARTREE_TO_CM


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=4000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    grid = build_grid(1e-5, 250.0, args.points)
    targets = parse_levels(resolve_data_path("fr_levels_avg"))
    for name in ("fr_pp", "fr_pp_b"):
        pp, cpp = parse_model_file(resolve_data_path(name))
        start = AtomModel(pseudo=pp, cpp=cpp)
        res = fit_parameters(
            FitProblem(start, ["rho_s", "rho_p", "rho_d"], targets[:3], grid=grid, tolerance=0.05, seed=args.seed)
        )
        print(f"series {cpp.label}: alpha_d = {cpp.alpha_d} bohr^3, rms = {res.rms:.2e} cm-1, "
              f"{res.evaluations} evaluations")
        for k in ("rho_s", "rho_p", "rho_d"):
            print(f"  {k}: start {start.parameters()[k]:.5f}  fitted {res.parameters[k]:.5f}")
        for lv in targets:
            e = level_energy(res.model, lv.n, lv.ell, None, grid) * HARTREE_TO_CM
            print(f"  {level_label(lv.n, lv.ell, None):>4} {e:11.2f} {lv.energy:11.2f} {e - lv.energy:9.2f}")


if __name__ == "__main__":
    main()
