"""Fr binding energies from the vendored model potential vs experiment.

Also prints the unobserved 6d, 9p and 10p fine-structure levels.

    python scripts/reproduce_mp_levels.py [--points 4000]
"""

import argparse

from frcore import AtomModel, build_grid, level_energy, parse_levels, parse_model_file, resolve_data_path
from frcore.io import level_label
from frcore.units import HARTREE_TO_CM


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--points", type=int, default=4000)
    args = ap.parse_args()
    grid = build_grid(1e-5, 250.0, args.points)
    model = AtomModel(model=parse_model_file(resolve_data_path("fr_mp")))
    exp = {(lv.n, lv.ell, lv.j): lv.energy for lv in parse_levels(resolve_data_path("fr_levels"))}
    extra = [(6, 2, 1.5), (6, 2, 2.5), (9, 1, 0.5), (9, 1, 1.5), (10, 1, 0.5), (10, 1, 1.5)]
    print(f"{'level':>6} {'computed':>11} {'exp':>11} {'delta':>8}")
    for key in sorted(set(exp) | set(extra), key=lambda k: (k[0] + k[1], k[1], k[2])):
        e = level_energy(model, *key, grid) * HARTREE_TO_CM
        x = exp.get(key)
        print(f"{level_label(*key):>6} {e:11.2f} {'' if x is None else f'{x:11.2f}':>11} "
              f"{'' if x is None else f'{e - x:8.2f}':>8}")
    split = (level_energy(model, 6, 2, 2.5, grid) - level_energy(model, 6, 2, 1.5, grid)) * HARTREE_TO_CM
    print(f"6d fine-structure splitting: {split:.2f} cm-1")


if __name__ == "__main__":
    main()
