"""Long-range 0g- / 1u wells for Fr2 and Cs2 and their dependence on the splitting.

Writes the Delta scan (fixed Cs C3) as CSV to --out.

    python scripts/longrange_scan.py [--out scan.csv] [--window 18,200]
"""

import argparse
import csv
from dataclasses import replace

import numpy as np

from frcore import AtomAsymptote, adiabatic_curves, find_long_range_wells, parse_atom_data


def _report(asym, R, window):
    rep = find_long_range_wells(adiabatic_curves(asym, R), window)
    for lab in ("0g-", "1u"):
        w = rep.wells[lab]
        desc = "none" if w is None else f"R_min {w.R_min:.2f} bohr, depth {w.depth:.2f} cm-1"
        print(f"  {asym.label} {lab}: {desc}")
    return rep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="longrange_scan.csv")
    ap.add_argument("--window", default="18,200")
    ap.add_argument("--steps", type=int, default=25)
    args = ap.parse_args()
    window = tuple(float(x) for x in args.window.split(","))
    atoms = parse_atom_data()
    R = np.linspace(15.0, 400.0, 7701)
    fr = AtomAsymptote.from_atom_data("Fr", atoms["Fr"])
    cs = AtomAsymptote.from_atom_data("Cs", atoms["Cs"])
    print(f"C3: Fr {fr.C3:.3f} a.u., Cs {cs.C3:.3f} a.u.")
    _report(cs, R, window)
    _report(fr, R, window)
    rows = []
    for d in np.linspace(cs.fine_splitting, fr.fine_splitting, args.steps):
        rep = find_long_range_wells(adiabatic_curves(replace(cs, fine_splitting=float(d)), R), window)
        row = [f"{d:.2f}"]
        for lab in ("0g-", "1u"):
            w = rep.wells[lab]
            row += ["", ""] if w is None else [f"{w.R_min:.2f}", f"{w.depth:.2f}"]
        rows.append(row)
    with open(args.out, "w", newline="") as fh:
        wr = csv.writer(fh, lineterminator="\n")
        wr.writerow(["delta_cm-1", "0g-_R_min_bohr", "0g-_depth_cm-1", "1u_R_min_bohr", "1u_depth_cm-1"])
        wr.writerows(rows)
    print(f"splitting scan at fixed Cs C3 written to {args.out}")


if __name__ == "__main__":
    main()
