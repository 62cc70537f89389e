"""Core-core London dispersion for Fr-containing pairs and the Fr/Cs PA-rate ratio.

    python scripts/pair_estimates.py
"""

from frcore import AtomAsymptote, london_dispersion, pa_rate_ratio, parse_atom_data
from frcore.units import HARTREE_TO_CM

# equilibrium distances (bohr) of the ground-state ions at which the
# dispersion is evaluated
PAIRS = (("Fr", "Fr", 8.45), ("Rb", "Fr", 8.2), ("Cs", "Fr", 8.55))


def main():
    atoms = parse_atom_data()
    for x, y, R in PAIRS:
        X, Y = atoms[x], atoms[y]
        v = london_dispersion(
            X["core_polarizability"], Y["core_polarizability"],
            X["ionization_energy"] / HARTREE_TO_CM, Y["ionization_energy"] / HARTREE_TO_CM, R,
        )
        print(f"{x}{y} at R = {R} bohr: {v:.2f} cm-1")
    fr = AtomAsymptote.from_atom_data("Fr", atoms["Fr"])
    cs = AtomAsymptote.from_atom_data("Cs", atoms["Cs"])
    rb = AtomAsymptote.from_atom_data("Rb", atoms["Rb"])
    print(f"PA rate ratio Fr2/Cs2: {pa_rate_ratio(fr, cs):.3f}")
    print(f"PA rate ratio Rb2/Cs2: {pa_rate_ratio(rb, cs):.3f}")
    print(f"C6 (a.u.): Fr {fr.C6:.0f}, Cs {cs.C6:.0f}, Rb {rb.C6:.0f}")


if __name__ == "__main__":
    main()
