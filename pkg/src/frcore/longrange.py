"""Long-range interaction of two identical alkali atoms in the ns + np asymptote.

The first-order resonant dipole interaction and a constant atomic spin-orbit
coupling are diagonalized in the 24-dimensional space spanned by
|s_A, p_B> and |p_A, s_B> with both electron spins.  The space is split into
Hund's case (c) blocks Omega_{g/u}^{+/-} by projecting onto joint eigenspaces
of the total projection, inversion and (for Omega = 0) reflection operators;
within each block the basis is the case (a) one, labelled from the spin,
|Lambda| and dipole eigenvalues.

Closed-form estimators for the core-core London dispersion and for ratios of
photoassociation rates live here too.
"""

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .units import AMU_TO_ME, AU_TIME_S, BOHR_NM, HARTREE_TO_CM, SPEED_OF_LIGHT

ORIGINS = ("center_of_gravity", "p_half")
MIN_CURVE_R = 15.0
WELL_THRESHOLD = 0.01  # cm^-1


class LongRangeError(ValueError):
    pass


def c3_from_lifetime(tau_ns, wavelength_nm, j_upper=1.5, j_lower=0.5):
    """Squared s-p dipole matrix element per Cartesian component (a.u.).

    Uses A = 4 w^3 d^2 / (3 c^3) for the decay of an np level to ns.  For an
    s lower level every fine-structure component of p decays with the full
    orbital rate, so only j_upper in {1/2, 3/2} with j_lower = 1/2 is valid.
    """
    if not (tau_ns > 0 and wavelength_nm > 0):
        raise LongRangeError("lifetime and wavelength must be positive")
    if j_lower != 0.5 or j_upper not in (0.5, 1.5):
        raise LongRangeError(f"unsupported s-p line j_upper={j_upper}, j_lower={j_lower}")
    if math.isinf(tau_ns):
        return 0.0
    omega = 2.0 * math.pi * SPEED_OF_LIGHT / (wavelength_nm / BOHR_NM)
    tau = tau_ns * 1e-9 / AU_TIME_S
    return 3.0 * SPEED_OF_LIGHT**3 / (4.0 * omega**3 * tau)


@dataclass(frozen=True)
class AtomAsymptote:
    label: str
    fine_splitting: float  # cm^-1
    C3: float  # a.u.
    C6: float  # a.u.
    wavelength: float  # nm
    lifetime: float  # ns
    mass: float  # a.u. (electron masses), atomic mass
    energy_origin: str = "center_of_gravity"
    include_c6: bool = False

    def __post_init__(self):
        for name in ("fine_splitting", "C3", "C6", "wavelength", "lifetime", "mass"):
            if not getattr(self, name) > 0:
                raise LongRangeError(f"{name} must be positive, got {getattr(self, name)}")
        if self.energy_origin not in ORIGINS:
            raise LongRangeError(f"energy_origin must be one of {ORIGINS}")

    @property
    def reduced_mass(self):
        """Reduced mass of the homonuclear pair (a.u.)."""
        return 0.5 * self.mass

    @property
    def origin_shift(self):
        return 2.0 * self.fine_splitting / 3.0 if self.energy_origin == "p_half" else 0.0

    @classmethod
    def from_atom_data(cls, label, record, **overrides):
        """Build from an atom-data record (see :func:`frcore.io.parse_atom_data`)."""
        kw = dict(
            label=label,
            fine_splitting=record["fine_splitting"],
            C3=c3_from_lifetime(record["d2_lifetime"], record["d2_wavelength"]),
            C6=record["C6"],
            wavelength=record["d2_wavelength"],
            lifetime=record["d2_lifetime"],
            mass=record["mass"] * AMU_TO_ME,
        )
        kw.update(overrides)
        return cls(**kw)


# --- 24-state space -------------------------------------------------------
# Index layout: (excited atom a in {A, B}) x (m in {-1, 0, 1}) x (spin of the
# electron on A) x (spin of the electron on B); spin index 0 = up, 1 = down.

_M = (-1, 0, 1)


def _index(a, m, sa, sb):
    return ((a * 3 + (m + 1)) * 2 + sa) * 2 + sb


def _states():
    for a in (0, 1):
        for m in _M:
            for sa in (0, 1):
                for sb in (0, 1):
                    yield a, m, sa, sb


def _spin_ops():
    sz = np.diag([0.5, -0.5])
    sp = np.array([[0.0, 1.0], [0.0, 0.0]])
    return sz, sp, sp.T


def _build_operators():
    """Return the fixed operators on the 24-state space as a dict of arrays."""
    n = 24
    sz, sp, sm = _spin_ops()
    ops = {k: np.zeros((n, n)) for k in ("dip", "so", "Lz", "Sz", "S2", "P", "sigma")}
    # orbital l on p (m basis, Condon-Shortley): l+ |m> = sqrt(2 - m(m+1)) |m+1>
    lz = np.diag(_M).astype(float)
    lp = np.zeros((3, 3))
    for m in (-1, 0):
        lp[m + 2, m + 1] = math.sqrt(2 - m * (m + 1))
    lm = lp.T
    ls = np.kron(lz, sz) + 0.5 * (np.kron(lp, sm) + np.kron(lm, sp))
    # single-electron reflection through a plane containing the axis
    refl_spin = np.array([[0.0, -1.0], [1.0, 0.0]])  # up -> down, down -> -up
    s_vec = [sz, 0.5 * (sp + sm), -0.5j * (sp - sm)]

    for a, m, sa, sb in _states():
        i = _index(a, m, sa, sb)
        ops["Lz"][i, i] = m
        ops["Sz"][i, i] = sz[sa, sa] + sz[sb, sb]
        # resonant dipole: excitation hops to the other atom, spins untouched
        ops["dip"][_index(1 - a, m, sa, sb), i] = -2.0 if m == 0 else 1.0
        # inversion swaps the atoms and the spins, sign +1 for an s-p pair
        ops["P"][_index(1 - a, m, sb, sa), i] = 1.0
        # reflection: p_m -> (-1)^m p_-m, each spin with refl_spin
        for ta in (0, 1):
            for tb in (0, 1):
                amp = refl_spin[ta, sa] * refl_spin[tb, sb] * (-1) ** m
                if amp:
                    ops["sigma"][_index(a, -m, ta, tb), i] += amp
        # spin-orbit on the excited atom's electron
        s_exc = sa if a == 0 else sb
        for m2 in _M:
            for t in (0, 1):
                amp = ls[(m2 + 1) * 2 + t, (m + 1) * 2 + s_exc]
                if amp:
                    j = _index(a, m2, t, sb) if a == 0 else _index(a, m2, sa, t)
                    ops["so"][j, i] += amp
    # total spin squared: S_A^2 + S_B^2 + 2 S_A.S_B
    spin2 = np.zeros((4, 4), dtype=complex)
    for s in s_vec:
        tot = np.kron(s, np.eye(2)) + np.kron(np.eye(2), s)
        spin2 += tot @ tot
    ops["S2"] = np.kron(np.eye(6), spin2.real)
    return ops


_OPS = None


def _operators():
    global _OPS
    if _OPS is None:
        _OPS = _build_operators()
    return _OPS


@dataclass(frozen=True)
class SymmetryBlock:
    omega: int
    parity: str  # "g" or "u"
    reflection: str  # "+" or "-" for omega = 0, "" otherwise
    basis: Tuple[str, ...]
    dipole_coefficients: np.ndarray
    so_matrix: np.ndarray  # multiples of the fine splitting
    vectors: np.ndarray = field(repr=False)  # 24 x dim

    @property
    def label(self):
        return f"{self.omega}{self.parity}{self.reflection}"

    @property
    def dimension(self):
        return len(self.basis)

    @property
    def weight(self):
        return 2 if self.omega > 0 else 1


def _eigenspace(op, value, within):
    """Columns of ``within`` spanning the subspace where op = value."""
    sub = within.T @ op @ within
    w, v = np.linalg.eigh(0.5 * (sub + sub.T))
    keep = np.abs(w - value) < 1e-9
    return within @ v[:, keep]


def _case_a_label(spin2, lam2, parity, reflection_sign):
    mult = 1 if spin2 < 1.0 else 3
    lam = "Sigma" if lam2 < 0.5 else "Pi"
    sym = "+" if lam == "Sigma" else ""
    return f"{mult}{lam}{parity}{sym}"


def build_symmetry_blocks(asym: Optional[AtomAsymptote] = None) -> List[SymmetryBlock]:
    """Case (c) blocks of the s+p pair with their case (a) bases.

    The blocks do not depend on the asymptote; the argument is accepted for
    symmetry with the other operations.  ``so_matrix`` is in units of the fine
    splitting Delta; scale by Delta (cm^-1) to get energies.
    """
    ops = _operators()
    jz = ops["Lz"] + ops["Sz"]
    lam2 = ops["Lz"] @ ops["Lz"]
    full = np.eye(24)
    so = (2.0 / 3.0) * ops["so"]
    blocks = []
    for omega in (0, 1, 2):
        sub_omega = _eigenspace(jz, omega, full)
        for parity, pval in (("g", 1.0), ("u", -1.0)):
            sub_p = _eigenspace(ops["P"], pval, sub_omega)
            refl = (("+", 1.0), ("-", -1.0)) if omega == 0 else (("", None),)
            for rname, rval in refl:
                sub = sub_p if rval is None else _eigenspace(ops["sigma"], rval, sub_p)
                if sub.shape[1] == 0:
                    continue
                # case (a) states: joint eigenvectors of S^2, Lambda^2, dipole
                probe = ops["S2"] + math.pi * lam2 + math.e * 0.1 * ops["dip"]
                k = sub.T @ probe @ sub
                _, v = np.linalg.eigh(0.5 * (k + k.T))
                vecs = sub @ v
                for c in range(vecs.shape[1]):
                    col = vecs[:, c]
                    if col[np.argmax(np.abs(col))] < 0:
                        vecs[:, c] = -col
                labels, coeffs = [], []
                for c in range(vecs.shape[1]):
                    col = vecs[:, c]
                    labels.append(
                        _case_a_label(col @ ops["S2"] @ col, col @ lam2 @ col, parity, rval)
                    )
                    coeffs.append(col @ ops["dip"] @ col)
                order = np.lexsort((labels,))
                vecs = vecs[:, order]
                labels = [labels[i] for i in order]
                coeffs = np.round(np.array(coeffs)[order], 12)
                so_mat = vecs.T @ so @ vecs
                so_mat = 0.5 * (so_mat + so_mat.T)
                so_mat[np.abs(so_mat) < 1e-14] = 0.0
                blocks.append(
                    SymmetryBlock(omega, parity, rname, tuple(labels), coeffs, so_mat, vecs)
                )
    return blocks


def hamiltonian_at_R(block: SymmetryBlock, asym: AtomAsymptote, R):
    """Block Hamiltonian in cm^-1 at internuclear distance R (bohr)."""
    if not R > 0:
        raise LongRangeError(f"R must be positive, got {R}")
    c3 = asym.C3 * HARTREE_TO_CM / R**3
    h = block.so_matrix * asym.fine_splitting + np.diag(block.dipole_coefficients * c3)
    shift = asym.origin_shift
    if asym.include_c6:
        shift -= asym.C6 * HARTREE_TO_CM / R**6
    if shift:
        h = h + shift * np.eye(block.dimension)
    return h


@dataclass
class CurveSet:
    R: np.ndarray
    blocks: List[SymmetryBlock]
    energies: Dict[str, np.ndarray]  # block label -> (len(R), dim), cm^-1
    asymptotes: Dict[str, np.ndarray]  # block label -> per-curve limit, cm^-1
    asymptote_labels: Dict[str, Tuple[str, ...]]

    def block(self, label):
        for b in self.blocks:
            if b.label == label:
                return b
        raise KeyError(label)


def adiabatic_curves(asym: AtomAsymptote, R_grid) -> CurveSet:
    """Sorted adiabatic energies of every block over ``R_grid``."""
    R = np.asarray(R_grid, dtype=float)
    if R.ndim != 1 or R.size < 2 or np.any(np.diff(R) <= 0):
        raise LongRangeError("R grid must be strictly increasing with at least two points")
    if R[0] < MIN_CURVE_R:
        raise LongRangeError(f"constant spin-orbit model not valid below R={MIN_CURVE_R} bohr")
    blocks = build_symmetry_blocks(asym)
    energies, limits, labels = {}, {}, {}
    half = -2.0 * asym.fine_splitting / 3.0 + asym.origin_shift
    for b in blocks:
        energies[b.label] = np.array([np.linalg.eigvalsh(hamiltonian_at_R(b, asym, r)) for r in R])
        lim = np.linalg.eigvalsh(b.so_matrix) * asym.fine_splitting + asym.origin_shift
        limits[b.label] = lim
        labels[b.label] = tuple("p1/2" if abs(e - half) < 1e-6 * asym.fine_splitting else "p3/2" for e in lim)
    return CurveSet(R, blocks, energies, limits, labels)


@dataclass(frozen=True)
class Well:
    block: str
    curve: int
    asymptote: str
    R_min: float
    depth: float  # cm^-1 below the curve's own asymptote


@dataclass
class WellReport:
    window: Tuple[float, float]
    wells: Dict[str, Optional[Well]]

    def has_well(self, label):
        return self.wells.get(label) is not None


def find_long_range_wells(curves: CurveSet, window=(18.0, 200.0), threshold=WELL_THRESHOLD) -> WellReport:
    """Deepest interior local minimum below its asymptote, per block.

    Depth is measured from the curve's own asymptote.  Minima closer than one
    grid step to either window edge are not interior and are ignored.
    """
    lo, hi = map(float, window)
    R = curves.R
    if not (lo < hi and R[0] <= lo and hi <= R[-1]):
        raise LongRangeError(f"window {window} not inside R grid [{R[0]}, {R[-1]}]")
    inside = np.nonzero((R >= lo) & (R <= hi))[0]
    out = {}
    for b in curves.blocks:
        E = curves.energies[b.label]
        best = None
        for c in range(E.shape[1]):
            y = E[inside, c]
            for k in range(1, len(y) - 1):
                if y[k] < y[k - 1] and y[k] < y[k + 1]:
                    depth = curves.asymptotes[b.label][c] - y[k]
                    if depth > threshold and (best is None or depth > best.depth):
                        best = Well(b.label, c, curves.asymptote_labels[b.label][c], float(R[inside[k]]), float(depth))
        out[b.label] = best
    return WellReport((lo, hi), out)


def london_dispersion(alpha_x, alpha_y, ei_x, ei_y, R):
    """Core-core London dispersion energy in cm^-1 (inputs in a.u.)."""
    if min(alpha_x, alpha_y) < 0 or not (ei_x > 0 and ei_y > 0 and R > 0):
        raise LongRangeError("polarizabilities must be >= 0; energies and R > 0")
    v = -1.5 * alpha_x * alpha_y / R**6 * ei_x * ei_y / (ei_x + ei_y)
    return v * HARTREE_TO_CM


def pa_rate_ratio(a: AtomAsymptote, b: AtomAsymptote):
    """Photoassociation rate of pair a relative to pair b."""
    return (
        (a.wavelength / b.wavelength) ** 3
        * math.sqrt(b.reduced_mass / a.reduced_mass)
        * (a.C3 / b.C3) ** (2.0 / 3.0)
        * (b.lifetime / a.lifetime)
    )


def scaled_splitting_scan(asym: AtomAsymptote, splittings: Sequence[float], R_grid, window=(18.0, 200.0), label="0g-"):
    """Well report for ``label`` as the fine splitting varies at fixed C3."""
    from dataclasses import replace

    out = []
    for d in splittings:
        report = find_long_range_wells(adiabatic_curves(replace(asym, fine_splitting=float(d)), R_grid), window)
        out.append((float(d), report.wells[label]))
    return out
