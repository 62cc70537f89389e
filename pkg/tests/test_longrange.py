import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import constants as sc

from frcore.longrange import (
    AtomAsymptote,
    CurveSet,
    LongRangeError,
    SymmetryBlock,
    adiabatic_curves,
    build_symmetry_blocks,
    c3_from_lifetime,
    find_long_range_wells,
    hamiltonian_at_R,
    london_dispersion,
    pa_rate_ratio,
)
from frcore.units import HARTREE_TO_CM

R_SCAN = np.linspace(15.0, 400.0, 3851)


@pytest.fixture(scope="module")
def blocks():
    return {b.label: b for b in build_symmetry_blocks()}


@pytest.fixture(scope="module")
def cs(atoms):
    return AtomAsymptote.from_atom_data("Cs", atoms["Cs"])


@pytest.fixture(scope="module")
def fr(atoms):
    return AtomAsymptote.from_atom_data("Fr", atoms["Fr"])


def test_block_inventory(blocks):
    assert set(blocks) == {"0g+", "0g-", "0u+", "0u-", "1g", "1u", "2g", "2u"}
    assert sorted(blocks["0u+"].basis) == ["1Sigmau+", "3Piu"]
    assert blocks["2u"].basis == ("3Piu",)
    assert sum(b.dimension * b.weight for b in blocks.values()) == 24


def test_dipole_table(blocks):
    expected = {
        "1Sigmag+": 2, "1Sigmau+": -2, "3Sigmag+": -2, "3Sigmau+": 2,
        "1Pig": -1, "1Piu": 1, "3Pig": 1, "3Piu": -1,
    }
    for b in blocks.values():
        for label, c in zip(b.basis, b.dipole_coefficients):
            assert c == expected[label]


def test_case_a_vectors_orthonormal(blocks):
    v = np.hstack([b.vectors for b in blocks.values()])
    assert np.allclose(v.T @ v, np.eye(v.shape[1]), atol=1e-12)


def test_free_atom_multiplicities(blocks):
    values = []
    for b in blocks.values():
        values += list(np.linalg.eigvalsh(b.so_matrix)) * b.weight
    values = np.array(values)
    assert np.sum(np.isclose(values, -2 / 3)) == 8
    assert np.sum(np.isclose(values, 1 / 3)) == 16


def test_no_spin_orbit_limit(blocks):
    for b in blocks.values():
        ev = np.sort(b.dipole_coefficients)
        assert set(np.round(ev).astype(int)) <= {-2, -1, 1, 2}


def test_trace_shift(blocks, cs):
    for b in blocks.values():
        inf = np.trace(hamiltonian_at_R(b, cs, 1e6))
        R = 30.0
        diff = np.trace(hamiltonian_at_R(b, cs, R)) - inf
        expected = b.dipole_coefficients.sum() * cs.C3 * HARTREE_TO_CM / R**3
        assert diff == pytest.approx(expected, rel=1e-9, abs=1e-9)


@settings(deadline=None, max_examples=60)
@given(st.floats(15.0, 1000.0), st.floats(1.0, 5000.0), st.floats(0.1, 50.0))
def test_hermitian_and_gu_pairing(blocks, cs, R, delta, c3):
    asym = replace(cs, fine_splitting=delta, C3=c3)
    for lab, b in blocks.items():
        h = hamiltonian_at_R(b, asym, R)
        assert np.allclose(h, h.T, rtol=1e-14, atol=0)
        if "g" in lab:
            partner = blocks[lab.replace("g", "u")]
            flipped = partner.so_matrix * delta + np.diag(-partner.dipole_coefficients * c3 * HARTREE_TO_CM / R**3)
            assert np.allclose(np.linalg.eigvalsh(h), np.linalg.eigvalsh(flipped), atol=1e-9 * delta)


def test_domain_errors(blocks, cs):
    with pytest.raises(LongRangeError):
        hamiltonian_at_R(blocks["1u"], cs, 0.0)
    with pytest.raises(LongRangeError):
        replace(cs, fine_splitting=-1.0)
    with pytest.raises(LongRangeError):
        replace(cs, energy_origin="p_three_halves")
    with pytest.raises(LongRangeError):
        adiabatic_curves(cs, np.linspace(10.0, 100.0, 10))
    with pytest.raises(LongRangeError):
        adiabatic_curves(cs, np.array([20.0, 19.0]))


def _brute_force_c3(tau_ns, wavelength_nm):
    """d^2 from A = 4 w^3 / (3 c^3) sum |<s m'|d|p3/2 m>|^2 with explicit CG states."""
    # single-electron basis: s x spin (0, 1), p_m x spin (2..7), m = -1, 0, 1
    def idx(l, m, s):
        return s if l == 0 else 2 + (m + 1) * 2 + s

    sz = np.diag([0.5, -0.5])
    sp = np.array([[0.0, 1.0], [0.0, 0.0]])
    lz = np.diag([-1.0, 0.0, 1.0])
    lp = np.zeros((3, 3))
    lp[1, 0] = lp[2, 1] = math.sqrt(2.0)
    Jz = np.kron(lz, np.eye(2)) + np.kron(np.eye(3), sz)
    Jp = np.kron(lp, np.eye(2)) + np.kron(np.eye(3), sp)
    J2 = Jp @ Jp.T + Jz @ Jz - Jz
    w, v = np.linalg.eigh(J2 + 1e-3 * Jz)
    upper = v[:, np.isclose(w - 1e-3 * np.diag(v.T @ Jz @ v), 3.75)]
    # spherical dipole components, <s|d_q|p_m> = 1 for m = -q (unit d)
    D = [np.zeros((8, 8)) for _ in range(3)]
    for q in (-1, 0, 1):
        for s in (0, 1):
            D[q + 1][idx(0, 0, s), idx(1, -q, s)] = 1.0
    col = np.zeros((8, upper.shape[1]))
    col[2:, :] = upper
    strengths = [sum(np.sum((Dq @ col[:, k])[:2] ** 2) for Dq in D) for k in range(col.shape[1])]
    assert np.allclose(strengths, strengths[0])
    c = 1.0 / sc.fine_structure
    bohr_nm = sc.physical_constants["Bohr radius"][0] * 1e9
    t_au = sc.hbar / sc.physical_constants["Hartree energy"][0]
    omega = 2 * math.pi * c * bohr_nm / wavelength_nm
    rate = 1.0 / (tau_ns * 1e-9 / t_au)
    return rate * 3 * c**3 / (4 * omega**3 * strengths[0])


def test_c3_matches_brute_force_oracle(atoms):
    cs = atoms["Cs"]
    ref = _brute_force_c3(cs["d2_lifetime"], cs["d2_wavelength"])
    assert c3_from_lifetime(cs["d2_lifetime"], cs["d2_wavelength"]) == pytest.approx(ref, rel=1e-6)
    assert ref == pytest.approx(10.03, rel=0.01)


@settings(deadline=None, max_examples=30)
@given(st.floats(1.0, 100.0), st.floats(300.0, 1500.0), st.floats(1.1, 3.0))
def test_c3_scaling(tau, lam, k):
    base = c3_from_lifetime(tau, lam)
    assert c3_from_lifetime(tau, k * lam) == pytest.approx(base * k**3, rel=1e-12)
    assert c3_from_lifetime(k * tau, lam) == pytest.approx(base / k, rel=1e-12)


def test_c3_limits_and_errors():
    assert c3_from_lifetime(math.inf, 800.0) == 0.0
    assert c3_from_lifetime(30.0, 850.0, j_upper=0.5) == c3_from_lifetime(30.0, 850.0)
    for bad in (dict(j_upper=2.5), dict(j_lower=1.5)):
        with pytest.raises(LongRangeError):
            c3_from_lifetime(30.0, 850.0, **bad)
    with pytest.raises(LongRangeError):
        c3_from_lifetime(-1.0, 850.0)


def test_asymptotes_and_labels(cs):
    curves = adiabatic_curves(cs, np.array([400.0, 800.0]))
    for lab, E in curves.energies.items():
        assert np.allclose(E[-1], curves.asymptotes[lab], atol=0.01)
        for e, name in zip(curves.asymptotes[lab], curves.asymptote_labels[lab]):
            target = -2 * cs.fine_splitting / 3 if name == "p1/2" else cs.fine_splitting / 3
            assert e == pytest.approx(target, abs=1e-9)


def test_p_half_origin(cs):
    shifted = replace(cs, energy_origin="p_half")
    a = adiabatic_curves(cs, R_SCAN[::100]).energies["1u"]
    b = adiabatic_curves(shifted, R_SCAN[::100]).energies["1u"]
    assert np.allclose(b - a, 2 * cs.fine_splitting / 3)


def test_c6_flag_deepens_curves(cs):
    with_c6 = replace(cs, include_c6=True)
    R = np.array([20.0, 40.0])
    a = adiabatic_curves(cs, R).energies["0g-"]
    b = adiabatic_curves(with_c6, R).energies["0g-"]
    assert np.all(b < a)
    assert np.allclose(a - b, (cs.C6 * HARTREE_TO_CM / R**6)[:, None])


def test_curve_continuity(cs):
    curves = adiabatic_curves(cs, R_SCAN)
    for E in curves.energies.values():
        jumps = np.abs(np.diff(E, axis=0))
        scale = np.abs(E[1:]) + cs.fine_splitting
        assert np.all(jumps < 0.05 * scale)


def test_cs_has_both_wells(cs):
    report = find_long_range_wells(adiabatic_curves(cs, R_SCAN))
    for lab in ("0g-", "1u"):
        w = report.wells[lab]
        assert w is not None and w.depth > 0 and w.asymptote == "p3/2"
        assert 18.0 < w.R_min < 200.0


def test_fr_has_no_0g_minus_well(fr):
    report = find_long_range_wells(adiabatic_curves(fr, R_SCAN))
    assert report.wells["0g-"] is None


def test_well_depth_scales_with_splitting(cs):
    # C3/R^3 + constant SO is scale free: depth ~ Delta, R_min ~ Delta^-1/3
    R = np.linspace(15.0, 400.0, 7701)
    w1 = find_long_range_wells(adiabatic_curves(cs, R), (15.0, 400.0)).wells["0g-"]
    w2 = find_long_range_wells(adiabatic_curves(replace(cs, fine_splitting=2 * cs.fine_splitting), R), (15.0, 400.0)).wells["0g-"]
    assert w2.depth / w1.depth == pytest.approx(2.0, rel=1e-3)
    assert w2.R_min / w1.R_min == pytest.approx(2 ** (-1 / 3), rel=0.01)


def test_monotone_curve_has_no_well():
    R = np.linspace(20.0, 200.0, 50)
    E = (-100.0 / R**3)[:, None]
    b = SymmetryBlock(1, "g", "", ("x",), np.array([-1.0]), np.zeros((1, 1)), np.zeros((24, 1)))
    curves = CurveSet(R, [b], {"1g": E}, {"1g": np.array([0.0])}, {"1g": ("p3/2",)})
    assert find_long_range_wells(curves, (20.0, 200.0)).wells["1g"] is None


def test_window_outside_grid(cs):
    curves = adiabatic_curves(cs, np.linspace(20.0, 100.0, 20))
    with pytest.raises(LongRangeError):
        find_long_range_wells(curves, (18.0, 200.0))


def test_london_properties():
    assert london_dispersion(0.0, 10.0, 0.1, 0.2, 8.0) == 0.0
    v = london_dispersion(20.0, 15.0, 0.15, 0.14, 8.0)
    assert v < 0
    assert london_dispersion(20.0, 15.0, 0.15, 0.14, 16.0) == pytest.approx(v / 64, rel=1e-14)
    assert london_dispersion(15.0, 20.0, 0.14, 0.15, 8.0) == pytest.approx(v, rel=1e-14)
    with pytest.raises(LongRangeError):
        london_dispersion(1.0, 1.0, 0.1, 0.1, 0.0)


@settings(deadline=None, max_examples=60)
@given(
    st.floats(300.0, 1000.0), st.floats(5.0, 100.0), st.floats(1e4, 5e5), st.floats(1.0, 20.0),
    st.floats(300.0, 1000.0), st.floats(5.0, 100.0), st.floats(1e4, 5e5), st.floats(1.0, 20.0),
)
def test_pa_ratio_reciprocity(la, ta, ma, ca, lb, tb, mb, cb):
    mk = lambda lam, tau, m, c3: AtomAsymptote("X", 100.0, c3, 1000.0, lam, tau, m)
    a, b = mk(la, ta, ma, ca), mk(lb, tb, mb, cb)
    assert pa_rate_ratio(a, b) * pa_rate_ratio(b, a) == pytest.approx(1.0, abs=1e-12)
    assert pa_rate_ratio(replace(a, lifetime=2 * ta), b) == pytest.approx(pa_rate_ratio(a, b) / 2, rel=1e-12)


def test_pa_ratio_identity(fr):
    assert pa_rate_ratio(fr, fr) == 1.0
