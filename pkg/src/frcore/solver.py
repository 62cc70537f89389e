"""Bound states of the single-channel radial Schroedinger equation.

The shooting solver integrates

    -1/2 P'' + [l(l+1)/(2 r^2) + V(r) - E] P = 0

with Numerov's method on the uniform coordinate of the grid.  On a
logarithmic grid it works with ``u = P / sqrt(r)`` in ``x = ln r``, which obeys
``u'' = [2 r^2 (V - E) + (l + 1/2)^2] u``.  Eigenvalues are bracketed by
counting nodes of the outward solution (Sturm oscillation) and refined with
the first-order correction obtained from the derivative mismatch at the
classical turning point.

``matrix_oracle_spectrum`` is an independent check: second-order finite
differences on the same coordinate, diagonalized as a symmetric tridiagonal
matrix, with Richardson extrapolation over successively halved steps.
"""

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from numba import njit
from scipy.linalg import eigh_tridiagonal

from .grid import RadialGrid

ENERGY_TOL = 1e-11
MAX_ITER = 200
# e-folds of decay beyond the turning point where inward integration starts
DECAY_EFOLDS = 45.0


class SolverError(RuntimeError):
    pass


class BoundStateNotFound(SolverError):
    """No bound state with the requested node count in the search window."""

    def __init__(self, message, window):
        super().__init__(f"{message} (scanned window {window[0]:.6g} .. {window[1]:.6g} Hartree)")
        self.window = window


class ConvergenceError(SolverError):
    def __init__(self, message, bracket):
        super().__init__(f"{message} (last bracket {bracket[0]!r} .. {bracket[1]!r} Hartree)")
        self.bracket = bracket


@dataclass(frozen=True, eq=False)
class BoundState:
    n: int
    ell: int
    j: Optional[float]
    energy: float
    P: np.ndarray = field(repr=False)
    node_count: int
    grid: RadialGrid = field(repr=False)

    def norm(self):
        return self.grid.integrate(self.P**2)


# ---------------------------------------------------------------------------
# Numerov kernels


@njit(cache=True)
def _outward_nodes(f, u0, u1):
    """Sign changes of the outward Numerov solution over the whole grid.

    Integration stops once ``f`` becomes small (deep in the forbidden region,
    where the recurrence loses meaning and no further nodes can appear).
    """
    n = f.shape[0]
    nodes = 0
    a, b = u0, u1
    if a * b < 0.0:
        nodes += 1
    for i in range(1, n - 1):
        if f[i + 1] < 0.05:
            break
        c = ((12.0 - 10.0 * f[i]) * b - f[i - 1] * a) / f[i + 1]
        if c * b < 0.0:
            nodes += 1
        elif c == 0.0 and b != 0.0:
            nodes += 1
        a, b = b, c
        if abs(b) > 1e150:
            a *= 1e-150
            b *= 1e-150
    return nodes


@njit(cache=True)
def _integrate_matched(f, sqrtg, u0, u1, m, last):
    """Outward solution on [0, m], inward solution on [m, last], matched at m.

    Returns the combined array (zero beyond ``last``) and the node count.
    """
    n = f.shape[0]
    y = np.zeros(n)
    y[0] = u0
    y[1] = u1
    for i in range(1, m):
        y[i + 1] = ((12.0 - 10.0 * f[i]) * y[i] - f[i - 1] * y[i - 1]) / f[i + 1]
        if abs(y[i + 1]) > 1e150:
            for k in range(i + 2):
                y[k] *= 1e-150
    ym = y[m]
    z = np.zeros(n)
    z[last] = 1e-200
    z[last - 1] = z[last] * np.exp(0.5 * (sqrtg[last] + sqrtg[last - 1]))
    for i in range(last - 1, m, -1):
        z[i - 1] = ((12.0 - 10.0 * f[i]) * z[i] - f[i + 1] * z[i + 1]) / f[i - 1]
        if abs(z[i - 1]) > 1e150:
            for k in range(i - 1, last + 1):
                z[k] *= 1e-150
    scale = ym / z[m]
    for i in range(m + 1, last + 1):
        y[i] = z[i] * scale
    nodes = 0
    prev = 0.0
    for i in range(n):
        if y[i] != 0.0:
            if prev * y[i] < 0.0:
                nodes += 1
            prev = y[i]
    return y, nodes


# ---------------------------------------------------------------------------
# shooting solver


class _Channel:
    """Discretized equation ``u'' = g u`` for one potential on one grid."""

    def __init__(self, pot, ell, grid):
        self.grid = grid
        self.ell = ell
        self.h = grid.step
        r = grid.nodes
        self.r = r
        self.v = pot.on_grid(grid)
        self.log = grid.mapping == "logarithmic"
        if self.log:
            self.w = 2.0 * r**2
            self.g0 = self.w * self.v + (ell + 0.5) ** 2
        else:
            self.w = np.full_like(r, 2.0)
            self.g0 = 2.0 * self.v + ell * (ell + 1) / r**2
        # Coulomb-like charge at the origin for the regular-solution seed
        z0 = -r[0] * self.v[0]
        power = ell + 0.5 if self.log else ell + 1.0
        seed = r[:2] ** power * (1.0 - z0 * r[:2] / (ell + 1.0))
        scale = 1.0 / abs(seed[1]) if seed[1] != 0 else 1.0
        self.u0, self.u1 = seed * scale
        self.vmin = float(np.min(self.g0 / self.w))

    def g(self, energy):
        return self.g0 - self.w * energy

    def f(self, energy):
        return 1.0 - self.h**2 * self.g(energy) / 12.0

    def count(self, energy):
        return _outward_nodes(self.f(energy), self.u0, self.u1)

    def matched(self, energy):
        g = self.g(energy)
        f = 1.0 - self.h**2 * g / 12.0
        n = g.shape[0]
        allowed = np.nonzero(g < 0.0)[0]
        if allowed.size == 0:
            return None
        m = int(allowed[-1]) + 1
        m = min(max(m, 3), n - 4)
        sqrtg = np.sqrt(np.clip(g, 0.0, None)) * self.h
        decay = np.cumsum(sqrtg[m:])
        beyond = np.nonzero(decay > DECAY_EFOLDS)[0]
        last = n - 1 if beyond.size == 0 else min(n - 1, m + int(beyond[0]) + 2)
        last = max(last, m + 3)
        y, nodes = _integrate_matched(f, sqrtg, self.u0, self.u1, m, last)
        P = y * np.sqrt(self.r) if self.log else y
        norm = self.grid.integrate(P**2)
        res = f[m - 1] * y[m - 1] + f[m + 1] * y[m + 1] - (12.0 - 10.0 * f[m]) * y[m]
        # first-order energy correction from the derivative mismatch at m
        correction = -y[m] * res / (self.h * 2.0 * norm)
        return P / np.sqrt(norm), nodes, correction


def _nodes_of(P):
    nz = P[np.abs(P) > 0.0]
    return int(np.count_nonzero(nz[1:] * nz[:-1] < 0.0))


def _solve_channel(ch, target_nodes, e_hi=0.0):
    window = (ch.vmin, e_hi)
    lo, hi = ch.vmin, e_hi
    if ch.count(hi) <= target_nodes:
        raise BoundStateNotFound(f"fewer than {target_nodes + 1} bound states with l={ch.ell}", window)
    if ch.count(lo) > target_nodes:
        raise BoundStateNotFound("node count already exceeded at the potential minimum", window)
    # node-count bisection until the bracket isolates one eigenvalue
    for _ in range(MAX_ITER):
        mid = 0.5 * (lo + hi)
        if ch.count(mid) > target_nodes:
            hi = mid
        else:
            lo = mid
        if ch.count(lo) == target_nodes and ch.count(hi) == target_nodes + 1:
            if hi - lo < 1e-4 * max(1.0, abs(lo)):
                break
    else:
        raise ConvergenceError("bisection failed to isolate the eigenvalue", (lo, hi))
    # refinement with the matching-point correction, safeguarded by the bracket
    energy = 0.5 * (lo + hi)
    for _ in range(MAX_ITER):
        out = ch.matched(energy)
        if out is None:
            lo = energy
            energy = 0.5 * (lo + hi)
            continue
        P, nodes, delta = out
        if nodes > target_nodes:
            hi = energy
        elif nodes < target_nodes:
            lo = energy
        elif delta > 0:
            lo = energy
        else:
            hi = energy
        if nodes == target_nodes and abs(delta) < ENERGY_TOL * max(1.0, abs(energy)) * 0.1:
            return energy + delta, P, nodes
        trial = energy + delta if nodes == target_nodes else 0.5 * (lo + hi)
        if not lo < trial < hi:
            trial = 0.5 * (lo + hi)
        if hi - lo < 1e-15 * max(1.0, abs(energy)):
            if nodes == target_nodes:
                return energy, P, nodes
            break
        energy = trial
    raise ConvergenceError(f"no convergence for {target_nodes} nodes", (lo, hi))


def solve_bound_state(pot, ell, j, target_n, grid):
    """Bound state with principal quantum number ``target_n``.

    The node count is ``target_n - n0`` where ``n0`` is the principal number
    of the nodeless state of the channel (``l + 1`` except for
    pseudopotentials, which carry their own valence labels).
    """
    if pot.ell != ell:
        raise ValueError(f"potential built for l={pot.ell}, asked for l={ell}")
    n0 = pot.first_n()
    if target_n < n0:
        raise ValueError(f"n={target_n} is below the lowest state n={n0} for l={ell}")
    ch = _Channel(pot, ell, grid)
    energy, P, nodes = _solve_channel(ch, target_n - n0)
    # fix the sign: first lobe positive
    first = P[np.nonzero(np.abs(P) > 1e-8 * np.max(np.abs(P)))[0][0]]
    if first < 0:
        P = -P
    return BoundState(target_n, ell, j, float(energy), P, _nodes_of(P), grid)


class SpectrumError(SolverError):
    def __init__(self, n, err):
        super().__init__(f"n={n}: {err}")
        self.n = n
        self.cause = err


def solve_spectrum(pot, ell, j, n_list, grid) -> List[BoundState]:
    n_list = list(n_list)
    if any(b <= a for a, b in zip(n_list, n_list[1:])):
        raise ValueError("n_list must be strictly increasing")
    states = []
    for n in n_list:
        try:
            states.append(solve_bound_state(pot, ell, j, n, grid))
        except (SolverError, ValueError) as err:
            raise SpectrumError(n, err) from err
    return states


# ---------------------------------------------------------------------------
# finite-difference oracle


@dataclass(frozen=True)
class OracleSpectrum:
    energies: np.ndarray
    complete: bool


def _fd_levels(pot, ell, grid, k):
    """Lowest k eigenvalues of the 3-point finite-difference Hamiltonian."""
    r = grid.nodes
    h = grid.step
    v = pot.on_grid(grid)
    if grid.mapping == "logarithmic":
        # -1/2 u'' + [r^2 V + (l+1/2)^2/2] u = E r^2 u, symmetrized with w = r u
        lam = ell + 0.5
        diag_a = 1.0 / h**2 + r**2 * v + 0.5 * lam**2
        # regular solution u ~ r^(l+1/2) (1 - z r/(l+1)) with z = -r V at r_min
        # fixes the ghost node u_{-1} in terms of u_0
        z = -r[0] * v[0]
        r_ghost = r[0] * np.exp(-h)
        ratio = np.exp(-h * lam) * (1.0 - z * r_ghost / (ell + 1)) / (1.0 - z * r[0] / (ell + 1))
        diag_a[0] -= 0.5 * ratio / h**2
        off_a = np.full(len(r) - 1, -0.5 / h**2)
        d = diag_a / r**2
        e = off_a / (r[:-1] * r[1:])
    else:
        d = 1.0 / h**2 + v + ell * (ell + 1) / (2.0 * r**2)
        # regular solution P ~ r^(l+1): ghost node value from the power law
        ghost = max(r[0] - h, 0.0) ** (ell + 1) / r[0] ** (ell + 1)
        d[0] -= 0.5 * ghost / h**2
        e = np.full(len(r) - 1, -0.5 / h**2)
    k = min(k, len(r))
    # entries span ~1/(h r_min)^2, so the default bisection tolerance
    # (eps * norm) would swamp the small eigenvalues; bisect to full precision
    return eigh_tridiagonal(
        d, e, eigvals_only=True, select="i", select_range=(0, k - 1), lapack_driver="stebz", tol=1e-300
    )


def matrix_oracle_spectrum(pot, ell, j, k_lowest, grid, levels=3):
    """Lowest bound eigenvalues from finite differences with Richardson extrapolation.

    The spectrum is computed on ``grid`` and on ``levels - 1`` successively
    halved steps over the same span, then extrapolated in ``h^2``.  Only
    negative eigenvalues are returned; ``complete`` is False when fewer than
    ``k_lowest`` were bound.
    """
    grids = [grid]
    for _ in range(levels - 1):
        grids.append(grids[-1].refined(2))
    table = [_fd_levels(pot, ell, g, k_lowest) for g in grids]
    # Richardson tableau in powers of h^2
    for order in range(1, levels):
        fac = 4.0**order
        table = [(fac * fine - coarse) / (fac - 1.0) for coarse, fine in zip(table, table[1:])]
    energies = np.asarray(table[0])
    bound = energies[energies < 0.0]
    return OracleSpectrum(bound, complete=len(bound) >= k_lowest)
