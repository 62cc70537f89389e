"""Radial interaction terms for a single valence electron outside an ionic core.

Three families are provided:

* the Klapisch-type parametric model potential with a truncated dipole
  polarization tail, plus its regularized spin-orbit companion;
* the semi-local Gaussian pseudopotential ``-1/r + sum C r^n exp(-a r^2)``;
* the one-electron reduction of the core-polarization potential with an
  l-dependent step cutoff.

``compose_effective_potential`` sums them into an :class:`EffectivePotential`
that the radial solver consumes.  All energies are in Hartree, radii in bohr.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple, Union

import numpy as np

from .units import FINE_STRUCTURE


class PotentialDomainError(ValueError):
    """Evaluation outside the domain of a potential term."""


class CompositionError(ValueError):
    """Incompatible combination of potential terms."""


class ParameterError(ValueError):
    """Parameter record violates its invariants."""


def _radii(r):
    r = np.asarray(r, dtype=float)
    if np.any(~(r > 0)):
        raise PotentialDomainError("radial coordinate must be strictly positive")
    return r


def _scalar_or_array(value, r):
    return float(value) if np.ndim(r) == 0 else value


# ---------------------------------------------------------------------------
# parameter records


@dataclass(frozen=True)
class KlapischChannel:
    alpha1: float
    alpha2: float
    alpha3: float
    rc: float

    def __post_init__(self):
        if not (self.alpha1 > 0 and self.alpha3 > 0 and self.rc > 0):
            raise ParameterError(f"alpha1, alpha3 and rc must be positive: {self}")


@dataclass(frozen=True)
class ModelPotentialParams:
    """Klapisch model potential parameters, one :class:`KlapischChannel` per l.

    Channels beyond the last tabulated l reuse the last record.
    """

    Z: int
    alpha_d: float
    channels: Tuple[KlapischChannel, ...]
    atom: str = ""

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(self.channels))
        if self.alpha_d < 0:
            raise ParameterError("alpha_d must be non-negative")
        if not self.channels:
            raise ParameterError("at least one l channel is required")
        if self.Z < 1:
            raise ParameterError("Z must be >= 1")

    @property
    def l_max(self):
        return len(self.channels) - 1

    def channel(self, ell):
        return self.channels[min(ell, self.l_max)]

    def replace_channel(self, ell, **changes):
        chans = list(self.channels)
        old = chans[ell]
        chans[ell] = KlapischChannel(**{**old.__dict__, **changes})
        return ModelPotentialParams(self.Z, self.alpha_d, tuple(chans), self.atom)


@dataclass(frozen=True)
class GaussianTerm:
    coefficient: float
    power: int
    exponent: float

    def __post_init__(self):
        if not self.exponent > 0:
            raise ParameterError(f"Gaussian exponent must be positive: {self}")
        if self.power not in (-1, 0, 1):
            raise ParameterError(f"power must be -1, 0 or 1: {self}")


@dataclass(frozen=True)
class PseudoPotentialParams:
    """Semi-local pseudopotential: per-l lists of :class:`GaussianTerm`.

    ``lowest_n`` gives the principal quantum number of the nodeless valence
    orbital in each l channel (7, 7, 6 for the Fr s, p, d series), which is
    how spectroscopic labels map onto node counts for a pseudopotential.
    """

    channels: Tuple[Tuple[GaussianTerm, ...], ...]
    lowest_n: Tuple[int, ...] = ()
    atom: str = ""

    def __post_init__(self):
        object.__setattr__(self, "channels", tuple(tuple(c) for c in self.channels))
        object.__setattr__(self, "lowest_n", tuple(self.lowest_n))
        if self.lowest_n and len(self.lowest_n) < len(self.channels):
            raise ParameterError("lowest_n must cover every tabulated channel")

    @property
    def l_max(self):
        return len(self.channels) - 1

    def terms(self, ell):
        if not self.channels:
            return ()
        return self.channels[min(ell, self.l_max)]

    def first_n(self, ell):
        if not self.lowest_n:
            return ell + 1
        if ell < len(self.lowest_n):
            return self.lowest_n[ell]
        # nodeless f-like and higher channels start at the hydrogenic value
        # unless tabulated
        return max(ell + 1, self.lowest_n[-1])


@dataclass(frozen=True)
class CorePolarizationParams:
    alpha_d: float
    cutoffs: Tuple[float, ...]
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "cutoffs", tuple(float(c) for c in self.cutoffs))
        if self.alpha_d < 0:
            raise ParameterError("alpha_d must be non-negative")
        if not self.cutoffs or any(not c > 0 for c in self.cutoffs):
            raise ParameterError(f"cutoff radii must be positive: {self.cutoffs}")

    def cutoff(self, ell):
        return self.cutoffs[min(ell, len(self.cutoffs) - 1)]

    def with_cutoffs(self, cutoffs):
        return CorePolarizationParams(self.alpha_d, tuple(cutoffs), self.label)


# ---------------------------------------------------------------------------
# Klapisch model potential


def _klapisch_parts(p, ell, r):
    c = p.channel(ell)
    e1 = np.exp(-c.alpha1 * r)
    e3 = np.exp(-c.alpha3 * r)
    screen = 1.0 + (p.Z - 1) * e1 + c.alpha2 * r * e3
    dscreen = -c.alpha1 * (p.Z - 1) * e1 + c.alpha2 * e3 * (1.0 - c.alpha3 * r)
    s = (r / c.rc) ** 6
    damp = -np.expm1(-s)  # 1 - exp(-(r/rc)^6), accurate for small r
    pol = -0.5 * p.alpha_d * damp / r**4
    dpol = -0.5 * p.alpha_d * (6.0 * s * np.exp(-s) / r**5 - 4.0 * damp / r**5)
    v = -screen / r + pol
    dv = screen / r**2 - dscreen / r + dpol
    return v, dv


def eval_model_potential(p, ell, r):
    """Klapisch model potential V_l(r) in Hartree."""
    rr = _radii(r)
    v, _ = _klapisch_parts(p, ell, rr)
    return _scalar_or_array(v, r)


def model_potential_derivative(p, ell, r):
    """Analytic dV_l/dr of :func:`eval_model_potential`."""
    rr = _radii(r)
    _, dv = _klapisch_parts(p, ell, rr)
    return _scalar_or_array(dv, r)


def spin_orbit_factor(ell, j):
    """<s.l> for j = l +/- 1/2."""
    if ell < 0:
        raise PotentialDomainError("l must be non-negative")
    if abs(abs(j - ell) - 0.5) > 1e-12 or j < 0:
        raise PotentialDomainError(f"j={j} is not l +/- 1/2 for l={ell}")
    if ell == 0:
        return 0.0
    return 0.5 * ell if j > ell else -0.5 * (ell + 1)


def eval_spin_orbit(p, ell, j, r):
    """Regularized spin-orbit term for the model potential.

    ``(a^2/2) <s.l> (1/r) dV/dr (1 - a^2 V/2)^-2`` with ``a`` the
    fine-structure constant and ``V`` the full model potential, including the
    polarization tail.
    """
    sl = spin_orbit_factor(ell, j)
    rr = _radii(r)
    if sl == 0.0:
        out = np.zeros_like(rr)
    else:
        v, dv = _klapisch_parts(p, ell, rr)
        a2 = FINE_STRUCTURE**2
        out = 0.5 * a2 * sl * dv / rr / (1.0 - 0.5 * a2 * v) ** 2
    return _scalar_or_array(out, r)


# ---------------------------------------------------------------------------
# pseudopotential and core polarization


def eval_pseudopotential(p, ell, r):
    """Semi-local pseudopotential W_l(r) = -1/r + sum_i C_i r^n_i exp(-a_i r^2)."""
    rr = _radii(r)
    out = -1.0 / rr
    for t in p.terms(ell):
        out = out + t.coefficient * rr**t.power * np.exp(-t.exponent * rr**2)
    return _scalar_or_array(out, r)


def eval_cpp_atomic(p, ell, r):
    """One-electron core polarization: 0 below rho_l, -alpha_d/(2 r^4) at and above."""
    rr = _radii(r)
    out = np.where(rr >= p.cutoff(ell), -0.5 * p.alpha_d / rr**4, 0.0)
    return _scalar_or_array(out, r)


def _cpp_cell_fraction(grid, rho):
    """Fraction of each node's dual cell (in the uniform coordinate) above rho."""
    x = grid.x
    h = grid.step
    xr = np.log(rho) if grid.mapping == "logarithmic" else rho
    lo = x - 0.5 * h
    hi = x + 0.5 * h
    return np.clip((hi - xr) / h, 0.0, 1.0)


# ---------------------------------------------------------------------------
# composition

TermSpec = Union[str, ModelPotentialParams, PseudoPotentialParams, CorePolarizationParams, Callable]


def _kind(term):
    if isinstance(term, str):
        if term in ("coulomb", "spin_orbit"):
            return term
        raise CompositionError(f"unknown term {term!r}")
    if isinstance(term, ModelPotentialParams):
        return "model"
    if isinstance(term, PseudoPotentialParams):
        return "pseudo"
    if isinstance(term, CorePolarizationParams):
        return "cpp"
    if callable(term):
        return "custom"
    raise CompositionError(f"unsupported term {term!r}")


@dataclass(frozen=True, eq=False)
class EffectivePotential:
    """Sum of radial terms for one (l, j) channel.

    Calling the object evaluates the pointwise sum.  :meth:`on_grid` returns
    the values the solvers use: identical to the pointwise sum except that the
    step of the core-polarization term is replaced by its cell average, so
    energies vary continuously with the cutoff radius.
    """

    terms: Tuple[TermSpec, ...]
    ell: int
    j: Optional[float] = None
    kinds: Tuple[str, ...] = field(default=(), repr=False)

    def __call__(self, r):
        rr = _radii(r)
        out = np.zeros_like(rr)
        for kind, term in zip(self.kinds, self.terms):
            out = out + self._eval(kind, term, rr)
        return _scalar_or_array(out, r)

    def _eval(self, kind, term, r):
        if kind == "coulomb":
            return -1.0 / r
        if kind == "model":
            return eval_model_potential(term, self.ell, r)
        if kind == "pseudo":
            return eval_pseudopotential(term, self.ell, r)
        if kind == "cpp":
            return eval_cpp_atomic(term, self.ell, r)
        if kind == "spin_orbit":
            return eval_spin_orbit(self.model, self.ell, self.j, r)
        return np.asarray(term(r), dtype=float)

    def on_grid(self, grid):
        r = grid.nodes
        out = np.zeros_like(r)
        for kind, term in zip(self.kinds, self.terms):
            if kind == "cpp":
                frac = _cpp_cell_fraction(grid, term.cutoff(self.ell))
                out = out - frac * 0.5 * term.alpha_d / r**4
            else:
                out = out + self._eval(kind, term, r)
        if not np.all(np.isfinite(out)):
            raise PotentialDomainError("potential is not finite on every grid node")
        return out

    @property
    def model(self):
        for kind, term in zip(self.kinds, self.terms):
            if kind == "model":
                return term
        return None

    def first_n(self):
        """Principal quantum number of the nodeless state in this channel."""
        for kind, term in zip(self.kinds, self.terms):
            if kind == "pseudo":
                return term.first_n(self.ell)
        return self.ell + 1


def compose_effective_potential(terms: Sequence[TermSpec], ell: int, j: Optional[float] = None):
    """Combine potential terms for channel (l, j).

    ``terms`` may contain ``"coulomb"``, ``"spin_orbit"``, parameter records
    (:class:`ModelPotentialParams`, :class:`PseudoPotentialParams`,
    :class:`CorePolarizationParams`) or a plain callable ``r -> V(r)``.
    Spin-orbit requires the model potential and a j value; the core
    polarization term goes with the pseudopotential.  When ``j`` is given for
    a model potential the spin-orbit term is added if missing.
    """
    if ell < 0 or int(ell) != ell:
        raise CompositionError(f"l must be a non-negative integer, got {ell}")
    terms = tuple(terms)
    if not terms:
        raise CompositionError("no potential terms given")
    kinds = tuple(_kind(t) for t in terms)
    count = {k: kinds.count(k) for k in set(kinds)}
    if any(count[k] > 1 for k in count):
        raise CompositionError(f"duplicate terms: {[k for k in count if count[k] > 1]}")
    if "model" in count and "pseudo" in count:
        raise CompositionError("model and pseudo terms are mutually exclusive")
    if "coulomb" in count and ("model" in count or "pseudo" in count):
        raise CompositionError("coulomb clashes with model/pseudo (both carry the -1/r tail)")
    if "cpp" in count and "pseudo" not in count:
        raise CompositionError("cpp requires the pseudo term")
    if "spin_orbit" in count and "model" not in count:
        raise CompositionError("spin_orbit requires the model term")
    if "spin_orbit" in count and j is None:
        raise CompositionError("spin_orbit requires j")
    if j is not None:
        spin_orbit_factor(ell, j)  # validates j
        if "model" in count and "spin_orbit" not in count:
            terms = terms + ("spin_orbit",)
            kinds = kinds + ("spin_orbit",)
    return EffectivePotential(terms, int(ell), None if j is None else float(j), kinds)
