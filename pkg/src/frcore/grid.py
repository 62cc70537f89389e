"""Radial grids with Simpson quadrature weights."""

from dataclasses import dataclass, field

import numpy as np


class GridError(ValueError):
    """Invalid grid parameters."""


MAPPINGS = ("linear", "logarithmic")


@dataclass(frozen=True, eq=False)
class RadialGrid:
    """Discretization of (0, r_max] on a uniform auxiliary coordinate.

    For ``mapping="logarithmic"`` the uniform coordinate is ``x = ln r``;
    for ``"linear"`` it is ``r`` itself.  ``step`` is the spacing in that
    coordinate and ``jacobian`` holds ``dr/dx`` at each node.
    """

    r_min: float
    r_max: float
    n_points: int
    mapping: str
    nodes: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)
    step: float
    jacobian: np.ndarray = field(repr=False)

    @property
    def r(self):
        return self.nodes

    @property
    def x(self):
        """Uniform coordinate at the nodes."""
        if self.mapping == "logarithmic":
            return np.log(self.nodes)
        return self.nodes

    def integrate(self, values):
        return float(np.dot(self.weights, values))

    def refined(self, factor=2):
        """Grid on the same span with ``factor`` times finer spacing."""
        n = factor * (self.n_points - 1) + 1
        return build_grid(self.r_min, self.r_max, n, self.mapping)


def simpson_weights(n, h):
    """Composite Simpson weights for ``n`` equispaced points.

    For even ``n`` the last three intervals use Simpson's 3/8 rule, so the
    rule stays exact for cubics and every weight stays positive.
    """
    if n < 4:
        raise GridError("Simpson weights need at least 4 points")
    w = np.zeros(n)
    m = n if n % 2 == 1 else n - 3  # points covered by the 1/3 rule
    w[:m:2] = 2.0
    w[1:m:2] = 4.0
    w[0] = 1.0
    w[m - 1] = 1.0
    w *= h / 3.0
    if m != n:
        w[n - 4 :] += 3.0 * h / 8.0 * np.array([1.0, 3.0, 3.0, 1.0])
    return w


def build_grid(r_min, r_max, n_points, mapping="logarithmic"):
    """Build a radial grid on ``[r_min, r_max]``.

    Parameters
    ----------
    r_min, r_max : float
        Endpoints in bohr; ``0 < r_min < r_max``.
    n_points : int
        Number of nodes, at least 100.
    mapping : {"logarithmic", "linear"}
        Node distribution.
    """
    if not r_min > 0:
        raise GridError(f"r_min must be positive, got {r_min}")
    if not r_max > r_min:
        raise GridError(f"r_max ({r_max}) must exceed r_min ({r_min})")
    if int(n_points) != n_points or n_points < 100:
        raise GridError(f"n_points must be an integer >= 100, got {n_points}")
    if mapping not in MAPPINGS:
        raise GridError(f"unknown mapping {mapping!r}; expected one of {MAPPINGS}")
    n_points = int(n_points)
    if mapping == "logarithmic":
        x = np.linspace(np.log(r_min), np.log(r_max), n_points)
        nodes = np.exp(x)
        nodes[0], nodes[-1] = r_min, r_max
        h = x[1] - x[0]
        jac = nodes.copy()
    else:
        nodes = np.linspace(r_min, r_max, n_points)
        h = nodes[1] - nodes[0]
        jac = np.ones(n_points)
    weights = simpson_weights(n_points, h) * jac
    return RadialGrid(float(r_min), float(r_max), n_points, mapping, nodes, weights, float(h), jac)
