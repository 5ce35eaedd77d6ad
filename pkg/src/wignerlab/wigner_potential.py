"""Truncated Wigner potential of a piecewise-constant profile.

The nonlocal kernel of the transport operator is the sine transform of the
potential difference D_V(x, .).  It is approximated by a uniform-weight sum
over the correlation variable, truncated at a cutoff L_y:

    V_w(x, v) = -(1/pi) * sum_{j=1..N_y} D_V(x, j*dy) * sin(j*dy*v) * dy

with N_y = L_y / dy.  The j = 0 term is always zero because D_V(x, 0) = 0,
so the uniform weights coincide with a trapezoidal rule except for the
half-weight at j = N_y; the uniform-weight form is kept deliberately as the
canonical discretization.  Summation runs in ascending j for reproducible
floating-point results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .potential import PotentialProfile, potential_difference

__all__ = ["QuadratureSpec", "wigner_potential"]


@dataclass(frozen=True)
class QuadratureSpec:
    """Correlation-integral truncation: cutoff L_y and step dy.

    L_y / dy must be a positive integer (the number of quadrature nodes).
    """

    l_y: float
    dy: float

    def __post_init__(self) -> None:
        if not (self.l_y > 0 and self.dy > 0):
            raise ConfigurationError(
                f"quadrature parameters must be positive, got "
                f"L_y={self.l_y}, dy={self.dy}")
        ratio = self.l_y / self.dy
        if abs(ratio - round(ratio)) > 1e-9 or round(ratio) < 1:
            raise ConfigurationError(
                f"L_y/dy must be a positive integer, got "
                f"{self.l_y}/{self.dy} = {ratio}")

    @property
    def n_y(self) -> int:
        """Number of quadrature nodes j = 1 .. N_y."""
        return int(round(self.l_y / self.dy))


def wigner_potential(profile: PotentialProfile, x: float, v,
                     quad: QuadratureSpec) -> np.ndarray:
    """Evaluate V_w(x, v; L_y, dy) at one position and one or more velocities.

    Odd in v, exactly zero at v = 0, and bounded by
    (1/pi) * N_y * dy * 2 * max|V|.
    """
    v = np.asarray(v, dtype=float)
    scalar = v.ndim == 0
    v = np.atleast_1d(v)
    dy = quad.dy
    acc = np.zeros(v.shape, dtype=float)
    for j in range(1, quad.n_y + 1):
        dv_j = potential_difference(profile, x, j * dy)
        if dv_j != 0.0:
            acc += dv_j * np.sin((j * dy) * v)
    out = -(dy / np.pi) * acc
    return out[0] if scalar else out
