"""Velocity mesh and the discrete velocity-space operators.

The velocity grid is offset from zero, v_n = (2n+1)*pi*h, so that division
by v_n is always defined.  At each spatial node the nonlocal coupling is a
real skew-symmetric Toeplitz matrix M with entries M_{nm} = V_w(x, (n-m)dv),
stored as its defining symbol (one value per diagonal) plus the shift vector
a_m = V_w(x, -v_m) sampled on the node lattice itself.

Three operators act on velocity-grid vectors f:

    theta: g = 2*pi*h * M f                     (bounded convolution)
    A:     g_n = (theta f)_n / v_n              (singular as v_n -> 0)
    B:     g_n = 2*pi*h/v_n * sum_m (M_{nm} - a_m) f_m
                                                (regularized; the subtracted
                                                 row makes g_n finite
                                                 uniformly in the mesh)
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.linalg import matmul_toeplitz

from .errors import ConfigurationError, ContractError, ResourceError
from .potential import PotentialProfile
from .wigner_potential import QuadratureSpec, wigner_potential

__all__ = ["VelocityMesh", "WignerKernel", "build_velocity_mesh",
           "build_theta_kernel", "apply_theta", "apply_A", "apply_B",
           "materialize", "operator_norm"]

_NORM_SIZE_GUARD = 4096


@dataclass(frozen=True)
class VelocityMesh:
    """Offset velocity grid v_n = (2n+1)*pi*h, n = -N_v/2 .. N_v/2 - 1."""

    n_v: int
    h: float

    def __post_init__(self) -> None:
        if self.n_v < 2 or self.n_v % 2 != 0:
            raise ConfigurationError(
                f"N_v must be even and >= 2, got {self.n_v}")
        if not self.h > 0:
            raise ConfigurationError(f"h must be positive, got {self.h}")

    @property
    def dv(self) -> float:
        return 2 * np.pi * self.h

    @property
    def r_h(self) -> float:
        """Coherence length 1/(2h); dv * r_h == pi."""
        return 1.0 / (2 * self.h)

    @property
    def nodes(self) -> np.ndarray:
        n = np.arange(self.n_v) - self.n_v // 2
        return (2 * n + 1) * np.pi * self.h


@dataclass(frozen=True)
class WignerKernel:
    """Sampled coupling data for one spatial node.

    symbol[k + N_v - 1] = V_w(x, k*dv) for k = -(N_v-1) .. N_v-1; the
    materialized matrix M_{nm} = symbol(n-m) is real, skew-symmetric and
    Toeplitz.  shift[m] = V_w(x, -v_m) satisfies shift[-m-1] = -shift[m].
    """

    x: float
    symbol: np.ndarray
    shift: np.ndarray
    mesh: VelocityMesh
    quad: QuadratureSpec


def build_velocity_mesh(n_v: int, h: float) -> VelocityMesh:
    return VelocityMesh(n_v=n_v, h=h)


@lru_cache(maxsize=4096)
def _kernel_samples(profile: PotentialProfile, x: float, n_v: int, h: float,
                    l_y: float, dy: float) -> tuple[np.ndarray, np.ndarray]:
    """Cached V_w samples on the difference lattice and the node lattice."""
    quad = QuadratureSpec(l_y=l_y, dy=dy)
    mesh = VelocityMesh(n_v=n_v, h=h)
    k = np.arange(-(n_v - 1), n_v)
    symbol = wigner_potential(profile, x, k * mesh.dv, quad)
    shift = wigner_potential(profile, x, -mesh.nodes, quad)
    symbol.setflags(write=False)
    shift.setflags(write=False)
    return symbol, shift


def build_theta_kernel(profile: PotentialProfile, x: float,
                       mesh: VelocityMesh, quad: QuadratureSpec) -> WignerKernel:
    """Sample V_w for one spatial node and package it as a kernel."""
    if not quad.l_y < mesh.r_h:
        raise ConfigurationError(
            f"aliasing guard violated: need L_y < R_h, got "
            f"L_y={quad.l_y} and R_h={mesh.r_h}")
    symbol, shift = _kernel_samples(profile, float(x), mesh.n_v, mesh.h,
                                    quad.l_y, quad.dy)
    return WignerKernel(x=float(x), symbol=symbol, shift=shift,
                        mesh=mesh, quad=quad)


def _check_length(kernel: WignerKernel, f: np.ndarray) -> np.ndarray:
    f = np.asarray(f, dtype=float)
    if f.shape != (kernel.mesh.n_v,):
        raise ContractError(
            f"vector length {f.shape} does not match N_v={kernel.mesh.n_v}")
    return f


def apply_theta(kernel: WignerKernel, f, fast: bool = True) -> np.ndarray:
    """g = 2*pi*h * M f.

    The fast path multiplies by the Toeplitz matrix via circulant embedding
    and FFTs; the naive path materializes M.  Both agree to roundoff.
    """
    f = _check_length(kernel, f)
    n_v = kernel.mesh.n_v
    if fast:
        col = kernel.symbol[n_v - 1:]
        row = kernel.symbol[n_v - 1::-1]
        out = matmul_toeplitz((col, row), f)
    else:
        out = _materialize_m(kernel) @ f
    return 2 * np.pi * kernel.mesh.h * out


def apply_A(kernel: WignerKernel, f, fast: bool = True) -> np.ndarray:
    """g_n = (theta f)_n / v_n."""
    return apply_theta(kernel, f, fast=fast) / kernel.mesh.nodes


def apply_B(kernel: WignerKernel, f, fast: bool = True) -> np.ndarray:
    """g_n = 2*pi*h/v_n * sum_m (M_{nm} - a_m) f_m.

    The correction is the scalar sum_m a_m f_m, computed once per call in
    ascending m.  On vectors even in v it vanishes and B coincides with A.
    """
    f = _check_length(kernel, f)
    correction = float(np.dot(kernel.shift, f))
    g = apply_theta(kernel, f, fast=fast)
    g -= 2 * np.pi * kernel.mesh.h * correction
    return g / kernel.mesh.nodes


def _materialize_m(kernel: WignerKernel) -> np.ndarray:
    n_v = kernel.mesh.n_v
    idx = np.subtract.outer(np.arange(n_v), np.arange(n_v)) + n_v - 1
    return kernel.symbol[idx]


def materialize(kernel: WignerKernel, which: str) -> np.ndarray:
    """Dense matrix of the chosen operator: 'M', 'theta', 'A' or 'B'."""
    m = _materialize_m(kernel)
    scale = 2 * np.pi * kernel.mesh.h
    v = kernel.mesh.nodes
    if which == "M":
        return m
    if which == "theta":
        return scale * m
    if which == "A":
        return scale * m / v[:, None]
    if which == "B":
        return scale * (m - kernel.shift[None, :]) / v[:, None]
    raise ContractError(f"unknown operator {which!r}")


def operator_norm(kernel: WignerKernel, which: str,
                  method: str = "exact") -> float:
    """Spectral norm of the dense materialization of theta, A or B.

    method='exact' uses a full singular value decomposition; method='power'
    runs power iteration on O^T O from a fixed seed to relative 1e-8.
    """
    if kernel.mesh.n_v > _NORM_SIZE_GUARD:
        raise ResourceError(
            f"operator_norm materializes densely; N_v={kernel.mesh.n_v} "
            f"exceeds the guard {_NORM_SIZE_GUARD}")
    op = materialize(kernel, which)
    if method == "exact":
        return float(np.linalg.norm(op, 2))
    if method != "power":
        raise ContractError(f"unknown method {method!r}")
    gram = op.T @ op
    rng = np.random.default_rng(20260824)
    z = rng.standard_normal(op.shape[1])
    z /= np.linalg.norm(z)
    lam = 0.0
    for _ in range(10000):
        w = gram @ z
        nw = np.linalg.norm(w)
        if nw == 0.0:
            return 0.0
        z = w / nw
        if abs(nw - lam) <= 1e-8 * max(nw, 1e-300):
            lam = nw
            break
        lam = nw
    return float(np.sqrt(lam))
