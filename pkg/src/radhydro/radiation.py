"""P1 radiation moments: stiff relaxation dynamics and the limit closure.

The moment pair (I0, I1) relaxes on the fast 1/eps time scale toward the
local equilibrium determined by the fluid temperature. As eps -> 0 the
pair collapses onto the nonlocal closure

    I0 = (I - Laplacian)^(-1) theta^4,      I1 = -grad I0,

which is computed here by an exact spectral solve. The equilibrium
intensity is always obtained through the Helmholtz inverse; a literal
inverse Laplacian is never formed (it would be singular at k = 0 on the
torus, while the composite quantity it feeds equals the Helmholtz solve
identically).
"""

from __future__ import annotations

from dataclasses import dataclass

from .spectral import (
    Grid,
    SpectralField,
    VectorField,
    dealias,
    div,
    grad,
    helmholtz_inverse,
    sobolev_norm,
)

__all__ = [
    "RadiationMoments",
    "emission",
    "radiation_rhs",
    "limit_I0",
    "limit_q",
    "limit_closure_residual",
]


@dataclass(frozen=True)
class RadiationMoments:
    """Zeroth moment I0 and first moment I1 of the radiation intensity."""

    I0: SpectralField
    I1: VectorField

    def __post_init__(self):
        if self.I0.grid != self.I1.grid:
            raise ValueError("I0 and I1 live on different grids")

    @property
    def grid(self) -> Grid:
        return self.I0.grid

    def is_finite(self) -> bool:
        return self.I0.is_finite() and self.I1.is_finite()


def emission(theta: SpectralField) -> SpectralField:
    """Gray emission theta^4, dealiased after the quartic product."""
    return dealias(theta**4)


def radiation_rhs(
    rad: RadiationMoments, theta: SpectralField, eps: float
) -> tuple[SpectralField, VectorField]:
    """Relaxation tendencies of the moment pair.

    d(I0)/dt = [theta^4 - I0 - div I1] / eps
    d(I1)/dt = [-I1 - grad I0] / eps
    """
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    d_I0 = (emission(theta) - rad.I0 - div(rad.I1)) * (1.0 / eps)
    d_I1 = (-rad.I1 - grad(rad.I0)) * (1.0 / eps)
    return d_I0, d_I1


def limit_I0(theta: SpectralField) -> SpectralField:
    """Equilibrium intensity of the relaxation limit.

    Solves (I - Laplacian) I0 = theta^4 exactly in Fourier space, so the
    residual of that identity is at roundoff and mean(I0) = mean(theta^4).
    """
    return helmholtz_inverse(emission(theta))


def limit_q(theta: SpectralField) -> VectorField:
    """Limit radiative flux, -grad of the equilibrium intensity.

    Equivalently -grad (I - Laplacian)^(-1) theta^4; a gradient field, so
    it is curl-free by construction.
    """
    return -grad(limit_I0(theta))


def limit_closure_residual(theta: SpectralField, q: VectorField) -> float:
    """L^2 residual of the limit flux equation.

    Measures || -grad(div q) + q + grad(theta^4) ||_0; zero (to solver
    precision) exactly when q is the limit flux of theta.
    """
    residual = -grad(div(q)) + q + grad(emission(theta))
    return sobolev_norm(residual, 0)
