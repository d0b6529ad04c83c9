"""Hydrodynamic state and the fluid-equation right-hand sides.

Primitive-variable (rho, u, theta) form of the compressible
Navier-Stokes-Fourier equations with a perfect-gas closure P = rho*theta
and unit gas constant and heat capacity. Two couplings are provided: the
finite-eps form, where the radiation moments feed a momentum source
eps*I1 and a temperature source I0 - theta^4, and the limit form, where
the temperature equation instead carries -div q of the equilibrium flux.

Divisions by rho are pointwise in physical space (there is no spectral
symbol for a quotient) and are guarded by a positivity floor: the
relevant solution regime stays near a positive background, so an
approach to vacuum signals a broken run rather than physics.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import NonPositiveState
from .radiation import RadiationMoments, emission
from .spectral import (
    Grid,
    SpectralField,
    VectorField,
    dealias,
    div,
    grad,
    laplacian,
)

__all__ = [
    "POSITIVITY_FLOOR",
    "FluidParams",
    "FluidState",
    "strain",
    "viscous_stress",
    "dissipation",
    "fluid_rhs_eps",
    "fluid_rhs_limit",
]

POSITIVITY_FLOOR = 1e-6


@dataclass(frozen=True)
class FluidParams:
    """Constant transport coefficients.

    Attributes:
        mu: Shear viscosity, mu > 0.
        lam: Second (bulk-related) viscosity; 2*mu + n*lam must be positive.
        kappa: Heat conductivity, kappa > 0.
    """

    mu: float
    lam: float
    kappa: float

    def __post_init__(self):
        if self.mu <= 0.0:
            raise ValueError(f"mu must be positive, got {self.mu}")
        if self.kappa <= 0.0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")

    def validate_for(self, n_dims: int) -> None:
        if 2.0 * self.mu + n_dims * self.lam <= 0.0:
            raise ValueError(
                f"2*mu + n*lam must be positive, got {2.0 * self.mu + n_dims * self.lam}"
            )


@dataclass(frozen=True)
class FluidState:
    """Density, velocity and temperature on a shared grid."""

    rho: SpectralField
    u: VectorField
    theta: SpectralField

    def __post_init__(self):
        if not (self.rho.grid == self.u.grid == self.theta.grid):
            raise ValueError("fluid fields live on different grids")

    @property
    def grid(self) -> Grid:
        return self.rho.grid

    def is_finite(self) -> bool:
        return self.rho.is_finite() and self.u.is_finite() and self.theta.is_finite()


def require_positive(state: FluidState) -> None:
    """Hard positivity guard on rho and theta."""
    rho_min = state.rho.min_value
    theta_min = state.theta.min_value
    if rho_min < POSITIVITY_FLOOR or theta_min < POSITIVITY_FLOOR:
        raise NonPositiveState(
            f"positivity lost: min rho = {rho_min:.3e}, min theta = {theta_min:.3e}"
        )


def strain(u: VectorField) -> list[list[SpectralField]]:
    """Symmetric strain-rate tensor D_ij = (d_i u_j + d_j u_i) / 2."""
    n = len(u)
    grads = [grad(c) for c in u]  # grads[j][i] = d_i u_j
    tensor = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            d = (grads[j][i] + grads[i][j]) * 0.5
            tensor[i][j] = d
            tensor[j][i] = d
    return tensor


def viscous_stress(u: VectorField, p: FluidParams) -> list[list[SpectralField]]:
    """Stress tensor 2*mu*D(u) + lam*(div u)*identity."""
    p.validate_for(u.grid.n_dims)
    d = strain(u)
    trace = div(u)
    n = len(u)
    psi = [[None] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            entry = d[i][j] * (2.0 * p.mu)
            if i == j:
                entry = entry + trace * p.lam
            psi[i][j] = entry
    return psi


def dissipation(u: VectorField, p: FluidParams) -> SpectralField:
    """Viscous heating 2*mu*|D(u)|^2 + lam*(div u)^2, dealiased.

    Pointwise nonnegative for lam >= 0; for lam < 0 with 2*mu + n*lam > 0
    only the integral is sign-definite.
    """
    p.validate_for(u.grid.n_dims)
    d = strain(u)
    n = len(u)
    total = SpectralField.zeros(u.grid)
    for i in range(n):
        for j in range(n):
            total = total + d[i][j] * d[i][j]
    trace = div(u)
    total = total * (2.0 * p.mu) + trace * trace * p.lam
    return dealias(total)


def _stress_divergence(psi: list[list[SpectralField]]) -> VectorField:
    # (div Psi)_i = sum_j d_j Psi_ij; Psi is symmetric so rows equal columns.
    return VectorField([div(VectorField(row)) for row in psi])


def _advect(u: VectorField, f: SpectralField) -> SpectralField:
    """(u . grad) f, dealiased."""
    df = grad(f)
    return dealias(u.dot(df))


def _rhs_common(
    f: FluidState,
    p: FluidParams,
    momentum_source: VectorField | None,
    heat_source: SpectralField,
) -> tuple[SpectralField, VectorField, SpectralField]:
    """Shared assembly; couplings differ only in the two source arguments."""
    require_positive(f)
    p.validate_for(f.grid.n_dims)
    rho, u, theta = f.rho, f.u, f.theta

    mass_flux = VectorField([dealias(rho * c) for c in u])
    d_rho = -div(mass_flux)

    pressure = dealias(rho * theta)
    grad_p = grad(pressure)
    div_psi = _stress_divergence(viscous_stress(u, p))
    d_u_comps = []
    for j, uj in enumerate(u):
        numer = div_psi[j] - grad_p[j]
        if momentum_source is not None:
            numer = numer + momentum_source[j]
        d_u_comps.append(-_advect(u, uj) + dealias(numer / rho))
    d_u = VectorField(d_u_comps)

    heat = laplacian(theta) * p.kappa + dissipation(u, p) + heat_source
    d_theta = -_advect(u, theta) - dealias(theta * div(u)) + dealias(heat / rho)
    return d_rho, d_u, d_theta


def fluid_rhs_eps(
    f: FluidState, rad: RadiationMoments, eps: float, p: FluidParams
) -> tuple[SpectralField, VectorField, SpectralField]:
    """Fluid tendencies with finite-eps radiation coupling.

    d(rho)/dt  = -div(rho u)
    d(u)/dt    = -(u.grad)u + [div Psi(u) - grad(rho theta) + eps*I1] / rho
    d(theta)/dt= -u.grad theta - theta div u
                 + [kappa*Lap theta + Psi(u):grad u + I0 - theta^4] / rho

    Raises NonPositiveState if rho or theta touch the positivity floor.
    """
    if eps <= 0.0:
        raise ValueError(f"eps must be positive, got {eps}")
    if rad.grid != f.grid:
        raise ValueError("radiation and fluid grids differ")
    momentum_source = rad.I1 * eps
    heat_source = rad.I0 - emission(f.theta)
    return _rhs_common(f, p, momentum_source, heat_source)


def fluid_rhs_limit(
    f: FluidState, q0: VectorField, p: FluidParams
) -> tuple[SpectralField, VectorField, SpectralField]:
    """Fluid tendencies of the limit system.

    Identical to the finite-eps form except the radiation coupling: no
    momentum source, and the temperature source is -div q0.
    """
    if q0.grid != f.grid:
        raise ValueError("flux and fluid grids differ")
    heat_source = -div(q0)
    return _rhs_common(f, p, None, heat_source)
