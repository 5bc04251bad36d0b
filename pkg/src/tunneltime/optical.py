"""Undersized-waveguide equivalence and two-barrier gap independence.

A rectangular guide of narrow side b cuts off TE propagation below
omega_c = pi c / b. Under the replacement hbar/m -> c^2/omega the evanescent
segment maps onto a square quantum barrier whose decay constant equals the
guide's |kappa|, so every barrier time acquires an electromagnetic twin.
SI meters and seconds are used on the waveguide side.

The traversal time is computed twice on purpose: once directly in guide
variables and once by building the mapped quantum barrier and calling the
generic phase-time machinery. The two routes share no code; their agreement
is asserted in the tests.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .scattering import PiecewisePotential, SquareBarrierParams, solve_transfer_matrix
from .times import extrapolated_phase_times
from .units import ELECTRON, UnitSystem

C_M_S = 2.99792458e8  # m/s


@dataclass(frozen=True)
class WaveguideSpec:
    """Rectangular guide: narrow transverse size b (m), drive frequency omega."""

    b: float
    omega: float

    def __post_init__(self):
        if self.b <= 0 or self.omega <= 0:
            raise ValueError("b and omega must be positive")

    @property
    def omega_c(self) -> float:
        return math.pi * C_M_S / self.b

    @property
    def cutoff_wavelength(self) -> float:
        """lambda_c = 2b."""
        return 2.0 * self.b

    @property
    def evanescent(self) -> bool:
        return self.omega < self.omega_c


def waveguide_dispersion(spec: WaveguideSpec):
    """(kappa, v_group) for the lowest TE mode.

    kappa = (omega/c) sqrt(1 - (omega_c/omega)^2), principal branch: real and
    >= 0 when propagating, positive imaginary when evanescent. v_group is
    c^2 kappa / omega <= c in the propagating case and nan (no energy
    transport velocity) below cutoff.
    """
    ratio = spec.omega_c / spec.omega
    kappa = complex(spec.omega / C_M_S) * np.sqrt(complex(1.0 - ratio * ratio))
    if spec.evanescent:
        return kappa, math.nan
    v_g = C_M_S * C_M_S * kappa.real / spec.omega
    return kappa, v_g


@dataclass(frozen=True)
class MappedBarrier:
    """Quantum twin of an evanescent guide segment.

    k and eps are in 1/m; hbar_over_m = c^2/omega closes the dispersion.
    """

    k: float
    eps: float
    hbar_over_m: float

    @property
    def kappa(self) -> float:
        return math.sqrt(self.eps * self.eps - self.k * self.k)


def map_quantum_waveguide(spec: WaveguideSpec) -> MappedBarrier:
    """Guide -> barrier: k = omega/c, eps = omega_c/c, hbar/m = c^2/omega."""
    return MappedBarrier(
        k=spec.omega / C_M_S,
        eps=spec.omega_c / C_M_S,
        hbar_over_m=C_M_S * C_M_S / spec.omega,
    )


def unmap_quantum_waveguide(mapped: MappedBarrier) -> WaveguideSpec:
    """Exact inverse of map_quantum_waveguide."""
    omega = mapped.k * C_M_S
    b = math.pi / mapped.eps
    return WaveguideSpec(b=b, omega=omega)


def traversal_time_direct(spec: WaveguideSpec, L: float) -> float:
    """Guide-variable phase traversal time of an evanescent segment length L.

    Written out directly in (omega, omega_c, c); no quantum code involved.
    """
    if L < 0:
        raise ValueError("L must be >= 0")
    if not spec.evanescent:
        raise ValueError("direct traversal time covers the evanescent case")
    if L == 0:
        return 0.0
    w, wc = spec.omega, spec.omega_c
    k = w / C_M_S
    kap = math.sqrt(wc * wc - w * w) / C_M_S
    e4 = (wc / C_M_S) ** 4
    # plain sinh form is safe to kap L ~ 300; saturated exactly at 2 beyond
    if kap * L < 300.0:
        s = math.sinh(kap * L)
        bracket = (2.0 * kap * L * k * k * (kap * kap - k * k)
                   + e4 * math.sinh(2.0 * kap * L)) / (4.0 * k * k * kap * kap + e4 * s * s)
    else:
        bracket = 2.0
    return bracket / (C_M_S * kap)


def traversal_time_mapped(spec: WaveguideSpec, L: float) -> float:
    """Same quantity via the mapped quantum barrier and the generic machinery.

    Builds a unit system whose hbar/m equals c^2/omega (hbar = 1 eV s slot,
    rest energy omega, "hbarc" = c), then evaluates the standard extrapolated
    phase time at the mapped wavenumber.
    """
    if L < 0:
        raise ValueError("L must be >= 0")
    if not spec.evanescent:
        raise ValueError("mapped traversal time covers the evanescent case")
    m = map_quantum_waveguide(spec)
    units = UnitSystem(hbar_eV_s=1.0, hbarc_eV_A=C_M_S,
                       electron_rest_eV=spec.omega, c_A_per_s=C_M_S)
    # barrier height whose eps matches the guide: eps = sqrt(2 m V0)/hbar
    V0 = m.eps ** 2 * units.hbarc_eV_A ** 2 / (2.0 * units.electron_rest_eV)
    params = SquareBarrierParams(V0=V0, d=L, units=units)
    return extrapolated_phase_times(params, m.k)[0]


def superluminal_threshold(omega_ratio: float, lo: float = 1e-3, hi: float = 50.0) -> float:
    """Smallest |kappa| L above which L/tau exceeds c, at omega/omega_c given.

    Solved by bisection on kappa L; exists because tau saturates (guide
    equivalent of the thick-barrier time limit) while L keeps growing.
    """
    if not 0.0 < omega_ratio < 1.0:
        raise ValueError("omega_ratio must lie in (0, 1)")
    spec = WaveguideSpec(b=0.02, omega=omega_ratio * math.pi * C_M_S / 0.02)
    kap = abs(waveguide_dispersion(spec)[0].imag)

    def excess(kapL):
        L = kapL / kap
        return L / traversal_time_direct(spec, L) - C_M_S

    if excess(lo) > 0:
        return lo
    a, b_ = lo, hi
    for _ in range(200):
        mid = 0.5 * (a + b_)
        if excess(mid) > 0:
            b_ = mid
        else:
            a = mid
    return 0.5 * (a + b_)


# ---------------------------------------------------------------------------
# two opaque barriers separated by a free gap


def _total_phase(pot: PiecewisePotential, k: float, units: UnitSystem):
    st = solve_transfer_matrix(pot, k, units)
    return np.angle(st.amp_T)


def double_barrier_time(d: float, L_gap: float, V0: float, k: float,
                        units: UnitSystem = ELECTRON):
    """(total extrapolated phase time, resonance margin) for barrier-gap-barrier.

    The time is (2d + L_gap + dalpha/dk)/v from the full transfer matrix,
    with the phase derivative taken branch-free. The margin is
    |sin(k L_gap + beta_single)|, the factor controlling proximity to a
    Fabry-Perot resonance of the inter-barrier region; values below 0.1 mean
    the off-resonance premise is failing and the time may spike.
    """
    if d < 0 or L_gap < 0:
        raise ValueError("widths must be >= 0")
    total = 2.0 * d + L_gap
    if L_gap == 0:
        pot = PiecewisePotential.square(V0, 2.0 * d)
    else:
        pot = PiecewisePotential.double_barrier(V0, d, L_gap)

    def dalpha(h):
        tp = solve_transfer_matrix(pot, k + h, units).amp_T
        tm = solve_transfer_matrix(pot, k - h, units).amp_T
        return float(np.angle(tp * np.conj(tm))) / (2.0 * h)

    h = 1e-6 * k
    d1 = dalpha(h)
    d2 = dalpha(0.5 * h)
    deriv = (4.0 * d2 - d1) / 3.0
    v = float(units.v_of_k(k))
    time = (total + deriv) / v

    if d > 0 and V0 > float(units.E_of_k(k)):
        beta_single = solve_transfer_matrix(
            PiecewisePotential.square(V0, d), k, units).beta
        margin = abs(math.sin(k * L_gap + beta_single))
    else:
        margin = 1.0
    return time, margin


def gap_sweep(d: float, V0: float, k: float, gaps,
              units: UnitSystem = ELECTRON):
    """[(L_gap, time, margin)] over an iterable of gap widths."""
    return [(float(L), *double_barrier_time(d, float(L), V0, k, units))
            for L in gaps]
