"""Independent tetrahedron oracle through the covering elliptic curve.

A flat metric with four cone angles pi is the quotient of an elliptic
curve E (the double cover of the sphere branched over z_1..z_4) carrying
the smooth flat metric |omega|^2,

    omega = dz / sqrt((z - z_1)(z - z_2)(z - z_3)(z - z_4)).

This module computes the periods A, B of omega over an (a, b) cycle pair,
the modulus tau = B/A, Dedekind eta and the theta constants by q-series,
and checks the classical identity chain:

    Jacobi:        2 pi eta^3 = pi theta_2 theta_3 theta_4
    Thomae:        theta_k^8 = (2 pi)^-4 A^4 (z_j1 - z_j2)^2 (z_j3 - z_j4)^2
    eta-distance:  |eta(B/A)|^2 = |A| / (2^(5/3) pi) * prod_{i<j} |z_i - z_j|^(1/6)

culminating in the closed determinant formula

    det' = (2^(2/3) pi)^-1 * Area(X) * prod_{i<j} |z_i - z_j|^(1/6),

where Area(X) is the metric area computed by module ``quad`` with C = 1
and all exponents -1/2.  The torus-side value Area(E) Im(tau) |eta(tau)|^4
equals det'^2 with Area(E) = |Im(A conj B)| = 2 Area(X).

Basis conventions: the a-cycle encircles the first two and the b-cycle
the middle two of the four branch points sorted by angle around their
centroid.  Any such pair is a symplectic basis; every identity above is
covariant under changing it, and the Thomae pairing of theta indices to
branch-point splittings is resolved by residual matching.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import DegenerateQuartic
from .metric import make_metric
from .quad import QuadratureConfig, area

PI = math.pi
TWO_PI = 2.0 * math.pi

SERIES_TOL = 1e-18


@dataclass(frozen=True)
class EllipticData:
    period_a: complex
    period_b: complex
    tau: complex
    theta_constants: Tuple[complex, complex, complex]  # theta_2, theta_3, theta_4
    eta: complex
    sorted_points: Tuple[complex, ...]


@dataclass(frozen=True)
class PeriodConfig:
    nodes: int = 4096            # dense monotone grid for branch tracking
    refine_doublings: int = 3    # Richardson-style doubling checks
    degenerate_tol: float = 1e-8


# --------------------------------------------------------------------------
# periods
# --------------------------------------------------------------------------

def _segment_integral(za: complex, zb: complex, others: Sequence[complex],
                      nodes: int) -> complex:
    """int dz / sqrt((z-za)(z-zb) R(z)) along the straight segment, with
    z = c + h sin(tau) absorbing both endpoint singularities:

        sqrt((z-za)(z-zb)) -> i h cos(tau),   integrand -> 1/(i sqrt(R)).

    sqrt(R) is tracked by continuity along the monotone tau grid (sign
    flips detected pointwise), then integrated with composite Simpson on
    the uniform grid; the node count doubles until machine-level
    stationarity in the caller.
    """
    c = 0.5 * (za + zb)
    h = 0.5 * (zb - za)
    taus = np.linspace(-0.5 * PI, 0.5 * PI, nodes)
    z = c + h * np.sin(taus)
    R = np.ones_like(z)
    for zk in others:
        R = R * (z - zk)
    w = np.sqrt(R)
    sign = 1.0
    signs = np.empty(len(z))
    prev = w[0]
    signs[0] = sign
    for i in range(1, len(z)):
        cur = w[i] * sign
        if abs(cur - prev) > abs(cur + prev):
            sign = -sign
            cur = -cur
        signs[i] = sign
        prev = cur
    w = w * signs
    integrand = 1.0 / (1j * w)
    from scipy.integrate import simpson

    return complex(simpson(integrand, x=taus))


def periods(points: Sequence[complex],
            cfg: PeriodConfig = PeriodConfig()) -> EllipticData:
    """Periods of omega over the (a, b) cycles, normalized to Im tau > 0."""
    pts = [complex(z) for z in points]
    if len(pts) != 4:
        raise DegenerateQuartic(f"need exactly 4 branch points, got {len(pts)}")
    scale = max(abs(p - q) for p in pts for q in pts)
    for i in range(4):
        for j in range(i + 1, 4):
            if abs(pts[i] - pts[j]) < cfg.degenerate_tol * scale:
                raise DegenerateQuartic(
                    f"branch points {i} and {j} closer than "
                    f"{cfg.degenerate_tol} relative"
                )
    cen = sum(pts) / 4.0
    pts.sort(key=lambda z: math.atan2((z - cen).imag, (z - cen).real))
    z1, z2, z3, z4 = pts

    def stable(za, zb, others):
        prev = _segment_integral(za, zb, others, cfg.nodes)
        n = cfg.nodes
        for _ in range(cfg.refine_doublings):
            n *= 2
            cur = _segment_integral(za, zb, others, n)
            if abs(cur - prev) <= 1e-13 * abs(cur):
                return cur
            prev = cur
        return prev

    A = 2.0 * stable(z1, z2, [z3, z4])
    B = 2.0 * stable(z2, z3, [z1, z4])
    if abs(A) == 0.0:
        raise DegenerateQuartic("vanishing a-period")
    tau = B / A
    if abs(tau.imag) < cfg.degenerate_tol:
        raise DegenerateQuartic(f"modulus degenerate: tau = {tau}")
    if tau.imag < 0.0:
        B = -B
        tau = -tau
    eta = dedekind_eta(tau)
    thetas = theta_constants(tau)
    return EllipticData(
        period_a=A,
        period_b=B,
        tau=tau,
        theta_constants=thetas,
        eta=eta,
        sorted_points=tuple(pts),
    )


# --------------------------------------------------------------------------
# eta and theta constants
# --------------------------------------------------------------------------

def dedekind_eta(tau: complex) -> complex:
    """eta(tau) = q^(1/24) prod (1 - q^n), q = e^(2 pi i tau), after
    reducing tau into the fundamental domain with the multiplier system
    eta(tau+1) = e^(i pi/12) eta(tau), eta(-1/tau) = sqrt(-i tau) eta(tau)."""
    tau = complex(tau)
    if tau.imag <= 0.0:
        raise ValueError(f"need Im tau > 0, got {tau}")
    mult = 1.0 + 0.0j
    for _ in range(200):
        n = round(tau.real)
        if n != 0:
            tau -= n
            mult *= cmath.exp(1j * PI * n / 12.0)
        if abs(tau) < 1.0 - 1e-15:
            # eta(tau) = eta(-1/tau)/sqrt(-i tau)
            mult /= cmath.sqrt(-1j * tau)
            tau = -1.0 / tau
        else:
            break
    q = cmath.exp(2j * PI * tau)
    prod = 1.0 + 0.0j
    qn = 1.0 + 0.0j
    for _ in range(1, 400):
        qn *= q
        prod *= 1.0 - qn
        if abs(qn) < SERIES_TOL:
            break
    return mult * cmath.exp(1j * PI * tau / 12.0) * prod


def theta_constants(tau: complex) -> Tuple[complex, complex, complex]:
    """(theta_2, theta_3, theta_4)(0 | tau) by q-series in the nome
    q = e^(i pi tau); terms below 1e-18 are dropped."""
    tau = complex(tau)
    if tau.imag <= 0.0:
        raise ValueError(f"need Im tau > 0, got {tau}")
    q = cmath.exp(1j * PI * tau)
    th3 = 1.0 + 0.0j
    th4 = 1.0 + 0.0j
    for n in range(1, 400):
        qn2 = q ** (n * n)
        th3 += 2.0 * qn2
        th4 += 2.0 * ((-1) ** n) * qn2
        if abs(qn2) < SERIES_TOL and n > 2:
            break
    th2 = 0.0 + 0.0j
    for n in range(0, 400):
        t = q ** ((n + 0.5) ** 2)
        th2 += 2.0 * t
        if abs(t) < SERIES_TOL and n > 2:
            break
    return th2, th3, th4


def jacobi_residual(data: EllipticData) -> float:
    """Relative residual of 2 pi eta^3 = pi theta_2 theta_3 theta_4."""
    lhs = TWO_PI * data.eta**3
    th2, th3, th4 = data.theta_constants
    rhs = PI * th2 * th3 * th4
    return abs(lhs - rhs) / abs(lhs)


# --------------------------------------------------------------------------
# identity checks
# --------------------------------------------------------------------------

def thomae_check(points: Sequence[complex], data: EllipticData) -> float:
    """Max relative residual of the Thomae eighth-power identities.

    Each of theta_2^8, theta_3^8, theta_4^8 must equal
    (2 pi)^-4 A^4 (z_j1 - z_j2)^2 (z_j3 - z_j4)^2 for one of the three
    splittings of the sorted branch points into two pairs; the assignment
    is resolved by choosing, per theta, the splitting with the smallest
    residual (identical values can share a splitting at symmetric
    configurations).
    """
    z1, z2, z3, z4 = data.sorted_points
    A4 = data.period_a**4 / (TWO_PI) ** 4
    rhs = [
        A4 * (z1 - z2) ** 2 * (z3 - z4) ** 2,
        A4 * (z1 - z3) ** 2 * (z2 - z4) ** 2,
        A4 * (z1 - z4) ** 2 * (z2 - z3) ** 2,
    ]
    worst = 0.0
    for th in data.theta_constants:
        lhs = th**8
        best = min(abs(lhs - r) / abs(lhs) for r in rhs)
        worst = max(worst, best)
    return worst


def eta_distance_identity(points: Sequence[complex], data: EllipticData) -> float:
    """Relative residual of
    |eta(B/A)|^2 = |A|/(2^(5/3) pi) * prod_{i<j} |z_i - z_j|^(1/6)."""
    pts = data.sorted_points
    prod = 1.0
    for i in range(4):
        for j in range(i + 1, 4):
            prod *= abs(pts[i] - pts[j])
    lhs = abs(data.eta) ** 2
    rhs = abs(data.period_a) / (2.0 ** (5.0 / 3.0) * PI) * prod ** (1.0 / 6.0)
    return abs(lhs - rhs) / abs(lhs)


# --------------------------------------------------------------------------
# the determinant itself
# --------------------------------------------------------------------------

def det_tetrahedron(points: Sequence[complex],
                    qcfg: QuadratureConfig = QuadratureConfig()) -> float:
    """det' of the Laplacian for the metric prod |z - z_k|^-1 |dz|^2:

        (2^(2/3) pi)^-1 * Area(X) * prod_{i<j} |z_i - z_j|^(1/6),

    the area integral delegated to module ``quad``."""
    pts = [complex(z) for z in points]
    if len(pts) != 4:
        raise DegenerateQuartic(f"need exactly 4 points, got {len(pts)}")
    m = make_metric(1.0, [(z, -0.5) for z in pts])
    ar = area(m, qcfg)
    prod = 1.0
    for i in range(4):
        for j in range(i + 1, 4):
            prod *= abs(pts[i] - pts[j])
    return ar.value * prod ** (1.0 / 6.0) / (2.0 ** (2.0 / 3.0) * PI)


def det_torus(data: EllipticData, area_x: float) -> float:
    """det' on the covering torus: Area(E) Im(tau) |eta(tau)|^4 with
    Area(E) = 2 Area(X).  Equals det_tetrahedron(...)^2."""
    return 2.0 * area_x * data.tau.imag * abs(data.eta) ** 4
