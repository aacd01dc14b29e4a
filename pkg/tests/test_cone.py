import math

import numpy as np
import pytest
from scipy.integrate import quad

from polydet import (
    ConePoint,
    a_mu,
    a_mu_disk_integral,
    heat_kernel_cone,
    heat_kernel_images,
    heat_trace_correction,
    make_metric,
    q_of_beta,
    resolvent_cone,
    resolvent_images,
    tetrahedron_metric,
)
from polydet.errors import CoincidentPoints

PI = math.pi
TWO_PI = 2 * math.pi

RNG = np.random.default_rng(20240811)


def _plane_kernel(t, d2):
    return math.exp(-d2 / (4 * t)) / (4 * PI * t)


# ---- heat kernel ----

def test_flat_cone_reduces_to_plane():
    for _ in range(6):
        r, rp = RNG.uniform(0.2, 2, 2)
        phi, phip = RNG.uniform(0, TWO_PI, 2)
        h = heat_kernel_cone(TWO_PI, 0.7, ConePoint(r, phi), ConePoint(rp, phip))
        d2 = r * r + rp * rp - 2 * r * rp * math.cos(phi - phip)
        assert abs(h - _plane_kernel(0.7, d2)) < 1e-12


def test_half_plane_cone_matches_two_images():
    p, q = ConePoint(1.0, 0.3), ConePoint(1.2, 1.0)
    h = heat_kernel_cone(PI, 0.5, p, q)
    d0 = 1.0 + 1.44 - 2 * 1.2 * math.cos(0.3 - 1.0)
    d1 = 1.0 + 1.44 - 2 * 1.2 * math.cos(0.3 - 1.0 - PI)
    assert h == pytest.approx(_plane_kernel(0.5, d0) + _plane_kernel(0.5, d1),
                              abs=1e-10)


@pytest.mark.parametrize("n", [2, 3, 5])
def test_image_sum_equivalence(n):
    beta = TWO_PI / n
    for t in (0.1, 1.0):
        for _ in range(4):
            r, rp = RNG.uniform(0.2, 2, 2)
            phi, phip = RNG.uniform(0, beta, 2)
            p, q = ConePoint(r, phi), ConePoint(rp, phip)
            assert abs(heat_kernel_cone(beta, t, p, q)
                       - heat_kernel_images(n, t, p, q)) < 1e-10


def test_kernel_symmetry():
    for beta in (PI, 1.3 * PI, 2.4 * PI):
        for _ in range(4):
            r, rp = RNG.uniform(0.2, 2, 2)
            phi, phip = RNG.uniform(0, beta, 2)
            a = heat_kernel_cone(beta, 0.4, ConePoint(r, phi), ConePoint(rp, phip))
            b = heat_kernel_cone(beta, 0.4, ConePoint(rp, phip), ConePoint(r, phi))
            assert abs(a - b) < 1e-12


def test_kernel_rotational_invariance_and_positivity():
    beta = 1.7 * PI
    for _ in range(4):
        r, rp = RNG.uniform(0.2, 2, 2)
        phi, phip = RNG.uniform(0, beta / 2, 2)
        c = RNG.uniform(0, beta / 2)
        a = heat_kernel_cone(beta, 0.3, ConePoint(r, phi), ConePoint(rp, phip))
        b = heat_kernel_cone(beta, 0.3, ConePoint(r, phi + c), ConePoint(rp, phip + c))
        assert a > 0
        assert abs(a - b) < 1e-12


def test_semigroup_property_beta_pi():
    # int over the cone of H_t(p, .) H_s(., q) = H_{t+s}(p, q), with the
    # two-image closed form as the integrand (independent of the contour)
    beta = PI
    t, s = 0.35, 0.6
    p, q = ConePoint(0.8, 0.4), ConePoint(1.1, 2.2)

    def integrand(r, phi):
        mid = ConePoint(r, phi)
        return (heat_kernel_images(2, t, p, mid)
                * heat_kernel_images(2, s, mid, q) * r)

    val = 0.0
    # radial x angular tensor Gauss grid is plenty for smooth Gaussians
    xs, ws = np.polynomial.legendre.leggauss(120)
    R = 12.0
    rs = 0.5 * R * (xs + 1)
    wr = 0.5 * R * ws
    xs2, ws2 = np.polynomial.legendre.leggauss(80)
    phis = 0.5 * beta * (xs2 + 1)
    wp = 0.5 * beta * ws2
    for r, w1 in zip(rs, wr):
        for phi, w2 in zip(phis, wp):
            val += w1 * w2 * integrand(r, phi)
    assert val == pytest.approx(heat_kernel_images(2, t + s, p, q), abs=1e-6)


# ---- resolvent ----

def test_flat_resolvent_is_free_resolvent():
    from scipy.special import k0

    for _ in range(4):
        r, rp = RNG.uniform(0.3, 1.5, 2)
        phi, phip = RNG.uniform(0, 2.0, 2)
        v = resolvent_cone(TWO_PI, -3.0, ConePoint(r, phi), ConePoint(rp, phip))
        d = math.sqrt(r * r + rp * rp - 2 * r * rp * math.cos(phi - phip))
        assert abs(v - k0(d * math.sqrt(3.0)) / TWO_PI) < 1e-12


def test_resolvent_matches_images_beta_pi():
    p, q = ConePoint(1.0, 0.2), ConePoint(1.0, 1.1)
    assert abs(resolvent_cone(PI, -4.0, p, q)
               - resolvent_images(2, -4.0, p, q)) < 1e-10


def test_resolvent_decay_superpolynomial():
    p, q = ConePoint(1.0, 0.2), ConePoint(1.4, 1.0)
    v2 = resolvent_cone(1.3 * PI, -100.0, p, q)
    v3 = resolvent_cone(1.3 * PI, -1000.0, p, q)
    assert v3 < v2 * (100.0 / 1000.0) ** 3


def test_resolvent_monotone_in_mu():
    p, q = ConePoint(0.9, 0.1), ConePoint(1.2, 0.9)
    vals = [resolvent_cone(1.6 * PI, mu, p, q) for mu in (-100.0, -30.0, -5.0, -1.0)]
    assert all(v > 0 for v in vals)
    assert vals == sorted(vals)


def test_resolvent_coincident_points_rejected():
    with pytest.raises(CoincidentPoints):
        resolvent_cone(PI, -1.0, ConePoint(1.0, 0.5), ConePoint(1.0, 0.5))


def test_bessel_laplace_branch_closed_form():
    # validates the K_0 closed form used on the contour against direct
    # Laplace quadrature, at random line heights
    from scipy.special import k0

    for _ in range(20):
        s = RNG.uniform(0.0, 3.0)
        r = RNG.uniform(0.2, 1.5)
        mu = -RNG.uniform(1.0, 30.0)
        a = (r * math.cosh(s / 2)) ** 2  # r^2 sin^2(th/2) on the lines
        direct = quad(lambda t: math.exp(mu * t - a / t) / t, 0, 50,
                      epsabs=1e-14, epsrel=1e-13, limit=300)[0]
        closed = 2 * k0(2 * math.sqrt(a * (-mu)))
        assert direct == pytest.approx(closed, rel=1e-9, abs=1e-300)


# ---- a_mu ----

def test_a_mu_vanishes_on_flat_cone():
    for r in (0.3, 1.0, 2.5):
        assert abs(a_mu(TWO_PI, -50.0, r)) < 1e-12


def test_a_mu_closed_form_beta_pi():
    # at beta = pi the lines drop and only the half residues survive:
    # a_mu(r) = (-mu/2pi) K_0(2 r sqrt(-mu))
    from scipy.special import k0

    for r in (0.3, 0.7):
        expect = 100.0 / TWO_PI * k0(2 * r * 10.0)
        assert a_mu(PI, -100.0, r) == pytest.approx(expect, rel=1e-10)


def test_a_mu_disk_integral_approaches_q():
    assert abs(a_mu_disk_integral(PI, -100.0, 1.0) - 0.125) < 1e-6


def test_a_mu_radial_decay():
    assert abs(a_mu(PI, -100.0, 3.0)) < 1e-8 * abs(a_mu(PI, -100.0, 0.3))


# ---- heat trace correction ----

def test_heat_trace_tetrahedron():
    assert heat_trace_correction(tetrahedron_metric()) == pytest.approx(-0.5, abs=1e-14)


def test_heat_trace_triangle():
    m = make_metric(1.0, [(0, -2 / 3), (1, -2 / 3), (-1, -2 / 3)])
    assert heat_trace_correction(m) == pytest.approx(-3 * q_of_beta(2 * PI / 3),
                                                     abs=1e-14)
    assert heat_trace_correction(m) == pytest.approx(-2 / 3, abs=1e-14)


def test_heat_trace_algebraic_identity(corpus5):
    # sum Q(beta_k) = -(1/12) sum (b_k + 1 - 1/(b_k + 1))
    lhs = math.fsum(q_of_beta(b) for b in corpus5.angles())
    rhs = -math.fsum(b + 1 - 1 / (b + 1) for b in corpus5.exponents()) / 12
    assert lhs == pytest.approx(rhs, abs=1e-13)
    assert heat_trace_correction(corpus5) == pytest.approx(-lhs, abs=1e-13)


def test_heat_kernel_near_line_pole_continuity():
    # image pole sliding onto the contour line: the kernel must vary
    # continuously through the half-residue handover at the line
    beta = 2.3 * PI
    vals = []
    for delta in (1e-5, 1e-7, 1e-9, 0.0):
        dphi = beta - PI + delta
        vals.append(heat_kernel_cone(beta, 0.5,
                                     ConePoint(1.0, dphi), ConePoint(1.1, 0.0)))
    for a, b in zip(vals, vals[1:]):
        assert abs(a - b) < 1e-7


def test_resolvent_complex_spectral_parameter():
    # flat cone with complex mu: equals the free resolvent with the
    # principal square root of -mu
    import cmath

    import mpmath

    mu = complex(-3.0, 0.7)
    p, q = ConePoint(1.0, 0.4), ConePoint(1.3, 1.1)
    d = math.sqrt(p.r**2 + q.r**2 - 2 * p.r * q.r * math.cos(p.phi - q.phi))
    free = complex(mpmath.besselk(0, d * cmath.sqrt(-mu))) / TWO_PI
    assert abs(resolvent_cone(TWO_PI, mu, p, q) - free) < 1e-12


def test_a_mu_disk_integral_generic_angles():
    # at angles with no poles inside the strip the whole value comes from
    # the line integrals, pinning the contour convention where no
    # method-of-images oracle exists
    for beta in (1.7 * PI, 2.4 * PI):
        assert abs(a_mu_disk_integral(beta, -100.0, 1.0)
                   - q_of_beta(beta)) < 1e-8


def test_semigroup_property_contour_kernel_generic_angle():
    # the contour kernel itself (no image oracle exists at 1.7 pi) must
    # reproduce itself under the cone convolution
    beta = 1.7 * PI
    t, s = 0.4, 0.65
    p, q = ConePoint(0.9, 0.5), ConePoint(1.2, 3.0)
    xs, ws = np.polynomial.legendre.leggauss(40)
    rs, wr = 4.5 * (xs + 1), 4.5 * ws
    xs2, ws2 = np.polynomial.legendre.leggauss(28)
    phis, wp = 0.5 * beta * (xs2 + 1), 0.5 * beta * ws2
    val = 0.0
    for r, w1 in zip(rs, wr):
        for phi, w2 in zip(phis, wp):
            mid = ConePoint(r, phi)
            val += (w1 * w2 * r * heat_kernel_cone(beta, t, p, mid)
                    * heat_kernel_cone(beta, s, mid, q))
    assert val == pytest.approx(heat_kernel_cone(beta, t + s, p, q), abs=1e-9)
