import math

import numpy as np
import pytest

from polydet import (
    Angle,
    FDConfig,
    Position,
    QuadratureConfig,
    Scale,
    area,
    fd_gradient,
    grad_position,
    integrate,
    run_suite,
    tetrahedron_metric,
)
from polydet.errors import GaugeVertexVariation, PerturbationLeavesDomain
from polydet.metric import make_metric

PI = math.pi


def test_fd_position_tetrahedron(tetra):
    fd = fd_gradient(tetra, Position(1))
    assert abs(fd - 0.125) < 1e-6


def test_fd_scale_tetrahedron(tetra):
    fd = fd_gradient(tetra, Scale())
    assert abs(fd - (-0.5)) < 1e-7


def test_richardson_changes_little_on_smooth_channels(tetra):
    plain = fd_gradient(tetra, Position(1))
    rich = fd_gradient(tetra, Position(1), fdcfg=FDConfig(richardson=True))
    assert abs(plain - rich) < 1e-9
    assert abs(rich - 0.125) < 1e-12
    plain = fd_gradient(tetra, Scale())
    rich = fd_gradient(tetra, Scale(), fdcfg=FDConfig(richardson=True))
    assert abs(plain - rich) < 1e-8  # h^2 truncation of the plain stencil
    assert abs(rich - (-0.5)) < 1e-10


def test_fd_angle_gauge_rejected(tetra):
    with pytest.raises(GaugeVertexVariation):
        fd_gradient(tetra, Angle(1))


def test_fd_rejects_domain_exit():
    # steps scale with the smaller of the two perturbed angles, so only a
    # step of order one can cross the b = -1 boundary at all
    m = make_metric(1.0, [(0, -0.999999), (1, -0.5), (-1, -0.500001)])
    with pytest.raises(PerturbationLeavesDomain):
        fd_gradient(m, Angle(3), fdcfg=FDConfig(step=2.0))
    with pytest.raises(PerturbationLeavesDomain):
        fd_gradient(m, Scale(), fdcfg=FDConfig(step=1.5))


def test_suite_tetrahedron(tetra):
    reports = run_suite(tetra)
    assert len(reports) == 8  # 4 positions + 3 angles + scale
    assert [r.channel for r in reports] == [
        "z:1", "z:2", "z:3", "z:4", "beta:2", "beta:3", "beta:4", "C"]
    assert all(r.rel_err <= 1e-5 for r in reports)


def test_suite_corpus5(corpus5):
    reports = run_suite(corpus5)
    assert len(reports) == 10  # 5 positions + 4 angles + scale
    assert all(r.rel_err <= 1e-5 for r in reports)


def test_suite_richardson_tightens(corpus5):
    reports = run_suite(corpus5, fdcfg=FDConfig(richardson=True))
    assert all(r.rel_err <= 1e-7 for r in reports)


def test_suite_near_degenerate(near_degenerate):
    reports = run_suite(near_degenerate)
    assert all(r.rel_err <= 1e-5 for r in reports)
    rich = run_suite(near_degenerate, fdcfg=FDConfig(richardson=True))
    assert all(r.rel_err <= 1e-7 for r in rich)


def test_fd_log_area_matches_quadrature_derivative(tetra):
    # independent check isolating quadrature error from formula error:
    # d log Area / dz_1 via area finite differences vs the analytically
    # differentiated integrand (a principal-value integral the vertex
    # patches absorb)
    cfg = QuadratureConfig(rel_tol=1e-9, abs_tol=1e-12)
    a0 = area(tetra, cfg).value
    b1 = tetra.exponents()[0]
    z1 = tetra.positions()[0]

    re_part = integrate(tetra, lambda z: np.real(1.0 / (z - z1)), cfg).value
    im_part = integrate(tetra, lambda z: np.imag(1.0 / (z - z1)), cfg).value
    analytic = -b1 * complex(re_part, im_part) / a0

    h = 1e-4

    def la(shift):
        return math.log(area(tetra.with_position(1, z1 + shift), cfg).value)

    dx = (la(h) - la(-h)) / (2 * h)
    dy = (la(1j * h) - la(-1j * h)) / (2 * h)
    fd = 0.5 * complex(dx, -dy)
    assert abs(fd - analytic) < 1e-5


def test_fd_log_area_scale_channel(tetra):
    cfg = QuadratureConfig(rel_tol=1e-9, abs_tol=1e-12)
    h = 1e-5

    def la(ds):
        return math.log(area(tetra.with_scale(1.0 + ds), cfg).value)

    fd = (la(h) - la(-h)) / (2 * h)
    assert fd == pytest.approx(1.0, abs=1e-7)  # d log A / dC = 1/C


def test_suite_extreme_angles():
    # cone angles from 0.1 pi (near the collapse boundary) to 4.2 pi; the
    # gauge vertex is the stiff direction and sets the angle step scale
    m = make_metric(0.7, [(0.0, -0.95), (1.3, 1.1), (-0.9 + 0.8j, -0.85),
                          (0.2 - 1.4j, -0.7), (-0.4 + 0.1j, -0.6)])
    reports = run_suite(m)
    assert all(r.rel_err <= 1e-5 for r in reports)
    rich = run_suite(m, fdcfg=FDConfig(richardson=True))
    assert all(r.rel_err <= 1e-7 for r in rich)
