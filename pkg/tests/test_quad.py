import math

import numpy as np
import pytest

from polydet import QuadratureConfig, area, integrate, make_metric, tetrahedron_metric
from polydet.errors import ToleranceNotReached

PI = math.pi

# Area of the lemniscatic tetrahedron in closed form: the covering torus is
# square, Area(E) = |A|^2 with A the lemniscate period, so
# Area(X) = Area(E)/2 = (Gamma(1/4)^2 / (2 sqrt(2 pi)))^2.
LEMNISCATIC_AREA = (math.gamma(0.25) ** 2 / (2 * math.sqrt(2 * PI))) ** 2


def test_tetrahedron_area_closed_form(tetra, quad_cfg):
    res = area(tetra, quad_cfg)
    assert res.value == pytest.approx(LEMNISCATIC_AREA, rel=1e-10)
    assert res.error_estimate >= 0
    assert res.cell_count > 0


def test_two_strategies_agree(tetra):
    a = area(tetra, QuadratureConfig())
    b = area(tetra, QuadratureConfig(patch_radius_factor=0.2, far_field_radius=6.0))
    assert abs(a.value - b.value) / a.value < 1e-8


def test_area_linear_in_scale(tetra):
    m2 = tetra.with_scale(2.0)
    a1 = area(tetra)
    a2 = area(m2)
    assert a2.value / a1.value == pytest.approx(2.0, abs=1e-12)


def test_degenerate_triangle_integrable():
    m = make_metric(1.0, [(0, -2 / 3), (1, -2 / 3), (-1, -2 / 3)])
    res = area(m)
    assert res.value > 0
    assert math.isfinite(res.value)


def test_scaling_covariance_change_of_variables(tetra):
    # substituting z = sigma w multiplies the integrand by
    # sigma^(2 + sum 2 b_k) = sigma^-2 (computed here as the oracle factor)
    sigma = 1.7
    bsum = math.fsum(tetra.exponents())
    oracle = sigma ** (2.0 + 2.0 * bsum)
    for scale in (1.0, 3.0):
        m = tetra.with_scale(scale)
        ms = make_metric(scale, [(sigma * v.position, v.exponent)
                                 for v in m.vertices])
        ratio = area(ms).value / area(m).value
        assert ratio == pytest.approx(oracle, rel=1e-10)


def test_integrate_constant_equals_area(tetra):
    a = area(tetra)
    b = integrate(tetra, lambda z: np.ones(np.shape(z)), QuadratureConfig())
    assert abs(a.value - b.value) / a.value < 1e-12


def test_integrate_odd_function_vanishes(tetra):
    res = integrate(tetra, lambda z: np.real(z),
                    QuadratureConfig(rel_tol=1e-7, abs_tol=1e-9))
    assert abs(res.value) < 1e-7


def test_far_field_indicator_decay(tetra):
    cfg = QuadratureConfig(rel_tol=1e-6, abs_tol=1e-9)
    tails = []
    for R in (5.0, 10.0):
        res = integrate(
            tetra, lambda z, R=R: (np.abs(z) > R).astype(float), cfg
        )
        tails.append(res.value)
    assert tails[1] < tails[0]
    # density ~ |z|^-4, so the tail mass scales like R^-2
    assert tails[0] / tails[1] == pytest.approx(4.0, rel=0.2)


def test_error_estimate_honesty(tetra):
    # f = gaussian / density integrates to exactly pi (plane gaussian);
    # the estimate must cover the true error with a factor-3 margin
    rng = np.random.default_rng(7)
    cfg = QuadratureConfig(rel_tol=1e-7, abs_tol=1e-10)
    zs = np.asarray(tetra.positions())
    bs = np.asarray(tetra.exponents())
    hit = 0
    trials = 20
    for _ in range(trials):
        z0 = complex(rng.uniform(-1.5, 1.5), rng.uniform(-1.5, 1.5))

        def f(z, z0=z0):
            logd = np.zeros(np.shape(z))
            for zk, bk in zip(zs, bs):
                logd += 2 * bk * np.log(np.abs(z - zk))
            return np.exp(-np.abs(z - z0) ** 2 - logd)

        res = integrate(tetra, f, cfg)
        if abs(res.value - PI) <= 3.0 * res.error_estimate:
            hit += 1
    assert hit >= 0.95 * trials


def test_determinism(tetra):
    a = area(tetra)
    b = area(tetra)
    assert a.value == b.value
    assert a.error_estimate == b.error_estimate
    assert a.cell_count == b.cell_count


def test_tolerance_not_reached_carries_partial(tetra):
    with pytest.raises(ToleranceNotReached) as exc:
        area(tetra, QuadratureConfig(rel_tol=1e-13, abs_tol=1e-16, max_depth=2))
    partial = exc.value.partial
    assert partial is not None
    assert partial.value == pytest.approx(LEMNISCATIC_AREA, rel=1e-2)


def test_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(patch_radius_factor=0.6)
    with pytest.raises(ValueError):
        QuadratureConfig(rel_tol=-1.0)


def test_area_estimate_respects_contract(tetra, quad_cfg):
    res = area(tetra, quad_cfg)
    assert res.error_estimate <= max(quad_cfg.abs_tol,
                                     quad_cfg.rel_tol * res.value)
