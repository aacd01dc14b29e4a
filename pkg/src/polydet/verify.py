"""Finite-difference harness for the analytic gradient formulas.

Differentiates log(det/Area) -- assembled without any 2D quadrature --
along the three variation channels and pairs each result with its
closed-form counterpart:

    Position(i)  vs  grad_position   (Wirtinger derivative from two real
                                      central differences)
    Angle(i!=1)  vs  grad_angle      (b_i and b_1 perturbed by -+h/2pi)
    Scale        vs  grad_scale

Step sizes are scaled to the perturbed quantity: h = step * min-vertex-gap
for positions (the cap keeps near-degenerate pairs inside the quadratic
accuracy regime), h = step * beta_i for angles, h = step * C for the
scale.  The optional Richardson switch combines D(h) and D(h/2) into the
fourth-order extrapolation (4 D(h/2) - D(h))/3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Union

from .detlap import (
    GradientReport,
    grad_angle,
    grad_position,
    grad_scale,
    log_det_over_area,
)
from .errors import GaugeVertexVariation, PerturbationLeavesDomain
from .metric import Angle, PolyhedralMetric, Position, Scale, VariationChannel
from .regint import HadamardConfig

TWO_PI = 2.0 * math.pi

REL_ERR_FLOOR = 1.0  # gradients are O(1); below this scale abs error rules


@dataclass(frozen=True)
class FDConfig:
    step: float = 1e-4
    richardson: bool = False

    def __post_init__(self):
        if not self.step > 0.0:
            raise ValueError("step must be positive")


def _central(f: Callable[[float], float], h: float) -> float:
    return (f(h) - f(-h)) / (2.0 * h)


def _derivative(f: Callable[[float], float], h: float, richardson: bool) -> float:
    d1 = _central(f, h)
    if not richardson:
        return d1
    d2 = _central(f, 0.5 * h)
    return (4.0 * d2 - d1) / 3.0


def fd_gradient(
    m: PolyhedralMetric,
    channel: VariationChannel,
    cfg: HadamardConfig = HadamardConfig(),
    fdcfg: FDConfig = FDConfig(),
) -> Union[float, complex]:
    """Central finite difference of log(det/Area) along ``channel``."""
    L = lambda mm: log_det_over_area(mm, cfg)

    if isinstance(channel, Scale):
        h = fdcfg.step * m.scale
        if m.scale - h <= 0.0:
            raise PerturbationLeavesDomain("scale step crosses zero")
        return _derivative(
            lambda e: L(m.with_scale(m.scale + e)), h, fdcfg.richardson
        )

    if isinstance(channel, Position):
        i = channel.i
        z0 = m.vertices[i - 1].position
        dmin = m.min_pairwise_distance()
        h = fdcfg.step * min(abs(z0) + dmin, dmin)
        dx = _derivative(
            lambda e: L(m.with_position(i, z0 + e)), h, fdcfg.richardson
        )
        dy = _derivative(
            lambda e: L(m.with_position(i, z0 + 1j * e)), h, fdcfg.richardson
        )
        return 0.5 * complex(dx, -dy)

    if isinstance(channel, Angle):
        i = channel.i
        if i == 1:
            raise GaugeVertexVariation("vertex 1 is the gauge vertex")
        # the compensating vertex moves too, so the stiffer (smaller) of
        # the two angles sets the step scale
        h = fdcfg.step * min(m.vertices[i - 1].angle, m.vertices[0].angle)
        db = h / TWO_PI
        margin = 1e-12
        b_i = m.vertices[i - 1].exponent
        b_1 = m.vertices[0].exponent
        if b_i - db <= -1.0 + margin or b_1 - db <= -1.0 + margin:
            raise PerturbationLeavesDomain(
                "angle step pushes an exponent to the b = -1 boundary"
            )
        return _derivative(
            lambda e: L(m.with_exponent_shift(i, e / TWO_PI)), h, fdcfg.richardson
        )

    raise TypeError(f"unknown variation channel {channel!r}")


def _report(channel: str, analytic, fd) -> GradientReport:
    abs_err = abs(analytic - fd)
    scale = max(abs(analytic), abs(fd), REL_ERR_FLOOR)
    return GradientReport(
        channel=channel,
        analytic=analytic,
        finite_difference=fd,
        abs_err=abs_err,
        rel_err=abs_err / scale,
    )


def run_suite(
    m: PolyhedralMetric,
    cfg: HadamardConfig = HadamardConfig(),
    fdcfg: FDConfig = FDConfig(),
) -> List[GradientReport]:
    """One report per channel: Position(1..M), Angle(2..M), Scale."""
    reports = []
    for i in range(1, m.num_vertices + 1):
        reports.append(_report(
            f"z:{i}", grad_position(m, i), fd_gradient(m, Position(i), cfg, fdcfg)
        ))
    for i in range(2, m.num_vertices + 1):
        reports.append(_report(
            f"beta:{i}", grad_angle(m, i, cfg), fd_gradient(m, Angle(i), cfg, fdcfg)
        ))
    reports.append(_report(
        "C", grad_scale(m), fd_gradient(m, Scale(), cfg, fdcfg)
    ))
    return reports
