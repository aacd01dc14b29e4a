"""Flat conical metrics on the Riemann sphere.

A genus-zero polyhedral surface is the plane carrying the metric

    m = C * prod_k |z - z_k|^(2 b_k) |dz|^2,        C > 0,  b_k > -1,

with cone angle beta_k = 2*pi*(b_k + 1) at the vertex z_k and the
Gauss-Bonnet constraint sum_k b_k = -2 (no cone point at infinity).
This module owns the data model, pointwise density evaluation, and the
three infinitesimal variation fields (vertex position, cone angle with
vertex 1 compensating, overall scale).

Conventions
-----------
Writing the conformal factor as m = exp(-phi) |dz|^2,

    -phi(z) = log C + sum_k 2 b_k log|z - z_k|,

the variation fields phi-dot are:

    position of vertex i :  b_i / (z - z_i)                 (complex)
    angle of vertex i>1  :  (1/pi) log|(z - z_1)/(z - z_i)| (real; beta_i
                            grows at unit rate while beta_1 compensates,
                            so the constraint sum_k b_k = -2 is preserved)
    overall scale        :  -1/C                            (real)

Vertex indices are 1-based throughout the public API; vertex 1 is the
fixed gauge vertex for angle variations.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Sequence, Tuple, Union

from .errors import (
    DuplicateVertex,
    EvaluationAtVertex,
    GaussBonnetViolation,
    GaugeVertexVariation,
    InvalidExponent,
    InvalidMetricJSON,
    NonpositiveScale,
)

TWO_PI = 2.0 * math.pi

GAUSS_BONNET_TOL = 1e-12


# --------------------------------------------------------------------------
# data model
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class ConicalVertex:
    """One conical singularity: position z_k and exponent b_k.

    The cone angle is derived, never stored independently, so
    ``angle == 2*pi*(exponent + 1)`` holds exactly by construction.
    """

    position: complex
    exponent: float

    @property
    def angle(self) -> float:
        return TWO_PI * (self.exponent + 1.0)


@dataclass(frozen=True)
class PolyhedralMetric:
    """Validated flat conical metric: scale C plus ordered vertex list.

    Immutable after construction; safe to share across threads.
    """

    scale: float
    vertices: Tuple[ConicalVertex, ...]

    @property
    def num_vertices(self) -> int:
        return len(self.vertices)

    def positions(self) -> Tuple[complex, ...]:
        return tuple(v.position for v in self.vertices)

    def exponents(self) -> Tuple[float, ...]:
        return tuple(v.exponent for v in self.vertices)

    def angles(self) -> Tuple[float, ...]:
        return tuple(v.angle for v in self.vertices)

    def min_pairwise_distance(self) -> float:
        zs = self.positions()
        return min(
            abs(zs[i] - zs[j])
            for i in range(len(zs))
            for j in range(i + 1, len(zs))
        )

    def with_scale(self, scale: float) -> "PolyhedralMetric":
        return make_metric(scale, [(v.position, v.exponent) for v in self.vertices])

    def with_exponent_shift(self, i: int, db_i: float) -> "PolyhedralMetric":
        """Metric with b_i shifted by db_i and b_1 by -db_i (gauge-preserving)."""
        verts = [(v.position, v.exponent) for v in self.vertices]
        z_i, b_i = verts[i - 1]
        z_1, b_1 = verts[0]
        verts[i - 1] = (z_i, b_i + db_i)
        verts[0] = (z_1, b_1 - db_i)
        return make_metric(self.scale, verts)

    def with_position(self, i: int, z: complex) -> "PolyhedralMetric":
        verts = [(v.position, v.exponent) for v in self.vertices]
        verts[i - 1] = (z, verts[i - 1][1])
        return make_metric(self.scale, verts)


@dataclass(frozen=True)
class MetricDensity:
    """Pointwise density e^{-phi(z)} together with its (finite) logarithm."""

    value: float
    log_value: float


# --------------------------------------------------------------------------
# variation channels
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Position:
    """Vary the position of vertex ``i`` (1-based)."""

    i: int


@dataclass(frozen=True)
class Angle:
    """Vary the cone angle of vertex ``i`` (1-based, i != 1); vertex 1
    compensates so the exponent sum stays at -2."""

    i: int


@dataclass(frozen=True)
class Scale:
    """Vary the overall scale factor C."""


VariationChannel = Union[Position, Angle, Scale]


# --------------------------------------------------------------------------
# construction
# --------------------------------------------------------------------------

def make_metric(
    scale: float,
    verts: Sequence[Tuple[complex, float]],
    repair_gauss_bonnet: bool = False,
) -> PolyhedralMetric:
    """Validate and build a PolyhedralMetric.

    Parameters
    ----------
    scale : positive float, the overall factor C.
    verts : sequence of (position, exponent) pairs, at least 3 entries,
        each exponent > -1, positions pairwise distinct, exponent sum
        within 1e-12 of -2.
    repair_gauss_bonnet : when True, a small residual in the exponent sum
        is absorbed into b_1 so the sum closes exactly (useful for JSON
        inputs that carry rounding). Off by default.
    """
    if not scale > 0.0 or not math.isfinite(scale):
        raise NonpositiveScale(f"scale must be a positive finite real, got {scale}")
    verts = [(complex(z), float(b)) for z, b in verts]
    for z, b in verts:
        if not b > -1.0 or not math.isfinite(b):
            raise InvalidExponent(f"exponent must satisfy b > -1, got {b}")
    if len(verts) < 3:
        raise GaussBonnetViolation(
            f"need at least 3 vertices, got {len(verts)}"
        )
    bsum = math.fsum(b for _, b in verts)
    if abs(bsum + 2.0) > GAUSS_BONNET_TOL:
        if repair_gauss_bonnet and abs(bsum + 2.0) < 1e-6:
            z1, b1 = verts[0]
            verts[0] = (z1, b1 - (bsum + 2.0))
            if not verts[0][1] > -1.0:
                raise InvalidExponent(
                    "Gauss-Bonnet repair pushed b_1 out of the admissible range"
                )
        else:
            raise GaussBonnetViolation(
                f"exponents must sum to -2 (Gauss-Bonnet), got {bsum!r}"
            )
    for i in range(len(verts)):
        for j in range(i + 1, len(verts)):
            if verts[i][0] == verts[j][0]:
                raise DuplicateVertex(
                    f"vertices {i + 1} and {j + 1} share position {verts[i][0]}"
                )
    return PolyhedralMetric(
        scale=float(scale),
        vertices=tuple(ConicalVertex(z, b) for z, b in verts),
    )


def tetrahedron_metric(scale: float = 1.0) -> PolyhedralMetric:
    """The equilateral-square tetrahedron: vertices {1, -1, i, -i}, all
    cone angles pi (b_k = -1/2)."""
    return make_metric(scale, [(1, -0.5), (-1, -0.5), (1j, -0.5), (-1j, -0.5)])


# --------------------------------------------------------------------------
# pointwise evaluation
# --------------------------------------------------------------------------

def log_density(m: PolyhedralMetric, z: complex) -> float:
    """log of the metric density: log C + sum_k 2 b_k log|z - z_k| = -phi(z).

    Raises EvaluationAtVertex exactly at a vertex position (where the log
    diverges for b_k < 0 and the derivative for any b_k != 0).
    """
    z = complex(z)
    terms = [math.log(m.scale)]
    for v in m.vertices:
        d = abs(z - v.position)
        if d == 0.0:
            raise EvaluationAtVertex(f"z coincides with vertex at {v.position}")
        terms.append(2.0 * v.exponent * math.log(d))
    return math.fsum(terms)


def density(m: PolyhedralMetric, z: complex) -> MetricDensity:
    lv = log_density(m, z)
    return MetricDensity(value=math.exp(lv), log_value=lv)


def variation_field(
    m: PolyhedralMetric, channel: VariationChannel, z: complex
) -> Union[complex, float]:
    """The variation phi-dot(z) of the conformal factor along ``channel``.

    Position(i) returns the complex field b_i/(z - z_i); Angle(i) returns
    the real field (1/pi) log|(z - z_1)/(z - z_i)| (unit growth of beta_i,
    compensated by beta_1); Scale returns the constant -1/C.
    """
    z = complex(z)
    if isinstance(channel, Scale):
        return -1.0 / m.scale
    if isinstance(channel, Position):
        z_i = m.vertices[channel.i - 1].position
        if z == z_i:
            raise EvaluationAtVertex(f"z coincides with vertex {channel.i}")
        return m.vertices[channel.i - 1].exponent / (z - z_i)
    if isinstance(channel, Angle):
        if channel.i == 1:
            raise GaugeVertexVariation(
                "vertex 1 is the gauge vertex; vary an i != 1 angle instead"
            )
        z_1 = m.vertices[0].position
        z_i = m.vertices[channel.i - 1].position
        if z == z_i or z == z_1:
            raise EvaluationAtVertex("z coincides with a varied vertex")
        return math.log(abs(z - z_1) / abs(z - z_i)) / math.pi
    raise TypeError(f"unknown variation channel {channel!r}")


# --------------------------------------------------------------------------
# JSON interchange
# --------------------------------------------------------------------------
# Schema: {"C": <float>, "vertices": [{"z": [<re>, <im>], "b": <float>}, ...]}

def metric_to_json_dict(m: PolyhedralMetric) -> dict:
    return {
        "C": m.scale,
        "vertices": [
            {"z": [v.position.real, v.position.imag], "b": v.exponent}
            for v in m.vertices
        ],
    }


def metric_from_json_dict(obj: dict, repair_gauss_bonnet: bool = False) -> PolyhedralMetric:
    try:
        scale = obj["C"]
        verts = [
            (complex(v["z"][0], v["z"][1]), v["b"]) for v in obj["vertices"]
        ]
    except (KeyError, TypeError, IndexError) as exc:
        raise InvalidMetricJSON(f"malformed metric JSON: {exc}") from exc
    return make_metric(scale, verts, repair_gauss_bonnet=repair_gauss_bonnet)


def load_metric(path: str, repair_gauss_bonnet: bool = False) -> PolyhedralMetric:
    with open(path, "r", encoding="utf-8") as fh:
        return metric_from_json_dict(json.load(fh), repair_gauss_bonnet)


def dump_metric(m: PolyhedralMetric, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(metric_to_json_dict(m), fh)
        fh.write("\n")
