#!/usr/bin/env python3
"""Stress the cone heat kernel and resolvent against their independent
oracles (plane reduction, method of images, closed-form density) and
print worst-case deviations.

Usage: python scripts/cone_kernel_oracles.py [seed]
"""

import math
import sys

import numpy as np

from polydet import (
    ConePoint,
    a_mu_disk_integral,
    heat_kernel_cone,
    heat_kernel_images,
    q_of_beta,
    resolvent_cone,
    resolvent_images,
)

PI = math.pi
TWO_PI = 2 * math.pi


def main():
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 2024
    rng = np.random.default_rng(seed)

    worst_plane = worst_img = worst_res = 0.0
    for _ in range(20):
        r, rp = rng.uniform(0.2, 2.0, 2)
        u, up = rng.uniform(0.0, 1.0, 2)
        for t in (0.1, 1.0):
            p, q = ConePoint(r, u * TWO_PI), ConePoint(rp, up * TWO_PI)
            d2 = r * r + rp * rp - 2 * r * rp * math.cos(p.phi - q.phi)
            plane = math.exp(-d2 / (4 * t)) / (4 * PI * t)
            worst_plane = max(worst_plane,
                              abs(heat_kernel_cone(TWO_PI, t, p, q) - plane))
            for n in (2, 3, 4):
                beta = TWO_PI / n
                p2, q2 = ConePoint(r, u * beta), ConePoint(rp, up * beta)
                worst_img = max(worst_img, abs(
                    heat_kernel_cone(beta, t, p2, q2)
                    - heat_kernel_images(n, t, p2, q2)))
        p3 = ConePoint(r, 0.05)
        q3 = ConePoint(rp + (0.1 if abs(rp - r) < 1e-6 else 0.0),
                       0.05 + u * PI / 2)
        worst_res = max(worst_res, abs(
            resolvent_cone(PI, -4.0, p3, q3) - resolvent_images(2, -4.0, p3, q3)))

    print(f"seed {seed}, 20 point pairs")
    print(f"plane reduction (beta = 2 pi)   : {worst_plane:.3e}")
    print(f"image sums (beta = pi, 2pi/3, pi/2): {worst_img:.3e}")
    print(f"resolvent images (beta = pi)    : {worst_res:.3e}")

    print("integrated density -> heat-trace constant at beta = pi:")
    for mu in (-25.0, -50.0, -100.0):
        err = abs(a_mu_disk_integral(PI, mu, 1.0) - q_of_beta(PI))
        print(f"  mu = {mu:7.1f}  |integral - Q(pi)| = {err:.3e}")


if __name__ == "__main__":
    main()
