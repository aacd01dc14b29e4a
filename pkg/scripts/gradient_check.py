#!/usr/bin/env python3
"""Run the analytic-vs-finite-difference gradient suite on the built-in
corpus metrics and print a channel-by-channel table.

Usage: python scripts/gradient_check.py [--richardson]
"""

import sys

from polydet import FDConfig, make_metric, run_suite, tetrahedron_metric

CORPUS = {
    "tetrahedron": tetrahedron_metric(),
    "asym5": make_metric(1.3, [
        (1.1 + 0.3j, -0.7),
        (-0.8 + 0.9j, -0.6),
        (-1.0 - 0.7j, -0.5),
        (0.7 - 1.1j, -0.4),
        (0.1 + 0.15j, 0.2),
    ]),
}


def main():
    fdcfg = FDConfig(richardson="--richardson" in sys.argv)
    for name, m in CORPUS.items():
        print(f"== {name} (richardson={fdcfg.richardson})")
        for r in run_suite(m, fdcfg=fdcfg):
            print(f"  {r.channel:7s} analytic {r.analytic!s:>45} "
                  f"fd {r.finite_difference!s:>45}  rel {r.rel_err:.2e}")
        worst = max(r.rel_err for r in run_suite(m, fdcfg=fdcfg))
        print(f"  worst relative deviation: {worst:.2e}")


if __name__ == "__main__":
    main()
