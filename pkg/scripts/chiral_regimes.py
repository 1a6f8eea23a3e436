#!/usr/bin/env python3
"""Map the monitoring-strength regimes of the chiral two-level molecule.

Sweeps gamma/omega over several decades and reports the classified regime,
the fitted relaxation rate of P_L, and the strong-monitoring prediction
omega^2 / (2 gamma).

Usage:
    python3 scripts/chiral_regimes.py [--omega 1.0]
"""
import argparse

from decolab.scenarios import ChiralConfig, chiral_dynamics, classify_regime, relaxation_rate


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--omega", type=float, default=1.0)
    args = ap.parse_args()

    print(f"{'gamma':>8s} {'regime':>8s} {'fitted rate':>12s} {'w^2/2g':>10s}")
    for gamma in (0.01, 0.1, 1.0, 10.0, 50.0):
        # one relaxation e-folding is ~2 gamma / omega^2; cap the cost
        t_final = min(100.0, max(20.0, 2.5 * gamma / args.omega**2))
        dt = min(0.001, 0.02 / gamma)
        cfg = ChiralConfig(omega=args.omega, gamma=gamma, t_final=t_final, dt=dt,
                           record_stride=max(1, round(0.05 / dt)))
        trace = chiral_dynamics(cfg)
        try:
            rate = f"{relaxation_rate(trace):12.5f}"
        except ValueError:
            rate = f"{'n/a':>12s}"
        pred = args.omega**2 / (2.0 * gamma)
        print(f"{gamma:8.2f} {classify_regime(cfg):>8s} {rate} {pred:10.5f}")


if __name__ == "__main__":
    main()
