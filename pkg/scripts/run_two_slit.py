#!/usr/bin/env python3
"""Sweep the slit separation and verify the lambda*d^2 visibility law.

Usage:
    python3 scripts/run_two_slit.py [--lam 1.0] [--t-final 1.0] [--out DIR]
"""
import argparse
from pathlib import Path

from decolab.runner import write_trace_csv
from decolab.scenarios import TwoSlitConfig, two_slit_visibility, visibility_exponent


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--lam", type=float, default=1.0, help="localization rate")
    ap.add_argument("--t-final", type=float, default=1.0)
    ap.add_argument("--out", default=None, help="directory for CSV traces")
    args = ap.parse_args()

    print(f"{'d':>6s} {'fitted k':>12s} {'lam*d^2':>12s} {'rel err':>10s}")
    for d in (0.5, 1.0, 1.5, 2.0):
        cfg = TwoSlitConfig(slit_separation=d, lam=args.lam, t_final=args.t_final)
        trace = two_slit_visibility(cfg)
        k, _ = visibility_exponent(trace)
        target = args.lam * d**2
        print(f"{d:6.2f} {k:12.6f} {target:12.6f} {abs(k - target) / target:10.2e}")
        if args.out:
            Path(args.out).mkdir(parents=True, exist_ok=True)
            write_trace_csv(str(Path(args.out) / f"two_slit_d{d}.csv"), "time", trace)


if __name__ == "__main__":
    main()
